use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Mode, RunOptions};
use crate::sim::Action;

/// One executed step. Positions, reward and flags describe the state after
/// the action; `cost` is the ES signal measured before it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub ee: [f64; 3],
    pub obj: [f64; 3],
    pub goal: [f64; 3],
    pub action: Action,
    pub beta: u8,
    pub cost: f64,
    pub reward: f64,
    pub contact: bool,
    pub success: bool,
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// The object's centre left the table.
    LeftWorkspace,
    /// The object stayed on the table but never met the success criterion.
    NotReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub mode: Mode,
    pub seed: u64,
    pub steps: usize,
    pub success: bool,
    pub failure: Option<FailureKind>,
    pub final_d2: f64,
    /// Mean `d₂` over every step.
    pub mean_tracking_error: f64,
    /// Mean `d₂` over the trailing `tracking_window` of the episode.
    pub tail_tracking_error: f64,
    pub switch_step: Option<u64>,
    pub moving_goal: bool,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

impl EpisodeSummary {
    /// Fixed goals succeed if any step succeeded; moving goals succeed if
    /// the mean `d₂` over the trailing window is within the threshold.
    pub fn from_records(
        records: &[StepRecord],
        mode: Mode,
        seed: u64,
        moving_goal: bool,
        off_table: bool,
        switch_step: Option<u64>,
        opts: &RunOptions,
    ) -> Self {
        let window = ((records.len() as f64 * opts.tracking_window).ceil() as usize).clamp(1.min(records.len()), records.len());
        let tail = mean(records[records.len() - window..].iter().map(|r| r.d2));
        let success = if moving_goal {
            tail <= opts.tracking_threshold
        } else {
            records.iter().any(|r| r.success)
        };
        let failure = match (success, off_table) {
            (true, _) => None,
            (false, true) => Some(FailureKind::LeftWorkspace),
            (false, false) => Some(FailureKind::NotReached),
        };
        Self {
            mode,
            seed,
            steps: records.len(),
            success,
            failure,
            final_d2: records.last().map_or(f64::NAN, |r| r.d2),
            mean_tracking_error: mean(records.iter().map(|r| r.d2)),
            tail_tracking_error: tail,
            switch_step,
            moving_goal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub records: Vec<StepRecord>,
    pub summary: EpisodeSummary,
}

pub const CSV_HEADER: [&str; 20] = [
    "t", "ee_x", "ee_y", "ee_z", "obj_x", "obj_y", "obj_z", "goal_x", "goal_y", "goal_z", "action_1", "action_2",
    "action_3", "action_4", "beta", "J", "reward", "contact", "success", "d2",
];

impl EpisodeLog {
    /// Writes one header line and one row per step.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            let mut row: Vec<String> = Vec::with_capacity(CSV_HEADER.len());
            row.push(r.t.to_string());
            for v in r.ee.iter().chain(&r.obj).chain(&r.goal).chain(&r.action) {
                row.push(v.to_string());
            }
            row.push(r.beta.to_string());
            row.push(r.cost.to_string());
            row.push(r.reward.to_string());
            row.push((r.contact as u8).to_string());
            row.push((r.success as u8).to_string());
            row.push(r.d2.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Summary recomputed from the step records.
    pub fn recompute_summary(&self, off_table: bool, opts: &RunOptions) -> EpisodeSummary {
        let s = &self.summary;
        EpisodeSummary::from_records(&self.records, s.mode, s.seed, s.moving_goal, off_table, s.switch_step, opts)
    }
}
