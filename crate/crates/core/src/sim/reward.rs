/// Object-to-goal distance below which an episode counts as solved (m).
pub const SUCCESS_TOLERANCE: f64 = 0.05;

/// Bonus paid whenever the object lies within [`SUCCESS_TOLERANCE`] of the goal.
pub const SUCCESS_BONUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardTerms {
    pub reward: f64,
    /// End-effector to object distance.
    pub d1: f64,
    /// Object to goal distance.
    pub d2: f64,
    pub success: bool,
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Dense shaped reward `−d1 − d2 + 2·[d2 ≤ δ]`.
pub fn compute_reward(ee: &[f64; 3], obj: &[f64; 3], goal: &[f64; 3]) -> RewardTerms {
    let d1 = distance(ee, obj);
    let d2 = distance(obj, goal);
    let success = d2 <= SUCCESS_TOLERANCE;
    let bonus = if success { SUCCESS_BONUS } else { 0.0 };
    RewardTerms {
        reward: -d1 - d2 + bonus,
        d1,
        d2,
        success,
    }
}
