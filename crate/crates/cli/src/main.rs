use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use esdrl::harness::{
    cmd_es_verify, cmd_eval, cmd_inspect_checkpoint, cmd_scenario, cmd_train, load_agent, ExperimentConfig,
    HarnessError, ScenarioName,
};
use esdrl::supervisor::Mode;

#[derive(Parser)]
#[command(name = "esdrl", version, about = "Hybrid ES / DDPG manipulation experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configuration's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,
    /// Full-size networks, batch and replay instead of the desk preset.
    #[arg(long, global = true)]
    paper_scale: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train a DDPG agent on the configured task.
    Train,
    /// Evaluate a trained actor without exploration noise.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Compare controller modes on a built-in or configured scenario.
    Scenario {
        /// push_friction_fixed, push_friction_moving or pp_track3d.
        name: Option<ScenarioName>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Comma-separated subset of rl_only, es_only, hybrid.
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<Mode>>,
        #[arg(long)]
        seeds: Option<u64>,
    },
    /// Sweep the quadratic averaging benchmark over dither frequencies.
    EsVerify {
        /// Comma-separated ascending frequencies.
        #[arg(long, value_delimiter = ',')]
        omegas: Option<Vec<f64>>,
        /// Write every n-th integration sample to the trajectory CSVs.
        #[arg(long, default_value_t = 100)]
        stride: usize,
    },
    /// Print the structure and hyperparameters of a checkpoint.
    InspectCheckpoint { path: PathBuf },
}

fn base_config(g: &Global, preset: Option<ScenarioName>) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match (&g.config, preset) {
        (Some(_), Some(_)) => {
            return Err(HarnessError::Usage("pass a scenario name or --config, not both".into()));
        }
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(name)) => name.preset(),
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if g.paper_scale {
        cfg = cfg.with_paper_scale();
    }
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let g = &cli.global;
    match cli.command {
        Command::Train => {
            let cfg = base_config(g, None)?;
            println!("training {:?}, config {}", cfg.task, &cfg.hash()[..12]);
            let out = cmd_train(&cfg, &g.out, |r| {
                println!(
                    "epoch {:>4}  success {:.2}  smoothed {:.3}  return {:>8.3}",
                    r.epoch, r.success_rate, r.smoothed_success, r.mean_return
                );
            })?;
            println!(
                "{} env steps, {} updates; checkpoint {}",
                out.report.env_steps,
                out.report.updates,
                out.checkpoint.display()
            );
        }
        Command::Eval { checkpoint, episodes } => {
            let mut cfg = base_config(g, None)?;
            if let Some(n) = episodes {
                cfg.eval.episodes = n;
            }
            let agent = load_agent(&checkpoint)?;
            let report = cmd_eval(&cfg, &agent.actor, Some(&checkpoint), &g.out)?;
            print_json(&report);
        }
        Command::Scenario {
            name,
            checkpoint,
            modes,
            seeds,
        } => {
            if name.is_none() && g.config.is_none() {
                return Err(HarnessError::Usage("scenario needs a name or --config".into()));
            }
            let mut cfg = base_config(g, name)?;
            if let Some(m) = modes {
                cfg.scenario.modes = m;
            }
            if let Some(n) = seeds {
                cfg.scenario.seeds = n;
            }
            let agent = checkpoint.as_deref().map(load_agent).transpose()?;
            let report = cmd_scenario(&cfg, agent.as_ref().map(|a| &a.actor), checkpoint.as_deref(), &g.out)?;
            println!(
                "{:<8} {:>8} {:>8} {:>6} {:>10} {:>10} {:>10}",
                "mode", "episodes", "success", "left", "final_d2", "mean_err", "tail_err"
            );
            for a in &report.aggregates {
                println!(
                    "{:<8} {:>8} {:>8.2} {:>6} {:>10.4} {:>10.4} {:>10.4}",
                    a.mode.name(),
                    a.episodes,
                    a.success_rate,
                    a.left_workspace,
                    a.mean_final_d2,
                    a.mean_tracking_error,
                    a.mean_tail_tracking_error
                );
            }
            println!("written to {}", g.out.join(&report.scenario).display());
        }
        Command::EsVerify { omegas, stride } => {
            let mut cfg = base_config(g, None)?;
            if let Some(w) = omegas {
                cfg.verify.omegas = w;
            }
            let report = cmd_es_verify(&cfg, &g.out, stride)?;
            println!("{:>10} {:>12}", "omega", "gap");
            for r in &report.rows {
                println!("{:>10} {:>12.6}", r.omega, r.gap);
            }
            println!("non-increasing: {}", report.non_increasing());
        }
        Command::InspectCheckpoint { path } => print_json(&cmd_inspect_checkpoint(Path::new(&path))?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
