//! Seed sweeps on a worker pool with a fixed output order.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use persuade_core::learners::{LearnAndRobustify, Learner, LearnerKind};
use persuade_core::robustify::persuasive_on_ball_exact;
use persuade_core::sim::{EpisodeConfig, Environment};
use persuade_core::{Instance, PERSUASION_TOL};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{write_summary, ResultsWriter, SummaryRow};

pub const SEED_ENV: &str = "PERSUADE_SEED";

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub learner: String,
    pub seed: u64,
    pub instant: Vec<f64>,
    /// Exact ball check of the final alg3 scheme, when requested and reached.
    pub ball_check: Option<bool>,
}

impl EpisodeResult {
    pub fn total(&self) -> f64 {
        self.instant.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Learner order, then seed order.
    pub episodes: Vec<EpisodeResult>,
    pub summary: Vec<SummaryRow>,
}

/// Reads `PERSUADE_SEED`; an unparsable value is a config error.
pub fn seed_override_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::config(SEED_ENV, format!("`{s}` is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn play(env: &mut Environment<'_>, learner: &mut dyn Learner, horizon: u64) -> Result<Vec<f64>, CliError> {
    let mut instant = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        instant.push(env.step(learner)?.instant_regret);
    }
    Ok(instant)
}

struct Task<'a> {
    label: &'a str,
    kind: LearnerKind,
    seed: u64,
}

fn run_task(
    task: &Task<'_>,
    instance: &Instance,
    u_star: f64,
    horizon: u64,
    config: EpisodeConfig,
    ball_check: bool,
) -> Result<EpisodeResult, CliError> {
    let mut env = Environment::with_optimum(instance, task.seed, config, u_star);
    let (instant, ball_check) = match task.kind {
        LearnerKind::LearnAndRobustify { epsilon_exponent } if ball_check => {
            let mut learner = LearnAndRobustify::with_exponent(&instance.model, horizon, epsilon_exponent)?;
            let instant = play(&mut env, &mut learner, horizon)?;
            let check = match (learner.mu_hat(), learner.done()) {
                (Some(mu), Some(scheme)) if learner.failure().is_none() => {
                    Some(persuasive_on_ball_exact(mu, learner.radius(), scheme, instance.v(), PERSUASION_TOL)?)
                }
                _ => None,
            };
            (instant, check)
        }
        kind => {
            let mut learner = kind.build(instance, horizon)?;
            (play(&mut env, learner.as_mut(), horizon)?, None)
        }
    };
    Ok(EpisodeResult { learner: task.label.to_string(), seed: task.seed, instant, ball_check })
}

/// Runs every (learner, seed) episode. `threads = None` uses rayon's default pool size.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>, seed_override: Option<u64>) -> Result<RunOutput, CliError> {
    let instance = cfg.instance.build()?;
    let learners = cfg.learner_kinds();
    let seeds = cfg.seed_list(seed_override);
    let (_, u_star) = instance.optimum()?;
    let config = EpisodeConfig { tie: cfg.tie(), reveal_states: cfg.flags.state_observing };
    // surface model-assumption problems once, before fanning out
    for (_, kind) in &learners {
        kind.build(&instance, cfg.horizon)?;
    }
    let tasks: Vec<Task<'_>> = learners
        .iter()
        .flat_map(|(label, kind)| seeds.iter().map(move |&seed| Task { label, kind: *kind, seed }))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().map_err(|e| CliError::config("--threads", e.to_string()))?;
    let episodes = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| run_task(t, &instance, u_star, cfg.horizon, config, cfg.flags.exact_ball_check))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let summary = learners
        .iter()
        .map(|(label, kind)| {
            let totals: Vec<f64> = episodes.iter().filter(|e| &e.learner == label).map(EpisodeResult::total).collect();
            let n = totals.len() as f64;
            let mean = totals.iter().sum::<f64>() / n;
            let var = totals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            SummaryRow {
                learner: label.clone(),
                horizon: cfg.horizon,
                mean,
                std: var.sqrt(),
                bound: kind.regret_bound(&instance, cfg.horizon),
            }
        })
        .collect();
    Ok(RunOutput { episodes, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFiles {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub ball_checks: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

/// `run`: parse the config, run all episodes and write the CSVs into `out_dir`.
pub fn cmd_run(config_path: &Path, out_dir: &Path, threads: Option<usize>, seed_override: Option<u64>) -> Result<RunFiles, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let cfg = ExperimentConfig::parse(&text)?;
    let run = run_experiment(&cfg, threads, seed_override)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    let results = out_dir.join(&cfg.outputs.results);
    let mut w = ResultsWriter::new(create(&results)?).map_err(|e| CliError::io(&results, e))?;
    for ep in &run.episodes {
        w.episode(&ep.learner, ep.seed, &ep.instant).map_err(|e| CliError::io(&results, e))?;
    }
    w.finish().map_err(|e| CliError::io(&results, e))?;

    let summary = out_dir.join(&cfg.outputs.summary);
    write_summary(create(&summary)?, &run.summary).map_err(|e| CliError::io(&summary, e))?;

    let ball_checks = if cfg.flags.exact_ball_check {
        let path = out_dir.join("ball_checks.csv");
        let mut text = String::from("learner,seed,persuasive_on_ball\n");
        for ep in &run.episodes {
            if let Some(ok) = ep.ball_check {
                text.push_str(&format!("{},{},{}\n", ep.learner, ep.seed, ok));
            }
        }
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Some(path)
    } else {
        None
    };
    Ok(RunFiles { results, summary, ball_checks })
}
