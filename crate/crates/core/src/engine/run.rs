use rayon::prelude::*;

use super::step::{replay_team_gradient, StreamKey};
use super::{centralized_step, diffusion_step, initial_state, NetworkState, RunConfig, StepPlan};
use crate::diagnostics::{centroids, record_metrics, MetricsRecord, PerturbationInput};
use crate::error::{Error, Result};
use crate::games::GameOracle;
use crate::graph::{NetworkTopology, Team};

/// Recorded metrics of one Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub run: usize,
    pub records: Vec<MetricsRecord>,
    pub final_state: NetworkState,
    pub baseline_final: Option<[Vec<f64>; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub runs: Vec<RunTrace>,
}

/// Executes `cfg.mc_runs` independent runs of `cfg.horizon` iterations.
///
/// Run `r` uses the streams `(master_seed, r, ·, ·)`; the output is identical
/// whether runs execute in parallel or not.
pub fn run(topo: &NetworkTopology, game: &dyn GameOracle, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let plan = StepPlan::new(topo);
    let one = |r: usize| single_run(topo, &plan, game, cfg, r);
    let results: Vec<Result<RunTrace>> = if cfg.parallel {
        (0..cfg.mc_runs).into_par_iter().map(one).collect()
    } else {
        (0..cfg.mc_runs).map(one).collect()
    };
    Ok(RunOutput {
        runs: results.into_iter().collect::<Result<_>>()?,
    })
}

fn single_run(
    topo: &NetworkTopology,
    plan: &StepPlan,
    game: &dyn GameOracle,
    cfg: &RunConfig,
    r: usize,
) -> Result<RunTrace> {
    let dims = [game.dim(Team::One), game.dim(Team::Two)];
    let sizes = plan.sizes();
    let key = StreamKey {
        master_seed: cfg.master_seed,
        run: r as u64,
    };
    let nash = game.nash();
    let mut state = initial_state(topo, dims, cfg, r as u64);
    let mut baseline = cfg.baseline_enabled.then(|| centroids(&state));
    let mut records = vec![record_metrics(&state, None, game, plan, nash.as_ref(), baseline.as_ref(), key)?];
    for i in 1..=cfg.horizon {
        let next = diffusion_step(&state, plan, game, cfg.mu, cfg.master_seed, r as u64).map_err(|e| at(e, r, i))?;
        if let Some(detail) = next.find_non_finite() {
            return Err(Error::Divergence { run: r, iter: i, detail });
        }
        if let Some([w1, w2]) = &baseline {
            let (b1, b2) = centralized_step(w1, w2, game, cfg.mu, cfg.master_seed, r as u64, i, sizes)?;
            baseline = Some([b1, b2]);
        }
        if i % cfg.record_every == 0 || i == cfg.horizon {
            let pert = cfg.baseline_enabled.then_some(PerturbationInput { prev: &state, mu: cfg.mu });
            records.push(record_metrics(&next, pert, game, plan, nash.as_ref(), baseline.as_ref(), key).map_err(|e| at(e, r, i))?);
        }
        state = next;
    }
    Ok(RunTrace {
        run: r,
        records,
        final_state: state,
        baseline_final: baseline,
    })
}

fn at(e: Error, run: usize, iter: usize) -> Error {
    match e {
        Error::Divergence { detail, .. } => Error::Divergence { run, iter, detail },
        other => other,
    }
}

pub(crate) fn team_gradient_at(
    plan: &StepPlan,
    game: &dyn GameOracle,
    t: Team,
    own: &[f64],
    other: &[f64],
    key: StreamKey,
    iter: usize,
    out: &mut [f64],
) -> Result<()> {
    replay_team_gradient(plan, game, t, own, other, key, iter, out)
}
