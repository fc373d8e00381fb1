use crate::engine::{team_gradient_at, NetworkState, StepPlan, StreamKey};
use crate::error::Result;
use crate::games::{GameOracle, LossReport, NashPoint};
use crate::graph::Team;
use crate::rng::{stream, METRICS_SLOT};

/// Per-iteration measurements of one run.
///
/// Squared distances throughout. `within[t]` and `cross[t]` are maxima over
/// the agents of team `t`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsRecord {
    pub iter: usize,
    pub centroid: [Vec<f64>; 2],
    /// `max_k ‖w_k^(t) − w_c^(t)‖²`.
    pub within: [f64; 2],
    /// `max_{k ∈ t} ‖ŵ_k^(t') − w_c^(t')‖²`.
    pub cross: [f64; 2],
    /// `‖(w_c^(1), w_c^(2)) − (w1*, w2*)‖²` when the game has a closed-form equilibrium.
    pub nash_error: Option<f64>,
    /// `max_k ‖∇J_k(w_k; ŵ_k)‖` for games with exact gradients.
    pub grad_norm_max: Option<[f64; 2]>,
    /// `‖d_c‖²`: centroid step against the team-averaged stochastic gradient
    /// at the centroids, with the step's own noise.
    pub perturbation: Option<[f64; 2]>,
    /// `max_k ‖d_k‖²`: the same residual taken per agent at the agent's own iterates.
    pub perturbation_agent: Option<[f64; 2]>,
    /// `‖w_c^(t) − w_central^(t)‖²` against the coupled-noise centralized run.
    pub baseline_gap: Option<[f64; 2]>,
    pub losses: Option<LossReport>,
}

/// Previous state and step size, needed for the perturbation residuals.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationInput<'a> {
    pub prev: &'a NetworkState,
    pub mu: f64,
}

/// Team centroids `w_c^(t) = (1/K_t) Σ_k w_k^(t)`, summed in agent order.
pub fn centroids(state: &NetworkState) -> [Vec<f64>; 2] {
    let sizes = state.sizes();
    let dims = state.dims();
    let mut out = [vec![0.0; dims[0]], vec![0.0; dims[1]]];
    for t in Team::BOTH {
        let c = &mut out[t.index()];
        for k in 0..sizes[t.index()] {
            c.iter_mut().zip(state.own(t, k)).for_each(|(a, v)| *a += v);
        }
        let n = sizes[t.index()] as f64;
        c.iter_mut().for_each(|a| *a /= n);
    }
    out
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Mean over runs of one scalar metric, per record index (runs in order).
pub fn mc_mean<F>(runs: &[crate::engine::RunTrace], f: F) -> Vec<f64>
where
    F: Fn(&MetricsRecord) -> f64,
{
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let mut acc = vec![0.0; first.records.len()];
    for run in runs {
        for (a, r) in acc.iter_mut().zip(&run.records) {
            *a += f(r);
        }
    }
    let n = runs.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// Computes the record for `state`; perturbation terms need the previous state.
pub fn record_metrics(
    state: &NetworkState,
    pert: Option<PerturbationInput<'_>>,
    game: &dyn GameOracle,
    plan: &StepPlan,
    nash: Option<&NashPoint>,
    baseline: Option<&[Vec<f64>; 2]>,
    key: StreamKey,
) -> Result<MetricsRecord> {
    let sizes = state.sizes();
    let centroid = centroids(state);
    let mut rec = MetricsRecord {
        iter: state.iter,
        ..Default::default()
    };
    for t in Team::BOTH {
        let ti = t.index();
        rec.within[ti] = (0..sizes[ti])
            .map(|k| sq_dist(state.own(t, k), &centroid[ti]))
            .fold(0.0, f64::max);
        rec.cross[ti] = (0..sizes[ti])
            .map(|k| sq_dist(state.est(t, k), &centroid[t.other().index()]))
            .fold(0.0, f64::max);
    }
    rec.nash_error = nash.map(|n| sq_dist(&centroid[0], &n.w1_star) + sq_dist(&centroid[1], &n.w2_star));
    rec.baseline_gap = baseline.map(|b| [sq_dist(&centroid[0], &b[0]), sq_dist(&centroid[1], &b[1])]);

    if game.has_exact_gradients() {
        let mut g = [0.0f64; 2];
        for t in Team::BOTH {
            let mut buf = vec![0.0; state.dims()[t.index()]];
            for k in 0..sizes[t.index()] {
                game.local_grad(t, k, state.own(t, k), state.est(t, k), &mut buf)?;
                g[t.index()] = g[t.index()].max(norm(&buf));
            }
        }
        rec.grad_norm_max = Some(g);
    }

    if let Some(PerturbationInput { prev, mu }) = pert {
        let prev_c = centroids(prev);
        let iter = state.iter;
        let mut centroid_d = [0.0; 2];
        let mut agent_d = [0.0f64; 2];
        for t in Team::BOTH {
            let (ti, oi) = (t.index(), t.other().index());
            let mut avg = vec![0.0; state.dims()[ti]];
            // μ d_c = w_c,i − w_c,i−1 + μ ḡ(w_c,i−1^(t); w_c,i−1^(t'))
            team_gradient_at(plan, game, t, &prev_c[ti], &prev_c[oi], key, iter, &mut avg)?;
            centroid_d[ti] = residual_sq(&centroid[ti], &prev_c[ti], &avg, mu);
            for k in 0..sizes[ti] {
                team_gradient_at(plan, game, t, prev.own(t, k), prev.est(t, k), key, iter, &mut avg)?;
                let d = residual_sq(state.own(t, k), prev.own(t, k), &avg, mu);
                agent_d[ti] = agent_d[ti].max(d);
            }
        }
        rec.perturbation = Some(centroid_d);
        rec.perturbation_agent = Some(agent_d);
    }

    let mut rng = stream(key.master_seed, key.run, METRICS_SLOT, state.iter as u64);
    rec.losses = game.losses(&centroid[0], &centroid[1], &mut rng);
    rec.centroid = centroid;
    Ok(rec)
}

// ‖(now − before)/μ + g‖²
fn residual_sq(now: &[f64], before: &[f64], g: &[f64], mu: f64) -> f64 {
    now.iter()
        .zip(before)
        .zip(g)
        .map(|((a, b), g)| {
            let d = (a - b) / mu + g;
            d * d
        })
        .sum()
}
