use super::NetworkState;
use crate::error::{Error, Result};
use crate::games::GameOracle;
use crate::graph::{NetworkTopology, Team};
use crate::rng::stream;

/// Sparse, ascending-order view of the four combination matrices.
#[derive(Debug, Clone)]
pub struct StepPlan {
    sizes: [usize; 2],
    /// `combine[t][k]`: `(ℓ local, a_ℓk)` over team `t`.
    combine: [Vec<Vec<(usize, f64)>>; 2],
    /// `cross[t][k]`: `(ℓ global, a_ℓk^(t't))` over all agents.
    cross: [Vec<Vec<(usize, f64)>>; 2],
}

impl StepPlan {
    pub fn new(topo: &NetworkTopology) -> Self {
        let sizes = [topo.team_size(Team::One), topo.team_size(Team::Two)];
        let column = |m: &crate::linalg::Matrix, k: usize| -> Vec<(usize, f64)> {
            (0..m.nrows())
                .filter(|&l| m[(l, k)] != 0.0)
                .map(|l| (l, m[(l, k)]))
                .collect()
        };
        let mut combine: [Vec<Vec<(usize, f64)>>; 2] = Default::default();
        let mut cross: [Vec<Vec<(usize, f64)>>; 2] = Default::default();
        for t in Team::BOTH {
            let a = topo.combination(t).entries();
            let c = topo.cross(t).entries();
            combine[t.index()] = (0..sizes[t.index()]).map(|k| column(a, k)).collect();
            cross[t.index()] = (0..sizes[t.index()]).map(|k| column(c, k)).collect();
        }
        StepPlan { sizes, combine, cross }
    }

    pub fn sizes(&self) -> [usize; 2] {
        self.sizes
    }

    fn locate(&self, agent: usize) -> (Team, usize) {
        if agent < self.sizes[0] {
            (Team::One, agent)
        } else {
            (Team::Two, agent - self.sizes[0])
        }
    }

    fn global(&self, t: Team, k: usize) -> usize {
        match t {
            Team::One => k,
            Team::Two => self.sizes[0] + k,
        }
    }
}

/// Identifies the random streams of one Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    pub master_seed: u64,
    pub run: u64,
}

fn check_dims(state: &NetworkState, plan: &StepPlan, game: &dyn GameOracle) -> Result<()> {
    let dims = [game.dim(Team::One), game.dim(Team::Two)];
    let sizes = [game.team_size(Team::One), game.team_size(Team::Two)];
    if state.dims() != dims || state.sizes() != plan.sizes() || sizes != plan.sizes() {
        return Err(Error::invalid(format!(
            "state {:?}/{:?}, topology {:?} and game {:?}/{:?} disagree",
            state.sizes(),
            state.dims(),
            plan.sizes(),
            sizes,
            dims
        )));
    }
    Ok(())
}

/// One synchronous iteration of competing diffusion, agents in index order.
///
/// Agent `k` of team `t` draws its gradient noise from stream
/// `(master_seed, run, k_global, i)` where `i = state.iter + 1`.
pub fn diffusion_step(
    state: &NetworkState,
    plan: &StepPlan,
    game: &dyn GameOracle,
    mu: f64,
    master_seed: u64,
    run: u64,
) -> Result<NetworkState> {
    let total = plan.sizes[0] + plan.sizes[1];
    let order: Vec<usize> = (0..total).collect();
    diffusion_step_ordered(state, plan, game, mu, master_seed, run, &order)
}

/// [`diffusion_step`] with an explicit agent processing order.
///
/// Every read comes from `state` (iteration `i − 1`) and every sum runs in
/// ascending agent index, so the order never changes the result.
pub fn diffusion_step_ordered(
    state: &NetworkState,
    plan: &StepPlan,
    game: &dyn GameOracle,
    mu: f64,
    master_seed: u64,
    run: u64,
    order: &[usize],
) -> Result<NetworkState> {
    check_dims(state, plan, game)?;
    let total = plan.sizes[0] + plan.sizes[1];
    let mut seen = vec![false; total];
    for &a in order {
        if a >= total || std::mem::replace(&mut seen[a], true) {
            return Err(Error::invalid("processing order must be a permutation of all agents"));
        }
    }
    if order.len() != total {
        return Err(Error::invalid("processing order must cover every agent"));
    }
    let iter = state.iter + 1;
    let dims = state.dims();

    // adapt: φ_k = w_k − μ ĝ_k(w_k; ŵ_k)
    let mut phi: [Vec<f64>; 2] = [
        vec![0.0; plan.sizes[0] * dims[0]],
        vec![0.0; plan.sizes[1] * dims[1]],
    ];
    let mut grad = Vec::new();
    for &agent in order {
        let (t, k) = plan.locate(agent);
        let m = dims[t.index()];
        grad.resize(m, 0.0);
        let mut rng = stream(master_seed, run, agent as u64, iter as u64);
        game.stoch_grad(t, k, state.own(t, k), state.est(t, k), &mut rng, &mut grad)?;
        let out = &mut phi[t.index()][k * m..(k + 1) * m];
        for ((o, w), g) in out.iter_mut().zip(state.own(t, k)).zip(&grad) {
            *o = w - mu * g;
        }
    }

    let mut next = NetworkState::zeros(plan.sizes, dims);
    next.iter = iter;
    for &agent in order {
        let (t, k) = plan.locate(agent);
        let m = dims[t.index()];
        // combine within the team
        let out = next.own_mut(t, k);
        for &(l, a) in &plan.combine[t.index()][k] {
            let src = &phi[t.index()][l * m..(l + 1) * m];
            for (o, v) in out.iter_mut().zip(src) {
                *o += a * v;
            }
        }
        // cross-team consensus on pre-update estimates
        let out = next.est_mut(t, k);
        for &(l, a) in &plan.cross[t.index()][k] {
            let (lt, lk) = plan.locate(l);
            let src = if lt == t { state.est(lt, lk) } else { state.own(lt, lk) };
            for (o, v) in out.iter_mut().zip(src) {
                *o += a * v;
            }
        }
    }
    Ok(next)
}

/// One step of the centralized recursion for both teams simultaneously:
/// `w^(t) ← w^(t) − (μ/K_t) Σ_k ĝ_k(w1; w2)`.
///
/// Agent `k`'s noise comes from the same stream as in [`diffusion_step`], so
/// the two recursions share noise realisations.
pub fn centralized_step(
    w1: &[f64],
    w2: &[f64],
    game: &dyn GameOracle,
    mu: f64,
    master_seed: u64,
    run: u64,
    iter: usize,
    sizes: [usize; 2],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if w1.len() != game.dim(Team::One) || w2.len() != game.dim(Team::Two) {
        return Err(Error::invalid("centralized iterate dimensions disagree with the game"));
    }
    let mut next = [w1.to_vec(), w2.to_vec()];
    for t in Team::BOTH {
        let (own, other) = match t {
            Team::One => (w1, w2),
            Team::Two => (w2, w1),
        };
        let kt = sizes[t.index()];
        let mut sum = vec![0.0; own.len()];
        let mut grad = vec![0.0; own.len()];
        for k in 0..kt {
            let agent = match t {
                Team::One => k,
                Team::Two => sizes[0] + k,
            };
            let mut rng = stream(master_seed, run, agent as u64, iter as u64);
            game.stoch_grad(t, k, own, other, &mut rng, &mut grad)?;
            sum.iter_mut().zip(&grad).for_each(|(s, g)| *s += g);
        }
        let scale = mu / kt as f64;
        next[t.index()].iter_mut().zip(&sum).for_each(|(w, s)| *w -= scale * s);
    }
    let [n1, n2] = next;
    Ok((n1, n2))
}

/// Team-averaged stochastic gradient of team `t` at `(own, other)`, replaying
/// the noise every agent of `t` used at iteration `iter`.
pub(crate) fn replay_team_gradient(
    plan: &StepPlan,
    game: &dyn GameOracle,
    t: Team,
    own: &[f64],
    other: &[f64],
    key: StreamKey,
    iter: usize,
    out: &mut [f64],
) -> Result<()> {
    let kt = plan.sizes[t.index()];
    let mut grad = vec![0.0; own.len()];
    out.iter_mut().for_each(|o| *o = 0.0);
    for k in 0..kt {
        let mut rng = stream(key.master_seed, key.run, plan.global(t, k) as u64, iter as u64);
        game.stoch_grad(t, k, own, other, &mut rng, &mut grad)?;
        out.iter_mut().zip(&grad).for_each(|(o, g)| *o += g);
    }
    out.iter_mut().for_each(|o| *o /= kt as f64);
    Ok(())
}
