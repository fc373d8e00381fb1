//! Synchronous execution of competing diffusion and the centralized baseline.

mod run;
mod step;

pub use run::{run, RunOutput, RunTrace};
pub use step::{centralized_step, diffusion_step, diffusion_step_ordered, StepPlan, StreamKey};
pub(crate) use run::team_gradient_at;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{NetworkTopology, Team};
use crate::rng::{mix64, stream, INIT_SLOT};

/// One agent's view: its copy of its team's model and its estimate of the
/// other team's model.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState<'a> {
    pub own: &'a [f64],
    pub other_est: &'a [f64],
}

/// States of all agents at one iteration.
///
/// Storage is flat per team: `own[t]` holds `K_t` rows of width `M_t`,
/// `est[t]` holds `K_t` rows of width `M_{t'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub iter: usize,
    sizes: [usize; 2],
    dims: [usize; 2],
    own: [Vec<f64>; 2],
    est: [Vec<f64>; 2],
}

impl NetworkState {
    pub fn zeros(sizes: [usize; 2], dims: [usize; 2]) -> Self {
        NetworkState {
            iter: 0,
            sizes,
            dims,
            own: [vec![0.0; sizes[0] * dims[0]], vec![0.0; sizes[1] * dims[1]]],
            est: [vec![0.0; sizes[0] * dims[1]], vec![0.0; sizes[1] * dims[0]]],
        }
    }

    /// Every agent of team `t` starts from `w1` or `w2`, every estimate from the other.
    pub fn uniform(sizes: [usize; 2], w1: &[f64], w2: &[f64]) -> Self {
        let mut s = Self::zeros(sizes, [w1.len(), w2.len()]);
        for k in 0..sizes[0] {
            s.own_mut(Team::One, k).copy_from_slice(w1);
            s.est_mut(Team::One, k).copy_from_slice(w2);
        }
        for k in 0..sizes[1] {
            s.own_mut(Team::Two, k).copy_from_slice(w2);
            s.est_mut(Team::Two, k).copy_from_slice(w1);
        }
        s
    }

    pub fn sizes(&self) -> [usize; 2] {
        self.sizes
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn agent(&self, t: Team, k: usize) -> AgentState<'_> {
        AgentState {
            own: self.own(t, k),
            other_est: self.est(t, k),
        }
    }

    pub fn own(&self, t: Team, k: usize) -> &[f64] {
        let m = self.dims[t.index()];
        &self.own[t.index()][k * m..(k + 1) * m]
    }

    pub fn est(&self, t: Team, k: usize) -> &[f64] {
        let m = self.dims[t.other().index()];
        &self.est[t.index()][k * m..(k + 1) * m]
    }

    pub fn own_mut(&mut self, t: Team, k: usize) -> &mut [f64] {
        let m = self.dims[t.index()];
        &mut self.own[t.index()][k * m..(k + 1) * m]
    }

    pub fn est_mut(&mut self, t: Team, k: usize) -> &mut [f64] {
        let m = self.dims[t.other().index()];
        &mut self.est[t.index()][k * m..(k + 1) * m]
    }

    /// First non-finite coordinate, as a description.
    pub fn find_non_finite(&self) -> Option<String> {
        for t in Team::BOTH {
            if let Some(p) = self.own[t.index()].iter().position(|v| !v.is_finite()) {
                return Some(format!("team {} model, agent {}", t.id(), p / self.dims[t.index()]));
            }
            if let Some(p) = self.est[t.index()].iter().position(|v| !v.is_finite()) {
                return Some(format!(
                    "team {} estimate, agent {}",
                    t.id(),
                    p / self.dims[t.other().index()]
                ));
            }
        }
        None
    }
}

/// Initial-state rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Zeros,
    /// Independent `N(0, scale²)` coordinates per agent.
    Gaussian { scale: f64, seed: u64 },
}

/// Settings of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mu: f64,
    pub horizon: usize,
    /// Initial models.
    pub init: Init,
    /// Initial cross-team estimates.
    pub estimate_init: Init,
    pub mc_runs: usize,
    pub master_seed: u64,
    /// Co-run the centralized recursion with coupled noise and measure the
    /// perturbation against it.
    pub baseline_enabled: bool,
    pub record_every: usize,
    /// Run Monte-Carlo repetitions on the rayon pool.
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mu: 0.005,
            horizon: 20_000,
            init: Init::Zeros,
            estimate_init: Init::Zeros,
            mc_runs: 100,
            master_seed: 0,
            baseline_enabled: true,
            record_every: 1,
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(format!("step size must be positive, got {}", self.mu)));
        }
        if self.mc_runs == 0 {
            return Err(Error::invalid("mc_runs must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be at least 1"));
        }
        for init in [self.init, self.estimate_init] {
            if let Init::Gaussian { scale, .. } = init {
                if !(scale >= 0.0 && scale.is_finite()) {
                    return Err(Error::invalid("gaussian init scale must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Initial state of Monte-Carlo run `run`.
///
/// Gaussian draws use stream `(master_seed ^ mix(seed), run, slot, agent)`.
pub fn initial_state(topo: &NetworkTopology, dims: [usize; 2], cfg: &RunConfig, run: u64) -> NetworkState {
    let sizes = [topo.team_size(Team::One), topo.team_size(Team::Two)];
    let mut s = NetworkState::zeros(sizes, dims);
    for t in Team::BOTH {
        for k in 0..sizes[t.index()] {
            let agent = topo.global(t, k) as u64;
            if let Init::Gaussian { scale, seed } = cfg.init {
                let mut rng = stream(cfg.master_seed ^ mix64(seed), run, INIT_SLOT, agent);
                for v in s.own_mut(t, k) {
                    *v = scale * Distribution::<f64>::sample(&StandardNormal, &mut rng);
                }
            }
            if let Init::Gaussian { scale, seed } = cfg.estimate_init {
                let mut rng = stream(cfg.master_seed ^ mix64(seed), run, INIT_SLOT - 1, agent);
                for v in s.est_mut(t, k) {
                    *v = scale * Distribution::<f64>::sample(&StandardNormal, &mut rng);
                }
            }
        }
    }
    s
}
