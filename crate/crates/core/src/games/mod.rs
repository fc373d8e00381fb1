//! Two-argument stochastic objectives, one per agent.
//!
//! Agent `k` of team `t` minimises `J_k^(t)(w1; w2)` over its own team's
//! variable. All gradient calls use the convention `(own, other)`: for team 1
//! `own = w1, other = w2`, for team 2 `own = w2, other = w1`.

mod constants;
mod quadratic;

pub use constants::{estimate_constants, ConstantEstimate};
pub use quadratic::{nash_solve, NashPoint, QuadraticZeroSumGame};

use crate::error::Result;
use crate::graph::Team;
use crate::rng::StreamRng;

/// Constants reported by a game; `None` means not verified analytically.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GameConstants {
    pub delta: Option<f64>,
    pub grad_bound: Option<f64>,
    pub noise_var: Option<f64>,
}

/// Per-agent gradient access for a two-team game.
pub trait GameOracle: Send + Sync {
    /// Dimension of team `t`'s decision variable.
    fn dim(&self, t: Team) -> usize;

    /// Number of agents in team `t`.
    fn team_size(&self, t: Team) -> usize;

    /// Deterministic gradient of `J_k^(t)` with respect to `own`.
    fn local_grad(&self, t: Team, k: usize, own: &[f64], other: &[f64], out: &mut [f64]) -> Result<()>;

    /// Stochastic gradient: [`GameOracle::local_grad`] plus zero-mean noise drawn from `rng`.
    fn stoch_grad(
        &self,
        t: Team,
        k: usize,
        own: &[f64],
        other: &[f64],
        rng: &mut StreamRng,
        out: &mut [f64],
    ) -> Result<()>;

    fn constants(&self) -> GameConstants;

    /// Whether [`GameOracle::local_grad`] is cheap and exact (used for
    /// trajectory gradient bounds).
    fn has_exact_gradients(&self) -> bool {
        true
    }

    /// Closed-form equilibrium, when the game has one.
    fn nash(&self) -> Option<NashPoint> {
        None
    }

    /// Mini-batch losses at a joint point, for games that report them.
    fn losses(&self, _w1: &[f64], _w2: &[f64], _rng: &mut StreamRng) -> Option<LossReport> {
        None
    }
}

/// Loss values of both teams evaluated on one shared batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub team1: f64,
    pub team2: f64,
    /// Mean discriminator output on real and generated samples (GAN only).
    pub d_real: f64,
    pub d_fake: f64,
}

pub(crate) fn check_args(
    game: &dyn GameOracle,
    t: Team,
    k: usize,
    own: &[f64],
    other: &[f64],
    out: &[f64],
) -> Result<()> {
    use crate::error::Error;
    if k >= game.team_size(t) {
        return Err(Error::invalid(format!(
            "agent {k} is not in team {} of size {}",
            t.id(),
            game.team_size(t)
        )));
    }
    let (m_own, m_other) = (game.dim(t), game.dim(t.other()));
    if own.len() != m_own || out.len() != m_own || other.len() != m_other {
        return Err(Error::invalid(format!(
            "dimension mismatch for team {}: own {} (want {m_own}), other {} (want {m_other}), out {}",
            t.id(),
            own.len(),
            other.len(),
            out.len()
        )));
    }
    Ok(())
}
