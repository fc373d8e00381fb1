//! Centroids, disagreement metrics, analytical bounds and step-size studies.

mod bounds;
mod metrics;
mod plateau;
mod sweep;

pub use bounds::{bound_report, lemma1_bound, BoundReport, TeamBoundReport, BOUND_CHECK_MODE};
pub use metrics::{centroids, mc_mean, record_metrics, MetricsRecord, PerturbationInput};
pub use plateau::{plateau_and_burn_in, Plateau};
pub use sweep::{mu_scaling_study, MuPoint, MuScaling, ScalingRatios, DEGENERATE_PLATEAU};

/// Plateau detection settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauSettings {
    /// Window length as a fraction of the recorded series.
    pub window_frac: f64,
    pub rel_tol: f64,
}

impl Default for PlateauSettings {
    fn default() -> Self {
        PlateauSettings {
            window_frac: 0.1,
            rel_tol: 0.15,
        }
    }
}

impl PlateauSettings {
    pub fn window(&self, len: usize) -> usize {
        ((len as f64 * self.window_frac).floor() as usize).max(1)
    }
}
