use serde::Serialize;

use super::bounds::{bound_report, BoundReport};
use super::PlateauSettings;
use crate::engine::{run, RunConfig, RunOutput};
use crate::error::{Error, Result};
use crate::games::GameOracle;
use crate::graph::NetworkTopology;

/// Plateaus at or below this level are treated as exact consensus and their
/// ratios are not formed.
pub const DEGENERATE_PLATEAU: f64 = 1e-24;

/// Results at one step size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuPoint {
    pub mu: f64,
    pub report: BoundReport,
}

/// `plateau(2μ) / plateau(μ)` per adjacent pair and team; `None` = degenerate.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ScalingRatios {
    pub within: Vec<[Option<f64>; 2]>,
    pub cross: Vec<[Option<f64>; 2]>,
    pub perturbation: Vec<[Option<f64>; 2]>,
    pub perturbation_agent: Vec<[Option<f64>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuScaling {
    /// Step sizes, largest first.
    pub mus: Vec<f64>,
    pub points: Vec<MuPoint>,
    pub ratios: ScalingRatios,
}

fn ratio(big: Option<f64>, small: Option<f64>) -> Option<f64> {
    match (big, small) {
        (Some(a), Some(b)) if a > DEGENERATE_PLATEAU && b > DEGENERATE_PLATEAU => Some(a / b),
        _ => None,
    }
}

/// Runs the same experiment at each step size (sorted descending; adjacent
/// values must differ by a factor of two) and forms plateau ratios.
///
/// `on_run` sees every completed run, e.g. to write artifacts.
pub fn mu_scaling_study(
    topo: &NetworkTopology,
    game: &dyn GameOracle,
    base: &RunConfig,
    mus: &[f64],
    sigma2: Option<f64>,
    settings: PlateauSettings,
    mut on_run: impl FnMut(f64, &RunOutput) -> Result<()>,
) -> Result<MuScaling> {
    if mus.len() < 2 {
        return Err(Error::invalid("a step-size study needs at least two step sizes"));
    }
    let mut mus = mus.to_vec();
    mus.sort_by(|a, b| b.total_cmp(a));
    for w in mus.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "adjacent step sizes must differ by a factor of 2, got {} and {}",
                w[0], w[1]
            )));
        }
    }
    let mut points = Vec::with_capacity(mus.len());
    for &mu in &mus {
        let cfg = RunConfig { mu, ..base.clone() };
        let out = run(topo, game, &cfg)?;
        on_run(mu, &out)?;
        let report = bound_report(&out, topo, sigma2, mu, settings)?;
        points.push(MuPoint { mu, report });
    }
    let mut ratios = ScalingRatios::default();
    for w in points.windows(2) {
        let pair = |f: &dyn Fn(&MuPoint, usize) -> Option<f64>| -> [Option<f64>; 2] {
            [0, 1].map(|t| ratio(f(&w[0], t), f(&w[1], t)))
        };
        ratios.within.push(pair(&|p, t| Some(p.report.per_team[t].plateau_within)));
        ratios.cross.push(pair(&|p, t| Some(p.report.per_team[t].plateau_cross)));
        ratios
            .perturbation
            .push(pair(&|p, t| p.report.per_team[t].plateau_perturbation));
        ratios
            .perturbation_agent
            .push(pair(&|p, t| p.report.per_team[t].plateau_perturbation_agent));
    }
    Ok(MuScaling { mus, points, ratios })
}
