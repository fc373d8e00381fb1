use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::GameOracle;
use crate::graph::Team;
use crate::rng::StreamRng;

/// Empirical Lipschitz constant and gradient bound over a ball.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstantEstimate {
    pub delta_hat: f64,
    pub g_hat: f64,
}

fn uniform_in_ball(rng: &mut StreamRng, dim: usize, radius: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x *= r / norm);
    }
    v
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Samples point pairs in the ball of radius `region_radius` (jointly over
/// both variables) and reports the largest gradient-difference ratio, varying
/// one argument at a time, and the largest gradient norm. Games without an
/// exact gradient contribute nothing.
pub fn estimate_constants(
    game: &dyn GameOracle,
    region_radius: f64,
    samples: usize,
    rng: &mut StreamRng,
) -> ConstantEstimate {
    let mut est = ConstantEstimate::default();
    if !(region_radius > 0.0) || samples < 2 {
        return est;
    }
    let (m1, m2) = (game.dim(Team::One), game.dim(Team::Two));
    for _ in 0..samples {
        let p = uniform_in_ball(rng, m1 + m2, region_radius);
        let q = uniform_in_ball(rng, m1 + m2, region_radius);
        let (w1, w2) = p.split_at(m1);
        let (v1, v2) = q.split_at(m1);
        for t in Team::BOTH {
            let (own, other, own_alt, other_alt) = match t {
                Team::One => (w1, w2, v1, v2),
                Team::Two => (w2, w1, v2, v1),
            };
            let m = own.len();
            let mut g0 = vec![0.0; m];
            let mut g1 = vec![0.0; m];
            let mut g2 = vec![0.0; m];
            for k in 0..game.team_size(t) {
                if game.local_grad(t, k, own, other, &mut g0).is_err() {
                    continue;
                }
                est.g_hat = est.g_hat.max(g0.iter().map(|x| x * x).sum::<f64>().sqrt());
                let _ = game.local_grad(t, k, own_alt, other, &mut g1);
                let _ = game.local_grad(t, k, own, other_alt, &mut g2);
                let d_own = dist(own, own_alt);
                let d_other = dist(other, other_alt);
                if d_own > 0.0 {
                    est.delta_hat = est.delta_hat.max(dist(&g0, &g1) / d_own);
                }
                if d_other > 0.0 {
                    est.delta_hat = est.delta_hat.max(dist(&g0, &g2) / d_other);
                }
            }
        }
    }
    est
}
