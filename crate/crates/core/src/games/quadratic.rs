use nalgebra::{DVector, LU};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_args, GameConstants, GameOracle};
use crate::error::{Error, Result};
use crate::graph::Team;
use crate::linalg::{spectral_radius, Matrix};
use crate::rng::StreamRng;

/// Residual tolerance for the first-order conditions at the equilibrium.
pub const NASH_TOL: f64 = 1e-9;

/// Quadratic zero-sum game with per-agent shifts.
///
/// ```text
/// J(w1; w2)  = ½ w1ᵀP w1 + w1ᵀC w2 − ½ w2ᵀQ w2 + bᵀw1 + cᵀw2
/// J_k^(1)    =  J + β_kᵀ w1
/// J_k^(2)    = −J + γ_kᵀ w2
/// ```
///
/// The shifts sum to zero within each team, so the team averages are exactly
/// `J` and `−J`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticZeroSumGame {
    p: Matrix,
    q: Matrix,
    c: Matrix,
    b_vec: Vec<f64>,
    c_vec: Vec<f64>,
    beta: Vec<Vec<f64>>,
    gamma: Vec<Vec<f64>>,
    sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashPoint {
    pub w1_star: Vec<f64>,
    pub w2_star: Vec<f64>,
}

impl QuadraticZeroSumGame {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: Matrix,
        q: Matrix,
        c: Matrix,
        b: Vec<f64>,
        c_lin: Vec<f64>,
        beta: Vec<Vec<f64>>,
        gamma: Vec<Vec<f64>>,
        sigma: f64,
    ) -> Result<Self> {
        let (m1, m2) = (p.nrows(), q.nrows());
        if !p.is_square() || !q.is_square() {
            return Err(Error::invalid("P and Q must be square"));
        }
        if c.shape() != (m1, m2) || b.len() != m1 || c_lin.len() != m2 {
            return Err(Error::invalid(format!(
                "inconsistent shapes: P {m1}x{m1}, Q {m2}x{m2}, C {:?}, b {}, c {}",
                c.shape(),
                b.len(),
                c_lin.len()
            )));
        }
        for (name, m) in [("P", &p), ("Q", &q)] {
            if (m - m.transpose()).amax() > 1e-12 {
                return Err(Error::invalid(format!("{name} must be symmetric")));
            }
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("noise sigma must be finite and >= 0, got {sigma}")));
        }
        if beta.is_empty() || gamma.is_empty() {
            return Err(Error::invalid("each team needs at least one agent"));
        }
        for (name, shifts, m) in [("beta", &beta, m1), ("gamma", &gamma, m2)] {
            if shifts.iter().any(|s| s.len() != m) {
                return Err(Error::invalid(format!("{name} shifts must have dimension {m}")));
            }
            for j in 0..m {
                let total: f64 = shifts.iter().map(|s| s[j]).sum();
                let scale: f64 = shifts.iter().map(|s| s[j].abs()).sum::<f64>().max(1.0);
                if total.abs() > 1e-12 * scale {
                    return Err(Error::invalid(format!("{name} shifts must sum to zero")));
                }
            }
        }
        Ok(QuadraticZeroSumGame {
            p,
            q,
            c,
            b_vec: b,
            c_vec: c_lin,
            beta,
            gamma,
            sigma,
        })
    }

    /// Game with Gaussian shifts of standard deviation `shift_scale`, recentred
    /// to sum to zero.
    #[allow(clippy::too_many_arguments)]
    pub fn with_random_shifts(
        p: Matrix,
        q: Matrix,
        c: Matrix,
        b: Vec<f64>,
        c_lin: Vec<f64>,
        sizes: [usize; 2],
        shift_scale: f64,
        shift_seed: u64,
        sigma: f64,
    ) -> Result<Self> {
        let mut rng = StreamRng::seed_from_u64(shift_seed);
        let mut draw = |n: usize, m: usize| -> Vec<Vec<f64>> {
            let mut s: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..m)
                        .map(|_| shift_scale * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                        .collect()
                })
                .collect();
            for j in 0..m {
                let mean = s.iter().map(|v| v[j]).sum::<f64>() / n as f64;
                for v in &mut s {
                    v[j] -= mean;
                }
            }
            s
        };
        let beta = draw(sizes[0], p.nrows());
        let gamma = draw(sizes[1], q.nrows());
        Self::new(p, q, c, b, c_lin, beta, gamma, sigma)
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn coupling(&self) -> &Matrix {
        &self.c
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn shift(&self, t: Team, k: usize) -> &[f64] {
        match t {
            Team::One => &self.beta[k],
            Team::Two => &self.gamma[k],
        }
    }

    /// Same game with different noise level.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        QuadraticZeroSumGame { sigma, ..self.clone() }
    }

    /// Shared objective `J(w1; w2)`.
    pub fn objective(&self, w1: &[f64], w2: &[f64]) -> f64 {
        let x = DVector::from_column_slice(w1);
        let y = DVector::from_column_slice(w2);
        0.5 * x.dot(&(&self.p * &x)) + x.dot(&(&self.c * &y)) - 0.5 * y.dot(&(&self.q * &y))
            + dot(&self.b_vec, w1)
            + dot(&self.c_vec, w2)
    }

    /// Local cost `J_k^(t)(w1; w2)`.
    pub fn local_cost(&self, t: Team, k: usize, w1: &[f64], w2: &[f64]) -> f64 {
        match t {
            Team::One => self.objective(w1, w2) + dot(&self.beta[k], w1),
            Team::Two => -self.objective(w1, w2) + dot(&self.gamma[k], w2),
        }
    }

    /// Jacobian of the joint gradient field, `[[P, C], [−Cᵀ, Q]]`.
    pub fn jacobian(&self) -> Matrix {
        let (m1, m2) = (self.p.nrows(), self.q.nrows());
        let mut j = Matrix::zeros(m1 + m2, m1 + m2);
        j.view_mut((0, 0), (m1, m1)).copy_from(&self.p);
        j.view_mut((0, m1), (m1, m2)).copy_from(&self.c);
        j.view_mut((m1, 0), (m2, m1)).copy_from(&(-self.c.transpose()));
        j.view_mut((m1, m1), (m2, m2)).copy_from(&self.q);
        j
    }

    /// Spectral radius of `I − μ·Jac`, the contraction factor of the
    /// noiseless centralized recursion.
    pub fn centralized_contraction(&self, mu: f64) -> Result<f64> {
        let j = self.jacobian();
        let n = j.nrows();
        spectral_radius(&(Matrix::identity(n, n) - j * mu))
    }

    fn grad_into(&self, t: Team, k: usize, own: &[f64], other: &[f64], out: &mut [f64]) {
        match t {
            Team::One => {
                // P w1 + C w2 + b + β_k
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = self.b_vec[i] + self.beta[k][i];
                    for (j, &x) in own.iter().enumerate() {
                        acc += self.p[(i, j)] * x;
                    }
                    for (j, &y) in other.iter().enumerate() {
                        acc += self.c[(i, j)] * y;
                    }
                    *o = acc;
                }
            }
            Team::Two => {
                // Q w2 − Cᵀ w1 − c + γ_k
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = self.gamma[k][i] - self.c_vec[i];
                    for (j, &y) in own.iter().enumerate() {
                        acc += self.q[(i, j)] * y;
                    }
                    for (j, &x) in other.iter().enumerate() {
                        acc -= self.c[(j, i)] * x;
                    }
                    *o = acc;
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl GameOracle for QuadraticZeroSumGame {
    fn dim(&self, t: Team) -> usize {
        match t {
            Team::One => self.p.nrows(),
            Team::Two => self.q.nrows(),
        }
    }

    fn team_size(&self, t: Team) -> usize {
        match t {
            Team::One => self.beta.len(),
            Team::Two => self.gamma.len(),
        }
    }

    fn local_grad(&self, t: Team, k: usize, own: &[f64], other: &[f64], out: &mut [f64]) -> Result<()> {
        check_args(self, t, k, own, other, out)?;
        self.grad_into(t, k, own, other, out);
        Ok(())
    }

    fn stoch_grad(
        &self,
        t: Team,
        k: usize,
        own: &[f64],
        other: &[f64],
        rng: &mut StreamRng,
        out: &mut [f64],
    ) -> Result<()> {
        check_args(self, t, k, own, other, out)?;
        self.grad_into(t, k, own, other, out);
        if self.sigma > 0.0 {
            let scale = self.sigma / (out.len() as f64).sqrt();
            for o in out.iter_mut() {
                let z: f64 = StandardNormal.sample(rng);
                *o += scale * z;
            }
        }
        Ok(())
    }

    fn constants(&self) -> GameConstants {
        // Lipschitz in each argument: max of ‖P‖, ‖Q‖, ‖C‖ (spectral norms).
        let norm = |m: &Matrix| m.clone().svd(false, false).singular_values.max();
        let delta = norm(&self.p).max(norm(&self.q)).max(norm(&self.c));
        GameConstants {
            delta: Some(delta),
            grad_bound: None,
            noise_var: Some(self.sigma * self.sigma),
        }
    }

    fn nash(&self) -> Option<NashPoint> {
        nash_solve(self).ok()
    }
}

/// Unique stationary point of the two coupled minimisations.
///
/// Solves `[[P, C], [−Cᵀ, Q]] [w1; w2] = [−b; c]`.
pub fn nash_solve(g: &QuadraticZeroSumGame) -> Result<NashPoint> {
    let (m1, m2) = (g.p.nrows(), g.q.nrows());
    let jac = g.jacobian();
    let mut rhs = DVector::zeros(m1 + m2);
    for i in 0..m1 {
        rhs[i] = -g.b_vec[i];
    }
    for i in 0..m2 {
        rhs[m1 + i] = g.c_vec[i];
    }
    let scale = jac.amax().max(1e-300);
    let lu = LU::new(jac.clone());
    let sol = lu
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::DegenerateGame("equilibrium system is singular".into()))?;
    let residual = (&jac * &sol - &rhs).amax();
    let cond_guard = NASH_TOL * scale.max(1.0) * (1.0 + sol.amax());
    if residual > cond_guard {
        return Err(Error::DegenerateGame(format!(
            "equilibrium system is ill-conditioned (residual {residual:e})"
        )));
    }
    Ok(NashPoint {
        w1_star: sol.rows(0, m1).iter().copied().collect(),
        w2_star: sol.rows(m1, m2).iter().copied().collect(),
    })
}
