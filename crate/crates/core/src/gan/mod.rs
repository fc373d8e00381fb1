//! Toy generative-adversarial game on synthetic Gaussian-mixture data.
//!
//! Team 1 holds generator parameters `w1`, team 2 discriminator parameters
//! `w2`. Both teams minimise:
//!
//! ```text
//! J_disc = −[ E log d(h_k) + E log(1 − d(g(z))) ]      (team 2, agent k)
//! J_gen  = −J_disc                                     (team 1)
//! ```
//!
//! with `d` clamped to `[eps_log, 1 − eps_log]` before every logarithm.

mod mlp;

pub use mlp::{disc_forward, gen_forward, MlpParams, MlpShape};

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::games::{check_args, GameConstants, GameOracle, LossReport};
use crate::graph::Team;
use crate::linalg::Matrix;
use crate::rng::{stream_seed, StreamRng};
use mlp::{backward, forward, logistic, Trace};

/// Finite mixture of Gaussians used as the real-data distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    means: Vec<Vec<f64>>,
    covs: Vec<Matrix>,
    weights: Vec<f64>,
    chol: Vec<Matrix>,
}

impl GaussianMixture {
    pub fn new(means: Vec<Vec<f64>>, covs: Vec<Matrix>, weights: Vec<f64>) -> Result<Self> {
        if means.is_empty() || means.len() != covs.len() || means.len() != weights.len() {
            return Err(Error::invalid("mixture needs matching means, covs and weights"));
        }
        let dim = means[0].len();
        if dim == 0 || means.iter().any(|m| m.len() != dim) {
            return Err(Error::invalid("mixture means must share a positive dimension"));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("mixture weights must be nonnegative and sum to 1"));
        }
        let mut chol = Vec::with_capacity(covs.len());
        for (j, c) in covs.iter().enumerate() {
            if c.shape() != (dim, dim) {
                return Err(Error::invalid(format!("mixture covariance {j} must be {dim}x{dim}")));
            }
            let l = c
                .clone()
                .cholesky()
                .ok_or_else(|| Error::invalid(format!("mixture covariance {j} is not positive definite")))?;
            chol.push(l.l());
        }
        Ok(GaussianMixture { means, covs, weights, chol })
    }

    /// Isotropic single Gaussian.
    pub fn isotropic(mean: Vec<f64>, var: f64) -> Result<Self> {
        let d = mean.len();
        Self::new(vec![mean], vec![Matrix::identity(d, d) * var], vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn covs(&self) -> &[Matrix] {
        &self.covs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mixture mean `Σ w_j m_j`.
    pub fn mean(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (m, w) in self.means.iter().zip(&self.weights) {
            for (o, v) in out.iter_mut().zip(m) {
                *o += w * v;
            }
        }
        out
    }

    /// Appends one draw, shifted by `offset`, to `out`.
    pub fn sample_into(&self, rng: &mut StreamRng, offset: &[f64], out: &mut Vec<f64>) {
        let u: f64 = rng.gen();
        let mut j = 0;
        let mut acc = self.weights[0];
        while u >= acc && j + 1 < self.weights.len() {
            j += 1;
            acc += self.weights[j];
        }
        let d = self.dim();
        let eps: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for r in 0..d {
            let mut v = self.means[j][r] + offset[r];
            for c in 0..=r {
                v += self.chol[j][(r, c)] * eps[c];
            }
            out.push(v);
        }
    }
}

/// Architecture and data settings of the toy GAN.
#[derive(Debug, Clone, PartialEq)]
pub struct GanSpec {
    pub noise_dim: usize,
    pub data_dim: usize,
    pub hidden_gen: usize,
    pub hidden_disc: usize,
    pub batch_size: usize,
    pub eps_log: f64,
    pub target: GaussianMixture,
    /// Standard deviation of the per-discriminator mean jitter.
    pub jitter_scale: f64,
    pub jitter_seed: u64,
    /// Batch size of the fixed batch that defines the deterministic gradient.
    pub reference_batch: usize,
    /// Batch size used for loss reporting.
    pub eval_batch: usize,
}

impl Default for GanSpec {
    fn default() -> Self {
        let target = GaussianMixture::new(
            vec![vec![-0.5, 1.0], vec![1.5, 2.0]],
            vec![Matrix::identity(2, 2) * 0.1, Matrix::identity(2, 2) * 0.1],
            vec![0.5, 0.5],
        )
        .expect("default mixture is valid");
        GanSpec {
            noise_dim: 2,
            data_dim: 2,
            hidden_gen: 16,
            hidden_disc: 16,
            batch_size: 32,
            eps_log: 1e-6,
            target,
            jitter_scale: 0.1,
            jitter_seed: 0,
            reference_batch: 1024,
            eval_batch: 256,
        }
    }
}

/// Noise and real samples of one mini-batch, row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GanBatch {
    pub z: Vec<f64>,
    pub real: Vec<f64>,
}

/// The toy GAN as a two-team game.
#[derive(Debug, Clone)]
pub struct GanGame {
    spec: GanSpec,
    gen: MlpShape,
    disc: MlpShape,
    sizes: [usize; 2],
    jitter: Vec<Vec<f64>>,
}

impl GanGame {
    pub fn new(spec: GanSpec, sizes: [usize; 2]) -> Result<Self> {
        if spec.noise_dim == 0 || spec.data_dim == 0 || spec.batch_size == 0 {
            return Err(Error::invalid("GAN dimensions and batch size must be positive"));
        }
        if spec.target.dim() != spec.data_dim {
            return Err(Error::invalid(format!(
                "target dimension {} differs from data_dim {}",
                spec.target.dim(),
                spec.data_dim
            )));
        }
        if !(spec.eps_log > 0.0 && spec.eps_log <= 0.5) {
            return Err(Error::invalid("eps_log must lie in (0, 0.5]"));
        }
        if sizes.contains(&0) {
            return Err(Error::invalid("each team needs at least one agent"));
        }
        let mut rng = StreamRng::seed_from_u64(spec.jitter_seed);
        let mut jitter: Vec<Vec<f64>> = (0..sizes[1])
            .map(|_| {
                (0..spec.data_dim)
                    .map(|_| spec.jitter_scale * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                    .collect()
            })
            .collect();
        for j in 0..spec.data_dim {
            let mean = jitter.iter().map(|v| v[j]).sum::<f64>() / sizes[1] as f64;
            jitter.iter_mut().for_each(|v| v[j] -= mean);
        }
        Ok(GanGame {
            gen: MlpShape::new(spec.noise_dim, spec.hidden_gen, spec.data_dim),
            disc: MlpShape::new(spec.data_dim, spec.hidden_disc, 1),
            spec,
            sizes,
            jitter,
        })
    }

    pub fn spec(&self) -> &GanSpec {
        &self.spec
    }

    pub fn gen_shape(&self) -> MlpShape {
        self.gen
    }

    pub fn disc_shape(&self) -> MlpShape {
        self.disc
    }

    /// Mean offset of discriminator agent `k`'s real data.
    pub fn jitter(&self, k: usize) -> &[f64] {
        &self.jitter[k]
    }

    /// Draws `n` noise rows and, when `real_offset` is given, `n` real rows.
    pub fn sample_batch(&self, rng: &mut StreamRng, n: usize, real_offset: Option<&[f64]>) -> GanBatch {
        let z = (0..n * self.spec.noise_dim)
            .map(|_| StandardNormal.sample(rng))
            .collect();
        let mut real = Vec::new();
        if let Some(offset) = real_offset {
            real.reserve(n * self.spec.data_dim);
            for _ in 0..n {
                self.spec.target.sample_into(rng, offset, &mut real);
            }
        }
        GanBatch { z, real }
    }

    fn clamped(&self, d: f64) -> bool {
        d <= self.spec.eps_log || d >= 1.0 - self.spec.eps_log
    }

    fn clamp_log(&self, d: f64) -> f64 {
        d.clamp(self.spec.eps_log, 1.0 - self.spec.eps_log).ln()
    }

    /// `(mean log d(real), mean log(1 − d(g(z))))` on a batch.
    pub fn loss_terms(&self, w1: &[f64], w2: &[f64], batch: &GanBatch) -> Result<(f64, f64, f64, f64)> {
        let fake = gen_forward(self.gen, w1, &batch.z)?;
        let d_fake = disc_forward(self.disc, w2, &fake, self.spec.eps_log)?;
        let d_real = disc_forward(self.disc, w2, &batch.real, self.spec.eps_log)?;
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        let log_real = mean(&d_real.iter().map(|&d| self.clamp_log(d)).collect::<Vec<_>>());
        let log_fake = mean(&d_fake.iter().map(|&d| self.clamp_log(1.0 - d)).collect::<Vec<_>>());
        Ok((log_real, log_fake, mean(&d_real), mean(&d_fake)))
    }

    /// Discriminator mini-batch loss `−[mean log d(h) + mean log(1 − d(g(z)))]`.
    pub fn disc_loss(&self, w1: &[f64], w2: &[f64], batch: &GanBatch) -> Result<f64> {
        let (lr, lf, _, _) = self.loss_terms(w1, w2, batch)?;
        Ok(-(lr + lf))
    }

    /// Generator mini-batch loss, the negation of [`GanGame::disc_loss`].
    pub fn gen_loss(&self, w1: &[f64], w2: &[f64], batch: &GanBatch) -> Result<f64> {
        let (lr, lf, _, _) = self.loss_terms(w1, w2, batch)?;
        Ok(lr + lf)
    }

    /// Gradient of [`GanGame::gen_loss`] with respect to `w1` on `batch.z`.
    pub fn gen_grad(&self, w1: &[f64], w2: &[f64], z: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_params(w1, w2)?;
        out.iter_mut().for_each(|g| *g = 0.0);
        let n = z.len() / self.spec.noise_dim;
        if n == 0 || z.len() % self.spec.noise_dim != 0 {
            return Err(Error::invalid("noise batch has the wrong width"));
        }
        let (mut tg, mut td) = (Trace::default(), Trace::default());
        let mut dx = vec![0.0; self.spec.data_dim];
        for row in z.chunks_exact(self.spec.noise_dim) {
            forward(self.gen, w1, row, &mut tg);
            forward(self.disc, w2, &tg.output, &mut td);
            let d = logistic(td.output[0]);
            if self.clamped(d) {
                continue;
            }
            // d/ds log(1 − σ(s)) = −σ(s)
            let ds = [-d / n as f64];
            backward(self.disc, w2, &td, &ds, None, Some(&mut dx));
            backward(self.gen, w1, &tg, &dx, Some(out), None);
        }
        Ok(())
    }

    /// Gradient of [`GanGame::disc_loss`] with respect to `w2`.
    pub fn disc_grad(&self, w1: &[f64], w2: &[f64], batch: &GanBatch, out: &mut [f64]) -> Result<()> {
        self.check_params(w1, w2)?;
        out.iter_mut().for_each(|g| *g = 0.0);
        let (nz, nr) = (batch.z.len() / self.spec.noise_dim, batch.real.len() / self.spec.data_dim);
        if nz == 0 || nr == 0 {
            return Err(Error::invalid("discriminator gradient needs noise and real samples"));
        }
        let (mut tg, mut td) = (Trace::default(), Trace::default());
        for row in batch.real.chunks_exact(self.spec.data_dim) {
            forward(self.disc, w2, row, &mut td);
            let d = logistic(td.output[0]);
            if !self.clamped(d) {
                // d/ds −log σ(s) = −(1 − σ(s))
                backward(self.disc, w2, &td, &[-(1.0 - d) / nr as f64], Some(out), None);
            }
        }
        for row in batch.z.chunks_exact(self.spec.noise_dim) {
            forward(self.gen, w1, row, &mut tg);
            forward(self.disc, w2, &tg.output, &mut td);
            let d = logistic(td.output[0]);
            if !self.clamped(d) {
                // d/ds −log(1 − σ(s)) = σ(s)
                backward(self.disc, w2, &td, &[d / nz as f64], Some(out), None);
            }
        }
        Ok(())
    }

    /// Mean of `n` generator samples `g(w1; z)`.
    pub fn sample_mean(&self, w1: &[f64], n: usize, rng: &mut StreamRng) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::invalid("sample mean needs at least one sample"));
        }
        let batch = self.sample_batch(rng, n, None);
        let x = gen_forward(self.gen, w1, &batch.z)?;
        let mut mean = vec![0.0; self.spec.data_dim];
        for row in x.chunks_exact(self.spec.data_dim) {
            mean.iter_mut().zip(row).for_each(|(m, v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        Ok(mean)
    }

    fn check_params(&self, w1: &[f64], w2: &[f64]) -> Result<()> {
        if w1.len() != self.gen.len() || w2.len() != self.disc.len() {
            return Err(Error::invalid(format!(
                "GAN parameters have lengths ({}, {}), expected ({}, {})",
                w1.len(),
                w2.len(),
                self.gen.len(),
                self.disc.len()
            )));
        }
        Ok(())
    }

    fn grad_on_batch(&self, t: Team, k: usize, own: &[f64], other: &[f64], rng: &mut StreamRng, n: usize, out: &mut [f64]) -> Result<()> {
        match t {
            Team::One => {
                let batch = self.sample_batch(rng, n, None);
                self.gen_grad(own, other, &batch.z, out)
            }
            Team::Two => {
                let batch = self.sample_batch(rng, n, Some(&self.jitter[k]));
                self.disc_grad(other, own, &batch, out)
            }
        }
    }
}

impl GameOracle for GanGame {
    fn dim(&self, t: Team) -> usize {
        match t {
            Team::One => self.gen.len(),
            Team::Two => self.disc.len(),
        }
    }

    fn team_size(&self, t: Team) -> usize {
        self.sizes[t.index()]
    }

    /// Gradient on a fixed per-agent reference batch of `reference_batch` samples.
    fn local_grad(&self, t: Team, k: usize, own: &[f64], other: &[f64], out: &mut [f64]) -> Result<()> {
        check_args(self, t, k, own, other, out)?;
        let mut rng = StreamRng::seed_from_u64(stream_seed(self.spec.jitter_seed, t.index() as u64, k as u64, u64::MAX));
        self.grad_on_batch(t, k, own, other, &mut rng, self.spec.reference_batch, out)
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
        self.grad_on_batch(t, k, own, other, rng, self.spec.batch_size, out)
    }

    fn constants(&self) -> GameConstants {
        GameConstants::default()
    }

    fn has_exact_gradients(&self) -> bool {
        false
    }

    fn losses(&self, w1: &[f64], w2: &[f64], rng: &mut StreamRng) -> Option<LossReport> {
        let offset = vec![0.0; self.spec.data_dim];
        let batch = self.sample_batch(rng, self.spec.eval_batch, Some(&offset));
        let (lr, lf, d_real, d_fake) = self.loss_terms(w1, w2, &batch).ok()?;
        Some(LossReport {
            team1: lr + lf,
            team2: -(lr + lf),
            d_real,
            d_fake,
        })
    }
}
