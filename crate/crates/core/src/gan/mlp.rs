//! One-hidden-layer perceptrons over flattened parameter vectors.
//!
//! Layout: `W1 (hidden x input, row-major) | b1 | W2 (output x hidden) | b2`.
//! A zero hidden width gives an affine map `W x + b` with layout `W | b`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpShape {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
}

impl MlpShape {
    pub fn new(input: usize, hidden: usize, output: usize) -> Self {
        MlpShape { input, hidden, output }
    }

    pub fn is_affine(&self) -> bool {
        self.hidden == 0
    }

    /// Flattened parameter count.
    pub fn len(&self) -> usize {
        if self.is_affine() {
            self.output * self.input + self.output
        } else {
            self.hidden * self.input + self.hidden + self.output * self.hidden + self.output
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weight/bias shapes per layer, `(rows, cols)` then bias length.
    pub fn layers(&self) -> Vec<((usize, usize), usize)> {
        if self.is_affine() {
            vec![((self.output, self.input), self.output)]
        } else {
            vec![
                ((self.hidden, self.input), self.hidden),
                ((self.output, self.hidden), self.output),
            ]
        }
    }
}

/// Layer-wise view of a flattened parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub shape: MlpShape,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpParams {
    pub fn unpack(shape: MlpShape, flat: &[f64]) -> Result<Self> {
        if flat.len() != shape.len() {
            return Err(Error::invalid(format!(
                "parameter vector has length {}, architecture needs {}",
                flat.len(),
                shape.len()
            )));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        let mut at = 0;
        for ((r, c), b) in shape.layers() {
            weights.push(flat[at..at + r * c].to_vec());
            at += r * c;
            biases.push(flat[at..at + b].to_vec());
            at += b;
        }
        Ok(MlpParams { shape, weights, biases })
    }

    pub fn pack(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.shape.len());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

/// Activations of one forward pass, kept for the backward pass.
#[derive(Debug, Clone, Default)]
pub(crate) struct Trace {
    input: Vec<f64>,
    hidden: Vec<f64>,
    pub(crate) output: Vec<f64>,
}

pub(crate) fn forward(shape: MlpShape, p: &[f64], x: &[f64], trace: &mut Trace) {
    trace.input.clear();
    trace.input.extend_from_slice(x);
    trace.output.clear();
    trace.output.resize(shape.output, 0.0);
    if shape.is_affine() {
        let (w, b) = p.split_at(shape.output * shape.input);
        for o in 0..shape.output {
            let row = &w[o * shape.input..(o + 1) * shape.input];
            trace.output[o] = b[o] + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        }
        return;
    }
    let (h, i) = (shape.hidden, shape.input);
    let w1 = &p[..h * i];
    let b1 = &p[h * i..h * i + h];
    let w2 = &p[h * i + h..h * i + h + shape.output * h];
    let b2 = &p[h * i + h + shape.output * h..];
    trace.hidden.clear();
    for j in 0..h {
        let row = &w1[j * i..(j + 1) * i];
        let pre = b1[j] + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        trace.hidden.push(pre.tanh());
    }
    for o in 0..shape.output {
        let row = &w2[o * h..(o + 1) * h];
        trace.output[o] = b2[o] + row.iter().zip(&trace.hidden).map(|(a, v)| a * v).sum::<f64>();
    }
}

/// Accumulates `∂L/∂params` into `grad` given `∂L/∂output`; optionally
/// writes `∂L/∂input`.
pub(crate) fn backward(
    shape: MlpShape,
    p: &[f64],
    trace: &Trace,
    d_out: &[f64],
    grad: Option<&mut [f64]>,
    d_input: Option<&mut [f64]>,
) {
    let i = shape.input;
    if shape.is_affine() {
        let w = &p[..shape.output * i];
        if let Some(g) = grad {
            for o in 0..shape.output {
                for c in 0..i {
                    g[o * i + c] += d_out[o] * trace.input[c];
                }
                g[shape.output * i + o] += d_out[o];
            }
        }
        if let Some(dx) = d_input {
            for (c, v) in dx.iter_mut().enumerate() {
                *v = (0..shape.output).map(|o| w[o * i + c] * d_out[o]).sum();
            }
        }
        return;
    }
    let h = shape.hidden;
    let w1 = &p[..h * i];
    let w2 = &p[h * i + h..h * i + h + shape.output * h];
    // back through the output layer, then tanh
    let mut d_pre = vec![0.0; h];
    for (j, d) in d_pre.iter_mut().enumerate() {
        let back: f64 = (0..shape.output).map(|o| w2[o * h + j] * d_out[o]).sum();
        let a = trace.hidden[j];
        *d = back * (1.0 - a * a);
    }
    if let Some(g) = grad {
        let (g1, rest) = g.split_at_mut(h * i);
        let (gb1, rest) = rest.split_at_mut(h);
        let (g2, gb2) = rest.split_at_mut(shape.output * h);
        for j in 0..h {
            for c in 0..i {
                g1[j * i + c] += d_pre[j] * trace.input[c];
            }
            gb1[j] += d_pre[j];
        }
        for o in 0..shape.output {
            for j in 0..h {
                g2[o * h + j] += d_out[o] * trace.hidden[j];
            }
            gb2[o] += d_out[o];
        }
    }
    if let Some(dx) = d_input {
        for (c, v) in dx.iter_mut().enumerate() {
            *v = (0..h).map(|j| w1[j * i + c] * d_pre[j]).sum();
        }
    }
}

pub(crate) fn logistic(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

fn check_batch(width: usize, x: &[f64]) -> Result<usize> {
    if width == 0 || x.len() % width != 0 {
        return Err(Error::invalid(format!(
            "batch of {} values is not a multiple of width {width}",
            x.len()
        )));
    }
    Ok(x.len() / width)
}

/// Generator forward pass over a row-major batch of noise vectors.
pub fn gen_forward(shape: MlpShape, params: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    if params.len() != shape.len() {
        return Err(Error::invalid("generator parameter length mismatch"));
    }
    let n = check_batch(shape.input, z)?;
    let mut trace = Trace::default();
    let mut out = Vec::with_capacity(n * shape.output);
    for row in z.chunks_exact(shape.input) {
        forward(shape, params, row, &mut trace);
        out.extend_from_slice(&trace.output);
    }
    Ok(out)
}

/// Discriminator forward pass; one probability per row, clamped to
/// `[eps_log, 1 - eps_log]`.
pub fn disc_forward(shape: MlpShape, params: &[f64], x: &[f64], eps_log: f64) -> Result<Vec<f64>> {
    if params.len() != shape.len() || shape.output != 1 {
        return Err(Error::invalid("discriminator parameter length mismatch"));
    }
    check_batch(shape.input, x)?;
    let mut trace = Trace::default();
    Ok(x.chunks_exact(shape.input)
        .map(|row| {
            forward(shape, params, row, &mut trace);
            logistic(trace.output[0]).clamp(eps_log, 1.0 - eps_log)
        })
        .collect())
}
