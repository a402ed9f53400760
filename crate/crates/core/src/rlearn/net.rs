//! ReLU input layer, single GRU layer and linear Q head, with exact
//! backpropagation through time.
//!
//! Parameters live in one flat vector in this order (matrices row-major,
//! one row per output unit):
//!
//! `W_in (dense x input)`, `b_in`,
//! `W_z (hidden x dense)`, `U_z (hidden x hidden)`, `b_z`,
//! `W_r`, `U_r`, `b_r`,
//! `W_n`, `U_n`, `b_n`,
//! `W_out (16 x hidden)`, `b_out`.
//!
//! The recurrence is
//! `z = sigmoid(W_z e + U_z h + b_z)`, `r = sigmoid(W_r e + U_r h + b_r)`,
//! `n = tanh(W_n e + U_n (r * h) + b_n)`, `h' = (1 - z) * n + z * h`,
//! with `e = relu(W_in x + b_in)` and `q = W_out h' + b_out`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::N_ACTIONS;

pub type QRow = [f64; N_ACTIONS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetShape {
    pub input: usize,
    pub dense: usize,
    pub hidden: usize,
}

impl NetShape {
    pub fn new(input: usize) -> Self {
        Self {
            input,
            dense: 64,
            hidden: 64,
        }
    }

    pub fn n_params(&self) -> usize {
        self.layout().end
    }

    pub(crate) fn layout(&self) -> Layout {
        let (i, d, h, o) = (self.input, self.dense, self.hidden, N_ACTIONS);
        let mut at = 0;
        let mut take = |n: usize| {
            let r = at..at + n;
            at += n;
            r
        };
        let w_in = take(d * i);
        let b_in = take(d);
        let mut gate = || Gate {
            w: take(h * d),
            u: take(h * h),
            b: take(h),
        };
        let z = gate();
        let r = gate();
        let n = gate();
        let w_out = take(o * h);
        let b_out = take(o);
        Layout {
            w_in,
            b_in,
            z,
            r,
            n,
            w_out,
            b_out,
            end: at,
        }
    }
}

type Span = std::ops::Range<usize>;

#[derive(Debug, Clone)]
pub(crate) struct Gate {
    pub w: Span,
    pub u: Span,
    pub b: Span,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub w_in: Span,
    pub b_in: Span,
    pub z: Gate,
    pub r: Gate,
    pub n: Gate,
    pub w_out: Span,
    pub b_out: Span,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QNet {
    pub shape: NetShape,
    pub params: Vec<f64>,
}

/// Activations recorded by [`QNet::forward`].
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    pub q: Vec<QRow>,
    /// Hidden state after each step.
    pub hidden: Vec<Vec<f64>>,
    pre_in: Vec<Vec<f64>>,
    embed: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
    n: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4 * 4;
    for k in (0..chunks).step_by(4) {
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `out += M v` for row-major `M` with `out.len()` rows.
fn matvec_add(m: &[f64], v: &[f64], out: &mut [f64]) {
    let cols = v.len();
    for (o, row) in out.iter_mut().zip(m.chunks_exact(cols)) {
        *o += dot(row, v);
    }
}

/// `out += M^T g`.
fn matvec_t_add(m: &[f64], g: &[f64], out: &mut [f64]) {
    let cols = out.len();
    for (gi, row) in g.iter().zip(m.chunks_exact(cols)) {
        if *gi != 0.0 {
            for (o, w) in out.iter_mut().zip(row) {
                *o += gi * w;
            }
        }
    }
}

/// `G += g v^T`.
fn outer_add(grad: &mut [f64], g: &[f64], v: &[f64]) {
    let cols = v.len();
    for (gi, row) in g.iter().zip(grad.chunks_exact_mut(cols)) {
        if *gi != 0.0 {
            for (o, x) in row.iter_mut().zip(v) {
                *o += gi * x;
            }
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl QNet {
    pub fn zeros(shape: NetShape) -> Self {
        Self {
            shape,
            params: vec![0.0; shape.n_params()],
        }
    }

    /// Every parameter uniform in `±1/sqrt(fan_in)` of its layer.
    pub fn init(shape: NetShape, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = shape.layout();
        let mut params = vec![0.0; shape.n_params()];
        let mut fill = |span: &Span, fan_in: usize, rng: &mut ChaCha8Rng| {
            let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
            for p in &mut params[span.clone()] {
                *p = rng.gen_range(-bound..bound);
            }
        };
        fill(&l.w_in, shape.input, &mut rng);
        fill(&l.b_in, shape.input, &mut rng);
        for g in [&l.z, &l.r, &l.n] {
            fill(&g.w, shape.dense, &mut rng);
            fill(&g.u, shape.hidden, &mut rng);
            fill(&g.b, shape.hidden, &mut rng);
        }
        fill(&l.w_out, shape.hidden, &mut rng);
        fill(&l.b_out, shape.hidden, &mut rng);
        Self { shape, params }
    }

    pub fn from_params(shape: NetShape, params: Vec<f64>) -> Result<Self> {
        if params.len() != shape.n_params() {
            return Err(Error::Dimension {
                expected: shape.n_params(),
                got: params.len(),
            });
        }
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(Error::Checkpoint(format!("parameter {i} is not finite")));
        }
        Ok(Self { shape, params })
    }

    pub fn l1_norm(&self) -> f64 {
        self.params.iter().map(|p| p.abs()).sum()
    }

    /// Q-values for a state sequence, starting from a zero hidden state.
    pub fn forward(&self, states: &[Vec<f64>]) -> Result<ForwardPass> {
        let s = self.shape;
        let l = s.layout();
        let p = &self.params;
        let t_len = states.len();
        let mut out = ForwardPass {
            q: Vec::with_capacity(t_len),
            hidden: Vec::with_capacity(t_len),
            pre_in: Vec::with_capacity(t_len),
            embed: Vec::with_capacity(t_len),
            z: Vec::with_capacity(t_len),
            r: Vec::with_capacity(t_len),
            n: Vec::with_capacity(t_len),
        };
        let mut h = vec![0.0; s.hidden];
        for x in states {
            if x.len() != s.input {
                return Err(Error::Dimension {
                    expected: s.input,
                    got: x.len(),
                });
            }
            let mut a = p[l.b_in.clone()].to_vec();
            matvec_add(&p[l.w_in.clone()], x, &mut a);
            let e: Vec<f64> = a.iter().map(|v| v.max(0.0)).collect();

            let gate = |g: &Gate, hv: &[f64]| {
                let mut v = p[g.b.clone()].to_vec();
                matvec_add(&p[g.w.clone()], &e, &mut v);
                matvec_add(&p[g.u.clone()], hv, &mut v);
                v
            };
            let z: Vec<f64> = gate(&l.z, &h).into_iter().map(sigmoid).collect();
            let r: Vec<f64> = gate(&l.r, &h).into_iter().map(sigmoid).collect();
            let rh: Vec<f64> = r.iter().zip(&h).map(|(a, b)| a * b).collect();
            let n: Vec<f64> = gate(&l.n, &rh).into_iter().map(f64::tanh).collect();
            let h_new: Vec<f64> = (0..s.hidden).map(|k| (1.0 - z[k]) * n[k] + z[k] * h[k]).collect();

            let mut q = [0.0; N_ACTIONS];
            q.copy_from_slice(&p[l.b_out.clone()]);
            matvec_add(&p[l.w_out.clone()], &h_new, &mut q);

            out.q.push(q);
            out.pre_in.push(a);
            out.embed.push(e);
            out.z.push(z);
            out.r.push(r);
            out.n.push(n);
            out.hidden.push(h_new.clone());
            h = h_new;
        }
        Ok(out)
    }

    /// Gradient of a loss with respect to every parameter, given the loss
    /// gradient with respect to each step's Q row. Regularization terms are
    /// not included.
    pub fn backward(&self, states: &[Vec<f64>], pass: &ForwardPass, dq: &[QRow]) -> Vec<f64> {
        let s = self.shape;
        let l = s.layout();
        let p = &self.params;
        let mut grad = vec![0.0; p.len()];
        let zeros = vec![0.0; s.hidden];
        let mut dh_carry = vec![0.0; s.hidden];
        for t in (0..states.len()).rev() {
            let h_prev = if t == 0 { &zeros } else { &pass.hidden[t - 1] };
            let (z, r, n, e) = (&pass.z[t], &pass.r[t], &pass.n[t], &pass.embed[t]);

            outer_add(&mut grad[l.w_out.clone()], &dq[t], &pass.hidden[t]);
            for (g, d) in grad[l.b_out.clone()].iter_mut().zip(&dq[t]) {
                *g += d;
            }
            let mut dh = dh_carry.clone();
            matvec_t_add(&p[l.w_out.clone()], &dq[t], &mut dh);

            let mut dh_prev: Vec<f64> = (0..s.hidden).map(|k| dh[k] * z[k]).collect();
            let d_pre_n: Vec<f64> = (0..s.hidden).map(|k| dh[k] * (1.0 - z[k]) * (1.0 - n[k] * n[k])).collect();
            let d_pre_z: Vec<f64> = (0..s.hidden)
                .map(|k| dh[k] * (h_prev[k] - n[k]) * z[k] * (1.0 - z[k]))
                .collect();

            let rh: Vec<f64> = r.iter().zip(h_prev).map(|(a, b)| a * b).collect();
            let mut d_rh = vec![0.0; s.hidden];
            matvec_t_add(&p[l.n.u.clone()], &d_pre_n, &mut d_rh);
            let d_pre_r: Vec<f64> = (0..s.hidden).map(|k| d_rh[k] * h_prev[k] * r[k] * (1.0 - r[k])).collect();
            for k in 0..s.hidden {
                dh_prev[k] += d_rh[k] * r[k];
            }

            let mut de = vec![0.0; s.dense];
            for (gate, d_pre, hv) in [(&l.n, &d_pre_n, &rh), (&l.z, &d_pre_z, h_prev), (&l.r, &d_pre_r, h_prev)] {
                outer_add(&mut grad[gate.w.clone()], d_pre, e);
                outer_add(&mut grad[gate.u.clone()], d_pre, hv);
                for (g, d) in grad[gate.b.clone()].iter_mut().zip(d_pre.iter()) {
                    *g += d;
                }
                matvec_t_add(&p[gate.w.clone()], d_pre, &mut de);
            }
            matvec_t_add(&p[l.z.u.clone()], &d_pre_z, &mut dh_prev);
            matvec_t_add(&p[l.r.u.clone()], &d_pre_r, &mut dh_prev);

            let da: Vec<f64> = de
                .iter()
                .zip(&pass.pre_in[t])
                .map(|(d, a)| if *a > 0.0 { *d } else { 0.0 })
                .collect();
            outer_add(&mut grad[l.w_in.clone()], &da, &states[t]);
            for (g, d) in grad[l.b_in.clone()].iter_mut().zip(&da) {
                *g += d;
            }
            dh_carry = dh_prev;
        }
        grad
    }

    /// Sign pattern of the input-layer pre-activations over a sequence.
    pub(crate) fn relu_pattern(&self, states: &[Vec<f64>]) -> Result<Vec<bool>> {
        Ok(self.forward(states)?.pre_in.iter().flatten().map(|a| *a > 0.0).collect())
    }
}
