//! Quadrature on ℝ and ℝᵈ with deterministic parallel reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-length of the t-interval of the sinh-sinh rule.
const DE_T_MAX: f64 = 3.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Midpoint rule on [−radius, radius]; with `tail`, plus x = radius/u
    /// substitutions covering the two half-lines beyond.
    Uniform,
    /// Double-exponential sinh-sinh rule x = (radius/8)·sinh(π/2·sinh t).
    TanhSinh,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radius: f64,
    pub nodes: usize,
    pub scheme: Scheme,
    pub tail: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { radius: 8.0, nodes: 64, scheme: Scheme::TanhSinh, tail: true }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::InvalidArgument(format!("need at least 16 nodes, got {}", self.nodes)));
        }
        if !(self.radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    /// The 1-D rule on ℝ described by this spec.
    pub fn rule(&self) -> Result<Rule1D> {
        self.validate()?;
        Ok(match self.scheme {
            Scheme::TanhSinh => Rule1D::sinh_sinh(self.nodes, self.radius / 8.0),
            Scheme::Uniform => {
                let mut r = Rule1D::midpoint(-self.radius, self.radius, self.nodes);
                if self.tail {
                    let m = (self.nodes / 4).max(8);
                    let du = 1.0 / m as f64;
                    for k in 0..m {
                        let u = (k as f64 + 0.5) * du;
                        let x = self.radius / u;
                        let w = self.radius / (u * u) * du;
                        r.nodes.push(x);
                        r.weights.push(w);
                        r.nodes.push(-x);
                        r.weights.push(w);
                    }
                }
                r
            }
        })
    }
}

/// Nodes and weights of a 1-D rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn midpoint(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        Self { nodes: (0..n).map(|k| a + (k as f64 + 0.5) * h).collect(), weights: vec![h; n] }
    }

    /// Trapezoid weights on sorted nodes.
    pub fn trapezoid(nodes: Vec<f64>) -> Self {
        let n = nodes.len();
        let mut weights = vec![0.0; n];
        for k in 0..n.saturating_sub(1) {
            let h = 0.5 * (nodes[k + 1] - nodes[k]);
            weights[k] += h;
            weights[k + 1] += h;
        }
        Self { nodes, weights }
    }

    /// x = scale·sinh(π/2·sinh t) on a uniform t-grid over [−3.2, 3.2].
    pub fn sinh_sinh(n: usize, scale: f64) -> Self {
        let h = 2.0 * DE_T_MAX / (n - 1) as f64;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let t = -DE_T_MAX + k as f64 * h;
            let s = half_pi * t.sinh();
            nodes.push(scale * s.sinh());
            weights.push(scale * h * half_pi * t.cosh() * s.cosh());
        }
        Self { nodes, weights }
    }

    /// x = scale·tan θ on a midpoint θ-grid over (−π/2, π/2).
    pub fn tan(n: usize, scale: f64) -> Self {
        let h = std::f64::consts::PI / n as f64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let th = -std::f64::consts::FRAC_PI_2 + (k as f64 + 0.5) * h;
            let c = th.cos();
            nodes.push(scale * th.tan());
            weights.push(scale * h / (c * c));
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

/// Pairwise summation; the result depends only on the order of `v`.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Tensor-product integral over ℝᵈ, parallel over the flattened index with a
/// worker-count independent reduction.
pub fn tensor_integrate<F>(rules: &[Rule1D], f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = rules.len();
    if d == 0 {
        return f(&[]);
    }
    let total: usize = rules.iter().map(|r| r.len()).product();
    let inner: usize = rules[1..].iter().map(|r| r.len()).product();
    let rows: Vec<f64> = (0..rules[0].len())
        .into_par_iter()
        .map(|i0| {
            let mut x = vec![0.0; d];
            x[0] = rules[0].nodes[i0];
            let mut terms = Vec::with_capacity(inner);
            for flat in 0..inner {
                let mut rem = flat;
                let mut w = rules[0].weights[i0];
                for k in (1..d).rev() {
                    let n = rules[k].len();
                    let j = rem % n;
                    rem /= n;
                    x[k] = rules[k].nodes[j];
                    w *= rules[k].weights[j];
                }
                terms.push(w * f(&x));
            }
            pairwise_sum(&terms)
        })
        .collect();
    debug_assert_eq!(rows.len() * inner, total);
    pairwise_sum(&rows)
}

/// Seeded importance-sampling estimate of ∫_{ℝᵈ} f with a product Cauchy
/// proposal of the given scale. Returns (estimate, standard error).
pub fn monte_carlo_cauchy<F>(dim: usize, samples: usize, scale: f64, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut x = vec![0.0; dim];
            let mut vals = Vec::with_capacity(n);
            for _ in 0..n {
                let mut q = 1.0;
                for xi in x.iter_mut() {
                    let u: f64 = rng.random_range(0.0..1.0);
                    let th = std::f64::consts::PI * (u - 0.5);
                    *xi = scale * th.tan();
                    q *= 1.0 / (std::f64::consts::PI * scale * (1.0 + th.tan() * th.tan()));
                }
                vals.push(f(&x) / q);
            }
            let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
            (pairwise_sum(&vals), pairwise_sum(&sq))
        })
        .collect();
    let s: Vec<f64> = parts.iter().map(|p| p.0).collect();
    let s2: Vec<f64> = parts.iter().map(|p| p.1).collect();
    let n = samples as f64;
    let mean = pairwise_sum(&s) / n;
    let var = (pairwise_sum(&s2) / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}
