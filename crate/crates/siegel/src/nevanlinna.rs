//! Positive harmonic functions on ℂ₊ and their Nevanlinna data (slope, atoms,
//! density), with closed-form Poisson and Schwarz integrals and numerical
//! extraction by vertical limits.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::C64;

/// Slopes are extrapolated from u(iy)/y at y = 2⁶, …, 2¹⁰.
pub const SLOPE_HEIGHTS: [f64; 5] = [64.0, 128.0, 256.0, 512.0, 1024.0];

/// A node is atomic when y·u at the refined location exceeds this multiple of
/// the grid median of y·u.
pub const ATOM_MEDIAN_FACTOR: f64 = 10.0;

/// Minimal ratio (y/2)·u(·+iy/2) / (y·u(·+iy)) for an atom; a density gives ½.
pub const ATOM_STABILITY: f64 = 0.75;

/// Measure a·Im w + (1/π)∫ Im w/|w−t|² dμ(t) on ℂ₊ with μ = Σ atoms + ρ(t)dt,
/// ρ piecewise linear on `nodes` and constant (`tails`) beyond the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NevanlinnaData1D {
    pub slope_a: f64,
    /// (location, mass) pairs.
    pub atoms: Vec<(f64, f64)>,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Constant densities on (−∞, first node) and (last node, ∞).
    pub tails: [f64; 2],
}

/// ∫_{t0}^{t1} ρ(t)/(t − c) dt for ρ linear from r0 to r1, c off the real line.
fn segment_cauchy(t0: f64, t1: f64, r0: f64, r1: f64, c: C64) -> C64 {
    let s = (r1 - r0) / (t1 - t0);
    let rc = (c - t0) * s + r0;
    rc * ((C64::new(t1, 0.0) - c) / (C64::new(t0, 0.0) - c)).ln() + s * (t1 - t0)
}

/// Schwarz kernel of ℂ₊: (1/πi)(1/(t − w) − t/(1 + t²)).
pub fn schwarz_kernel_1d(w: C64, t: f64) -> C64 {
    (C64::new(1.0, 0.0) / (C64::new(t, 0.0) - w) - t / (1.0 + t * t)) / C64::new(0.0, PI)
}

/// Poisson kernel of ℂ₊: Im w/(π|w − t|²).
pub fn poisson_kernel_1d(w: C64, t: f64) -> f64 {
    w.im / (PI * ((w.re - t).powi(2) + w.im * w.im))
}

impl NevanlinnaData1D {
    pub fn empty() -> Self {
        Self { slope_a: 0.0, atoms: Vec::new(), nodes: Vec::new(), values: Vec::new(), tails: [0.0; 2] }
    }

    pub fn from_atoms(slope_a: f64, atoms: Vec<(f64, f64)>) -> Self {
        Self { slope_a, atoms, ..Self::empty() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slope_a >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative slope {}", self.slope_a)));
        }
        if self.atoms.iter().any(|&(_, m)| !(m > 0.0)) {
            return Err(Error::InvalidArgument("atom masses must be positive".into()));
        }
        if self.nodes.len() != self.values.len() || self.nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("density grid must be increasing and match its values".into()));
        }
        if self.values.iter().chain(&self.tails).any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidArgument("density values must be non-negative".into()));
        }
        if self.nodes.is_empty() && self.tails.iter().any(|&t| t != 0.0) {
            return Err(Error::InvalidArgument("tails need a density grid".into()));
        }
        Ok(())
    }

    /// Schwarz integral of the measure part alone (no slope).
    pub fn schwarz_measure(&self, w: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(t, m) in &self.atoms {
            acc += schwarz_kernel_1d(w, t) * m;
        }
        acc + self.density_schwarz(w)
    }

    /// Schwarz integral −i·a·w + Sμ(w); its real part is the Poisson integral.
    pub fn schwarz(&self, w: C64) -> C64 {
        self.schwarz_measure(w) - C64::new(0.0, self.slope_a) * w
    }

    fn density_schwarz(&self, w: C64) -> C64 {
        let n = self.nodes.len();
        if n == 0 {
            return C64::new(0.0, 0.0);
        }
        let i = C64::new(0.0, 1.0);
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n - 1 {
            let (t0, t1, r0, r1) = (self.nodes[k], self.nodes[k + 1], self.values[k], self.values[k + 1]);
            if r0 == 0.0 && r1 == 0.0 {
                continue;
            }
            let at_i = segment_cauchy(t0, t1, r0, r1, i);
            acc += segment_cauchy(t0, t1, r0, r1, w) - at_i.re;
        }
        let (lo, hi) = (self.nodes[0], self.nodes[n - 1]);
        if self.tails[1] != 0.0 {
            let v = -(C64::new(hi, 0.0) - w).ln() + 0.5 * (1.0 + hi * hi).ln();
            acc += v * self.tails[1];
        }
        if self.tails[0] != 0.0 {
            let v = (C64::new(lo, 0.0) - w).ln() - 0.5 * (1.0 + lo * lo).ln() + C64::new(0.0, PI);
            acc += v * self.tails[0];
        }
        acc / C64::new(0.0, PI)
    }

    /// (1/π)∫ Im w/|w−t|² dμ(t).
    pub fn poisson_measure(&self, w: C64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|&(t, m)| m * poisson_kernel_1d(w, t)).sum();
        atoms + self.density_schwarz(w).re
    }

    /// a·Im w + (1/π)∫ Im w/|w−t|² dμ(t).
    pub fn poisson(&self, w: C64) -> f64 {
        self.poisson_measure(w) + self.slope_a * w.im
    }

    /// (1/π)∫dμ/(1+t²), the Poisson integral of the measure at i.
    pub fn summability_norm(&self) -> f64 {
        self.poisson_measure(C64::new(0.0, 1.0))
    }

    /// Density ρ(t), including the tails.
    pub fn density_at(&self, t: f64) -> f64 {
        let n = self.nodes.len();
        if n == 0 {
            return 0.0;
        }
        if t < self.nodes[0] {
            return self.tails[0];
        }
        if t > self.nodes[n - 1] {
            return self.tails[1];
        }
        let k = self.nodes.partition_point(|&x| x <= t).clamp(1, n - 1);
        let (t0, t1) = (self.nodes[k - 1], self.nodes[k]);
        let s = (t - t0) / (t1 - t0);
        self.values[k - 1] * (1.0 - s) + self.values[k] * s
    }

    /// Nodes and weights representing the measure on ℝ: atoms exactly, the
    /// density by the trapezoid rule and each tail by t = edge ± L(1/u − 1)
    /// with `tail_nodes` midpoint nodes in u.
    pub fn discretize(&self, tail_nodes: usize) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self.atoms.clone();
        let n = self.nodes.len();
        if n == 0 {
            return out;
        }
        for k in 0..n {
            let left = if k > 0 { self.nodes[k] - self.nodes[k - 1] } else { 0.0 };
            let right = if k + 1 < n { self.nodes[k + 1] - self.nodes[k] } else { 0.0 };
            let w = 0.5 * (left + right) * self.values[k];
            if w != 0.0 {
                out.push((self.nodes[k], w));
            }
        }
        let (lo, hi) = (self.nodes[0], self.nodes[n - 1]);
        let l = (0.5 * (hi - lo)).max(1.0);
        for (side, &tau) in self.tails.iter().enumerate() {
            if tau == 0.0 {
                continue;
            }
            for j in 0..tail_nodes {
                let u = (j as f64 + 0.5) / tail_nodes as f64;
                let d = l * (1.0 / u - 1.0);
                let w = tau * l / (u * u) / tail_nodes as f64;
                out.push((if side == 0 { lo - d } else { hi + d }, w));
            }
        }
        out
    }
}

/// Richardson extrapolation of r(y) = a + c₁/y + c₂/y² + … sampled at
/// doubling heights; eliminates the 1/y and 1/y² terms.
pub fn extrapolate_at_infinity(r: &[f64]) -> f64 {
    let r1: Vec<f64> = r.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let r2: Vec<f64> = r1.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    *r2.last().unwrap_or(r1.last().unwrap_or(&r[r.len() - 1]))
}

/// lim u(iy)/y by Richardson extrapolation.
pub fn extract_slope(u: impl Fn(C64) -> f64) -> f64 {
    let r: Vec<f64> = SLOPE_HEIGHTS.iter().map(|&y| u(C64::new(0.0, y)) / y).collect();
    extrapolate_at_infinity(&r)
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if hi - lo < 1e-13 * (1.0 + lo.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s[s.len() / 2]
}

/// Recovers (a, μ) from a positive harmonic function on ℂ₊.
///
/// The grid is uniform on [−radius, radius] with `nodes` intervals, spacing
/// h, and vertical limits are taken at y₀ = h/32. Atoms are searched at
/// local maxima of h·u(·+ih), located by golden section and accepted when
/// y·u stabilizes; masses come from π·y·u(x₀+iy) at y₀, y₀/2, y₀/4 with
/// Richardson extrapolation. The density is 2u(·+iy₀/2) − u(·+iy₀) after
/// removing slope and atoms. With `tail` set, constant tail densities are
/// fitted at ±radius/2 + i·radius/2.
pub fn nevanlinna_extract_1d<U>(u: U, quad: &QuadratureSpec) -> Result<NevanlinnaData1D>
where
    U: Fn(C64) -> f64 + Sync,
{
    quad.validate()?;
    let r = quad.radius;
    let n = quad.nodes;
    let h = 2.0 * r / n as f64;
    let y0 = h / 32.0;
    let nodes: Vec<f64> = (0..=n).map(|k| -r + k as f64 * h).collect();

    let sample = |y: f64| -> Result<Vec<f64>> {
        let v: Vec<f64> = nodes.par_iter().map(|&x| u(C64::new(x, y))).collect();
        if let Some(bad) = v.iter().position(|x| !(*x >= 0.0)) {
            return Err(Error::NotPositive(format!("u({} + {}i) = {}", nodes[bad], y, v[bad])));
        }
        Ok(v)
    };

    let slope = extract_slope(&u);
    if !slope.is_finite() || slope < -crate::measures::SLOPE_AGREEMENT {
        return Err(Error::Inconsistent(format!("slope extrapolation gave {slope}")));
    }
    let slope = slope.max(0.0);

    let coarse = sample(h)?;
    let fine = sample(y0)?;
    let half = sample(0.5 * y0)?;
    let floor = ATOM_MEDIAN_FACTOR * y0 * median(&fine);

    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for k in 0..=n {
        let left = if k > 0 { coarse[k - 1] } else { f64::NEG_INFINITY };
        let right = if k < n { coarse[k + 1] } else { f64::NEG_INFINITY };
        if !(coarse[k] >= left && coarse[k] > right) || coarse[k] <= 0.0 {
            continue;
        }
        let mut x0 = golden_max(|x| u(C64::new(x, y0)), nodes[k] - h, nodes[k] + h);
        let v1 = y0 * u(C64::new(x0, y0));
        let v2 = 0.5 * y0 * u(C64::new(x0, 0.5 * y0));
        if !(v1 > floor && v2 > ATOM_STABILITY * v1) {
            continue;
        }
        let mut masses = [0.0; 3];
        for (j, m) in masses.iter_mut().enumerate() {
            let y = y0 / (1 << j) as f64;
            x0 = golden_max(|x| u(C64::new(x, y)), x0 - 4.0 * y, x0 + 4.0 * y);
            *m = PI * y * u(C64::new(x0, y));
        }
        let r1 = [2.0 * masses[1] - masses[0], 2.0 * masses[2] - masses[1]];
        let mass = (4.0 * r1[1] - r1[0]) / 3.0;
        if mass > 0.0 && atoms.iter().all(|&(t, _)| (t - x0).abs() > h) {
            atoms.push((x0, mass));
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    let known = NevanlinnaData1D { slope_a: slope, atoms: atoms.clone(), ..NevanlinnaData1D::empty() };
    let mut values: Vec<f64> = (0..=n)
        .map(|k| {
            let x = nodes[k];
            let d1 = fine[k] - known.poisson(C64::new(x, y0));
            let d2 = half[k] - known.poisson(C64::new(x, 0.5 * y0));
            2.0 * d2 - d1
        })
        .collect();
    let masked: Vec<bool> = nodes.iter().map(|&x| atoms.iter().any(|&(t, _)| (x - t).abs() < 4.0 * y0)).collect();
    for k in 0..=n {
        if masked[k] {
            let l = (0..k).rev().find(|&j| !masked[j]);
            let rgt = (k + 1..=n).find(|&j| !masked[j]);
            values[k] = match (l, rgt) {
                (Some(a), Some(b)) => {
                    let s = (nodes[k] - nodes[a]) / (nodes[b] - nodes[a]);
                    values[a] * (1.0 - s) + values[b] * s
                }
                (Some(a), None) => values[a],
                (None, Some(b)) => values[b],
                (None, None) => 0.0,
            };
        }
    }
    for v in values.iter_mut() {
        *v = v.max(0.0);
    }

    let mut data = NevanlinnaData1D { slope_a: slope, atoms, nodes, values, tails: [0.0; 2] };
    if quad.tail {
        data.tails = fit_tails(&u, &data, r);
    }
    Ok(data)
}

/// Solves for the two constant tail densities that match the residual
/// of u at ±r/2 + ir/2.
fn fit_tails(u: &impl Fn(C64) -> f64, data: &NevanlinnaData1D, r: f64) -> [f64; 2] {
    let probes = [C64::new(-0.5 * r, 0.5 * r), C64::new(0.5 * r, 0.5 * r)];
    let resid: Vec<f64> = probes.iter().map(|&w| u(w) - data.poisson(w)).collect();
    let basis = |w: C64, side: usize| {
        let mut unit = NevanlinnaData1D { nodes: data.nodes.clone(), values: vec![0.0; data.nodes.len()], ..NevanlinnaData1D::empty() };
        unit.tails[side] = 1.0;
        unit.poisson_measure(w)
    };
    let m = [[basis(probes[0], 0), basis(probes[0], 1)], [basis(probes[1], 0), basis(probes[1], 1)]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return [0.0; 2];
    }
    let tl = (resid[0] * m[1][1] - resid[1] * m[0][1]) / det;
    let tr = (m[0][0] * resid[1] - m[1][0] * resid[0]) / det;
    [tl.max(0.0), tr.max(0.0)]
}
