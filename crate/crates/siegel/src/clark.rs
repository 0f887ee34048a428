//! Clark measures of holomorphic maps into the unit disc: one-dimensional
//! extraction, fiberwise construction along a cone direction, absolutely
//! continuous densities from vertical limits, and residuals of the averaging,
//! composition and Cauchy-transform identities.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, SiegelPoint};
use crate::jordan::{Element, System, C64};
use crate::kernels::KernelContext;
use crate::measures::{disintegrate, BaseGrid, BoundaryMeasure, FiberedMeasure, TAIL_NODES};
use crate::nevanlinna::{extrapolate_at_infinity, nevanlinna_extract_1d, NevanlinnaData1D, SLOPE_HEIGHTS};
use crate::quadrature::{pairwise_sum, QuadratureSpec};

/// Heights of the vertical limits toward the boundary: 2⁻⁸, 2⁻⁹, 2⁻¹⁰.
pub const BOUNDARY_HEIGHTS: [f64; 3] = [1.0 / 256.0, 1.0 / 512.0, 1.0 / 1024.0];

/// Vertical limits whose last two Richardson estimates differ by more than
/// this (relative) are flagged as not converged.
pub const LIMIT_TOL: f64 = 1e-6;

/// Minimal number of α nodes for the circle average.
pub const MIN_ALPHA_NODES: usize = 64;

const UNIMODULAR_TOL: f64 = 1e-12;

/// (1 − |φ|²)/|α − φ|², or NaN when |φ| ≥ 1.
pub fn clark_weight(phi: C64, alpha: C64) -> f64 {
    let n = phi.norm_sqr();
    if n >= 1.0 {
        return f64::NAN;
    }
    (1.0 - n) / (alpha - phi).norm_sqr()
}

fn check_alpha(alpha: C64) -> Result<()> {
    if (alpha.norm() - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::InvalidArgument(format!("|alpha| = {} is not 1", alpha.norm())));
    }
    Ok(())
}

fn map_not_positive<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::NotPositive(msg) => Error::InvalidArgument(format!("|phi| >= 1 at a sample: {msg}")),
        other => other,
    })
}

fn weight_or_flag(phi: C64, alpha: C64, escaped: &AtomicBool) -> f64 {
    let v = clark_weight(phi, alpha);
    if v.is_nan() {
        escaped.store(true, Ordering::Relaxed);
    }
    v
}

fn escape_check(escaped: &AtomicBool) -> Result<()> {
    if escaped.load(Ordering::Relaxed) {
        return Err(Error::InvalidArgument("phi leaves the open unit disc".into()));
    }
    Ok(())
}

/// Nevanlinna data of (1 − |φ|²)/|α − φ|² for φ: ℂ₊ → 𝔻.
pub fn clark_1d<P>(phi: P, alpha: C64, quad: &QuadratureSpec) -> Result<NevanlinnaData1D>
where
    P: Fn(C64) -> C64 + Sync,
{
    check_alpha(alpha)?;
    let escaped = AtomicBool::new(false);
    let r = nevanlinna_extract_1d(|w| weight_or_flag(phi(w), alpha, &escaped), quad);
    escape_check(&escaped)?;
    map_not_positive(r)
}

/// Clark measure of φ: 𝒟 → 𝔻 disintegrated along h, with its common slope.
pub fn clark_fibered<P>(sys: &System, phi: P, alpha: C64, h: &Element, base: &BaseGrid, quad: &QuadratureSpec) -> Result<(FiberedMeasure, f64)>
where
    P: Fn(&SiegelPoint) -> C64 + Sync,
{
    check_alpha(alpha)?;
    let escaped = AtomicBool::new(false);
    let r = disintegrate(sys, |p: &SiegelPoint| weight_or_flag(phi(p), alpha, &escaped), h, base, quad);
    escape_check(&escaped)?;
    map_not_positive(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerticalLimit {
    pub value: C64,
    pub converged: bool,
}

/// lim_{y→0⁺} g(y) from samples at `BOUNDARY_HEIGHTS`, eliminating the
/// linear and quadratic terms.
pub fn vertical_limit(g: impl Fn(f64) -> C64) -> VerticalLimit {
    let v: Vec<C64> = BOUNDARY_HEIGHTS.iter().map(|&y| g(y)).collect();
    let r1 = [v[1] * 2.0 - v[0], v[2] * 2.0 - v[1]];
    let value = (r1[1] * 4.0 - r1[0]) / 3.0;
    let converged = value.is_finite() && (value - r1[1]).norm() <= LIMIT_TOL * (1.0 + value.norm());
    VerticalLimit { value, converged }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcDensity {
    pub density: f64,
    pub boundary_value: VerticalLimit,
}

/// (1 − |φ₀|²)/|α − φ₀|² at b, with φ₀(b) the vertical limit of φ(b + iyh).
pub fn ac_density<P>(sys: &System, phi: P, alpha: C64, b: &BoundaryPoint, h: &Element) -> Result<AcDensity>
where
    P: Fn(&SiegelPoint) -> C64,
{
    check_alpha(alpha)?;
    let p = b.embed(sys);
    let boundary_value = vertical_limit(|y| phi(&p.shifted(h, C64::new(0.0, y))));
    let phi0 = boundary_value.value;
    let density = if phi0.norm() < 1.0 { (1.0 - phi0.norm_sqr()) / (alpha - phi0).norm_sqr() } else { 0.0 };
    Ok(AcDensity { density, boundary_value })
}

/// Midpoint nodes exp(2πi(k + ½)/n) of the circle.
pub fn alpha_grid(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / n as f64)).collect()
}

fn check_alpha_nodes(n: usize) -> Result<()> {
    if n < MIN_ALPHA_NODES {
        return Err(Error::InvalidArgument(format!("at least {MIN_ALPHA_NODES} alpha nodes are needed, got {n}")));
    }
    Ok(())
}

/// |∫_𝕋 (𝒫μ_α)(w) dβ_𝕋(α) − 1| for φ: ℂ₊ → 𝔻, with μ_α from `clark_1d`.
pub fn aggregate_identity_residual_1d<P>(phi: P, w: C64, quad: &QuadratureSpec, n_alpha: usize) -> Result<f64>
where
    P: Fn(C64) -> C64 + Sync,
{
    check_alpha_nodes(n_alpha)?;
    let vals = alpha_grid(n_alpha)
        .par_iter()
        .map(|&a| Ok(clark_1d(&phi, a, quad)?.poisson_measure(w)))
        .collect::<Result<Vec<f64>>>()?;
    Ok((pairwise_sum(&vals) / n_alpha as f64 - 1.0).abs())
}

/// |∫_𝕋 (𝒫μ_α)(p) dβ_𝕋(α) − 1| with μ_α from `clark_fibered`.
#[allow(clippy::too_many_arguments)]
pub fn aggregate_identity_residual<P>(
    ctx: &KernelContext,
    phi: P,
    p: &SiegelPoint,
    h: &Element,
    base: &BaseGrid,
    quad: &QuadratureSpec,
    n_alpha: usize,
) -> Result<f64>
where
    P: Fn(&SiegelPoint) -> C64 + Sync,
{
    check_alpha_nodes(n_alpha)?;
    let mut vals = Vec::with_capacity(n_alpha);
    for a in alpha_grid(n_alpha) {
        let (mu, _) = clark_fibered(&ctx.system, &phi, a, h, base, quad)?;
        vals.push(BoundaryMeasure::Fibered(mu).poisson_integral(ctx, p)?);
    }
    Ok((pairwise_sum(&vals) / n_alpha as f64 - 1.0).abs())
}

/// Self-maps of the disc with explicit Clark measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DiscMap {
    Identity,
    /// rotation·Π (w − aₖ)/(1 − āₖw).
    Blaschke { zeros: Vec<C64>, rotation: C64 },
}

impl DiscMap {
    pub fn square() -> Self {
        DiscMap::Blaschke { zeros: vec![C64::new(0.0, 0.0); 2], rotation: C64::new(1.0, 0.0) }
    }

    pub fn eval(&self, w: C64) -> C64 {
        match self {
            DiscMap::Identity => w,
            DiscMap::Blaschke { zeros, rotation } => zeros.iter().fold(*rotation, |acc, a| acc * (w - a) / (C64::new(1.0, 0.0) - a.conj() * w)),
        }
    }

    fn validate(&self) -> Result<()> {
        if let DiscMap::Blaschke { zeros, rotation } = self {
            check_alpha(*rotation)?;
            if zeros.is_empty() || zeros.iter().any(|a| a.norm() >= 1.0) {
                return Err(Error::InvalidArgument("Blaschke zeros must be nonempty and inside the disc".into()));
            }
        }
        Ok(())
    }

    /// μ_α as (point of 𝕋, mass) pairs, normalized against β_𝕋: the
    /// preimages ζ of α with masses 1/|B′(ζ)|.
    pub fn clark_atoms(&self, alpha: C64) -> Result<Vec<(C64, f64)>> {
        check_alpha(alpha)?;
        self.validate()?;
        let (zeros, rotation) = match self {
            DiscMap::Identity => return Ok(vec![(alpha, 1.0)]),
            DiscMap::Blaschke { zeros, rotation } => (zeros, *rotation),
        };
        // arg B(e^{iθ}) increases strictly, by 2π·(number of zeros) over a turn
        let speed = |t: f64| -> f64 {
            let z = C64::from_polar(1.0, t);
            zeros.iter().map(|a| (1.0 - a.norm_sqr()) / (z - a).norm_sqr()).sum()
        };
        let phase = |t: f64| -> f64 {
            let z = C64::from_polar(1.0, t);
            let mut acc = rotation.arg();
            for a in zeros {
                acc += (z - a).arg() - (C64::new(1.0, 0.0) - a.conj() * z).arg();
            }
            acc
        };
        let target = alpha.arg();
        let wrap = |x: f64| (x + PI).rem_euclid(2.0 * PI) - PI;
        let steps = 512 * zeros.len();
        let mut out = Vec::new();
        for k in 0..steps {
            let (mut lo, mut hi) = (2.0 * PI * k as f64 / steps as f64, 2.0 * PI * (k + 1) as f64 / steps as f64);
            let g = |t: f64| wrap(phase(t) - target);
            let (glo, ghi) = (g(lo), g(hi));
            if !(glo <= 0.0 && ghi > 0.0 && ghi - glo < PI) {
                continue;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            out.push((C64::from_polar(1.0, t), 1.0 / speed(t)));
        }
        if out.len() != zeros.len() {
            return Err(Error::Inconsistent(format!("found {} preimages for a degree-{} map", out.len(), zeros.len())));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionResidual {
    /// |𝒫μ_α[ψ∘φ](w) − ∫𝒫μ_α′[φ](w) dμ_α[ψ](α′)| for the measure parts.
    pub measure: f64,
    /// The same comparison for the slopes.
    pub slope: f64,
}

/// Residual of μ_α[ψ∘φ] = ∫ μ_α′[φ] dμ_α[ψ](α′) at w, for φ: ℂ₊ → 𝔻.
pub fn composition_residual_1d<P>(phi: P, psi: &DiscMap, alpha: C64, w: C64, quad: &QuadratureSpec) -> Result<CompositionResidual>
where
    P: Fn(C64) -> C64 + Sync,
{
    let lhs = clark_1d(|v| psi.eval(phi(v)), alpha, quad)?;
    let mut measure = Vec::new();
    let mut slope = Vec::new();
    for (a, m) in psi.clark_atoms(alpha)? {
        let d = clark_1d(&phi, a / a.norm(), quad)?;
        measure.push(m * d.poisson_measure(w));
        slope.push(m * d.slope_a);
    }
    Ok(CompositionResidual {
        measure: (lhs.poisson_measure(w) - pairwise_sum(&measure)).abs(),
        slope: (lhs.slope_a - pairwise_sum(&slope)).abs(),
    })
}

/// Cauchy–Szegő kernel of ℂ₊ against a boundary point: i/(2π(w − t)).
pub fn cauchy_1d(w: C64, t: f64) -> C64 {
    C64::new(0.0, 1.0) / ((w - t) * (2.0 * PI))
}

/// Reproducing kernel (1 − φ(z)φ(w)‾)·i/(2π(z − w̄)) of φ*(H²(ℂ₊)).
pub fn model_kernel_1d(phi: &impl Fn(C64) -> C64, z: C64, w: C64) -> C64 {
    (C64::new(1.0, 0.0) - phi(z) * phi(w).conj()) * C64::new(0.0, 1.0) / ((z - w.conj()) * (2.0 * PI))
}

/// (1 − ᾱφ(w))·∫ C(w, t) f(t) dμ_α(t), with μ_α given by its Nevanlinna data.
pub fn normalized_cauchy_1d<P, F>(phi: P, alpha: C64, mu: &NevanlinnaData1D, f: F, w: C64) -> C64
where
    P: Fn(C64) -> C64,
    F: Fn(f64) -> C64,
{
    let terms: Vec<C64> = mu.discretize(TAIL_NODES).into_iter().map(|(t, m)| cauchy_1d(w, t) * f(t) * m).collect();
    let re: Vec<f64> = terms.iter().map(|v| v.re).collect();
    let im: Vec<f64> = terms.iter().map(|v| v.im).collect();
    (C64::new(1.0, 0.0) - alpha.conj() * phi(w)) * C64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// The part of F ∈ φ*(H²) not reproduced by its normalized Cauchy transform
/// at w: ½(1 − ᾱφ(w))·lim_{y→∞} (1 − |φ(iy)|²)/|α − φ(iy)|²·F(iy).
pub fn normalized_cauchy_correction<P, F>(phi: P, alpha: C64, big_f: F, w: C64) -> C64
where
    P: Fn(C64) -> C64,
    F: Fn(C64) -> C64,
{
    let sample = |y: f64| {
        let iy = C64::new(0.0, y);
        big_f(iy) * clark_weight(phi(iy), alpha)
    };
    let re: Vec<f64> = SLOPE_HEIGHTS.iter().map(|&y| sample(y).re).collect();
    let im: Vec<f64> = SLOPE_HEIGHTS.iter().map(|&y| sample(y).im).collect();
    let lim = C64::new(extrapolate_at_infinity(&re), extrapolate_at_infinity(&im));
    (C64::new(1.0, 0.0) - alpha.conj() * phi(w)) * lim * 0.5
}

/// Largest entry of G − K, where G is the L²(μ_α) Gram matrix of C(·, wᵢ)
/// and K the Gram matrix of their images in φ*(H²), corrected by the slope
/// term a/(4π).
pub fn gram_residual_1d<P>(phi: P, alpha: C64, mu: &NevanlinnaData1D, points: &[C64]) -> f64
where
    P: Fn(C64) -> C64,
{
    let nodes = mu.discretize(TAIL_NODES);
    let mut worst: f64 = 0.0;
    for &zi in points {
        for &zj in points {
            let terms: Vec<C64> = nodes.iter().map(|&(t, m)| cauchy_1d(zi, t) * cauchy_1d(zj, t).conj() * m).collect();
            let re: Vec<f64> = terms.iter().map(|v| v.re).collect();
            let im: Vec<f64> = terms.iter().map(|v| v.im).collect();
            let g = C64::new(pairwise_sum(&re), pairwise_sum(&im));
            let di = C64::new(1.0, 0.0) - alpha.conj() * phi(zi);
            let dj = C64::new(1.0, 0.0) - alpha.conj() * phi(zj);
            let k = model_kernel_1d(&phi, zi, zj) / (di * dj.conj()) - mu.slope_a / (4.0 * PI);
            worst = worst.max((g - k).norm());
        }
    }
    worst
}
