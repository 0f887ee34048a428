//! Cauchy–Szegő, Poisson and Schwarz kernels of the Siegel domain and of the
//! bounded realization.
//!
//! On the Siegel domain 𝒞((ζ,z),(ζ′,z′)) = c·Δ^{−s}((z − z̄′)/2i − Φ(ζ,ζ′)),
//! with one exponent s = (n+m)/r per irreducible factor; the logarithm is the
//! sum of principal logarithms of the Jordan eigenvalues, which all lie in the
//! right half-plane on the admissible argument set.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, SiegelPoint};
use crate::jordan::{Element, Kind, Simple, System, C64};
use crate::quadrature::{monte_carlo_cauchy, tensor_integrate, QuadratureSpec};

/// Largest tensor grid used for the normalization integral; beyond it the
/// constant is estimated by Monte Carlo.
pub const MAX_TENSOR_POINTS: usize = 1 << 22;
pub const MC_SAMPLES: usize = 1 << 20;
pub const MC_SEED: u64 = 0xC0FFEE;

/// Kernel data of one system: per-factor exponents and the constant c.
#[derive(Clone, Debug)]
pub struct KernelContext {
    pub system: System,
    /// (n+m)/r for each irreducible factor, in block order.
    pub s_vector: Vec<f64>,
    pub c_norm: f64,
    /// Complex dimension of E.
    pub n: usize,
    /// Real dimension of F.
    pub m: usize,
    pub r: usize,
}

fn factor_exponent(s: &Simple) -> f64 {
    match *s {
        Simple::Matrix { q, .. } => q as f64,
        Simple::Spin { d } => (d as f64 + 2.0) / 2.0,
        Simple::HalfLine => 1.0,
    }
}

fn factor_kind(s: &Simple) -> Kind {
    match *s {
        Simple::Matrix { p, q } => Kind::Matrix { p, q },
        Simple::Spin { d } => Kind::Spin { dim_h: d },
        Simple::HalfLine => Kind::HalfLine,
    }
}

impl KernelContext {
    /// Builds the context, fixing c by ∫𝒫((0,ie),·)dβ = 1 factor by factor.
    pub fn new(system: System, quad: &QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        let mut c = 1.0;
        for b in system.blocks() {
            c *= factor_c_norm(&b.simple, quad)?;
        }
        Ok(Self::with_c_norm(system, c))
    }

    /// Context with a given normalization constant.
    pub fn with_c_norm(system: System, c_norm: f64) -> Self {
        let s_vector = system.blocks().iter().map(|b| factor_exponent(&b.simple)).collect();
        Self { n: system.e_dim(), m: system.f_dim(), r: system.rank(), s_vector, c_norm, system }
    }

    /// Context with c = 1.
    pub fn unnormalized(system: System) -> Self {
        Self::with_c_norm(system, 1.0)
    }

    /// log(𝒞/c) at the pair ((ζ,z),(ζ′,z′)).
    pub fn log_kernel(&self, zeta: &Element, z: &Element, zeta2: &Element, z2: &Element) -> Result<C64> {
        let sys = &self.system;
        let zc = sys.tp(sys.e(), z2, sys.e());
        let arg = (z - zc) * C64::new(0.0, -0.5) - sys.phi_unchecked(zeta, zeta2);
        let mut acc = C64::new(0.0, 0.0);
        for (b, &s) in sys.blocks().iter().zip(&self.s_vector) {
            let ev = b.simple.eigenvalues(&arg.as_slice()[b.range()]);
            for l in ev {
                if !(l.norm() > 1e-300) || l.re <= 0.0 {
                    return Err(Error::KernelSingularity(format!("Jordan eigenvalue {l} of the kernel argument")));
                }
                acc -= l.ln() * s;
            }
        }
        Ok(acc)
    }

    fn log_diag(&self, p: &SiegelPoint) -> Result<f64> {
        Ok(self.log_kernel(&p.zeta, &p.z, &p.zeta, &p.z)?.re)
    }

    pub fn cauchy_szego(&self, p: &SiegelPoint, q: &SiegelPoint) -> Result<C64> {
        Ok(self.log_kernel(&p.zeta, &p.z, &q.zeta, &q.z)?.exp() * self.c_norm)
    }

    pub fn cauchy_szego_boundary(&self, p: &SiegelPoint, b: &BoundaryPoint) -> Result<C64> {
        self.cauchy_szego(p, &b.embed(&self.system))
    }

    /// 𝒫(p, b) = |𝒞(p,b)|²/𝒞(p,p).
    pub fn poisson(&self, p: &SiegelPoint, b: &BoundaryPoint) -> Result<f64> {
        let q = b.embed(&self.system);
        let l = self.log_kernel(&p.zeta, &p.z, &q.zeta, &q.z)?;
        Ok(self.c_norm * (2.0 * l.re - self.log_diag(p)?).exp())
    }

    /// Poisson kernel with fixed first argument, for repeated evaluation.
    pub fn poisson_at<'a>(&'a self, p: &'a SiegelPoint) -> Result<PoissonAt<'a>> {
        Ok(PoissonAt { ctx: self, p, log_pp: self.log_diag(p)? })
    }

    /// 𝒮(p, b) = 2𝒞(p,b)·conj 𝒞((0,ie),b)/𝒞(p,(0,ie)) − 𝒫((0,ie),b).
    pub fn schwarz(&self, p: &SiegelPoint, b: &BoundaryPoint) -> Result<C64> {
        let base = SiegelPoint::base(&self.system);
        let q = b.embed(&self.system);
        let l_pb = self.log_kernel(&p.zeta, &p.z, &q.zeta, &q.z)?;
        let l_0b = self.log_kernel(&base.zeta, &base.z, &q.zeta, &q.z)?;
        let l_p0 = self.log_kernel(&p.zeta, &p.z, &base.zeta, &base.z)?;
        let l_00 = self.log_diag(&base)?;
        let s = (l_pb + l_0b.conj() - l_p0).exp() * (2.0 * self.c_norm);
        let pb = self.c_norm * (2.0 * l_0b.re - l_00).exp();
        Ok(s - pb)
    }

    /// Relative residual of 𝒫(p,b) = 𝒫((0,ie),b)·𝒫_D(γ(p), γ(b)).
    pub fn transfer_identity_residual(&self, p: &SiegelPoint, b: &BoundaryPoint) -> Result<f64> {
        let sys = &self.system;
        let lhs = self.poisson(p, b)?;
        let p0 = self.poisson(&SiegelPoint::base(sys), b)?;
        let w = sys.to_bounded(p)?;
        let zb = sys.boundary_to_bounded(b)?;
        let rhs = p0 * poisson_bounded(sys, &w.w, &zb)?;
        Ok((lhs - rhs).abs() / lhs.abs())
    }
}

pub struct PoissonAt<'a> {
    ctx: &'a KernelContext,
    p: &'a SiegelPoint,
    log_pp: f64,
}

impl PoissonAt<'_> {
    pub fn eval(&self, b: &BoundaryPoint) -> Result<f64> {
        let q = b.embed(&self.ctx.system);
        let l = self.ctx.log_kernel(&self.p.zeta, &self.p.z, &q.zeta, &q.z)?;
        Ok(self.ctx.c_norm * (2.0 * l.re - self.log_pp).exp())
    }

    pub fn eval_chart(&self, c: &[f64]) -> Result<f64> {
        self.eval(&self.ctx.system.boundary_from_chart(c)?)
    }
}

/// 1/∫𝒫₁((0,ie),·)dβ for one irreducible factor, 𝒫₁ the kernel with c = 1.
///
/// 𝒫₁((0,ie),·) is invariant under the unitary action fixing e, so the F
/// coordinates are integrated in spectral form: Weyl coordinates on
/// Herm(p) for matrix factors, and eigenvalues α ± ρ with a sphere in the
/// remaining directions for spin factors. A tensor grid over the raw chart
/// resolves the ridge along the boundary of the cone far too slowly.
pub fn factor_c_norm(s: &Simple, quad: &QuadratureSpec) -> Result<f64> {
    let ctx = match s {
        Simple::HalfLine => return Ok(1.0 / (4.0 * std::f64::consts::PI)),
        _ => KernelContext::unnormalized(System::new(factor_kind(s))?),
    };
    let sys = &ctx.system;
    let base = SiegelPoint::base(sys);
    let pk = ctx.poisson_at(&base)?;
    let integral = match *s {
        Simple::Spin { d } => {
            // chart (a, b, c) = (λ₁, λ₂, 0); da db = 2 dα dβ with α ± ρ = λ₁,₂,
            // and dα dρ = ½ dλ₁ dλ₂ on λ₁ > λ₂
            let f = |x: &[f64]| {
                let mut c = vec![0.0; 2 + d];
                c[..2].copy_from_slice(x);
                (0.5 * (x[0] - x[1]).abs()).powi(d as i32) * pk.eval_chart(&c).unwrap_or(0.0)
            };
            let rule = quad.rule()?;
            0.5 * sphere_area(d) * tensor_integrate(&[rule.clone(), rule], f)
        }
        Simple::Matrix { p, q } => {
            let e_real = 2 * p * (q - p);
            let dim = p + e_real;
            let chart = sys.chart_dim();
            let f = |x: &[f64]| {
                let mut c = vec![0.0; chart];
                c[..e_real].copy_from_slice(&x[p..]);
                c[e_real..e_real + p].copy_from_slice(&x[..p]);
                let mut vdm = 1.0;
                for i in 0..p {
                    for j in i + 1..p {
                        vdm *= (x[i] - x[j]).powi(2);
                    }
                }
                vdm * pk.eval_chart(&c).unwrap_or(0.0)
            };
            let points = quad.nodes.checked_pow(dim as u32).unwrap_or(usize::MAX);
            let raw = if points <= MAX_TENSOR_POINTS {
                tensor_integrate(&vec![quad.rule()?; dim], f)
            } else {
                monte_carlo_cauchy(dim, MC_SAMPLES, 1.0, MC_SEED, f).0
            };
            weyl_constant(p) * raw
        }
        Simple::HalfLine => unreachable!(),
    };
    if !(integral > 0.0 && integral.is_finite()) {
        return Err(Error::NotPositive(format!("normalization integral {integral}")));
    }
    Ok(1.0 / integral)
}

/// Surface area of the unit sphere in ℝ^{d+1}.
fn sphere_area(d: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let mut a = if d % 2 == 0 { 2.0 } else { 2.0 * pi };
    let mut k = if d % 2 == 0 { 0 } else { 1 };
    while k < d {
        k += 2;
        a *= 2.0 * pi / (k - 1) as f64;
    }
    a
}

/// π^{p(p−1)/2}/Π_{j≤p} j!, the Weyl constant of Herm(p) for the measure
/// Π dX_ii Π_{i<j} d Re X_ij d Im X_ij.
fn weyl_constant(p: usize) -> f64 {
    let mut fact = 1.0;
    let mut prod = 1.0;
    for j in 1..=p {
        fact *= j as f64;
        prod *= fact;
    }
    std::f64::consts::PI.powi((p * (p - 1) / 2) as i32) / prod
}

fn bounded_blocks(sys: &System) -> Result<()> {
    for b in sys.blocks() {
        if let Simple::Spin { .. } = b.simple {
            return Err(Error::NotImplemented("bounded kernels of spin factors".into()));
        }
    }
    Ok(())
}

/// Cauchy–Szegő kernel of the bounded realization, normalized by 𝒞(0,·) = 1:
/// Π det(I − W₁W₂*)^{−q} over matrix factors (the disc being the 1×1 case).
pub fn cauchy_bounded(sys: &System, w1: &Element, w2: &Element) -> Result<C64> {
    sys.check(w1)?;
    sys.check(w2)?;
    bounded_blocks(sys)?;
    let mut out = C64::new(1.0, 0.0);
    for b in sys.blocks() {
        let (p, q) = match b.simple {
            Simple::Matrix { p, q } => (p, q),
            _ => (1, 1),
        };
        let a = DMatrix::from_row_slice(p, q, &w1.as_slice()[b.range()]);
        let c = DMatrix::from_row_slice(p, q, &w2.as_slice()[b.range()]);
        let m = DMatrix::<C64>::identity(p, p) - a * c.adjoint();
        let d = m.determinant();
        if d.norm() < 1e-300 {
            return Err(Error::KernelSingularity("det(I − W₁W₂*) vanishes".into()));
        }
        out *= d.powi(-(q as i32));
    }
    Ok(out)
}

/// 𝒫_D(w, ζ) = |𝒞(w,ζ)|²/𝒞(w,w).
pub fn poisson_bounded(sys: &System, w: &Element, zeta: &Element) -> Result<f64> {
    let c = cauchy_bounded(sys, w, zeta)?;
    let d = cauchy_bounded(sys, w, w)?;
    Ok(c.norm_sqr() / d.re)
}

/// ℋ(μ)(w) = ∫(2𝒞(w,·) − 1)dμ for a discrete measure on the Šilov boundary.
pub fn herglotz_bounded(sys: &System, mu: &[(Element, f64)], w: &Element) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (z, m) in mu {
        acc += (cauchy_bounded(sys, w, z)? * 2.0 - 1.0) * *m;
    }
    Ok(acc)
}
