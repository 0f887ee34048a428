//! Boundary measures on the Šilov boundary: densities on chart grids, finite
//! atomic measures and measures fibered along a cone direction h, together
//! with their Poisson and Schwarz integrals, the fiberwise disintegration of
//! positive pluriharmonic functions and the transfer to the bounded
//! realization.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, SiegelPoint};
use crate::jordan::{Element, Simple, System, C64};
use crate::kernels::KernelContext;
use crate::nevanlinna::{extrapolate_at_infinity, nevanlinna_extract_1d, NevanlinnaData1D, SLOPE_HEIGHTS};
use crate::quadrature::{pairwise_sum, QuadratureSpec, Rule1D};

/// Fibers extracted from one function must share their slope to this accuracy.
pub const SLOPE_AGREEMENT: f64 = 1e-3;

/// Midpoint nodes per tail when a fiber density is integrated numerically.
pub const TAIL_NODES: usize = 32;

/// Point mass at a chart point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub coords: Vec<f64>,
    pub mass: f64,
}

/// Density on a tensor grid over the boundary chart; `values` is row-major
/// with the first axis slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMeasure {
    pub axes: Vec<Rule1D>,
    pub values: Vec<f64>,
}

/// μ = J·∫ μ′_s ds: each base node s (coefficients in `frame`) carries 1-D
/// Nevanlinna data for the line t ↦ Σ sᵢ·frameᵢ + t·h, and J = |det[frame | h]|
/// converts frame-coefficient Lebesgue measure times dt into chart Lebesgue
/// measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberedMeasure {
    /// Chart coordinates of the direction h ∈ Ω.
    pub h: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub base_nodes: Vec<Vec<f64>>,
    pub base_weights: Vec<f64>,
    pub fibers: Vec<NevanlinnaData1D>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum BoundaryMeasure {
    Density(DensityMeasure),
    Atomic { atoms: Vec<Atom> },
    Fibered(FiberedMeasure),
}

/// Quadrature grid over π_h(b𝒟): nodes are coefficient vectors in `frame`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseGrid {
    pub frame: Vec<Vec<f64>>,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl BaseGrid {
    /// Tensor product of one rule per frame vector.
    pub fn tensor(frame: Vec<Vec<f64>>, rules: &[Rule1D]) -> Result<Self> {
        if rules.len() != frame.len() {
            return Err(Error::InvalidArgument(format!("{} rules for {} frame vectors", rules.len(), frame.len())));
        }
        let mut nodes = vec![Vec::new()];
        let mut weights = vec![1.0];
        for r in rules {
            let mut nn = Vec::with_capacity(nodes.len() * r.len());
            let mut nw = Vec::with_capacity(nodes.len() * r.len());
            for (n, w) in nodes.iter().zip(&weights) {
                for (x, v) in r.nodes.iter().zip(&r.weights) {
                    let mut c = n.clone();
                    c.push(*x);
                    nn.push(c);
                    nw.push(w * v);
                }
            }
            nodes = nn;
            weights = nw;
        }
        Ok(Self { frame, nodes, weights })
    }

    /// Midpoint box [−radius, radius]^k in the default frame, `n` nodes per
    /// axis; `radius` defaults to 8|h|.
    pub fn uniform(sys: &System, h: &Element, radius: Option<f64>, n: usize) -> Result<Self> {
        let frame = sys.orthogonal_frame(h)?;
        let r = radius.unwrap_or(8.0 * sys.norm2(h).sqrt());
        let rules = vec![Rule1D::midpoint(-r, r, n); frame.len()];
        Self::tensor(frame, &rules)
    }

    /// The single base point of a one-dimensional chart.
    pub fn point() -> Self {
        Self { frame: Vec::new(), nodes: vec![Vec::new()], weights: vec![1.0] }
    }
}

impl System {
    /// Chart coordinates of a self-adjoint tube element.
    pub fn direction_chart(&self, h: &Element) -> Vec<f64> {
        self.boundary_to_chart(&BoundaryPoint { zeta: self.zero(), x: h.clone() })
    }

    /// Gram matrix of Re⟨·|·⟩ in chart coordinates.
    pub fn chart_gram(&self) -> Result<DMatrix<f64>> {
        let d = self.chart_dim();
        let mut elems = Vec::with_capacity(d);
        for k in 0..d {
            let mut c = vec![0.0; d];
            c[k] = 1.0;
            let b = self.boundary_from_chart(&c)?;
            elems.push(b.zeta + b.x);
        }
        Ok(DMatrix::from_fn(d, d, |i, j| self.ip(&elems[i], &elems[j]).re))
    }

    /// Basis of the chart subspace orthogonal to h (for Re⟨·|·⟩),
    /// orthonormal in chart coordinates.
    pub fn orthogonal_frame(&self, h: &Element) -> Result<Vec<Vec<f64>>> {
        self.check_direction(h)?;
        let g = self.chart_gram()?;
        let hc = nalgebra::DVector::from_vec(self.direction_chart(h));
        let gh = &g * &hc;
        let hh = hc.dot(&gh);
        let d = self.chart_dim();
        let mut out: Vec<nalgebra::DVector<f64>> = Vec::new();
        for k in 0..d {
            let mut v = nalgebra::DVector::zeros(d);
            v[k] = 1.0;
            v -= &hc * (v.dot(&gh) / hh);
            for b in &out {
                v -= b * v.dot(b);
            }
            let n = v.norm();
            if n > 1e-8 {
                out.push(v / n);
            }
        }
        Ok(out.into_iter().map(|v| v.as_slice().to_vec()).collect())
    }

    fn check_direction(&self, h: &Element) -> Result<()> {
        self.check(h)?;
        if self.tube_residual(h) > 1e-12 * (1.0 + self.norm2(h)) || self.norm2(&self.im_part(h)) > 1e-24 {
            return Err(Error::InvalidArgument("h must be a self-adjoint tube element".into()));
        }
        if !self.cone_contains(h) {
            return Err(Error::InvalidArgument("h must lie in the open cone".into()));
        }
        Ok(())
    }

    /// (ζ, z + w·h) for the boundary point with chart coordinates `c`.
    pub fn fiber_point(&self, c: &[f64], h: &Element, w: C64) -> Result<SiegelPoint> {
        Ok(self.boundary_from_chart(c)?.embed(self).shifted(h, w))
    }
}

impl FiberedMeasure {
    pub fn jacobian(&self) -> f64 {
        let d = self.h.len();
        let m = DMatrix::from_fn(d, d, |i, j| if j < self.frame.len() { self.frame[j][i] } else { self.h[i] });
        m.determinant().abs()
    }

    /// Chart coordinates of the base node `k`, shifted by t·h.
    pub fn chart_point(&self, k: usize, t: f64) -> Vec<f64> {
        let mut c: Vec<f64> = self.h.iter().map(|v| v * t).collect();
        for (s, f) in self.base_nodes[k].iter().zip(&self.frame) {
            for (ci, fi) in c.iter_mut().zip(f) {
                *ci += s * fi;
            }
        }
        c
    }

    /// Closed-form Poisson integral of fiber `k` at w, with the given slope:
    /// the right-hand side of f(ζ, z + wh) = (1/π)∫Im w/|w−t|² dμ′(t) + a·Im w.
    pub fn fiber_poisson(&self, k: usize, a: f64, w: C64) -> f64 {
        self.fibers[k].poisson_measure(w) + a * w.im
    }

    pub fn validate(&self, sys: &System) -> Result<()> {
        let d = sys.chart_dim();
        if self.h.len() != d || self.frame.iter().any(|f| f.len() != d) || self.frame.len() + 1 != d {
            return Err(Error::InvalidArgument("fibered measure does not match the chart".into()));
        }
        if self.base_nodes.len() != self.base_weights.len() || self.base_nodes.len() != self.fibers.len() {
            return Err(Error::InvalidArgument("base grid and fibers differ in length".into()));
        }
        let g = sys.chart_gram()?;
        let hv = nalgebra::DVector::from_column_slice(&self.h);
        for f in &self.frame {
            let fv = nalgebra::DVector::from_column_slice(f);
            if fv.dot(&(&g * &hv)).abs() > 1e-10 * (1.0 + fv.norm() * hv.norm()) {
                return Err(Error::InvalidArgument("base frame is not orthogonal to h".into()));
            }
        }
        for fiber in &self.fibers {
            fiber.validate()?;
        }
        Ok(())
    }

    /// One-dimensional data on ℂ₊ viewed as a measure on the half-line system.
    pub fn half_line(data: NevanlinnaData1D) -> Self {
        Self { h: vec![1.0], frame: Vec::new(), base_nodes: vec![Vec::new()], base_weights: vec![1.0], fibers: vec![data] }
    }
}

impl BoundaryMeasure {
    /// Chart points with weights such that ∫g dμ ≈ Σ weight·g(point).
    pub fn discretize(&self, sys: &System) -> Result<Vec<(Vec<f64>, f64)>> {
        let d = sys.chart_dim();
        match self {
            BoundaryMeasure::Atomic { atoms } => {
                if atoms.iter().any(|a| a.coords.len() != d) {
                    return Err(Error::InvalidArgument("atom coordinates do not match the chart".into()));
                }
                Ok(atoms.iter().map(|a| (a.coords.clone(), a.mass)).collect())
            }
            BoundaryMeasure::Density(m) => {
                let total: usize = m.axes.iter().map(|r| r.len()).product();
                if m.axes.len() != d || m.values.len() != total {
                    return Err(Error::InvalidArgument("density grid does not match the chart".into()));
                }
                let mut out = Vec::with_capacity(total);
                for (flat, &v) in m.values.iter().enumerate() {
                    let mut rem = flat;
                    let mut c = vec![0.0; d];
                    let mut w = v;
                    for k in (0..d).rev() {
                        let n = m.axes[k].len();
                        c[k] = m.axes[k].nodes[rem % n];
                        w *= m.axes[k].weights[rem % n];
                        rem /= n;
                    }
                    if w != 0.0 {
                        out.push((c, w));
                    }
                }
                Ok(out)
            }
            BoundaryMeasure::Fibered(m) => {
                m.validate(sys)?;
                let j = m.jacobian();
                let mut out = Vec::new();
                for (k, (fiber, &bw)) in m.fibers.iter().zip(&m.base_weights).enumerate() {
                    for (t, w) in fiber.discretize(TAIL_NODES) {
                        out.push((m.chart_point(k, t), j * bw * w));
                    }
                }
                Ok(out)
            }
        }
    }

    /// ∫ g dμ over the chart.
    pub fn integrate<G>(&self, sys: &System, g: G) -> Result<f64>
    where
        G: Fn(&[f64]) -> f64 + Sync,
    {
        let pts = self.discretize(sys)?;
        let terms: Vec<f64> = pts.par_iter().map(|(c, w)| w * g(c)).collect();
        Ok(pairwise_sum(&terms))
    }

    /// (𝒫μ)(p) = ∫𝒫(p, ·)dμ.
    pub fn poisson_integral(&self, ctx: &KernelContext, p: &SiegelPoint) -> Result<f64> {
        let pk = ctx.poisson_at(p)?;
        let pts = self.discretize(&ctx.system)?;
        let terms = pts.par_iter().map(|(c, w)| Ok(w * pk.eval_chart(c)?)).collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&terms))
    }

    /// (𝒮μ)(p) = ∫𝒮(p, ·)dμ.
    pub fn schwarz_integral(&self, ctx: &KernelContext, p: &SiegelPoint) -> Result<C64> {
        let sys = &ctx.system;
        let pts = self.discretize(sys)?;
        let terms = pts
            .par_iter()
            .map(|(c, w)| Ok(ctx.schwarz(p, &sys.boundary_from_chart(c)?)? * *w))
            .collect::<Result<Vec<C64>>>()?;
        let re: Vec<f64> = terms.iter().map(|v| v.re).collect();
        let im: Vec<f64> = terms.iter().map(|v| v.im).collect();
        Ok(C64::new(pairwise_sum(&re), pairwise_sum(&im)))
    }

    /// ∫𝒫((0,ie), ·)d|μ|; finite exactly for Poisson-summable measures.
    pub fn poisson_summability_norm(&self, ctx: &KernelContext) -> Result<f64> {
        let base = SiegelPoint::base(&ctx.system);
        let pk = ctx.poisson_at(&base)?;
        let pts = self.discretize(&ctx.system)?;
        let terms = pts.par_iter().map(|(c, w)| Ok(w.abs() * pk.eval_chart(c)?)).collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&terms))
    }

    /// γ_*(𝒫((0,ie),·)·μ) as a finite measure on the Šilov boundary of the
    /// bounded realization.
    pub fn transfer_to_bounded(&self, ctx: &KernelContext) -> Result<Vec<(Element, f64)>> {
        let sys = &ctx.system;
        let base = SiegelPoint::base(sys);
        let pk = ctx.poisson_at(&base)?;
        self.discretize(sys)?
            .into_iter()
            .map(|(c, w)| {
                let b = sys.boundary_from_chart(&c)?;
                Ok((sys.boundary_to_bounded(&b)?, w * pk.eval(&b)?))
            })
            .collect()
    }
}

/// Fiberwise disintegration of a positive pluriharmonic function along h:
/// 1-D Nevanlinna data of w ↦ f(ζ, z + wh) at every base node, and the
/// common slope a.
pub fn disintegrate<F>(sys: &System, f: F, h: &Element, base: &BaseGrid, quad: &QuadratureSpec) -> Result<(FiberedMeasure, f64)>
where
    F: Fn(&SiegelPoint) -> f64 + Sync,
{
    sys.check_direction(h)?;
    let hc = sys.direction_chart(h);
    let mut m = FiberedMeasure {
        h: hc,
        frame: base.frame.clone(),
        base_nodes: base.nodes.clone(),
        base_weights: base.weights.clone(),
        fibers: Vec::new(),
    };
    m.fibers = (0..base.nodes.len())
        .into_par_iter()
        .map(|k| {
            let c = m.chart_point(k, 0.0);
            let b = sys.boundary_from_chart(&c)?.embed(sys);
            nevanlinna_extract_1d(|w| f(&b.shifted(h, w)), quad)
        })
        .collect::<Result<Vec<_>>>()?;
    m.validate(sys)?;
    let (lo, hi) = m.fibers.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d.slope_a), hi.max(d.slope_a)));
    if hi - lo > SLOPE_AGREEMENT {
        return Err(Error::Inconsistent(format!("fiber slopes range over [{lo}, {hi}]")));
    }
    let slopes: Vec<f64> = m.fibers.iter().map(|d| d.slope_a).collect();
    let a = pairwise_sum(&slopes) / slopes.len() as f64;
    Ok((m, a))
}

/// max over probes (node, w) of |f(ζ, z + wh) − fiber Poisson − a·Im w|.
pub fn reconstruct_residual<F>(sys: &System, f: F, mu: &FiberedMeasure, a: f64, probes: &[(usize, C64)]) -> Result<f64>
where
    F: Fn(&SiegelPoint) -> f64,
{
    let h = sys.boundary_from_chart(&mu.h)?.x;
    let mut worst: f64 = 0.0;
    for &(k, w) in probes {
        let p = sys.fiber_point(&mu.chart_point(k, 0.0), &h, w)?;
        worst = worst.max((f(&p) - mu.fiber_poisson(k, a, w)).abs());
    }
    Ok(worst)
}

/// ⟨λ|𝐞_j⟩ = lim f((0,ie) + iy𝐞_j)/y for the unit 𝐞_j of each one-dimensional
/// tube factor, in block order.
pub fn lambda_extract<F>(sys: &System, f: F) -> Vec<f64>
where
    F: Fn(&SiegelPoint) -> f64,
{
    let base = SiegelPoint::base(sys);
    let mut out = Vec::new();
    for b in sys.blocks() {
        if matches!(b.simple, Simple::HalfLine | Simple::Matrix { p: 1, q: 1 }) {
            let mut ej = sys.zero();
            ej[b.offset] = C64::new(1.0, 0.0);
            let r: Vec<f64> = SLOPE_HEIGHTS.iter().map(|&y| f(&base.shifted(&ej, C64::new(0.0, y))) / y).collect();
            out.push(extrapolate_at_infinity(&r));
        }
    }
    out
}
