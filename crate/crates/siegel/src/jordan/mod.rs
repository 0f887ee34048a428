//! Positive Hermitian Jordan triple systems built from four concrete families
//! (rectangular matrices, spin factors, the half-line and finite products).
//!
//! Elements are plain complex coordinate vectors. Every operation takes the
//! owning [`System`] explicitly and checks the coordinate length against it.

mod block;
mod operator;
mod spectral;

pub use block::Simple;
pub use operator::{Linearity, Operator};
pub use spectral::SpectralDecomposition;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Element = DVector<C64>;

/// Absolute tolerance for tripotency and Peirce membership checks.
pub const TRIPOTENT_TOL: f64 = 1e-9;
/// Relative gap under which two spectral values are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// Configuration record for a triple system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kind {
    Matrix { p: usize, q: usize },
    Spin { dim_h: usize },
    #[serde(rename = "halfline")]
    HalfLine,
    Product { factors: Vec<Kind> },
}

/// One irreducible factor placed at a coordinate offset.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub simple: Simple,
    pub offset: usize,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.simple.dim()
    }

    pub fn rank(&self) -> usize {
        self.simple.rank()
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.dim()
    }
}

/// Descriptor of the ambient triple system with its designated maximal tripotent.
#[derive(Clone, Debug, PartialEq)]
pub struct System {
    kind: Kind,
    blocks: Vec<Block>,
    dim: usize,
    rank: usize,
    e: Element,
}

impl System {
    pub fn new(kind: Kind) -> Result<Self> {
        let mut simples = Vec::new();
        flatten(&kind, &mut simples)?;
        let mut blocks = Vec::with_capacity(simples.len());
        let mut offset = 0;
        for simple in simples {
            blocks.push(Block { simple, offset });
            offset += simple.dim();
        }
        let dim = offset;
        let rank = blocks.iter().map(Block::rank).sum();
        let mut e = Element::zeros(dim);
        for b in &blocks {
            b.simple.write_identity(&mut e.as_mut_slice()[b.range()]);
        }
        Ok(Self { kind, blocks, dim, rank, e })
    }

    pub fn matrix(p: usize, q: usize) -> Result<Self> {
        Self::new(Kind::Matrix { p, q })
    }

    pub fn spin(dim_h: usize) -> Result<Self> {
        Self::new(Kind::Spin { dim_h })
    }

    pub fn half_line() -> Self {
        Self::new(Kind::HalfLine).expect("half-line descriptor is always valid")
    }

    pub fn product(factors: Vec<Kind>) -> Result<Self> {
        Self::new(Kind::Product { factors })
    }

    /// The upper half-plane to the power `n` (bounded realization: the polydisc).
    pub fn polydisc(n: usize) -> Result<Self> {
        Self::product(vec![Kind::HalfLine; n])
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Designated maximal tripotent.
    pub fn e(&self) -> &Element {
        &self.e
    }

    /// True when every factor is the half-line.
    pub fn is_polydisc(&self) -> bool {
        self.blocks.iter().all(|b| b.simple == Simple::HalfLine)
    }

    pub fn zero(&self) -> Element {
        Element::zeros(self.dim)
    }

    pub fn basis(&self, k: usize) -> Element {
        let mut v = self.zero();
        v[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn element(&self, coords: &[C64]) -> Result<Element> {
        if coords.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.dim,
                coords.len()
            )));
        }
        Ok(Element::from_column_slice(coords))
    }

    pub fn element_re(&self, coords: &[f64]) -> Result<Element> {
        let c: Vec<C64> = coords.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.element(&c)
    }

    pub(crate) fn check(&self, x: &Element) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "element has {} coordinates, system has dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn map3(&self, x: &Element, y: &Element, z: &Element, f: impl Fn(&Simple, &[C64], &[C64], &[C64], &mut [C64])) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        self.check(z)?;
        let mut out = self.zero();
        for b in &self.blocks {
            let r = b.range();
            f(&b.simple, &x.as_slice()[r.clone()], &y.as_slice()[r.clone()], &z.as_slice()[r.clone()], &mut out.as_mut_slice()[r]);
        }
        Ok(out)
    }

    /// The triple product {x, y, z}.
    pub fn triple_product(&self, x: &Element, y: &Element, z: &Element) -> Result<Element> {
        self.map3(x, y, z, |s, x, y, z, out| s.triple(x, y, z, out))
    }

    pub(crate) fn tp(&self, x: &Element, y: &Element, z: &Element) -> Element {
        self.triple_product(x, y, z).expect("internal call with matching lengths")
    }

    /// Scalar product Tr D(x, y) (the spin factor uses its explicit normalization).
    pub fn inner_product(&self, x: &Element, y: &Element) -> Result<C64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.ip(x, y))
    }

    pub(crate) fn ip(&self, x: &Element, y: &Element) -> C64 {
        self.blocks
            .iter()
            .map(|b| {
                let r = b.range();
                b.simple.inner(&x.as_slice()[r.clone()], &y.as_slice()[r])
            })
            .sum()
    }

    pub fn norm2(&self, x: &Element) -> f64 {
        self.ip(x, x).re.max(0.0).sqrt()
    }

    pub fn is_tripotent(&self, e: &Element) -> bool {
        if self.check(e).is_err() {
            return false;
        }
        let t = self.tp(e, e, e);
        (t - e).iter().map(|c| c.norm()).fold(0.0, f64::max) < TRIPOTENT_TOL
    }

    /// Spectral norm: largest coefficient of the spectral decomposition.
    pub fn spectral_norm(&self, x: &Element) -> Result<f64> {
        self.check(x)?;
        Ok(self.snorm(x))
    }

    pub(crate) fn snorm(&self, x: &Element) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.simple.spectral_norm(&x.as_slice()[b.range()]))
            .fold(0.0, f64::max)
    }

    /// Jordan product {x, e, y} on the tube part Z₁(e).
    pub fn jordan_mult(&self, x: &Element, y: &Element) -> Result<Element> {
        self.require_tube(x)?;
        self.require_tube(y)?;
        self.triple_product(x, &self.e, y)
    }

    /// Conjugation x ↦ {e, x, e}.
    pub fn conjugate(&self, x: &Element) -> Result<Element> {
        self.check(x)?;
        Ok(self.tp(&self.e, x, &self.e))
    }

    /// Real part (x + x*)/2 of a tube element.
    pub fn re_part(&self, x: &Element) -> Element {
        let c = self.tp(&self.e, x, &self.e);
        (x + c) * C64::new(0.5, 0.0)
    }

    /// Imaginary part (x − x*)/(2i) of a tube element.
    pub fn im_part(&self, x: &Element) -> Element {
        let c = self.tp(&self.e, x, &self.e);
        (x - c) * C64::new(0.0, -0.5)
    }

    /// Jordan inverse on Z₁(e).
    pub fn jordan_inverse(&self, x: &Element) -> Result<Element> {
        self.require_tube(x)?;
        let mut out = self.zero();
        for b in &self.blocks {
            let r = b.range();
            b.simple.inverse(&x.as_slice()[r.clone()], &mut out.as_mut_slice()[r])?;
        }
        Ok(out)
    }

    /// Determinant polynomial of the tube component.
    pub fn det_poly(&self, x: &Element) -> Result<C64> {
        self.check(x)?;
        Ok(self.blocks.iter().map(|b| b.simple.det(&x.as_slice()[b.range()])).product())
    }

    /// Leading Peirce minors Δ₁, …, Δ_r of the tube component with respect to
    /// the standard frame of the designated tripotent.
    pub fn minors(&self, x: &Element) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rank);
        let mut prev = C64::new(1.0, 0.0);
        for b in &self.blocks {
            let m = b.simple.minors(&x.as_slice()[b.range()]);
            let last = *m.last().expect("every factor has rank at least one");
            out.extend(m.into_iter().map(|v| prev * v));
            prev *= last;
        }
        out
    }

    /// Complex Jordan eigenvalues of the tube component, factor by factor.
    pub fn jordan_eigenvalues(&self, x: &Element) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rank);
        for b in &self.blocks {
            out.extend(b.simple.eigenvalues(&x.as_slice()[b.range()]));
        }
        out
    }

    /// Real Jordan eigenvalues of a self-adjoint tube element.
    pub fn real_eigenvalues(&self, u: &Element) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rank);
        for b in &self.blocks {
            out.extend(b.simple.real_eigenvalues(&u.as_slice()[b.range()]));
        }
        out
    }

    /// Residual of the Z₁(e) membership test ‖P₁x − x‖.
    pub fn tube_residual(&self, x: &Element) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.simple.tube_residual(&x.as_slice()[b.range()]))
            .fold(0.0, f64::max)
    }

    /// Residual of the Z_{1/2}(e) membership test.
    pub fn half_residual(&self, x: &Element) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.simple.half_residual(&x.as_slice()[b.range()]))
            .fold(0.0, f64::max)
    }

    fn require_tube(&self, x: &Element) -> Result<()> {
        self.check(x)?;
        let r = self.tube_residual(x);
        if r > TRIPOTENT_TOL * (1.0 + self.norm2(x)) {
            return Err(Error::InvalidArgument(format!("element is not in Z1(e) (residual {r:e})")));
        }
        Ok(())
    }

    /// Continuous logarithm of det on {x : Re x ∈ Ω}, as a sum of principal
    /// logarithms of the Jordan eigenvalues, with one exponent per factor.
    pub fn log_det_weighted(&self, x: &Element, s: &[f64]) -> C64 {
        debug_assert_eq!(s.len(), self.blocks.len());
        let mut acc = C64::new(0.0, 0.0);
        for (b, &sb) in self.blocks.iter().zip(s) {
            let ev = b.simple.eigenvalues(&x.as_slice()[b.range()]);
            let l: C64 = ev.iter().map(|v| v.ln()).sum();
            acc += l * sb;
        }
        acc
    }

    /// Δ^s for a length-r exponent vector, continued holomorphically from the
    /// cone along the straight segment Re x → x.
    pub fn delta_power(&self, x: &Element, s: &[f64]) -> Result<C64> {
        self.check(x)?;
        if s.len() != self.rank {
            return Err(Error::InvalidArgument(format!("exponent vector must have length {}", self.rank)));
        }
        let re = self.re_part(x);
        if !self.cone_contains(&re) {
            return Err(Error::Domain("real part is not in the symmetric cone".into()));
        }
        let im = self.im_part(x);
        let logs = self.track_minor_logs(&re, &im)?;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..self.rank {
            let next = if j + 1 < self.rank { s[j + 1] } else { 0.0 };
            acc += logs[j] * (s[j] - next);
        }
        Ok(acc.exp())
    }

    fn track_minor_logs(&self, re: &Element, im: &Element) -> Result<Vec<C64>> {
        let i = C64::new(0.0, 1.0);
        let at = |t: f64| -> Vec<C64> { self.minors(&(re + im * (i * t))) };
        let start = at(0.0);
        let mut logs: Vec<C64> = start
            .iter()
            .map(|v| C64::new(v.re.ln(), 0.0))
            .collect();
        let mut prev = start;
        let mut t: f64 = 0.0;
        let mut dt: f64 = 1.0 / 16.0;
        while t < 1.0 {
            let step = dt.min(1.0 - t);
            let next = at(t + step);
            let mut ok = true;
            let mut ratios = Vec::with_capacity(next.len());
            for (a, b) in prev.iter().zip(&next) {
                if b.norm() < 1e-300 || a.norm() < 1e-300 {
                    return Err(Error::Branch(format!("minor vanishes near t = {t}")));
                }
                let r = b / a;
                if r.arg().abs() > 0.25 || r.norm().ln().abs() > 0.5 {
                    ok = false;
                    break;
                }
                ratios.push(r);
            }
            if !ok {
                dt = step / 2.0;
                if dt < 1e-12 {
                    return Err(Error::Branch(format!("step underflow near t = {t}")));
                }
                continue;
            }
            for (l, r) in logs.iter_mut().zip(ratios) {
                *l += r.ln();
            }
            prev = next;
            t += step;
            dt = (step * 2.0).min(0.25);
        }
        Ok(logs)
    }

    /// Membership of a self-adjoint tube element in the open symmetric cone.
    pub fn cone_contains(&self, u: &Element) -> bool {
        if self.check(u).is_err() {
            return false;
        }
        let scale = 1.0 + self.norm2(u);
        let c = self.tp(&self.e, u, &self.e);
        if (u - c).iter().map(|v| v.norm()).fold(0.0, f64::max) > 1e-10 * scale {
            return false;
        }
        if self.tube_residual(u) > 1e-10 * scale {
            return false;
        }
        self.real_eigenvalues(u).into_iter().all(|l| l > 1e-12 * scale)
    }
}

fn flatten(kind: &Kind, out: &mut Vec<Simple>) -> Result<()> {
    match kind {
        Kind::Matrix { p, q } => {
            if *p == 0 || p > q {
                return Err(Error::InvalidArgument(format!("matrix kind needs 1 <= p <= q, got p={p}, q={q}")));
            }
            out.push(Simple::Matrix { p: *p, q: *q });
        }
        Kind::Spin { dim_h } => {
            if *dim_h == 0 {
                return Err(Error::InvalidArgument("spin factor needs dim_h >= 1".into()));
            }
            out.push(Simple::Spin { d: *dim_h });
        }
        Kind::HalfLine => out.push(Simple::HalfLine),
        Kind::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::InvalidArgument("product needs at least one factor".into()));
            }
            for f in factors {
                flatten(f, out)?;
            }
        }
    }
    Ok(())
}
