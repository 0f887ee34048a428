//! The Siegel domain {(ζ, z) : Im z − Φ(ζ) ∈ Ω} attached to the designated
//! tripotent, its Šilov boundary chart and the Cayley transforms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{Element, System, C64};

/// Inversions whose Jordan condition number exceeds this are treated as poles.
pub const NEAR_BOUNDARY_COND: f64 = 1e12;

const MEMBERSHIP_TOL: f64 = 1e-10;

/// A point (ζ, z) with ζ ∈ E and z ∈ F_ℂ, both stored as full coordinate
/// vectors of Z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiegelPoint {
    pub zeta: Element,
    pub z: Element,
}

/// A Šilov boundary point in chart form: ζ ∈ E, x ∈ F self-adjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub zeta: Element,
    pub x: Element,
}

/// A point of the bounded realization, spectral norm < 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedPoint {
    pub w: Element,
}

impl SiegelPoint {
    pub fn new(sys: &System, zeta: Element, z: Element) -> Result<Self> {
        sys.check(&zeta)?;
        sys.check(&z)?;
        let scale = 1.0 + sys.norm2(&zeta) + sys.norm2(&z);
        if sys.half_residual(&zeta) > MEMBERSHIP_TOL * scale {
            return Err(Error::InvalidArgument("zeta is not in E".into()));
        }
        if sys.tube_residual(&z) > MEMBERSHIP_TOL * scale {
            return Err(Error::InvalidArgument("z is not in the tube part".into()));
        }
        Ok(Self { zeta, z })
    }

    /// The base point (0, ie).
    pub fn base(sys: &System) -> Self {
        Self { zeta: sys.zero(), z: sys.e() * C64::new(0.0, 1.0) }
    }

    /// (0, z) on a tube-type system or with ζ = 0.
    pub fn tube(sys: &System, z: Element) -> Result<Self> {
        Self::new(sys, sys.zero(), z)
    }

    /// (ζ, z + w·h) for a complex scalar w and a real direction h.
    pub fn shifted(&self, h: &Element, w: C64) -> Self {
        Self { zeta: self.zeta.clone(), z: &self.z + h * w }
    }
}

impl BoundaryPoint {
    /// (ζ, x + iΦ(ζ)) as a point of Z.
    pub fn embed(&self, sys: &System) -> SiegelPoint {
        let phi = sys.phi_unchecked(&self.zeta, &self.zeta);
        SiegelPoint { zeta: self.zeta.clone(), z: &self.x + phi * C64::new(0.0, 1.0) }
    }
}

impl BoundedPoint {
    pub fn new(sys: &System, w: Element) -> Result<Self> {
        let n = sys.spectral_norm(&w)?;
        if n >= 1.0 {
            return Err(Error::Domain(format!("spectral norm {n} is not below 1")));
        }
        Ok(Self { w })
    }
}

impl System {
    /// Complex dimension of E.
    pub fn e_dim(&self) -> usize {
        self.blocks().iter().map(|b| b.simple.e_dim()).sum()
    }

    /// Real dimension of F.
    pub fn f_dim(&self) -> usize {
        self.blocks().iter().map(|b| b.simple.f_dim()).sum()
    }

    /// Real dimension of the Šilov boundary chart, 2·dim E + dim F.
    pub fn chart_dim(&self) -> usize {
        2 * self.e_dim() + self.f_dim()
    }

    /// Self-adjoint tube element with real coordinates `f` (length `f_dim`).
    pub fn f_from_real(&self, f: &[f64]) -> Result<Element> {
        if f.len() != self.f_dim() {
            return Err(Error::InvalidArgument(format!("expected {} real coordinates, got {}", self.f_dim(), f.len())));
        }
        let mut out = self.zero();
        let mut k = 0;
        for b in self.blocks() {
            let n = b.simple.f_dim();
            b.simple.f_from_real(&f[k..k + n], &mut out.as_mut_slice()[b.range()]);
            k += n;
        }
        Ok(out)
    }

    /// Real coordinates of the self-adjoint part of a tube element.
    pub fn f_to_real(&self, x: &Element) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.f_dim());
        for b in self.blocks() {
            out.extend(b.simple.f_to_real(&x.as_slice()[b.range()]));
        }
        out
    }

    fn e_positions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for b in self.blocks() {
            out.extend(b.simple.e_indices().into_iter().map(|i| i + b.offset));
        }
        out
    }

    /// Element of E from interleaved (re, im) coordinates.
    pub fn e_from_real(&self, c: &[f64]) -> Result<Element> {
        let pos = self.e_positions();
        if c.len() != 2 * pos.len() {
            return Err(Error::InvalidArgument(format!("expected {} real coordinates, got {}", 2 * pos.len(), c.len())));
        }
        let mut out = self.zero();
        for (k, &i) in pos.iter().enumerate() {
            out[i] = C64::new(c[2 * k], c[2 * k + 1]);
        }
        Ok(out)
    }

    pub fn e_to_real(&self, zeta: &Element) -> Vec<f64> {
        self.e_positions().iter().flat_map(|&i| [zeta[i].re, zeta[i].im]).collect()
    }

    /// Boundary point from chart coordinates (block by block: E re/im pairs,
    /// then F coordinates).
    pub fn boundary_from_chart(&self, c: &[f64]) -> Result<BoundaryPoint> {
        if c.len() != self.chart_dim() {
            return Err(Error::InvalidArgument(format!("expected {} chart coordinates, got {}", self.chart_dim(), c.len())));
        }
        let mut zeta = self.zero();
        let mut x = self.zero();
        let mut k = 0;
        for b in self.blocks() {
            for i in b.simple.e_indices() {
                zeta[b.offset + i] = C64::new(c[k], c[k + 1]);
                k += 2;
            }
            let n = b.simple.f_dim();
            b.simple.f_from_real(&c[k..k + n], &mut x.as_mut_slice()[b.range()]);
            k += n;
        }
        Ok(BoundaryPoint { zeta, x })
    }

    pub fn boundary_to_chart(&self, p: &BoundaryPoint) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.chart_dim());
        for b in self.blocks() {
            for i in b.simple.e_indices() {
                let v = p.zeta[b.offset + i];
                out.push(v.re);
                out.push(v.im);
            }
            out.extend(b.simple.f_to_real(&p.x.as_slice()[b.range()]));
        }
        out
    }

    /// Φ(ζ, ζ′) = 2{ζ, ζ′, e}.
    pub fn phi(&self, zeta1: &Element, zeta2: &Element) -> Result<Element> {
        for z in [zeta1, zeta2] {
            self.check(z)?;
            if self.half_residual(z) > MEMBERSHIP_TOL * (1.0 + self.norm2(z)) {
                return Err(Error::InvalidArgument("phi needs arguments in E".into()));
            }
        }
        Ok(self.phi_unchecked(zeta1, zeta2))
    }

    pub(crate) fn phi_unchecked(&self, zeta1: &Element, zeta2: &Element) -> Element {
        self.tp(zeta1, zeta2, self.e()) * C64::new(2.0, 0.0)
    }

    /// Im z − Φ(ζ), the cone-valued defining function.
    pub fn height(&self, p: &SiegelPoint) -> Element {
        let phi = self.phi_unchecked(&p.zeta, &p.zeta);
        // drop the rounding-level skew part so the cone test sees a self-adjoint input
        self.re_part(&(self.im_part(&p.z) - phi))
    }

    pub fn in_domain(&self, p: &SiegelPoint) -> bool {
        if self.check(&p.zeta).is_err() || self.check(&p.z).is_err() {
            return false;
        }
        let scale = 1.0 + self.norm2(&p.zeta) + self.norm2(&p.z);
        if self.half_residual(&p.zeta) > MEMBERSHIP_TOL * scale || self.tube_residual(&p.z) > MEMBERSHIP_TOL * scale {
            return false;
        }
        self.cone_contains(&self.height(p))
    }

    /// Jordan inverse guarded against near-singular input.
    fn guarded_inverse(&self, x: &Element) -> Result<Element> {
        let ev = self.jordan_eigenvalues(x);
        let hi = ev.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let lo = ev.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if cond > NEAR_BOUNDARY_COND {
            return Err(Error::NearBoundary { cond });
        }
        self.jordan_inverse(x)
    }

    /// Cayley transform onto the bounded realization:
    /// w = 4i{(z+ie)⁻¹, e, ζ} + {(z+ie)⁻¹, e, z−ie}.
    pub fn to_bounded(&self, p: &SiegelPoint) -> Result<BoundedPoint> {
        if !self.in_domain(p) {
            return Err(Error::Domain("point is not in the Siegel domain".into()));
        }
        let ie = self.e() * C64::new(0.0, 1.0);
        let inv = self.guarded_inverse(&(&p.z + &ie))?;
        let omega = self.tp(&inv, self.e(), &p.zeta) * C64::new(0.0, 4.0);
        let v = self.tp(&inv, self.e(), &(&p.z - &ie));
        Ok(BoundedPoint { w: omega + v })
    }

    /// Inverse Cayley transform: ζ = 2{(e−v)⁻¹, e, ω}, z = i{(e−v)⁻¹, e, e+v},
    /// where v and ω are the tube and E components of w.
    pub fn to_unbounded(&self, w: &BoundedPoint) -> Result<SiegelPoint> {
        self.check(&w.w)?;
        let (v, omega) = self.split(&w.w);
        let inv = self.guarded_inverse(&(self.e() - &v))?;
        let zeta = self.tp(&inv, self.e(), &omega) * C64::new(2.0, 0.0);
        let z = self.tp(&inv, self.e(), &(self.e() + &v)) * C64::new(0.0, 1.0);
        Ok(SiegelPoint { zeta, z })
    }

    /// Cayley image of a boundary point (defined off the pole set).
    pub fn boundary_to_bounded(&self, b: &BoundaryPoint) -> Result<Element> {
        let p = b.embed(self);
        let ie = self.e() * C64::new(0.0, 1.0);
        let inv = self.guarded_inverse(&(&p.z + &ie))?;
        let omega = self.tp(&inv, self.e(), &p.zeta) * C64::new(0.0, 4.0);
        let v = self.tp(&inv, self.e(), &(&p.z - &ie));
        Ok(omega + v)
    }

    /// (ζ, z) ↦ (−2i{z⁻¹, e, ζ}, −z⁻¹).
    pub fn involution(&self, p: &SiegelPoint) -> Result<SiegelPoint> {
        let inv = self.guarded_inverse(&p.z)?;
        let zeta = self.tp(&inv, self.e(), &p.zeta) * C64::new(0.0, -2.0);
        Ok(SiegelPoint { zeta, z: -inv })
    }

    /// Splits w into its tube and E components.
    pub fn split(&self, w: &Element) -> (Element, Element) {
        let mut omega = self.zero();
        for i in self.e_positions() {
            omega[i] = w[i];
        }
        (w - &omega, omega)
    }
}
