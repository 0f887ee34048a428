//! Closed-form test functions with known boundary data: a rank-two spin
//! tube function with explicit fiber measures, a bidisc quotient with a
//! strictly positive slope and a bidisc quotient whose restricted limits
//! depend on the approach curve.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::{BoundedPoint, SiegelPoint};
use crate::jordan::{System, C64};
use crate::nevanlinna::NevanlinnaData1D;

fn bilinear(c: &[C64]) -> C64 {
    c.iter().map(|v| v * v).sum()
}

/// i·ab/((a+b)(ab − c·c)) for spin coordinates (a, b, c); its real part is
/// positive on the tube over the spin cone.
pub fn spin_f(z: &[C64]) -> C64 {
    let (a, b) = (z[0], z[1]);
    let ab = a * b;
    C64::new(0.0, 1.0) * ab / ((a + b) * (ab - bilinear(&z[2..])))
}

/// spin_f composed with z ↦ −z⁻¹: −i·ab/(a+b).
pub fn spin_g(z: &[C64]) -> C64 {
    let (a, b) = (z[0], z[1]);
    C64::new(0.0, -1.0) * a * b / (a + b)
}

/// Boundary data of w ↦ spin_f(a+w, −a+w, c): an atom π a²/(2R²) at 0 and
/// atoms π c·c/(4R²) at ±R, R² = a² + c·c; π/2 at 0 when R = 0.
pub fn spin_fiber_measure(a: f64, c: &[f64]) -> NevanlinnaData1D {
    let cc: f64 = c.iter().map(|v| v * v).sum();
    let r2 = a * a + cc;
    if r2 == 0.0 {
        return NevanlinnaData1D::from_atoms(0.0, vec![(0.0, 0.5 * PI)]);
    }
    let r = r2.sqrt();
    let mut atoms = Vec::new();
    if a != 0.0 {
        atoms.push((0.0, PI * a * a / (2.0 * r2)));
    }
    if cc > 0.0 {
        let m = PI * cc / (4.0 * r2);
        atoms.push((-r, m));
        atoms.push((r, m));
    }
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    NevanlinnaData1D::from_atoms(0.0, atoms)
}

/// Boundary data of w ↦ Re spin_g(a+w, −a+w, c): slope ½ and an atom π a²/2
/// at 0, independent of c.
pub fn spin_g_fiber_measure(a: f64) -> NevanlinnaData1D {
    let atoms = if a != 0.0 { vec![(0.0, 0.5 * PI * a * a)] } else { Vec::new() };
    NevanlinnaData1D::from_atoms(0.5, atoms)
}

/// The part of `fiber` (a measure on the line t ↦ (a+t, −a+t, c)) carried
/// by the determinant-zero set ab = c·c, i.e. the atoms at t² = a² + c·c.
pub fn null_set_part(fiber: &NevanlinnaData1D, a: f64, c: &[f64], tol: f64) -> Vec<(f64, f64)> {
    let r2 = a * a + c.iter().map(|v| v * v).sum::<f64>();
    fiber.atoms.iter().copied().filter(|&(t, _)| (t * t - r2).abs() <= tol * (1.0 + r2)).collect()
}

/// Re(w₁w₂/(i(w₁+w₂))), positive pluriharmonic on ℂ₊².
pub fn bidisc_product_quotient(w1: C64, w2: C64) -> f64 {
    (w1 * w2 / (C64::new(0.0, 1.0) * (w1 + w2))).re
}

/// Slope of `bidisc_product_quotient` along the cone direction (h₁, h₂).
pub fn bidisc_slope(h1: f64, h2: f64) -> f64 {
    h1 * h2 / (h1 + h2)
}

/// w₁/(w₁+w₂): bounded on every admissible region at (−1, −1) yet with
/// curve-dependent limits there.
pub fn bidisc_ratio(w1: C64, w2: C64) -> C64 {
    w1 / (w1 + w2)
}

/// The two approach curves to (−1, −1) in the bidisc at parameter t: the
/// image of s ↦ i(1−t)(a, b) and its projection onto the diagonal.
pub struct ApproachPair {
    pub curve: [C64; 2],
    pub diagonal: [C64; 2],
}

pub fn approach_pair(a: f64, b: f64, t: f64) -> ApproachPair {
    let g = |s: f64| C64::new((s - 1.0) / (s + 1.0), 0.0);
    let curve = [g((1.0 - t) * a), g((1.0 - t) * b)];
    let mid = 0.5 * (curve[0] + curve[1]);
    ApproachPair { curve, diagonal: [mid, mid] }
}

/// bidisc_ratio pulled back through the inverse Cayley transform of ℂ₊²,
/// at a point of the bidisc.
pub fn bidisc_ratio_on_disc(sys: &System, v: [C64; 2]) -> Result<C64> {
    let p = sys.to_unbounded(&BoundedPoint::new(sys, sys.element(&v)?)?)?;
    Ok(bidisc_ratio(p.z[0], p.z[1]))
}

/// Values of the pulled-back ratio along both curves at t, together with
/// ‖Γ − γ‖/(1 − ‖γ‖).
pub fn curve_limits(a: f64, b: f64, t: f64) -> Result<(C64, C64, f64)> {
    let sys = System::polydisc(2)?;
    let pair = approach_pair(a, b, t);
    let on_curve = bidisc_ratio_on_disc(&sys, pair.curve)?;
    let on_diag = bidisc_ratio_on_disc(&sys, pair.diagonal)?;
    let gap = (pair.curve[0] - pair.diagonal[0]).norm().max((pair.curve[1] - pair.diagonal[1]).norm());
    let ratio = gap / (1.0 - pair.diagonal[0].norm());
    Ok((on_diag, on_curve, ratio))
}

/// Spin tube point (0, z) with z = (a, b, c…).
pub fn spin_point(sys: &System, z: &[C64]) -> Result<SiegelPoint> {
    SiegelPoint::tube(sys, sys.element(z)?)
}
