#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel::jordan::{Element, Kind, System};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn kinds() -> Vec<Kind> {
    vec![
        Kind::HalfLine,
        Kind::Matrix { p: 1, q: 1 },
        Kind::Matrix { p: 1, q: 2 },
        Kind::Matrix { p: 2, q: 2 },
        Kind::Matrix { p: 2, q: 3 },
        Kind::Matrix { p: 3, q: 5 },
        Kind::Spin { dim_h: 1 },
        Kind::Spin { dim_h: 4 },
        Kind::Product { factors: vec![Kind::HalfLine, Kind::HalfLine] },
        Kind::Product { factors: vec![Kind::Spin { dim_h: 2 }, Kind::Matrix { p: 1, q: 3 }, Kind::HalfLine] },
    ]
}

pub fn systems() -> Vec<System> {
    kinds().into_iter().map(|k| System::new(k).unwrap()).collect()
}

pub fn cnormal(r: &mut impl Rng) -> C64 {
    C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

pub fn random_element(sys: &System, r: &mut impl Rng) -> Element {
    Element::from_fn(sys.dim(), |_, _| cnormal(r))
}

/// Component of a random element in Z₁(e).
pub fn random_tube(sys: &System, r: &mut impl Rng) -> Element {
    let (p1, _, _) = sys.peirce_projectors(sys.e()).unwrap();
    p1.apply(&random_element(sys, r))
}

/// Component of a random element in Z_{1/2}(e).
pub fn random_half(sys: &System, r: &mut impl Rng) -> Element {
    let (_, ph, _) = sys.peirce_projectors(sys.e()).unwrap();
    ph.apply(&random_element(sys, r))
}

/// Random self-adjoint tube element.
pub fn random_real(sys: &System, r: &mut impl Rng) -> Element {
    sys.re_part(&random_tube(sys, r))
}

/// Random point of the open cone: e + a small self-adjoint perturbation, squared.
pub fn random_cone(sys: &System, r: &mut impl Rng) -> Element {
    let u = random_real(sys, r);
    let s = sys.spectral_norm(&u).unwrap().max(1e-3);
    let v = sys.e() + u * C64::new(0.9 / s, 0.0);
    let sq = sys.jordan_mult(&v, &v).unwrap();
    sq * C64::new(r.random_range(0.2..3.0), 0.0)
}

pub fn max_abs(v: &Element) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random point of the Siegel domain.
pub fn random_siegel(sys: &System, r: &mut impl Rng) -> siegel::geometry::SiegelPoint {
    let zeta = random_half(sys, r);
    let phi = sys.phi(&zeta, &zeta).unwrap();
    let z = random_real(sys, r) * C64::new(2.0, 0.0) + (phi + random_cone(sys, r)) * C64::new(0.0, 1.0);
    siegel::geometry::SiegelPoint::new(sys, zeta, z).unwrap()
}

/// Random Šilov boundary point in chart form.
pub fn random_boundary(sys: &System, r: &mut impl Rng) -> siegel::geometry::BoundaryPoint {
    let c: Vec<f64> = (0..sys.chart_dim()).map(|_| r.random_range(-2.0..2.0)).collect();
    sys.boundary_from_chart(&c).unwrap()
}
