use rand::Rng;
use siegel::geometry::{BoundaryPoint, SiegelPoint};
use siegel::jordan::{Element, System};
use siegel::C64;

pub fn element(sys: &System, r: &mut impl Rng) -> Element {
    Element::from_fn(sys.dim(), |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

fn real(sys: &System, r: &mut impl Rng) -> Element {
    let (p1, _, _) = sys.peirce_projectors(sys.e()).expect("e is a tripotent");
    sys.re_part(&p1.apply(&element(sys, r)))
}

/// (e + u)² scaled, u self-adjoint with ‖u‖ < 1.
fn cone(sys: &System, r: &mut impl Rng) -> Element {
    let u = real(sys, r);
    let s = sys.spectral_norm(&u).expect("valid element").max(1e-3);
    let v = sys.e() + u * C64::new(0.9 / s, 0.0);
    sys.jordan_mult(&v, &v).expect("valid element") * C64::new(r.random_range(0.2..3.0), 0.0)
}

pub fn siegel_point(sys: &System, r: &mut impl Rng) -> SiegelPoint {
    let (_, ph, _) = sys.peirce_projectors(sys.e()).expect("e is a tripotent");
    let zeta = ph.apply(&element(sys, r));
    let phi = sys.phi(&zeta, &zeta).expect("valid element");
    let z = real(sys, r) * C64::new(2.0, 0.0) + (phi + cone(sys, r)) * C64::new(0.0, 1.0);
    SiegelPoint::new(sys, zeta, z).expect("sampled point lies in the domain")
}

pub fn boundary_point(sys: &System, r: &mut impl Rng) -> BoundaryPoint {
    let c: Vec<f64> = (0..sys.chart_dim()).map(|_| r.random_range(-2.0..2.0)).collect();
    sys.boundary_from_chart(&c).expect("chart has the right length")
}
