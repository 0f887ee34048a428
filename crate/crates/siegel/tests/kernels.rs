mod common;

use std::f64::consts::PI;

use common::*;
use rand::Rng;
use siegel::geometry::{BoundaryPoint, SiegelPoint};
use siegel::jordan::{Element, Kind, System};
use siegel::kernels::{cauchy_bounded, herglotz_bounded, poisson_bounded, KernelContext};
use siegel::quadrature::{tensor_integrate, QuadratureSpec};
use siegel::C64;

fn half_line_point(z: C64) -> SiegelPoint {
    let h = System::half_line();
    SiegelPoint::tube(&h, h.element(&[z]).unwrap()).unwrap()
}

fn half_line_boundary(x: f64) -> BoundaryPoint {
    System::half_line().boundary_from_chart(&[x]).unwrap()
}

fn half_line_ctx() -> KernelContext {
    KernelContext::new(System::half_line(), &QuadratureSpec::default()).unwrap()
}

#[test]
fn half_line_kernels_match_closed_forms() {
    let ctx = half_line_ctx();
    assert!((ctx.c_norm - 1.0 / (4.0 * PI)).abs() < 1e-16);
    let p = half_line_point(c(0.0, 1.0));
    assert!((ctx.cauchy_szego(&p, &p).unwrap() - c(1.0 / (4.0 * PI), 0.0)).norm() < 1e-15);
    assert!((ctx.poisson(&p, &half_line_boundary(0.0)).unwrap() - 1.0 / PI).abs() < 1e-15);

    let mut r = rng(1);
    for _ in 0..50 {
        let z = c(r.random_range(-3.0..3.0), r.random_range(0.05..3.0));
        let z2 = c(r.random_range(-3.0..3.0), r.random_range(0.05..3.0));
        let x = r.random_range(-5.0..5.0);
        let (p, q) = (half_line_point(z), half_line_point(z2));
        let want = c(0.0, 1.0) / ((z - z2.conj()) * (2.0 * PI));
        assert!((ctx.cauchy_szego(&p, &q).unwrap() - want).norm() < 1e-14 * want.norm());
        let want_p = z.im / (PI * (z - x).norm_sqr());
        let got_p = ctx.poisson(&p, &half_line_boundary(x)).unwrap();
        assert!((got_p - want_p).abs() < 1e-13 * want_p);
        let want_s = (c(1.0, 0.0) / (c(x, 0.0) - z) - x / (1.0 + x * x)) / c(0.0, PI);
        let got_s = ctx.schwarz(&p, &half_line_boundary(x)).unwrap();
        assert!((got_s - want_s).norm() < 1e-13 * want_s.norm().max(1.0));
        assert!((got_s.re - got_p).abs() < 1e-13 * want_p.max(1.0));
    }
}

#[test]
fn cauchy_szego_is_hermitian() {
    let mut r = rng(2);
    for kind in [Kind::Matrix { p: 1, q: 2 }, Kind::Matrix { p: 2, q: 3 }, Kind::Spin { dim_h: 2 }, Kind::Product { factors: vec![Kind::HalfLine, Kind::Matrix { p: 1, q: 2 }] }] {
        let sys = System::new(kind).unwrap();
        let ctx = KernelContext::unnormalized(sys.clone());
        for _ in 0..10 {
            let (p, q) = (random_siegel(&sys, &mut r), random_siegel(&sys, &mut r));
            let a = ctx.cauchy_szego(&p, &q).unwrap();
            let b = ctx.cauchy_szego(&q, &p).unwrap().conj();
            assert!((a - b).norm() < 1e-12 * a.norm(), "{:?}", sys.kind());
        }
    }
}

#[test]
fn matrix_kernel_is_a_determinant_power() {
    let sys = System::matrix(2, 3).unwrap();
    let ctx = KernelContext::unnormalized(sys.clone());
    let mut r = rng(3);
    for _ in 0..10 {
        let (p, q) = (random_siegel(&sys, &mut r), random_siegel(&sys, &mut r));
        let zc = sys.conjugate(&q.z).unwrap();
        let arg = (&p.z - zc) * c(0.0, -0.5) - sys.phi(&p.zeta, &q.zeta).unwrap();
        let want = sys.det_poly(&arg).unwrap().powi(-3);
        let got = ctx.cauchy_szego(&p, &q).unwrap();
        assert!((got - want).norm() < 1e-10 * want.norm());
    }
}

#[test]
fn kernel_pole_is_reported() {
    let ctx = KernelContext::unnormalized(System::half_line());
    let b = half_line_boundary(0.5);
    let q = b.embed(&ctx.system);
    assert!(matches!(ctx.cauchy_szego(&q, &q), Err(siegel::Error::KernelSingularity(_))));
}

#[test]
fn schwarz_at_the_base_point_is_the_poisson_kernel() {
    let mut r = rng(4);
    for kind in [Kind::HalfLine, Kind::Matrix { p: 1, q: 2 }, Kind::Spin { dim_h: 1 }, Kind::Matrix { p: 2, q: 2 }] {
        let sys = System::new(kind).unwrap();
        let ctx = KernelContext::with_c_norm(sys.clone(), 0.37);
        let base = SiegelPoint::base(&sys);
        for _ in 0..20 {
            let b = random_boundary(&sys, &mut r);
            let s = ctx.schwarz(&base, &b).unwrap();
            let p = ctx.poisson(&base, &b).unwrap();
            assert!((s - c(p, 0.0)).norm() < 1e-12 * p.max(1e-300), "{:?}", sys.kind());
        }
    }
}

#[test]
fn schwarz_real_part_and_holomorphy() {
    let sys = System::spin(1).unwrap();
    let ctx = KernelContext::with_c_norm(sys.clone(), 1.0);
    let mut r = rng(5);
    let b = random_boundary(&sys, &mut r);
    let p = random_siegel(&sys, &mut r);
    // complex derivative along a direction is independent of the phase of the step
    let d = random_real(&sys, &mut r);
    let h = 1e-5;
    let f = |w: C64| ctx.schwarz(&p.shifted(&d, w), &b).unwrap();
    let d1 = (f(c(h, 0.0)) - f(c(-h, 0.0))) / (2.0 * h);
    let d2 = (f(c(0.0, h)) - f(c(0.0, -h))) / c(0.0, 2.0 * h);
    assert!((d1 - d2).norm() < 1e-6 * d1.norm().max(1.0));
}

#[test]
fn bounded_kernel_values() {
    let mut r = rng(6);
    for sys in [System::polydisc(2).unwrap(), System::matrix(1, 2).unwrap(), System::matrix(2, 3).unwrap()] {
        for _ in 0..10 {
            let b = random_boundary(&sys, &mut r);
            let zeta = sys.boundary_to_bounded(&b).unwrap();
            assert!((cauchy_bounded(&sys, &sys.zero(), &zeta).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
            assert!((poisson_bounded(&sys, &sys.zero(), &zeta).unwrap() - 1.0).abs() < 1e-15);
        }
    }
    let ball = System::matrix(1, 2).unwrap();
    let w = ball.element(&[c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
    let z = ball.element(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    let ip = w[0] * z[0].conj() + w[1] * z[1].conj();
    let want = (c(1.0, 0.0) - ip).powi(-2);
    assert!((cauchy_bounded(&ball, &w, &z).unwrap() - want).norm() < 1e-14);
    assert!(matches!(cauchy_bounded(&System::spin(1).unwrap(), &Element::zeros(3), &Element::zeros(3)), Err(siegel::Error::NotImplemented(_))));

    let disc = System::half_line();
    let w = disc.element(&[c(0.2, -0.5)]).unwrap();
    let mu: Vec<(Element, f64)> = (0..64)
        .map(|k| (disc.element(&[C64::from_polar(1.0, 2.0 * PI * k as f64 / 64.0)]).unwrap(), 1.0 / 64.0))
        .collect();
    let hz = herglotz_bounded(&disc, &mu, &w).unwrap();
    assert!((hz - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn transfer_identity_holds() {
    let mut r = rng(7);
    let cases: Vec<(Kind, f64)> = vec![
        (Kind::HalfLine, 1e-12),
        (Kind::Product { factors: vec![Kind::HalfLine, Kind::HalfLine] }, 1e-10),
        (Kind::Matrix { p: 1, q: 2 }, 1e-10),
        (Kind::Matrix { p: 1, q: 3 }, 1e-10),
        (Kind::Matrix { p: 2, q: 2 }, 1e-9),
        (Kind::Matrix { p: 2, q: 3 }, 1e-9),
        (Kind::Product { factors: vec![Kind::Matrix { p: 1, q: 2 }, Kind::HalfLine] }, 1e-10),
    ];
    for (kind, tol) in cases {
        let sys = System::new(kind).unwrap();
        let ctx = KernelContext::with_c_norm(sys.clone(), 0.25);
        let base = SiegelPoint::base(&sys);
        for _ in 0..50 {
            let p = random_siegel(&sys, &mut r);
            let b = random_boundary(&sys, &mut r);
            assert!(ctx.transfer_identity_residual(&p, &b).unwrap() < tol, "{:?}", sys.kind());
            assert!(ctx.transfer_identity_residual(&base, &b).unwrap() < 1e-12);
        }
    }
    let ctx = half_line_ctx();
    let res = ctx.transfer_identity_residual(&half_line_point(c(0.0, 2.0)), &half_line_boundary(1.0)).unwrap();
    assert!(res < 1e-12);
}

#[test]
fn normalization_constants() {
    let quad = QuadratureSpec::default();
    let m12 = KernelContext::new(System::matrix(1, 2).unwrap(), &quad).unwrap();
    assert!((m12.c_norm * 4.0 * PI * PI - 1.0).abs() < 1e-2, "{}", m12.c_norm);
    let s1 = KernelContext::new(System::spin(1).unwrap(), &quad).unwrap();
    assert!((s1.c_norm * 64.0 * PI * PI - 1.0).abs() < 1e-2, "{}", s1.c_norm);
    let prod = KernelContext::new(System::product(vec![Kind::HalfLine, Kind::HalfLine]).unwrap(), &quad).unwrap();
    assert!((prod.c_norm - 1.0 / (16.0 * PI * PI)).abs() < 1e-16);
    assert_eq!(m12.s_vector, vec![2.0]);
    assert_eq!(s1.s_vector, vec![1.5]);
    assert_eq!((m12.n, m12.m, m12.r), (1, 1, 1));

    let h = half_line_ctx();
    let p = SiegelPoint::base(&h.system);
    let pk = h.poisson_at(&p).unwrap();
    let total = tensor_integrate(&[quad.rule().unwrap()], |x| pk.eval_chart(x).unwrap());
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}

#[test]
fn weyl_and_sphere_reductions_agree_on_hermitian_two_by_two() {
    // Herm(2) with its determinant is the spin factor with d = 2, and both
    // kernels carry exponent 2, so the two reductions must give one constant.
    let quad = QuadratureSpec::default();
    let m = KernelContext::new(System::matrix(2, 2).unwrap(), &quad).unwrap();
    let s = KernelContext::new(System::spin(2).unwrap(), &quad).unwrap();
    assert_eq!(m.s_vector, s.s_vector);
    assert!((m.c_norm / s.c_norm - 1.0).abs() < 1e-6, "{} vs {}", m.c_norm, s.c_norm);
    // the Weyl integral factors: 2·(π/2)² for the Vandermonde times 256
    assert!((m.c_norm * 64.0 * PI.powi(3) - 1.0).abs() < 1e-6, "{}", m.c_norm);
}

#[test]
fn poisson_is_a_probability_density_off_the_base_point() {
    let quad = QuadratureSpec::default();
    let sys = System::matrix(1, 2).unwrap();
    let ctx = KernelContext::new(sys.clone(), &quad).unwrap();
    let p = SiegelPoint::new(&sys, sys.element(&[c(0.0, 0.0), c(0.3, -0.2)]).unwrap(), sys.element(&[c(0.4, 0.6), c(0.0, 0.0)]).unwrap()).unwrap();
    let pk = ctx.poisson_at(&p).unwrap();
    let rule = quad.rule().unwrap();
    let total = tensor_integrate(&[rule.clone(), rule.clone(), rule], |x| pk.eval_chart(x).unwrap());
    assert!((total - 1.0).abs() < 1e-2, "{total}");
}

#[test]
fn kernel_comparability() {
    let mut r = rng(9);
    for kind in [Kind::Spin { dim_h: 1 }, Kind::Matrix { p: 1, q: 2 }, Kind::Matrix { p: 2, q: 2 }] {
        let sys = System::new(kind).unwrap();
        let ctx = KernelContext::with_c_norm(sys.clone(), 1.0);
        let base = SiegelPoint::base(&sys);
        let p = random_siegel(&sys, &mut r);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..10_000 {
            let b = random_boundary(&sys, &mut r);
            let b = sys.boundary_from_chart(&sys.boundary_to_chart(&b).iter().map(|v| v * 50.0 * r.random_range(0.0..1.0f64).powi(3)).collect::<Vec<_>>()).unwrap();
            let q = ctx.poisson(&p, &b).unwrap() / ctx.poisson(&base, &b).unwrap();
            lo = lo.min(q);
            hi = hi.max(q);
        }
        assert!(lo > 0.0 && hi.is_finite(), "{:?}: [{lo}, {hi}]", sys.kind());
    }
}
