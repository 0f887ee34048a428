use std::f64::consts::PI;

use siegel::geometry::SiegelPoint;
use siegel::pluriharmonic::{levi_form, linearity_check, spin_counterexample, spin_probes};
use siegel::quadrature::QuadratureSpec;
use siegel::worked::{spin_f, spin_g};
use siegel::{System, C64};

fn half_line_point(w: C64) -> (System, SiegelPoint) {
    let sys = System::half_line();
    let p = SiegelPoint::tube(&sys, sys.element(&[w]).unwrap()).unwrap();
    (sys, p)
}

#[test]
fn levi_of_squared_modulus_is_one() {
    let (sys, p) = half_line_point(C64::new(0.3, 1.0));
    let r = levi_form(&sys, |q: &SiegelPoint| q.z[0].norm_sqr(), &p, None).unwrap();
    assert!((r.entry(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-8);
}

#[test]
fn levi_of_real_part_of_square_vanishes() {
    let (sys, p) = half_line_point(C64::new(-0.4, 0.7));
    let r = levi_form(&sys, |q: &SiegelPoint| (q.z[0] * q.z[0]).re, &p, None).unwrap();
    assert!(r.max_abs < 1e-8);
}

#[test]
fn levi_of_real_parts_of_spin_functions_vanish() {
    let sys = System::spin(1).unwrap();
    for p in spin_probes(&sys).unwrap() {
        for u in [spin_f as fn(&[C64]) -> C64, spin_g] {
            let r = levi_form(&sys, |q: &SiegelPoint| u(q.z.as_slice()).re, &p, None).unwrap();
            assert!(r.max_abs < 1e-8, "{}", r.max_abs);
        }
    }
}

#[test]
fn levi_detects_mixed_terms_and_stays_hermitian() {
    let sys = System::polydisc(2).unwrap();
    let p = SiegelPoint::tube(&sys, sys.element(&[C64::new(0.2, 0.9), C64::new(-0.3, 1.4)]).unwrap()).unwrap();
    // |z₁ + 2z₂|² has Levi matrix [[1, 2], [2, 4]]
    let u = |q: &SiegelPoint| (q.z[0] + q.z[1] * 2.0).norm_sqr();
    let r = levi_form(&sys, u, &p, Some(1e-3)).unwrap();
    let want = [[1.0, 2.0], [2.0, 4.0]];
    for a in 0..2 {
        for b in 0..2 {
            assert!((r.entry(a, b) - C64::new(want[a][b], 0.0)).norm() < 1e-8);
        }
    }
    // Im(z₁ z̄₂) has Levi matrix [[0, −i/2], [i/2, 0]]
    let v = |q: &SiegelPoint| (q.z[0] * q.z[1].conj()).im;
    let r = levi_form(&sys, v, &p, Some(1e-3)).unwrap();
    assert!((r.entry(0, 1) - C64::new(0.0, -0.5)).norm() < 1e-8, "{}", r.entry(0, 1));
    assert!(r.hermitian_defect() < 10.0 * r.fd_step * r.fd_step);
}

#[test]
fn levi_of_holomorphic_real_part_on_siegel_domain_with_e_part() {
    let sys = System::matrix(1, 2).unwrap();
    let zeta = sys.e_from_real(&[0.1, -0.2]).unwrap();
    let z = sys.f_from_real(&[0.3]).unwrap() + sys.f_from_real(&[1.0]).unwrap() * C64::new(0.0, 1.0);
    let p = SiegelPoint::new(&sys, zeta, z).unwrap();
    assert!(sys.in_domain(&p));
    let c0 = sys.complex_chart(&p);
    assert_eq!(c0.len(), 2);
    let u = |q: &SiegelPoint| {
        let c = sys.complex_chart(q);
        (c[0] * c[0] * c[1] + (c[1] * C64::new(0.0, 1.0)).exp()).re
    };
    assert!(levi_form(&sys, u, &p, None).unwrap().max_abs < 1e-8);
}

#[test]
fn stencil_shrinks_near_the_boundary() {
    let (sys, p) = half_line_point(C64::new(0.0, 1e-3));
    let r = levi_form(&sys, |q: &SiegelPoint| q.z[0].norm_sqr(), &p, Some(0.1)).unwrap();
    assert!(r.fd_step < 1e-3);
    assert!((r.entry(0, 0).re - 1.0).abs() < 1e-6);
}

#[test]
fn linear_fit_of_height_coordinate() {
    let (sys, _) = half_line_point(C64::new(0.0, 1.0));
    let probes: Vec<SiegelPoint> = (0..8).map(|k| half_line_point(C64::new(k as f64 - 4.0, 0.5 + 0.3 * k as f64)).1).collect();
    let r = linearity_check(&sys, |q: &SiegelPoint| q.z[0].im, &probes, 1e-9, 1).unwrap();
    assert!(r.linear);
    assert!((r.lambda[0] - 1.0).abs() < 1e-12);
    assert_eq!(r.defect, 0.0);
    let r = linearity_check(&sys, |q: &SiegelPoint| q.z[0].im.powi(2), &probes, 1e-2, 1).unwrap();
    assert!(!r.linear, "{}", r.residual);
}

#[test]
fn linear_fit_reports_e_defect() {
    let sys = System::matrix(1, 2).unwrap();
    let probes: Vec<SiegelPoint> = (0..6)
        .map(|k| {
            let zeta = sys.zero();
            let z = sys.f_from_real(&[0.1 * k as f64]).unwrap() + sys.f_from_real(&[0.5 + 0.2 * k as f64]).unwrap() * C64::new(0.0, 1.0);
            SiegelPoint::new(&sys, zeta, z).unwrap()
        })
        .collect();
    let g = |q: &SiegelPoint| 2.0 * sys.f_to_real(&sys.im_part(&q.z))[0];
    let rep = linearity_check(&sys, g, &probes, 1e-9, 5).unwrap();
    assert!(rep.linear);
    assert!(rep.defect > 0.1, "λ in the cone of a non-tube domain cannot annihilate Φ(E)");
    assert!(rep.min_eigenvalue > 0.0);
}

#[test]
fn linear_fit_separates_zero_from_curved_spin_function() {
    let sys = System::spin(1).unwrap();
    let probes = spin_probes(&sys).unwrap();
    let more: Vec<SiegelPoint> = (0..6)
        .map(|k| {
            let t = k as f64;
            let z = [C64::new(0.1 * t, 1.0 + 0.1 * t), C64::new(-0.2 * t, 1.5), C64::new(0.05 * t, 0.2 - 0.05 * t)];
            SiegelPoint::tube(&sys, sys.element(&z).unwrap()).unwrap()
        })
        .chain(probes)
        .collect();
    let zero = linearity_check(&sys, |_: &SiegelPoint| 0.0, &more, 1e-9, 2).unwrap();
    assert!(zero.linear && zero.lambda.iter().all(|l| l.abs() < 1e-12));
    let curved = linearity_check(&sys, |q: &SiegelPoint| spin_g(q.z.as_slice()).re, &more, 1e-3, 2).unwrap();
    assert!(!curved.linear);
}

#[test]
fn spin_dominated_measure_is_not_pluriharmonic() {
    let rep = spin_counterexample(&QuadratureSpec::default(), 24).unwrap();
    assert!((rep.slope - 0.5).abs() < 1e-3, "slope {}", rep.slope);
    assert!(rep.noise_floor < 1e-8, "floor {}", rep.noise_floor);
    assert!(rep.signal > 10.0 * rep.noise_floor.max(1e-12) && rep.signal > 1e-3, "signal {}", rep.signal);
    let origin = &rep.null_masses[0];
    assert!((origin.mass - PI / 2.0).abs() < 1e-3, "{:?}", origin);
    let along_a: Vec<f64> = rep.null_masses.iter().filter(|m| m.c == 0.0 && m.a > 0.0).map(|m| m.mass).collect();
    let along_c: Vec<f64> = rep.null_masses.iter().filter(|m| m.a == 0.0 && m.c > 0.0).map(|m| m.mass).collect();
    let diagonal: Vec<f64> = rep.null_masses.iter().filter(|m| m.a > 0.0 && m.c > 0.0).map(|m| m.mass).collect();
    assert!(along_a.iter().all(|m| m.abs() < 1e-3), "{along_a:?}");
    assert!(along_c.iter().all(|m| (m - PI / 2.0).abs() < 1e-2), "{along_c:?}");
    assert!(diagonal.iter().all(|m| (m - PI / 4.0).abs() < 1e-2), "{diagonal:?}");
    assert!(rep.null_jump > 1.0);
}
