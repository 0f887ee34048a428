use std::f64::consts::PI;

use siegel_web::{clark_value, curve_limits_value, spin_fiber_value};

#[test]
fn clark_of_the_cayley_map() {
    let v = clark_value("cayley", PI).unwrap();
    let atoms = v["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1);
    assert!((atoms[0][1].as_f64().unwrap() - PI).abs() < 1e-6);
    let v = clark_value("cayley", 0.0).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(clark_value("square", 0.0).is_err());
}

#[test]
fn clark_of_the_exponential_has_period_atoms() {
    let v = clark_value("exponential", 0.0).unwrap();
    let atoms = v["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 21);
    assert!(atoms.iter().all(|a| (a[1].as_f64().unwrap() - 2.0 * PI).abs() < 1e-3));
}

#[test]
fn limits_depend_on_the_curve() {
    let v = curve_limits_value(1.0, 3.0, 20).unwrap();
    assert!((v["diagonal"][0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((v["curve"][0].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert!(curve_limits_value(-1.0, 3.0, 20).is_err());
    assert!(curve_limits_value(1.0, 3.0, 0).is_err());
}

#[test]
fn spin_fiber_atoms_match_the_closed_form() {
    let v = spin_fiber_value(1.0, 1.0).unwrap();
    let exact = v["closed_form"].as_array().unwrap();
    let got = v["extracted"].as_array().unwrap();
    assert_eq!(exact.len(), 3);
    assert_eq!(got.len(), 3);
    for (e, g) in exact.iter().zip(got) {
        assert!((e[1].as_f64().unwrap() - g[1].as_f64().unwrap()).abs() < 1e-2);
    }
}
