use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel::geometry::SiegelPoint;
use siegel::measures::{disintegrate, lambda_extract, BaseGrid};
use siegel::nevanlinna::nevanlinna_extract_1d;
use siegel::pluriharmonic::spin_counterexample;
use siegel::worked::{bidisc_product_quotient, curve_limits, spin_f, spin_fiber_measure};
use siegel::{System, C64};

use crate::config::{Example, RunConfig};
use crate::output::{Checks, Report};

/// Curve parameter close enough to the boundary that both limits are reached to 1e−6.
const CURVE_T: f64 = 1.0 - 1.0 / 1_048_576.0;

fn params(cfg: &RunConfig, default: [f64; 2]) -> Result<[f64; 2], String> {
    match cfg.params.as_deref() {
        None => Ok(default),
        Some([x, y]) => Ok([*x, *y]),
        Some(p) => Err(format!("expected two parameters, got {}", p.len())),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, String> {
    let example = cfg.example.ok_or("reproduce needs an example")?;
    let mut checks = Checks::new();
    match example {
        Example::Ex6 => bidisc_slope(cfg, &mut checks)?,
        Example::Ex7 => curve_dependence(cfg, &mut checks)?,
        Example::Ex1 => spin_fiber(cfg, &mut checks)?,
        Example::Ex1bis => counterexample(cfg, &mut checks),
    }
    Ok(checks.finish())
}

fn bidisc_slope(cfg: &RunConfig, checks: &mut Checks) -> Result<(), String> {
    let [h1, h2] = params(cfg, [1.0, 2.0])?;
    if !(h1 > 0.0 && h2 > 0.0) {
        return Err("ex6 needs h1, h2 > 0".into());
    }
    let sys = System::polydisc(2).map_err(|e| e.to_string())?;
    let h = sys.element_re(&[h1, h2]).map_err(|e| e.to_string())?;
    let f = |p: &SiegelPoint| bidisc_product_quotient(p.z[0], p.z[1]);
    let base = BaseGrid::uniform(&sys, &h, None, 1).map_err(|e| e.to_string())?;
    match disintegrate(&sys, f, &h, &base, &cfg.quad) {
        Ok((_, a)) => checks.compare("ex6", "slope along h", a, h1 * h2 / (h1 + h2), 1e-3),
        Err(e) => checks.error("ex6", "slope along h", &e.to_string()),
    }
    let lam = lambda_extract(&sys, f);
    for (k, l) in lam.iter().enumerate() {
        checks.compare("ex6", &format!("linear part {k}"), *l, 0.0, 1e-6);
    }
    Ok(())
}

fn curve_dependence(cfg: &RunConfig, checks: &mut Checks) -> Result<(), String> {
    let [a, b] = params(cfg, [1.0, 3.0])?;
    if !(a > 0.0 && b > 0.0) {
        return Err("ex7 needs a, b > 0".into());
    }
    match curve_limits(a, b, CURVE_T) {
        Ok((diag, curve, _)) => {
            checks.residual("ex7", "limit along the diagonal", diag.re, 0.5, (diag - C64::new(0.5, 0.0)).norm(), 1e-6);
            let want = a / (a + b);
            checks.residual("ex7", "limit along the curve", curve.re, want, (curve - C64::new(want, 0.0)).norm(), 1e-6);
        }
        Err(e) => checks.error("ex7", "limits", &e.to_string()),
    }
    Ok(())
}

fn spin_fiber(cfg: &RunConfig, checks: &mut Checks) -> Result<(), String> {
    let [a, c] = params(cfg, [1.0, 0.0])?;
    let exact = spin_fiber_measure(a, &[c]);
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let w = C64::new(r.random_range(-3.0..3.0), r.random_range(0.05..3.0));
        let lhs = exact.schwarz(w);
        let rhs = spin_f(&[w + a, w - a, C64::new(c, 0.0)]);
        worst = worst.max((lhs - rhs).norm());
    }
    checks.residual("ex1", "Schwarz identity of the closed-form fiber measure", worst, 0.0, worst, 1e-10);
    let u = |w: C64| spin_f(&[w + a, w - a, C64::new(c, 0.0)]).re;
    let got = match nevanlinna_extract_1d(u, &cfg.quad) {
        Ok(d) => d,
        Err(e) => {
            checks.error("ex1", "extraction", &e.to_string());
            return Ok(());
        }
    };
    checks.compare("ex1", "extracted slope", got.slope_a, 0.0, 1e-3);
    let spacing = 2.0 * cfg.quad.radius / cfg.quad.nodes as f64;
    for (k, &(t, m)) in exact.atoms.iter().enumerate() {
        match got.atoms.iter().min_by(|x, y| (x.0 - t).abs().total_cmp(&(y.0 - t).abs())) {
            Some(&(gt, gm)) => {
                checks.compare("ex1", &format!("atom {k} location"), gt, t, spacing);
                checks.compare("ex1", &format!("atom {k} mass"), gm, m, 1e-2);
            }
            None => checks.error("ex1", &format!("atom {k}"), "no atom extracted"),
        }
    }
    let total: f64 = got.atoms.iter().map(|x| x.1).sum();
    checks.compare("ex1", "total atomic mass", total, 0.5 * PI, 1e-2);
    Ok(())
}

fn counterexample(cfg: &RunConfig, checks: &mut Checks) {
    let rep = match spin_counterexample(&cfg.quad, 24) {
        Ok(r) => r,
        Err(e) => return checks.error("ex1bis", "counterexample", &e.to_string()),
    };
    checks.compare("ex1bis", "slope of the involuted function", rep.slope, 0.5, 1e-3);
    checks.residual("ex1bis", "Levi noise floor on the holomorphic part", rep.noise_floor, 0.0, rep.noise_floor, 1e-8);
    let ratio = rep.signal / rep.noise_floor.max(f64::MIN_POSITIVE);
    // passes when the Levi signal exceeds ten times the floor
    checks.residual("ex1bis", "Levi signal over floor, passing above 10", ratio, 10.0, 10.0 / ratio, 1.0);
    for m in &rep.null_masses {
        let want = if m.a == 0.0 && m.c == 0.0 {
            0.5 * PI
        } else if m.c == 0.0 {
            0.0
        } else if m.a == 0.0 {
            0.5 * PI
        } else {
            0.25 * PI
        };
        checks.compare("ex1bis", &format!("null-set mass at ({:.4}, {:.4})", m.a, m.c), m.mass, want, 1e-2);
    }
    checks.residual("ex1bis", "null-set mass jump at the origin, passing above 1", rep.null_jump, 0.5 * PI, 1.0 / rep.null_jump.max(f64::MIN_POSITIVE), 1.0);
}
