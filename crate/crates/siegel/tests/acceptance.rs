//! End-to-end acceptance run. Prints one line per criterion and exits nonzero
//! if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use rand::Rng;
use siegel::clark::*;
use siegel::geometry::SiegelPoint;
use siegel::jordan::{Element, Kind, System};
use siegel::kernels::KernelContext;
use siegel::measures::{disintegrate, BaseGrid};
use siegel::nevanlinna::NevanlinnaData1D;
use siegel::pluriharmonic::spin_counterexample;
use siegel::quadrature::{tensor_integrate, QuadratureSpec, Rule1D};
use siegel::worked::{bidisc_product_quotient, bidisc_slope, curve_limits, spin_f, spin_fiber_measure};
use siegel::C64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn worst(acc: &mut f64, v: f64) {
    if !(v <= *acc) {
        *acc = v;
    }
}

fn jordan_kinds() -> Vec<Kind> {
    vec![
        Kind::HalfLine,
        Kind::Matrix { p: 1, q: 1 },
        Kind::Matrix { p: 2, q: 3 },
        Kind::Matrix { p: 3, q: 3 },
        Kind::Matrix { p: 3, q: 5 },
        Kind::Spin { dim_h: 1 },
        Kind::Spin { dim_h: 2 },
        Kind::Spin { dim_h: 4 },
        Kind::Product { factors: vec![Kind::HalfLine, Kind::HalfLine] },
        Kind::Product { factors: vec![Kind::Spin { dim_h: 3 }, Kind::Matrix { p: 2, q: 2 }, Kind::HalfLine] },
    ]
}

fn jordan_axioms() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let (mut triple, mut assoc) = (0.0f64, 0.0f64);
    for kind in jordan_kinds() {
        let sys = System::new(kind).unwrap();
        for _ in 0..200 {
            let (a, b, x, y) = (random_element(&sys, &mut r), random_element(&sys, &mut r), random_element(&sys, &mut r), random_element(&sys, &mut r));
            let dab = sys.d_operator(&a, &b).unwrap();
            let dxy = sys.d_operator(&x, &y).unwrap();
            let comm = &dab.matrix * &dxy.matrix - &dxy.matrix * &dab.matrix;
            let l = sys.d_operator(&dab.apply(&x), &y).unwrap();
            let rr = sys.d_operator(&x, &sys.d_operator(&b, &a).unwrap().apply(&y)).unwrap();
            worst(&mut triple, (comm - (l.matrix - rr.matrix)).iter().map(|v| v.norm()).fold(0.0, f64::max));
            let lhs = sys.inner_product(&sys.triple_product(&a, &b, &x).unwrap(), &y).unwrap();
            let rhs = sys.inner_product(&a, &sys.triple_product(&b, &x, &y).unwrap()).unwrap();
            worst(&mut assoc, (lhs - rhs).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(triple < 1e-10 && assoc < 1e-10 && secs < 10.0, format!("triple {triple:.2e}, associativity {assoc:.2e}, {secs:.2} s"))
}

fn spectral_and_peirce() -> Outcome {
    let mut r = rng(102);
    let (mut recon, mut idem, mut eig) = (0.0f64, 0.0f64, 0.0f64);
    for kind in jordan_kinds() {
        let sys = System::new(kind).unwrap();
        for _ in 0..50 {
            let x = random_element(&sys, &mut r);
            let sd = sys.spectral_decomposition(&x).unwrap();
            worst(&mut recon, max_abs(&(sd.reconstruct(sys.dim()) - &x)));
            let mut e = sys.zero();
            for (k, (_, ek)) in sd.pairs.iter().enumerate() {
                if k % 2 == 0 {
                    e += ek;
                }
            }
            let (p1, ph, p0) = sys.peirce_projectors(&e).unwrap();
            let d = sys.d_operator(&e, &e).unwrap();
            for (p, alpha) in [(&p1, 1.0), (&ph, 0.5), (&p0, 0.0)] {
                let m = &p.matrix * &p.matrix - &p.matrix;
                worst(&mut idem, m.iter().map(|v| v.norm()).fold(0.0, f64::max));
                let m = &d.matrix * &p.matrix - &p.matrix * c(alpha, 0.0);
                worst(&mut eig, m.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
            let sum = &p1.matrix + &ph.matrix + &p0.matrix - DMatrix::<C64>::identity(sys.dim(), sys.dim());
            worst(&mut idem, sum.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
    }
    outcome(recon < 1e-9 && idem < 1e-10 && eig < 1e-10, format!("reconstruction {recon:.2e}, idempotence {idem:.2e}, eigenrelation {eig:.2e}"))
}

fn cayley() -> Outcome {
    let mut r = rng(103);
    let (mut round, mut base, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for sys in systems() {
        worst(&mut base, max_abs(&sys.to_bounded(&SiegelPoint::base(&sys)).unwrap().w));
        for _ in 0..1000 {
            let p = random_siegel(&sys, &mut r);
            let back = sys.to_unbounded(&sys.to_bounded(&p).unwrap()).unwrap();
            worst(&mut round, max_abs(&(&back.z - &p.z)).max(max_abs(&(&back.zeta - &p.zeta))));
            let jj = sys.involution(&sys.involution(&p).unwrap()).unwrap();
            worst(&mut inv, max_abs(&(&jj.z - &p.z)).max(max_abs(&(&jj.zeta - &p.zeta))));
        }
    }
    outcome(round < 1e-10 && base < 1e-12 && inv < 1e-10, format!("roundtrip {round:.2e}, base point {base:.2e}, involution {inv:.2e}"))
}

fn poisson_mass(sys: &System, p: &SiegelPoint, quad: &QuadratureSpec) -> f64 {
    let ctx = KernelContext::new(sys.clone(), quad).unwrap();
    let pk = ctx.poisson_at(p).unwrap();
    let rules = vec![quad.rule().unwrap(); sys.chart_dim()];
    tensor_integrate(&rules, |x| pk.eval_chart(x).unwrap())
}

/// Spin(1) chart (a, b, c) in eigenvalue form: a, b = α ± ρ cos θ, c = ρ sin θ
/// with α ± ρ = λ₁,₂, so da db dc = |ρ| dλ₁ dλ₂ dθ. The whole (λ₁, λ₂) plane
/// covers the chart twice.
fn spin_poisson_mass(p: &SiegelPoint, quad: &QuadratureSpec) -> f64 {
    let sys = System::spin(1).unwrap();
    let ctx = KernelContext::new(sys, quad).unwrap();
    let pk = ctx.poisson_at(p).unwrap();
    let rule = quad.rule().unwrap();
    let angle = Rule1D::midpoint(0.0, 2.0 * PI, 64);
    let f = |x: &[f64]| {
        let (alpha, rho) = (0.5 * (x[0] + x[1]), 0.5 * (x[0] - x[1]));
        let (s, co) = x[2].sin_cos();
        rho.abs() * pk.eval_chart(&[alpha + rho * co, alpha - rho * co, rho * s]).unwrap()
    };
    0.5 * tensor_integrate(&[rule.clone(), rule, angle], f)
}

fn kernel_normalization() -> Outcome {
    let start = Instant::now();
    let quad = QuadratureSpec::default();
    let h = System::half_line();
    let half = (poisson_mass(&h, &SiegelPoint::base(&h), &quad) - 1.0).abs();
    let s = System::spin(1).unwrap();
    let ps = SiegelPoint::tube(&s, s.element(&[c(0.3, 1.2), c(-0.2, 0.9), c(0.1, 0.2)]).unwrap()).unwrap();
    let spin = (spin_poisson_mass(&ps, &quad) - 1.0).abs().max((spin_poisson_mass(&SiegelPoint::base(&s), &quad) - 1.0).abs());
    let m = System::matrix(1, 2).unwrap();
    let pm = SiegelPoint::new(&m, m.element(&[c(0.0, 0.0), c(0.3, -0.2)]).unwrap(), m.element(&[c(0.4, 0.6), c(0.0, 0.0)]).unwrap()).unwrap();
    let mat = (poisson_mass(&m, &pm, &quad) - 1.0).abs();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        half < 1e-6 && spin < 1e-2 && mat < 1e-2 && secs < 60.0,
        format!("half-line {half:.2e}, Spin(1) {spin:.2e}, Matrix(1,2) {mat:.2e}, {secs:.1} s"),
    )
}

fn transfer_identity() -> Outcome {
    let mut r = rng(105);
    let quad = QuadratureSpec::default();
    let mut res = Vec::new();
    for (sys, tol) in [(System::half_line(), 1e-10), (System::polydisc(2).unwrap(), 1e-10), (System::matrix(1, 2).unwrap(), 1e-6)] {
        let ctx = KernelContext::new(sys.clone(), &quad).unwrap();
        let mut w = 0.0f64;
        for _ in 0..100 {
            let p = random_siegel(&sys, &mut r);
            let b = random_boundary(&sys, &mut r);
            worst(&mut w, ctx.transfer_identity_residual(&p, &b).unwrap());
        }
        res.push((w, tol));
    }
    let pass = res.iter().all(|(w, t)| w < t);
    outcome(pass, format!("half-line {:.2e}, bidisc {:.2e}, Matrix(1,2) {:.2e}", res[0].0, res[1].0, res[2].0))
}

fn spin_schwarz_identity() -> Outcome {
    let mut r = rng(106);
    let mut w_res = 0.0f64;
    for _ in 0..100 {
        let a = r.random_range(-2.0..2.0);
        let cc = r.random_range(-2.0..2.0);
        let w = c(r.random_range(-3.0..3.0), r.random_range(0.05..3.0));
        let lhs = spin_fiber_measure(a, &[cc]).schwarz(w);
        let rhs = spin_f(&[w + a, w - a, c(cc, 0.0)]);
        worst(&mut w_res, (lhs - rhs).norm());
    }
    outcome(w_res < 1e-10, format!("worst residual {w_res:.2e} over 100 points"))
}

fn bidisc_slopes() -> Outcome {
    let mut r = rng(107);
    let mut rel = 0.0f64;
    for _ in 0..5 {
        let (h1, h2) = (r.random_range(0.2..3.0), r.random_range(0.2..3.0));
        let sys = System::polydisc(2).unwrap();
        let h = sys.element_re(&[h1, h2]).unwrap();
        let f = |p: &SiegelPoint| bidisc_product_quotient(p.z[0], p.z[1]);
        let (_, a) = disintegrate(&sys, f, &h, &BaseGrid::uniform(&sys, &h, None, 1).unwrap(), &QuadratureSpec::default()).unwrap();
        let want = bidisc_slope(h1, h2);
        worst(&mut rel, (a - want).abs() / want);
    }
    outcome(rel < 1e-3, format!("worst relative slope error {rel:.2e}"))
}

fn curve_dependent_limits() -> Outcome {
    let t = 1.0 - 2f64.powi(-20);
    let mut err = 0.0f64;
    let mut ratio = 0.0f64;
    for (a, b) in [(1.0, 3.0), (1.0, 1.0), (2.0, 1.0), (0.5, 4.0)] {
        let (diag, curve, q) = curve_limits(a, b, t).unwrap();
        worst(&mut err, (diag - c(0.5, 0.0)).norm());
        worst(&mut err, (curve - c(a / (a + b), 0.0)).norm());
        worst(&mut ratio, q);
    }
    outcome(err < 1e-6, format!("worst limit error {err:.2e}, curve-to-diagonal ratio up to {ratio:.3}"))
}

fn spin_counterexample_check() -> Outcome {
    let rep = spin_counterexample(&QuadratureSpec::default(), 24).unwrap();
    let pass = rep.noise_floor < 1e-8 && rep.signal > 10.0 * rep.noise_floor && rep.null_jump > 1.0;
    outcome(pass, format!("Levi signal {:.3e}, floor {:.2e}, null-set jump {:.3}", rep.signal, rep.noise_floor, rep.null_jump))
}

fn synthetic_extraction() -> Outcome {
    let mut r = rng(110);
    let sys = System::half_line();
    let h = sys.element_re(&[1.0]).unwrap();
    let (mut slope_err, mut mass_err, mut dens_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut missing = 0;
    for _ in 0..20 {
        let slope = r.random_range(0.0..2.0);
        let n_atoms = r.random_range(0..3usize);
        let atoms: Vec<(f64, f64)> = (0..n_atoms).map(|k| (-4.0 + 5.0 * k as f64 + r.random_range(0.0..3.0), r.random_range(0.2..2.0))).collect();
        let amp = r.random_range(0.0..1.0);
        let centre = r.random_range(-2.0..2.0);
        let width = r.random_range(0.5..2.0);
        let nodes: Vec<f64> = (0..=400).map(|k| -8.0 + 0.04 * k as f64).collect();
        let values: Vec<f64> = nodes.iter().map(|t| amp * (-((t - centre) / width).powi(2)).exp()).collect();
        let truth = NevanlinnaData1D { slope_a: slope, atoms: atoms.clone(), nodes, values, tails: [0.0; 2] };
        let f = |p: &SiegelPoint| truth.poisson(p.z[0]);
        let (mu, a) = disintegrate(&sys, f, &h, &BaseGrid::point(), &QuadratureSpec::default()).unwrap();
        let got = &mu.fibers[0];
        worst(&mut slope_err, (a - slope).abs());
        if got.atoms.len() != atoms.len() {
            missing += 1;
            continue;
        }
        for (g, w) in got.atoms.iter().zip(&atoms) {
            worst(&mut mass_err, (g.1 - w.1).abs());
        }
        for (t, v) in got.nodes.iter().zip(&got.values) {
            worst(&mut dens_err, (v - truth.density_at(*t)).abs());
        }
    }
    outcome(
        missing == 0 && slope_err < 1e-3 && mass_err < 1e-2 && dens_err < 5e-2,
        format!("slope {slope_err:.2e}, atom mass {mass_err:.2e}, density sup {dens_err:.2e}, atom-count mismatches {missing}"),
    )
}

fn exp_iw(w: C64) -> C64 {
    (c(0.0, 1.0) * w).exp()
}

fn cayley_map(w: C64) -> C64 {
    (w - c(0.0, 1.0)) / (w + c(0.0, 1.0))
}

fn periodic_quad() -> QuadratureSpec {
    QuadratureSpec { radius: 21.0 * PI, nodes: 1024, ..QuadratureSpec::default() }
}

fn clark_exponential() -> Outcome {
    let d = clark_1d(exp_iw, c(1.0, 0.0), &periodic_quad()).unwrap();
    let (mut loc, mut mass) = (0.0f64, 0.0f64);
    for &(t, m) in &d.atoms {
        worst(&mut loc, (t - 2.0 * PI * (t / (2.0 * PI)).round()).abs());
        worst(&mut mass, (m - 2.0 * PI).abs());
    }
    let mut r = rng(111);
    let mut pois = 0.0f64;
    for _ in 0..50 {
        let w = c(r.random_range(-15.0..15.0), r.random_range(0.1..3.0));
        worst(&mut pois, (d.poisson(w) - clark_weight(exp_iw(w), c(1.0, 0.0))).abs());
    }
    let count_ok = d.atoms.len() == 21;
    outcome(
        count_ok && loc < 1e-3 && mass < 1e-3 && pois < 1e-3,
        format!("{} atoms, location {loc:.2e}, mass {mass:.2e}, Poisson {pois:.2e}", d.atoms.len()),
    )
}

fn probes() -> [C64; 5] {
    [c(0.0, 1.0), c(0.5, 0.3), c(-1.0, 2.0), c(2.0, 0.6), c(-0.3, 0.15)]
}

fn aggregation() -> Outcome {
    let mut w = [0.0f64; 3];
    for p in probes() {
        worst(&mut w[0], aggregate_identity_residual_1d(|_| c(0.0, 0.0), p, &QuadratureSpec::default(), 64).unwrap());
        worst(&mut w[1], aggregate_identity_residual_1d(cayley_map, p, &QuadratureSpec::default(), 64).unwrap());
        worst(&mut w[2], aggregate_identity_residual_1d(exp_iw, p, &periodic_quad(), 64).unwrap());
    }
    outcome(w.iter().all(|v| *v < 1e-2), format!("zero map {:.2e}, Cayley map {:.2e}, exponential {:.2e}", w[0], w[1], w[2]))
}

fn composition() -> Outcome {
    let mut w = 0.0f64;
    for psi in [DiscMap::Identity, DiscMap::square()] {
        for alpha in [c(1.0, 0.0), C64::from_polar(1.0, 0.7), C64::from_polar(1.0, -2.2)] {
            let r = composition_residual_1d(cayley_map, &psi, alpha, c(0.3, 0.8), &QuadratureSpec::default()).unwrap();
            worst(&mut w, r.measure.max(r.slope));
        }
    }
    outcome(w < 1e-2, format!("worst residual {w:.2e}"))
}

fn gram() -> Outcome {
    let pts = [c(0.1, 0.5), c(-1.0, 1.0), c(2.0, 0.7), c(0.0, 2.0)];
    let alpha = C64::from_polar(1.0, 0.4);
    let mu = clark_1d(exp_iw, alpha, &periodic_quad()).unwrap();
    let res = gram_residual_1d(exp_iw, alpha, &mu, &pts);
    outcome(res < 1e-2, format!("4x4 Gram residual {res:.2e}"))
}

fn sample_in_region(sys: &System, e: &Element, k: f64, r: &mut impl Rng) -> Element {
    loop {
        let s = 10f64.powf(r.random_range(-3.0..-0.2));
        let xp = c(1.0, 0.0) - c(s, s * r.random_range(-1.0..1.0));
        let d = random_element(sys, r);
        let scale = r.random_range(0.0..1.0) * k * (1.0 - xp.norm()) / sys.spectral_norm(&d).unwrap();
        let x = e * xp + d * c(scale, 0.0);
        if sys.spectral_norm(&x).unwrap() < 1.0 {
            return x;
        }
    }
}

fn restricted_regions() -> Outcome {
    let mut r = rng(115);
    let sys_list = [System::polydisc(2).unwrap(), System::matrix(1, 2).unwrap(), System::spin(1).unwrap(), System::matrix(2, 2).unwrap()];
    let inside = |sys: &System, x: &Element, k: f64, slack: f64| {
        let n = sys.spectral_norm(x).unwrap();
        sys.angular_gauge(x, sys.e()).unwrap().value < k * (1.0 - n * n) + slack
    };
    let (mut tested, mut violations) = (0usize, 0usize);
    while tested < 10_000 {
        let sys = &sys_list[tested % sys_list.len()];
        let k = r.random_range(0.2..3.0);
        let x = sample_in_region(sys, sys.e(), k, &mut r);
        if !inside(sys, &x, k, 0.0) {
            continue;
        }
        tested += 1;
        if !inside(sys, &sys.projection_device(&x, sys.e()).unwrap(), k, 1e-9) {
            violations += 1;
        }
    }
    let (mut issued, mut cert_violations) = (0usize, 0usize);
    for i in 0..10_000 {
        let sys = &sys_list[i % sys_list.len()];
        let k = r.random_range(0.05..0.95);
        let kp = r.random_range(0.2..5.0);
        let x = sample_in_region(sys, sys.e(), kp, &mut r);
        if let Some(k2) = sys.membership_certificate(&x, sys.e(), k, kp).unwrap() {
            issued += 1;
            if !inside(sys, &x, k2, 1e-9) {
                cert_violations += 1;
            }
        }
    }
    outcome(
        violations == 0 && cert_violations == 0 && issued > 0,
        format!("projection closure {violations} violations in {tested}; certificate {cert_violations} violations in {issued} issued of 10000"),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("Jordan axioms", jordan_axioms),
        ("spectral and Peirce decompositions", spectral_and_peirce),
        ("Cayley transform and involution", cayley),
        ("Poisson kernel normalization", kernel_normalization),
        ("kernel transfer identity", transfer_identity),
        ("spin fiber Schwarz identity", spin_schwarz_identity),
        ("bidisc quotient slopes", bidisc_slopes),
        ("curve-dependent limits in the bidisc", curve_dependent_limits),
        ("spin counterexample", spin_counterexample_check),
        ("extraction against forward Poisson data", synthetic_extraction),
        ("Clark measures of the exponential", clark_exponential),
        ("Clark aggregation", aggregation),
        ("Clark composition", composition),
        ("Clark Gram isometry", gram),
        ("projection device and region certificate", restricted_regions),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {} [{:.1} s]", k + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
