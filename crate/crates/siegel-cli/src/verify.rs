use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel::clark::{aggregate_identity_residual_1d, clark_1d, clark_weight, composition_residual_1d, gram_residual_1d, DiscMap};
use siegel::geometry::SiegelPoint;
use siegel::jordan::{Operator, System};
use siegel::kernels::KernelContext;
use siegel::nevanlinna::{nevanlinna_extract_1d, NevanlinnaData1D};
use siegel::quadrature::{tensor_integrate, QuadratureSpec};
use siegel::worked::{bidisc_product_quotient, bidisc_slope, curve_limits, spin_f, spin_fiber_measure};
use siegel::{Error, Kind, C64};

use crate::config::{RunConfig, Suite};
use crate::output::{Checks, Report};
use crate::sample;

fn max_abs<'a>(it: impl IntoIterator<Item = &'a C64>) -> f64 {
    it.into_iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn run(cfg: &RunConfig) -> Result<Report, String> {
    let sys = System::new(cfg.domain.clone()).map_err(|e| e.to_string())?;
    let mut checks = Checks::new();
    let all = cfg.suite == Suite::All;
    if all || cfg.suite == Suite::Jordan {
        jordan(&sys, cfg, &mut checks);
    }
    if all || cfg.suite == Suite::Kernels {
        kernels(&sys, cfg, &mut checks);
    }
    if all || cfg.suite == Suite::Measures {
        measures(cfg, &mut checks);
    }
    if all || cfg.suite == Suite::Clark {
        clark(cfg, &mut checks);
    }
    Ok(checks.finish())
}

fn jordan(sys: &System, cfg: &RunConfig, checks: &mut Checks) {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = [0.0f64; 7];
    let eye = Operator::identity(sys.dim());
    for _ in 0..cfg.samples {
        let (a, b, x, y) = (sample::element(sys, &mut r), sample::element(sys, &mut r), sample::element(sys, &mut r), sample::element(sys, &mut r));
        let mut run = || -> siegel::Result<[f64; 7]> {
            let dab = sys.d_operator(&a, &b)?;
            let dxy = sys.d_operator(&x, &y)?;
            let comm = &dab.matrix * &dxy.matrix - &dxy.matrix * &dab.matrix;
            let rhs = sys.d_operator(&dab.apply(&x), &y)?.matrix - sys.d_operator(&x, &sys.d_operator(&b, &a)?.apply(&y))?.matrix;
            let triple = max_abs((comm - rhs).iter());
            let assoc = (sys.inner_product(&sys.triple_product(&a, &b, &x)?, &y)? - sys.inner_product(&a, &sys.triple_product(&b, &x, &y)?)?).norm();
            let sd = sys.spectral_decomposition(&x)?;
            let recon = max_abs((sd.reconstruct(sys.dim()) - &x).iter());
            let mut e = sys.zero();
            for (k, (_, ek)) in sd.pairs.iter().enumerate() {
                if k % 2 == 0 {
                    e += ek;
                }
            }
            let (p1, ph, p0) = sys.peirce_projectors(&e)?;
            let d = sys.d_operator(&e, &e)?;
            let mut idem = max_abs((&p1.matrix + &ph.matrix + &p0.matrix - &eye.matrix).iter());
            let mut eig = 0.0f64;
            for (p, alpha) in [(&p1, 1.0), (&ph, 0.5), (&p0, 0.0)] {
                idem = idem.max(max_abs((&p.matrix * &p.matrix - &p.matrix).iter()));
                eig = eig.max(max_abs((&d.matrix * &p.matrix - &p.matrix * C64::new(alpha, 0.0)).iter()));
            }
            let p = sample::siegel_point(sys, &mut r);
            let back = sys.to_unbounded(&sys.to_bounded(&p)?)?;
            let round = max_abs((&back.z - &p.z).iter()).max(max_abs((&back.zeta - &p.zeta).iter()));
            let jj = sys.involution(&sys.involution(&p)?)?;
            let inv = max_abs((&jj.z - &p.z).iter()).max(max_abs((&jj.zeta - &p.zeta).iter()));
            Ok([triple, assoc, recon, idem, eig, round, inv])
        };
        match run() {
            Ok(v) => {
                for (w, x) in worst.iter_mut().zip(v) {
                    *w = w.max(x);
                }
            }
            Err(e) => return checks.error("jordan", "sample", &e.to_string()),
        }
    }
    let names = [
        ("Jordan triple identity", 1e-10),
        ("form associativity", 1e-10),
        ("spectral reconstruction", 1e-9),
        ("Peirce projector idempotence", 1e-10),
        ("Peirce eigenrelations", 1e-10),
        ("Cayley roundtrip", 1e-10),
        ("involution squared", 1e-10),
    ];
    for ((name, tol), w) in names.iter().zip(worst) {
        checks.residual("jordan", name, w, 0.0, w, *tol);
    }
    match sys.to_bounded(&SiegelPoint::base(sys)) {
        Ok(w) => {
            let v = max_abs(w.w.iter());
            checks.residual("jordan", "Cayley image of the base point", v, 0.0, v, 1e-12);
        }
        Err(e) => checks.error("jordan", "Cayley image of the base point", &e.to_string()),
    }
}

fn kernels(sys: &System, cfg: &RunConfig, checks: &mut Checks) {
    let ctx = match KernelContext::new(sys.clone(), &cfg.quad) {
        Ok(c) => c,
        Err(e) => return checks.error("kernels", "normalization", &e.to_string()),
    };
    if sys.chart_dim() == 1 {
        let base = SiegelPoint::base(sys);
        let mass = ctx
            .poisson_at(&base)
            .and_then(|pk| cfg.quad.rule().map(|rule| tensor_integrate(&[rule], |x| pk.eval_chart(x).unwrap_or(f64::NAN))));
        match mass {
            Ok(m) => checks.compare("kernels", "Poisson mass at the base point", m, 1.0, 1e-6),
            Err(e) => checks.error("kernels", "Poisson mass at the base point", &e.to_string()),
        }
    }
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6b);
    let (mut herm, mut schwarz, mut transfer) = (0.0f64, 0.0f64, Some(0.0f64));
    for _ in 0..cfg.samples {
        let (p, q) = (sample::siegel_point(sys, &mut r), sample::siegel_point(sys, &mut r));
        let b = sample::boundary_point(sys, &mut r);
        let res = (|| -> siegel::Result<()> {
            let a = ctx.cauchy_szego(&p, &q)?;
            herm = herm.max((a - ctx.cauchy_szego(&q, &p)?.conj()).norm() / a.norm());
            let base = SiegelPoint::base(sys);
            let pb = ctx.poisson(&base, &b)?;
            schwarz = schwarz.max((ctx.schwarz(&base, &b)? - C64::new(pb, 0.0)).norm() / pb.max(f64::MIN_POSITIVE));
            match ctx.transfer_identity_residual(&p, &b) {
                Ok(t) => transfer = transfer.map(|w| w.max(t)),
                Err(Error::NotImplemented(_)) => transfer = None,
                Err(e) => return Err(e),
            }
            Ok(())
        })();
        if let Err(e) = res {
            return checks.error("kernels", "sample", &e.to_string());
        }
    }
    checks.residual("kernels", "Cauchy-Szego Hermitian symmetry (relative)", herm, 0.0, herm, 1e-10);
    checks.residual("kernels", "Schwarz equals Poisson at the base point (relative)", schwarz, 0.0, schwarz, 1e-10);
    if let Some(t) = transfer {
        let tol = match sys.kind() {
            Kind::HalfLine => 1e-12,
            _ if sys.is_polydisc() => 1e-10,
            _ => 1e-6,
        };
        checks.residual("kernels", "transfer identity", t, 0.0, t, tol);
    }
}

fn measures(cfg: &RunConfig, checks: &mut Checks) {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6d);
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let (a, c) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let w = C64::new(r.random_range(-3.0..3.0), r.random_range(0.05..3.0));
        worst = worst.max((spin_fiber_measure(a, &[c]).schwarz(w) - spin_f(&[w + a, w - a, C64::new(c, 0.0)])).norm());
    }
    checks.residual("measures", "spin fiber Schwarz identity", worst, 0.0, worst, 1e-10);

    for k in 0..3 {
        let (h1, h2) = (r.random_range(0.2..3.0), r.random_range(0.2..3.0));
        let want = bidisc_slope(h1, h2);
        match nevanlinna_extract_1d(|w| bidisc_product_quotient(w * h1, w * h2), &cfg.quad) {
            Ok(d) => checks.residual("measures", &format!("bidisc slope {k} (relative)"), d.slope_a, want, (d.slope_a - want).abs() / want, 1e-3),
            Err(e) => checks.error("measures", &format!("bidisc slope {k}"), &e.to_string()),
        }
    }

    let (a, b) = (1.0, 3.0);
    match curve_limits(a, b, 1.0 - 1.0 / 1_048_576.0) {
        Ok((diag, curve, _)) => {
            checks.compare("measures", "bidisc ratio limit along the diagonal", diag.re, 0.5, 1e-6);
            checks.compare("measures", "bidisc ratio limit along the curve", curve.re, a / (a + b), 1e-6);
        }
        Err(e) => checks.error("measures", "bidisc ratio limits", &e.to_string()),
    }

    let (mut slope, mut mass, mut dens) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..5 {
        let truth = synthetic(&mut r);
        match nevanlinna_extract_1d(|w| truth.poisson(w), &cfg.quad) {
            Ok(got) if got.atoms.len() == truth.atoms.len() => {
                slope = slope.max((got.slope_a - truth.slope_a).abs());
                for (g, w) in got.atoms.iter().zip(&truth.atoms) {
                    mass = mass.max((g.1 - w.1).abs());
                }
                for (t, v) in got.nodes.iter().zip(&got.values) {
                    dens = dens.max((v - truth.density_at(*t)).abs());
                }
            }
            Ok(got) => return checks.error("measures", &format!("synthetic case {k}"), &format!("{} atoms extracted, {} expected", got.atoms.len(), truth.atoms.len())),
            Err(e) => return checks.error("measures", &format!("synthetic case {k}"), &e.to_string()),
        }
    }
    checks.residual("measures", "synthetic extraction slope", slope, 0.0, slope, 1e-3);
    checks.residual("measures", "synthetic extraction atom masses", mass, 0.0, mass, 1e-2);
    checks.residual("measures", "synthetic extraction density", dens, 0.0, dens, 5e-2);
}

fn synthetic(r: &mut impl Rng) -> NevanlinnaData1D {
    let slope = r.random_range(0.0..2.0);
    let atoms = vec![(r.random_range(-5.0..-1.0), r.random_range(0.2..2.0)), (r.random_range(1.0..5.0), r.random_range(0.2..2.0))];
    let (amp, centre) = (r.random_range(0.2..1.0), r.random_range(-2.0..2.0));
    let nodes: Vec<f64> = (0..=400).map(|k| -8.0 + 0.04 * k as f64).collect();
    let values = nodes.iter().map(|t| amp * (-(t - centre).powi(2)).exp()).collect();
    NevanlinnaData1D { slope_a: slope, atoms, nodes, values, tails: [0.0; 2] }
}

fn exp_iw(w: C64) -> C64 {
    (C64::new(0.0, 1.0) * w).exp()
}

fn cayley(w: C64) -> C64 {
    (w - C64::new(0.0, 1.0)) / (w + C64::new(0.0, 1.0))
}

fn clark(cfg: &RunConfig, checks: &mut Checks) {
    // a cut at 21π sits halfway between atoms of period 2π
    let periodic = QuadratureSpec { radius: 21.0 * PI, nodes: 1024, ..cfg.quad };
    let one = C64::new(1.0, 0.0);
    match clark_1d(exp_iw, one, &periodic) {
        Ok(d) => {
            let loc = d.atoms.iter().map(|a| (a.0 - 2.0 * PI * (a.0 / (2.0 * PI)).round()).abs()).fold(0.0, f64::max);
            let mass = d.atoms.iter().map(|a| (a.1 - 2.0 * PI).abs()).fold(0.0, f64::max);
            checks.compare("clark", "exponential atom count", d.atoms.len() as f64, 21.0, 0.5);
            checks.residual("clark", "exponential atom locations", loc, 0.0, loc, 1e-3);
            checks.residual("clark", "exponential atom masses", mass, 0.0, mass, 1e-3);
            let mut r = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x63);
            let mut pois = 0.0f64;
            for _ in 0..50 {
                let w = C64::new(r.random_range(-15.0..15.0), r.random_range(0.1..3.0));
                pois = pois.max((d.poisson(w) - clark_weight(exp_iw(w), one)).abs());
            }
            checks.residual("clark", "exponential Poisson integral", pois, 0.0, pois, 1e-3);
        }
        Err(e) => checks.error("clark", "exponential", &e.to_string()),
    }
    let probes = [C64::new(0.0, 1.0), C64::new(0.5, 0.3), C64::new(-1.0, 2.0), C64::new(2.0, 0.6), C64::new(-0.3, 0.15)];
    let maps: [(&str, fn(C64) -> C64, QuadratureSpec); 3] = [("zero map", |_| C64::new(0.0, 0.0), cfg.quad), ("Cayley map", cayley, cfg.quad), ("exponential", exp_iw, periodic)];
    for (name, phi, q) in maps {
        let mut worst = 0.0f64;
        for w in probes {
            match aggregate_identity_residual_1d(phi, w, &q, 64) {
                Ok(v) => worst = worst.max(v),
                Err(e) => return checks.error("clark", &format!("aggregation, {name}"), &e.to_string()),
            }
        }
        checks.residual("clark", &format!("aggregation, {name}"), worst, 0.0, worst, 1e-2);
    }
    for (name, psi) in [("identity", DiscMap::Identity), ("square", DiscMap::square())] {
        let mut worst = 0.0f64;
        for alpha in [one, C64::from_polar(1.0, 0.7)] {
            match composition_residual_1d(cayley, &psi, alpha, C64::new(0.3, 0.8), &cfg.quad) {
                Ok(r) => worst = worst.max(r.measure).max(r.slope),
                Err(e) => return checks.error("clark", &format!("composition with {name}"), &e.to_string()),
            }
        }
        checks.residual("clark", &format!("composition with {name}"), worst, 0.0, worst, 1e-2);
    }
    let alpha = C64::from_polar(1.0, 0.4);
    match clark_1d(exp_iw, alpha, &periodic) {
        Ok(mu) => {
            let g = gram_residual_1d(exp_iw, alpha, &mu, &[C64::new(0.1, 0.5), C64::new(-1.0, 1.0), C64::new(2.0, 0.7), C64::new(0.0, 2.0)]);
            checks.residual("clark", "4x4 Gram isometry", g, 0.0, g, 1e-2);
        }
        Err(e) => checks.error("clark", "Gram isometry", &e.to_string()),
    }
}
