use serde_json::json;
use siegel::clark::{clark_1d, clark_fibered};
use siegel::geometry::SiegelPoint;
use siegel::kernels::KernelContext;
use siegel::measures::{disintegrate, BaseGrid, BoundaryMeasure, FiberedMeasure};
use siegel::nevanlinna::NevanlinnaData1D;
use siegel::worked::{bidisc_product_quotient, spin_f, spin_g};
use siegel::{Element, Error, Kind, System, C64};

use crate::config::{DiscMapChoice, Function, RunConfig};
use crate::output::{Report, Table};

fn err(e: Error) -> String {
    e.to_string()
}

fn tube_point(sys: &System, coords: &[[f64; 2]]) -> Result<SiegelPoint, String> {
    let z: Vec<C64> = coords.iter().map(|c| C64::new(c[0], c[1])).collect();
    SiegelPoint::new(sys, sys.zero(), sys.element(&z).map_err(err)?).map_err(err)
}

pub fn kernel_eval(cfg: &RunConfig) -> Result<Report, String> {
    let sys = System::new(cfg.domain.clone()).map_err(err)?;
    let ctx = KernelContext::new(sys.clone(), &cfg.quad).map_err(err)?;
    let points = if cfg.points.is_empty() {
        vec![SiegelPoint::base(&sys)]
    } else {
        cfg.points.iter().map(|p| tube_point(&sys, p)).collect::<Result<_, _>>()?
    };
    let boundary = if cfg.boundary.is_empty() {
        [0.0, 0.5, -1.0].iter().map(|&x| vec![x; sys.chart_dim()]).collect()
    } else {
        cfg.boundary.clone()
    };
    let mut t = Table::new(&["point", "boundary", "cauchy_re", "cauchy_im", "poisson", "schwarz_re", "schwarz_im", "transfer_residual"]);
    for (i, p) in points.iter().enumerate() {
        for (j, c) in boundary.iter().enumerate() {
            let b = sys.boundary_from_chart(c).map_err(err)?;
            let k = ctx.cauchy_szego_boundary(p, &b).map_err(err)?;
            let s = ctx.schwarz(p, &b).map_err(err)?;
            let transfer = match ctx.transfer_identity_residual(p, &b) {
                Ok(v) => v,
                Err(Error::NotImplemented(_)) => f64::NAN,
                Err(e) => return Err(err(e)),
            };
            t.push(vec![i.into(), j.into(), k.re.into(), k.im.into(), ctx.poisson(p, &b).map_err(err)?.into(), s.re.into(), s.im.into(), transfer.into()]);
        }
    }
    Ok(Report::table(t))
}

fn direction(sys: &System, cfg: &RunConfig) -> Result<Element, String> {
    match &cfg.direction {
        Some(h) => sys.element_re(h).map_err(err),
        None => Ok(sys.e().clone()),
    }
}

pub fn check_function(f: Function, kind: &Kind) -> Result<(), String> {
    let ok = match f {
        Function::Height => true,
        Function::BidiscQuotient => *kind == Kind::Product { factors: vec![Kind::HalfLine; 2] },
        Function::SpinRe | Function::SpinInvolutedRe => *kind == Kind::Spin { dim_h: 1 },
    };
    if ok {
        Ok(())
    } else {
        Err(format!("function {f:?} is not defined on {kind:?}"))
    }
}

fn fiber_rows(t: &mut Table, k: usize, base: &[f64], slope: f64, d: &NevanlinnaData1D) {
    let coords = base.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";");
    let atomic: f64 = d.atoms.iter().map(|a| a.1).sum();
    let rule_mass = trapezoid(&d.nodes, &d.values);
    t.push(vec![k.into(), coords.into(), slope.into(), d.atoms.len().into(), atomic.into(), rule_mass.into(), d.tails[0].into(), d.tails[1].into()]);
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
}

const FIBER_COLUMNS: [&str; 8] = ["fiber", "base", "slope", "atoms", "atomic_mass", "density_mass_on_grid", "tail_left", "tail_right"];

fn fibered_report(slope: f64, mu: FiberedMeasure, extra: serde_json::Value) -> Report {
    let mut t = Table::new(&FIBER_COLUMNS);
    for (k, (f, base)) in mu.fibers.iter().zip(&mu.base_nodes).enumerate() {
        fiber_rows(&mut t, k, base, slope, f);
    }
    let mut doc = json!({ "slope": slope, "measure": BoundaryMeasure::Fibered(mu) });
    if let (Some(d), Some(e)) = (doc.as_object_mut(), extra.as_object()) {
        d.extend(e.clone());
    }
    let mut r = Report::table(t);
    r.json = Some(doc);
    r
}

pub fn run_disintegrate(cfg: &RunConfig) -> Result<Report, String> {
    let sys = System::new(cfg.domain.clone()).map_err(err)?;
    let h = direction(&sys, cfg)?;
    let base = BaseGrid::uniform(&sys, &h, cfg.base_radius, cfg.base_nodes).map_err(err)?;
    let e = sys.e().clone();
    let f = |p: &SiegelPoint| match cfg.function {
        Function::Height => sys.inner_product(&sys.im_part(&p.z), &e).map(|v| v.re).unwrap_or(f64::NAN),
        Function::BidiscQuotient => bidisc_product_quotient(p.z[0], p.z[1]),
        Function::SpinRe => spin_f(p.z.as_slice()).re,
        Function::SpinInvolutedRe => spin_g(p.z.as_slice()).re,
    };
    let (mu, a) = disintegrate(&sys, f, &h, &base, &cfg.quad).map_err(err)?;
    Ok(fibered_report(a, mu, json!({})))
}

fn disc_map(m: DiscMapChoice) -> fn(C64) -> C64 {
    match m {
        DiscMapChoice::Cayley => |w| (w - C64::new(0.0, 1.0)) / (w + C64::new(0.0, 1.0)),
        DiscMapChoice::Exponential => |w| (C64::new(0.0, 1.0) * w).exp(),
        DiscMapChoice::HalfCayley => |w| 0.5 * (w - C64::new(0.0, 1.0)) / (w + C64::new(0.0, 1.0)),
    }
}

/// Clark measure of the chosen map on the half-line, or of the product of
/// the map over coordinates on a polydisc.
pub fn run_clark(cfg: &RunConfig) -> Result<Report, String> {
    let sys = System::new(cfg.domain.clone()).map_err(err)?;
    let alpha = C64::from_polar(1.0, cfg.alpha_angle);
    let phi = disc_map(cfg.map);
    let extra = json!({ "alpha": [alpha.re, alpha.im] });
    if *sys.kind() == Kind::HalfLine {
        let d = clark_1d(phi, alpha, &cfg.quad).map_err(err)?;
        let a = d.slope_a;
        return Ok(fibered_report(a, FiberedMeasure::half_line(d), extra));
    }
    let h = direction(&sys, cfg)?;
    let base = BaseGrid::uniform(&sys, &h, cfg.base_radius, cfg.base_nodes).map_err(err)?;
    let prod = |p: &SiegelPoint| p.z.iter().map(|w| phi(*w)).product::<C64>();
    let (mu, a) = clark_fibered(&sys, prod, alpha, &h, &base, &cfg.quad).map_err(err)?;
    Ok(fibered_report(a, mu, extra))
}

