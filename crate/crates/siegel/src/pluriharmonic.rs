//! Levi forms by finite differences, linearity fits of residual functions
//! and the non-pluriharmonic dominated measure of the spin example.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SiegelPoint;
use crate::jordan::{System, C64};
use crate::kernels::KernelContext;
use crate::measures::{disintegrate, BaseGrid, BoundaryMeasure};
use crate::quadrature::QuadratureSpec;
use crate::worked::{null_set_part, spin_f, spin_g};

/// Relative step of the Levi stencil, as a fraction of the distance to the boundary.
pub const LEVI_REL_STEP: f64 = 1e-3;

const MAX_SHRINK: usize = 12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeviReport {
    pub point: SiegelPoint,
    /// Row-major N×N matrix of ∂²u/∂z_a∂z̄_b in the complex chart coordinates.
    pub levi_matrix: Vec<C64>,
    pub n: usize,
    pub max_abs: f64,
    pub fd_step: f64,
}

impl LeviReport {
    pub fn entry(&self, a: usize, b: usize) -> C64 {
        self.levi_matrix[a * self.n + b]
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.n {
            for b in 0..self.n {
                worst = worst.max((self.entry(a, b) - self.entry(b, a).conj()).norm());
            }
        }
        worst
    }
}

impl System {
    /// Complex coordinates of (ζ, z): the E coordinates, then the complexified
    /// F coordinates.
    pub fn complex_chart(&self, p: &SiegelPoint) -> Vec<C64> {
        let e = self.e_to_real(&p.zeta);
        let re = self.f_to_real(&self.re_part(&p.z));
        let im = self.f_to_real(&self.im_part(&p.z));
        let mut out: Vec<C64> = e.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        out.extend(re.iter().zip(&im).map(|(&x, &y)| C64::new(x, y)));
        out
    }

    pub fn from_complex_chart(&self, c: &[C64]) -> Result<SiegelPoint> {
        let ne = self.e_dim();
        if c.len() != ne + self.f_dim() {
            return Err(Error::InvalidArgument(format!("expected {} complex coordinates, got {}", ne + self.f_dim(), c.len())));
        }
        let e: Vec<f64> = c[..ne].iter().flat_map(|v| [v.re, v.im]).collect();
        let re: Vec<f64> = c[ne..].iter().map(|v| v.re).collect();
        let im: Vec<f64> = c[ne..].iter().map(|v| v.im).collect();
        let z = self.f_from_real(&re)? + self.f_from_real(&im)? * C64::new(0.0, 1.0);
        Ok(SiegelPoint { zeta: self.e_from_real(&e)?, z })
    }

    /// Smallest eigenvalue of Im z − Φ(ζ), the distance scale to the boundary.
    pub fn boundary_distance(&self, p: &SiegelPoint) -> f64 {
        self.real_eigenvalues(&self.height(p)).into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// ¼ of the Laplacian of u along the complex line through p in direction v,
/// i.e. the Levi form evaluated on (v, v), by a five-point stencil.
fn line_levi(u: &dyn Fn(&[C64]) -> f64, c: &[C64], v: &[C64], s: f64) -> f64 {
    let shift = |w: C64| -> Vec<C64> { c.iter().zip(v).map(|(x, d)| x + d * w).collect() };
    let sum = u(&shift(C64::new(s, 0.0))) + u(&shift(C64::new(-s, 0.0))) + u(&shift(C64::new(0.0, s))) + u(&shift(C64::new(0.0, -s)));
    0.25 * (sum - 4.0 * u(c)) / (s * s)
}

fn levi_at_step(u: &dyn Fn(&[C64]) -> f64, c: &[C64], s: f64) -> Vec<C64> {
    let n = c.len();
    let unit = |a: usize, w: C64| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[a] += w;
        v
    };
    let mut m = vec![C64::new(0.0, 0.0); n * n];
    for a in 0..n {
        m[a * n + a] = C64::new(line_levi(u, c, &unit(a, C64::new(1.0, 0.0)), s), 0.0);
    }
    for a in 0..n {
        for b in a + 1..n {
            let pair = |w: C64| {
                let mut v = unit(a, C64::new(1.0, 0.0));
                v[b] += w;
                line_levi(u, c, &v, s)
            };
            let plus = pair(C64::new(1.0, 0.0)) - pair(C64::new(-1.0, 0.0));
            let turn = pair(C64::new(0.0, 1.0)) - pair(C64::new(0.0, -1.0));
            let lab = 0.25 * C64::new(plus, turn);
            m[a * n + b] = lab;
            m[b * n + a] = lab.conj();
        }
    }
    m
}

/// Levi matrix of u at p by five-point stencils on every complex line through
/// pairs of chart coordinates, with one Richardson halving. The default step
/// is `LEVI_REL_STEP` times the boundary distance; the step is halved while
/// the stencil leaves the domain.
pub fn levi_form<U>(sys: &System, u: U, p: &SiegelPoint, step: Option<f64>) -> Result<LeviReport>
where
    U: Fn(&SiegelPoint) -> f64,
{
    if !sys.in_domain(p) {
        return Err(Error::Domain("Levi form requested outside the domain".into()));
    }
    let c = sys.complex_chart(p);
    let outside = std::cell::Cell::new(false);
    let f = |x: &[C64]| -> f64 {
        match sys.from_complex_chart(x) {
            Ok(q) if sys.in_domain(&q) => u(&q),
            _ => {
                outside.set(true);
                0.0
            }
        }
    };
    let mut s = step.unwrap_or(LEVI_REL_STEP * sys.boundary_distance(p));
    for _ in 0..MAX_SHRINK {
        outside.set(false);
        let coarse = levi_at_step(&f, &c, s);
        let fine = levi_at_step(&f, &c, 0.5 * s);
        if outside.get() {
            s *= 0.5;
            continue;
        }
        let levi_matrix: Vec<C64> = coarse.iter().zip(&fine).map(|(a, b)| (b * 4.0 - a) / 3.0).collect();
        let max_abs = levi_matrix.iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok(LeviReport { point: p.clone(), levi_matrix, n: c.len(), max_abs, fd_step: s });
    }
    Err(Error::Domain("Levi stencil does not fit in the domain".into()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearityReport {
    /// F coordinates of the fitted λ.
    pub lambda: Vec<f64>,
    /// max over probes of |g − ⟨Im z|λ⟩|.
    pub residual: f64,
    /// max over sampled unit ζ ∈ E of |⟨Φ(ζ)|λ⟩|.
    pub defect: f64,
    /// Smallest eigenvalue of λ; non-negative when λ lies in the closed cone.
    pub min_eigenvalue: f64,
    pub linear: bool,
}

/// Least-squares fit of g by ⟨Im z|λ⟩ over the probes. The fit counts as
/// linear when the residual is at most `tol·(1 + max|g|)`.
pub fn linearity_check<G>(sys: &System, g: G, probes: &[SiegelPoint], tol: f64, seed: u64) -> Result<LinearityReport>
where
    G: Fn(&SiegelPoint) -> f64,
{
    let nf = sys.f_dim();
    if probes.len() < nf {
        return Err(Error::InvalidArgument(format!("need at least {nf} probes")));
    }
    let basis: Vec<_> = (0..nf)
        .map(|k| {
            let mut v = vec![0.0; nf];
            v[k] = 1.0;
            sys.f_from_real(&v)
        })
        .collect::<Result<_>>()?;
    let a = DMatrix::from_fn(probes.len(), nf, |i, k| sys.ip(&sys.im_part(&probes[i].z), &basis[k]).re);
    let y = DVector::from_iterator(probes.len(), probes.iter().map(&g));
    let lam = a.clone().svd(true, true).solve(&y, 1e-14).map_err(|e| Error::Inconsistent(e.to_string()))?;
    let residual = (&a * &lam - &y).amax();
    let lambda_el = sys.f_from_real(lam.as_slice())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ne = sys.e_dim();
    let mut defect: f64 = 0.0;
    if ne > 0 {
        for _ in 0..32 {
            let c: Vec<f64> = (0..2 * ne).map(|_| rng.random_range(-1.0..1.0)).collect();
            let zeta = sys.e_from_real(&c)?;
            let n2 = sys.norm2(&zeta);
            if n2 < 1e-6 {
                continue;
            }
            let phi = sys.phi(&zeta, &zeta)?;
            defect = defect.max(sys.ip(&phi, &lambda_el).re.abs() / n2);
        }
    }
    let min_eigenvalue = sys.real_eigenvalues(&lambda_el).into_iter().fold(f64::INFINITY, f64::min);
    let scale = 1.0 + y.amax();
    Ok(LinearityReport { lambda: lam.as_slice().to_vec(), residual, defect, min_eigenvalue, linear: residual <= tol * scale })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NullSetMass {
    pub a: f64,
    pub c: f64,
    /// (location, mass) of the fiber atoms on the determinant-zero set.
    pub atoms: Vec<(f64, f64)>,
    pub mass: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpinCounterexampleReport {
    pub slope: f64,
    /// Levi reports of Re g at the probes; their maximum is the noise floor.
    pub holomorphic: Vec<LeviReport>,
    /// Levi reports of the Poisson integral of the dominated measure.
    pub dominated: Vec<LeviReport>,
    pub noise_floor: f64,
    pub signal: f64,
    /// Determinant-zero parts of the fibers of Re f at the origin and along rays toward it.
    pub null_masses: Vec<NullSetMass>,
    /// Largest gap between the null-set mass at the origin and along a ray.
    pub null_jump: f64,
}

/// Probes near (0, ie) of the rank-two spin tube.
pub fn spin_probes(sys: &System) -> Result<Vec<SiegelPoint>> {
    let pts: [[C64; 3]; 3] = [
        [C64::new(0.0, 1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        [C64::new(0.3, 1.0), C64::new(-0.2, 1.2), C64::new(0.1, 0.2)],
        [C64::new(-0.4, 0.8), C64::new(0.5, 1.5), C64::new(-0.2, -0.3)],
    ];
    pts.iter().map(|z| SiegelPoint::tube(sys, sys.element(z)?)).collect()
}

/// Base grid through the given (a, c) points of the plane orthogonal to (1, 1, 0).
fn spin_base_points(sys: &System, h: &crate::Element, pts: &[(f64, f64)]) -> Result<BaseGrid> {
    let frame = sys.orthogonal_frame(h)?;
    let nodes = pts
        .iter()
        .map(|&(a, c)| {
            let x = [a, -a, c];
            frame.iter().map(|f| f.iter().zip(&x).map(|(u, v)| u * v).sum()).collect()
        })
        .collect();
    Ok(BaseGrid { frame, nodes, weights: vec![1.0; pts.len()] })
}

/// Disintegrates Re g = Re(f∘ι) for the rank-two spin tube along h = (1, 1, 0)
/// on a `base_nodes`² midpoint box, compares Levi forms of Re g and of the
/// Poisson integral of the resulting measure at the probes, and extracts the
/// determinant-zero parts of the fibers of Re f along three rays toward the
/// origin.
pub fn spin_counterexample(quad: &QuadratureSpec, base_nodes: usize) -> Result<SpinCounterexampleReport> {
    let sys = System::spin(1)?;
    let h = sys.element_re(&[1.0, 1.0, 0.0])?;
    let re_g = |p: &SiegelPoint| spin_g(p.z.as_slice()).re;
    let base = BaseGrid::uniform(&sys, &h, None, base_nodes)?;
    let (mu, slope) = disintegrate(&sys, re_g, &h, &base, quad)?;
    let measure = BoundaryMeasure::Fibered(mu);
    let ctx = KernelContext::new(sys.clone(), &QuadratureSpec::default())?;

    let probes = spin_probes(&sys)?;
    let mut holomorphic = Vec::new();
    let mut dominated = Vec::new();
    for p in &probes {
        holomorphic.push(levi_form(&sys, re_g, p, None)?);
        let pmu = |q: &SiegelPoint| measure.poisson_integral(&ctx, q).unwrap_or(f64::NAN);
        dominated.push(levi_form(&sys, pmu, p, None)?);
    }
    let noise_floor = holomorphic.iter().map(|r| r.max_abs).fold(0.0, f64::max);
    let signal = dominated.iter().map(|r| r.max_abs).fold(0.0, f64::max);

    // fiber atoms closer than a few grid spacings merge, so the rays stop at 4h
    let spacing = 2.0 * quad.radius / quad.nodes as f64;
    let mut rays = vec![(0.0, 0.0)];
    for (da, dc) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        for k in [8.0, 4.0] {
            rays.push((da * k * spacing, dc * k * spacing));
        }
    }
    let grid = spin_base_points(&sys, &h, &rays)?;
    let re_f = |p: &SiegelPoint| spin_f(p.z.as_slice()).re;
    let (fibers, _) = disintegrate(&sys, re_f, &h, &grid, quad)?;
    let null_masses: Vec<NullSetMass> = rays
        .iter()
        .zip(&fibers.fibers)
        .map(|(&(a, c), fiber)| {
            let atoms = null_set_part(fiber, a, &[c], 1e-2);
            let mass = atoms.iter().map(|x| x.1).sum();
            NullSetMass { a, c, atoms, mass }
        })
        .collect();
    let origin = null_masses[0].mass;
    let null_jump = null_masses[1..].iter().map(|m| (m.mass - origin).abs()).fold(0.0, f64::max);
    Ok(SpinCounterexampleReport { slope, holomorphic, dominated, noise_floor, signal, null_masses, null_jump })
}
