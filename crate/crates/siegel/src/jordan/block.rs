use nalgebra::DMatrix;

use super::{C64, MERGE_TOL};
use crate::error::{Error, Result};

/// An irreducible factor.
///
/// `Matrix` stores a p×q matrix row-major; the designated tripotent is (I, 0),
/// the tube part is the left p×p block and E the right p×(q−p) block.
/// `Spin` stores (a, b, c₁…c_d) with the Jordan product
/// (aa′ + c·c′, bb′ + c·c′, ((a+b)c′ + (a′+b′)c)/2) and identity (1, 1, 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simple {
    Matrix { p: usize, q: usize },
    Spin { d: usize },
    HalfLine,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn mat(p: usize, q: usize, x: &[C64]) -> DMatrix<C64> {
    DMatrix::from_row_slice(p, q, x)
}

fn write_mat(m: &DMatrix<C64>, out: &mut [C64]) {
    let (p, q) = m.shape();
    for i in 0..p {
        for j in 0..q {
            out[i * q + j] = m[(i, j)];
        }
    }
}

fn tube_block(p: usize, q: usize, x: &[C64]) -> DMatrix<C64> {
    DMatrix::from_fn(p, p, |i, j| x[i * q + j])
}

fn bilinear_dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn spin_mult(x: &[C64], y: &[C64], out: &mut [C64]) {
    let d = bilinear_dot(&x[2..], &y[2..]);
    out[0] = x[0] * y[0] + d;
    out[1] = x[1] * y[1] + d;
    let sx = (x[0] + x[1]) * 0.5;
    let sy = (y[0] + y[1]) * 0.5;
    for k in 2..x.len() {
        out[k] = sx * y[k] + sy * x[k];
    }
}

fn spin_det(x: &[C64]) -> C64 {
    x[0] * x[1] - bilinear_dot(&x[2..], &x[2..])
}

fn det_small(m: &DMatrix<C64>) -> C64 {
    match m.nrows() {
        0 => ONE,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.clone().lu().determinant(),
    }
}

impl Simple {
    pub fn dim(&self) -> usize {
        match *self {
            Simple::Matrix { p, q } => p * q,
            Simple::Spin { d } => d + 2,
            Simple::HalfLine => 1,
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            Simple::Matrix { p, .. } => p,
            Simple::Spin { .. } => 2,
            Simple::HalfLine => 1,
        }
    }

    /// Complex dimension of E = Z_{1/2}(e).
    pub fn e_dim(&self) -> usize {
        match *self {
            Simple::Matrix { p, q } => p * (q - p),
            _ => 0,
        }
    }

    /// Real dimension of the self-adjoint part F of Z₁(e).
    pub fn f_dim(&self) -> usize {
        match *self {
            Simple::Matrix { p, .. } => p * p,
            Simple::Spin { d } => d + 2,
            Simple::HalfLine => 1,
        }
    }

    pub(crate) fn write_identity(&self, out: &mut [C64]) {
        match *self {
            Simple::Matrix { p, q } => {
                for i in 0..p {
                    out[i * q + i] = ONE;
                }
            }
            Simple::Spin { .. } => {
                out[0] = ONE;
                out[1] = ONE;
            }
            Simple::HalfLine => out[0] = ONE,
        }
    }

    pub(crate) fn triple(&self, x: &[C64], y: &[C64], z: &[C64], out: &mut [C64]) {
        match *self {
            Simple::Matrix { p, q } => {
                let (x, y, z) = (mat(p, q, x), mat(p, q, y), mat(p, q, z));
                let yh = y.adjoint();
                let r = (&x * &yh * &z + &z * &yh * &x) * C64::new(0.5, 0.0);
                write_mat(&r, out);
            }
            Simple::Spin { d } => {
                let n = d + 2;
                let yb: Vec<C64> = y.iter().map(|v| v.conj()).collect();
                let mut xy = vec![ZERO; n];
                let mut yz = vec![ZERO; n];
                let mut xz = vec![ZERO; n];
                spin_mult(x, &yb, &mut xy);
                spin_mult(&yb, z, &mut yz);
                spin_mult(x, z, &mut xz);
                let mut t1 = vec![ZERO; n];
                let mut t2 = vec![ZERO; n];
                let mut t3 = vec![ZERO; n];
                spin_mult(&xy, z, &mut t1);
                spin_mult(x, &yz, &mut t2);
                spin_mult(&xz, &yb, &mut t3);
                for k in 0..n {
                    out[k] = t1[k] + t2[k] - t3[k];
                }
            }
            Simple::HalfLine => out[0] = x[0] * y[0].conj() * z[0],
        }
    }

    pub(crate) fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        let herm = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(u, v)| u * v.conj()).sum() };
        match *self {
            Simple::Matrix { p, q } => herm(x, y) * ((p + q) as f64 / 2.0),
            Simple::Spin { .. } => x[0] * y[0].conj() + x[1] * y[1].conj() + herm(&x[2..], &y[2..]) * 2.0,
            Simple::HalfLine => x[0] * y[0].conj(),
        }
    }

    pub(crate) fn spectral_norm(&self, x: &[C64]) -> f64 {
        match *self {
            Simple::Matrix { p, q } => {
                if p == 1 {
                    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
                } else {
                    mat(p, q, x).singular_values().iter().cloned().fold(0.0, f64::max)
                }
            }
            Simple::Spin { .. } => SpinFrame::new(x).l2(),
            Simple::HalfLine => x[0].norm(),
        }
    }

    /// Spectral pairs (λ, tripotent) of one factor, λ increasing, zeros dropped.
    pub(crate) fn spectral(&self, x: &[C64]) -> Vec<(f64, Vec<C64>)> {
        match *self {
            Simple::Matrix { p, q } => {
                let svd = mat(p, q, x).svd(true, true);
                let u = svd.u.expect("requested U");
                let vt = svd.v_t.expect("requested V*");
                let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
                idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
                let smax = idx.last().map(|&k| svd.singular_values[k]).unwrap_or(0.0);
                if smax <= 0.0 {
                    return Vec::new();
                }
                let mut groups: Vec<(Vec<f64>, DMatrix<C64>)> = Vec::new();
                for &k in &idx {
                    let s = svd.singular_values[k];
                    if s <= 1e-14 * smax {
                        continue;
                    }
                    let term = u.column(k) * vt.row(k);
                    match groups.last_mut() {
                        Some((vals, acc)) if (s - vals[0]).abs() < MERGE_TOL * smax => {
                            vals.push(s);
                            *acc += term;
                        }
                        _ => groups.push((vec![s], term)),
                    }
                }
                groups
                    .into_iter()
                    .map(|(vals, m)| {
                        let lam = vals.iter().sum::<f64>() / vals.len() as f64;
                        let mut out = vec![ZERO; p * q];
                        write_mat(&m, &mut out);
                        (lam, out)
                    })
                    .collect()
            }
            Simple::Spin { .. } => {
                let f = SpinFrame::new(x);
                let l2 = f.l2();
                if l2 <= 0.0 {
                    return Vec::new();
                }
                let l1 = f.l1();
                if l1 <= 1e-14 * l2 || (l2 - l1) < MERGE_TOL * l2 {
                    let lam = if l1 <= 1e-14 * l2 { l2 } else { 0.5 * (l1 + l2) };
                    let e = if l1 <= 1e-14 * l2 { f.tripotent(1.0) } else { f.merged() };
                    return vec![(lam, e)];
                }
                vec![(l1, f.tripotent(-1.0)), (l2, f.tripotent(1.0))]
            }
            Simple::HalfLine => {
                let r = x[0].norm();
                if r == 0.0 {
                    Vec::new()
                } else {
                    vec![(r, vec![x[0] / r])]
                }
            }
        }
    }

    pub(crate) fn inverse(&self, x: &[C64], out: &mut [C64]) -> Result<()> {
        match *self {
            Simple::Matrix { p, q } => {
                let m = tube_block(p, q, x);
                let det = det_small(&m);
                let inv = m.try_inverse().ok_or(Error::Singular { det_abs: det.norm() })?;
                if det.norm() == 0.0 || !inv.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Singular { det_abs: det.norm() });
                }
                for i in 0..p {
                    for j in 0..p {
                        out[i * q + j] = inv[(i, j)];
                    }
                }
                Ok(())
            }
            Simple::Spin { .. } => {
                let det = spin_det(x);
                let scale: f64 = x.iter().map(|v| v.norm_sqr()).sum();
                if det.norm() <= 1e-14 * scale || det.norm() == 0.0 {
                    return Err(Error::Singular { det_abs: det.norm() });
                }
                out[0] = x[1] / det;
                out[1] = x[0] / det;
                for k in 2..x.len() {
                    out[k] = -x[k] / det;
                }
                Ok(())
            }
            Simple::HalfLine => {
                if x[0].norm() == 0.0 {
                    return Err(Error::Singular { det_abs: 0.0 });
                }
                out[0] = x[0].inv();
                Ok(())
            }
        }
    }

    pub(crate) fn det(&self, x: &[C64]) -> C64 {
        match *self {
            Simple::Matrix { p, q } => det_small(&tube_block(p, q, x)),
            Simple::Spin { .. } => spin_det(x),
            Simple::HalfLine => x[0],
        }
    }

    pub(crate) fn minors(&self, x: &[C64]) -> Vec<C64> {
        match *self {
            Simple::Matrix { p, q } => {
                let m = tube_block(p, q, x);
                (1..=p).map(|k| det_small(&m.view((0, 0), (k, k)).into_owned())).collect()
            }
            Simple::Spin { .. } => vec![x[0], spin_det(x)],
            Simple::HalfLine => vec![x[0]],
        }
    }

    /// Complex Jordan eigenvalues of the tube component.
    pub(crate) fn eigenvalues(&self, x: &[C64]) -> Vec<C64> {
        match *self {
            Simple::Matrix { p, q } => match p {
                1 => vec![x[0]],
                2 => {
                    let (a, b, c, d) = (x[0], x[1], x[q], x[q + 1]);
                    let half = (a + d) * 0.5;
                    let disc = (half * half - (a * d - b * c)).sqrt();
                    vec![half - disc, half + disc]
                }
                _ => {
                    let m = tube_block(p, q, x);
                    m.schur().eigenvalues().map(|v| v.iter().cloned().collect()).unwrap_or_default()
                }
            },
            Simple::Spin { .. } => {
                let u = (x[0] + x[1]) * 0.5;
                let v = (x[0] - x[1]) * 0.5;
                let w = (v * v + bilinear_dot(&x[2..], &x[2..])).sqrt();
                vec![u - w, u + w]
            }
            Simple::HalfLine => vec![x[0]],
        }
    }

    /// Real Jordan eigenvalues of a self-adjoint element (imaginary parts ignored).
    pub(crate) fn real_eigenvalues(&self, x: &[C64]) -> Vec<f64> {
        match *self {
            Simple::Matrix { p, q } => {
                let m = tube_block(p, q, x);
                let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
                h.symmetric_eigenvalues().iter().cloned().collect()
            }
            Simple::Spin { .. } => {
                let u = 0.5 * (x[0].re + x[1].re);
                let v = 0.5 * (x[0].re - x[1].re);
                let cc: f64 = x[2..].iter().map(|c| c.re * c.re).sum();
                let w = (v * v + cc).sqrt();
                vec![u - w, u + w]
            }
            Simple::HalfLine => vec![x[0].re],
        }
    }

    pub(crate) fn tube_residual(&self, x: &[C64]) -> f64 {
        match *self {
            Simple::Matrix { p, q } => (0..p)
                .flat_map(|i| (p..q).map(move |j| i * q + j))
                .map(|k| x[k].norm())
                .fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    pub(crate) fn half_residual(&self, x: &[C64]) -> f64 {
        match *self {
            Simple::Matrix { p, q } => (0..p)
                .flat_map(|i| (0..p).map(move |j| i * q + j))
                .map(|k| x[k].norm())
                .fold(0.0, f64::max),
            _ => x.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// Coordinate indices of E inside the factor.
    pub(crate) fn e_indices(&self) -> Vec<usize> {
        match *self {
            Simple::Matrix { p, q } => (0..p).flat_map(|i| (p..q).map(move |j| i * q + j)).collect(),
            _ => Vec::new(),
        }
    }

    /// Writes the self-adjoint tube element with real chart coordinates `f`.
    pub(crate) fn f_from_real(&self, f: &[f64], out: &mut [C64]) {
        match *self {
            Simple::Matrix { p, q } => {
                let mut k = 0;
                for i in 0..p {
                    out[i * q + i] = C64::new(f[k], 0.0);
                    k += 1;
                }
                for i in 0..p {
                    for j in i + 1..p {
                        let v = C64::new(f[k], f[k + 1]);
                        out[i * q + j] = v;
                        out[j * q + i] = v.conj();
                        k += 2;
                    }
                }
            }
            _ => {
                for (o, v) in out.iter_mut().zip(f) {
                    *o = C64::new(*v, 0.0);
                }
            }
        }
    }

    /// Real chart coordinates of the self-adjoint part of a tube element.
    pub(crate) fn f_to_real(&self, x: &[C64]) -> Vec<f64> {
        match *self {
            Simple::Matrix { p, q } => {
                let mut f = Vec::with_capacity(p * p);
                for i in 0..p {
                    f.push(x[i * q + i].re);
                }
                for i in 0..p {
                    for j in i + 1..p {
                        let v = (x[i * q + j] + x[j * q + i].conj()) * 0.5;
                        f.push(v.re);
                        f.push(v.im);
                    }
                }
                f
            }
            _ => x.iter().map(|v| v.re).collect(),
        }
    }
}

/// Spin-factor element in ball coordinates u = (α, iβ, ic) with α = (a+b)/2,
/// β = (a−b)/2, so that u·u = det x and |u|² = ⟨x|x⟩/2. After the phase
/// rotation u = e^{iθ}(A + iB) with A ⊥ B and |A| ≥ |B|, the spectral values
/// are |A| ± |B| with tripotents e^{iθ}(Â ± iB̂)/2.
struct SpinFrame {
    phase: C64,
    a: Vec<f64>,
    b: Vec<f64>,
    na: f64,
    nb: f64,
    det_abs: f64,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl SpinFrame {
    fn new(x: &[C64]) -> Self {
        let i = C64::new(0.0, 1.0);
        let mut u = Vec::with_capacity(x.len());
        u.push((x[0] + x[1]) * 0.5);
        u.push((x[0] - x[1]) * 0.5 * i);
        u.extend(x[2..].iter().map(|c| c * i));
        let uu = bilinear_dot(&u, &u);
        let phase = C64::from_polar(1.0, 0.5 * uu.arg());
        let rot: Vec<C64> = u.iter().map(|v| v / phase).collect();
        let a: Vec<f64> = rot.iter().map(|v| v.re).collect();
        let mut b: Vec<f64> = rot.iter().map(|v| v.im).collect();
        let na = dot(&a, &a).sqrt();
        if na > 0.0 {
            let t = dot(&a, &b) / (na * na);
            for (bk, ak) in b.iter_mut().zip(&a) {
                *bk -= t * ak;
            }
        }
        let nb = dot(&b, &b).sqrt();
        Self { phase, a, b, na, nb, det_abs: uu.norm() }
    }

    fn l2(&self) -> f64 {
        self.na + self.nb
    }

    fn l1(&self) -> f64 {
        let l2 = self.l2();
        if l2 > 0.0 {
            (self.det_abs / l2).min(l2)
        } else {
            0.0
        }
    }

    fn to_x(&self, u: &[C64]) -> Vec<C64> {
        let mi = C64::new(0.0, -1.0);
        let alpha = u[0];
        let beta = u[1] * mi;
        let mut out = Vec::with_capacity(u.len());
        out.push(alpha + beta);
        out.push(alpha - beta);
        out.extend(u[2..].iter().map(|v| v * mi));
        out
    }

    /// e^{iθ}(Â + s·iB̂)/2 for s = ±1.
    fn tripotent(&self, s: f64) -> Vec<C64> {
        let bscale = s / self.nb;
        let u: Vec<C64> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| self.phase * C64::new(a / self.na, b * bscale) * 0.5)
            .collect();
        self.to_x(&u)
    }

    /// e^{iθ}Â, the sum of both tripotents.
    fn merged(&self) -> Vec<C64> {
        let u: Vec<C64> = self.a.iter().map(|a| self.phase * (a / self.na)).collect();
        self.to_x(&u)
    }
}
