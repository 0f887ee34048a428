//! Generalized angular regions at a boundary tripotent, the orthogonal
//! projection onto ℂe and a sufficient membership certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jordan::Simple;
use crate::jordan::{Element, Operator, System, C64};

pub const ASCENT_STARTS: usize = 64;
pub const ASCENT_STEPS: usize = 200;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Estimate of max{‖Ty‖ : ‖y‖ ≤ 1} in the spectral norm. When `exact` is
/// false, `value` is attained at a feasible point and is a lower bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub exact: bool,
}

/// Input of the angular-region test.
#[derive(Clone, Debug)]
pub struct AngularQuery {
    pub x: Element,
    pub e: Element,
    pub k: f64,
}

impl System {
    /// Spectral-to-spectral operator norm of a linear map.
    pub fn op_norm_spectral(&self, t: &Operator) -> Result<NormEstimate> {
        self.op_norm_spectral_seeded(t, DEFAULT_SEED)
    }

    pub fn op_norm_spectral_seeded(&self, t: &Operator, seed: u64) -> Result<NormEstimate> {
        if !t.is_linear() || t.dim() != self.dim() {
            return Err(Error::InvalidArgument("op norm needs a linear operator on Z".into()));
        }
        if let Some(v) = self.exact_op_norm(t) {
            return Ok(NormEstimate { value: v, exact: true });
        }
        let best = (0..ASCENT_STARTS)
            .into_par_iter()
            .map(|k| self.ascent(t, seed, k as u64))
            .collect::<Vec<f64>>()
            .into_iter()
            .fold(0.0, f64::max);
        Ok(NormEstimate { value: best, exact: false })
    }

    /// Closed forms: the max-norm ball of a polydisc (largest row ℓ¹ sum) and a
    /// single Euclidean ball (operator 2-norm).
    fn exact_op_norm(&self, t: &Operator) -> Option<f64> {
        if self.is_polydisc() {
            let m = &t.matrix;
            return Some((0..m.nrows()).map(|i| m.row(i).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max));
        }
        if let [b] = self.blocks() {
            if let Simple::Matrix { p: 1, .. } = b.simple {
                return Some(t.matrix.clone().singular_values().max());
            }
        }
        None
    }

    fn ascent(&self, t: &Operator, seed: u64, start: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(start);
        let n = self.dim();
        let mut y = Element::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        y = self.clip_to_ball(&y);
        let mut val = self.snorm(&(&t.matrix * &y));
        let th = t.matrix.adjoint();
        let mut eta = 1.0;
        for _ in 0..ASCENT_STEPS {
            let u = &t.matrix * &y;
            let g = self.norm_gradient(&u);
            let dir = &th * g;
            let dn = dir.norm();
            if dn < 1e-300 {
                break;
            }
            let cand = self.clip_to_ball(&(&y + dir * C64::new(eta / dn, 0.0)));
            let cv = self.snorm(&(&t.matrix * &cand));
            if cv > val {
                y = cand;
                val = cv;
                eta = (eta * 1.5).min(4.0);
            } else {
                eta *= 0.5;
                if eta < 1e-10 {
                    break;
                }
            }
        }
        val
    }

    /// Coordinate gradient direction of the spectral norm at u: the top
    /// spectral tripotent, weighted by the factor metric.
    fn norm_gradient(&self, u: &Element) -> Element {
        let sd = match self.spectral_decomposition(u) {
            Ok(sd) if !sd.pairs.is_empty() => sd,
            _ => return self.e().clone(),
        };
        let (_, top) = sd.pairs.last().expect("non-empty");
        let mut g = top.clone();
        for b in self.blocks() {
            if let Simple::Spin { .. } = b.simple {
                for i in b.offset + 2..b.offset + b.dim() {
                    g[i] *= 2.0;
                }
            }
        }
        g
    }

    /// Projection onto the closed unit ball by clipping spectral values at 1.
    pub fn clip_to_ball(&self, y: &Element) -> Element {
        let sd = match self.spectral_decomposition(y) {
            Ok(sd) => sd,
            Err(_) => return y.clone(),
        };
        let mut out = self.zero();
        for (l, e) in sd.pairs {
            out += e * C64::new(l.min(1.0), 0.0);
        }
        out
    }

    /// ‖B(x,e)Q(e)²‖′^{1/2}, the quantity compared against k(1 − ‖x‖²).
    pub fn angular_gauge(&self, x: &Element, e: &Element) -> Result<NormEstimate> {
        let q = self.q_operator(e)?;
        let t = self.bergman_operator(x, e)?.compose(&q.compose(&q));
        let n = self.op_norm_spectral(&t)?;
        Ok(NormEstimate { value: n.value.sqrt(), exact: n.exact })
    }

    /// x ∈ D_k(e): ‖x‖ < 1 and ‖B(x,e)Q(e)²‖′^{1/2} < k(1 − ‖x‖²).
    pub fn in_angular_region(&self, q: &AngularQuery) -> Result<bool> {
        self.check_query(q)?;
        let n = self.snorm(&q.x);
        if n >= 1.0 {
            return Ok(false);
        }
        Ok(self.angular_gauge(&q.x, &q.e)?.value < q.k * (1.0 - n * n))
    }

    fn check_query(&self, q: &AngularQuery) -> Result<()> {
        self.check(&q.x)?;
        self.check(&q.e)?;
        if !self.is_tripotent(&q.e) || self.norm2(&q.e) == 0.0 {
            return Err(Error::InvalidArgument("angular region needs a non-zero tripotent".into()));
        }
        if q.k <= 0.0 {
            return Err(Error::InvalidArgument("aperture k must be positive".into()));
        }
        Ok(())
    }

    /// Coefficient ⟨x|e⟩/⟨e|e⟩ of the orthogonal projection onto ℂe.
    pub fn projection_coefficient(&self, x: &Element, e: &Element) -> Result<C64> {
        self.check(x)?;
        self.check(e)?;
        let ee = self.ip(e, e).re;
        if ee == 0.0 {
            return Err(Error::InvalidArgument("projection onto the zero tripotent".into()));
        }
        Ok(self.ip(x, e) / ee)
    }

    /// x ↦ (⟨x|e⟩/⟨e|e⟩)·e.
    pub fn projection_device(&self, x: &Element, e: &Element) -> Result<Element> {
        Ok(e * self.projection_coefficient(x, e)?)
    }

    /// Returns k″ = 2√3·k′(1+k)/(1−k) when the two hypotheses
    /// ‖x − x′e‖ ≤ k(1−|x′|) and |1−x′| ≤ k′(1−|x′|²) hold, x′ the projection
    /// coefficient.
    pub fn membership_certificate(&self, x: &Element, e: &Element, k: f64, kprime: f64) -> Result<Option<f64>> {
        if !(0.0 < k && k < 1.0) || kprime <= 0.0 {
            return Err(Error::InvalidArgument("need k in (0,1) and k' > 0".into()));
        }
        if self.spectral_norm(x)? >= 1.0 {
            return Err(Error::Domain("x must lie in the open unit ball".into()));
        }
        let xp = self.projection_coefficient(x, e)?;
        let a = xp.norm();
        let off = self.snorm(&(x - e * xp));
        if off <= k * (1.0 - a) && (C64::new(1.0, 0.0) - xp).norm() <= kprime * (1.0 - a * a) {
            Ok(Some(2.0 * 3f64.sqrt() * kprime * (1.0 + k) / (1.0 - k)))
        } else {
            Ok(None)
        }
    }
}
