use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Element, System, C64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linearity {
    Linear,
    Antilinear,
}

/// A real-linear map on Z stored as a dense complex matrix; antilinear maps
/// act as `M · conj(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    pub matrix: DMatrix<C64>,
    pub linearity: Linearity,
}

impl Operator {
    pub fn linear(matrix: DMatrix<C64>) -> Self {
        Self { matrix, linearity: Linearity::Linear }
    }

    pub fn identity(dim: usize) -> Self {
        Self::linear(DMatrix::identity(dim, dim))
    }

    pub fn zero(dim: usize) -> Self {
        Self::linear(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_linear(&self) -> bool {
        self.linearity == Linearity::Linear
    }

    pub fn apply(&self, y: &Element) -> Element {
        match self.linearity {
            Linearity::Linear => &self.matrix * y,
            Linearity::Antilinear => &self.matrix * y.map(|v| v.conj()),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Operator) -> Operator {
        match self.linearity {
            Linearity::Linear => Operator { matrix: &self.matrix * &other.matrix, linearity: other.linearity },
            Linearity::Antilinear => {
                let linearity = match other.linearity {
                    Linearity::Linear => Linearity::Antilinear,
                    Linearity::Antilinear => Linearity::Linear,
                };
                Operator { matrix: &self.matrix * other.matrix.map(|v| v.conj()), linearity }
            }
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_kind(other)?;
        Ok(Operator { matrix: &self.matrix + &other.matrix, linearity: self.linearity })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.same_kind(other)?;
        Ok(Operator { matrix: &self.matrix - &other.matrix, linearity: self.linearity })
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator { matrix: &self.matrix * C64::new(s, 0.0), linearity: self.linearity }
    }

    /// Largest absolute matrix entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Complex trace (linear operators only).
    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Numerical rank of a linear operator.
    pub fn rank(&self, tol: f64) -> usize {
        self.matrix.clone().singular_values().iter().filter(|&&s| s > tol).count()
    }

    fn same_kind(&self, other: &Operator) -> Result<()> {
        if self.linearity != other.linearity || self.matrix.shape() != other.matrix.shape() {
            return Err(Error::InvalidArgument("operators differ in shape or linearity".into()));
        }
        Ok(())
    }
}

impl System {
    fn columns(&self, f: impl Fn(&Element) -> Element) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let col = f(&self.basis(k));
            m.set_column(k, &col);
        }
        m
    }

    /// D(a, b) = {a, b, ·}.
    pub fn d_operator(&self, a: &Element, b: &Element) -> Result<Operator> {
        self.check(a)?;
        self.check(b)?;
        Ok(Operator::linear(self.columns(|z| self.tp(a, b, z))))
    }

    /// Q(x) = {x, ·, x}, antilinear.
    pub fn q_operator(&self, x: &Element) -> Result<Operator> {
        self.check(x)?;
        Ok(Operator { matrix: self.columns(|y| self.tp(x, y, x)), linearity: Linearity::Antilinear })
    }

    /// B(x, y) = I − 2D(x, y) + Q(x)Q(y).
    pub fn bergman_operator(&self, x: &Element, y: &Element) -> Result<Operator> {
        let d = self.d_operator(x, y)?;
        let qq = self.q_operator(x)?.compose(&self.q_operator(y)?);
        Operator::identity(self.dim()).sub(&d.scale(2.0))?.add(&qq)
    }

    /// Peirce projectors (P₁, P_{1/2}, P₀) of a tripotent.
    pub fn peirce_projectors(&self, e: &Element) -> Result<(Operator, Operator, Operator)> {
        self.check(e)?;
        if !self.is_tripotent(e) {
            return Err(Error::InvalidArgument("peirce projectors need a tripotent".into()));
        }
        let q = self.q_operator(e)?;
        let p1 = q.compose(&q);
        let d = self.d_operator(e, e)?;
        let ph = d.sub(&p1)?.scale(2.0);
        let p0 = Operator::identity(self.dim()).sub(&p1)?.sub(&ph)?;
        Ok((p1, ph, p0))
    }
}
