use super::{Element, System, C64, MERGE_TOL};
use crate::error::Result;

/// x = Σ λⱼ eⱼ with λ strictly increasing and pairwise orthogonal tripotents.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub pairs: Vec<(f64, Element)>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self, dim: usize) -> Element {
        let mut x = Element::zeros(dim);
        for (l, e) in &self.pairs {
            x += e * C64::new(*l, 0.0);
        }
        x
    }

    pub fn max_lambda(&self) -> f64 {
        self.pairs.last().map(|p| p.0).unwrap_or(0.0)
    }
}

impl System {
    pub fn spectral_decomposition(&self, x: &Element) -> Result<SpectralDecomposition> {
        self.check(x)?;
        let mut raw: Vec<(f64, Element)> = Vec::new();
        for b in self.blocks() {
            for (lam, local) in b.simple.spectral(&x.as_slice()[b.range()]) {
                let mut e = self.zero();
                e.as_mut_slice()[b.range()].copy_from_slice(&local);
                raw.push((lam, e));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let top = raw.last().map(|p| p.0).unwrap_or(0.0);
        let mut pairs: Vec<(f64, Element, usize)> = Vec::new();
        for (lam, e) in raw {
            match pairs.last_mut() {
                Some((l0, acc, n)) if (lam - *l0).abs() < MERGE_TOL * top => {
                    *acc += e;
                    *l0 = (*l0 * *n as f64 + lam) / (*n as f64 + 1.0);
                    *n += 1;
                }
                _ => pairs.push((lam, e, 1)),
            }
        }
        Ok(SpectralDecomposition { pairs: pairs.into_iter().map(|(l, e, _)| (l, e)).collect() })
    }
}
