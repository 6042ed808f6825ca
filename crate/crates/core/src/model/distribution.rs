use std::ops::Index;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`Distribution`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability row over the states `0..d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validating constructor: weights must be finite, nonnegative and sum to
    /// one within [`MASS_TOLERANCE`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        Ok(Self { weights })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("bad weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("zero total mass".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { weights })
    }

    /// Wraps weights without any check. Used for deliberately corrupted
    /// fixtures and by internal code that already maintains the invariants.
    pub fn from_weights_unchecked(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            weights: vec![1.0 / dim as f64; dim],
        }
    }

    /// Point mass at `state`.
    pub fn point(dim: usize, state: usize) -> Self {
        let mut weights = vec![0.0; dim];
        weights[state] = 1.0;
        Self { weights }
    }

    /// Uniform law on a subset of states.
    pub fn uniform_on(dim: usize, states: &[usize]) -> Self {
        let mut weights = vec![0.0; dim];
        for &s in states {
            weights[s] = 1.0 / states.len() as f64;
        }
        Self { weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    /// States carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&x| self.weights[x] > 0.0).collect()
    }

    /// Mass of a set of states given by a predicate.
    pub fn mass_where(&self, mut pred: impl FnMut(usize) -> bool) -> f64 {
        (0..self.dim())
            .filter(|&x| pred(x))
            .map(|x| self.weights[x])
            .sum()
    }

    /// `true` when every state charged by `self` is charged by `other`.
    pub fn is_absolutely_continuous_wrt(&self, other: &Distribution) -> bool {
        self.weights
            .iter()
            .zip(&other.weights)
            .all(|(a, b)| *a == 0.0 || *b > 0.0)
    }

    pub fn check(&self) -> Result<()> {
        check_weights(&self.weights)
    }
}

impl Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, x: usize) -> &f64 {
        &self.weights[x]
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution("empty weight vector".into()));
    }
    for (x, w) in weights.iter().enumerate() {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} at state {x}"
            )));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("total mass {total}")));
    }
    Ok(())
}

/// Total variation distance in the full-variation convention
/// `sum_x |a_x - b_x|`, ranging over `[0, 2]`.
///
/// Disjointly supported laws are at distance 2, not 1.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(tv_slices(a.weights(), b.weights()))
}

pub(crate) fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
