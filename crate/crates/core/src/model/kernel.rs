use crate::error::{Error, Result};
use crate::model::distribution::{Distribution, MASS_TOLERANCE};

/// Row-stochastic square table; row `x` is the law of the next state given
/// the current state `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    rows: Vec<Vec<f64>>,
}

impl TransitionKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let kernel = Self { rows };
        let problems = kernel.violations();
        match problems.first() {
            None => Ok(kernel),
            Some(p) => Err(Error::InvalidKernel(p.clone())),
        }
    }

    /// Wraps rows without validation; see [`crate::model::validate_model`].
    pub fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            rows: (0..dim)
                .map(|x| Distribution::point(dim, x).into_weights())
                .collect(),
        }
    }

    /// Deterministic map `x -> next(x)`.
    pub fn deterministic(dim: usize, next: impl Fn(usize) -> usize) -> Self {
        Self {
            rows: (0..dim)
                .map(|x| Distribution::point(dim, next(x)).into_weights())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.rows[from][to]
    }

    /// Row-vector product `start * P`.
    pub fn apply(&self, start: &Distribution) -> Distribution {
        Distribution::from_weights_unchecked(self.apply_slice(start.weights()))
    }

    pub(crate) fn apply_slice(&self, start: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (x, &w) in start.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.rows[x]) {
                *o += w * p;
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &TransitionKernel) -> TransitionKernel {
        TransitionKernel {
            rows: self.rows.iter().map(|r| other.apply_slice(r)).collect(),
        }
    }

    /// Relabels states: state `x` of `self` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> TransitionKernel {
        let d = self.dim();
        let mut rows = vec![vec![0.0; d]; d];
        for x in 0..d {
            for y in 0..d {
                rows[perm[x]][perm[y]] = self.rows[x][y];
            }
        }
        TransitionKernel { rows }
    }

    /// `true` when every entry is strictly positive.
    pub fn is_strictly_positive(&self) -> bool {
        self.rows.iter().flatten().all(|&p| p > 0.0)
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        let d = self.rows.len();
        let mut out = Vec::new();
        if d == 0 {
            out.push("kernel has no states".to_string());
        }
        for (x, row) in self.rows.iter().enumerate() {
            if row.len() != d {
                out.push(format!("row {x} has {} entries, expected {d}", row.len()));
                continue;
            }
            if let Some((y, p)) = row
                .iter()
                .enumerate()
                .find(|(_, p)| !p.is_finite() || **p < 0.0)
            {
                out.push(format!("entry ({x}, {y}) = {p} is not a probability"));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > MASS_TOLERANCE {
                out.push(format!("row {x} sums to {total}"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_stochastic_rows() {
        let err = TransitionKernel::new(vec![vec![0.5, 0.6], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidKernel(_)));
        assert!(TransitionKernel::new(vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn apply_and_compose() {
        let p = TransitionKernel::new(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        let p2 = p.compose(&p);
        assert!((p2.prob(0, 0) - 0.82).abs() < 1e-15);
        let out = p.apply(&Distribution::point(2, 0));
        assert_eq!(out.weights(), &[0.9, 0.1]);
    }

    #[test]
    fn permutation_relabels() {
        let p = TransitionKernel::deterministic(3, |x| (x + 1) % 3);
        let q = p.permuted(&[2, 0, 1]);
        // old 0 -> old 1 becomes new 2 -> new 0
        assert_eq!(q.prob(2, 0), 1.0);
    }
}
