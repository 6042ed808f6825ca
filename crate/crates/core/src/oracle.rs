//! Exact answers by enumerating every signal path of a short window.
//!
//! Deliberately naive: plain products in the probability domain, no shared
//! code with the recursive algorithms it checks.

use crate::error::{Error, Result};
use crate::model::{Distribution, HmmModel, ObservationPath};

/// Largest number of paths `d^(N+1)` a table may enumerate.
pub const PATH_LIMIT: u128 = 10_000_000;

/// Joint weights `P(x_0..x_N, y_0..y_N)` (densities against the reference
/// measure times `phi[y_k]`) for every state path, with the path index read
/// as base-`d` digits, `x_0` most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    dim: usize,
    length: usize,
    weights: Vec<f64>,
    total: f64,
}

impl JointTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of time points `N + 1`.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn path_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Compensated sum of all weights.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn path(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.length];
        let mut i = index;
        for slot in out.iter_mut().rev() {
            *slot = i % self.dim;
            i /= self.dim;
        }
        out
    }

    /// `(path, weight)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.weights.iter().enumerate().map(|(i, &w)| (self.path(i), w))
    }

    /// Calls `f` on every path of positive weight, in index order.
    pub fn for_each_charged(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut path = vec![0usize; self.length];
        for &w in &self.weights {
            if w > 0.0 {
                f(&path, w);
            }
            for slot in path.iter_mut().rev() {
                *slot += 1;
                if *slot < self.dim {
                    break;
                }
                *slot = 0;
            }
        }
    }
}

pub fn joint_table(model: &HmmModel, prior: &Distribution, y: &ObservationPath) -> Result<JointTable> {
    let channel = model.finite_channel()?;
    model.check_prior(prior)?;
    model.check_path(y)?;
    let d = model.dim();
    let length = y.len();
    let paths = (d as u128)
        .checked_pow(length as u32)
        .filter(|&p| p <= PATH_LIMIT)
        .ok_or(Error::SizeGuard {
            paths: (d as u128).saturating_pow(length as u32),
            limit: PATH_LIMIT,
        })? as usize;
    let symbols = y.as_symbols().ok_or(Error::ContinuousChannel)?;
    let phi = channel.reference();

    let mut weights = Vec::with_capacity(paths);
    let mut total = Kahan::default();
    let mut path = vec![0usize; length];
    for index in 0..paths {
        let mut i = index;
        for slot in path.iter_mut().rev() {
            *slot = i % d;
            i /= d;
        }
        let mut w = prior[path[0]];
        for k in 0..length {
            if k > 0 {
                w *= model.kernel.prob(path[k - 1], path[k]);
            }
            w *= channel.density(path[k], symbols[k]) * phi[symbols[k]];
        }
        total.add(w);
        weights.push(w);
    }
    Ok(JointTable {
        dim: d,
        length,
        weights,
        total: total.sum,
    })
}

#[derive(Default, Clone)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Law of `query(path)` given `condition(path)`, by summation over the table.
pub fn oracle_conditional(
    table: &JointTable,
    condition: impl Fn(&[usize]) -> bool,
    query: impl Fn(&[usize]) -> usize,
) -> Result<Distribution> {
    let mut mass = vec![Kahan::default(); table.dim];
    let mut total = Kahan::default();
    table.for_each_charged(|path, w| {
        if condition(path) {
            mass[query(path)].add(w);
            total.add(w);
        }
    });
    if !(total.sum > 0.0) {
        return Err(Error::ZeroMassCondition);
    }
    Ok(Distribution::from_weights_unchecked(
        mass.iter().map(|m| m.sum / total.sum).collect(),
    ))
}

/// `E[f(path) | condition(path)]`.
pub fn expectation(
    table: &JointTable,
    condition: impl Fn(&[usize]) -> bool,
    f: impl Fn(&[usize]) -> f64,
) -> Result<f64> {
    let mut num = Kahan::default();
    let mut total = Kahan::default();
    table.for_each_charged(|path, w| {
        if condition(path) {
            num.add(w * f(path));
            total.add(w);
        }
    });
    if !(total.sum > 0.0) {
        return Err(Error::ZeroMassCondition);
    }
    Ok(num.sum / total.sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{conditional_kernels, pinned_smoother};
    use crate::filtering::{filter_run, path_log_likelihood};
    use crate::fixtures;
    use crate::model::{simulate, ObservationChannel};

    #[test]
    fn single_time_point() {
        let m1 = fixtures::m1();
        let prior = Distribution::new(vec![0.3, 0.7]).unwrap();
        let t = joint_table(&m1, &prior, &ObservationPath::symbols(&[1])).unwrap();
        assert_eq!(t.path_count(), 2);
        assert_eq!(t.weight(0), 0.3 * 0.2);
        assert_eq!(t.weight(1), 0.7 * 0.8);
    }

    #[test]
    fn deterministic_chain_paths() {
        let m2 = fixtures::m2();
        let flat = HmmModel::new(
            m2.kernel.clone(),
            m2.stationary.clone(),
            ObservationChannel::uninformative(4, 1),
            "flat",
        )
        .unwrap();
        let t = joint_table(&flat, &flat.stationary, &ObservationPath::symbols(&[0; 5])).unwrap();
        assert_eq!(t.iter().filter(|(_, w)| *w > 0.0).count(), 4);
        let mut seen = Vec::new();
        t.for_each_charged(|p, _| seen.push(p.to_vec()));
        assert_eq!(seen.len(), 4);
        assert_eq!(seen[1], vec![1, 2, 3, 0, 1]);
    }

    #[test]
    fn total_matches_likelihood() {
        let m1 = fixtures::m1();
        let y = ObservationPath::symbols(&[0, 1, 1, 0, 1, 0]);
        let t = joint_table(&m1, &m1.stationary, &y).unwrap();
        let ll = path_log_likelihood(&m1, &m1.stationary, &y).unwrap();
        assert!((t.total() - ll.exp()).abs() < 1e-12);
        assert!((t.path(0b101101) == vec![1, 0, 1, 1, 0, 1]));
    }

    #[test]
    fn queries_match_recursions() {
        let m1 = fixtures::m1();
        let y = simulate(&m1, &m1.stationary, 6, 4).unwrap().observations;
        let t = joint_table(&m1, &m1.stationary, &y).unwrap();
        let last = y.horizon();

        let filtered = oracle_conditional(&t, |_| true, |p| p[last]).unwrap();
        let run = filter_run(&m1, &m1.stationary, &y).unwrap();
        for x in 0..2 {
            assert!((filtered[x] - run.last()[x]).abs() < 1e-14);
        }

        let pinned = pinned_smoother(&m1, &y, &m1.stationary, last).unwrap();
        for x in 0..2 {
            let row = oracle_conditional(&t, |p| p[last] == x, |p| p[0]).unwrap();
            let ours = pinned.rows[x].as_ref().unwrap();
            assert!((row[0] - ours[0]).abs() < 1e-14);
        }

        let seq = conditional_kernels(&m1, &y).unwrap();
        for n in 1..=last {
            for x in 0..2 {
                let row = oracle_conditional(&t, |p| p[n - 1] == x, |p| p[n]).unwrap();
                assert!((row[1] - seq.kernel(n).row(x)[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn guards() {
        let m2 = fixtures::m2();
        let y = simulate(&m2, &m2.stationary, 13, 0).unwrap().observations;
        assert!(matches!(
            joint_table(&m2, &m2.stationary, &y),
            Err(Error::SizeGuard { .. })
        ));
        let t = joint_table(&m2, &Distribution::point(4, 0), &ObservationPath::symbols(&[0, 1])).unwrap();
        assert_eq!(
            oracle_conditional(&t, |p| p[1] == 2, |p| p[0]).unwrap_err(),
            Error::ZeroMassCondition
        );
        let e = expectation(&t, |_| true, |p| p[1] as f64).unwrap();
        assert_eq!(e, 1.0);
    }
}
