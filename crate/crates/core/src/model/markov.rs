//! Signal-only operations: invariant laws, marginals, mixing, time reversal.

use crate::error::{Error, Result};
use crate::model::distribution::{tv_slices, Distribution};
use crate::model::kernel::TransitionKernel;
use crate::model::HmmModel;

pub const DEFAULT_STATIONARY_TOL: f64 = 1e-12;
pub const STATIONARY_ITERATION_CAP: usize = 1_000_000;

/// Closed communicating classes of the directed graph of positive
/// transitions, each listed in increasing state order.
pub fn closed_classes(kernel: &TransitionKernel) -> Vec<Vec<usize>> {
    let d = kernel.dim();
    let mut reach = vec![vec![false; d]; d];
    for (x, row) in reach.iter_mut().enumerate() {
        row[x] = true;
        for (y, r) in row.iter_mut().enumerate() {
            if kernel.prob(x, y) > 0.0 {
                *r = true;
            }
        }
    }
    for k in 0..d {
        for i in 0..d {
            if reach[i][k] {
                for j in 0..d {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let closed = |x: usize| (0..d).all(|y| !reach[x][y] || reach[y][x]);
    // each class is represented by its smallest member
    (0..d)
        .filter(|&x| closed(x) && (0..x).all(|y| !(reach[x][y] && reach[y][x])))
        .map(|x| (0..d).filter(|&y| reach[x][y]).collect())
        .collect()
}

/// The invariant law is unique iff this is one.
pub fn closed_class_count(kernel: &TransitionKernel) -> usize {
    closed_classes(kernel).len()
}

/// Invariant law by damped power iteration from the uniform start on the
/// unique closed class.
///
/// Each step averages consecutive iterates, `p <- (p + pP) / 2`, which has the
/// same fixed points as `P` but no periodicity. Returns once
/// `||pP - p||_TV <= tol`.
pub fn stationary_distribution(kernel: &TransitionKernel, tol: f64) -> Result<Distribution> {
    let classes = closed_classes(kernel);
    if classes.len() != 1 {
        return Err(Error::NonUniqueStationary {
            classes: classes.len(),
        });
    }
    // transient states carry no invariant mass; starting on the closed class
    // keeps them at exactly zero
    let d = kernel.dim();
    let mut p = Distribution::uniform_on(d, &classes[0]).into_weights();
    for _ in 0..STATIONARY_ITERATION_CAP {
        let q = kernel.apply_slice(&p);
        if tv_slices(&p, &q) <= tol {
            return Distribution::normalized(p);
        }
        for (a, b) in p.iter_mut().zip(&q) {
            *a = 0.5 * (*a + b);
        }
    }
    Err(Error::NoConvergence {
        iterations: STATIONARY_ITERATION_CAP,
    })
}

/// `start * P^n`.
pub fn n_step_marginal(kernel: &TransitionKernel, start: &Distribution, n: usize) -> Distribution {
    let mut p = start.weights().to_vec();
    for _ in 0..n {
        p = kernel.apply_slice(&p);
    }
    Distribution::from_weights_unchecked(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicityReport {
    pub ergodic: bool,
    /// `decay[n] = max_z ||delta_z P^n - pi||_TV` over `z` in the support of
    /// `pi`, for `n = 0..=horizon`.
    pub decay: Vec<f64>,
}

/// Mixing check on the support of the stationary law: ergodic iff the worst
/// point-mass start comes within `tol` of `pi` by `horizon` steps. States of
/// zero stationary mass are ignored.
pub fn check_ergodicity(model: &HmmModel, horizon: usize, tol: f64) -> ErgodicityReport {
    let d = model.dim();
    let pi = model.stationary.weights();
    let starts = model.stationary.support();
    let mut laws: Vec<Vec<f64>> = starts
        .iter()
        .map(|&z| Distribution::point(d, z).into_weights())
        .collect();
    let worst = |laws: &[Vec<f64>]| {
        laws.iter()
            .map(|l| tv_slices(l, pi))
            .fold(0.0_f64, f64::max)
    };
    let mut decay = Vec::with_capacity(horizon + 1);
    decay.push(worst(&laws));
    for _ in 0..horizon {
        for law in laws.iter_mut() {
            *law = model.kernel.apply_slice(law);
        }
        decay.push(worst(&laws));
    }
    let ergodic = decay.iter().any(|&v| v <= tol);
    ErgodicityReport { ergodic, decay }
}

/// `P~[x'][x] = pi[x] P[x][x'] / pi[x']`, the kernel of the time-reversed
/// stationary chain.
pub fn time_reverse(model: &HmmModel) -> Result<TransitionKernel> {
    let pi = model.stationary.weights();
    if let Some(state) = pi.iter().position(|&w| w <= 0.0) {
        return Err(Error::ZeroStationaryMass { state });
    }
    let d = model.dim();
    let rows = (0..d)
        .map(|to| {
            (0..d)
                .map(|from| pi[from] * model.kernel.prob(from, to) / pi[to])
                .collect()
        })
        .collect();
    Ok(TransitionKernel::from_rows_unchecked(rows))
}

/// Reversed kernel restricted to the support of `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversedKernel {
    pub kernel: TransitionKernel,
    /// `states[i]` is the original label of restricted state `i`.
    pub states: Vec<usize>,
}

pub fn time_reverse_on_support(model: &HmmModel) -> ReversedKernel {
    let pi = model.stationary.weights();
    let states = model.stationary.support();
    let rows = states
        .iter()
        .map(|&to| {
            states
                .iter()
                .map(|&from| pi[from] * model.kernel.prob(from, to) / pi[to])
                .collect()
        })
        .collect();
    ReversedKernel {
        kernel: TransitionKernel::from_rows_unchecked(rows),
        states,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&fixtures::m1().kernel, 1e-12).unwrap();
        assert!(tv_slices(pi.weights(), &[0.5, 0.5]) < 1e-12);

        let cycle = TransitionKernel::deterministic(4, |x| (x + 1) % 4);
        let pi = stationary_distribution(&cycle, 1e-12).unwrap();
        assert!(tv_slices(pi.weights(), &[0.25; 4]) < 1e-12);

        let err = stationary_distribution(&TransitionKernel::identity(3), 1e-12).unwrap_err();
        assert_eq!(err, Error::NonUniqueStationary { classes: 3 });
    }

    #[test]
    fn stationary_with_transient_state() {
        let model = fixtures::transient(0.9);
        let pi = stationary_distribution(&model.kernel, 1e-12).unwrap();
        assert!(tv_slices(pi.weights(), &[0.5, 0.5, 0.0]) < 1e-12);
        assert_eq!(pi[2], 0.0);
    }

    #[test]
    fn periodic_start_from_point_mass_converges() {
        // undamped iteration would oscillate on a period-2 chain
        let flip = TransitionKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let pi = stationary_distribution(&flip, 1e-12).unwrap();
        assert!(tv_slices(pi.weights(), &[0.5, 0.5]) < 1e-12);
    }

    #[test]
    fn marginal_examples() {
        let p = fixtures::m1().kernel;
        let d0 = Distribution::point(2, 0);
        assert_eq!(n_step_marginal(&p, &d0, 1).weights(), &[0.9, 0.1]);
        assert_eq!(n_step_marginal(&p, &d0, 0), d0);
        let two = n_step_marginal(&p, &d0, 2);
        assert!((two[0] - 0.82).abs() < 1e-15 && (two[1] - 0.18).abs() < 1e-15);
    }

    #[test]
    fn ergodicity_examples() {
        let r = check_ergodicity(&fixtures::m1(), 100, 1e-9);
        assert!(r.ergodic);
        for (n, v) in r.decay.iter().enumerate() {
            assert!((v - 0.8_f64.powi(n as i32)).abs() < 1e-14, "n = {n}");
        }
        assert!(!check_ergodicity(&fixtures::m2(), 200, 1e-9).ergodic);
        assert!(!check_ergodicity(&fixtures::m3(), 200, 1e-9).ergodic);
    }

    #[test]
    fn ergodicity_ignores_zero_mass_states() {
        let r = check_ergodicity(&fixtures::transient(0.9), 200, 1e-9);
        assert!(r.ergodic);
    }

    #[test]
    fn reversal_examples() {
        let m1 = fixtures::m1();
        let rev = time_reverse(&m1).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((rev.prob(x, y) - m1.kernel.prob(x, y)).abs() <= 1e-15);
            }
        }
        let rev = time_reverse(&fixtures::m2()).unwrap();
        for x in 0..4 {
            assert_eq!(rev.prob(x, (x + 3) % 4), 1.0);
        }
        let err = time_reverse(&fixtures::transient(0.9)).unwrap_err();
        assert_eq!(err, Error::ZeroStationaryMass { state: 2 });
        let restricted = time_reverse_on_support(&fixtures::transient(0.9));
        assert_eq!(restricted.states, vec![0, 1]);
        assert!(restricted.kernel.violations().is_empty());
    }
}
