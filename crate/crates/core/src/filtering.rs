//! The exact nonlinear filter and path likelihoods.
//!
//! Each step predicts through the signal kernel, weights by the observation
//! density and renormalizes, storing the log of the normalizer. Keeping the
//! state normalized avoids underflow at arbitrarily long horizons.

use crate::environment::backward_table;
use crate::error::{Error, Result};
use crate::model::{Distribution, HmmModel, Observation, ObservationChannel, ObservationPath};

/// Filter laws `Pi_0..Pi_N` with per-step log-normalizers `c_0..c_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterTrajectory {
    prior: Distribution,
    states: Vec<Distribution>,
    log_normalizers: Vec<f64>,
}

impl FilterTrajectory {
    pub fn prior(&self) -> &Distribution {
        &self.prior
    }

    pub fn states(&self) -> &[Distribution] {
        &self.states
    }

    pub fn state(&self, n: usize) -> &Distribution {
        &self.states[n]
    }

    pub fn log_normalizers(&self) -> &[f64] {
        &self.log_normalizers
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `sum_k c_k`, the log-likelihood of the observations under the prior.
    pub fn log_likelihood(&self) -> f64 {
        self.log_normalizers.iter().sum()
    }

    pub fn last(&self) -> &Distribution {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Observation densities `g(., obs)` divided by `exp(shift)`, together with
/// `shift`. Finite channels are used as given (`shift = 0`); continuous
/// densities are evaluated in the log domain and shifted by their maximum.
pub(crate) fn likelihood_weights(model: &HmmModel, obs: Observation) -> (Vec<f64>, f64) {
    match model.channel {
        ObservationChannel::Finite(_) => (
            (0..model.dim()).map(|x| model.channel.density(x, obs)).collect(),
            0.0,
        ),
        ObservationChannel::Continuous(_) => {
            let lg = model.log_likelihoods(obs);
            let shift = lg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !shift.is_finite() {
                return (vec![0.0; lg.len()], 0.0);
            }
            (lg.iter().map(|l| (l - shift).exp()).collect(), shift)
        }
    }
}

/// Bayes update of a predicted law; returns the posterior weights and the
/// log-normalizer.
fn correct(
    model: &HmmModel,
    predicted: &[f64],
    obs: Observation,
    time: usize,
) -> Result<(Vec<f64>, f64)> {
    let (weights, shift) = likelihood_weights(model, obs);
    let mut post: Vec<f64> = predicted
        .iter()
        .zip(&weights)
        .map(|(p, g)| if *p == 0.0 { 0.0 } else { p * g })
        .collect();
    let z: f64 = post.iter().sum();
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::DegenerateFilter { time });
    }
    post.iter_mut().for_each(|w| *w /= z);
    Ok((post, z.ln() + shift))
}

pub fn filter_init(
    model: &HmmModel,
    prior: &Distribution,
    y0: Observation,
) -> Result<(Distribution, f64)> {
    model.check_prior(prior)?;
    model.channel.check_observation(y0, 0)?;
    let (post, log_z) = correct(model, prior.weights(), y0, 0)?;
    Ok((Distribution::from_weights_unchecked(post), log_z))
}

/// One predict/correct step. A vanishing normalizer is reported at time 1.
pub fn filter_step(
    model: &HmmModel,
    current: &Distribution,
    y: Observation,
) -> Result<(Distribution, f64)> {
    model.check_prior(current)?;
    model.channel.check_observation(y, 1)?;
    step_at(model, current, y, 1)
}

fn step_at(
    model: &HmmModel,
    current: &Distribution,
    y: Observation,
    time: usize,
) -> Result<(Distribution, f64)> {
    let predicted = model.kernel.apply_slice(current.weights());
    let (post, log_z) = correct(model, &predicted, y, time)?;
    Ok((Distribution::from_weights_unchecked(post), log_z))
}

pub fn filter_run(
    model: &HmmModel,
    prior: &Distribution,
    y: &ObservationPath,
) -> Result<FilterTrajectory> {
    model.check_prior(prior)?;
    model.check_path(y)?;
    let (first, c0) = correct(model, prior.weights(), y.get(0), 0)?;
    let mut states = Vec::with_capacity(y.len());
    let mut log_normalizers = Vec::with_capacity(y.len());
    states.push(Distribution::from_weights_unchecked(first));
    log_normalizers.push(c0);
    for n in 1..y.len() {
        let (next, c) = step_at(model, &states[n - 1], y.get(n), n)?;
        states.push(next);
        log_normalizers.push(c);
    }
    Ok(FilterTrajectory {
        prior: prior.clone(),
        states,
        log_normalizers,
    })
}

/// One-step predictive law: the prior for `n = 0`, else `Pi_{n-1} P`.
pub fn predictor(
    model: &HmmModel,
    trajectory: &FilterTrajectory,
    n: usize,
) -> Result<Distribution> {
    if n > trajectory.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: trajectory.len(),
        });
    }
    if n == 0 {
        return Ok(trajectory.prior.clone());
    }
    Ok(model.kernel.apply(&trajectory.states[n - 1]))
}

/// `log E^prior[ prod_k g(X_k, y_k) ]`, evaluated by the backward recursion.
///
/// This route is independent of the forward filter, whose normalizers sum
/// to the same value.
pub fn path_log_likelihood(
    model: &HmmModel,
    prior: &Distribution,
    y: &ObservationPath,
) -> Result<f64> {
    model.check_prior(prior)?;
    let table = backward_table(model, y).map_err(|e| match e {
        Error::AllZeroRow { time } => Error::DegenerateFilter { time },
        other => other,
    })?;
    let (weights, shift) = likelihood_weights(model, y.get(0));
    let b0 = table.row(0);
    let z: f64 = (0..model.dim())
        .map(|x| prior[x] * weights[x] * b0[x])
        .sum();
    if !(z > 0.0) {
        return Err(Error::DegenerateFilter { time: 0 });
    }
    Ok(z.ln() + shift + table.log_scale_from(0))
}

/// `sum_k [ln g(b_k, y_k) - ln g(a_k, y_k)]` over the times where the two
/// state paths differ: the density of the observation law under path `b`
/// relative to path `a`.
pub fn obs_log_likelihood_ratio(
    channel: &ObservationChannel,
    path_a: &[usize],
    path_b: &[usize],
    y: &ObservationPath,
) -> Result<f64> {
    if path_a.len() != path_b.len() || path_a.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: if path_a.len() != y.len() {
                path_a.len()
            } else {
                path_b.len()
            },
        });
    }
    let mut total = 0.0;
    for (k, (&a, &b)) in path_a.iter().zip(path_b).enumerate() {
        if a == b {
            continue;
        }
        let obs = y.get(k);
        channel.check_observation(obs, k)?;
        let den = channel.log_density(a, obs);
        if den == f64::NEG_INFINITY {
            return Err(Error::UndefinedRatio { time: k });
        }
        total += channel.log_density(b, obs) - den;
    }
    Ok(total)
}

/// `D(a | b) = sum_x a_x ln(a_x / b_x)` with `0 ln 0 = 0`; `+inf` when `a`
/// charges a state `b` does not.
pub fn relative_entropy(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut total = 0.0;
    for (p, q) in a.weights().iter().zip(b.weights()) {
        if *p == 0.0 {
            continue;
        }
        if *q == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += p * (p / q).ln();
    }
    // rounding can leave a tiny negative sum for a ~ b
    Ok(total.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{n_step_marginal, simulate, FiniteChannel};

    fn sym(u: usize) -> Observation {
        Observation::Symbol(u)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn init_examples() {
        let m1 = fixtures::m1();
        let (pi0, log_z) = filter_init(&m1, &Distribution::uniform(2), sym(0)).unwrap();
        assert!(close(pi0.weights(), &[0.8, 0.2], 1e-15));
        assert!((log_z - 0.5_f64.ln()).abs() < 1e-15);

        let m2 = fixtures::m2();
        let err = filter_init(&m2, &Distribution::point(4, 0), sym(1)).unwrap_err();
        assert_eq!(err, Error::DegenerateFilter { time: 0 });
    }

    #[test]
    fn uninformative_channel_leaves_prior() {
        let m1 = fixtures::m1();
        let flat = HmmModel::new(
            m1.kernel.clone(),
            m1.stationary.clone(),
            ObservationChannel::uninformative(2, 3),
            "flat",
        )
        .unwrap();
        let prior = Distribution::new(vec![0.3, 0.7]).unwrap();
        let (pi0, _) = filter_init(&flat, &prior, sym(2)).unwrap();
        assert!(close(pi0.weights(), prior.weights(), 1e-15));
        let (pi1, _) = filter_step(&flat, &prior, sym(1)).unwrap();
        assert!(close(pi1.weights(), m1.kernel.apply(&prior).weights(), 1e-15));

        let y = ObservationPath::symbols(&[0, 1, 2, 2, 0, 1]);
        let traj = filter_run(&flat, &prior, &y).unwrap();
        for n in 0..y.len() {
            let expected = n_step_marginal(&flat.kernel, &prior, n);
            assert!(close(traj.state(n).weights(), expected.weights(), 1e-15));
        }
    }

    #[test]
    fn step_example() {
        let m1 = fixtures::m1();
        let current = Distribution::new(vec![0.8, 0.2]).unwrap();
        let (next, log_z) = filter_step(&m1, &current, sym(0)).unwrap();
        assert!(close(next.weights(), &[0.592 / 0.644, 0.052 / 0.644], 1e-15));
        assert!((next[0] - 0.919255).abs() < 1e-6);
        assert!((log_z - 0.644_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn forced_transition() {
        let m2 = fixtures::m2();
        let (next, _) = filter_step(&m2, &Distribution::point(4, 0), sym(1)).unwrap();
        assert_eq!(next, Distribution::point(4, 1));
    }

    #[test]
    fn run_reduces_to_init() {
        let m1 = fixtures::m1();
        let prior = Distribution::new(vec![0.25, 0.75]).unwrap();
        let traj = filter_run(&m1, &prior, &ObservationPath::symbols(&[1])).unwrap();
        let (pi0, c0) = filter_init(&m1, &prior, sym(1)).unwrap();
        assert_eq!(traj.states(), &[pi0]);
        assert_eq!(traj.log_normalizers(), &[c0]);
    }

    #[test]
    fn parity_never_separates_same_parity_states() {
        let m2 = fixtures::m2();
        let path = simulate(&m2, &Distribution::point(4, 0), 40, 3).unwrap();
        let prior = Distribution::uniform_on(4, &[0, 2]);
        let traj = filter_run(&m2, &prior, &path.observations).unwrap();
        for (n, state) in traj.states().iter().enumerate() {
            let expected = if n % 2 == 0 { [0, 2] } else { [1, 3] };
            assert_eq!(state, &Distribution::uniform_on(4, &expected), "n = {n}");
        }
    }

    #[test]
    fn degenerate_run_reports_time() {
        let m2 = fixtures::m2();
        let err = filter_run(
            &m2,
            &Distribution::point(4, 0),
            &ObservationPath::symbols(&[0, 1, 1]),
        )
        .unwrap_err();
        assert_eq!(err, Error::DegenerateFilter { time: 2 });
    }

    #[test]
    fn long_horizon_does_not_underflow() {
        let m1 = fixtures::m1();
        let path = simulate(&m1, &m1.stationary, 200_000, 11).unwrap();
        let traj = filter_run(&m1, &m1.stationary, &path.observations).unwrap();
        assert!(traj.last().check().is_ok());
        let ll = traj.log_likelihood();
        assert!(ll.is_finite() && ll < -1e4);
        let backward = path_log_likelihood(&m1, &m1.stationary, &path.observations).unwrap();
        assert!((ll - backward).abs() / ll.abs() < 1e-12);
    }

    #[test]
    fn predictor_examples() {
        let m1 = fixtures::m1();
        let prior = Distribution::new(vec![0.6, 0.4]).unwrap();
        let y = ObservationPath::symbols(&[0, 1, 1, 0]);
        let traj = filter_run(&m1, &prior, &y).unwrap();
        assert_eq!(predictor(&m1, &traj, 0).unwrap(), prior);
        assert_eq!(
            predictor(&m1, &traj, 4).unwrap(),
            m1.kernel.apply(traj.state(3))
        );
        assert!(predictor(&m1, &traj, 5).is_err());

        let flat = HmmModel::new(
            m1.kernel.clone(),
            m1.stationary.clone(),
            ObservationChannel::uninformative(2, 2),
            "flat",
        )
        .unwrap();
        let traj = filter_run(&flat, &flat.stationary, &y).unwrap();
        for n in 0..=4 {
            let p = predictor(&flat, &traj, n).unwrap();
            assert!(close(p.weights(), &[0.5, 0.5], 1e-15));
        }
    }

    #[test]
    fn likelihood_examples() {
        let m1 = fixtures::m1();
        let half = Distribution::uniform(2);
        let ll = path_log_likelihood(&m1, &half, &ObservationPath::symbols(&[0])).unwrap();
        assert!((ll - 0.5_f64.ln()).abs() < 1e-15);
        let ll = path_log_likelihood(&m1, &half, &ObservationPath::symbols(&[0, 0])).unwrap();
        assert!((ll - 0.322_f64.ln()).abs() < 1e-14);

        let flat = HmmModel::new(
            m1.kernel.clone(),
            m1.stationary.clone(),
            ObservationChannel::Finite(FiniteChannel::new(vec![vec![1.0; 2]; 2], vec![0.5; 2]).unwrap()),
            "flat",
        )
        .unwrap();
        let ll = path_log_likelihood(&flat, &half, &ObservationPath::symbols(&[0, 1, 1])).unwrap();
        assert!(ll.abs() < 1e-15);

        let m2 = fixtures::m2();
        let err = path_log_likelihood(&m2, &Distribution::point(4, 0), &ObservationPath::symbols(&[0, 0]))
            .unwrap_err();
        assert!(matches!(err, Error::DegenerateFilter { .. }));
    }

    #[test]
    fn ratio_examples() {
        let m1 = fixtures::m1();
        let y = ObservationPath::symbols(&[0]);
        assert_eq!(obs_log_likelihood_ratio(&m1.channel, &[0], &[0], &y).unwrap(), 0.0);
        let r = obs_log_likelihood_ratio(&m1.channel, &[0], &[1], &y).unwrap();
        assert!((r - (0.2_f64 / 0.8).ln()).abs() < 1e-15);

        let m2 = fixtures::m2();
        let y = ObservationPath::symbols(&[0, 0]);
        let err = obs_log_likelihood_ratio(&m2.channel, &[0, 1], &[0, 2], &y).unwrap_err();
        assert_eq!(err, Error::UndefinedRatio { time: 1 });
        assert!(obs_log_likelihood_ratio(&m2.channel, &[0], &[0, 1], &y).is_err());
    }

    #[test]
    fn entropy_examples() {
        let a = Distribution::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(relative_entropy(&a, &a).unwrap(), 0.0);
        let d = relative_entropy(&Distribution::point(2, 0), &Distribution::uniform(2)).unwrap();
        assert!((d - 2.0_f64.ln()).abs() < 1e-15);
        let inf = relative_entropy(&Distribution::point(2, 0), &Distribution::point(2, 1)).unwrap();
        assert_eq!(inf, f64::INFINITY);
    }
}
