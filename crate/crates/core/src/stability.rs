//! Sensitivity of the filter to its initial law.

use crate::environment::pinned_smoother;
use crate::error::{Error, Result};
use crate::filtering::{filter_init, filter_run, relative_entropy};
use crate::model::{n_step_marginal, tv_slices, Distribution, HmmModel, ObservationPath};

/// `||Pi_n^mu - Pi_n^nu||_TV` and `D(Pi_n^mu | Pi_n^nu)` for `n = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCurve {
    pub tv: Vec<f64>,
    pub entropy: Vec<f64>,
    /// First time at which one of the two filters hit a zero normalizer.
    pub truncated_at: Option<usize>,
}

impl StabilityCurve {
    pub fn len(&self) -> usize {
        self.tv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tv.is_empty()
    }
}

/// Runs both filters side by side. A degenerate step ends the curve and is
/// recorded in `truncated_at`; invalid priors or paths are still errors.
pub fn stability_curve(
    model: &HmmModel,
    mu: &Distribution,
    nu: &Distribution,
    y: &ObservationPath,
) -> Result<StabilityCurve> {
    model.check_prior(mu)?;
    model.check_prior(nu)?;
    model.check_path(y)?;
    let mut curve = StabilityCurve {
        tv: Vec::with_capacity(y.len()),
        entropy: Vec::with_capacity(y.len()),
        truncated_at: None,
    };
    let start = filter_init(model, mu, y.get(0)).and_then(|(a, _)| Ok((a, filter_init(model, nu, y.get(0))?.0)));
    let (mut a, mut b) = match start {
        Ok(pair) => pair,
        Err(Error::DegenerateFilter { time }) => {
            curve.truncated_at = Some(time);
            return Ok(curve);
        }
        Err(e) => return Err(e),
    };
    for n in 0..y.len() {
        if n > 0 {
            let next = step(model, &a, y, n).and_then(|a2| Ok((a2, step(model, &b, y, n)?)));
            match next {
                Ok((a2, b2)) => {
                    a = a2;
                    b = b2;
                }
                Err(Error::DegenerateFilter { .. }) => {
                    curve.truncated_at = Some(n);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        curve.tv.push(tv_slices(a.weights(), b.weights()));
        curve.entropy.push(relative_entropy(&a, &b)?);
    }
    Ok(curve)
}

fn step(model: &HmmModel, current: &Distribution, y: &ObservationPath, n: usize) -> Result<Distribution> {
    let window = ObservationPath::new(vec![y.get(n)]);
    let predicted = model.kernel.apply(current);
    filter_run(model, &predicted, &window)
        .map(|t| t.last().clone())
        .map_err(|e| match e {
            Error::DegenerateFilter { .. } => Error::DegenerateFilter { time: n },
            other => other,
        })
}

/// Density `Lambda_n(x) = dPi_n^mu / dPi_n^pi (x)`, expressed through the
/// pinned smoother: the conditional mean of `(dmu/dpi)(X_0)` given the
/// observations and `X_n = x`, over its mean given the observations alone.
/// Zero on states the reference filter does not charge.
pub fn rn_derivative(
    model: &HmmModel,
    mu: &Distribution,
    y: &ObservationPath,
    n: usize,
) -> Result<Vec<f64>> {
    model.check_prior(mu)?;
    let pi = model.stationary.weights();
    if let Some(state) = (0..model.dim()).find(|&x| mu[x] > 0.0 && pi[x] == 0.0) {
        return Err(Error::SupportViolation { state });
    }
    let ratio: Vec<f64> = (0..model.dim())
        .map(|x| if pi[x] > 0.0 { mu[x] / pi[x] } else { 0.0 })
        .collect();
    let pinned = pinned_smoother(model, y, &model.stationary, n)?;
    let numerator: Vec<f64> = pinned
        .rows
        .iter()
        .map(|row| match row {
            Some(r) => r.weights().iter().zip(&ratio).map(|(p, q)| p * q).sum(),
            None => 0.0,
        })
        .collect();
    let denominator: f64 = numerator.iter().zip(pinned.terminal.weights()).map(|(a, b)| a * b).sum();
    if !(denominator > 0.0) {
        return Err(Error::DegenerateFilter { time: n });
    }
    Ok(numerator.into_iter().map(|v| v / denominator).collect())
}

/// `| ||Pi_n^mu - Pi_n^pi|| - sum_x Pi_n^pi(x) |Lambda_n(x) - 1| |`.
pub fn tv_identity_check(
    model: &HmmModel,
    mu: &Distribution,
    y: &ObservationPath,
    n: usize,
) -> Result<f64> {
    let lambda = rn_derivative(model, mu, y, n)?;
    let window = y.prefix(n);
    let with_mu = filter_run(model, mu, &window)?;
    let with_pi = filter_run(model, &model.stationary, &window)?;
    let direct = tv_slices(with_mu.last().weights(), with_pi.last().weights());
    let via_density: f64 = with_pi
        .last()
        .weights()
        .iter()
        .zip(&lambda)
        .map(|(p, l)| p * (l - 1.0).abs())
        .sum();
    Ok((direct - via_density).abs())
}

/// `mu = weight * absolutely_continuous + (1 - weight) * singular` with
/// respect to the support of a reference law.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueSplit {
    pub weight: f64,
    /// `mu` restricted to the reference support, renormalized; `None` when
    /// `weight == 0`.
    pub absolutely_continuous: Option<Distribution>,
    /// `mu` restricted off the reference support, renormalized; `None` when
    /// `weight == 1`.
    pub singular: Option<Distribution>,
}

pub fn lebesgue_split(mu: &Distribution, rho: &Distribution) -> Result<LebesgueSplit> {
    if mu.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: mu.dim(),
        });
    }
    let inside = |x: usize| rho[x] > 0.0;
    let part = |keep: bool| -> Option<Distribution> {
        let w: Vec<f64> = (0..mu.dim())
            .map(|x| if inside(x) == keep { mu[x] } else { 0.0 })
            .collect();
        let total: f64 = w.iter().sum();
        (total > 0.0).then(|| Distribution::from_weights_unchecked(w.iter().map(|v| v / total).collect()))
    };
    let ac = part(true);
    let singular = part(false);
    let weight = match (&ac, &singular) {
        (Some(_), None) => 1.0,
        (None, _) => 0.0,
        (Some(_), Some(_)) => mu.mass_where(inside),
    };
    Ok(LebesgueSplit {
        weight,
        absolutely_continuous: ac,
        singular,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitIdentityReport {
    /// `max_x |Pi^mu(x) - w_n Pi^nu(x) - (1 - w_n) Pi^perp(x)|`.
    pub residual: f64,
    /// `P^mu(X_0 in supp(rho) | y_0..y_n)`.
    pub posterior_weight: f64,
    /// `||Pi^mu - Pi^rho||`.
    pub distance: f64,
    /// `||Pi^nu - Pi^rho|| + 2 (1 - w_n)`.
    pub bound: f64,
}

impl SplitIdentityReport {
    pub fn bound_holds(&self, tol: f64) -> bool {
        self.distance <= self.bound + tol
    }
}

/// Checks that the filter from `mu` mixes the filters from the two parts of
/// its split against `rho`, with the posterior probability of the
/// absolutely continuous part as mixing weight.
pub fn split_filter_identity_check(
    model: &HmmModel,
    mu: &Distribution,
    rho: &Distribution,
    y: &ObservationPath,
    n: usize,
) -> Result<SplitIdentityReport> {
    let split = lebesgue_split(mu, rho)?;
    let window = y.prefix(n);
    let with_mu = filter_run(model, mu, &window)?;
    let with_rho = filter_run(model, rho, &window)?;
    let initial = pinned_smoother(model, y, mu, n)?.initial;
    let w_n = match (&split.absolutely_continuous, &split.singular) {
        (Some(_), None) => 1.0,
        (None, _) => 0.0,
        (Some(_), Some(_)) => initial.mass_where(|x| rho[x] > 0.0),
    };

    let d = model.dim();
    let mut mixed = vec![0.0; d];
    let mut ac_distance = 0.0;
    if let Some(nu) = &split.absolutely_continuous {
        let law = filter_run(model, nu, &window)?;
        ac_distance = tv_slices(law.last().weights(), with_rho.last().weights());
        mixed.iter_mut().zip(law.last().weights()).for_each(|(m, p)| *m += w_n * p);
    }
    if let Some(perp) = &split.singular {
        let law = filter_run(model, perp, &window)?;
        mixed.iter_mut().zip(law.last().weights()).for_each(|(m, p)| *m += (1.0 - w_n) * p);
    }
    let residual = with_mu
        .last()
        .weights()
        .iter()
        .zip(&mixed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let bound = if split.absolutely_continuous.is_some() {
        ac_distance + 2.0 * (1.0 - w_n)
    } else {
        2.0
    };
    Ok(SplitIdentityReport {
        residual,
        posterior_weight: w_n,
        distance: tv_slices(with_mu.last().weights(), with_rho.last().weights()),
        bound,
    })
}

/// Mass that `mu P^n` puts outside the support of the stationary law.
pub fn singular_mass(model: &HmmModel, mu: &Distribution, n: usize) -> f64 {
    let law = n_step_marginal(&model.kernel, mu, n);
    let pi = model.stationary.weights();
    law.mass_where(|x| pi[x] == 0.0)
}
