//! Finite-state signal/observation models and measure arithmetic.

mod channel;
mod distribution;
mod kernel;
mod markov;
mod simulate;

pub use channel::{
    check_nondegeneracy, ContinuousChannel, FiniteChannel, GaussianParams, Observation,
    ObservationChannel, ObservationPath,
};
pub use distribution::{tv_distance, Distribution, MASS_TOLERANCE};
pub use kernel::TransitionKernel;
pub use markov::{
    check_ergodicity, closed_class_count, closed_classes, n_step_marginal, stationary_distribution,
    time_reverse, time_reverse_on_support, ErgodicityReport, ReversedKernel,
    DEFAULT_STATIONARY_TOL, STATIONARY_ITERATION_CAP,
};
pub use simulate::{derive_seed, simulate, SimulatedPath};

pub(crate) use distribution::tv_slices;

use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on `|| pi P - pi ||_TV` for a model's declared stationary law.
pub const INVARIANCE_TOLERANCE: f64 = 1e-10;

/// The triple (signal kernel, invariant law, observation channel).
#[derive(Debug, Clone)]
pub struct HmmModel {
    pub kernel: TransitionKernel,
    pub stationary: Distribution,
    pub channel: ObservationChannel,
    pub label: String,
}

impl HmmModel {
    /// Builds and validates a model.
    pub fn new(
        kernel: TransitionKernel,
        stationary: Distribution,
        channel: ObservationChannel,
        label: impl Into<String>,
    ) -> Result<Self> {
        let model = Self::new_unchecked(kernel, stationary, channel, label);
        let report = validate_model(&model);
        if report.is_empty() {
            Ok(model)
        } else {
            Err(Error::InvalidModel(report.to_string()))
        }
    }

    /// Builds a model computing its stationary law by power iteration.
    pub fn with_computed_stationary(
        kernel: TransitionKernel,
        channel: ObservationChannel,
        label: impl Into<String>,
    ) -> Result<Self> {
        let stationary = stationary_distribution(&kernel, DEFAULT_STATIONARY_TOL)?;
        Self::new(kernel, stationary, channel, label)
    }

    pub fn new_unchecked(
        kernel: TransitionKernel,
        stationary: Distribution,
        channel: ObservationChannel,
        label: impl Into<String>,
    ) -> Self {
        Self {
            kernel,
            stationary,
            channel,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn finite_channel(&self) -> Result<&FiniteChannel> {
        self.channel.as_finite().ok_or(Error::ContinuousChannel)
    }

    /// Checks that `y` is nonempty and every value fits the channel.
    pub fn check_path(&self, y: &ObservationPath) -> Result<()> {
        if y.is_empty() {
            return Err(Error::EmptyPath);
        }
        for (k, obs) in y.values().iter().enumerate() {
            self.channel.check_observation(*obs, k)?;
        }
        Ok(())
    }

    pub fn check_prior(&self, prior: &Distribution) -> Result<()> {
        if prior.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: prior.dim(),
            });
        }
        prior.check()
    }

    /// Log-densities `ln g(x, obs)` for every state.
    pub(crate) fn log_likelihoods(&self, obs: Observation) -> Vec<f64> {
        (0..self.dim())
            .map(|x| self.channel.log_density(x, obs))
            .collect()
    }

    /// Same model with states relabelled by `perm` (state `x` becomes
    /// `perm[x]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut stationary = vec![0.0; self.dim()];
        for (x, w) in self.stationary.weights().iter().enumerate() {
            stationary[perm[x]] = *w;
        }
        Ok(Self {
            kernel: self.kernel.permuted(perm),
            stationary: Distribution::from_weights_unchecked(stationary),
            channel: self.channel.permuted(perm)?,
            label: format!("{}-permuted", self.label),
        })
    }
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Kernel(String),
    Stationary(String),
    NotInvariant { tv: f64 },
    Channel(String),
    Dimension { kernel: usize, other: usize, what: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Kernel(msg) => write!(f, "kernel: {msg}"),
            Violation::Stationary(msg) => write!(f, "stationary: {msg}"),
            Violation::NotInvariant { tv } => {
                write!(f, "stationary law is not invariant (||pi P - pi|| = {tv:e})")
            }
            Violation::Channel(msg) => write!(f, "channel: {msg}"),
            Violation::Dimension { kernel, other, what } => {
                write!(f, "{what} has dimension {other}, kernel has {kernel}")
            }
        }
    }
}

/// List of violated invariants; empty for a valid model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(Violation::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

pub fn validate_model(model: &HmmModel) -> ValidationReport {
    let mut violations: Vec<Violation> = model
        .kernel
        .violations()
        .into_iter()
        .map(Violation::Kernel)
        .collect();
    let d = model.kernel.dim();

    if model.stationary.dim() != d {
        violations.push(Violation::Dimension {
            kernel: d,
            other: model.stationary.dim(),
            what: "stationary law",
        });
    } else if let Err(e) = model.stationary.check() {
        violations.push(Violation::Stationary(e.to_string()));
    } else if violations.is_empty() {
        let moved = model.kernel.apply(&model.stationary);
        let tv = tv_slices(moved.weights(), model.stationary.weights());
        if tv > INVARIANCE_TOLERANCE {
            violations.push(Violation::NotInvariant { tv });
        }
    }

    match &model.channel {
        ObservationChannel::Finite(c) => {
            violations.extend(c.violations().into_iter().map(Violation::Channel));
            if c.density_table().len() != d {
                violations.push(Violation::Dimension {
                    kernel: d,
                    other: c.density_table().len(),
                    what: "channel",
                });
            }
        }
        ObservationChannel::Continuous(c) => {
            if let Some(g) = c.gaussian_params() {
                if g.means.len() != d {
                    violations.push(Violation::Dimension {
                        kernel: d,
                        other: g.means.len(),
                        what: "channel",
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}
