//! Observation channels: per-state densities `g(x, y)` against a reference
//! measure.
//!
//! Finite-alphabet channels carry an explicit reference weight `phi[u] > 0`
//! with `sum_u g[x][u] * phi[u] = 1`. Continuous channels carry an evaluable
//! log-density and, optionally, a sampler. Constant factors of the reference
//! measure cancel in every filter recursion.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Distribution as _, Normal};

use crate::error::{Error, Result};
use crate::model::distribution::MASS_TOLERANCE;

/// A single observed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Symbol(usize),
    Real(f64),
}

/// Observation record `y_0..y_N`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservationPath {
    values: Vec<Observation>,
}

impl ObservationPath {
    pub fn new(values: Vec<Observation>) -> Self {
        Self { values }
    }

    pub fn symbols(symbols: &[usize]) -> Self {
        Self {
            values: symbols.iter().map(|&u| Observation::Symbol(u)).collect(),
        }
    }

    pub fn reals(values: &[f64]) -> Self {
        Self {
            values: values.iter().map(|&v| Observation::Real(v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Final time index `N`.
    ///
    /// # Panics
    /// On an empty path.
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> Observation {
        self.values[k]
    }

    pub fn values(&self) -> &[Observation] {
        &self.values
    }

    /// `y_0..y_n`.
    pub fn prefix(&self, n: usize) -> ObservationPath {
        Self {
            values: self.values[..=n].to_vec(),
        }
    }

    /// The shifted record `y_n, y_{n+1}, ...`.
    pub fn shifted(&self, n: usize) -> ObservationPath {
        Self {
            values: self.values[n..].to_vec(),
        }
    }

    /// Symbol indices, if every observation is a symbol.
    pub fn as_symbols(&self) -> Option<Vec<usize>> {
        self.values
            .iter()
            .map(|o| match o {
                Observation::Symbol(u) => Some(*u),
                Observation::Real(_) => None,
            })
            .collect()
    }
}

/// Finite observation alphabet of size `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteChannel {
    density: Vec<Vec<f64>>,
    reference: Vec<f64>,
}

impl FiniteChannel {
    /// Validating constructor.
    pub fn new(density: Vec<Vec<f64>>, reference: Vec<f64>) -> Result<Self> {
        let channel = Self { density, reference };
        match channel.violations().into_iter().next() {
            None => Ok(channel),
            Some(msg) => Err(Error::InvalidChannel(msg)),
        }
    }

    pub fn new_unchecked(density: Vec<Vec<f64>>, reference: Vec<f64>) -> Self {
        Self { density, reference }
    }

    /// Channel given by emission probabilities `q[x][u]` against counting
    /// measure (`phi = 1`).
    pub fn from_emissions(emissions: Vec<Vec<f64>>) -> Result<Self> {
        let m = emissions.first().map_or(0, Vec::len);
        Self::new(emissions, vec![1.0; m])
    }

    pub fn alphabet_size(&self) -> usize {
        self.reference.len()
    }

    pub fn density_table(&self) -> &[Vec<f64>] {
        &self.density
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn density(&self, x: usize, u: usize) -> f64 {
        self.density[x][u]
    }

    /// Emission probability `g[x][u] * phi[u]`.
    pub fn emission(&self, x: usize, u: usize) -> f64 {
        self.density[x][u] * self.reference[u]
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let m = self.reference.len();
        if m == 0 {
            out.push("empty alphabet".into());
        }
        for (u, w) in self.reference.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                out.push(format!("reference weight phi[{u}] = {w} is not positive"));
            }
        }
        for (x, row) in self.density.iter().enumerate() {
            if row.len() != m {
                out.push(format!("density row {x} has {} entries, expected {m}", row.len()));
                continue;
            }
            if let Some((u, g)) = row
                .iter()
                .enumerate()
                .find(|(_, g)| !g.is_finite() || **g < 0.0)
            {
                out.push(format!("density g[{x}][{u}] = {g} is negative"));
            }
            let total: f64 = row.iter().zip(&self.reference).map(|(g, w)| g * w).sum();
            if (total - 1.0).abs() > MASS_TOLERANCE {
                out.push(format!("density row {x} integrates to {total}"));
            }
        }
        out
    }
}

type LogDensityFn = dyn Fn(usize, f64) -> f64 + Send + Sync;
type SamplerFn = dyn Fn(usize, &mut dyn RngCore) -> f64 + Send + Sync;

/// Gaussian observation noise around a per-state mean.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    pub means: Vec<f64>,
    pub sigma: f64,
}

/// Real-valued observations with an opaque density.
#[derive(Clone)]
pub struct ContinuousChannel {
    log_density: Arc<LogDensityFn>,
    sampler: Option<Arc<SamplerFn>>,
    nondegenerate: bool,
    gaussian: Option<GaussianParams>,
}

impl ContinuousChannel {
    /// `density` is evaluated pointwise; its normalization is the caller's
    /// business. `nondegenerate` declares whether it is strictly positive.
    pub fn custom(
        density: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
        sampler: Option<Arc<SamplerFn>>,
        nondegenerate: bool,
    ) -> Self {
        Self {
            log_density: Arc::new(move |x, y| density(x, y).ln()),
            sampler,
            nondegenerate,
            gaussian: None,
        }
    }

    /// `y = means[x] + sigma * N(0, 1)`, density against Lebesgue measure.
    pub fn gaussian(means: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidChannel(format!("sigma = {sigma}")));
        }
        let params = GaussianParams {
            means: means.clone(),
            sigma,
        };
        let log_norm = -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
        let dens_means = means.clone();
        let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidChannel(e.to_string()))?;
        Ok(Self {
            log_density: Arc::new(move |x, y| {
                let z = (y - dens_means[x]) / sigma;
                log_norm - 0.5 * z * z
            }),
            sampler: Some(Arc::new(move |x, rng: &mut dyn RngCore| {
                means[x] + noise.sample(rng)
            })),
            nondegenerate: true,
            gaussian: Some(params),
        })
    }

    pub fn log_density(&self, x: usize, y: f64) -> f64 {
        (self.log_density)(x, y)
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn gaussian_params(&self) -> Option<&GaussianParams> {
        self.gaussian.as_ref()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }
}

impl fmt::Debug for ContinuousChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousChannel")
            .field("gaussian", &self.gaussian)
            .field("nondegenerate", &self.nondegenerate)
            .field("has_sampler", &self.sampler.is_some())
            .finish()
    }
}

/// Observation kernel `Phi(x, dy) = g(x, y) phi(dy)`.
#[derive(Debug, Clone)]
pub enum ObservationChannel {
    Finite(FiniteChannel),
    Continuous(ContinuousChannel),
}

impl ObservationChannel {
    /// Constant density `g = 1` on `m` symbols with `phi = 1/m`.
    pub fn uninformative(dim: usize, m: usize) -> Self {
        ObservationChannel::Finite(FiniteChannel {
            density: vec![vec![1.0; m]; dim],
            reference: vec![1.0 / m as f64; m],
        })
    }

    pub fn as_finite(&self) -> Option<&FiniteChannel> {
        match self {
            ObservationChannel::Finite(c) => Some(c),
            ObservationChannel::Continuous(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ObservationChannel::Finite(_))
    }

    /// Number of signal states the channel is defined for, when known.
    pub fn state_count(&self) -> Option<usize> {
        match self {
            ObservationChannel::Finite(c) => Some(c.density.len()),
            ObservationChannel::Continuous(c) => c.gaussian.as_ref().map(|g| g.means.len()),
        }
    }

    /// `ln g(x, obs)`; `-inf` for zero density or a mismatched observation.
    pub fn log_density(&self, x: usize, obs: Observation) -> f64 {
        match (self, obs) {
            (ObservationChannel::Finite(c), Observation::Symbol(u)) if u < c.alphabet_size() => {
                c.density[x][u].ln()
            }
            (ObservationChannel::Continuous(c), Observation::Real(y)) => c.log_density(x, y),
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn density(&self, x: usize, obs: Observation) -> f64 {
        match (self, obs) {
            (ObservationChannel::Finite(c), Observation::Symbol(u)) if u < c.alphabet_size() => {
                c.density[x][u]
            }
            _ => self.log_density(x, obs).exp(),
        }
    }

    pub fn check_observation(&self, obs: Observation, time: usize) -> Result<()> {
        let ok = match (self, obs) {
            (ObservationChannel::Finite(c), Observation::Symbol(u)) => u < c.alphabet_size(),
            (ObservationChannel::Continuous(_), Observation::Real(y)) => y.is_finite(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ObservationMismatch { time })
        }
    }

    /// Draws `Y ~ Phi(x, .)`.
    pub fn sample(&self, x: usize, rng: &mut dyn RngCore) -> Result<Observation> {
        match self {
            ObservationChannel::Finite(c) => {
                let u = sample_index(rng, (0..c.alphabet_size()).map(|u| c.emission(x, u)));
                Ok(Observation::Symbol(u))
            }
            ObservationChannel::Continuous(c) => {
                let sampler = c.sampler.as_ref().ok_or(Error::MissingSampler)?;
                Ok(Observation::Real(sampler(x, rng)))
            }
        }
    }

    /// Relabels signal states: state `x` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        match self {
            ObservationChannel::Finite(c) => {
                let mut density = c.density.clone();
                for (x, row) in c.density.iter().enumerate() {
                    density[perm[x]] = row.clone();
                }
                Ok(ObservationChannel::Finite(FiniteChannel {
                    density,
                    reference: c.reference.clone(),
                }))
            }
            ObservationChannel::Continuous(c) => {
                let g = c.gaussian.as_ref().ok_or(Error::ContinuousChannel)?;
                let mut means = g.means.clone();
                for (x, m) in g.means.iter().enumerate() {
                    means[perm[x]] = *m;
                }
                Ok(ObservationChannel::Continuous(ContinuousChannel::gaussian(
                    means, g.sigma,
                )?))
            }
        }
    }
}

/// Strict positivity of `g` on its whole domain.
///
/// Finite channels are inspected entry by entry; continuous channels report
/// the flag declared at construction.
pub fn check_nondegeneracy(channel: &ObservationChannel) -> bool {
    match channel {
        ObservationChannel::Finite(c) => c.density.iter().flatten().all(|&g| g > 0.0),
        ObservationChannel::Continuous(c) => c.nondegenerate,
    }
}

/// Inverse-CDF draw from nonnegative weights summing to one.
pub(crate) fn sample_index<R: Rng + ?Sized>(
    rng: &mut R,
    weights: impl IntoIterator<Item = f64>,
) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.into_iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the accumulated mass
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_channel_validation() {
        assert!(FiniteChannel::new(vec![vec![0.8, 0.2]], vec![1.0, 1.0]).is_ok());
        assert!(FiniteChannel::new(vec![vec![0.8, 0.3]], vec![1.0, 1.0]).is_err());
        assert!(FiniteChannel::new(vec![vec![1.0, 1.0]], vec![0.5, 0.0]).is_err());
        // density 2 against weight 1/2 integrates to one
        assert!(FiniteChannel::new(vec![vec![2.0, 0.0]], vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn nondegeneracy_examples() {
        let noisy = ObservationChannel::Finite(
            FiniteChannel::from_emissions(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap(),
        );
        assert!(check_nondegeneracy(&noisy));
        let parity = ObservationChannel::Finite(
            FiniteChannel::from_emissions(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        );
        assert!(!check_nondegeneracy(&parity));
        assert!(check_nondegeneracy(&ObservationChannel::uninformative(3, 1)));
    }

    #[test]
    fn gaussian_density_is_normalized_pdf() {
        let c = ContinuousChannel::gaussian(vec![0.0, 1.0], 2.0).unwrap();
        let expected = -(2.0 * (2.0 * std::f64::consts::PI).sqrt()).ln();
        assert!((c.log_density(0, 0.0) - expected).abs() < 1e-15);
        assert!((c.log_density(1, 3.0) - (expected - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn mismatched_observation_has_zero_density() {
        let c = ObservationChannel::uninformative(2, 2);
        assert_eq!(c.density(0, Observation::Real(0.3)), 0.0);
        assert!(c.check_observation(Observation::Symbol(2), 4).is_err());
    }

    #[test]
    fn custom_channel_without_sampler() {
        let c = ObservationChannel::Continuous(ContinuousChannel::custom(
            |_, y: f64| (-y.abs()).exp(),
            None,
            true,
        ));
        let mut rng = rand::rng();
        assert_eq!(c.sample(0, &mut rng).unwrap_err(), Error::MissingSampler);
    }
}
