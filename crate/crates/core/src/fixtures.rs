//! Named reference models and a seeded random-model generator.
//!
//! * `M1`: symmetric two-state chain (stay 0.9) seen through a binary
//!   channel that reports the state correctly with probability 0.8.
//! * `M2`: deterministic 4-cycle observed through its noiseless parity.
//! * `M3`: frozen two-state signal (identity kernel) with the `M1` channel.
//! * `T1`: `M1` plus a transient state that it leaves with probability
//!   `1 - q` per step, `q = 0.9`.

use rand::Rng;
use rand_distr::{Distribution as _, Exp1};

use crate::error::{Error, Result};
use crate::model::{
    stationary_distribution, Distribution, FiniteChannel, HmmModel, ObservationChannel,
    TransitionKernel, DEFAULT_STATIONARY_TOL,
};

pub const FIXTURE_LABELS: [&str; 4] = ["M1", "M2", "M3", "T1"];

pub fn m1() -> HmmModel {
    HmmModel::new(
        TransitionKernel::new(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap(),
        Distribution::uniform(2),
        confusion_channel(),
        "M1",
    )
    .unwrap()
}

pub fn m2() -> HmmModel {
    HmmModel::new(
        TransitionKernel::deterministic(4, |x| (x + 1) % 4),
        Distribution::uniform(4),
        parity_channel(4),
        "M2",
    )
    .unwrap()
}

pub fn m3() -> HmmModel {
    HmmModel::new(
        TransitionKernel::identity(2),
        Distribution::uniform(2),
        confusion_channel(),
        "M3",
    )
    .unwrap()
}

/// Three states; state 2 stays put with probability `q` and otherwise falls
/// into the `M1` block, which never returns. `pi = (1/2, 1/2, 0)`.
pub fn transient(q: f64) -> HmmModel {
    let leave = (1.0 - q) / 2.0;
    HmmModel::new(
        TransitionKernel::new(vec![
            vec![0.9, 0.1, 0.0],
            vec![0.1, 0.9, 0.0],
            vec![leave, leave, q],
        ])
        .unwrap(),
        Distribution::new(vec![0.5, 0.5, 0.0]).unwrap(),
        ObservationChannel::Finite(
            FiniteChannel::from_emissions(vec![
                vec![0.7, 0.2, 0.1],
                vec![0.2, 0.7, 0.1],
                vec![0.1, 0.1, 0.8],
            ])
            .unwrap(),
        ),
        "T1",
    )
    .unwrap()
}

pub fn by_label(label: &str) -> Result<HmmModel> {
    match label {
        "M1" => Ok(m1()),
        "M2" => Ok(m2()),
        "M3" => Ok(m3()),
        "T1" => Ok(transient(0.9)),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

fn confusion_channel() -> ObservationChannel {
    ObservationChannel::Finite(
        FiniteChannel::from_emissions(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap(),
    )
}

/// Noiseless parity: symbol `x mod 2` with certainty.
pub fn parity_channel(dim: usize) -> ObservationChannel {
    let rows = (0..dim)
        .map(|x| if x % 2 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] })
        .collect();
    ObservationChannel::Finite(FiniteChannel::from_emissions(rows).unwrap())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomModelOptions {
    pub dim: usize,
    pub alphabet: usize,
    /// Probability of zeroing each kernel/channel entry (at least one entry
    /// per row survives). Produces degenerate channels and reducible kernels.
    pub zero_injection: f64,
    /// Draw reference weights `phi` in `[0.5, 2)` instead of counting measure.
    pub random_reference: bool,
}

impl RandomModelOptions {
    pub fn positive(dim: usize, alphabet: usize) -> Self {
        Self {
            dim,
            alphabet,
            zero_injection: 0.0,
            random_reference: true,
        }
    }
}

/// Uniform draw from the probability simplex of dimension `n`, optionally
/// with zeroed coordinates.
pub fn flat_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_injection: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    if zero_injection > 0.0 {
        let keep = rng.random_range(0..n);
        for (i, v) in w.iter_mut().enumerate() {
            if i != keep && rng.random::<f64>() < zero_injection {
                *v = 0.0;
            }
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Random model with flat-simplex kernel and emission rows; the stationary law
/// is computed. Fails with `NonUniqueStationary` when zero injection made the
/// kernel reducible.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, opts: &RandomModelOptions) -> Result<HmmModel> {
    let d = opts.dim;
    let m = opts.alphabet;
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|_| flat_simplex(rng, d, opts.zero_injection))
        .collect();
    let kernel = TransitionKernel::from_rows_unchecked(rows);
    let reference: Vec<f64> = if opts.random_reference {
        (0..m).map(|_| rng.random_range(0.5..2.0)).collect()
    } else {
        vec![1.0; m]
    };
    let density = (0..d)
        .map(|_| {
            flat_simplex(rng, m, opts.zero_injection)
                .into_iter()
                .zip(&reference)
                .map(|(q, phi)| q / phi)
                .collect()
        })
        .collect();
    let channel = ObservationChannel::Finite(FiniteChannel::new_unchecked(density, reference));
    let stationary = stationary_distribution(&kernel, DEFAULT_STATIONARY_TOL)?;
    HmmModel::new(kernel, stationary, channel, format!("random-d{d}-m{m}"))
}
