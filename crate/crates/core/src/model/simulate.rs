use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::channel::{sample_index, ObservationPath};
use crate::model::distribution::Distribution;
use crate::model::HmmModel;

/// A sampled signal path with its observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub states: Vec<usize>,
    pub observations: ObservationPath,
}

/// Child seed for trial `index` of a run with master seed `master`.
///
/// Splitting rule: `splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)`,
/// all arithmetic wrapping. Children of one master are decorrelated and the
/// rule does not depend on execution order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples `X_0 ~ start`, `X_{k+1} ~ P(X_k, .)` and `Y_k ~ Phi(X_k, .)`.
///
/// The generator is ChaCha8 seeded from `seed`, so output is bit-identical
/// across platforms for a given `(model, start, length, seed)`.
pub fn simulate(
    model: &HmmModel,
    start: &Distribution,
    length: usize,
    seed: u64,
) -> Result<SimulatedPath> {
    if length == 0 {
        return Err(Error::EmptyPath);
    }
    model.check_prior(start)?;
    if let crate::model::ObservationChannel::Continuous(c) = &model.channel {
        if !c.has_sampler() {
            return Err(Error::MissingSampler);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(length);
    let mut observations = Vec::with_capacity(length);
    let mut x = sample_index(&mut rng, start.weights().iter().copied());
    for k in 0..length {
        if k > 0 {
            x = sample_index(&mut rng, model.kernel.row(x).iter().copied());
        }
        states.push(x);
        observations.push(model.channel.sample(x, &mut rng)?);
    }
    Ok(SimulatedPath {
        states,
        observations: ObservationPath::new(observations),
    })
}
