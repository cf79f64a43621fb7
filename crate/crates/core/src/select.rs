//! Key selection strategies.
//!
//! Every strategy maps a service's input set to one of its members. The
//! designated strategy is a pure function of the input set, which is what
//! lets addition to a partial or full index inspect a single key class.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::EmptyInputSet;
use crate::model::{Deployment, IndexModel, ParameterId};
use crate::setops::Cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyStrategy {
    /// Keep key class sizes near the square root of the indexed population.
    Original,
    /// Uniformly random input parameter.
    Random,
    /// Prefer parameters that are not yet keys.
    Maximum,
    /// Prefer parameters that already are keys.
    Minimum,
    /// The `(sum of ids mod count)`-th input in ascending order.
    Designated,
}

impl KeyStrategy {
    pub const ALL: [KeyStrategy; 5] = [
        KeyStrategy::Original,
        KeyStrategy::Random,
        KeyStrategy::Maximum,
        KeyStrategy::Minimum,
        KeyStrategy::Designated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KeyStrategy::Original => "original",
            KeyStrategy::Random => "random",
            KeyStrategy::Maximum => "maximum",
            KeyStrategy::Minimum => "minimum",
            KeyStrategy::Designated => "designated",
        }
    }
}

impl fmt::Display for KeyStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KeyStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KeyStrategy::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            format!("unknown key method `{s}` (expected original | random | maximum | minimum | designated)")
        })
    }
}

/// A strategy plus, for [`KeyStrategy::Random`], its generator state.
///
/// The random strategy uses ChaCha8 seeded from a 64-bit value, so a fixed
/// seed and call sequence always reproduce the same keys.
#[derive(Debug, Clone)]
pub struct KeySelector {
    strategy: KeyStrategy,
    rng: ChaCha8Rng,
}

impl KeySelector {
    pub fn new(strategy: KeyStrategy, seed: u64) -> Self {
        KeySelector {
            strategy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn designated() -> Self {
        Self::new(KeyStrategy::Designated, 0)
    }

    pub fn random(seed: u64) -> Self {
        Self::new(KeyStrategy::Random, seed)
    }

    pub fn strategy(&self) -> KeyStrategy {
        self.strategy
    }

    /// Picks a key for `inputs` against the current state of `index`.
    /// Directory probes needed by the index-aware strategies are charged to
    /// `cost`.
    pub fn select(
        &mut self,
        inputs: &[ParameterId],
        index: &IndexModel,
        cost: &mut Cost,
    ) -> Result<ParameterId, EmptyInputSet> {
        match self.strategy {
            KeyStrategy::Designated => select_designated(inputs),
            KeyStrategy::Random => self.select_random(inputs),
            KeyStrategy::Original => original_counted(inputs, index, cost),
            KeyStrategy::Maximum => maximum_counted(inputs, index, cost),
            KeyStrategy::Minimum => minimum_counted(inputs, index, cost),
        }
    }

    /// Uniform draw from `inputs`; advances the generator.
    pub fn select_random(&mut self, inputs: &[ParameterId]) -> Result<ParameterId, EmptyInputSet> {
        if inputs.is_empty() {
            return Err(EmptyInputSet);
        }
        Ok(inputs[self.rng.gen_range(0..inputs.len())])
    }
}

/// Returns `inputs[(Σ id) mod |inputs|]`. `inputs` must be in ascending
/// order for the result to depend only on the set.
pub fn select_designated(inputs: &[ParameterId]) -> Result<ParameterId, EmptyInputSet> {
    if inputs.is_empty() {
        return Err(EmptyInputSet);
    }
    let sum: u64 = inputs.iter().map(|p| u64::from(p.0)).sum();
    let position = (sum % inputs.len() as u64) as usize;
    Ok(inputs[position])
}

/// Chooses the input whose key class, after receiving the new entry, is
/// closest to `sqrt(population + 1)`, where the population is |S| for a
/// primary index and |R2| otherwise. Ties go to the smallest id.
pub fn select_original(inputs: &[ParameterId], index: &IndexModel) -> Result<ParameterId, EmptyInputSet> {
    original_counted(inputs, index, &mut Cost::default())
}

/// Smallest input that is not yet a key, else the smallest input.
pub fn select_maximum(inputs: &[ParameterId], index: &IndexModel) -> Result<ParameterId, EmptyInputSet> {
    maximum_counted(inputs, index, &mut Cost::default())
}

/// Smallest input that already is a key, else the smallest input.
pub fn select_minimum(inputs: &[ParameterId], index: &IndexModel) -> Result<ParameterId, EmptyInputSet> {
    minimum_counted(inputs, index, &mut Cost::default())
}

fn original_counted(inputs: &[ParameterId], index: &IndexModel, cost: &mut Cost) -> Result<ParameterId, EmptyInputSet> {
    let stats = index.stats();
    let population = match index.deployment() {
        Deployment::Primary => stats.service_count,
        Deployment::Partial | Deployment::Full => stats.input_similar_count,
    };
    let target = ((population + 1) as f64).sqrt();

    let mut best: Option<(f64, ParameterId)> = None;
    for &p in inputs {
        let size = index.class_size_counted(p, cost).unwrap_or(0);
        let distance = ((size + 1) as f64 - target).abs();
        if best.is_none_or(|(d, _)| distance < d) {
            best = Some((distance, p));
        }
    }
    best.map(|(_, p)| p).ok_or(EmptyInputSet)
}

fn maximum_counted(inputs: &[ParameterId], index: &IndexModel, cost: &mut Cost) -> Result<ParameterId, EmptyInputSet> {
    let first = *inputs.first().ok_or(EmptyInputSet)?;
    for &p in inputs {
        if index.class_size_counted(p, cost).is_none() {
            return Ok(p);
        }
    }
    Ok(first)
}

fn minimum_counted(inputs: &[ParameterId], index: &IndexModel, cost: &mut Cost) -> Result<ParameterId, EmptyInputSet> {
    let first = *inputs.first().ok_or(EmptyInputSet)?;
    for &p in inputs {
        if index.class_size_counted(p, cost).is_some() {
            return Ok(p);
        }
    }
    Ok(first)
}
