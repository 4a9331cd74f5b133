//! Index path generation: a logit-space Gaussian random walk that hard-jumps
//! to the resolved outcome at the final tick.
//!
//! The walk keeps interior values in (0, 1) without reflection artifacts; the
//! terminal jump |outcome - pre-resolution index| is what stresses margin at
//! resolution. Started at 0.5 the median jump is one half by symmetry,
//! whatever the volatility.

use super::{MarketSpec, VenueError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Resolved index path: one value per tick, `values[resolution_tick]` is the
/// outcome. All values lie in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexPath {
    values: Vec<f64>,
}

impl IndexPath {
    /// Validates an externally constructed path against a market spec.
    pub fn from_values(values: Vec<f64>, spec: &MarketSpec) -> Result<Self, VenueError> {
        let expect = spec.resolution_tick as usize + 1;
        if values.len() != expect {
            return Err(VenueError::PathLength {
                expected: expect,
                got: values.len(),
            });
        }
        if let Some(&v) = values
            .iter()
            .find(|v| !v.is_finite() || !(0.0..=1.0).contains(*v))
        {
            return Err(VenueError::PathValueOutOfRange(v));
        }
        let last = *values.last().expect("non-empty by length check");
        if last != spec.outcome.value() {
            return Err(VenueError::PathOutcomeMismatch {
                terminal: last,
                outcome: spec.outcome.value(),
            });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, tick: u32) -> f64 {
        self.values[tick as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index one tick before resolution.
    pub fn pre_jump(&self) -> f64 {
        self.values[self.values.len() - 2]
    }

    /// |outcome - pre-resolution index|.
    pub fn terminal_jump(&self) -> f64 {
        (self.values[self.values.len() - 1] - self.pre_jump()).abs()
    }
}

/// Logistic slope at the midpoint; used to quote `volatility` in index units.
const LOGIT_SCALE: f64 = 4.0;

/// Generates a seeded walk for `spec`. `volatility` is the approximate
/// per-tick index standard deviation near the mid (scaled into logit space);
/// `start` must be strictly interior. volatility = 0 yields a constant path
/// followed by the terminal jump.
pub fn generate_index_path(
    spec: &MarketSpec,
    seed: u64,
    volatility: f64,
    start: f64,
) -> Result<IndexPath, VenueError> {
    if !volatility.is_finite() || volatility < 0.0 {
        return Err(VenueError::BadVolatility(volatility));
    }
    if !start.is_finite() || start <= 0.0 || start >= 1.0 {
        return Err(VenueError::BadStartIndex(start));
    }
    let tau = spec.resolution_tick as usize;
    let mut values = Vec::with_capacity(tau + 1);
    values.push(start);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = (start / (1.0 - start)).ln();
    for _ in 1..tau {
        let z: f64 = StandardNormal.sample(&mut rng);
        x += LOGIT_SCALE * volatility * z;
        values.push(1.0 / (1.0 + (-x).exp()));
    }
    values.push(spec.outcome.value());
    IndexPath::from_values(values, spec)
}
