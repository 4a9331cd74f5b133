//! Validated scalar newtypes, the manipulation-channel taxonomy, and scenario
//! parameter records shared by every other module.
//!
//! The newtypes enforce their invariants at construction and preserve them
//! through serde round-trips, so downstream arithmetic never re-checks ranges.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Slack used when rejecting a YES-probability so close to 1 that the NO side
/// of the expected-profit denominator vanishes.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// Validation failures for raw scalar inputs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    /// pi_yes so close to 1 that (1 - pi_yes) is not a usable denominator.
    #[error("pi_yes = {0} is degenerate: no expected move left on the NO side")]
    DegenerateProbability(f64),
    #[error("money amount {0} is negative")]
    NegativeMoney(f64),
    #[error("capital must be strictly positive")]
    ZeroCapital,
    #[error("leverage {0} is below the minimum admissible 1.0")]
    LeverageBelowOne(f64),
    #[error("penalty factor {0} is negative")]
    NegativePenalty(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
}

/// A probability in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self, ValidationError> {
        if !p.is_finite() {
            return Err(ValidationError::NonFinite("probability"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(ValidationError::ProbabilityOutOfRange(p));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// 1 - p, exact at the representable endpoints.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = ValidationError;
    fn try_from(p: f64) -> Result<Self, Self::Error> {
        Self::new(p)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// A non-negative USD amount.
///
/// f64 is deliberate: inputs span 5e4..1e10 and tolerances are relative, so
/// fixed-point buys nothing here. Summations that feed conservation checks are
/// ordered deterministically instead.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Money(f64);

impl Money {
    pub const ZERO: Money = Money(0.0);

    pub fn new(v: f64) -> Result<Self, ValidationError> {
        if !v.is_finite() {
            return Err(ValidationError::NonFinite("money"));
        }
        if v < 0.0 {
            return Err(ValidationError::NegativeMoney(v));
        }
        Ok(Self(v))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Money {
    type Error = ValidationError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<Money> for f64 {
    fn from(m: Money) -> f64 {
        m.0
    }
}

/// A leverage multiplier, >= 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Leverage(f64);

impl Leverage {
    pub fn new(l: f64) -> Result<Self, ValidationError> {
        if !l.is_finite() {
            return Err(ValidationError::NonFinite("leverage"));
        }
        if l < 1.0 {
            return Err(ValidationError::LeverageBelowOne(l));
        }
        Ok(Self(l))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Leverage {
    type Error = ValidationError;
    fn try_from(l: f64) -> Result<Self, Self::Error> {
        Self::new(l)
    }
}

impl From<Leverage> for f64 {
    fn from(l: Leverage) -> f64 {
        l.0
    }
}

/// Every manipulation channel the toolkit reasons about.
///
/// Finer-grained than the control matrix on purpose: several kinds share one
/// matrix row (see `matrix::lookup`), but attack runners and scenario labels
/// need the full distinction.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum ManipulationChannel {
    #[serde(rename = "trade-based")]
    TradeBased,
    #[serde(rename = "spoof-withdraw")]
    SpoofWithdraw,
    #[serde(rename = "information-based")]
    InformationBased,
    #[serde(rename = "oracle-index")]
    OracleIndex,
    #[serde(rename = "outcome-sports")]
    OutcomeSports,
    #[serde(rename = "outcome-sub-national")]
    OutcomeSubNationalPolitical,
    #[serde(rename = "outcome-large-electorate")]
    OutcomeLargeElectorate,
    #[serde(rename = "outcome-macro")]
    OutcomeMacro,
    #[serde(rename = "information-release-timing")]
    InformationReleaseTiming,
    #[serde(rename = "informed-trading-rents")]
    InformedTradingRents,
    #[serde(rename = "pre-emption")]
    PreEmption,
    #[serde(rename = "halt-arbitrage")]
    HaltArbitrage,
    #[serde(rename = "bad-debt-shifting")]
    BadDebtShifting,
}

impl ManipulationChannel {
    pub const ALL: [ManipulationChannel; 13] = [
        ManipulationChannel::TradeBased,
        ManipulationChannel::SpoofWithdraw,
        ManipulationChannel::InformationBased,
        ManipulationChannel::OracleIndex,
        ManipulationChannel::OutcomeSports,
        ManipulationChannel::OutcomeSubNationalPolitical,
        ManipulationChannel::OutcomeLargeElectorate,
        ManipulationChannel::OutcomeMacro,
        ManipulationChannel::InformationReleaseTiming,
        ManipulationChannel::InformedTradingRents,
        ManipulationChannel::PreEmption,
        ManipulationChannel::HaltArbitrage,
        ManipulationChannel::BadDebtShifting,
    ];

    /// Stable kebab-case name used in CSV output and config files.
    pub fn slug(self) -> &'static str {
        match self {
            ManipulationChannel::TradeBased => "trade-based",
            ManipulationChannel::SpoofWithdraw => "spoof-withdraw",
            ManipulationChannel::InformationBased => "information-based",
            ManipulationChannel::OracleIndex => "oracle-index",
            ManipulationChannel::OutcomeSports => "outcome-sports",
            ManipulationChannel::OutcomeSubNationalPolitical => "outcome-sub-national",
            ManipulationChannel::OutcomeLargeElectorate => "outcome-large-electorate",
            ManipulationChannel::OutcomeMacro => "outcome-macro",
            ManipulationChannel::InformationReleaseTiming => "information-release-timing",
            ManipulationChannel::InformedTradingRents => "informed-trading-rents",
            ManipulationChannel::PreEmption => "pre-emption",
            ManipulationChannel::HaltArbitrage => "halt-arbitrage",
            ManipulationChannel::BadDebtShifting => "bad-debt-shifting",
        }
    }
}

impl fmt::Display for ManipulationChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl std::str::FromStr for ManipulationChannel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ManipulationChannel::ALL
            .iter()
            .copied()
            .find(|c| c.slug() == s)
            .ok_or_else(|| format!("unknown manipulation channel '{s}'"))
    }
}

/// Raw, unvalidated scenario parameters as read from a scenario file or CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawScenario {
    pub label: String,
    pub k_manip: f64,
    pub capital: f64,
    pub pi_yes: f64,
    pub p_detected: f64,
    pub penalty_factor: f64,
    pub leverage: Option<f64>,
}

/// A validated outcome-manipulation scenario.
///
/// Invariants: capital > 0, pi_yes < 1 - DEGENERACY_EPS, penalty_factor >= 0,
/// leverage (when present) >= 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulationScenario {
    pub label: String,
    pub k_manip: Money,
    pub capital: Money,
    pub pi_yes: Probability,
    pub p_detected: Probability,
    pub penalty_factor: f64,
    pub leverage: Option<Leverage>,
}

/// Checks ranges and degeneracy on raw parameters and produces a typed scenario.
///
/// pi_yes within DEGENERACY_EPS of 1 is rejected: the manipulator's expected
/// gain per contract is (1 - pi_yes), and a zero denominator has no threshold.
pub fn validate_scenario(raw: &RawScenario) -> Result<ManipulationScenario, ValidationError> {
    let k_manip = Money::new(raw.k_manip)?;
    let capital = Money::new(raw.capital)?;
    if capital.value() == 0.0 {
        return Err(ValidationError::ZeroCapital);
    }
    let pi_yes = Probability::new(raw.pi_yes)?;
    if pi_yes.value() >= 1.0 - DEGENERACY_EPS {
        return Err(ValidationError::DegenerateProbability(pi_yes.value()));
    }
    let p_detected = Probability::new(raw.p_detected)?;
    if !raw.penalty_factor.is_finite() {
        return Err(ValidationError::NonFinite("penalty_factor"));
    }
    if raw.penalty_factor < 0.0 {
        return Err(ValidationError::NegativePenalty(raw.penalty_factor));
    }
    let leverage = match raw.leverage {
        Some(l) => Some(Leverage::new(l)?),
        None => None,
    };
    Ok(ManipulationScenario {
        label: raw.label.clone(),
        k_manip,
        capital,
        pi_yes,
        p_detected,
        penalty_factor: raw.penalty_factor,
        leverage,
    })
}
