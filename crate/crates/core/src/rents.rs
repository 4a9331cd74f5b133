//! Informed-trading rent analytics.
//!
//! An informed trader earns rent r per event per unit of deployed capital C.
//! Leverage multiplies the rent to L*r*C while leaving the zero-funding
//! risk-adjusted return untouched — (L*r - funding)/(L*sigma) collapses to
//! r/sigma at zero funding — and it amortizes any fixed detection budget:
//! detection cost per unit of extracted profit is D/(L*r*C), falling as 1/L.
//!
//! The compression check is deliberately descriptive: it lines up a dynamic-
//! margin run against a static-margin run on the same seed and reports what
//! happened to the trader in each, asserting nothing about which is better.

use crate::types::{Leverage, Money, ValidationError};
use crate::venue::{EngineKind, RunReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RentsError {
    #[error("return volatility must be positive to quote a risk-adjusted return")]
    ZeroVolatility,
    #[error("rent per event must be positive to amortize detection cost")]
    ZeroRent,
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("runs are not comparable: {0}")]
    MismatchedRuns(String),
    #[error("agent '{0}' does not appear in both runs")]
    UnknownTrader(String),
}

/// Parameters of one informed-trading strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RentProfile {
    /// Edge per event per unit capital (unlevered return).
    pub rent_per_event: f64,
    /// Per-event return volatility of the unlevered strategy.
    pub return_volatility: f64,
    /// Fixed cost a monitor must spend to detect the strategy.
    pub detection_cost: Money,
    pub capital: Money,
    pub leverage: Leverage,
}

impl RentProfile {
    fn check(&self) -> Result<(), RentsError> {
        if !self.rent_per_event.is_finite() {
            return Err(RentsError::NonFinite("rent_per_event"));
        }
        if !self.return_volatility.is_finite() || self.return_volatility < 0.0 {
            return Err(RentsError::NonFinite("return_volatility"));
        }
        Ok(())
    }
}

/// Rent extracted per event at the profile's leverage: L * r * C.
pub fn leveraged_rent(p: &RentProfile) -> Result<f64, RentsError> {
    p.check()?;
    Ok(p.leverage.value() * p.rent_per_event * p.capital.value())
}

/// Per-event risk-adjusted return at leverage L:
/// (L*r - funding_cost) / (L*sigma). Invariant in L when funding is zero.
pub fn sharpe_ratio(p: &RentProfile, funding_cost_per_event: f64) -> Result<f64, RentsError> {
    p.check()?;
    if !funding_cost_per_event.is_finite() {
        return Err(RentsError::NonFinite("funding_cost_per_event"));
    }
    if p.return_volatility == 0.0 {
        return Err(RentsError::ZeroVolatility);
    }
    let l = p.leverage.value();
    Ok((l * p.rent_per_event - funding_cost_per_event) / (l * p.return_volatility))
}

/// Monitor's detection spend per unit of rent extracted: D / (L*r*C).
/// Falls as 1/L — leverage amortizes a fixed detection budget.
pub fn detection_cost_per_profit(p: &RentProfile) -> Result<f64, RentsError> {
    let rent = leveraged_rent(p)?;
    if rent <= 0.0 {
        return Err(RentsError::ZeroRent);
    }
    Ok(p.detection_cost.value() / rent)
}

/// Side-by-side outcome of one trader under dynamic vs static margin on the
/// same seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub trader: String,
    pub seed: u64,
    pub pnl_dynamic: f64,
    pub pnl_static: f64,
    pub margin_increases_dynamic: u32,
    pub margin_increases_static: u32,
    pub liquidations_dynamic: u32,
    pub liquidations_static: u32,
}

/// Compares one trader across a dynamic-margin and a static-margin run.
///
/// Both runs must share seed, resolution, and halt configuration, carry the
/// expected engine kinds, and contain the trader. The report records outcomes
/// without judging them: whether dynamic margin compresses rents is left to
/// the caller reading the numbers.
pub fn rent_compression_check(
    dynamic: &RunReport,
    static_: &RunReport,
    trader: &str,
) -> Result<CompressionReport, RentsError> {
    if dynamic.engine != EngineKind::DynamicE2 || static_.engine != EngineKind::StaticE0 {
        return Err(RentsError::MismatchedRuns(format!(
            "expected dynamic-vs-static engine pair, got {} vs {}",
            dynamic.engine, static_.engine
        )));
    }
    if dynamic.seed != static_.seed {
        return Err(RentsError::MismatchedRuns(format!(
            "seeds differ: {} vs {}",
            dynamic.seed, static_.seed
        )));
    }
    if dynamic.resolution_tick != static_.resolution_tick
        || dynamic.halt_ticks != static_.halt_ticks
    {
        return Err(RentsError::MismatchedRuns(
            "market clocks differ".to_string(),
        ));
    }
    let dyn_agent = dynamic
        .agent(trader)
        .ok_or_else(|| RentsError::UnknownTrader(trader.to_string()))?;
    let stat_agent = static_
        .agent(trader)
        .ok_or_else(|| RentsError::UnknownTrader(trader.to_string()))?;
    Ok(CompressionReport {
        trader: trader.to_string(),
        seed: dynamic.seed,
        pnl_dynamic: dyn_agent.pnl,
        pnl_static: stat_agent.pnl,
        margin_increases_dynamic: dyn_agent.margin_increases,
        margin_increases_static: stat_agent.margin_increases,
        liquidations_dynamic: dyn_agent.liquidations,
        liquidations_static: stat_agent.liquidations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(r: f64, sigma: f64, d: f64, c: f64, l: f64) -> RentProfile {
        RentProfile {
            rent_per_event: r,
            return_volatility: sigma,
            detection_cost: Money::new(d).unwrap(),
            capital: Money::new(c).unwrap(),
            leverage: Leverage::new(l).unwrap(),
        }
    }

    #[test]
    fn rent_scales_linearly_with_leverage() {
        let base = leveraged_rent(&profile(0.02, 0.1, 1e4, 1e6, 1.0)).unwrap();
        let lev = leveraged_rent(&profile(0.02, 0.1, 1e4, 1e6, 7.0)).unwrap();
        assert!(((lev / base) - 7.0).abs() < 1e-12);
        assert_eq!(base, 0.02 * 1e6);
    }

    #[test]
    fn sharpe_is_leverage_invariant_at_zero_funding() {
        let s1 = sharpe_ratio(&profile(0.02, 0.1, 1e4, 1e6, 1.0), 0.0).unwrap();
        for l in [2.0, 5.0, 20.0, 400.0] {
            let sl = sharpe_ratio(&profile(0.02, 0.1, 1e4, 1e6, l), 0.0).unwrap();
            assert!(((sl - s1) / s1).abs() < 1e-12, "L={l}: {sl} vs {s1}");
        }
    }

    #[test]
    fn fixed_funding_drag_dilutes_with_leverage() {
        // (L*r - f)/(L*sigma) = r/sigma - f/(L*sigma): the leverage invariance
        // breaks under funding, with the drag fading as leverage grows.
        let zero = sharpe_ratio(&profile(0.02, 0.1, 1e4, 1e6, 2.0), 0.0).unwrap();
        let low = sharpe_ratio(&profile(0.02, 0.1, 1e4, 1e6, 2.0), 0.01).unwrap();
        let high = sharpe_ratio(&profile(0.02, 0.1, 1e4, 1e6, 20.0), 0.01).unwrap();
        assert!(low < high && high < zero);
    }

    #[test]
    fn detection_cost_amortizes_as_one_over_leverage() {
        let at1 = detection_cost_per_profit(&profile(0.02, 0.1, 1e4, 1e6, 1.0)).unwrap();
        for l in [2.0, 10.0, 100.0] {
            let at_l = detection_cost_per_profit(&profile(0.02, 0.1, 1e4, 1e6, l)).unwrap();
            assert!(((at_l * l - at1) / at1).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_profiles_error() {
        assert_eq!(
            sharpe_ratio(&profile(0.02, 0.0, 1e4, 1e6, 2.0), 0.0),
            Err(RentsError::ZeroVolatility)
        );
        assert_eq!(
            detection_cost_per_profit(&profile(0.0, 0.1, 1e4, 1e6, 2.0)),
            Err(RentsError::ZeroRent)
        );
        assert!(matches!(
            sharpe_ratio(&profile(f64::NAN, 0.1, 1e4, 1e6, 2.0), 0.0),
            Err(RentsError::NonFinite(_))
        ));
    }
}
