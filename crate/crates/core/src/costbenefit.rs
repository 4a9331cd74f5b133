//! Outcome-manipulation cost-benefit analytics.
//!
//! A manipulator with capital C levered L times holds notional N = L*C of
//! $1-payout contracts on the NO-priced side. If the manipulation succeeds the
//! book pays N*(1 - pi_yes); against that stand the direct manipulation cost K
//! and the expected penalty C * p_detected * penalty_factor (penalty scales
//! with capital at risk). Expected profit:
//!
//! ```text
//! profit(L) = L*C*(1 - pi_yes) - K - C*p_detected*penalty_factor
//! ```
//!
//! Setting profit = 0 gives the break-even leverage threshold
//!
//! ```text
//! l_star = K / (C*(1 - pi_yes)) + p_detected*penalty_factor / (1 - pi_yes)
//! ```
//!
//! whose two addends are reported separately: the cost term falls with capital
//! while the detection term is capital-free (C cancels), which is what makes
//! the regime split meaningful.

use crate::types::{validate_scenario, ManipulationScenario, RawScenario, ValidationError};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Dominance ratio between the two threshold terms above which a scenario is
/// classified as single-regime rather than Mixed.
pub const REGIME_DOMINANCE_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CostBenefitError {
    #[error("scenario '{0}' has no leverage set; expected profit needs one")]
    MissingLeverage(String),
    #[error("sweep point invalid: {0}")]
    InvalidSweepPoint(#[from] ValidationError),
    #[error("sweep produced a non-monotone threshold along axis {axis} at row {row}")]
    MonotonicityViolation { axis: &'static str, row: usize },
    #[error("sweep axes must contain at least one finite value per axis")]
    EmptyAxis,
}

/// Which side of the break-even decomposition dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    CostDominated,
    DetectionDominated,
    Mixed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::CostDominated => "cost-dominated",
            Regime::DetectionDominated => "detection-dominated",
            Regime::Mixed => "mixed",
        })
    }
}

/// Break-even leverage for one scenario.
///
/// `l_star_raw` is exactly `cost_term + detection_term`. `l_star` is the
/// admissible threshold: raw values below the minimum admissible leverage 1
/// are clamped to 1 and flagged `always_profitable` (profit is positive at
/// every admissible leverage).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub l_star: f64,
    pub l_star_raw: f64,
    pub cost_term: f64,
    pub detection_term: f64,
    pub regime: Regime,
    pub always_profitable: bool,
}

/// Expected manipulation profit at an explicit leverage.
pub fn expected_profit_at(s: &ManipulationScenario, leverage: f64) -> f64 {
    let notional = leverage * s.capital.value();
    notional * s.pi_yes.complement()
        - s.k_manip.value()
        - s.capital.value() * s.p_detected.value() * s.penalty_factor
}

/// Expected manipulation profit at the scenario's own leverage.
pub fn expected_manipulation_profit(s: &ManipulationScenario) -> Result<f64, CostBenefitError> {
    let l = s
        .leverage
        .ok_or_else(|| CostBenefitError::MissingLeverage(s.label.clone()))?;
    Ok(expected_profit_at(s, l.value()))
}

/// Classifies the threshold decomposition. Either term at least
/// `REGIME_DOMINANCE_RATIO` times the other wins; otherwise Mixed. Two zero
/// terms are Mixed by convention (nothing dominates).
pub fn classify_regime(cost_term: f64, detection_term: f64) -> Regime {
    let c = cost_term;
    let d = detection_term;
    if c > 0.0 && (d == 0.0 || c / d >= REGIME_DOMINANCE_RATIO) {
        Regime::CostDominated
    } else if d > 0.0 && (c == 0.0 || d / c >= REGIME_DOMINANCE_RATIO) {
        Regime::DetectionDominated
    } else {
        Regime::Mixed
    }
}

/// Break-even leverage threshold with its decomposition.
pub fn threshold(s: &ManipulationScenario) -> ThresholdResult {
    let no_side = s.pi_yes.complement();
    let cost_term = s.k_manip.value() / (s.capital.value() * no_side);
    // Capital cancels analytically from the detection term; computing the
    // cancelled form keeps the term bit-identical across capital levels.
    let detection_term = s.p_detected.value() * s.penalty_factor / no_side;
    let l_star_raw = cost_term + detection_term;
    let always_profitable = l_star_raw < 1.0;
    ThresholdResult {
        l_star: if always_profitable { 1.0 } else { l_star_raw },
        l_star_raw,
        cost_term,
        detection_term,
        regime: classify_regime(cost_term, detection_term),
        always_profitable,
    }
}

/// One evaluated point of a sensitivity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub label: String,
    pub k_manip: f64,
    pub p_detected: f64,
    pub penalty_factor: f64,
    pub capital: f64,
    pub pi_yes: f64,
    pub l_star: f64,
    pub regime: Regime,
    pub always_profitable: bool,
}

/// Sweep axes over the three threshold drivers. An empty axis means "hold the
/// scenario's own value". Values are sorted ascending and deduplicated before
/// the sweep so the grid ordering (and the monotonicity check) is well defined.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepAxes {
    pub k_manip: Vec<f64>,
    pub p_detected: Vec<f64>,
    pub penalty_factor: Vec<f64>,
}

/// A fully evaluated sensitivity grid in deterministic row order
/// (k_manip outermost, then p_detected, then penalty_factor).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityGrid {
    pub rows: Vec<GridRow>,
}

fn prepared_axis(values: &[f64], fallback: f64) -> Result<Vec<f64>, CostBenefitError> {
    let mut axis: Vec<f64> = if values.is_empty() {
        vec![fallback]
    } else {
        values.to_vec()
    };
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(CostBenefitError::EmptyAxis);
    }
    axis.sort_by(|a, b| a.total_cmp(b));
    axis.dedup();
    Ok(axis)
}

/// Evaluates the threshold over the cartesian product of the axes.
///
/// Every point is validated like a standalone scenario; the first invalid
/// point aborts the sweep. The finished grid is checked for monotonicity:
/// l_star must be non-decreasing along each axis holding the others fixed
/// (it is, algebraically — the check guards the implementation, and a failure
/// is reported as a violated invariant rather than silently returned).
pub fn sweep_thresholds(
    base: &ManipulationScenario,
    axes: &SweepAxes,
) -> Result<SensitivityGrid, CostBenefitError> {
    let ks = prepared_axis(&axes.k_manip, base.k_manip.value())?;
    let ps = prepared_axis(&axes.p_detected, base.p_detected.value())?;
    let pens = prepared_axis(&axes.penalty_factor, base.penalty_factor)?;

    let mut rows = Vec::with_capacity(ks.len() * ps.len() * pens.len());
    for &k in &ks {
        for &p in &ps {
            for &pen in &pens {
                let raw = RawScenario {
                    label: base.label.clone(),
                    k_manip: k,
                    capital: base.capital.value(),
                    pi_yes: base.pi_yes.value(),
                    p_detected: p,
                    penalty_factor: pen,
                    leverage: base.leverage.map(|l| l.value()),
                };
                let s = validate_scenario(&raw)?;
                let t = threshold(&s);
                rows.push(GridRow {
                    label: s.label,
                    k_manip: k,
                    p_detected: p,
                    penalty_factor: pen,
                    capital: base.capital.value(),
                    pi_yes: base.pi_yes.value(),
                    l_star: t.l_star,
                    regime: t.regime,
                    always_profitable: t.always_profitable,
                });
            }
        }
    }

    let grid = SensitivityGrid { rows };
    grid.check_monotone(ks.len(), ps.len(), pens.len())?;
    Ok(grid)
}

impl SensitivityGrid {
    /// Non-decreasing l_star along each sorted axis, others held fixed.
    fn check_monotone(&self, nk: usize, np: usize, npen: usize) -> Result<(), CostBenefitError> {
        let idx = |ik: usize, ip: usize, ipen: usize| (ik * np + ip) * npen + ipen;
        let at = |ik: usize, ip: usize, ipen: usize| self.rows[idx(ik, ip, ipen)].l_star;
        for ip in 0..np {
            for ipen in 0..npen {
                for ik in 1..nk {
                    if at(ik, ip, ipen) < at(ik - 1, ip, ipen) {
                        return Err(CostBenefitError::MonotonicityViolation {
                            axis: "k_manip",
                            row: idx(ik, ip, ipen),
                        });
                    }
                }
            }
        }
        for ik in 0..nk {
            for ipen in 0..npen {
                for ip in 1..np {
                    if at(ik, ip, ipen) < at(ik, ip - 1, ipen) {
                        return Err(CostBenefitError::MonotonicityViolation {
                            axis: "p_detected",
                            row: idx(ik, ip, ipen),
                        });
                    }
                }
            }
        }
        for ik in 0..nk {
            for ip in 0..np {
                for ipen in 1..npen {
                    if at(ik, ip, ipen) < at(ik, ip, ipen - 1) {
                        return Err(CostBenefitError::MonotonicityViolation {
                            axis: "penalty_factor",
                            row: idx(ik, ip, ipen),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// CSV rendering with the stable column set consumed by downstream tooling.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,k,p_det,penalty,capital,pi_yes,l_star,regime\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.label,
                r.k_manip,
                r.p_detected,
                r.penalty_factor,
                r.capital,
                r.pi_yes,
                r.l_star,
                r.regime
            ));
        }
        out
    }
}
