//! Maintenance-margin engines.
//!
//! StaticE0 charges a flat fraction of notional. DynamicE2 scales that base
//! requirement up under stress — elevated realized volatility, approaching
//! resolution, and adverse excursion since entry — and never below it:
//!
//! ```text
//! req = m0 * N * (1 + alpha*max(0, vol/vol_ref - 1)
//!                   + beta*max(0, 1 - ttr/ttr_ref)
//!                   + gamma*adverse_move)
//! ```
//!
//! With identical m0, DynamicE2 >= StaticE0 pointwise because every stress
//! term is floored at zero.

use super::{Position, VenueError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EngineKind {
    StaticE0,
    DynamicE2,
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineKind::StaticE0 => "e0",
            EngineKind::DynamicE2 => "e2",
        })
    }
}

/// Margin engine parameters. The stress knobs are ignored under StaticE0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub kind: EngineKind,
    /// Base maintenance fraction of notional, in (0, 1].
    pub m0: f64,
    /// Volatility stress weight.
    pub alpha: f64,
    /// Time-to-resolution stress weight.
    pub beta: f64,
    /// Adverse-excursion stress weight.
    pub gamma: f64,
    /// Trailing window (ticks) for realized volatility.
    pub vol_window: usize,
    /// Reference per-tick volatility; stress kicks in above it.
    pub vol_ref: f64,
    /// Reference time-to-resolution (ticks); 0 disables the time term.
    pub ttr_ref: u32,
}

impl EngineConfig {
    pub fn static_e0(m0: f64) -> Self {
        Self {
            kind: EngineKind::StaticE0,
            m0,
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            vol_window: 20,
            vol_ref: 0.02,
            ttr_ref: 0,
        }
    }

    pub fn dynamic_e2(m0: f64) -> Self {
        Self {
            kind: EngineKind::DynamicE2,
            m0,
            alpha: 1.0,
            beta: 0.5,
            gamma: 1.0,
            vol_window: 20,
            vol_ref: 0.02,
            ttr_ref: 0,
        }
    }

    pub fn validate(&self) -> Result<(), VenueError> {
        if !self.m0.is_finite() || self.m0 <= 0.0 || self.m0 > 1.0 {
            return Err(VenueError::BadEngineParam("m0 must be in (0, 1]"));
        }
        if [self.alpha, self.beta, self.gamma]
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(VenueError::BadEngineParam(
                "stress weights must be finite and non-negative",
            ));
        }
        if !self.vol_ref.is_finite() || self.vol_ref <= 0.0 {
            return Err(VenueError::BadEngineParam("vol_ref must be positive"));
        }
        if self.vol_window < 2 {
            return Err(VenueError::BadEngineParam("vol_window must be >= 2"));
        }
        Ok(())
    }
}

/// Market observables feeding the dynamic engine at one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginObservables {
    /// Realized per-tick index volatility over the trailing window.
    pub realized_vol: f64,
    /// Ticks remaining to resolution.
    pub ticks_to_resolution: u32,
    /// Current index.
    pub index: f64,
}

/// Maintenance requirement for a position under the given engine and
/// observables. Monotone in each stress input under DynamicE2.
pub fn maintenance_requirement(
    cfg: &EngineConfig,
    pos: &Position,
    obs: &MarginObservables,
) -> f64 {
    let base = cfg.m0 * pos.notional;
    match cfg.kind {
        EngineKind::StaticE0 => base,
        EngineKind::DynamicE2 => {
            let vol_stress = (obs.realized_vol / cfg.vol_ref - 1.0).max(0.0);
            let time_stress = if cfg.ttr_ref == 0 {
                0.0
            } else {
                (1.0 - obs.ticks_to_resolution as f64 / cfg.ttr_ref as f64).max(0.0)
            };
            let adverse = pos.adverse_move(obs.index);
            base * (1.0
                + cfg.alpha * vol_stress
                + cfg.beta * time_stress
                + cfg.gamma * adverse)
        }
    }
}
