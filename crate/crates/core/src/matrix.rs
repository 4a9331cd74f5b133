//! Channel-control matrix: how leverage changes each manipulation channel and
//! which engine-side and policy-side controls address it.
//!
//! Ten rows cover the thirteen `ManipulationChannel` kinds; closely related
//! kinds share a row through the representative's `covers` list (the outcome
//! channels split by cost regime, not by event domain). The table is versioned
//! with the artifact: `to_csv` is the canonical rendering and tests hold it
//! byte-for-byte against a golden copy.

use crate::types::ManipulationChannel;
use serde::{Deserialize, Serialize};
use std::fmt;

/// How leverage acts on a channel's economics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeverageEffect {
    /// Scales an existing channel's profit linearly.
    #[serde(rename = "multiplicative")]
    Multiplicative,
    /// Moves a break-even threshold across the feasible range.
    #[serde(rename = "threshold-shifting")]
    ThresholdShifting,
    /// Threshold stays out of reach at any achievable leverage.
    #[serde(rename = "negligible")]
    Negligible,
    /// The channel only exists because of the margin/halt framework.
    #[serde(rename = "framework-introduced")]
    FrameworkIntroduced,
    /// Scales profit and amortizes fixed detection costs.
    #[serde(rename = "multiplicative-plus-amortized")]
    MultiplicativePlusAmortized,
}

impl LeverageEffect {
    pub fn slug(self) -> &'static str {
        match self {
            LeverageEffect::Multiplicative => "multiplicative",
            LeverageEffect::ThresholdShifting => "threshold-shifting",
            LeverageEffect::Negligible => "negligible",
            LeverageEffect::FrameworkIntroduced => "framework-introduced",
            LeverageEffect::MultiplicativePlusAmortized => "multiplicative-plus-amortized",
        }
    }
}

impl fmt::Display for LeverageEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// One matrix row keyed by its representative channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelControlRow {
    pub channel: ManipulationChannel,
    /// Further channels this row covers.
    pub covers: &'static [ManipulationChannel],
    pub leverage_effect: LeverageEffect,
    pub detection_source: &'static str,
    pub engine_control: &'static str,
    pub regulatory_control: &'static str,
    /// Mechanism slug tying the row to the analysis module that models it.
    pub anchor: &'static str,
}

use LeverageEffect::*;
use ManipulationChannel::*;

/// The full channel-control matrix, in presentation order.
pub const CHANNEL_CONTROL_MATRIX: [ChannelControlRow; 10] = [
    ChannelControlRow {
        channel: TradeBased,
        covers: &[],
        leverage_effect: Multiplicative,
        detection_source: "Transaction-volume anomalies; on-chain attribution",
        engine_control: "Index estimator robustness; venue surveillance",
        regulatory_control: "Fraud and market-manipulation enforcement",
        anchor: "index-pressure",
    },
    ChannelControlRow {
        channel: SpoofWithdraw,
        covers: &[],
        leverage_effect: Multiplicative,
        detection_source: "Quote-and-immediate-withdraw signatures",
        engine_control: "Quote-stability requirements; minimum quote lifetime",
        regulatory_control: "Spoofing-specific enforcement",
        anchor: "quote-stability",
    },
    ChannelControlRow {
        channel: InformationBased,
        covers: &[],
        leverage_effect: Multiplicative,
        detection_source: "Retrospective comparison of positioning against the eventual oracle outcome",
        engine_control: "Limited: conduct occurs outside the venue",
        regulatory_control: "Securities-fraud and disclosure rules",
        anchor: "out-of-venue-information",
    },
    ChannelControlRow {
        channel: OracleIndex,
        covers: &[],
        leverage_effect: Multiplicative,
        detection_source: "Index-input dispute logs; oracle dispute mechanisms",
        engine_control: "Multi-input index estimator; oracle dispute thresholds",
        regulatory_control: "Oracle-mechanism standards",
        anchor: "oracle-inputs",
    },
    ChannelControlRow {
        channel: OutcomeSports,
        covers: &[OutcomeSubNationalPolitical, InformationReleaseTiming],
        leverage_effect: ThresholdShifting,
        detection_source: "Joint distribution of position-taking and outcomes, as in insider-trading surveillance",
        engine_control: "Class-specific leverage caps; position-size limits",
        regulatory_control: "Class-asymmetric leverage caps; sports-specific conduct rules",
        anchor: "outcome-threshold",
    },
    ChannelControlRow {
        channel: OutcomeLargeElectorate,
        covers: &[OutcomeMacro],
        leverage_effect: Negligible,
        detection_source: "Joint distribution of position-taking and outcomes, as in insider-trading surveillance",
        engine_control: "Class-specific leverage caps; position-size limits",
        regulatory_control: "Lower enforcement priority",
        anchor: "outcome-cost-dominance",
    },
    ChannelControlRow {
        channel: InformedTradingRents,
        covers: &[],
        leverage_effect: MultiplicativePlusAmortized,
        detection_source: "Information-leakage scoring against eventual outcomes; cross-platform signal-credibility checks",
        engine_control: "Dynamic margin may compress rents; not directly estimated",
        regulatory_control: "Insider-trading enforcement; cross-platform detection sharing",
        anchor: "rent-amplification",
    },
    ChannelControlRow {
        channel: PreEmption,
        covers: &[],
        leverage_effect: FrameworkIntroduced,
        detection_source: "Forced-close cross-trade patterns around volatility spikes",
        engine_control: "Reduced dynamic-margin sensitivity; hybrid static-dynamic margin design",
        regulatory_control: "Stress-test requirements",
        anchor: "margin-pre-emption",
    },
    ChannelControlRow {
        channel: HaltArbitrage,
        covers: &[],
        leverage_effect: FrameworkIntroduced,
        detection_source: "Pre-halt index manipulation patterns",
        engine_control: "Halt-window randomization; longer pre-halt averaging window",
        regulatory_control: "Stress-test requirements",
        anchor: "halt-window",
    },
    ChannelControlRow {
        channel: BadDebtShifting,
        covers: &[],
        leverage_effect: Multiplicative,
        detection_source: "Joint distribution of position size and counterparty collateral",
        engine_control: "Jump-aware tiered margin; insurance-pool position-size caps",
        regulatory_control: "Position-size cap requirements; insurance-pool transparency",
        anchor: "bad-debt-routing",
    },
];

/// The matrix row responsible for a channel. Total: every channel is either a
/// representative or covered by one.
pub fn lookup(channel: ManipulationChannel) -> &'static ChannelControlRow {
    CHANNEL_CONTROL_MATRIX
        .iter()
        .find(|row| row.channel == channel || row.covers.contains(&channel))
        .expect("matrix covers every channel")
}

/// Representative channels whose rows carry the given effect, in matrix order.
pub fn channels_by_effect(effect: LeverageEffect) -> Vec<ManipulationChannel> {
    CHANNEL_CONTROL_MATRIX
        .iter()
        .filter(|row| row.leverage_effect == effect)
        .map(|row| row.channel)
        .collect()
}

/// Canonical CSV rendering of the matrix (RFC-4180 quoting).
pub fn to_csv() -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "channel",
        "covers",
        "leverage_effect",
        "detection_source",
        "engine_control",
        "regulatory_control",
        "anchor",
    ])
    .expect("header writes");
    for row in &CHANNEL_CONTROL_MATRIX {
        let covers = row
            .covers
            .iter()
            .map(|c| c.slug())
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            row.channel.slug(),
            &covers,
            row.leverage_effect.slug(),
            row.detection_source,
            row.engine_control,
            row.regulatory_control,
            row.anchor,
        ])
        .expect("row writes");
    }
    String::from_utf8(w.into_inner().expect("writer finishes")).expect("valid utf-8")
}

/// JSON rendering of the matrix rows.
pub fn to_json() -> String {
    serde_json::to_string_pretty(&CHANNEL_CONTROL_MATRIX.as_slice()).expect("matrix serializes")
}
