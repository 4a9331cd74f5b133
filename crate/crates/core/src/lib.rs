//! Analytics and simulation for leveraged perpetuals written on discrete
//! event outcomes: manipulation break-even thresholds, informed-trading rent
//! amplification, a deterministic venue with margined positions and an
//! insurance pool, executable attack strategies, and a channel-by-channel
//! control matrix.

pub mod adversary;
pub mod config;
pub mod costbenefit;
pub mod matrix;
pub mod rents;
pub mod types;
pub mod venue;

pub use adversary::{
    run_bad_debt_shift, run_halt_arbitrage, run_preemption_attack, AdversaryError, AttackOutcome,
    AttackReport,
};
pub use costbenefit::{
    expected_manipulation_profit, sweep_thresholds, threshold, CostBenefitError, Regime,
    SensitivityGrid, SweepAxes, ThresholdResult,
};
pub use matrix::{lookup, ChannelControlRow, LeverageEffect, CHANNEL_CONTROL_MATRIX};
pub use rents::{
    detection_cost_per_profit, leveraged_rent, rent_compression_check, sharpe_ratio,
    CompressionReport, RentProfile, RentsError,
};
pub use types::{
    validate_scenario, Leverage, ManipulationChannel, ManipulationScenario, Money, Probability,
    RawScenario, ValidationError,
};
pub use venue::{run_market, MarketSpec, Outcome, RunReport, Side, VenueError, VenueState};
