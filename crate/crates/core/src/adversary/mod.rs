//! Executable manipulation strategies run against the venue: index-pushing
//! and spoofing primitives, plus three packaged attacks (margin pre-emption,
//! halt-window arbitrage, bad-debt shifting). Each attack settles a full
//! ledger and reports gross gain, direct cost, and who absorbed the losses.

mod bad_debt;
mod halt_arb;
mod preemption;

pub use bad_debt::{run_bad_debt_shift, BadDebtConfig, OutcomeDraw};
pub use halt_arb::{run_halt_arbitrage, HaltArbConfig};
pub use preemption::{run_preemption_attack, PreemptionConfig};

use crate::types::ManipulationChannel;
use crate::venue::{Demand, RunReport, Side, SpoofStatus, TradeFill, VenueError, VenueState};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Venue(#[from] VenueError),
    /// The ladder ran out of depth before the requested move completed. The
    /// partial execution stands; the report describes it.
    #[error("ladder exhausted: moved {} of {} requested", .0.achieved_move, .0.target_move)]
    InsufficientDepth(PushReport),
    #[error("bad attack parameter: {0}")]
    BadParam(&'static str),
}

/// Execution summary of one directional index push.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushReport {
    pub target_move: f64,
    pub achieved_move: f64,
    pub qty: f64,
    /// Premium paid beyond the pre-push index.
    pub cost: f64,
    /// False when the budget capped the push short of the target.
    pub complete: bool,
}

/// Pushes the index toward `side` by `target_move`, spending at most
/// `budget` (premium over the pre-push index) when one is given.
///
/// A budget cap is a graceful partial; exhausting the ladder's depth is an
/// error carrying the partial execution, which stands either way.
pub fn trade_based_push(
    state: &mut VenueState,
    agent: &str,
    side: Side,
    target_move: f64,
    budget: Option<f64>,
) -> Result<PushReport, AdversaryError> {
    if !target_move.is_finite() || target_move <= 0.0 {
        return Err(AdversaryError::BadParam("target move must be positive"));
    }
    if let Some(b) = budget {
        if !b.is_finite() || b <= 0.0 {
            return Err(AdversaryError::BadParam("push budget must be positive"));
        }
    }
    let plan = state
        .ladder()
        .walk(state.index(), Demand::TargetMove(target_move));
    let fill: TradeFill = match budget {
        Some(b) if plan.premium > b => state.market_order_budget(agent, side, b)?,
        _ => state.market_order(agent, side, plan.qty)?,
    };
    let report = PushReport {
        target_move,
        achieved_move: fill.move_abs,
        qty: fill.filled,
        cost: fill.premium,
        complete: fill.move_abs >= target_move - 1e-12,
    };
    if plan.exhausted && !report.complete && budget.map_or(true, |b| plan.premium <= b) {
        return Err(AdversaryError::InsufficientDepth(report));
    }
    Ok(report)
}

/// One place-dwell-withdraw spoofing cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpoofCycleReport {
    /// Index reaction to placement (signed toward the spoofed side).
    pub reaction: f64,
    /// The fake quote was hit and turned into real inventory.
    pub filled: bool,
    /// The quote came back out (by the spoofer, or by the venue at a halt).
    pub withdrawn: bool,
    pub index_before: f64,
    pub index_at_peak: f64,
    pub index_after: f64,
}

/// Places a spoof quote, lets it rest for `dwell_ticks`, then withdraws it
/// if the index has not crossed it first. The venue clock advances by the
/// dwell.
pub fn spoof_and_withdraw(
    state: &mut VenueState,
    agent: &str,
    side: Side,
    offset_bps: u32,
    qty: f64,
    dwell_ticks: u32,
) -> Result<SpoofCycleReport, AdversaryError> {
    let index_before = state.index();
    let id = state.place_spoof(agent, side, offset_bps, qty)?;
    let index_at_peak = state.index();
    for _ in 0..dwell_ticks {
        state.step(&[])?;
    }
    let status = state.spoof_status(id).expect("spoof id just placed");
    if status == SpoofStatus::Resting {
        state.withdraw_spoof(id)?;
    }
    Ok(SpoofCycleReport {
        reaction: index_at_peak - index_before,
        filled: status == SpoofStatus::Filled,
        withdrawn: status != SpoofStatus::Filled,
        index_before,
        index_at_peak,
        index_after: state.index(),
    })
}

/// Outcome of one packaged attack, decomposed from the settled ledger.
///
/// `net_pnl` is always `manipulator_pnl - manipulation_cost`, and
/// `profitable` is `net_pnl > 0`; every runner constructs the report that
/// way so the three fields can never disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub channel: ManipulationChannel,
    pub seed: u64,
    /// The venue configuration removes this channel entirely (for example a
    /// flat-rate margin floor cannot pre-empt, and no halt window means no
    /// halt to arbitrage). Nothing was run.
    pub channel_absent: bool,
    pub profitable: bool,
    /// Gross gain attributable to the attack.
    pub manipulator_pnl: f64,
    /// Direct cost paid executing it.
    pub manipulation_cost: f64,
    pub net_pnl: f64,
    /// Attack-run PnL minus counterfactual-run PnL on the same seed, for
    /// channels measured against a paired baseline.
    pub differential_pnl: Option<f64>,
    /// Realized losses of everyone but the attacker (book included).
    pub counterparty_losses: f64,
    pub pool_drawdown: f64,
    pub uncovered_bad_debt: f64,
    /// Forced closes the flat-rate floor alone would not have caused.
    pub preempted_positions: u32,
    /// Aggregate notional of all forced closes.
    pub forced_close_volume: f64,
    /// Fraction of a winning attacker's gross payout funded by the pool.
    pub pool_funded_share: Option<f64>,
}

impl AttackReport {
    /// Report for a configuration in which the channel does not exist.
    pub fn absent(channel: ManipulationChannel, seed: u64) -> Self {
        Self {
            channel,
            seed,
            channel_absent: true,
            profitable: false,
            manipulator_pnl: 0.0,
            manipulation_cost: 0.0,
            net_pnl: 0.0,
            differential_pnl: None,
            counterparty_losses: 0.0,
            pool_drawdown: 0.0,
            uncovered_bad_debt: 0.0,
            preempted_positions: 0,
            forced_close_volume: 0.0,
            pool_funded_share: None,
        }
    }
}

/// An attack report together with the settled run(s) behind it: the attack
/// run first, then any counterfactual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackOutcome {
    pub attack: AttackReport,
    pub runs: Vec<RunReport>,
}

/// Sum of realized losses over every agent the attacker does not own.
fn counterparty_losses(report: &RunReport, own: &[&str]) -> f64 {
    report
        .agents
        .iter()
        .filter(|(name, _)| !own.contains(&name.as_str()))
        .map(|(_, a)| (-a.pnl).max(0.0))
        .sum()
}

/// Name the attacker trades under in packaged attacks.
pub const MANIPULATOR: &str = "manipulator";
