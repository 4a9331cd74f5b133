//! Run reports and the per-tick event log.
//!
//! Reports are plain serde structs with ordered maps so that identical inputs
//! serialize to byte-identical JSON.

use super::EngineKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    PositionOpen,
    Trade,
    SpoofPlace,
    SpoofWithdraw,
    SpoofFill,
    Liquidation,
    Halt,
    HaltClose,
    Settlement,
    PoolDraw,
    UncoveredDebt,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::PositionOpen => "position-open",
            EventKind::Trade => "trade",
            EventKind::SpoofPlace => "spoof-place",
            EventKind::SpoofWithdraw => "spoof-withdraw",
            EventKind::SpoofFill => "spoof-fill",
            EventKind::Liquidation => "liquidation",
            EventKind::Halt => "halt",
            EventKind::HaltClose => "halt-close",
            EventKind::Settlement => "settlement",
            EventKind::PoolDraw => "pool-draw",
            EventKind::UncoveredDebt => "uncovered-debt",
        })
    }
}

/// One logged event. `id` names the position (`p<N>`) or agent involved;
/// `amount` is the kind-specific magnitude (signed quantity for trades,
/// shortfall for pool draws, realized value for closes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub tick: u32,
    pub index: f64,
    pub kind: EventKind,
    pub id: String,
    pub amount: f64,
}

/// Per-agent rollup across positions and flow inventory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentSummary {
    /// Realized PnL, collateral-capped on defaulted positions.
    pub pnl: f64,
    /// Ticks on which some maintenance requirement of this agent rose.
    pub margin_increases: u32,
    /// Positions of this agent closed by the liquidation engine.
    pub liquidations: u32,
    /// Contracts traded through the ladder (gross).
    pub volume: f64,
}

/// Full accounting of one simulated market run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub engine: EngineKind,
    pub resolution_tick: u32,
    pub halt_ticks: u32,
    /// Width of the pre-resolution window used for windowed liquidation
    /// counts; defaults to `halt_ticks`.
    pub final_window_ticks: u32,
    pub outcome: f64,
    /// Index the venue halted at, when a halt window was configured.
    pub halt_price: Option<f64>,
    /// Index one tick before resolution (traded index, including impact).
    pub pre_jump_index: f64,
    /// |outcome - pre_jump_index|.
    pub realized_terminal_jump: f64,
    pub pool_initial: f64,
    pub pool_final: f64,
    /// Shortfall the pool could not absorb (non-negative by convention).
    pub uncovered_bad_debt: f64,
    /// Total collateral shortfall across liquidations, halt closes, and
    /// settlement (= pool payments + uncovered).
    pub bad_debt_total: f64,
    pub liquidations_total: u32,
    /// Liquidations inside [resolution - final_window_ticks, resolution).
    pub liquidations_final_window: u32,
    /// Forced closes the flat-rate margin floor alone would not have caused.
    pub liquidations_preempted: u32,
    /// Aggregate notional across all liquidation closes.
    pub forced_close_volume: f64,
    pub agents: BTreeMap<String, AgentSummary>,
    /// sum(agent pnl) + (pool_final - pool_initial) - uncovered_bad_debt.
    /// Structurally zero; kept in the report as a tripwire.
    pub conservation_residual: f64,
    pub events: Vec<EventRecord>,
}

impl RunReport {
    /// Deterministic JSON rendering (ordered maps, fixed field order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Event log as CSV: tick, index, event kind, id, amount.
    pub fn events_to_csv(&self) -> String {
        let mut out = String::from("tick,index,kind,id,amount\n");
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.tick, e.index, e.kind, e.id, e.amount
            ));
        }
        out
    }

    pub fn agent(&self, name: &str) -> Option<&AgentSummary> {
        self.agents.get(name)
    }

    pub fn total_agent_pnl(&self) -> f64 {
        self.agents.values().map(|a| a.pnl).sum()
    }
}
