//! Deterministic single-market venue: leveraged positions on a [0, 1] event
//! index, liquidation against a resting-depth ladder, an insurance pool, and
//! an optional pre-resolution trading halt.
//!
//! Time is discrete. Each tick the index re-bases to path value + permanent
//! impact + active spoof pressure, exogenous market orders execute against the
//! ladder (moving the index permanently), margin is checked per position in id
//! order, and undercollateralized positions are force-closed through the same
//! ladder. At `resolution_tick` the index jumps to the resolved outcome and
//! open exposure cash-settles against it. Collateral caps every loss; the
//! shortfall goes to the insurance pool first and an uncovered-bad-debt
//! counter after that, while winners are paid in full.
//!
//! Double-entry discipline: every fill has the passive market-making book
//! ("market") on the other side, so for any run
//!
//! ```text
//! sum(agent pnl) + (pool_final - pool_initial) - uncovered_bad_debt = 0
//! ```
//!
//! holds structurally, not statistically.

pub mod engine;
pub mod ladder;
pub mod path;
pub mod report;

pub use engine::{maintenance_requirement, EngineConfig, EngineKind, MarginObservables};
pub use ladder::{Demand, DepthBucket, DepthLadder, LadderError, LadderFill};
pub use path::{generate_index_path, IndexPath};
pub use report::{AgentSummary, EventKind, EventRecord, RunReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Reserved name of the passive market-making book.
pub const MARKET_AGENT: &str = "market";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VenueError {
    #[error("bad market spec: {0}")]
    BadMarketSpec(&'static str),
    #[error("volatility {0} must be finite and non-negative")]
    BadVolatility(f64),
    #[error("start index {0} must lie strictly inside (0, 1)")]
    BadStartIndex(f64),
    #[error("path has {got} values, spec needs {expected}")]
    PathLength { expected: usize, got: usize },
    #[error("path value {0} outside [0, 1]")]
    PathValueOutOfRange(f64),
    #[error("path ends at {terminal} but the outcome resolves to {outcome}")]
    PathOutcomeMismatch { terminal: f64, outcome: f64 },
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error("bad engine config: {0}")]
    BadEngineParam(&'static str),
    #[error("bad position: {0}")]
    BadPosition(&'static str),
    #[error("insurance pool balance {0} must be finite and non-negative")]
    BadPoolBalance(f64),
    #[error("agent name '{0}' is reserved")]
    ReservedAgent(String),
    #[error("duplicate flow agent '{0}'")]
    DuplicateAgent(String),
    #[error("venue is halted")]
    TradingHalted,
    #[error("venue is already settled")]
    VenueSettled,
    #[error("orders cannot execute at or after the resolution tick")]
    MarketClosed,
    #[error("cannot step past the resolution tick")]
    StepPastResolution,
    #[error("cannot settle at tick {0}: resolution not reached")]
    ResolutionNotReached(u32),
    #[error("invalid order: {0}")]
    InvalidOrder(&'static str),
    #[error("unknown spoof id {0}")]
    UnknownSpoof(u32),
    #[error("spoof {0} is no longer active")]
    SpoofInactive(u32),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// Resolved binary outcome of the linked event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    No,
    Yes,
}

impl Outcome {
    pub fn value(self) -> f64 {
        match self {
            Outcome::No => 0.0,
            Outcome::Yes => 1.0,
        }
    }
}

/// Event class the market is linked to; descriptive metadata carried through
/// to reports and used by scenario labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventClass {
    Sports,
    Politics,
    Crypto,
    Macro,
    Other,
}

/// Static description of one event-linked market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSpec {
    /// Tick at which the index jumps to the outcome and exposure settles.
    pub resolution_tick: u32,
    /// Halt window width: trading stops at `resolution_tick - halt_ticks`.
    /// 0 means no halt.
    pub halt_ticks: u32,
    pub outcome: Outcome,
    /// Reference |outcome - pre-resolution index| used for reporting.
    pub terminal_jump_reference: f64,
    pub event_class: EventClass,
}

impl MarketSpec {
    pub fn new(
        resolution_tick: u32,
        halt_ticks: u32,
        outcome: Outcome,
        terminal_jump_reference: f64,
        event_class: EventClass,
    ) -> Result<Self, VenueError> {
        if resolution_tick < 2 {
            return Err(VenueError::BadMarketSpec("resolution_tick must be >= 2"));
        }
        if halt_ticks >= resolution_tick {
            return Err(VenueError::BadMarketSpec(
                "halt window must end strictly before resolution",
            ));
        }
        if !terminal_jump_reference.is_finite()
            || !(0.0..=1.0).contains(&terminal_jump_reference)
        {
            return Err(VenueError::BadMarketSpec(
                "terminal_jump_reference must lie in [0, 1]",
            ));
        }
        Ok(Self {
            resolution_tick,
            halt_ticks,
            outcome,
            terminal_jump_reference,
            event_class,
        })
    }

    /// First halted tick, if a halt window is configured.
    pub fn halt_tick(&self) -> Option<u32> {
        (self.halt_ticks > 0).then(|| self.resolution_tick - self.halt_ticks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Long,
    Short,
}

impl Side {
    pub fn dir(self) -> f64 {
        match self {
            Side::Long => 1.0,
            Side::Short => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Long => Side::Short,
            Side::Short => Side::Long,
        }
    }
}

/// A margined directional position in $1-payout contracts.
///
/// Invariant: notional = collateral * leverage, bit-exact (notional is derived
/// from the other two at construction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub id: u32,
    pub agent: String,
    pub side: Side,
    pub entry: f64,
    pub notional: f64,
    pub collateral: f64,
    pub leverage: f64,
    pub open: bool,
    prev_requirement: Option<f64>,
    pub margin_increases: u32,
}

impl Position {
    pub fn new(
        id: u32,
        agent: String,
        side: Side,
        entry: f64,
        collateral: f64,
        leverage: f64,
    ) -> Result<Self, VenueError> {
        if !collateral.is_finite() || collateral <= 0.0 {
            return Err(VenueError::BadPosition("collateral must be positive"));
        }
        if !leverage.is_finite() || leverage < 1.0 {
            return Err(VenueError::BadPosition("leverage must be >= 1"));
        }
        if !entry.is_finite() || !(0.0..=1.0).contains(&entry) {
            return Err(VenueError::BadPosition("entry must lie in [0, 1]"));
        }
        Ok(Self {
            id,
            agent,
            side,
            entry,
            notional: collateral * leverage,
            collateral,
            leverage,
            open: true,
            prev_requirement: None,
            margin_increases: 0,
        })
    }

    /// Mark-to-index PnL.
    pub fn unrealized(&self, index: f64) -> f64 {
        self.notional * (index - self.entry) * self.side.dir()
    }

    /// Per-unit move against the position since entry, floored at zero.
    pub fn adverse_move(&self, index: f64) -> f64 {
        ((self.entry - index) * self.side.dir()).max(0.0)
    }
}

/// Average-price inventory for flow agents and the market book. Uncapped:
/// flow agents are assumed solvent and cannot default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct FlowInventory {
    qty: f64,
    avg: f64,
    realized: f64,
}

impl FlowInventory {
    fn apply_fill(&mut self, signed_qty: f64, price: f64) {
        if signed_qty == 0.0 {
            return;
        }
        if self.qty == 0.0 || self.qty.signum() == signed_qty.signum() {
            let new_qty = self.qty + signed_qty;
            self.avg = (self.avg * self.qty + price * signed_qty) / new_qty;
            self.qty = new_qty;
            return;
        }
        let closing = signed_qty.abs().min(self.qty.abs());
        // Realizes (price - avg) per contract on the long side, reversed short.
        self.realized += closing * (price - self.avg) * self.qty.signum();
        let leftover = signed_qty + self.qty.signum() * closing;
        self.qty += signed_qty;
        if self.qty == 0.0 {
            self.avg = 0.0;
        } else if leftover != 0.0 && self.qty.signum() == leftover.signum() {
            // Crossed through zero: remainder opens at the fill price.
            self.avg = price;
        }
    }

    fn mark_close(&mut self, price: f64) -> f64 {
        let realized = self.qty * (price - self.avg);
        self.realized += realized;
        self.qty = 0.0;
        self.avg = 0.0;
        realized
    }
}

/// A resting spoof quote: fake depth at a fixed level that shifts the index
/// while it rests and fills if the index crosses it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Spoof {
    id: u32,
    agent: String,
    side: Side,
    level: f64,
    qty: f64,
    shift: f64,
    active: bool,
    filled: bool,
}

/// Lifecycle of a spoof quote.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpoofStatus {
    Resting,
    Filled,
    Withdrawn,
}

/// Exogenous market order for one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Order {
    pub agent: String,
    pub side: Side,
    pub demand: Demand,
}

impl Order {
    pub fn qty(agent: impl Into<String>, side: Side, qty: f64) -> Self {
        Self {
            agent: agent.into(),
            side,
            demand: Demand::Quantity(qty),
        }
    }

    pub fn budget(agent: impl Into<String>, side: Side, budget: f64) -> Self {
        Self {
            agent: agent.into(),
            side,
            demand: Demand::Budget(budget),
        }
    }
}

/// Result of a ladder-executed trade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeFill {
    pub requested: f64,
    pub filled: f64,
    pub avg_price: f64,
    pub move_abs: f64,
    /// Cost paid beyond the pre-trade index.
    pub premium: f64,
    pub exhausted: bool,
}

/// Venue-level tunables outside the market spec and margin engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueParams {
    /// Index reaction per unit of spoofed depth relative to side depth.
    pub spoof_kappa: f64,
    /// Width of the windowed liquidation counter; defaults to the halt window.
    pub final_window_ticks: Option<u32>,
}

impl Default for VenueParams {
    fn default() -> Self {
        Self {
            spoof_kappa: 0.1,
            final_window_ticks: None,
        }
    }
}

/// How the insurance pool is funded at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PoolInit {
    /// Fraction of the aggregate notional of all roster positions.
    FractionOfOpenNotional(f64),
    Balance(f64),
}

impl Default for PoolInit {
    fn default() -> Self {
        PoolInit::FractionOfOpenNotional(0.1)
    }
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Live state of one market run.
#[derive(Debug, Clone)]
pub struct VenueState {
    spec: MarketSpec,
    engine: EngineConfig,
    ladder: DepthLadder,
    path: IndexPath,
    params: VenueParams,

    tick: u32,
    index: f64,
    impact: f64,

    positions: Vec<Position>,
    inventories: BTreeMap<String, FlowInventory>,
    spoofs: Vec<Spoof>,
    spoof_shift: f64,

    pool: f64,
    pool_initial: f64,
    uncovered: f64,
    bad_debt_total: f64,

    halted: bool,
    halt_price: Option<f64>,
    settled: bool,

    returns: VecDeque<f64>,
    prev_phase_index: f64,
    realized_vol: f64,

    liq_total: u32,
    liq_final_window: u32,
    liq_preempted: u32,
    forced_close_volume: f64,
    liquidation_sink: Option<String>,
    pre_jump_index: f64,

    position_pnl: BTreeMap<String, f64>,
    volume: BTreeMap<String, f64>,
    liq_by_agent: BTreeMap<String, u32>,
    margin_inc_by_agent: BTreeMap<String, u32>,

    events: Vec<EventRecord>,
}

impl VenueState {
    pub fn new(
        spec: MarketSpec,
        engine: EngineConfig,
        ladder: DepthLadder,
        path: IndexPath,
        pool_balance: f64,
        params: VenueParams,
    ) -> Result<Self, VenueError> {
        engine.validate()?;
        if !pool_balance.is_finite() || pool_balance < 0.0 {
            return Err(VenueError::BadPoolBalance(pool_balance));
        }
        if path.len() != spec.resolution_tick as usize + 1 {
            return Err(VenueError::PathLength {
                expected: spec.resolution_tick as usize + 1,
                got: path.len(),
            });
        }
        if !params.spoof_kappa.is_finite() || params.spoof_kappa < 0.0 {
            return Err(VenueError::InvalidOrder("spoof_kappa must be non-negative"));
        }
        if let Some(w) = params.final_window_ticks {
            if w > spec.resolution_tick {
                return Err(VenueError::BadMarketSpec(
                    "final window cannot be wider than the run",
                ));
            }
        }
        let start = path.value_at(0);
        let mut inventories = BTreeMap::new();
        inventories.insert(MARKET_AGENT.to_string(), FlowInventory::default());
        Ok(Self {
            spec,
            engine,
            ladder,
            path,
            params,
            tick: 0,
            index: start,
            impact: 0.0,
            positions: Vec::new(),
            inventories,
            spoofs: Vec::new(),
            spoof_shift: 0.0,
            pool: pool_balance,
            pool_initial: pool_balance,
            uncovered: 0.0,
            bad_debt_total: 0.0,
            halted: false,
            halt_price: None,
            settled: false,
            returns: VecDeque::new(),
            prev_phase_index: start,
            realized_vol: 0.0,
            liq_total: 0,
            liq_final_window: 0,
            liq_preempted: 0,
            forced_close_volume: 0.0,
            liquidation_sink: None,
            pre_jump_index: start,
            position_pnl: BTreeMap::new(),
            volume: BTreeMap::new(),
            liq_by_agent: BTreeMap::new(),
            margin_inc_by_agent: BTreeMap::new(),
            events: Vec::new(),
        })
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    pub fn is_halted(&self) -> bool {
        self.halted
    }

    pub fn is_settled(&self) -> bool {
        self.settled
    }

    pub fn pool_balance(&self) -> f64 {
        self.pool
    }

    pub fn uncovered_bad_debt(&self) -> f64 {
        self.uncovered
    }

    pub fn realized_vol(&self) -> f64 {
        self.realized_vol
    }

    /// Designates an agent who stands first in the close-out queue: forced
    /// closes cross to them at the ladder-derived stress price instead of
    /// hitting the book. A cross moves no depth, so it leaves no impact.
    pub fn set_liquidation_sink(&mut self, agent: Option<&str>) -> Result<(), VenueError> {
        if let Some(a) = agent {
            if a == MARKET_AGENT {
                return Err(VenueError::ReservedAgent(a.to_string()));
            }
        }
        self.liquidation_sink = agent.map(str::to_string);
        Ok(())
    }

    pub fn spec(&self) -> &MarketSpec {
        &self.spec
    }

    pub fn engine(&self) -> &EngineConfig {
        &self.engine
    }

    pub fn ladder(&self) -> &DepthLadder {
        &self.ladder
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn position(&self, id: u32) -> Option<&Position> {
        self.positions.get(id as usize)
    }

    fn final_window(&self) -> u32 {
        self.params.final_window_ticks.unwrap_or(self.spec.halt_ticks)
    }

    fn recompute_index(&mut self) {
        self.index = clamp01(self.path.value_at(self.tick) + self.impact + self.spoof_shift);
    }

    fn log(&mut self, kind: EventKind, id: impl Into<String>, amount: f64) {
        self.events.push(EventRecord {
            tick: self.tick,
            index: self.index,
            kind,
            id: id.into(),
            amount,
        });
    }

    fn add_volume(&mut self, agent: &str, qty: f64) {
        *self.volume.entry(agent.to_string()).or_insert(0.0) += qty;
    }

    fn ensure_tradable(&self) -> Result<(), VenueError> {
        if self.settled {
            return Err(VenueError::VenueSettled);
        }
        if self.halted {
            return Err(VenueError::TradingHalted);
        }
        if self.tick >= self.spec.resolution_tick {
            return Err(VenueError::MarketClosed);
        }
        Ok(())
    }

    /// Opens a margined position administratively at the current index (no
    /// ladder walk, no impact). The market book takes the other side.
    pub fn open_position(
        &mut self,
        agent: &str,
        side: Side,
        collateral: f64,
        leverage: f64,
    ) -> Result<u32, VenueError> {
        self.ensure_tradable()?;
        if agent == MARKET_AGENT {
            return Err(VenueError::ReservedAgent(agent.to_string()));
        }
        let id = self.positions.len() as u32;
        let pos = Position::new(id, agent.to_string(), side, self.index, collateral, leverage)?;
        let notional = pos.notional;
        self.market_book()
            .apply_fill(-side.dir() * notional, pos.entry);
        self.add_volume(agent, notional);
        self.add_volume(MARKET_AGENT, notional);
        self.positions.push(pos);
        self.log(
            EventKind::PositionOpen,
            format!("p{id}"),
            side.dir() * notional,
        );
        Ok(id)
    }

    /// Opens a position sized by notional; collateral = notional / leverage,
    /// then notional is re-derived so the margin identity stays bit-exact.
    pub fn open_position_notional(
        &mut self,
        agent: &str,
        side: Side,
        notional: f64,
        leverage: f64,
    ) -> Result<u32, VenueError> {
        if !notional.is_finite() || notional <= 0.0 {
            return Err(VenueError::BadPosition("notional must be positive"));
        }
        if !leverage.is_finite() || leverage < 1.0 {
            return Err(VenueError::BadPosition("leverage must be >= 1"));
        }
        self.open_position(agent, side, notional / leverage, leverage)
    }

    fn market_book(&mut self) -> &mut FlowInventory {
        self.inventories
            .get_mut(MARKET_AGENT)
            .expect("market book always present")
    }

    /// Executes a marketable order against the ladder. Partial fills are
    /// returned, not errors; the caller inspects `exhausted`.
    pub fn market_order(
        &mut self,
        agent: &str,
        side: Side,
        qty: f64,
    ) -> Result<TradeFill, VenueError> {
        if !qty.is_finite() || qty <= 0.0 {
            return Err(VenueError::InvalidOrder("quantity must be positive"));
        }
        self.taker_order(agent, side, Demand::Quantity(qty), qty)
    }

    /// Executes a marketable order bounded by spend above the pre-trade index
    /// rather than by quantity.
    pub fn market_order_budget(
        &mut self,
        agent: &str,
        side: Side,
        budget: f64,
    ) -> Result<TradeFill, VenueError> {
        if !budget.is_finite() || budget <= 0.0 {
            return Err(VenueError::InvalidOrder("budget must be positive"));
        }
        self.taker_order(agent, side, Demand::Budget(budget), f64::NAN)
    }

    fn taker_order(
        &mut self,
        agent: &str,
        side: Side,
        demand: Demand,
        requested: f64,
    ) -> Result<TradeFill, VenueError> {
        self.ensure_tradable()?;
        if agent == MARKET_AGENT {
            return Err(VenueError::ReservedAgent(agent.to_string()));
        }
        let walk = self.ladder.walk(self.index, demand);
        let filled = walk.qty;
        let requested = if requested.is_nan() { filled } else { requested };
        let avg_price = if filled > 0.0 {
            clamp01(self.index + side.dir() * walk.premium / filled)
        } else {
            self.index
        };
        if filled > 0.0 {
            self.impact += side.dir() * walk.move_abs;
            self.recompute_index();
            self.inventories
                .entry(agent.to_string())
                .or_default()
                .apply_fill(side.dir() * filled, avg_price);
            self.market_book().apply_fill(-side.dir() * filled, avg_price);
            self.add_volume(agent, filled);
            self.add_volume(MARKET_AGENT, filled);
            self.log(EventKind::Trade, agent, side.dir() * filled);
        }
        Ok(TradeFill {
            requested,
            filled,
            avg_price,
            move_abs: walk.move_abs,
            premium: walk.premium,
            exhausted: walk.exhausted,
        })
    }

    /// Places spoofed resting depth `offset_bps` away from the current index:
    /// fake bids below (Long) or fake asks above (Short). The index shifts
    /// toward the spoofed side by kappa * qty / (side depth + qty) while the
    /// quote rests.
    pub fn place_spoof(
        &mut self,
        agent: &str,
        side: Side,
        offset_bps: u32,
        qty: f64,
    ) -> Result<u32, VenueError> {
        self.ensure_tradable()?;
        if agent == MARKET_AGENT {
            return Err(VenueError::ReservedAgent(agent.to_string()));
        }
        if !qty.is_finite() || qty <= 0.0 {
            return Err(VenueError::InvalidOrder("spoof quantity must be positive"));
        }
        if offset_bps == 0 {
            return Err(VenueError::InvalidOrder("spoof offset must be at least 1 bps"));
        }
        let offset = offset_bps as f64 * 1e-4;
        let level = clamp01(self.index - side.dir() * offset);
        let depth = self.ladder.side_depth(self.index);
        let shift = side.dir() * self.params.spoof_kappa * qty / (depth + qty);
        let id = self.spoofs.len() as u32;
        self.spoofs.push(Spoof {
            id,
            agent: agent.to_string(),
            side,
            level,
            qty,
            shift,
            active: true,
            filled: false,
        });
        self.spoof_shift += shift;
        self.recompute_index();
        self.log(EventKind::SpoofPlace, agent, side.dir() * qty);
        Ok(id)
    }

    /// Withdraws a resting spoof; its index pressure disappears with it.
    pub fn withdraw_spoof(&mut self, id: u32) -> Result<(), VenueError> {
        if self.settled {
            return Err(VenueError::VenueSettled);
        }
        let spoof = self
            .spoofs
            .get_mut(id as usize)
            .ok_or(VenueError::UnknownSpoof(id))?;
        if !spoof.active {
            return Err(VenueError::SpoofInactive(id));
        }
        spoof.active = false;
        let shift = spoof.shift;
        let agent = spoof.agent.clone();
        let qty = spoof.qty;
        let dir = spoof.side.dir();
        self.spoof_shift -= shift;
        self.recompute_index();
        self.log(EventKind::SpoofWithdraw, agent, dir * qty);
        Ok(())
    }

    pub fn active_spoofs(&self) -> impl Iterator<Item = u32> + '_ {
        self.spoofs.iter().filter(|s| s.active).map(|s| s.id)
    }

    pub fn spoof_status(&self, id: u32) -> Option<SpoofStatus> {
        self.spoofs.get(id as usize).map(|s| {
            if s.active {
                SpoofStatus::Resting
            } else if s.filled {
                SpoofStatus::Filled
            } else {
                SpoofStatus::Withdrawn
            }
        })
    }

    /// Fills any spoof whose level the index has crossed: the spoofer is hit
    /// on the fake quote and inherits real inventory at the quoted level.
    fn check_spoof_fills(&mut self) {
        for i in 0..self.spoofs.len() {
            let s = &self.spoofs[i];
            if !s.active {
                continue;
            }
            let crossed = match s.side {
                Side::Long => self.index <= s.level,
                Side::Short => self.index >= s.level,
            };
            if !crossed {
                continue;
            }
            let (agent, side, level, qty, shift) =
                (s.agent.clone(), s.side, s.level, s.qty, s.shift);
            self.spoofs[i].active = false;
            self.spoofs[i].filled = true;
            self.spoof_shift -= shift;
            self.recompute_index();
            self.inventories
                .entry(agent.clone())
                .or_default()
                .apply_fill(side.dir() * qty, level);
            self.market_book().apply_fill(-side.dir() * qty, level);
            self.add_volume(&agent, qty);
            self.add_volume(MARKET_AGENT, qty);
            self.log(EventKind::SpoofFill, agent, side.dir() * qty);
        }
    }

    fn update_vol(&mut self) {
        let r = self.index - self.prev_phase_index;
        self.prev_phase_index = self.index;
        self.returns.push_back(r);
        while self.returns.len() > self.engine.vol_window {
            self.returns.pop_front();
        }
        if self.returns.len() < 2 {
            self.realized_vol = 0.0;
            return;
        }
        let n = self.returns.len() as f64;
        let mean = self.returns.iter().sum::<f64>() / n;
        let var = self
            .returns
            .iter()
            .map(|r| (r - mean) * (r - mean))
            .sum::<f64>()
            / n;
        self.realized_vol = var.max(0.0).sqrt();
    }

    /// Routes a collateral shortfall: insurance pool first, uncovered counter
    /// for the remainder. The pool never goes negative.
    fn route_shortfall(&mut self, shortfall: f64) {
        if shortfall <= 0.0 {
            return;
        }
        self.bad_debt_total += shortfall;
        let from_pool = shortfall.min(self.pool);
        if from_pool > 0.0 {
            self.pool -= from_pool;
            self.log(EventKind::PoolDraw, MARKET_AGENT, from_pool);
        }
        let rest = shortfall - from_pool;
        if rest > 0.0 {
            self.uncovered += rest;
            self.log(EventKind::UncoveredDebt, MARKET_AGENT, rest);
        }
    }

    /// Closes a position at `fill`, capping the holder's loss at collateral
    /// and routing any shortfall. `counterparty` (the market book unless a
    /// close-out cross routes elsewhere) takes the closing side.
    fn close_position_at(&mut self, idx: usize, fill: f64, kind: EventKind, counterparty: &str) {
        let (agent, side, notional, entry, collateral, id) = {
            let p = &self.positions[idx];
            (p.agent.clone(), p.side, p.notional, p.entry, p.collateral, p.id)
        };
        let uncapped = notional * (fill - entry) * side.dir();
        let capped = uncapped.max(-collateral);
        let shortfall = capped - uncapped;
        *self.position_pnl.entry(agent.clone()).or_insert(0.0) += capped;
        self.inventories
            .entry(counterparty.to_string())
            .or_default()
            .apply_fill(side.dir() * notional, fill);
        self.add_volume(&agent, notional);
        self.add_volume(counterparty, notional);
        self.positions[idx].open = false;
        self.log(kind, format!("p{id}"), capped);
        self.route_shortfall(shortfall);
    }

    /// Force-closes one position through the ladder. Depth beyond the swept
    /// span fills at the worst reached offset, so liquidations always
    /// complete. With a close-out sink designated, the fill crosses to the
    /// sink at the same stress price and moves no depth.
    fn liquidate(&mut self, idx: usize) {
        let (side, notional, agent) = {
            let p = &self.positions[idx];
            (p.side, p.notional, p.agent.clone())
        };
        let close_dir = side.opposite().dir();
        let walk = self.ladder.walk(self.index, Demand::Quantity(notional));
        let premium = walk.premium + (notional - walk.qty).max(0.0) * walk.end_offset;
        let fill = clamp01(self.index + close_dir * premium / notional);
        let sink = self
            .liquidation_sink
            .clone()
            .filter(|s| *s != agent);
        let counterparty = match &sink {
            Some(s) => s.clone(),
            None => {
                self.impact += close_dir * walk.move_abs;
                self.recompute_index();
                MARKET_AGENT.to_string()
            }
        };
        self.close_position_at(idx, fill, EventKind::Liquidation, &counterparty);
        self.liq_total += 1;
        self.forced_close_volume += notional;
        let window = self.final_window();
        if window > 0 && self.tick >= self.spec.resolution_tick - window {
            self.liq_final_window += 1;
        }
        *self.liq_by_agent.entry(agent).or_insert(0) += 1;
    }

    /// Margin check in position-id order; undercollateralized positions are
    /// liquidated immediately, and their impact feeds later checks in the
    /// same pass.
    fn margin_pass(&mut self) {
        for idx in 0..self.positions.len() {
            if !self.positions[idx].open {
                continue;
            }
            let obs = MarginObservables {
                realized_vol: self.realized_vol,
                ticks_to_resolution: self.spec.resolution_tick - self.tick,
                index: self.index,
            };
            let req = maintenance_requirement(&self.engine, &self.positions[idx], &obs);
            let agent = self.positions[idx].agent.clone();
            if let Some(prev) = self.positions[idx].prev_requirement {
                if req > prev {
                    self.positions[idx].margin_increases += 1;
                    *self.margin_inc_by_agent.entry(agent).or_insert(0) += 1;
                }
            }
            self.positions[idx].prev_requirement = Some(req);
            let equity =
                self.positions[idx].collateral + self.positions[idx].unrealized(self.index);
            if equity < req {
                // A close the flat-rate floor alone would not have forced is a
                // pre-emptive one: the dynamic engine moved first.
                if equity >= self.engine.m0 * self.positions[idx].notional {
                    self.liq_preempted += 1;
                }
                self.liquidate(idx);
            }
        }
    }

    /// Venue-wide close at the halt: every open position and every flow
    /// inventory cash-settles at the prevailing index. Not a liquidation —
    /// windowed liquidation counters are untouched.
    fn halt_close_all(&mut self) {
        let price = self.index;
        self.halt_price = Some(price);
        self.log(EventKind::Halt, MARKET_AGENT, price);
        for id in self.active_spoofs().collect::<Vec<_>>() {
            // Venue cancels resting quotes before closing out.
            self.withdraw_spoof(id).expect("active spoof withdraws");
        }
        // Spoof withdrawal changed the index; close at the halt price as
        // announced, not the post-withdrawal one.
        for idx in 0..self.positions.len() {
            if self.positions[idx].open {
                self.close_position_at(idx, price, EventKind::HaltClose, MARKET_AGENT);
            }
        }
        let names: Vec<String> = self.inventories.keys().cloned().collect();
        for name in names {
            let inv = self.inventories.get_mut(&name).expect("known key");
            if inv.qty != 0.0 {
                let realized = inv.mark_close(price);
                self.log(EventKind::HaltClose, name, realized);
            }
        }
        self.halted = true;
    }

    /// Advances one tick: index re-bases, halt check, order flow, spoof
    /// fills, volatility update, margin pass. Orders are rejected up front
    /// once the venue is halted, at the halt tick, and at resolution.
    /// Returns the fills for `orders`, in submission order.
    pub fn step(&mut self, orders: &[Order]) -> Result<Vec<TradeFill>, VenueError> {
        if self.settled {
            return Err(VenueError::VenueSettled);
        }
        if self.tick >= self.spec.resolution_tick {
            return Err(VenueError::StepPastResolution);
        }
        let next = self.tick + 1;
        if !orders.is_empty() {
            if self.halted || self.spec.halt_tick() == Some(next) {
                return Err(VenueError::TradingHalted);
            }
            if next == self.spec.resolution_tick {
                return Err(VenueError::MarketClosed);
            }
        }
        self.tick = next;
        let mut fills = Vec::with_capacity(orders.len());
        if self.halted {
            // Reference index keeps tracking; nothing trades.
            self.index = clamp01(self.path.value_at(next) + self.impact);
        } else {
            self.recompute_index();
            if self.spec.halt_tick() == Some(next) {
                // The halt takes effect at the start of its tick: no orders,
                // no margin pass, venue-wide close at the just-rebased index.
                self.halt_close_all();
            } else if next < self.spec.resolution_tick {
                for o in orders {
                    fills.push(match o.demand {
                        Demand::Quantity(q) => self.market_order(&o.agent, o.side, q)?,
                        Demand::Budget(b) => self.market_order_budget(&o.agent, o.side, b)?,
                        Demand::TargetMove(_) => {
                            self.taker_order(&o.agent, o.side, o.demand, f64::NAN)?
                        }
                    });
                }
                self.check_spoof_fills();
                self.update_vol();
                self.margin_pass();
            }
            // next == resolution: the index re-based to the outcome; exposure
            // settles via settle(), not here.
        }
        if self.tick == self.spec.resolution_tick - 1 {
            self.pre_jump_index = self.index;
        }
        if !self.index.is_finite() {
            return Err(VenueError::InvariantViolation(
                "index left the unit interval".to_string(),
            ));
        }
        Ok(fills)
    }

    /// Cash-settles all remaining exposure at the resolved outcome. A halted
    /// venue has nothing left open; settlement still finalizes the run.
    pub fn settle(&mut self) -> Result<(), VenueError> {
        if self.settled {
            return Err(VenueError::VenueSettled);
        }
        if self.tick != self.spec.resolution_tick {
            return Err(VenueError::ResolutionNotReached(self.tick));
        }
        let outcome = self.spec.outcome.value();
        if !self.halted {
            for idx in 0..self.positions.len() {
                if self.positions[idx].open {
                    self.close_position_at(idx, outcome, EventKind::Settlement, MARKET_AGENT);
                }
            }
            let names: Vec<String> = self.inventories.keys().cloned().collect();
            for name in names {
                let inv = self.inventories.get_mut(&name).expect("known key");
                if inv.qty != 0.0 {
                    let realized = inv.mark_close(outcome);
                    self.log(EventKind::Settlement, name, realized);
                }
            }
        }
        self.settled = true;
        Ok(())
    }

    /// Assembles the run report. Call after `settle`.
    pub fn report(&self, seed: u64) -> RunReport {
        let mut agents: BTreeMap<String, AgentSummary> = BTreeMap::new();
        for (name, inv) in &self.inventories {
            agents.entry(name.clone()).or_default().pnl += inv.realized;
        }
        for (name, pnl) in &self.position_pnl {
            agents.entry(name.clone()).or_default().pnl += pnl;
        }
        for (name, n) in &self.margin_inc_by_agent {
            agents.entry(name.clone()).or_default().margin_increases = *n;
        }
        for (name, n) in &self.liq_by_agent {
            agents.entry(name.clone()).or_default().liquidations = *n;
        }
        for (name, v) in &self.volume {
            agents.entry(name.clone()).or_default().volume = *v;
        }
        let total_pnl: f64 = agents.values().map(|a| a.pnl).sum();
        let outcome = self.spec.outcome.value();
        RunReport {
            seed,
            engine: self.engine.kind,
            resolution_tick: self.spec.resolution_tick,
            halt_ticks: self.spec.halt_ticks,
            final_window_ticks: self.final_window(),
            outcome,
            halt_price: self.halt_price,
            pre_jump_index: self.pre_jump_index,
            realized_terminal_jump: (outcome - self.pre_jump_index).abs(),
            pool_initial: self.pool_initial,
            pool_final: self.pool,
            uncovered_bad_debt: self.uncovered,
            bad_debt_total: self.bad_debt_total,
            liquidations_total: self.liq_total,
            liquidations_final_window: self.liq_final_window,
            liquidations_preempted: self.liq_preempted,
            forced_close_volume: self.forced_close_volume,
            agents,
            conservation_residual: total_pnl + (self.pool - self.pool_initial)
                - self.uncovered,
            events: self.events.clone(),
        }
    }
}

/// Roster entry for a scripted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AgentSpec {
    /// Margined position opened administratively at `open_tick`.
    Position {
        name: String,
        side: Side,
        notional: f64,
        leverage: f64,
        open_tick: u32,
    },
    /// Random liquidity taker: each tick, with probability `prob`, sends a
    /// market order of `order_size`; `bias` in [-1, 1] tilts the buy share.
    Noise {
        name: String,
        order_size: f64,
        prob: f64,
        bias: f64,
    },
    /// Alternating buy/sell flow of `size` per tick over [start_tick,
    /// end_tick): injects realized volatility while staying near flat.
    VolInjector {
        name: String,
        size: f64,
        start_tick: u32,
        end_tick: u32,
    },
}

impl AgentSpec {
    pub fn name(&self) -> &str {
        match self {
            AgentSpec::Position { name, .. }
            | AgentSpec::Noise { name, .. }
            | AgentSpec::VolInjector { name, .. } => name,
        }
    }
}

/// Conservation tolerance for a finished run, scaled by gross volume.
const CONSERVATION_TOL: f64 = 1e-9;

/// Runs a scripted market to settlement and reports it.
///
/// Flow-agent randomness derives from `seed` per roster slot, so a run is a
/// pure function of its arguments. Returns an invariant violation if the
/// final ledger does not balance.
pub fn run_market(
    spec: &MarketSpec,
    engine: &EngineConfig,
    ladder: &DepthLadder,
    path: IndexPath,
    roster: &[AgentSpec],
    pool: PoolInit,
    params: VenueParams,
    seed: u64,
) -> Result<RunReport, VenueError> {
    let mut flow_names: Vec<&str> = Vec::new();
    for a in roster {
        if a.name() == MARKET_AGENT {
            return Err(VenueError::ReservedAgent(a.name().to_string()));
        }
        if !matches!(a, AgentSpec::Position { .. }) {
            if flow_names.contains(&a.name()) {
                return Err(VenueError::DuplicateAgent(a.name().to_string()));
            }
            flow_names.push(a.name());
        }
    }
    let total_notional: f64 = roster
        .iter()
        .filter_map(|a| match a {
            AgentSpec::Position { notional, .. } => Some(*notional),
            _ => None,
        })
        .sum();
    let pool_balance = match pool {
        PoolInit::FractionOfOpenNotional(f) => {
            if !f.is_finite() || f < 0.0 {
                return Err(VenueError::BadPoolBalance(f));
            }
            f * total_notional
        }
        PoolInit::Balance(b) => b,
    };

    let mut state = VenueState::new(
        spec.clone(),
        engine.clone(),
        ladder.clone(),
        path,
        pool_balance,
        params,
    )?;

    let mut rngs: BTreeMap<&str, ChaCha8Rng> = BTreeMap::new();
    for (i, a) in roster.iter().enumerate() {
        if matches!(a, AgentSpec::Noise { .. }) {
            let stream = seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            rngs.insert(a.name(), ChaCha8Rng::seed_from_u64(stream));
        }
    }

    let open_at = |state: &mut VenueState, tick: u32| -> Result<(), VenueError> {
        for a in roster {
            if let AgentSpec::Position {
                name,
                side,
                notional,
                leverage,
                open_tick,
            } = a
            {
                if *open_tick == tick {
                    state.open_position_notional(name, *side, *notional, *leverage)?;
                }
            }
        }
        Ok(())
    };

    open_at(&mut state, 0)?;
    let tau = spec.resolution_tick;
    for t in 1..=tau {
        let closed = state.is_halted() || spec.halt_tick() == Some(t) || t == tau;
        let mut orders = Vec::new();
        if !closed {
            for a in roster {
                match a {
                    AgentSpec::Position { .. } => {}
                    AgentSpec::Noise {
                        name,
                        order_size,
                        prob,
                        bias,
                    } => {
                        let rng = rngs.get_mut(name.as_str()).expect("noise rng");
                        if rng.random::<f64>() < *prob {
                            let buy_share = 0.5 * (1.0 + bias.clamp(-1.0, 1.0));
                            let side = if rng.random::<f64>() < buy_share {
                                Side::Long
                            } else {
                                Side::Short
                            };
                            orders.push(Order::qty(name.clone(), side, *order_size));
                        }
                    }
                    AgentSpec::VolInjector {
                        name,
                        size,
                        start_tick,
                        end_tick,
                    } => {
                        if t >= *start_tick && t < *end_tick {
                            let side = if (t - start_tick) % 2 == 0 {
                                Side::Long
                            } else {
                                Side::Short
                            };
                            orders.push(Order::qty(name.clone(), side, *size));
                        }
                    }
                }
            }
        }
        state.step(&orders)?;
        if !closed {
            // Scheduled positions enter at the prevailing index of their
            // open tick, after that tick's flow has traded.
            open_at(&mut state, t)?;
        }
    }
    state.settle()?;
    let report = state.report(seed);
    check_conservation(&report)?;
    Ok(report)
}

/// Fails the run when the final ledger does not balance within a
/// volume-scaled tolerance.
pub(crate) fn check_conservation(report: &RunReport) -> Result<(), VenueError> {
    let scale = report
        .agents
        .values()
        .map(|a| a.volume.abs())
        .sum::<f64>()
        .max(1.0);
    if report.conservation_residual.abs() > CONSERVATION_TOL * scale {
        return Err(VenueError::InvariantViolation(format!(
            "ledger residual {} exceeds tolerance",
            report.conservation_residual
        )));
    }
    Ok(())
}
