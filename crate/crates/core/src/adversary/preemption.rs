//! Margin pre-emption: inject realized volatility so a responsive margin
//! engine raises requirements and force-closes positions the flat-rate floor
//! would have left alone, while the attacker stands first in the close-out
//! queue and absorbs the forced flow at stress prices.

use super::{counterparty_losses, AdversaryError, AttackOutcome, AttackReport, MANIPULATOR};
use crate::types::ManipulationChannel;
use crate::venue::{
    check_conservation, generate_index_path, DepthLadder, EngineConfig, EngineKind, MarketSpec,
    Order, PoolInit, Side, VenueParams, VenueState,
};
use serde::{Deserialize, Serialize};

/// Injection flow trades under a separate ledger name so its round-trip cost
/// stays separable from the close-out edge.
pub const INJECTION_AGENT: &str = "manipulator-flow";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreemptionConfig {
    pub spec: MarketSpec,
    pub engine: EngineConfig,
    pub ladder: DepthLadder,
    pub volatility: f64,
    pub start_index: f64,
    /// Marginal positions seeded on the venue, alternating long/short.
    pub victims: u32,
    pub victim_notional: f64,
    pub victim_leverage: f64,
    /// Alternating buy/sell order size during the injection window.
    pub injection_size: f64,
    pub injection_start: u32,
    pub injection_end: u32,
    pub pool: PoolInit,
    pub params: VenueParams,
}

/// Runs the pre-emption attack to settlement.
///
/// Under a flat-rate engine the channel does not exist (requirements never
/// move), so the report comes back flagged `channel_absent` with nothing run.
pub fn run_preemption_attack(
    cfg: &PreemptionConfig,
    seed: u64,
) -> Result<AttackOutcome, AdversaryError> {
    if cfg.engine.kind == EngineKind::StaticE0 {
        return Ok(AttackOutcome {
            attack: AttackReport::absent(ManipulationChannel::PreEmption, seed),
            runs: Vec::new(),
        });
    }
    if cfg.injection_start == 0 || cfg.injection_start > cfg.injection_end {
        return Err(AdversaryError::BadParam(
            "injection window must sit inside the run",
        ));
    }
    if cfg.injection_end > cfg.spec.resolution_tick {
        return Err(AdversaryError::BadParam(
            "injection window must end by resolution",
        ));
    }
    if !cfg.injection_size.is_finite() || cfg.injection_size <= 0.0 {
        return Err(AdversaryError::BadParam("injection size must be positive"));
    }

    let path = generate_index_path(&cfg.spec, seed, cfg.volatility, cfg.start_index)?;
    let pool_balance = match cfg.pool {
        PoolInit::FractionOfOpenNotional(f) => {
            f * cfg.victims as f64 * cfg.victim_notional
        }
        PoolInit::Balance(b) => b,
    };
    let mut state = VenueState::new(
        cfg.spec.clone(),
        cfg.engine.clone(),
        cfg.ladder.clone(),
        path,
        pool_balance,
        cfg.params.clone(),
    )?;
    for i in 0..cfg.victims {
        let side = if i % 2 == 0 { Side::Long } else { Side::Short };
        state.open_position_notional(
            &format!("victim-{i}"),
            side,
            cfg.victim_notional,
            cfg.victim_leverage,
        )?;
    }
    state.set_liquidation_sink(Some(MANIPULATOR))?;

    let tau = cfg.spec.resolution_tick;
    for t in 1..=tau {
        let closed =
            state.is_halted() || cfg.spec.halt_tick() == Some(t) || t == tau;
        let mut orders = Vec::new();
        if !closed && t >= cfg.injection_start && t < cfg.injection_end {
            let side = if (t - cfg.injection_start) % 2 == 0 {
                Side::Long
            } else {
                Side::Short
            };
            orders.push(Order::qty(INJECTION_AGENT, side, cfg.injection_size));
        }
        state.step(&orders)?;
    }
    state.settle()?;
    let report = state.report(seed);
    check_conservation(&report)?;

    let sink_pnl = report.agent(MANIPULATOR).map_or(0.0, |a| a.pnl);
    let flow_pnl = report.agent(INJECTION_AGENT).map_or(0.0, |a| a.pnl);
    // Gross = what the close-out crosses earned; cost = the injection
    // round-trip. Their sum is the attacker's exact ledger take, and the
    // walked premiums give an independent check on the cost leg.
    let manipulator_pnl = sink_pnl;
    let manipulation_cost = -flow_pnl;
    let attack = AttackReport {
        channel: ManipulationChannel::PreEmption,
        seed,
        channel_absent: false,
        profitable: manipulator_pnl - manipulation_cost > 0.0,
        manipulator_pnl,
        manipulation_cost,
        net_pnl: manipulator_pnl - manipulation_cost,
        differential_pnl: None,
        counterparty_losses: counterparty_losses(&report, &[MANIPULATOR, INJECTION_AGENT]),
        pool_drawdown: report.pool_initial - report.pool_final,
        uncovered_bad_debt: report.uncovered_bad_debt,
        preempted_positions: report.liquidations_preempted,
        forced_close_volume: report.forced_close_volume,
        pool_funded_share: None,
    };
    Ok(AttackOutcome {
        attack,
        runs: vec![report],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::venue::{EventClass, Outcome};

    fn fixture(engine: EngineConfig) -> PreemptionConfig {
        // Deep book so injections wiggle the index without wiping anyone on
        // price alone; vol_ref sits above path noise so only the injection
        // window stresses the engine.
        let ladder = DepthLadder::new(
            vec![
                crate::venue::DepthBucket { width_bps: 50, depth: 5_000.0 },
                crate::venue::DepthBucket { width_bps: 150, depth: 10_000.0 },
                crate::venue::DepthBucket { width_bps: 300, depth: 50_000.0 },
            ],
            1.7,
            0.1,
        )
        .unwrap();
        PreemptionConfig {
            spec: MarketSpec::new(60, 0, Outcome::Yes, 0.5, EventClass::Crypto).unwrap(),
            engine,
            ladder,
            volatility: 5e-5,
            start_index: 0.5,
            victims: 4,
            victim_notional: 500.0,
            victim_leverage: 16.0,
            injection_size: 1_000.0,
            injection_start: 10,
            injection_end: 30,
            pool: PoolInit::FractionOfOpenNotional(0.1),
            params: VenueParams::default(),
        }
    }

    fn stressed_engine() -> EngineConfig {
        let mut e = EngineConfig::dynamic_e2(0.05);
        e.alpha = 1.0;
        e.beta = 0.0;
        e.gamma = 0.0;
        e.vol_ref = 6e-4;
        e
    }

    #[test]
    fn dynamic_engine_preempts_the_flat_floor() {
        let out = run_preemption_attack(&fixture(stressed_engine()), 42).unwrap();
        assert!(!out.attack.channel_absent);
        assert!(out.attack.preempted_positions > 0, "injection must pre-empt");
        let run = &out.runs[0];
        assert_eq!(run.liquidations_preempted, out.attack.preempted_positions);
        assert!(run.forced_close_volume >= 500.0);
    }

    #[test]
    fn flat_engine_reports_channel_absent() {
        let out = run_preemption_attack(&fixture(EngineConfig::static_e0(0.05)), 42).unwrap();
        assert!(out.attack.channel_absent);
        assert!(!out.attack.profitable);
        assert_eq!(out.attack.preempted_positions, 0);
        assert!(out.runs.is_empty());
    }

    #[test]
    fn flat_floor_run_liquidates_no_one_here() {
        // Same roster and flow, engine swapped for the flat floor via
        // run_market: the injections are too small to breach anyone's buffer.
        let cfg = fixture(stressed_engine());
        let path =
            generate_index_path(&cfg.spec, 42, cfg.volatility, cfg.start_index).unwrap();
        let mut roster = Vec::new();
        for i in 0..cfg.victims {
            let side = if i % 2 == 0 { Side::Long } else { Side::Short };
            roster.push(crate::venue::AgentSpec::Position {
                name: format!("victim-{i}"),
                side,
                notional: cfg.victim_notional,
                leverage: cfg.victim_leverage,
                open_tick: 0,
            });
        }
        roster.push(crate::venue::AgentSpec::VolInjector {
            name: "churn".into(),
            size: cfg.injection_size,
            start_tick: cfg.injection_start,
            end_tick: cfg.injection_end,
        });
        let report = crate::venue::run_market(
            &cfg.spec,
            &EngineConfig::static_e0(0.05),
            &cfg.ladder,
            path,
            &roster,
            cfg.pool,
            cfg.params.clone(),
            42,
        )
        .unwrap();
        assert_eq!(report.liquidations_total, 0);
        assert_eq!(report.liquidations_preempted, 0);
    }

    #[test]
    fn ledger_decomposition_matches_reported_cost() {
        let out = run_preemption_attack(&fixture(stressed_engine()), 7).unwrap();
        let run = &out.runs[0];
        let sink = run.agent(MANIPULATOR).map_or(0.0, |a| a.pnl);
        let flow = run.agent(INJECTION_AGENT).map_or(0.0, |a| a.pnl);
        assert!((out.attack.net_pnl - (sink + flow)).abs() < 1e-9);
        assert!((out.attack.manipulation_cost + flow).abs() < 1e-9);
        assert!(run.conservation_residual.abs() < 1e-6);
    }

    #[test]
    fn preempted_means_flat_floor_would_have_survived() {
        let out = run_preemption_attack(&fixture(stressed_engine()), 42).unwrap();
        // Every forced close in this fixture is a pre-emption: equity never
        // falls below the 5% flat floor on a deep book.
        assert_eq!(
            out.attack.preempted_positions,
            out.runs[0].liquidations_total
        );
    }
}
