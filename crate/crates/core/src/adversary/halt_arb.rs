//! Halt-window arbitrage: open a leveraged position, push the index in its
//! favor during the last tradable ticks, and let the venue's pre-resolution
//! halt cash out everyone at the distorted price before trading can fade it.

use super::{counterparty_losses, AdversaryError, AttackOutcome, AttackReport, MANIPULATOR};
use crate::types::ManipulationChannel;
use crate::venue::{
    check_conservation, generate_index_path, DepthLadder, EngineConfig, IndexPath, MarketSpec,
    Order, PoolInit, RunReport, Side, VenueParams, VenueState,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaltArbConfig {
    pub spec: MarketSpec,
    pub engine: EngineConfig,
    pub ladder: DepthLadder,
    pub volatility: f64,
    pub start_index: f64,
    pub position_side: Side,
    pub position_notional: f64,
    pub position_leverage: f64,
    /// Total premium spend across the push window; zero runs the pure
    /// counterfactual twice.
    pub push_budget: f64,
    /// Number of tradable ticks immediately before the halt that carry the
    /// push flow.
    pub push_window: u32,
    pub pool: PoolInit,
    pub params: VenueParams,
}

/// Runs the halt-window attack and its no-push counterfactual on the same
/// seed, reporting the paired difference.
///
/// With no halt window configured the channel does not exist: the final
/// price is the resolved outcome itself, so a pre-close push has nothing to
/// lock in. The report comes back flagged `channel_absent`.
pub fn run_halt_arbitrage(
    cfg: &HaltArbConfig,
    seed: u64,
) -> Result<AttackOutcome, AdversaryError> {
    let Some(halt_tick) = cfg.spec.halt_tick() else {
        return Ok(AttackOutcome {
            attack: AttackReport::absent(ManipulationChannel::HaltArbitrage, seed),
            runs: Vec::new(),
        });
    };
    if cfg.push_window == 0 || cfg.push_window >= halt_tick {
        return Err(AdversaryError::BadParam(
            "push window must cover at least one tradable tick before the halt",
        ));
    }
    if !cfg.push_budget.is_finite() || cfg.push_budget < 0.0 {
        return Err(AdversaryError::BadParam("push budget must be non-negative"));
    }
    let path = generate_index_path(&cfg.spec, seed, cfg.volatility, cfg.start_index)?;

    let (attack_run, cost) = run_leg(cfg, path.clone(), halt_tick, true, seed)?;
    let (counter_run, _) = run_leg(cfg, path, halt_tick, false, seed)?;

    let pnl = |r: &RunReport| r.agent(MANIPULATOR).map_or(0.0, |a| a.pnl);
    let differential = pnl(&attack_run) - pnl(&counter_run);
    let attack = AttackReport {
        channel: ManipulationChannel::HaltArbitrage,
        seed,
        channel_absent: false,
        profitable: differential > 0.0,
        // Gross improvement over the counterfactual before paying the push.
        manipulator_pnl: differential + cost,
        manipulation_cost: cost,
        net_pnl: differential,
        differential_pnl: Some(differential),
        counterparty_losses: counterparty_losses(&attack_run, &[MANIPULATOR]),
        pool_drawdown: attack_run.pool_initial - attack_run.pool_final,
        uncovered_bad_debt: attack_run.uncovered_bad_debt,
        preempted_positions: attack_run.liquidations_preempted,
        forced_close_volume: attack_run.forced_close_volume,
        pool_funded_share: None,
    };
    Ok(AttackOutcome {
        attack,
        runs: vec![attack_run, counter_run],
    })
}

fn run_leg(
    cfg: &HaltArbConfig,
    path: IndexPath,
    halt_tick: u32,
    with_push: bool,
    seed: u64,
) -> Result<(RunReport, f64), AdversaryError> {
    let pool_balance = match cfg.pool {
        PoolInit::FractionOfOpenNotional(f) => f * cfg.position_notional,
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
    state.open_position_notional(
        MANIPULATOR,
        cfg.position_side,
        cfg.position_notional,
        cfg.position_leverage,
    )?;
    let per_tick = cfg.push_budget / cfg.push_window as f64;
    let push_from = halt_tick - cfg.push_window;
    let mut cost = 0.0;
    for t in 1..=cfg.spec.resolution_tick {
        let mut orders = Vec::new();
        if with_push && per_tick > 0.0 && t >= push_from && t < halt_tick {
            orders.push(Order::budget(MANIPULATOR, cfg.position_side, per_tick));
        }
        for fill in state.step(&orders)? {
            cost += fill.premium;
        }
    }
    state.settle()?;
    let report = state.report(seed);
    check_conservation(&report)?;
    Ok((report, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::venue::{EventClass, Outcome};

    fn fixture(halt_ticks: u32, budget: f64) -> HaltArbConfig {
        HaltArbConfig {
            spec: MarketSpec::new(80, halt_ticks, Outcome::No, 0.5, EventClass::Politics)
                .unwrap(),
            engine: EngineConfig::static_e0(0.05),
            ladder: DepthLadder::default_book(),
            volatility: 0.005,
            start_index: 0.5,
            position_side: Side::Long,
            position_notional: 2_000.0,
            position_leverage: 4.0,
            push_budget: budget,
            push_window: 3,
            pool: PoolInit::FractionOfOpenNotional(0.1),
            params: VenueParams::default(),
        }
    }

    #[test]
    fn zero_budget_differential_is_exactly_zero() {
        let out = run_halt_arbitrage(&fixture(6, 0.0), 31).unwrap();
        assert_eq!(out.attack.differential_pnl, Some(0.0));
        assert_eq!(out.attack.net_pnl, 0.0);
        assert!(!out.attack.profitable);
        // Both legs are bit-identical runs.
        assert_eq!(out.runs[0].to_json(), out.runs[1].to_json());
    }

    #[test]
    fn push_toward_position_locks_in_gain_at_the_halt() {
        let out = run_halt_arbitrage(&fixture(6, 25.0), 31).unwrap();
        let attack = &out.runs[0];
        let counter = &out.runs[1];
        let (ha, hc) = (attack.halt_price.unwrap(), counter.halt_price.unwrap());
        assert!(ha > hc, "push must lift the halt price for a long");
        // The position cashes out at the better price; the differential is
        // the notional-weighted price lift minus what the push flow lost.
        assert!(out.attack.differential_pnl.unwrap() != 0.0);
        let recomposed = out.attack.manipulator_pnl - out.attack.manipulation_cost;
        assert!((out.attack.net_pnl - recomposed).abs() < 1e-12);
    }

    #[test]
    fn no_halt_window_means_no_channel() {
        let out = run_halt_arbitrage(&fixture(0, 25.0), 31).unwrap();
        assert!(out.attack.channel_absent);
        assert!(out.runs.is_empty());
    }

    #[test]
    fn differential_matches_two_run_subtraction() {
        let out = run_halt_arbitrage(&fixture(6, 25.0), 9).unwrap();
        let pnl = |r: &RunReport| r.agent(MANIPULATOR).map_or(0.0, |a| a.pnl);
        let oracle = pnl(&out.runs[0]) - pnl(&out.runs[1]);
        assert!((out.attack.differential_pnl.unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn push_sign_matches_position_side() {
        for seed in [1_u64, 2, 3, 4, 5] {
            let mut cfg = fixture(6, 25.0);
            cfg.volatility = 0.0; // isolate the push
            let out = run_halt_arbitrage(&cfg, seed).unwrap();
            assert!(
                out.attack.differential_pnl.unwrap() > 0.0,
                "flat path: a favorable push always helps the position"
            );
        }
    }
}
