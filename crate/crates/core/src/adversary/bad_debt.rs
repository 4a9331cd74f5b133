//! Bad-debt shifting: take a large leveraged position on a private view of
//! the outcome against a thinly collateralized counterparty. Wins pay in
//! full; the counterparty's capped loss pushes the shortfall into the
//! insurance pool and, past that, into uncovered debt — the attacker's
//! upside is intact while much of the downside lands on others.

use super::{counterparty_losses, AdversaryError, AttackOutcome, AttackReport, MANIPULATOR};
use crate::types::{ManipulationChannel, Probability};
use crate::venue::{
    check_conservation, generate_index_path, DepthLadder, EngineConfig, MarketSpec, Outcome,
    PoolInit, Side, VenueParams, VenueState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Where the resolved outcome comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeDraw {
    /// Use the outcome already on the market spec.
    Fixed,
    /// Sample it from the attacker's believed probability (their edge is
    /// real), on a stream decoupled from the path noise.
    FromBelief,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadDebtConfig {
    pub spec: MarketSpec,
    pub engine: EngineConfig,
    pub ladder: DepthLadder,
    pub volatility: f64,
    pub start_index: f64,
    /// Attacker's private probability that the event resolves YES.
    pub believed_yes: f64,
    pub outcome_draw: OutcomeDraw,
    /// Matched notional on both sides of the trade.
    pub notional: f64,
    pub manipulator_leverage: f64,
    /// High leverage here is the point: it caps what the loser can pay.
    pub counterparty_leverage: f64,
    pub pool: PoolInit,
    pub params: VenueParams,
}

const OUTCOME_STREAM: u64 = 0x6261_645f_6465_6274;

/// Runs the bad-debt shift to settlement and decomposes who funded the
/// attacker's payout: counterparty collateral, insurance pool, uncovered.
pub fn run_bad_debt_shift(
    cfg: &BadDebtConfig,
    seed: u64,
) -> Result<AttackOutcome, AdversaryError> {
    let believed = Probability::new(cfg.believed_yes)
        .map_err(|_| AdversaryError::BadParam("believed probability must be in (0, 1)"))?;
    let mut spec = cfg.spec.clone();
    if cfg.outcome_draw == OutcomeDraw::FromBelief {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ OUTCOME_STREAM);
        spec.outcome = if rng.random::<f64>() < believed.value() {
            Outcome::Yes
        } else {
            Outcome::No
        };
    }
    let side = if believed.value() >= 0.5 {
        Side::Long
    } else {
        Side::Short
    };
    let path = generate_index_path(&spec, seed, cfg.volatility, cfg.start_index)?;
    let pool_balance = match cfg.pool {
        PoolInit::FractionOfOpenNotional(f) => f * 2.0 * cfg.notional,
        PoolInit::Balance(b) => b,
    };
    let mut state = VenueState::new(
        spec.clone(),
        cfg.engine.clone(),
        cfg.ladder.clone(),
        path,
        pool_balance,
        cfg.params.clone(),
    )?;
    state.open_position_notional(MANIPULATOR, side, cfg.notional, cfg.manipulator_leverage)?;
    state.open_position_notional(
        "counterparty",
        side.opposite(),
        cfg.notional,
        cfg.counterparty_leverage,
    )?;
    for _ in 1..=spec.resolution_tick {
        state.step(&[])?;
    }
    state.settle()?;
    let report = state.report(seed);
    check_conservation(&report)?;

    let manipulator_pnl = report.agent(MANIPULATOR).map_or(0.0, |a| a.pnl);
    let pool_drawdown = report.pool_initial - report.pool_final;
    let attack = AttackReport {
        channel: ManipulationChannel::BadDebtShifting,
        seed,
        channel_absent: false,
        profitable: manipulator_pnl > 0.0,
        manipulator_pnl,
        // The position itself is the attack; nothing extra is spent on it.
        manipulation_cost: 0.0,
        net_pnl: manipulator_pnl,
        differential_pnl: None,
        counterparty_losses: counterparty_losses(&report, &[MANIPULATOR]),
        pool_drawdown,
        uncovered_bad_debt: report.uncovered_bad_debt,
        preempted_positions: report.liquidations_preempted,
        forced_close_volume: report.forced_close_volume,
        pool_funded_share: if manipulator_pnl > 0.0 {
            Some(pool_drawdown / manipulator_pnl)
        } else {
            None
        },
    };
    Ok(AttackOutcome {
        attack,
        runs: vec![report],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::venue::EventClass;

    fn fixture(counterparty_leverage: f64, pool: PoolInit) -> BadDebtConfig {
        BadDebtConfig {
            spec: MarketSpec::new(40, 0, Outcome::Yes, 0.5, EventClass::Sports).unwrap(),
            engine: EngineConfig::static_e0(0.02),
            ladder: DepthLadder::default_book(),
            volatility: 0.0,
            start_index: 0.5,
            believed_yes: 0.9,
            outcome_draw: OutcomeDraw::Fixed,
            notional: 10_000.0,
            manipulator_leverage: 2.0,
            counterparty_leverage,
            pool,
            params: VenueParams::default(),
        }
    }

    #[test]
    fn winner_paid_in_full_while_loser_pays_capped_collateral() {
        // Flat path at 0.5, jump to YES: the winner's gross is 0.5 * N. The
        // loser at 5x posted only 0.2 * N; the pool covers 0.3 * N exactly.
        let n = 10_000.0;
        let out =
            run_bad_debt_shift(&fixture(5.0, PoolInit::Balance(0.3 * n)), 17).unwrap();
        let a = &out.attack;
        assert!(a.profitable);
        assert!((a.manipulator_pnl - 0.5 * n).abs() < 1e-9);
        assert!((a.counterparty_losses - 0.2 * n).abs() < 1e-9);
        assert!((a.pool_drawdown - 0.3 * n).abs() < 1e-9);
        assert!((a.uncovered_bad_debt).abs() < 1e-12);
        assert!((a.pool_funded_share.unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn payout_decomposition_sums_to_gross() {
        let n = 10_000.0;
        for (lev, pool) in [
            (5.0, PoolInit::Balance(0.3 * n)),
            (10.0, PoolInit::Balance(0.1 * n)),
            (2.0, PoolInit::Balance(0.0)),
        ] {
            let out = run_bad_debt_shift(&fixture(lev, pool), 23).unwrap();
            let a = &out.attack;
            let funded = a.counterparty_losses + a.pool_drawdown + a.uncovered_bad_debt;
            assert!(
                (a.manipulator_pnl - funded).abs() < 1e-9,
                "gross {} != funded {}",
                a.manipulator_pnl,
                funded
            );
        }
    }

    #[test]
    fn underfunded_pool_leaves_uncovered_debt() {
        let n = 10_000.0;
        let out =
            run_bad_debt_shift(&fixture(10.0, PoolInit::Balance(0.05 * n)), 29).unwrap();
        let a = &out.attack;
        // Loser posted 0.1N, pool 0.05N; gross 0.5N leaves 0.35N uncovered.
        assert!((a.uncovered_bad_debt - 0.35 * n).abs() < 1e-9);
        assert_eq!(out.runs[0].uncovered_bad_debt, a.uncovered_bad_debt);
    }

    #[test]
    fn losing_draw_reports_unprofitable_without_share() {
        let mut cfg = fixture(5.0, PoolInit::Balance(3_000.0));
        cfg.spec.outcome = Outcome::No;
        let out = run_bad_debt_shift(&cfg, 31).unwrap();
        let a = &out.attack;
        assert!(!a.profitable);
        assert!(a.manipulator_pnl < 0.0);
        assert_eq!(a.pool_funded_share, None);
        // The attacker's own loss is capped by their collateral too.
        assert!(a.manipulator_pnl >= -cfg.notional / cfg.manipulator_leverage - 1e-9);
    }

    #[test]
    fn sampled_outcome_is_deterministic_in_the_seed() {
        let mut cfg = fixture(5.0, PoolInit::Balance(3_000.0));
        cfg.outcome_draw = OutcomeDraw::FromBelief;
        let a = run_bad_debt_shift(&cfg, 101).unwrap();
        let b = run_bad_debt_shift(&cfg, 101).unwrap();
        assert_eq!(a.attack, b.attack);
        let mut wins = 0u32;
        for seed in 0..200u64 {
            let out = run_bad_debt_shift(&cfg, seed).unwrap();
            if out.attack.manipulator_pnl > 0.0 {
                wins += 1;
            }
        }
        // Belief 0.9 should land near 180 of 200 wins.
        assert!((150..=200).contains(&wins), "wins = {wins}");
    }
}
