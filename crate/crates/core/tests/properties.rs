//! Property suites over randomly generated inputs: threshold algebra, ladder
//! walk consistency, path generation, margin-engine ordering, venue ledger
//! conservation, and the rent laws.

use evperp_core::costbenefit::{expected_profit_at, threshold};
use evperp_core::rents::{detection_cost_per_profit, leveraged_rent, sharpe_ratio, RentProfile};
use evperp_core::types::{validate_scenario, Leverage, Money, RawScenario};
use evperp_core::venue::{
    generate_index_path, maintenance_requirement, run_market, AgentSpec, Demand, DepthBucket,
    DepthLadder, EngineConfig, EventClass, MarginObservables, MarketSpec, Outcome, PoolInit,
    Position, Side, VenueParams,
};
use proptest::prelude::*;

fn scenario_strategy() -> impl Strategy<Value = RawScenario> {
    (
        1e2..1e9f64,   // k_manip
        1e3..1e8f64,   // capital
        0.0..0.95f64,  // pi_yes
        0.0..1.0f64,   // p_detected
        0.0..200.0f64, // penalty_factor
    )
        .prop_map(|(k, c, pi, p, pen)| RawScenario {
            label: "prop".to_string(),
            k_manip: k,
            capital: c,
            pi_yes: pi,
            p_detected: p,
            penalty_factor: pen,
            leverage: None,
        })
}

proptest! {
    /// The reported threshold is exactly the sum of its two terms, and
    /// expected profit crosses zero there.
    #[test]
    fn threshold_decomposes_and_zero_crosses(raw in scenario_strategy()) {
        let s = validate_scenario(&raw).unwrap();
        let t = threshold(&s);
        prop_assert_eq!(t.l_star_raw, t.cost_term + t.detection_term);
        let profit = expected_profit_at(&s, t.l_star_raw);
        let scale = raw.k_manip + raw.capital * (1.0 + raw.p_detected * raw.penalty_factor);
        prop_assert!(profit.abs() <= 1e-9 * scale.max(1.0),
            "profit at the threshold should vanish, got {profit}");
        // Strictly positive a step above, strictly negative a step below.
        prop_assert!(expected_profit_at(&s, t.l_star_raw + 1.0) > 0.0);
        if t.l_star_raw > 1.0 {
            prop_assert!(expected_profit_at(&s, t.l_star_raw - 1.0) < 0.0);
        }
    }

    /// l_star moves the right way along every parameter.
    #[test]
    fn threshold_monotone_in_each_parameter(raw in scenario_strategy()) {
        let base = threshold(&validate_scenario(&raw).unwrap()).l_star_raw;

        let mut up = raw.clone();
        up.k_manip *= 2.0;
        prop_assert!(threshold(&validate_scenario(&up).unwrap()).l_star_raw > base);

        let mut up = raw.clone();
        up.p_detected = (raw.p_detected + 0.01).min(1.0);
        prop_assert!(threshold(&validate_scenario(&up).unwrap()).l_star_raw > base);

        let mut up = raw.clone();
        up.penalty_factor += 1.0;
        prop_assert!(threshold(&validate_scenario(&up).unwrap()).l_star_raw > base);

        let mut up = raw.clone();
        up.pi_yes = raw.pi_yes * 0.5 + 0.475; // strictly toward 1, still valid
        if up.pi_yes > raw.pi_yes {
            prop_assert!(threshold(&validate_scenario(&up).unwrap()).l_star_raw > base);
        }

        let mut up = raw.clone();
        up.capital *= 2.0;
        // K > 0 in the strategy, so more capital strictly lowers the bar.
        prop_assert!(threshold(&validate_scenario(&up).unwrap()).l_star_raw < base);
    }

    /// The detection term never depends on capital: with K = 0 the whole
    /// threshold is bit-identical across capital levels.
    #[test]
    fn detection_term_is_capital_free(
        raw in scenario_strategy(),
        c2 in 1e3..1e8f64,
    ) {
        let mut a = raw.clone();
        a.k_manip = 0.0;
        let mut b = a.clone();
        b.capital = c2;
        let ta = threshold(&validate_scenario(&a).unwrap());
        let tb = threshold(&validate_scenario(&b).unwrap());
        prop_assert_eq!(ta.l_star.to_bits(), tb.l_star.to_bits());
        prop_assert_eq!(ta.detection_term.to_bits(), tb.detection_term.to_bits());
    }
}

fn ladder_strategy() -> impl Strategy<Value = DepthLadder> {
    (
        proptest::collection::vec((10u32..400, 10.0..5000.0f64), 1..5),
        1.0..3.0f64,
        0.0..0.3f64,
    )
        .prop_map(|(raw, ratio, band)| {
            let buckets = raw
                .into_iter()
                .map(|(width_bps, depth)| DepthBucket { width_bps, depth })
                .collect();
            DepthLadder::new(buckets, ratio, band).unwrap()
        })
}

proptest! {
    /// Quantity, TargetMove, and Budget demands describe the same walk: each
    /// answer, fed back as a different demand kind, reproduces the others.
    #[test]
    fn ladder_demand_kinds_agree(
        ladder in ladder_strategy(),
        mid in 0.05..0.95f64,
        qty in 1.0..3000.0f64,
    ) {
        let by_qty = ladder.walk(mid, Demand::Quantity(qty));
        prop_assume!(!by_qty.exhausted && by_qty.move_abs > 0.0);

        let by_move = ladder.walk(mid, Demand::TargetMove(by_qty.move_abs));
        prop_assert!((by_move.qty - qty).abs() <= 1e-6 * qty,
            "target-move round trip lost quantity: {} vs {qty}", by_move.qty);

        let by_budget = ladder.walk(mid, Demand::Budget(by_qty.premium));
        prop_assert!((by_budget.qty - qty).abs() <= 1e-6 * qty,
            "budget round trip lost quantity: {} vs {qty}", by_budget.qty);
    }

    /// More demand never gets cheaper or moves the price less.
    #[test]
    fn ladder_walk_is_monotone_in_quantity(
        ladder in ladder_strategy(),
        mid in 0.05..0.95f64,
        qty in 1.0..3000.0f64,
        extra in 1.0..500.0f64,
    ) {
        let small = ladder.walk(mid, Demand::Quantity(qty));
        let large = ladder.walk(mid, Demand::Quantity(qty + extra));
        prop_assert!(large.premium >= small.premium);
        prop_assert!(large.move_abs >= small.move_abs);
        prop_assert!(small.premium >= 0.0);
    }

    /// Seeded paths stay in [0, 1], land exactly on the outcome, and are a
    /// pure function of their arguments.
    #[test]
    fn paths_are_bounded_terminal_and_deterministic(
        seed in any::<u64>(),
        vol in 0.0..0.1f64,
        start in 0.05..0.95f64,
        yes in any::<bool>(),
    ) {
        let outcome = if yes { Outcome::Yes } else { Outcome::No };
        let spec = MarketSpec::new(40, 5, outcome, 0.5, EventClass::Other).unwrap();
        let path = generate_index_path(&spec, seed, vol, start).unwrap();
        prop_assert_eq!(path.len(), 41);
        prop_assert!(path.values().iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(path.value_at(40), outcome.value());
        prop_assert_eq!(path.value_at(0), start);
        let again = generate_index_path(&spec, seed, vol, start).unwrap();
        prop_assert_eq!(path.values(), again.values());
    }

    /// With the same base rate, the dynamic engine never requires less
    /// margin than the flat one, whatever the observables.
    #[test]
    fn dynamic_requirement_dominates_static(
        m0 in 0.01..0.5f64,
        vol in 0.0..0.2f64,
        ttr in 0u32..60,
        index in 0.0..1.0f64,
        entry in 0.05..0.95f64,
        collateral in 10.0..1e4f64,
        leverage in 1.0..25.0f64,
        long in any::<bool>(),
    ) {
        let side = if long { Side::Long } else { Side::Short };
        let pos = Position::new(0, "t".into(), side, entry, collateral, leverage).unwrap();
        let obs = MarginObservables {
            realized_vol: vol,
            ticks_to_resolution: ttr,
            index,
        };
        let mut e2 = EngineConfig::dynamic_e2(m0);
        e2.ttr_ref = 30;
        let req_static = maintenance_requirement(&EngineConfig::static_e0(m0), &pos, &obs);
        let req_dynamic = maintenance_requirement(&e2, &pos, &obs);
        prop_assert!(req_dynamic >= req_static);
        prop_assert_eq!(req_static, m0 * pos.notional);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Settled runs balance: agent PnL, the pool move, and uncovered debt
    /// cancel, across random small rosters, engines, and halt windows.
    #[test]
    fn random_rosters_conserve_value(
        seed in any::<u64>(),
        dynamic in any::<bool>(),
        halt in 0u32..8,
        vol in 0.0..0.03f64,
        n_pos in 1usize..5,
        noise_size in 5.0..80.0f64,
    ) {
        let spec = MarketSpec::new(30, halt, Outcome::Yes, 0.5, EventClass::Other).unwrap();
        let engine = if dynamic {
            EngineConfig::dynamic_e2(0.05)
        } else {
            EngineConfig::static_e0(0.05)
        };
        let mut roster = vec![AgentSpec::Noise {
            name: "flow".to_string(),
            order_size: noise_size,
            prob: 0.6,
            bias: 0.1,
        }];
        for i in 0..n_pos {
            roster.push(AgentSpec::Position {
                name: format!("trader-{i}"),
                side: if i % 2 == 0 { Side::Long } else { Side::Short },
                notional: 400.0 + 100.0 * i as f64,
                leverage: 2.0 + i as f64,
                open_tick: 0,
            });
        }
        let path = generate_index_path(&spec, seed, vol, 0.5).unwrap();
        let report = run_market(
            &spec,
            &engine,
            &DepthLadder::default_book(),
            path,
            &roster,
            PoolInit::FractionOfOpenNotional(0.05),
            VenueParams::default(),
            seed,
        )
        .unwrap();
        let residual = report.total_agent_pnl() + (report.pool_final - report.pool_initial)
            - report.uncovered_bad_debt;
        prop_assert!(residual.abs() < 1e-9, "ledger residual {residual}");
        prop_assert!(report.uncovered_bad_debt >= 0.0);
        prop_assert!(report.pool_final >= 0.0);
        if halt > 0 {
            prop_assert_eq!(report.liquidations_final_window, 0);
        }
    }
}

fn profile_strategy() -> impl Strategy<Value = RentProfile> {
    (
        0.001..0.5f64, // rent_per_event
        0.01..1.0f64,  // return_volatility
        0.0..1e6f64,   // detection_cost
        1e3..1e7f64,   // capital
        1.0..50.0f64,  // leverage
    )
        .prop_map(|(r, sigma, d, c, l)| RentProfile {
            rent_per_event: r,
            return_volatility: sigma,
            detection_cost: Money::new(d).unwrap(),
            capital: Money::new(c).unwrap(),
            leverage: Leverage::new(l).unwrap(),
        })
}

proptest! {
    /// Rent scales linearly with leverage; the zero-funding risk-adjusted
    /// return does not move at all; a fixed detection budget amortizes as 1/L.
    #[test]
    fn rent_laws_hold(p in profile_strategy(), l2 in 1.0..50.0f64) {
        let mut q = p.clone();
        q.leverage = Leverage::new(l2).unwrap();

        let rent_p = leveraged_rent(&p).unwrap();
        let rent_q = leveraged_rent(&q).unwrap();
        let per_lev_p = rent_p / p.leverage.value();
        let per_lev_q = rent_q / q.leverage.value();
        prop_assert!((per_lev_p - per_lev_q).abs() <= 1e-12 * per_lev_p.abs());

        let s_p = sharpe_ratio(&p, 0.0).unwrap();
        let s_q = sharpe_ratio(&q, 0.0).unwrap();
        prop_assert!((s_p - s_q).abs() <= 1e-12 * s_p.abs().max(1e-300));

        if p.detection_cost.value() > 0.0 {
            let amort_p = detection_cost_per_profit(&p).unwrap() * p.leverage.value();
            let amort_q = detection_cost_per_profit(&q).unwrap() * q.leverage.value();
            prop_assert!((amort_p - amort_q).abs() <= 1e-9 * amort_p.abs());
        }
    }
}
