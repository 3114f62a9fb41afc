use morphsim_core::control::mapper::{morphing_logic, FinAction, FinState, DEPLOY_ABOVE_DEG, RETRACT_BELOW_DEG};
use morphsim_core::harness::{run, NavMode, RunEnd, RunOptions, Scenario, SimConfig};
use morphsim_core::helm::MissionLeg;
use morphsim_core::hydromath::steady_yaw_rate;
use morphsim_core::plant::{ActuatorSet, BodyState, Environment, Plant};
use proptest::prelude::*;
use std::time::Instant;

const DT: f64 = 0.05;

/// Steady yaw rate of the time-stepped plant and the analytic rate at the
/// speed the plant settled to.
fn sim_and_analytic(deployed: bool) -> (f64, f64) {
    let cfg = SimConfig::builtin();
    let plant = Plant::new(cfg.plant).unwrap();
    let d = 2f64.to_radians();
    let act = ActuatorSet {
        uppr_rudd: d,
        lowr_rudd: d,
        fin_deploy: if deployed { 1.0 } else { 0.0 },
        fin_angle: if deployed { -d } else { 0.0 },
        thrust_pct: 60.0,
        ..Default::default()
    };
    let env = Environment {
        roll_hold: Some(0.0),
        ..Default::default()
    };
    let mut s = BodyState::cruising(1.5, 2.0, 0.0);
    for _ in 0..(60.0 / DT) as usize {
        s = plant.step(&s, &act, &env, DT).unwrap();
    }
    let p = &cfg.plant;
    let u = s.u;
    let h = p.hydro.at_speed(u);
    let fin = p.fin.at_speed(u, p.hydro.u_ref);
    let want = steady_yaw_rate(
        &h,
        &p.rudder.at_speed(u, p.hydro.u_ref),
        deployed.then_some(&fin),
        d,
        u,
    )
    .unwrap();
    (s.r, want)
}

#[test]
fn time_stepped_yaw_rate_matches_linear_theory() {
    let t0 = Instant::now();
    for deployed in [false, true] {
        let (got, want) = sim_and_analytic(deployed);
        assert!(
            ((got - want) / want).abs() < 0.01,
            "fins {deployed}: {got} vs {want}"
        );
    }
    assert!(t0.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn deployed_fins_raise_the_steady_rate() {
    let (r0, _) = sim_and_analytic(false);
    let (r1, _) = sim_and_analytic(true);
    assert!(r1 > 1.3 * r0, "{r1} vs {r0}");
}

/// Depth excursion from the settled depth during a 90 degree turn at a held
/// 20 degree roll. The hull is trimmed neutral: in a rudder-saturated turn the
/// speed loss removes pitch authority and a buoyant hull rises whatever the
/// mixing, which would mask the roll coupling under test.
fn turn_depth_excursion(compensate: bool) -> f64 {
    let turn_at = 150.0;
    let mut s = Scenario::builtin("zigzag").unwrap();
    s.mission = vec![MissionLeg::new(15.0, 0.0, 1.5, 1.5), MissionLeg::new(turn_at, 90.0, 1.5, 1.5)];
    s.duration = turn_at + 40.0;
    s.config.envelope.mission_end_time = turn_at + 100.0;
    s.nav = NavMode::Truth;
    s.config.env.roll_hold = Some(20f64.to_radians());
    s.config.plant.pitch.buoyancy_rise = 0.0;
    s.config.control.roll_compensation = compensate;
    s.config.control.fins_enabled = false;
    let r = run(&s, RunOptions::default()).unwrap();
    assert_eq!(r.end, RunEnd::Completed);
    let z0 = r.rows.iter().find(|row| row.t >= turn_at).unwrap().z;
    r.rows
        .iter()
        .filter(|row| row.t >= turn_at)
        .map(|row| (row.z - z0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn roll_compensation_cuts_depth_excursion_in_turns() {
    let on = turn_depth_excursion(true);
    let off = turn_depth_excursion(false);
    assert!(on <= 0.3 * off, "excursion with compensation {on} m, without {off} m");
}

#[test]
fn morphing_threshold_table() {
    for start in [FinState::Retracted, FinState::Deployed] {
        let deploy = morphing_logic(45.0, start, 0.1);
        assert_eq!((deploy.state, deploy.action), (FinState::Deployed, FinAction::Deploy));
        let retract = morphing_logic(-4.0, start, 0.1);
        assert_eq!((retract.state, retract.action), (FinState::Retracted, FinAction::Retract));
        let hold = morphing_logic(20.0, start, 0.1);
        assert_eq!((hold.state, hold.action), (start, FinAction::Hold));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fin_counter_deflects_the_rudder(e in -180.0..180.0f64, rud in -0.26..0.26f64) {
        let c = morphing_logic(e, FinState::Deployed, rud);
        prop_assert_eq!(c.fin_angle, -rud);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, failure_persistence: None, ..ProptestConfig::default() })]

    /// State changes only when the error leaves the hysteresis band, so a
    /// trajectory inside the band never toggles and every toggle is justified.
    #[test]
    fn fin_state_never_chatters(
        start in prop_oneof![Just(FinState::Retracted), Just(FinState::Deployed)],
        steps in prop::collection::vec(-25.0..25.0f64, 1..200),
        e0 in -180.0..180.0f64,
    ) {
        let mut state = start;
        let mut e = e0;
        let mut last_toggle_e: Option<f64> = None;
        for de in steps {
            e = (e + de).clamp(-180.0, 180.0);
            let c = morphing_logic(e, state, 0.0);
            if c.state != state {
                match c.state {
                    FinState::Deployed => prop_assert!(e.abs() > DEPLOY_ABOVE_DEG),
                    FinState::Retracted => prop_assert!(e.abs() < RETRACT_BELOW_DEG),
                }
                // consecutive toggles sit on opposite sides of the band
                if let Some(prev) = last_toggle_e {
                    prop_assert!((prev.abs() - e.abs()).abs() > DEPLOY_ABOVE_DEG - RETRACT_BELOW_DEG);
                }
                last_toggle_e = Some(e);
            } else if (RETRACT_BELOW_DEG..=DEPLOY_ABOVE_DEG).contains(&e.abs()) {
                prop_assert_eq!(c.action, FinAction::Hold);
            }
            state = c.state;
        }
    }
}
