use morphsim_core::harness::{run, NavMode, RunEnd, RunOptions, Scenario, TICK};
use morphsim_core::helm::{fsm_step, parse_mission, render, MissionLeg, SafeReason, SafetyEnvelope, VehicleMode};
use morphsim_core::plant::{LeakInjection, VehicleHealth};
use proptest::prelude::*;

/// Reference mission listing with one gain override.
const LISTING: &str = "ADD_LEG: start_time=120, heading=180, speed=1.5, depth=1.5
ADD_LEG: start_time=240, heading=250, speed=1.5, depth=2.0
ADD_LEG: start_time=410, heading=250, speed=1.5, depth=2.0, heading_kp=0.8
ADD_LEG: start_time=420, heading=180, speed=1.5, depth=2.0
ADD_LEG: start_time=600, heading=250, speed=1.5, depth=1.5
";

#[test]
fn reference_listing_gives_five_legs_and_one_override() {
    let legs = parse_mission(LISTING).unwrap();
    assert_eq!(legs.len(), 5);
    let with_gain: Vec<_> = legs.iter().filter(|l| !l.gain_overrides.is_empty()).collect();
    assert_eq!(with_gain.len(), 1);
    assert_eq!(with_gain[0].start_time, 410.0);
    assert_eq!(with_gain[0].gain_overrides.get("heading_kp"), Some(&0.8));
    let times: Vec<f64> = legs.iter().map(|l| l.start_time).collect();
    assert_eq!(times, [120.0, 240.0, 410.0, 420.0, 600.0]);
}

fn healthy() -> VehicleHealth {
    VehicleHealth {
        battery_v: 16.0,
        motor_current: 2.0,
        internal_pressure: 100.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn any_violation_trips_in_one_step(
        which in 0usize..4,
        t in 0.0..800.0f64,
        mode in prop_oneof![
            Just(VehicleMode::LaunchWait),
            Just(VehicleMode::EngageImminent),
            Just(VehicleMode::MissionActive),
            Just(VehicleMode::MissionEnded),
        ],
        excess in 0.001..10.0f64,
    ) {
        let env = SafetyEnvelope::default();
        let mut h = healthy();
        let mut depth = 1.0;
        let want = match which {
            0 => { depth = env.max_cruise_depth + excess; SafeReason::Depth }
            1 => { h.battery_v = env.min_voltage - excess; SafeReason::Voltage }
            2 => { h.motor_current = env.max_current + excess; SafeReason::Current }
            _ => { h.internal_pressure = env.max_internal_pressure + excess; SafeReason::Pressure }
        };
        let out = fsm_step(mode, t, &h, depth, &env);
        prop_assert_eq!(out.mode, VehicleMode::SafeMode(want));
        prop_assert!(!out.actuators_enabled);
        // latched
        let again = fsm_step(out.mode, t + 0.05, &healthy(), 1.0, &env);
        prop_assert_eq!(again.mode, out.mode);
    }

    #[test]
    fn mission_render_round_trips(
        legs in prop::collection::vec(
            (0.01..100.0f64, 0.0..360.0f64, 0.1..3.0f64, 0.0..10.0f64, prop::option::of(0.0..5.0f64)),
            0..12,
        ),
    ) {
        let mut t = 0.0;
        let legs: Vec<MissionLeg> = legs
            .into_iter()
            .map(|(dt, h, s, d, kp)| {
                t += dt;
                let mut l = MissionLeg::new(t, h, s, d);
                if let Some(kp) = kp {
                    l.gain_overrides.insert("heading_kp".into(), kp);
                }
                l
            })
            .collect();
        prop_assert_eq!(parse_mission(&render(&legs)).unwrap(), legs);
    }
}

fn zigzag() -> Scenario {
    let mut s = Scenario::builtin("zigzag").unwrap();
    s.nav = NavMode::Truth;
    s
}

/// Time of the first row in SAFE_MODE and the run end.
fn safe_entry(s: &Scenario) -> (f64, RunEnd) {
    let r = run(s, RunOptions::default()).unwrap();
    let t = r.rows.iter().find(|row| row.mode.starts_with("SAFE_MODE")).map(|row| row.t).unwrap();
    (t, r.end)
}

#[test]
fn closed_loop_violations_reach_safe_mode_within_a_tick() {
    let eps = 1e-9;

    let mut s = zigzag();
    s.config.initial_depth = s.config.envelope.max_cruise_depth + 1.0;
    let (t, end) = safe_entry(&s);
    assert_eq!((t, end), (0.0, RunEnd::Safety(SafeReason::Depth)));

    let mut s = zigzag();
    s.config.initial_health.battery_v = s.config.envelope.min_voltage - 0.5;
    let (t, end) = safe_entry(&s);
    assert_eq!((t, end), (0.0, RunEnd::Safety(SafeReason::Voltage)));

    // thrust first draws current on the engage tick
    let mut s = zigzag();
    s.config.envelope.max_current = 1.0;
    let engage = s.config.envelope.actuator_engage_delay;
    let (t, end) = safe_entry(&s);
    assert_eq!(end, RunEnd::Safety(SafeReason::Current));
    assert!(t > engage - eps && t <= engage + TICK + eps, "current trip at {t}");

    let mut s = zigzag();
    let leak = LeakInjection { start: 30.0, rate: 2.0 };
    s.config.health.leak = Some(leak);
    let crossing = leak.start
        + (s.config.envelope.max_internal_pressure - s.config.initial_health.internal_pressure) / leak.rate;
    let (t, end) = safe_entry(&s);
    assert_eq!(end, RunEnd::Safety(SafeReason::Pressure));
    assert!(t > crossing - eps && t <= crossing + TICK + eps, "pressure trip at {t}, crossing {crossing}");
}

#[test]
fn nominal_mode_sequence_and_leds() {
    let s = zigzag();
    let r = run(&s, RunOptions::default()).unwrap();
    assert_eq!(r.end, RunEnd::Completed);
    let mut seq: Vec<(String, f64)> = Vec::new();
    for row in &r.rows {
        if seq.last().is_none_or(|(m, _)| *m != row.mode) {
            seq.push((row.mode.clone(), row.t));
        }
    }
    let env = &s.config.envelope;
    let want = [
        ("LAUNCH_WAIT", 0.0),
        ("ENGAGE_IMMINENT", env.actuator_engage_delay - 10.0),
        ("MISSION_ACTIVE", env.actuator_engage_delay),
        ("MISSION_ENDED", env.mission_end_time),
    ];
    assert_eq!(seq.len(), want.len(), "{seq:?}");
    for ((m, t), (wm, wt)) in seq.iter().zip(want) {
        assert_eq!(m, wm);
        assert!((t - wt).abs() < 1e-9, "{m} at {t}, expected {wt}");
    }
    let leds: Vec<&str> = r
        .rows
        .iter()
        .flat_map(|row| row.events.split(';'))
        .filter(|e| e.starts_with("LED"))
        .collect();
    assert_eq!(leds, ["LED1", "LED2", "LED3", "LED4"]);
}
