use glasshouse_core::control::policy::{policy_act, theta_len};
use glasshouse_core::control::rule_based::rule_based_action;
use glasshouse_core::control::{p_control, ControlContext};
use glasshouse_core::env::reward::{raw_penalty, reward_epi, reward_penalty, EpiScale};
use glasshouse_core::model::clamp_controls;
use glasshouse_core::{
    ConstraintBounds, Controls, Disturbance, EnvConfig, ObservationConfig, PolicyParams, Prices, RuleBasedConfig,
    SimClock,
};
use proptest::prelude::*;

fn project(v: [f64; 6]) -> [f64; 6] {
    let mut out = v;
    for i in 0..6 {
        out[i] = v[i].max(Controls::MIN[i]).min(Controls::MAX[i]);
    }
    out
}

fn any_action() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-500.0..500.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn clamp_is_projection(v in any_action()) {
        let c = clamp_controls(&v).unwrap();
        prop_assert_eq!(c.to_array(), project(v));
        prop_assert_eq!(clamp_controls(&c.to_array()).unwrap(), c);
        prop_assert!(c.is_within_bounds());
    }

    #[test]
    fn p_control_is_clipped_and_monotone(e in -50.0..50.0f64, de in 0.0..10.0f64, band in 0.01..20.0f64) {
        let a = p_control(e, band, 1.0);
        let b = p_control(e + de, band, 1.0);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a);
        prop_assert_eq!(p_control(e, band, -1.0), p_control(-e, band, 1.0));
    }

    #[test]
    fn policy_output_within_bounds(
        theta in prop::collection::vec(-20.0..20.0f64, theta_len(22)),
        obs in prop::collection::vec(-1e3..1e3f64, 22),
    ) {
        let p = PolicyParams::for_observation(&ObservationConfig::default(), theta).unwrap();
        let u = policy_act(&p, &obs).unwrap();
        prop_assert!(u.is_within_bounds());
        prop_assert_eq!(clamp_controls(&u.to_array()).unwrap(), u);
    }

    #[test]
    fn rule_based_output_within_bounds(
        t in -10.0..45.0f64, ppm in 0.0..3000.0f64, rh in 0.0..100.0f64,
        i_glob in 0.0..1100.0f64, t_out in -20.0..40.0f64, daily in 0.0..30.0f64,
        secs in 0i64..86_400, prev in any_action(),
    ) {
        let ctx = ControlContext {
            observation: &[],
            t_air: t,
            co2_ppm: ppm,
            rh,
            disturbance: Disturbance { i_glob, t_out, rh_out: 80.0, co2_out: 410.0, wind: 3.0 },
            clock: SimClock::new(1_267_401_600 + secs, 300.0),
            daily_radiation: daily,
            previous: clamp_controls(&prev).unwrap(),
        };
        let cfg = RuleBasedConfig::default();
        let u = rule_based_action(&ctx, &cfg);
        prop_assert!(u.is_within_bounds());
        if u.u_blscr > 0.0 {
            prop_assert!(u.u_lamp > 0.0 && i_glob <= cfg.light_threshold);
        }
    }

    #[test]
    fn penalties_match_branch_oracle(y in prop::array::uniform3(-2000.0..4000.0f64)) {
        let b = ConstraintBounds::default();
        let scale = [10.0, 1000.0, 30.0];
        let got = reward_penalty(&y, &b, &scale);
        for i in 0..3 {
            let raw = if y[i] > b.upper[i] { y[i] - b.upper[i] } else if y[i] < b.lower[i] { b.lower[i] - y[i] } else { 0.0 };
            prop_assert_eq!(raw_penalty(y[i], b.lower[i], b.upper[i]), raw);
            prop_assert_eq!(got[i], (raw / scale[i]).min(1.0));
            prop_assert!((0.0..=1.0).contains(&got[i]));
        }
    }

    #[test]
    fn resource_cost_is_monotone(u in any_action(), which in 0usize..3, bump in 1e-3..10.0f64, harvest in 0.0..1e-3f64) {
        let u = clamp_controls(&u).unwrap();
        let mut a = u.to_array();
        let i = [0, 1, 4][which];
        a[i] = (a[i] - bump).max(0.0);
        let lower_use = Controls::from_array(a);
        if lower_use != u {
            let p = Prices::default();
            prop_assert!(reward_epi(harvest, &lower_use, &p, 300.0) > reward_epi(harvest, &u, &p, 300.0));
        }
    }

    #[test]
    fn scaled_epi_in_unit_interval(u in any_action(), harvest in 0.0..1.0f64) {
        let cfg = EnvConfig::default();
        let s = EpiScale::from_config(&cfg).unwrap();
        let v = s.scale(reward_epi(harvest, &clamp_controls(&u).unwrap(), &cfg.prices, cfg.dt()));
        prop_assert!((0.0..=1.0).contains(&v));
    }
}
