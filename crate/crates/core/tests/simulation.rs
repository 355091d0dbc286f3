use aoi_core::analytic::{report, renewal_moments};
use aoi_core::model::{packet_duration, request_duration, PhyConfig, Protocol, ProtocolParams, TimingModel};
use aoi_core::sim::{simulate, SimConfig};

fn table_timing() -> TimingModel {
    TimingModel::from_phy(128, &PhyConfig::default()).unwrap()
}

fn within(sim: f64, analytic: f64, ci: f64) -> bool {
    (sim - analytic).abs() <= 4.0 * ci
}

#[test]
fn timing_from_default_phy() {
    let phy = PhyConfig::default();
    let t = table_timing();
    assert_eq!(t.t_pk, packet_duration(128, &phy).unwrap());
    assert_eq!(t.t_r, request_duration(&phy).unwrap());
}

#[test]
fn sim_matches_analytic_for_every_protocol() {
    let timing = table_timing();
    let cases = [
        ProtocolParams::sa(5, 0.2).unwrap(),
        ProtocolParams::fsa(5, 0.6, 3).unwrap(),
        ProtocolParams::rta(5, 0.5, 4).unwrap(),
        ProtocolParams::rta(10, 0.7, 5).unwrap(),
    ];
    for (i, params) in cases.into_iter().enumerate() {
        let stats = simulate(&SimConfig::new(params, timing, 400_000, 100 + i as u64)).unwrap();
        let expect = report(&params, &timing).unwrap();
        let z = renewal_moments(&params, &timing).unwrap();
        assert!(
            within(stats.mean_aoi, expect.avg_aoi, stats.aoi_ci_halfwidth),
            "{:?}: aoi {} vs {} (ci {})",
            params.protocol,
            stats.mean_aoi,
            expect.avg_aoi,
            stats.aoi_ci_halfwidth
        );
        assert!(
            within(stats.mean_power, expect.avg_power, stats.power_ci_halfwidth),
            "{:?}: power {} vs {} (ci {})",
            params.protocol,
            stats.mean_power,
            expect.avg_power,
            stats.power_ci_halfwidth
        );
        assert!(
            within(stats.mean_interval, z.mean, stats.interval_ci_halfwidth),
            "{:?}: E[Z] {} vs {}",
            params.protocol,
            stats.mean_interval,
            z.mean
        );
        assert!(stats.mean_aoi >= timing.t_pk);
        assert!((0.0..=1.0).contains(&stats.mean_power));
    }
}

#[test]
fn simulated_power_is_linear_for_aloha() {
    let timing = TimingModel::normalized();
    for (params, expect) in [
        (ProtocolParams::sa(10, 0.1).unwrap(), 0.1),
        (ProtocolParams::fsa(10, 0.5, 5).unwrap(), 0.1),
        (ProtocolParams::fsa(20, 0.8, 4).unwrap(), 0.2),
    ] {
        let stats = simulate(&SimConfig::new(params, timing, 1_000_000, 7)).unwrap();
        assert!(
            within(stats.mean_power, expect, stats.power_ci_halfwidth),
            "{:?}: {} vs {expect}",
            params.protocol,
            stats.mean_power
        );
    }
}

#[test]
fn tracked_sensor_choice_does_not_matter_on_average() {
    let params = ProtocolParams::rta(6, 0.6, 3).unwrap();
    let timing = table_timing();
    let expect = report(&params, &timing).unwrap().avg_aoi;
    for tracked in [0, 5] {
        let mut cfg = SimConfig::new(params, timing, 300_000, 3);
        cfg.tracked_sensor = tracked;
        let stats = simulate(&cfg).unwrap();
        assert!(within(stats.mean_aoi, expect, stats.aoi_ci_halfwidth));
    }
}

#[test]
fn rta_round_duration_matches_mean_admissions() {
    let params = ProtocolParams::rta(10, 0.5, 5).unwrap();
    let timing = table_timing();
    let stats = simulate(&SimConfig::new(params, timing, 300_000, 9)).unwrap();
    // every sensor is admitted with the same probability
    let admitted = 10.0 * 0.5 * (1.0 - 0.1f64).powi(9);
    let expect = 5.0 * timing.t_r + admitted * timing.t_pk;
    assert!((stats.mean_round_duration - expect).abs() / expect < 2e-3);
    assert_eq!(Protocol::Rta, params.protocol);
}
