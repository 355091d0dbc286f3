use aoi_core::optimizer::{min_aoi_given_power, min_aoi_unconstrained, Optimizer};
use aoi_core::analytic::Evaluator;
use aoi_core::{PhyConfig, Protocol, TimingModel};

fn best(protocol: Protocol, timing: TimingModel, budget: f64) -> f64 {
    min_aoi_given_power(protocol, 10, 5, timing, 1.0, budget).unwrap().min_aoi
}

fn timing(payload: u32) -> TimingModel {
    TimingModel::from_phy(payload, &PhyConfig::default()).unwrap()
}

#[test]
fn payload_study_gaps() {
    let t = timing(128);
    let (sa, fsa, rta) = (best(Protocol::Sa, t, 0.1), best(Protocol::Fsa, t, 0.1), best(Protocol::Rta, t, 0.1));
    let (vs_fsa, vs_sa) = (1.0 - rta / fsa, 1.0 - rta / sa);
    println!("128 B: rta vs fsa {vs_fsa:.4}, rta vs sa {vs_sa:.4}");
    assert!((vs_fsa - 0.40).abs() <= 0.05);
    assert!((vs_sa - 0.45).abs() <= 0.05);

    let t = timing(64);
    let gap = 1.0 - best(Protocol::Rta, t, 0.1) / best(Protocol::Fsa, t, 0.1);
    println!("64 B: rta vs fsa {gap:.4}");
    assert!((gap - 0.30).abs() <= 0.05);

    let t = timing(16);
    let gap = 1.0 - best(Protocol::Rta, t, 0.1) / best(Protocol::Fsa, t, 0.1);
    println!("16 B: rta vs fsa {gap:.4}");
    assert!((gap - 0.06).abs() <= 0.03);
    let gap = 1.0 - best(Protocol::Fsa, t, 0.03) / best(Protocol::Rta, t, 0.03);
    println!("16 B at 0.03: fsa vs rta {gap:.4}");
    assert!((gap - 0.20).abs() <= 0.05);
}

#[test]
fn sa_optimum_success_rate() {
    let o = min_aoi_unconstrained(Protocol::Sa, 10, 1, TimingModel::normalized(), 1.0).unwrap();
    assert!((o.best_prob - 0.1).abs() < 1e-6);
    let success = o.best_prob * (1.0 - o.best_prob).powi(9);
    assert!((success - 0.03874).abs() < 1e-5);
}

#[test]
fn frontier_tail_reaches_unconstrained_optimum() {
    for protocol in Protocol::ALL {
        let eval = Evaluator::new(protocol, 12, 3, timing(128), 1.0).unwrap();
        let opt = Optimizer::new(eval).unwrap();
        let budgets: Vec<f64> = (1..=40).map(|i| f64::from(i) * 0.025).collect();
        let f = opt.frontier(&budgets).unwrap();
        assert!(f.windows(2).all(|w| w[1].min_aoi <= w[0].min_aoi));
        assert_eq!(f.last().unwrap().min_aoi, opt.min_aoi_unconstrained().min_aoi);
        for p in &f {
            assert!(p.best_prob > 0.0 && p.best_prob <= 1.0);
            assert!(p.min_aoi >= 1.5 * opt.evaluator().timing().t_pk);
        }
    }
}
