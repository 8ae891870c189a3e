use kyle_disclosure::disclosure::solve;
use kyle_disclosure::simulator::{
    compare_conventions, convention_equivalence, simulate_paths, NoiseConvention, SimulationConfig,
};
use kyle_disclosure::{Error, MarketParams};

fn run(
    params: MarketParams,
    paths: u64,
    seed: u64,
    conv: NoiseConvention,
) -> kyle_disclosure::simulator::SimulationReport {
    let path = solve(&params).unwrap();
    simulate_paths(&path, &SimulationConfig::new(paths, seed, conv)).unwrap()
}

#[test]
fn two_auction_run_passes_every_band() {
    let params = MarketParams::new(2, 2, 1.0, 1.0);
    let rep = run(params, 200_000, 42, NoiseConvention::Independent);
    for (name, ok) in rep.checks() {
        assert!(ok, "{name} failed: {rep:#?}");
    }
    assert_eq!(rep.valid_paths, 200_000);
    assert_eq!(rep.excluded_paths, 0);
    let a1 = &rep.auctions[0];
    assert!((a1.structural_lambda.expected - 0.4472135954999579).abs() < 1e-15);
    assert!((rep.profit.expected - 0.29814239699997196).abs() < 1e-15);
    for a in &rep.auctions {
        assert_eq!(a.order_flow_var.expected, 3.0);
    }
}

#[test]
fn bands_hold_across_shapes() {
    let cases = [
        MarketParams::new(1, 5, 1.0, 1.0),
        MarketParams::new(3, 4, 2.0, 0.5),
        MarketParams::new(5, 8, 0.25, 2.0).with_prior_mean(3.0),
    ];
    for (i, params) in cases.into_iter().enumerate() {
        for conv in [NoiseConvention::Independent, NoiseConvention::Common] {
            let rep = run(params, 50_000, 100 + i as u64, conv);
            let failed: Vec<_> = rep.checks().into_iter().filter(|(_, ok)| !ok).collect();
            assert!(failed.is_empty(), "{params:?} {conv:?}: {failed:?}");
        }
    }
}

#[test]
fn identical_under_any_thread_count() {
    let path = solve(&MarketParams::new(3, 5, 1.0, 1.0)).unwrap();
    let mut cfg = SimulationConfig::new(30_000, 9, NoiseConvention::Independent);
    cfg.record_paths = 3;
    let on = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_paths(&path, &cfg).unwrap())
    };
    let one = on(1);
    let four = on(4);
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&four).unwrap()
    );
    assert_eq!(one, on(7));
}

#[test]
fn conventions_agree() {
    let params = MarketParams::new(2, 2, 1.0, 1.0);
    let a = run(params, 200_000, 42, NoiseConvention::Independent);
    let b = run(params, 200_000, 42, NoiseConvention::Common);
    let verdict = convention_equivalence(&a, &b).unwrap();
    assert!(verdict.agree());
}

#[test]
fn single_insider_conventions_coincide() {
    let params = MarketParams::new(1, 6, 1.0, 1.0);
    let a = run(params, 10_000, 5, NoiseConvention::Independent);
    let b = run(params, 10_000, 5, NoiseConvention::Common);
    assert_eq!(a.auctions, b.auctions);
    assert_eq!(a.profit, b.profit);
}

#[test]
fn doubled_noise_is_caught_on_first_order_flow() {
    let params = MarketParams::new(2, 2, 1.0, 1.0);
    let path = solve(&params).unwrap();
    let mut faulty = path.clone();
    for row in &mut faulty.rows {
        row.z_var *= 2.0;
    }
    let a = simulate_paths(
        &path,
        &SimulationConfig::new(200_000, 42, NoiseConvention::Independent),
    )
    .unwrap();
    let b = simulate_paths(
        &faulty,
        &SimulationConfig::new(200_000, 42, NoiseConvention::Common),
    )
    .unwrap();
    match convention_equivalence(&a, &b) {
        Err(Error::ConventionMismatch {
            statistic, z_score, ..
        }) => {
            assert_eq!(statistic, "order_flow_var[1]");
            assert!(z_score.abs() > 3.0);
        }
        other => panic!("expected a mismatch, got {other:?}"),
    }
}

#[test]
fn mismatched_reports_are_refused() {
    let params = MarketParams::new(2, 2, 1.0, 1.0);
    let a = run(params, 1000, 1, NoiseConvention::Independent);
    let b = run(params, 1000, 2, NoiseConvention::Common);
    assert!(matches!(
        compare_conventions(&a, &b),
        Err(Error::InvalidParams {
            field: "reports",
            ..
        })
    ));
}
