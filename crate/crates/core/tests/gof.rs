use proptest::prelude::*;
use rand::Rng;

use depthgof::distributions::{sample, DistributionSpec};
use depthgof::gof::{run_gof, GofConfig, NullSource};
use depthgof::harness::{run_experiment, Alternative, ExperimentConfig, Mode};
use depthgof::uniformity::{mc_null_table, null_table, GreenwoodVariant, StatKind};
use depthgof::{DepthKind, Seed, UnitSample};

const ALL: [StatKind; 4] = [
    StatKind::Ks,
    StatKind::Cvm,
    StatKind::AD,
    StatKind::Greenwood(GreenwoodVariant::PaperLiteral),
];

proptest! {
    #[test]
    fn statistics_ignore_sample_order(mut v in proptest::collection::vec(0.0f64..=1.0, 2..50), seed in any::<u64>()) {
        let a = UnitSample::new(v.clone()).unwrap();
        let mut rng = Seed(seed).rng();
        for i in (1..v.len()).rev() {
            v.swap(i, rng.gen_range(0..=i));
        }
        let b = UnitSample::new(v).unwrap();
        for s in ALL {
            prop_assert_eq!(s.eval(&a), s.eval(&b));
        }
    }

    #[test]
    fn statistic_ranges(v in proptest::collection::vec(0.0f64..=1.0, 2..50)) {
        let n = v.len() as f64;
        let top = v.iter().copied().fold(0.0, f64::max);
        let u = UnitSample::new(v).unwrap();
        let ks = StatKind::Ks.eval(&u);
        prop_assert!((0.0..=1.0).contains(&ks));
        prop_assert!(StatKind::Cvm.eval(&u) >= 1.0 / (12.0 * n) - 1e-12);
        let gd = StatKind::Greenwood(GreenwoodVariant::PaperLiteral).eval(&u);
        prop_assert!(gd >= top * top - 1e-12);
    }
}

#[test]
fn null_tables_hold_their_level_on_fresh_uniforms() {
    let n = 20;
    let mut rng = Seed(41).rng();
    let fresh: Vec<UnitSample> = (0..10_000)
        .map(|_| UnitSample::new((0..n).map(|_| rng.gen()).collect()).unwrap())
        .collect();
    for s in ALL {
        let table = mc_null_table(s, n, 20_000, 42).unwrap();
        let critical = table.critical_value(0.05);
        let mut rejections = 0;
        for u in &fresh {
            let t = s.eval(u);
            let reject = table.rejects(t, 0.05);
            assert_eq!(reject, t > critical);
            assert_eq!(reject, table.pvalue(t) <= 0.05, "{s}: t={t}");
            rejections += reject as usize;
        }
        let rate = rejections as f64 / fresh.len() as f64;
        assert!((rate - 0.05).abs() <= 0.01, "{s}: {rate}");
    }
}

#[test]
fn memoized_tables_are_shared() {
    let a = null_table(StatKind::Cvm, 17, 2000, 9).unwrap();
    let b = null_table(StatKind::Cvm, 17, 2000, 9).unwrap();
    assert!(std::sync::Arc::ptr_eq(&a, &b));
}

fn null_experiment(name: &str, null: &str, d_note: &str) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        mode: Mode::OneSample,
        null: null.into(),
        alternatives: vec![Alternative { id: d_note.into(), spec: null.into() }],
        sample_sizes: vec![25],
        reference_size: Some(500),
        replicates: Some(1000),
        level: 0.05,
        depths: vec!["halfspace".into()],
        stats: vec!["ks".into()],
        seed: 43,
        null_replicates: None,
        directions: None,
    }
}

#[test]
fn level_does_not_depend_on_the_null_family() {
    for null in ["mvnormal:d=2", "fgm:theta=0", "fgm:theta=0.5"] {
        let rows = run_experiment(&null_experiment("family", null, null)).unwrap();
        let rate = rows[0].rate;
        assert!((rate - 0.05).abs() <= 0.02, "{null}: {rate}");
    }
}

#[test]
fn more_dimensions_than_observations() {
    let mut cfg = null_experiment("wide", "mvnormal:d=10", "N10");
    cfg.sample_sizes = vec![5];
    cfg.replicates = Some(400);
    cfg.reference_size = Some(2000);
    cfg.depths = vec!["halfspace-approx=200".into()];
    cfg.stats = vec!["ks".into(), "cvm".into()];
    let rows = run_experiment(&cfg).unwrap();
    let se = (0.05f64 * 0.95 / 400.0).sqrt();
    for row in rows {
        assert!((row.rate - 0.05).abs() <= 3.0 * se, "{}: {}", row.test, row.rate);
    }
}

#[test]
fn pipeline_runs_in_one_two_and_five_dimensions() {
    for d in [1usize, 2, 5] {
        let spec = DistributionSpec::standard_normal(d);
        let x = sample(&spec, 30, Seed(44)).unwrap();
        let mut cfg = GofConfig::new(NullSource::Distribution(spec));
        cfg.reference_size = 400;
        cfg.null_replicates = 2000;
        cfg.depth = DepthKind::HALFSPACE;
        let report = run_gof(&x, &cfg).unwrap();
        assert_eq!(report.d, d);
        assert_eq!(report.results.len(), 2);
        if d == 5 {
            assert!(report.depth.contains("approx"), "{}", report.depth);
        }
        for r in &report.results {
            assert!(r.pvalue > 0.0 && r.pvalue <= 1.0);
            assert_eq!(r.reject, r.pvalue <= cfg.level);
        }
    }
}

#[test]
fn reports_are_reproducible_per_seed() {
    let spec = DistributionSpec::standard_normal(2);
    let x = sample(&spec, 40, Seed(45)).unwrap();
    let mut cfg = GofConfig::new(NullSource::Distribution(spec));
    cfg.reference_size = 300;
    cfg.null_replicates = 2000;
    cfg.stats = ALL.to_vec();
    cfg.seed = 7;
    let a = run_gof(&x, &cfg).unwrap();
    let b = run_gof(&x, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_key_value(), b.to_key_value());
    cfg.seed = 8;
    let c = run_gof(&x, &cfg).unwrap();
    assert_ne!(
        a.results.iter().map(|r| r.observed).collect::<Vec<_>>(),
        c.results.iter().map(|r| r.observed).collect::<Vec<_>>()
    );
}
