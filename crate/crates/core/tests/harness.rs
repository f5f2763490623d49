use depthgof::harness::{
    replicate_once, run_experiment, write_rows, Alternative, Cell, ExperimentConfig, Mode, Profile,
};
use depthgof::Error;

fn config() -> ExperimentConfig {
    ExperimentConfig {
        name: "small".into(),
        mode: Mode::OneSample,
        null: "mvnormal:d=2".into(),
        alternatives: vec![
            Alternative { id: "null".into(), spec: "mvnormal:d=2".into() },
            Alternative { id: "shift".into(), spec: "mvnormal:d=2,mu=0.5".into() },
        ],
        sample_sizes: vec![10, 25, 50],
        reference_size: Some(300),
        replicates: Some(200),
        level: 0.05,
        depths: vec!["halfspace".into()],
        stats: vec!["cvm".into()],
        seed: 71,
        null_replicates: Some(5000),
        directions: None,
    }
}

fn csv(cfg: &ExperimentConfig, threads: usize) -> String {
    let rows = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_experiment(cfg).unwrap());
    let mut buf = Vec::new();
    write_rows(&rows, true, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn output_is_identical_across_thread_counts() {
    let mut cfg = config();
    cfg.replicates = Some(40);
    cfg.depths.push("zonoid".into());
    let one = csv(&cfg, 1);
    assert_eq!(one, csv(&cfg, 3));
    assert_eq!(one, csv(&cfg, 1));
    assert!(one.starts_with("alternative,test,n,rate,se,seconds\n"));
}

#[test]
fn rates_and_standard_errors() {
    let cfg = config();
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!((0.0..=1.0).contains(&r.rate));
        assert!((r.se - (r.rate * (1.0 - r.rate) / 200.0).sqrt()).abs() < 1e-15);
    }
    let shift: Vec<f64> = rows.iter().filter(|r| r.alternative == "shift").map(|r| r.rate).collect();
    let se = |p: f64| (p * (1.0 - p) / 200.0).sqrt();
    let inversions = shift.windows(2).filter(|w| w[1] < w[0]).count();
    assert!(inversions <= 1, "{shift:?}");
    for w in shift.windows(2) {
        assert!(w[1] >= w[0] - 2.0 * se(w[0]), "{shift:?}");
    }
    for r in rows.iter().filter(|r| r.alternative == "null") {
        assert!((r.rate - 0.05).abs() <= 3.0 * r.se.max(se(0.05)), "{}: {}", r.n, r.rate);
    }
}

#[test]
fn distinct_replicates_are_uncorrelated() {
    let mut cfg = config();
    cfg.sample_sizes = vec![10];
    cfg.reference_size = Some(200);
    let cell = Cell { alternative: 1, n: 0, depth: 0, stat: 0 };
    let flags: Vec<f64> = (0..2000)
        .map(|r| replicate_once(&cfg, cell, r).unwrap() as u8 as f64)
        .collect();
    let (a, b) = flags.split_at(1000);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    assert!(ma > 0.1 && ma < 0.9, "indicator mean {ma}");
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / 1000.0;
    let sd = |v: &[f64], m: f64| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 1000.0).sqrt();
    let corr = cov / (sd(a, ma) * sd(b, mb));
    assert!(corr.abs() <= 0.1, "{corr}");
    assert_eq!(replicate_once(&cfg, cell, 17).unwrap(), flags[17] == 1.0);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = config();
    cfg.alternatives.clear();
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, Error::Config(ref m) if m.contains("alternatives")), "{err}");

    let mut cfg = config();
    cfg.alternatives[1].spec = "mvnormal:d=3".into();
    let err = run_experiment(&cfg).unwrap_err().to_string();
    assert!(err.contains("alternatives[1].spec"), "{err}");

    let mut cfg = config();
    cfg.reference_size = Some(20);
    assert!(run_experiment(&cfg).is_err());

    assert!(ExperimentConfig::from_json(r#"{"name": "x", "bogus": 1}"#).is_err());
}

#[test]
fn bundled_configs_parse_and_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = std::fs::read_to_string(&path).unwrap();
            let mut cfg = ExperimentConfig::from_json(&text)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.apply_profile(Profile::Desk);
            assert_eq!(cfg.replicates(), 500);
            cfg.replicates = Some(1);
            cfg.reference_size = Some(250);
            cfg.sample_sizes.retain(|&n| n <= 250);
            cfg.null_replicates = Some(1000);
            let rows = run_experiment(&cfg).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(!rows.is_empty());
            let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(back, cfg);
            seen += 1;
        }
    }
    assert!(seen >= 9);
}
