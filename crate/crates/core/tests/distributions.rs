use depthgof::distributions::{beta_quantile, fgm_copula, sample, DistributionSpec, Marginal};
use depthgof::{DataMatrix, Seed};

fn spec(s: &str) -> DistributionSpec {
    s.parse().unwrap()
}

fn column(m: &DataMatrix, j: usize) -> Vec<f64> {
    m.rows().map(|r| r[j]).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn beta_quantile_round_trips() {
    for (a, b) in [(0.5, 0.5), (1.5, 1.5), (2.0, 3.0), (0.7, 4.0), (5.0, 1.2)] {
        let m = Marginal::Beta { a, b };
        for k in 1..100 {
            let p = k as f64 / 100.0;
            let q = beta_quantile(p, a, b).unwrap();
            assert!((m.cdf(q) - p).abs() <= 1e-10, "a={a} b={b} p={p}: cdf={}", m.cdf(q));
        }
    }
}

#[test]
fn beta_median_against_quadrature() {
    let q = beta_quantile(0.5, 2.0, 3.0).unwrap();
    // Composite Simpson on the Beta(2, 3) density 12 x (1 - x)^2.
    let steps = 2000;
    let h = q / steps as f64;
    let f = |x: f64| 12.0 * x * (1.0 - x) * (1.0 - x);
    let mut s = f(0.0) + f(q);
    for i in 1..steps {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    assert!((s * h / 3.0 - 0.5).abs() <= 1e-12);
}

#[test]
fn cauchy_medians_sit_at_the_location() {
    let x = sample(&spec("mvt:d=2,nu=1,mu=2"), 100_000, Seed(61)).unwrap();
    for j in 0..2 {
        let med = median(column(&x, j));
        assert!((med - 2.0).abs() <= 0.05, "coordinate {j}: {med}");
    }
}

#[test]
fn laplace_covariance_matches_scale() {
    let x = sample(&spec("mvlaplace:d=2"), 100_000, Seed(62)).unwrap();
    let n = x.nrows() as f64;
    let mean = x.column_mean();
    let mut cov = [0.0; 4];
    for r in x.rows() {
        for i in 0..2 {
            for j in 0..2 {
                cov[i * 2 + j] += (r[i] - mean[i]) * (r[j] - mean[j]) / n;
            }
        }
    }
    for (k, want) in [1.0, 0.0, 0.0, 1.0].into_iter().enumerate() {
        assert!((cov[k] - want).abs() < 0.05, "{cov:?}");
    }
}

/// Kendall's tau of continuous pairs, by counting inversions with a merge
/// sort after ordering on the first coordinate.
fn kendall_tau(pairs: &[(f64, f64)]) -> f64 {
    fn inversions(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = inversions(&mut v[..mid], buf) + inversions(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[i] <= v[j] {
                buf.push(v[i]);
                i += 1;
            } else {
                buf.push(v[j]);
                count += (mid - i) as u64;
                j += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..n]);
        v.copy_from_slice(buf);
        count
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ys: Vec<f64> = sorted.iter().map(|p| p.1).collect();
    let discordant = inversions(&mut ys, &mut Vec::new()) as f64;
    let total = pairs.len() as f64 * (pairs.len() as f64 - 1.0) / 2.0;
    1.0 - 2.0 * discordant / total
}

/// `4 E[C(U, V)] - 1` by a midpoint rule over the copula density.
fn copula_tau(theta: f64) -> f64 {
    let k = 400;
    let h = 1.0 / k as f64;
    let mut s = 0.0;
    for i in 0..k {
        let u = (i as f64 + 0.5) * h;
        for j in 0..k {
            let v = (j as f64 + 0.5) * h;
            let density = 1.0 + theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
            s += fgm_copula(u, v, theta) * density;
        }
    }
    4.0 * s * h * h - 1.0
}

#[test]
fn fgm_kendall_tau() {
    for theta in [-1.0, 0.5, 1.0] {
        let x = sample(&spec(&format!("fgm:theta={theta}")), 100_000, Seed(63)).unwrap();
        let pairs: Vec<(f64, f64)> = x.rows().map(|r| (r[0], r[1])).collect();
        let got = kendall_tau(&pairs);
        let want = copula_tau(theta);
        assert!((got - want).abs() <= 0.01, "theta={theta}: {got} vs {want}");
    }
}

#[test]
fn fgm_beta_marginals() {
    let x = sample(&spec("fgm:theta=0.5,m=beta(2,3)"), 50_000, Seed(64)).unwrap();
    for j in 0..2 {
        let col = column(&x, j);
        assert!(col.iter().all(|v| (0.0..=1.0).contains(v)));
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!((mean - 0.4).abs() < 0.01, "{mean}");
    }
}

#[test]
fn samples_are_deterministic_per_seed() {
    for s in ["mvnormal:d=3,mu=1,sigma=2I", "mvt:d=2,nu=5", "mvlaplace:d=2", "fgm:theta=-0.5"] {
        let d = spec(s);
        assert_eq!(sample(&d, 50, Seed(65)).unwrap(), sample(&d, 50, Seed(65)).unwrap());
        assert_ne!(sample(&d, 50, Seed(65)).unwrap(), sample(&d, 50, Seed(66)).unwrap());
    }
}
