//! One-sample depth goodness-of-fit test.
//!
//! A reference sample `W` of size `N` is drawn from the null (or supplied),
//! the data are mapped to `G_N` values in `[0, 1]` and compared against
//! Monte Carlo null tables of the uniformity statistics.

use std::fmt::Write as _;
use std::io::Write;
use std::time::{Duration, Instant};

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::depth::{gn_transform, DepthKind, UnitSample};
use crate::distributions::{sample, DistributionSpec};
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::seed::{role, Seed};
use crate::uniformity::{null_table, StatKind};

pub const DEFAULT_REFERENCE_SIZE: usize = 5000;
pub const DEFAULT_NULL_REPLICATES: usize = 20_000;
pub const DEFAULT_TABLE_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq)]
pub enum NullSource {
    Distribution(DistributionSpec),
    Reference(DataMatrix),
}

impl NullSource {
    pub fn dim(&self) -> usize {
        match self {
            NullSource::Distribution(spec) => spec.dim(),
            NullSource::Reference(w) => w.ncols(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofConfig {
    pub null: NullSource,
    pub depth: DepthKind,
    pub stats: Vec<StatKind>,
    /// `N`; ignored when the null is given as a reference sample.
    pub reference_size: usize,
    pub level: f64,
    pub seed: u64,
    pub null_replicates: usize,
    pub table_seed: u64,
}

impl GofConfig {
    pub fn new(null: NullSource) -> Self {
        GofConfig {
            null,
            depth: DepthKind::HALFSPACE,
            stats: vec![StatKind::KS, StatKind::CVM],
            reference_size: DEFAULT_REFERENCE_SIZE,
            level: 0.05,
            seed: 0,
            null_replicates: DEFAULT_NULL_REPLICATES,
            table_seed: DEFAULT_TABLE_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "level must lie in (0, 1) (got {})",
                self.level
            )));
        }
        if self.stats.is_empty() {
            return Err(Error::InvalidArgument("no statistics requested".into()));
        }
        if let NullSource::Distribution(spec) = &self.null {
            spec.validate()?;
            if self.reference_size == 0 {
                return Err(Error::EmptyReference);
            }
        }
        Ok(())
    }
}

/// Outcome of one statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct StatResult {
    pub stat: StatKind,
    pub observed: f64,
    pub critical: f64,
    pub pvalue: f64,
    pub reject: bool,
}

#[derive(Debug, Clone)]
pub struct TestReport {
    pub results: Vec<StatResult>,
    pub n: usize,
    pub d: usize,
    /// `N`, or `None` for the analytic oracle.
    pub reference_size: Option<usize>,
    pub depth: String,
    pub level: f64,
    pub seed: u64,
    pub null_replicates: usize,
    pub warnings: Vec<String>,
    /// Wall time; not part of equality or of the text output.
    pub elapsed: Duration,
}

impl PartialEq for TestReport {
    fn eq(&self, o: &Self) -> bool {
        self.results == o.results
            && self.n == o.n
            && self.d == o.d
            && self.reference_size == o.reference_size
            && self.depth == o.depth
            && self.level == o.level
            && self.seed == o.seed
            && self.null_replicates == o.null_replicates
            && self.warnings == o.warnings
    }
}

impl TestReport {
    pub fn any_reject(&self) -> bool {
        self.results.iter().any(|r| r.reject)
    }

    pub fn get(&self, stat: StatKind) -> Option<&StatResult> {
        self.results.iter().find(|r| r.stat == stat)
    }

    /// `key=value` lines; per-statistic keys are prefixed by the label.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "d={}", self.d);
        match self.reference_size {
            Some(n) => {
                let _ = writeln!(s, "N={n}");
            }
            None => {
                let _ = writeln!(s, "N=analytic");
            }
        }
        let _ = writeln!(s, "depth={}", self.depth);
        let _ = writeln!(s, "level={}", self.level);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "B={}", self.null_replicates);
        for r in &self.results {
            let l = r.stat.label();
            let _ = writeln!(s, "{l}.observed={}", r.observed);
            let _ = writeln!(s, "{l}.critical={}", r.critical);
            let _ = writeln!(s, "{l}.pvalue={}", r.pvalue);
            let _ = writeln!(s, "{l}.reject={}", r.reject);
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning={w}");
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "stat,observed,critical,pvalue,reject")?;
        for r in &self.results {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.stat, r.observed, r.critical, r.pvalue, r.reject
            )?;
        }
        Ok(())
    }
}

/// Largest `n` for which `n <= N / (10 log log N)`.
pub fn recommended_max_n(reference_size: usize) -> f64 {
    let ll = (reference_size as f64).ln().ln();
    if ll > 0.0 {
        reference_size as f64 / (10.0 * ll)
    } else {
        0.0
    }
}

fn check_stats(stats: &[StatKind], n: usize) -> Result<()> {
    if n < 2 && stats.iter().any(|s| *s != StatKind::KS) {
        return Err(Error::InvalidArgument(
            "CvM, AD and Greenwood need at least 2 observations".into(),
        ));
    }
    Ok(())
}

/// Evaluates every statistic on `u` against its null table.
pub fn evaluate(
    u: &UnitSample,
    stats: &[StatKind],
    level: f64,
    null_replicates: usize,
    table_seed: u64,
) -> Result<Vec<StatResult>> {
    stats
        .iter()
        .map(|&stat| {
            let table = null_table(stat, u.len(), null_replicates, table_seed)?;
            let observed = stat.eval(u);
            Ok(StatResult {
                stat,
                observed,
                critical: table.critical_value(level),
                pvalue: table.pvalue(observed),
                reject: table.rejects(observed, level),
            })
        })
        .collect()
}

/// Draws (or takes) the reference sample for `cfg`.
pub fn reference_sample(cfg: &GofConfig) -> Result<DataMatrix> {
    match &cfg.null {
        NullSource::Distribution(spec) => sample(
            spec,
            cfg.reference_size,
            Seed(cfg.seed).derive(role::REFERENCE),
        ),
        NullSource::Reference(w) => Ok(w.clone()),
    }
}

pub fn run_gof(x: &DataMatrix, cfg: &GofConfig) -> Result<TestReport> {
    let start = Instant::now();
    cfg.validate()?;
    let (n, d) = (x.nrows(), x.ncols());
    let expected = cfg.null.dim();
    if d != expected {
        return Err(Error::DimensionMismatch { expected, found: d });
    }
    check_stats(&cfg.stats, n)?;
    let big_n = match &cfg.null {
        NullSource::Distribution(_) => cfg.reference_size,
        NullSource::Reference(w) => w.nrows(),
    };
    if big_n < n {
        return Err(Error::ReferenceTooSmall {
            reference: big_n,
            data: n,
        });
    }
    let mut warnings = Vec::new();
    let cap = recommended_max_n(big_n);
    if n as f64 > cap {
        warnings.push(format!(
            "n={n} exceeds N/(10 log log N)={cap:.1}; consider a larger reference sample"
        ));
    }
    if cfg.stats.iter().any(|s| matches!(s, StatKind::Ad(_) | StatKind::Greenwood(_))) {
        warnings.push(
            "AD and Greenwood statistics need a larger reference sample than KS and CvM to hold their level".into(),
        );
    }
    let depth = cfg.depth.for_dimension(d);
    depth.validate(d)?;
    let w = reference_sample(cfg)?;
    let u = gn_transform(x, &w, depth)?;
    let results = evaluate(&u, &cfg.stats, cfg.level, cfg.null_replicates, cfg.table_seed)?;
    Ok(TestReport {
        results,
        n,
        d,
        reference_size: Some(big_n),
        depth: depth.to_string(),
        level: cfg.level,
        seed: cfg.seed,
        null_replicates: cfg.null_replicates,
        warnings,
        elapsed: start.elapsed(),
    })
}

/// Closed-form population depth and depth distribution for a null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthOracle {
    /// Half-space depth of `N(0, I_d)`: `D(x) = Φ(-|x|)`, with
    /// `F^D(D(x)) = 1 - F_{χ²_d}(|x|²)`.
    SphericalGaussian { dim: usize },
    /// Every point gets the same depth. Degenerate: the transform is not
    /// uniform.
    Constant { dim: usize, depth: f64 },
}

impl DepthOracle {
    /// Oracle for a null distribution; only the standard normal is supported.
    pub fn for_null(spec: &DistributionSpec) -> Result<DepthOracle> {
        match spec {
            DistributionSpec::MvNormal { mu, sigma }
                if mu.iter().all(|&m| m == 0.0)
                    && *sigma == crate::distributions::identity(mu.len()) =>
            {
                Ok(DepthOracle::SphericalGaussian { dim: mu.len() })
            }
            other => Err(Error::UnsupportedOracle(format!(
                "no closed-form depth distribution for {other}"
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            DepthOracle::SphericalGaussian { dim } | DepthOracle::Constant { dim, .. } => dim,
        }
    }

    pub fn depth(&self, x: &[f64]) -> f64 {
        match *self {
            DepthOracle::SphericalGaussian { .. } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                standard_normal().cdf(-r)
            }
            DepthOracle::Constant { depth, .. } => depth,
        }
    }

    /// `F^D(t) = P(D(X) <= t)` under the null.
    pub fn depth_cdf(&self, t: f64) -> f64 {
        match *self {
            DepthOracle::SphericalGaussian { dim } => {
                if t <= 0.0 {
                    return 0.0;
                }
                if t >= 0.5 {
                    return 1.0;
                }
                let r = -standard_normal().inverse_cdf(t);
                chi_squared(dim).sf(r * r)
            }
            DepthOracle::Constant { depth, .. } => (t >= depth) as u8 as f64,
        }
    }

    /// `F^D(D(x))` for every row, computed from the radius directly.
    pub fn transform(&self, x: &DataMatrix) -> Result<UnitSample> {
        x.ensure_dim(self.dim())?;
        let values = match *self {
            DepthOracle::SphericalGaussian { dim } => {
                let chi = chi_squared(dim);
                x.rows()
                    .map(|row| chi.sf(row.iter().map(|v| v * v).sum::<f64>()))
                    .collect()
            }
            DepthOracle::Constant { depth, .. } => vec![self.depth_cdf(depth); x.nrows()],
        };
        UnitSample::new(values)
    }
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid normal")
}

fn chi_squared(dim: usize) -> ChiSquared {
    ChiSquared::new(dim as f64).expect("positive degrees of freedom")
}

/// The test with the exact transform `F^D(D(X))` in place of `G_N`.
pub fn gof_with_analytic_depth(
    x: &DataMatrix,
    oracle: &DepthOracle,
    stats: &[StatKind],
    level: f64,
    null_replicates: usize,
    table_seed: u64,
) -> Result<TestReport> {
    let start = Instant::now();
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level must lie in (0, 1) (got {level})")));
    }
    if stats.is_empty() {
        return Err(Error::InvalidArgument("no statistics requested".into()));
    }
    check_stats(stats, x.nrows())?;
    let u = oracle.transform(x)?;
    let mut warnings = Vec::new();
    let mut sorted = u.sorted();
    sorted.dedup();
    if sorted.len() < u.len() {
        warnings.push(format!(
            "{} tied transformed values; the transform is not uniform",
            u.len() - sorted.len()
        ));
    }
    let results = evaluate(&u, stats, level, null_replicates, table_seed)?;
    Ok(TestReport {
        results,
        n: x.nrows(),
        d: x.ncols(),
        reference_size: None,
        depth: match oracle {
            DepthOracle::SphericalGaussian { .. } => "analytic-gaussian".into(),
            DepthOracle::Constant { .. } => "analytic-constant".into(),
        },
        level,
        seed: 0,
        null_replicates,
        warnings,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null2() -> GofConfig {
        let mut cfg = GofConfig::new(NullSource::Distribution(DistributionSpec::standard_normal(2)));
        cfg.reference_size = 500;
        cfg.null_replicates = 2000;
        cfg.seed = 11;
        cfg
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = null2();
        let x = sample(&DistributionSpec::standard_normal(2), 20, Seed(3)).unwrap();
        let a = run_gof(&x, &cfg).unwrap();
        let b = run_gof(&x, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_key_value(), b.to_key_value());
        for r in &a.results {
            assert_eq!(r.reject, r.pvalue <= cfg.level);
            assert_eq!(r.reject, r.observed > r.critical);
        }
    }

    #[test]
    fn far_shift_rejects() {
        let cfg = null2();
        let x = sample(&DistributionSpec::standard_normal(2), 30, Seed(3))
            .unwrap()
            .affine(&[1.0, 0.0, 0.0, 1.0], &[4.0, 4.0])
            .unwrap();
        let r = run_gof(&x, &cfg).unwrap();
        assert!(r.results.iter().all(|s| s.reject));
    }

    #[test]
    fn errors() {
        let cfg = null2();
        let x3 = sample(&DistributionSpec::standard_normal(3), 5, Seed(1)).unwrap();
        assert!(matches!(run_gof(&x3, &cfg), Err(Error::DimensionMismatch { .. })));
        let big = sample(&DistributionSpec::standard_normal(2), 600, Seed(1)).unwrap();
        assert!(matches!(run_gof(&big, &cfg), Err(Error::ReferenceTooSmall { .. })));
        let mut bad = cfg.clone();
        bad.level = 1.0;
        assert!(run_gof(&big.head(5).unwrap(), &bad).is_err());
        let one = big.head(1).unwrap();
        assert!(run_gof(&one, &cfg).is_err());
        let mut ks = cfg;
        ks.stats = vec![StatKind::KS];
        assert!(run_gof(&one, &ks).is_ok());
    }

    #[test]
    fn data_taken_from_reference() {
        let w = sample(&DistributionSpec::standard_normal(2), 400, Seed(9)).unwrap();
        let mut cfg = GofConfig::new(NullSource::Reference(w.clone()));
        cfg.null_replicates = 1000;
        cfg.stats = StatKind::ALL.to_vec();
        let r = run_gof(&w.head(30).unwrap(), &cfg).unwrap();
        assert!(r.results.iter().all(|s| s.observed.is_finite()));
        assert_eq!(r.reference_size, Some(400));
    }

    #[test]
    fn large_n_warns() {
        let mut cfg = null2();
        cfg.reference_size = 100;
        let x = sample(&DistributionSpec::standard_normal(2), 50, Seed(2)).unwrap();
        let r = run_gof(&x, &cfg).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("log log")));
    }

    #[test]
    fn oracle_matches_its_parts() {
        let o = DepthOracle::SphericalGaussian { dim: 2 };
        let x = DataMatrix::from_rows(&[[0.3, -1.2], [2.0, 0.5], [0.0, 0.0]]).unwrap();
        let u = o.transform(&x).unwrap();
        for (row, &v) in x.rows().zip(u.values()) {
            assert!((o.depth_cdf(o.depth(row)) - v).abs() < 1e-9);
        }
        // chi-square with 2 dof: sf(r^2) = exp(-r^2/2)
        assert!((u.values()[0] - (-(0.09 + 1.44) / 2.0f64).exp()).abs() < 1e-12);
        assert_eq!(o.depth(&[0.0, 0.0]), 0.5);
    }

    #[test]
    fn oracle_support() {
        let ok = DepthOracle::for_null(&DistributionSpec::standard_normal(3)).unwrap();
        assert_eq!(ok, DepthOracle::SphericalGaussian { dim: 3 });
        let t: DistributionSpec = "mvt:d=2,nu=1".parse().unwrap();
        assert!(matches!(DepthOracle::for_null(&t), Err(Error::UnsupportedOracle(_))));
    }

    #[test]
    fn constant_oracle_flags_ties() {
        let o = DepthOracle::Constant { dim: 2, depth: 0.3 };
        let x = sample(&DistributionSpec::standard_normal(2), 10, Seed(4)).unwrap();
        let r = gof_with_analytic_depth(&x, &o, &[StatKind::KS], 0.05, 1000, 1).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("tied")));
        assert!(r.results[0].reject);
    }
}
