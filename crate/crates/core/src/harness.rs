//! Monte Carlo experiments: rejection rates of the one- and two-sample tests
//! over many replicates.
//!
//! Within a replicate, every cell (alternative, sample size, depth,
//! statistic) sees the same reference sample and the same data sets, so the
//! reference depths are computed once per depth. Each replicate draws fresh
//! samples from seeds derived from its index.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{gn_transform_many, DepthKind};
use crate::distributions::{DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::gof::DEFAULT_TABLE_SEED;
use crate::matrix::DataMatrix;
use crate::seed::{role, Seed};
use crate::two_sample::{joint_depths, rank_table, ranks_from_depths, TwoSampleStat, DEFAULT_RANK_TABLE_SEED};
use crate::uniformity::{null_table, StatKind};

/// Reject flags indexed `[alt][size][depth][stat]`.
type Flags = Vec<Vec<Vec<Vec<bool>>>>;

pub const DEFAULT_NULL_REPLICATES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// 500 replicates, reference size 2000.
    Desk,
    /// 1000 replicates, reference size 5000.
    Paper,
}

impl Profile {
    pub fn replicates(&self) -> usize {
        match self {
            Profile::Desk => 500,
            Profile::Paper => 1000,
        }
    }

    pub fn reference_size(&self) -> usize {
        match self {
            Profile::Desk => 2000,
            Profile::Paper => 5000,
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::Parse(format!("unknown profile '{other}' (desk or paper)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Mode {
    OneSample,
    /// `m` is the size of the second sample; `None` means `m = n`.
    TwoSample { m: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alternative {
    pub id: String,
    pub spec: String,
}

/// Experiment description, read from JSON.
///
/// In one-sample mode `null` is the hypothesised distribution and each
/// alternative generates the data. In two-sample mode `null` generates the
/// first sample and each alternative the second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub mode: Mode,
    pub null: String,
    pub alternatives: Vec<Alternative>,
    pub sample_sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    pub level: f64,
    pub depths: Vec<String>,
    pub stats: Vec<String>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null_replicates: Option<usize>,
    /// Direction count for approximate half-space depth in `d > 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Sets replicates and reference size from `profile`.
    pub fn apply_profile(&mut self, profile: Profile) {
        self.replicates = Some(profile.replicates());
        self.reference_size = Some(profile.reference_size());
    }

    pub fn replicates(&self) -> usize {
        self.replicates.unwrap_or(Profile::Desk.replicates())
    }

    pub fn reference_size(&self) -> usize {
        self.reference_size.unwrap_or(Profile::Desk.reference_size())
    }

    pub fn null_replicates(&self) -> usize {
        self.null_replicates.unwrap_or(DEFAULT_NULL_REPLICATES)
    }
}

#[derive(Debug, Clone)]
enum Stats {
    One(Vec<StatKind>),
    Two(Vec<TwoSampleStat>),
}

/// A validated configuration.
#[derive(Debug, Clone)]
struct Plan {
    null: Sampler,
    alternatives: Vec<(String, Sampler)>,
    sizes: Vec<usize>,
    m: Option<Option<usize>>,
    big_n: usize,
    replicates: usize,
    level: f64,
    depths: Vec<DepthKind>,
    stats: Stats,
    seed: u64,
    null_replicates: usize,
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let null_spec: DistributionSpec = cfg.null.parse().map_err(|e| config_err("null", e))?;
    let null = null_spec.sampler().map_err(|e| config_err("null", e))?;
    let d = null_spec.dim();
    if cfg.alternatives.is_empty() {
        return Err(config_err("alternatives", "at least one alternative is required"));
    }
    let mut alternatives = Vec::new();
    for (i, alt) in cfg.alternatives.iter().enumerate() {
        let field = format!("alternatives[{i}].spec");
        let spec: DistributionSpec = alt.spec.parse().map_err(|e| config_err(&field, e))?;
        if spec.dim() != d {
            return Err(config_err(
                &field,
                format!("dimension {} differs from the null's {d}", spec.dim()),
            ));
        }
        alternatives.push((alt.id.clone(), spec.sampler().map_err(|e| config_err(&field, e))?));
    }
    if cfg.sample_sizes.is_empty() || cfg.sample_sizes.contains(&0) {
        return Err(config_err("sample_sizes", "need at least one positive size"));
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(config_err("level", "must lie in (0, 1)"));
    }
    let replicates = cfg.replicates();
    if replicates == 0 {
        return Err(config_err("replicates", "must be at least 1"));
    }
    let big_n = cfg.reference_size();
    if cfg.depths.is_empty() {
        return Err(config_err("depths", "at least one depth is required"));
    }
    let mut depths = Vec::new();
    for s in &cfg.depths {
        let mut kind: DepthKind = s.parse().map_err(|e| config_err("depths", e))?;
        kind = kind.for_dimension(d);
        if let (Some(m), crate::depth::Strategy::Approximate { seed, .. }) = (cfg.directions, kind.strategy) {
            kind = DepthKind::halfspace_approx(m, seed);
        }
        kind.validate(d).map_err(|e| config_err("depths", e))?;
        depths.push(kind);
    }
    if cfg.stats.is_empty() {
        return Err(config_err("stats", "at least one statistic is required"));
    }
    let (stats, m) = match cfg.mode {
        Mode::OneSample => {
            let stats = cfg
                .stats
                .iter()
                .map(|s| s.parse::<StatKind>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| config_err("stats", e))?;
            if let Some(&n) = cfg.sample_sizes.iter().max() {
                if n > big_n {
                    return Err(config_err(
                        "reference_size",
                        Error::ReferenceTooSmall { reference: big_n, data: n },
                    ));
                }
            }
            if cfg.sample_sizes.contains(&1) && stats.iter().any(|s| *s != StatKind::KS) {
                return Err(config_err("sample_sizes", "CvM, AD and Greenwood need n >= 2"));
            }
            (Stats::One(stats), None)
        }
        Mode::TwoSample { m } => {
            if m == Some(0) {
                return Err(config_err("mode.two_sample.m", "must be positive"));
            }
            let stats = cfg
                .stats
                .iter()
                .map(|s| s.parse::<TwoSampleStat>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| config_err("stats", e))?;
            (Stats::Two(stats), Some(m))
        }
    };
    let null_replicates = cfg.null_replicates();
    if null_replicates < crate::uniformity::MIN_NULL_REPLICATES {
        return Err(config_err(
            "null_replicates",
            format!("must be at least {}", crate::uniformity::MIN_NULL_REPLICATES),
        ));
    }
    Ok(Plan {
        null,
        alternatives,
        sizes: cfg.sample_sizes.clone(),
        m,
        big_n,
        replicates,
        level: cfg.level,
        depths,
        stats,
        seed: cfg.seed,
        null_replicates,
    })
}

/// Identifies one cell of an experiment by positions in the config lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub alternative: usize,
    pub n: usize,
    pub depth: usize,
    pub stat: usize,
}

/// One output line: the rejection rate of a test in a cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub alternative: String,
    pub test: String,
    pub n: usize,
    pub rate: f64,
    pub se: f64,
    pub seconds: f64,
}

impl Plan {
    fn stat_count(&self) -> usize {
        match &self.stats {
            Stats::One(s) => s.len(),
            Stats::Two(s) => s.len(),
        }
    }

    fn test_id(&self, depth: usize, stat: usize) -> String {
        let prefix = self.depths[depth].label();
        match &self.stats {
            Stats::One(s) => format!("{prefix}{}", s[stat].label()),
            Stats::Two(s) => format!("{prefix}{}2", s[stat].label()),
        }
    }

    fn second_size(&self, n: usize) -> usize {
        match self.m {
            Some(Some(m)) => m,
            _ => n,
        }
    }

    fn data_seed(&self, alt: usize, n: usize, r: usize) -> Seed {
        Seed(self.seed).derive_path(&[role::DATA, alt as u64, n as u64, r as u64])
    }

    fn prepare_tables(&self) -> Result<()> {
        match &self.stats {
            Stats::One(stats) => {
                for &s in stats {
                    for &n in &self.sizes {
                        null_table(s, n, self.null_replicates, DEFAULT_TABLE_SEED)?;
                    }
                }
            }
            Stats::Two(stats) => {
                for &s in stats {
                    for &n in &self.sizes {
                        rank_table(s, n, self.second_size(n), self.null_replicates, DEFAULT_RANK_TABLE_SEED)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Reject flags of replicate `r` for every `(alternative, n)` pair and
    /// depth, indexed `[alt][size][depth][stat]`, plus time spent per depth.
    fn replicate(&self, r: usize) -> Result<(Flags, Vec<Duration>)> {
        let mut timing = vec![Duration::ZERO; self.depths.len()];
        let na = self.alternatives.len();
        let ns = self.sizes.len();
        let mut flags = vec![vec![vec![Vec::new(); self.depths.len()]; ns]; na];
        match &self.stats {
            Stats::One(stats) => {
                let w = self
                    .null
                    .sample(self.big_n, Seed(self.seed).derive_path(&[role::REFERENCE, r as u64]))?;
                let mut xs = Vec::with_capacity(na * ns);
                for (a, (_, alt)) in self.alternatives.iter().enumerate() {
                    for &n in &self.sizes {
                        xs.push(alt.sample(n, self.data_seed(a, n, r))?);
                    }
                }
                let refs: Vec<&DataMatrix> = xs.iter().collect();
                for (k, &depth) in self.depths.iter().enumerate() {
                    let start = Instant::now();
                    let us = gn_transform_many(&refs, &w, depth)?;
                    for (idx, u) in us.iter().enumerate() {
                        let (a, s) = (idx / ns, idx % ns);
                        flags[a][s][k] = stats
                            .iter()
                            .map(|&st| {
                                let t = null_table(st, u.len(), self.null_replicates, DEFAULT_TABLE_SEED)?;
                                Ok(t.rejects(st.eval(u), self.level))
                            })
                            .collect::<Result<_>>()?;
                    }
                    timing[k] += start.elapsed();
                }
            }
            Stats::Two(stats) => {
                for (a, (_, alt)) in self.alternatives.iter().enumerate() {
                    for (s, &n) in self.sizes.iter().enumerate() {
                        let m = self.second_size(n);
                        let seed = self.data_seed(a, n, r);
                        let x = self.null.sample(n, seed.derive(1))?;
                        let y = alt.sample(m, seed.derive(2))?;
                        for (k, &depth) in self.depths.iter().enumerate() {
                            let start = Instant::now();
                            let (dx, dy) = joint_depths(&x, &y, depth)?;
                            let ranks = ranks_from_depths(&dx, &dy, seed.derive(3).0)?;
                            flags[a][s][k] = stats
                                .iter()
                                .map(|&st| {
                                    let t = rank_table(st, n, m, self.null_replicates, DEFAULT_RANK_TABLE_SEED)?;
                                    Ok(t.pvalue(st.eval(&ranks)) <= self.level)
                                })
                                .collect::<Result<_>>()?;
                            timing[k] += start.elapsed();
                        }
                    }
                }
            }
        }
        Ok((flags, timing))
    }
}

/// Runs every cell of `cfg`. Rows are ordered by alternative, test and
/// sample size, and depend only on the config (not on the thread count).
/// `seconds` is the compute time of the row's depth, shared evenly among
/// the rows using that depth.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let plan = plan(cfg)?;
    plan.prepare_tables()?;
    let na = plan.alternatives.len();
    let ns = plan.sizes.len();
    let nd = plan.depths.len();
    let nst = plan.stat_count();
    let counts = Mutex::new(vec![0usize; na * ns * nd * nst]);
    let times = Mutex::new(vec![Duration::ZERO; nd]);
    (0..plan.replicates).into_par_iter().try_for_each(|r| -> Result<()> {
        let (flags, timing) = plan.replicate(r)?;
        let mut c = counts.lock().unwrap_or_else(|e| e.into_inner());
        for a in 0..na {
            for s in 0..ns {
                for k in 0..nd {
                    for (st, &f) in flags[a][s][k].iter().enumerate() {
                        c[((a * nd + k) * nst + st) * ns + s] += f as usize;
                    }
                }
            }
        }
        drop(c);
        let mut t = times.lock().unwrap_or_else(|e| e.into_inner());
        for (acc, d) in t.iter_mut().zip(timing) {
            *acc += d;
        }
        Ok(())
    })?;
    let counts = counts.into_inner().unwrap_or_else(|e| e.into_inner());
    let times = times.into_inner().unwrap_or_else(|e| e.into_inner());
    let per_depth_rows = (na * ns * nst) as f64;
    let reps = plan.replicates as f64;
    let mut rows = Vec::with_capacity(counts.len());
    for a in 0..na {
        for k in 0..nd {
            for st in 0..nst {
                for (s, &n) in plan.sizes.iter().enumerate() {
                    let rate = counts[((a * nd + k) * nst + st) * ns + s] as f64 / reps;
                    rows.push(ExperimentRow {
                        alternative: plan.alternatives[a].0.clone(),
                        test: plan.test_id(k, st),
                        n,
                        rate,
                        se: (rate * (1.0 - rate) / reps).sqrt(),
                        seconds: times[k].as_secs_f64() / per_depth_rows,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Decision of a single replicate of one cell, computed on its own.
pub fn replicate_once(cfg: &ExperimentConfig, cell: Cell, replicate: usize) -> Result<bool> {
    let mut plan = plan(cfg)?;
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("cell {what} index out of range")))
        }
    };
    check(cell.alternative < plan.alternatives.len(), "alternative")?;
    check(cell.n < plan.sizes.len(), "sample size")?;
    check(cell.depth < plan.depths.len(), "depth")?;
    check(cell.stat < plan.stat_count(), "statistic")?;
    plan.alternatives.truncate(cell.alternative + 1);
    plan.alternatives.drain(..cell.alternative);
    let depth = plan.depths[cell.depth];
    plan.depths = vec![depth];
    let n = plan.sizes[cell.n];
    plan.sizes = vec![n];
    plan.stats = match plan.stats {
        Stats::One(s) => Stats::One(vec![s[cell.stat]]),
        Stats::Two(s) => Stats::Two(vec![s[cell.stat]]),
    };
    Ok(plan.replicate_cell(cell.alternative, replicate)?.0)
}

impl Plan {
    /// Single-cell replicate for a plan reduced to one alternative (originally
    /// at position `alt`), one size, one depth and one statistic.
    fn replicate_cell(&self, alt: usize, r: usize) -> Result<(bool, Duration)> {
        let start = Instant::now();
        let n = self.sizes[0];
        let sampler = &self.alternatives[0].1;
        let depth = self.depths[0];
        let flag = match &self.stats {
            Stats::One(stats) => {
                let w = self
                    .null
                    .sample(self.big_n, Seed(self.seed).derive_path(&[role::REFERENCE, r as u64]))?;
                let x = sampler.sample(n, self.data_seed(alt, n, r))?;
                let u = crate::depth::gn_transform(&x, &w, depth)?;
                let t = null_table(stats[0], n, self.null_replicates, DEFAULT_TABLE_SEED)?;
                t.rejects(stats[0].eval(&u), self.level)
            }
            Stats::Two(stats) => {
                let m = self.second_size(n);
                let seed = self.data_seed(alt, n, r);
                let x = self.null.sample(n, seed.derive(1))?;
                let y = sampler.sample(m, seed.derive(2))?;
                let (dx, dy) = joint_depths(&x, &y, depth)?;
                let ranks = ranks_from_depths(&dx, &dy, seed.derive(3).0)?;
                let t = rank_table(stats[0], n, m, self.null_replicates, DEFAULT_RANK_TABLE_SEED)?;
                t.pvalue(stats[0].eval(&ranks)) <= self.level
            }
        };
        Ok((flag, start.elapsed()))
    }
}

/// Writes rows as CSV with header `alternative,test,n,rate,se,seconds`.
/// With `omit_timing` the seconds column is written as 0, making the output
/// reproducible byte for byte.
pub fn write_rows<W: Write>(rows: &[ExperimentRow], omit_timing: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["alternative", "test", "n", "rate", "se", "seconds"])
        .map_err(err)?;
    for row in rows {
        let seconds = if omit_timing {
            "0".to_string()
        } else {
            format!("{:.3}", row.seconds)
        };
        w.write_record([
            row.alternative.clone(),
            row.test.clone(),
            row.n.to_string(),
            row.rate.to_string(),
            format!("{:.6}", row.se),
            seconds,
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "name": "smoke",
                "mode": "one_sample",
                "null": "mvnormal:d=2",
                "alternatives": [
                    {"id": "null", "spec": "mvnormal:d=2"},
                    {"id": "shift", "spec": "mvnormal:d=2,mu=[3,3]"}
                ],
                "sample_sizes": [10, 20],
                "reference_size": 200,
                "replicates": 6,
                "level": 0.05,
                "depths": ["halfspace"],
                "stats": ["ks", "cvm"],
                "seed": 5,
                "null_replicates": 1000
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn smoke_run_shapes_and_power() {
        let rows = run_experiment(&small()).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        assert_eq!(rows[0].alternative, "null");
        assert_eq!(rows[0].test, "tdKS");
        for r in rows.iter().filter(|r| r.alternative == "shift") {
            assert_eq!(r.rate, 1.0);
        }
        for r in &rows {
            assert!((r.se - (r.rate * (1.0 - r.rate) / 6.0).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn single_replicate_rates_are_binary() {
        let mut cfg = small();
        cfg.replicates = Some(1);
        for r in run_experiment(&cfg).unwrap() {
            assert!(r.rate == 0.0 || r.rate == 1.0);
        }
    }

    #[test]
    fn replicate_once_matches_batch() {
        let mut cfg = small();
        cfg.replicates = Some(1);
        let rows = run_experiment(&cfg).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let (a, rest) = (i / 4, i % 4);
            let cell = Cell {
                alternative: a,
                depth: 0,
                stat: rest / 2,
                n: rest % 2,
            };
            let once = replicate_once(&cfg, cell, 0).unwrap();
            assert_eq!(once, row.rate == 1.0, "{row:?}");
            assert_eq!(once, replicate_once(&cfg, cell, 0).unwrap());
        }
    }

    #[test]
    fn csv_output_is_reproducible() {
        let cfg = small();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_rows(&run_experiment(&cfg).unwrap(), true, &mut a).unwrap();
        write_rows(&run_experiment(&cfg).unwrap(), true, &mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with("alternative,test,n,rate,se,seconds\n"));
    }

    #[test]
    fn config_errors_name_the_field() {
        let mut cfg = small();
        cfg.alternatives.clear();
        let e = run_experiment(&cfg).unwrap_err().to_string();
        assert!(e.contains("alternatives"), "{e}");
        let mut cfg = small();
        cfg.alternatives[1].spec = "mvnormal:d=3".into();
        assert!(run_experiment(&cfg).unwrap_err().to_string().contains("alternatives[1]"));
        let mut cfg = small();
        cfg.depths = vec!["nope".into()];
        assert!(run_experiment(&cfg).unwrap_err().to_string().contains("depths"));
        let bad = small().to_json().replace("\"level\"", "\"lvl\"");
        assert!(ExperimentConfig::from_json(&bad).unwrap_err().to_string().contains("lvl"));
    }

    #[test]
    fn json_round_trip_and_profiles() {
        let mut cfg = small();
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        cfg.apply_profile(Profile::Paper);
        assert_eq!((cfg.replicates(), cfg.reference_size()), (1000, 5000));
        let two = r#"{"name":"t","mode":{"two_sample":{"m":20}},"null":"mvnormal:d=2",
            "alternatives":[{"id":"g","spec":"mvnormal:d=2,sigma=2I"}],"sample_sizes":[20],
            "replicates":4,"level":0.05,"depths":["halfspace"],"stats":["ks","ad"],"seed":1,
            "null_replicates":1000}"#;
        let cfg = ExperimentConfig::from_json(two).unwrap();
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.iter().map(|r| r.test.as_str()).collect::<Vec<_>>(), ["tdKS2", "tdAD2"]);
    }
}
