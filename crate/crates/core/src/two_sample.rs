//! Two-sample tests on the ranks of joint-sample depths.
//!
//! Both samples are pooled, every point gets its depth with respect to the
//! pooled sample, and the depth ranks (ties broken by a seeded shuffle) feed
//! two-sample KS, CvM and AD statistics. Under the null the rank split is
//! uniform, so the null distributions do not depend on the data.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::depth::{depth_profile, profiles, DepthKind};
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::seed::{role, Seed};

/// Largest number of splits [`exact_null_distribution`] will enumerate.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;
pub const DEFAULT_TABLE_REPLICATES: usize = 100_000;
pub const DEFAULT_PERMUTATIONS: usize = 10_000;
pub const DEFAULT_RANK_TABLE_SEED: u64 = 20_240_602;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TwoSampleStat {
    Ks,
    Cvm,
    Ad,
}

impl TwoSampleStat {
    pub const ALL: [TwoSampleStat; 3] = [TwoSampleStat::Ks, TwoSampleStat::Cvm, TwoSampleStat::Ad];

    pub fn label(&self) -> &'static str {
        match self {
            TwoSampleStat::Ks => "KS",
            TwoSampleStat::Cvm => "CvM",
            TwoSampleStat::Ad => "AD",
        }
    }

    fn code(&self) -> u64 {
        match self {
            TwoSampleStat::Ks => 101,
            TwoSampleStat::Cvm => 102,
            TwoSampleStat::Ad => 103,
        }
    }

    pub fn eval(&self, ranks: &DepthRanks) -> f64 {
        self.eval_pattern(&ranks.pattern(), ranks.n(), ranks.m())
    }

    /// Statistic of a split given as `is_x` flags in rank order.
    pub fn eval_pattern(&self, is_x: &[bool], n: usize, m: usize) -> f64 {
        match self {
            TwoSampleStat::Ks => ks_pattern(is_x, n, m),
            TwoSampleStat::Cvm => cvm_pattern(is_x, n, m),
            TwoSampleStat::Ad => ad_pattern(is_x, n, m),
        }
    }
}

impl fmt::Display for TwoSampleStat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwoSampleStat::Ks => "ks",
            TwoSampleStat::Cvm => "cvm",
            TwoSampleStat::Ad => "ad",
        })
    }
}

impl FromStr for TwoSampleStat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ks" => Ok(TwoSampleStat::Ks),
            "cvm" => Ok(TwoSampleStat::Cvm),
            "ad" => Ok(TwoSampleStat::Ad),
            other => Err(Error::Parse(format!("unknown two-sample statistic '{other}'"))),
        }
    }
}

/// Parses a comma-separated list such as `ks,cvm,ad`.
pub fn parse_two_sample_stats(s: &str) -> Result<Vec<TwoSampleStat>> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let stat: TwoSampleStat = part.parse()?;
        if !out.contains(&stat) {
            out.push(stat);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no statistics given".into()));
    }
    Ok(out)
}

/// Running `a_j m - b_j n` where `a_j`, `b_j` count X and Y ranks `<= j`.
#[inline]
fn gaps(is_x: &[bool], n: usize, m: usize) -> impl Iterator<Item = i64> + '_ {
    let (n, m) = (n as i64, m as i64);
    is_x.iter().scan(0i64, move |acc, &x| {
        *acc += if x { m } else { -n };
        Some(*acc)
    })
}

fn ks_pattern(is_x: &[bool], n: usize, m: usize) -> f64 {
    let max = gaps(is_x, n, m).map(i64::abs).max().unwrap_or(0);
    max as f64 / (n * m) as f64
}

fn cvm_pattern(is_x: &[bool], n: usize, m: usize) -> f64 {
    let sum: i128 = gaps(is_x, n, m).map(|g| (g as i128) * (g as i128)).sum();
    let big = (n + m) as f64;
    sum as f64 / ((n * m) as f64 * big * big)
}

fn ad_pattern(is_x: &[bool], n: usize, m: usize) -> f64 {
    let big = n + m;
    let mut sum = 0.0;
    for (j, g) in gaps(is_x, n, m).enumerate().take(big.saturating_sub(1)) {
        let j = j + 1;
        sum += (g as f64) * (g as f64) / (j * (big - j)) as f64;
    }
    sum / (n * m) as f64
}

/// Joint-sample depth ranks after tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthRanks {
    /// 1-based ranks of the X points, in X order.
    pub r1: Vec<usize>,
    /// 1-based ranks of the Y points, in Y order.
    pub r2: Vec<usize>,
    /// Depths of the X and Y points with respect to the joint sample.
    pub x_depths: Vec<f64>,
    pub y_depths: Vec<f64>,
    pub tie_seed: u64,
    /// Number of points sharing their depth with another point.
    pub tied: usize,
}

impl DepthRanks {
    pub fn n(&self) -> usize {
        self.r1.len()
    }

    pub fn m(&self) -> usize {
        self.r2.len()
    }

    /// `is_x` flags indexed by rank - 1.
    pub fn pattern(&self) -> Vec<bool> {
        let mut p = vec![false; self.n() + self.m()];
        for &r in &self.r1 {
            p[r - 1] = true;
        }
        p
    }
}

/// Ascending order of the joint depths and the tied blocks in that order.
struct JointOrder {
    order: Vec<usize>,
    blocks: Vec<(usize, usize)>,
}

impl JointOrder {
    fn new(depths: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..depths.len()).collect();
        order.sort_by(|&a, &b| depths[a].total_cmp(&depths[b]).then(a.cmp(&b)));
        let mut blocks = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && depths[order[end]] == depths[order[start]] {
                end += 1;
            }
            if end - start > 1 {
                blocks.push((start, end));
            }
            start = end;
        }
        JointOrder { order, blocks }
    }

    fn tied(&self) -> usize {
        self.blocks.iter().map(|(a, b)| b - a).sum()
    }

    /// Order with every tied block shuffled.
    fn broken<R: Rng>(&self, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(&self.order);
        for &(a, b) in &self.blocks {
            out[a..b].shuffle(rng);
        }
    }
}

/// Ranks of given joint depths, ties broken by a shuffle seeded with
/// `tie_seed`.
pub fn ranks_from_depths(x_depths: &[f64], y_depths: &[f64], tie_seed: u64) -> Result<DepthRanks> {
    if x_depths.is_empty() || y_depths.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = x_depths.len();
    let joint: Vec<f64> = x_depths.iter().chain(y_depths).copied().collect();
    let jo = JointOrder::new(&joint);
    let mut order = Vec::new();
    jo.broken(&mut Seed(tie_seed).derive(role::TIES).rng(), &mut order);
    let mut rank = vec![0; joint.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos + 1;
    }
    Ok(DepthRanks {
        r1: rank[..n].to_vec(),
        r2: rank[n..].to_vec(),
        x_depths: x_depths.to_vec(),
        y_depths: y_depths.to_vec(),
        tie_seed,
        tied: jo.tied(),
    })
}

/// Depths of every X and Y point with respect to the pooled sample.
pub fn joint_depths(x: &DataMatrix, y: &DataMatrix, kind: DepthKind) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = x.ncols();
    y.ensure_dim(d)?;
    let z = x.vstack(y)?;
    let kind = kind.for_dimension(d);
    let (_, depths) = profiles(&z, &z, kind, false)?;
    let (a, b) = depths.split_at(x.nrows());
    Ok((a.to_vec(), b.to_vec()))
}

pub fn joint_depth_ranks(
    x: &DataMatrix,
    y: &DataMatrix,
    kind: DepthKind,
    tie_seed: u64,
) -> Result<DepthRanks> {
    let (a, b) = joint_depths(x, y, kind)?;
    ranks_from_depths(&a, &b, tie_seed)
}

pub fn ks2_stat(ranks: &DepthRanks) -> f64 {
    TwoSampleStat::Ks.eval(ranks)
}

pub fn cvm2_stat(ranks: &DepthRanks) -> f64 {
    TwoSampleStat::Cvm.eval(ranks)
}

/// AD on the scale of the integral form: the rank sum over `j < N` with
/// weights `1 / (j (N - j))`, times `N^2`.
pub fn ad2_stat(ranks: &DepthRanks) -> f64 {
    TwoSampleStat::Ad.eval(ranks)
}

fn ecdf(sorted: &[f64], t: f64) -> f64 {
    sorted.partition_point(|&v| v <= t) as f64 / sorted.len() as f64
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// `max_i |F_n(Z_i) - G_m(Z_i)|` on the raw values.
pub fn ks2_ecdf(x: &[f64], y: &[f64]) -> f64 {
    let (sx, sy) = (sorted(x), sorted(y));
    x.iter()
        .chain(y)
        .map(|&z| (ecdf(&sx, z) - ecdf(&sy, z)).abs())
        .fold(0.0, f64::max)
}

/// `nm/N^2 sum_i (F_n(Z_i) - G_m(Z_i))^2` on the raw values.
pub fn cvm2_ecdf(x: &[f64], y: &[f64]) -> f64 {
    let (sx, sy) = (sorted(x), sorted(y));
    let (n, m) = (x.len() as f64, y.len() as f64);
    let big = n + m;
    let sum: f64 = x
        .iter()
        .chain(y)
        .map(|&z| (ecdf(&sx, z) - ecdf(&sy, z)).powi(2))
        .sum();
    n * m / (big * big) * sum
}

/// `nm/N^2 sum_i (F_n - G_m)^2 / (H_N (1 - H_N))` over the points with
/// `H_N(Z_i) < 1`.
pub fn ad2_ecdf(x: &[f64], y: &[f64]) -> f64 {
    let (sx, sy) = (sorted(x), sorted(y));
    let joint: Vec<f64> = x.iter().chain(y).copied().collect();
    let sz = sorted(&joint);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let big = n + m;
    let sum: f64 = joint
        .iter()
        .map(|&z| {
            let h = ecdf(&sz, z);
            if h >= 1.0 {
                0.0
            } else {
                (ecdf(&sx, z) - ecdf(&sy, z)).powi(2) / (h * (1.0 - h))
            }
        })
        .sum();
    n * m / (big * big) * sum
}

/// Sorted statistics of `b` uniform random splits of `n + m` ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub stat: TwoSampleStat,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    values: Vec<f64>,
}

impl RankTable {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(1 + #{t >= observed}) / (B + 1)`.
    pub fn pvalue(&self, observed: f64) -> f64 {
        let ge = self.values.len() - self.values.partition_point(|&t| t < observed);
        (1 + ge) as f64 / (self.values.len() + 1) as f64
    }
}

fn split_pattern<R: Rng>(rng: &mut R, n: usize, buf: &mut [bool]) {
    for (i, b) in buf.iter_mut().enumerate() {
        *b = i < n;
    }
    buf.shuffle(rng);
}

pub fn build_rank_table(
    stat: TwoSampleStat,
    n: usize,
    m: usize,
    b: usize,
    seed: u64,
) -> Result<RankTable> {
    if n == 0 || m == 0 {
        return Err(Error::EmptyData);
    }
    if b == 0 {
        return Err(Error::InvalidArgument("rank table needs at least 1 replicate".into()));
    }
    let base = Seed(seed).derive_path(&[role::NULL_TABLE, stat.code(), n as u64, m as u64]);
    let mut values: Vec<f64> = (0..b)
        .into_par_iter()
        .map_init(
            || vec![false; n + m],
            |buf, i| {
                split_pattern(&mut base.derive(i as u64).rng(), n, buf);
                stat.eval_pattern(buf, n, m)
            },
        )
        .collect();
    values.sort_by(|a, c| a.total_cmp(c));
    Ok(RankTable {
        stat,
        n,
        m,
        seed,
        values,
    })
}

type RankKey = (TwoSampleStat, usize, usize, usize, u64);
type RankCache = Mutex<HashMap<RankKey, Arc<OnceLock<Arc<RankTable>>>>>;

/// Memoized [`build_rank_table`].
pub fn rank_table(
    stat: TwoSampleStat,
    n: usize,
    m: usize,
    b: usize,
    seed: u64,
) -> Result<Arc<RankTable>> {
    static CACHE: OnceLock<RankCache> = OnceLock::new();
    let cell = {
        let mut map = CACHE
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        map.entry((stat, n, m, b, seed)).or_default().clone()
    };
    if let Some(t) = cell.get() {
        return Ok(t.clone());
    }
    let t = build_rank_table(stat, n, m, b, seed)?;
    Ok(cell.get_or_init(|| Arc::new(t)).clone())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return c;
        }
    }
    c
}

/// Every statistic value over all `C(n+m, n)` splits, in lexicographic
/// order of the X rank sets.
fn enumerate_splits(stat: TwoSampleStat, n: usize, m: usize) -> Result<Vec<f64>> {
    if n == 0 || m == 0 {
        return Err(Error::EmptyData);
    }
    let big = n + m;
    let count = binomial(big, n);
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut comb: Vec<usize> = (0..n).collect();
    let mut pattern = vec![false; big];
    loop {
        pattern.iter_mut().for_each(|p| *p = false);
        for &c in &comb {
            pattern[c] = true;
        }
        out.push(stat.eval_pattern(&pattern, n, m));
        let Some(i) = (0..n).rev().find(|&i| comb[i] < big - n + i) else {
            break;
        };
        comb[i] += 1;
        for k in i + 1..n {
            comb[k] = comb[k - 1] + 1;
        }
    }
    Ok(out)
}

/// Exact null distribution under uniform rank splits: distinct values with
/// their probabilities, ascending. Values closer than `1e-12` relative are
/// merged.
pub fn exact_null_distribution(stat: TwoSampleStat, n: usize, m: usize) -> Result<Vec<(f64, f64)>> {
    let mut all = enumerate_splits(stat, n, m)?;
    let total = all.len() as f64;
    all.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for v in all {
        match out.last_mut() {
            Some((u, p)) if (v - *u).abs() <= 1e-12 * v.abs().max(1.0) => *p += 1.0,
            _ => out.push((v, 1.0)),
        }
    }
    for (_, p) in out.iter_mut() {
        *p /= total;
    }
    Ok(out)
}

fn exact_pvalue(stat: TwoSampleStat, n: usize, m: usize, observed: f64) -> Result<f64> {
    let all = enumerate_splits(stat, n, m)?;
    let tol = 1e-12 * observed.abs().max(1.0);
    let ge = all.iter().filter(|&&t| t >= observed - tol).count();
    Ok(ge as f64 / all.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvalueMethod {
    /// Rank table, or permutations when depths were tied. `b` overrides the
    /// replicate count of whichever is chosen.
    Auto { b: Option<usize> },
    /// Random relabellings of the joint sample, re-breaking ties each time.
    Permutation { b: usize },
    ExactEnumeration,
    /// Statistics of uniform rank splits, shared by all data sets with the
    /// same `(n, m)`.
    RankTable { b: usize },
}

impl fmt::Display for PvalueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PvalueMethod::Auto { .. } => write!(f, "auto"),
            PvalueMethod::Permutation { b } => write!(f, "permutation(B={b})"),
            PvalueMethod::ExactEnumeration => write!(f, "exact"),
            PvalueMethod::RankTable { b } => write!(f, "table(B={b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleConfig {
    pub depth: DepthKind,
    pub stats: Vec<TwoSampleStat>,
    pub method: PvalueMethod,
    pub level: f64,
    /// Seeds tie-breaking and permutations.
    pub seed: u64,
    pub table_seed: u64,
}

impl Default for TwoSampleConfig {
    fn default() -> Self {
        TwoSampleConfig {
            depth: DepthKind::HALFSPACE,
            stats: TwoSampleStat::ALL.to_vec(),
            method: PvalueMethod::Auto { b: None },
            level: 0.05,
            seed: 0,
            table_seed: DEFAULT_RANK_TABLE_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleResult {
    pub stat: TwoSampleStat,
    pub observed: f64,
    pub pvalue: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleReport {
    pub results: Vec<TwoSampleResult>,
    /// The method actually used (never `Auto`).
    pub method: PvalueMethod,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub depth: String,
    pub level: f64,
    pub seed: u64,
    pub table_seed: u64,
    pub tied: usize,
}

impl TwoSampleReport {
    pub fn any_reject(&self) -> bool {
        self.results.iter().any(|r| r.reject)
    }

    pub fn get(&self, stat: TwoSampleStat) -> Option<&TwoSampleResult> {
        self.results.iter().find(|r| r.stat == stat)
    }

    pub fn to_key_value(&self) -> String {
        let mut s = format!(
            "n={}\nm={}\nd={}\ndepth={}\nlevel={}\nseed={}\nmethod={}\ntied={}\n",
            self.n, self.m, self.d, self.depth, self.level, self.seed, self.method, self.tied
        );
        for r in &self.results {
            let l = r.stat.label();
            s.push_str(&format!(
                "{l}.observed={}\n{l}.pvalue={}\n{l}.reject={}\n",
                r.observed, r.pvalue, r.reject
            ));
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "stat,observed,pvalue,reject")?;
        for r in &self.results {
            writeln!(out, "{},{},{},{}", r.stat, r.observed, r.pvalue, r.reject)?;
        }
        Ok(())
    }
}

/// Permutation p-values of all `stats` from one set of relabellings.
fn permutation_pvalues(
    x_depths: &[f64],
    y_depths: &[f64],
    stats: &[(TwoSampleStat, f64)],
    b: usize,
    seed: u64,
) -> Vec<f64> {
    let n = x_depths.len();
    let joint: Vec<f64> = x_depths.iter().chain(y_depths).copied().collect();
    let big = joint.len();
    let m = big - n;
    let jo = JointOrder::new(&joint);
    let base = Seed(seed).derive(role::PERMUTATION);
    let counts = (0..b)
        .into_par_iter()
        .map_init(
            || (vec![false; big], Vec::with_capacity(big), vec![false; big]),
            |(labels, order, pattern), i| {
                let mut rng = base.derive(i as u64).rng();
                split_pattern(&mut rng, n, labels);
                jo.broken(&mut rng, order);
                for (pos, &j) in order.iter().enumerate() {
                    pattern[pos] = labels[j];
                }
                stats
                    .iter()
                    .map(|&(s, obs)| (s.eval_pattern(pattern, n, m) >= obs) as usize)
                    .collect::<Vec<_>>()
            },
        )
        .reduce(
            || vec![0; stats.len()],
            |mut a, c| {
                a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
                a
            },
        );
    counts
        .into_iter()
        .map(|c| (1 + c) as f64 / (b + 1) as f64)
        .collect()
}

/// Test on precomputed joint depths.
pub fn two_sample_test_from_depths(
    x_depths: &[f64],
    y_depths: &[f64],
    cfg: &TwoSampleConfig,
) -> Result<TwoSampleReport> {
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level must lie in (0, 1) (got {})",
            cfg.level
        )));
    }
    if cfg.stats.is_empty() {
        return Err(Error::InvalidArgument("no statistics requested".into()));
    }
    let ranks = ranks_from_depths(x_depths, y_depths, cfg.seed)?;
    let (n, m) = (ranks.n(), ranks.m());
    let observed: Vec<(TwoSampleStat, f64)> =
        cfg.stats.iter().map(|&s| (s, s.eval(&ranks))).collect();
    let method = match cfg.method {
        PvalueMethod::Auto { b } if ranks.tied > 0 => PvalueMethod::Permutation {
            b: b.unwrap_or(DEFAULT_PERMUTATIONS),
        },
        PvalueMethod::Auto { b } => PvalueMethod::RankTable {
            b: b.unwrap_or(DEFAULT_TABLE_REPLICATES),
        },
        other => other,
    };
    let pvalues: Vec<f64> = match method {
        PvalueMethod::Permutation { b } => {
            if b == 0 {
                return Err(Error::InvalidArgument("need at least 1 permutation".into()));
            }
            permutation_pvalues(x_depths, y_depths, &observed, b, cfg.seed)
        }
        PvalueMethod::RankTable { b } => observed
            .iter()
            .map(|&(s, obs)| Ok(rank_table(s, n, m, b, cfg.table_seed)?.pvalue(obs)))
            .collect::<Result<_>>()?,
        PvalueMethod::ExactEnumeration => observed
            .iter()
            .map(|&(s, obs)| exact_pvalue(s, n, m, obs))
            .collect::<Result<_>>()?,
        PvalueMethod::Auto { .. } => unreachable!("resolved above"),
    };
    let results = observed
        .iter()
        .zip(pvalues)
        .map(|(&(stat, observed), pvalue)| TwoSampleResult {
            stat,
            observed,
            pvalue,
            reject: pvalue <= cfg.level,
        })
        .collect();
    Ok(TwoSampleReport {
        results,
        method,
        n,
        m,
        d: 0,
        depth: String::new(),
        level: cfg.level,
        seed: cfg.seed,
        table_seed: cfg.table_seed,
        tied: ranks.tied,
    })
}

pub fn two_sample_test(x: &DataMatrix, y: &DataMatrix, cfg: &TwoSampleConfig) -> Result<TwoSampleReport> {
    let d = x.ncols();
    let (a, b) = joint_depths(x, y, cfg.depth)?;
    let mut report = two_sample_test_from_depths(&a, &b, cfg)?;
    report.d = d;
    report.depth = cfg.depth.for_dimension(d).to_string();
    Ok(report)
}

/// One point of a depth-depth plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdPoint {
    pub depth_x: f64,
    pub depth_y: f64,
    /// `true` for points of the first sample.
    pub from_x: bool,
}

/// Depth of every pooled point with respect to each sample.
pub fn ddplot_points(x: &DataMatrix, y: &DataMatrix, kind: DepthKind) -> Result<Vec<DdPoint>> {
    let d = x.ncols();
    y.ensure_dim(d)?;
    let kind = kind.for_dimension(d);
    let z = x.vstack(y)?;
    let dx = depth_profile(&z, x, kind)?.values;
    let dy = depth_profile(&z, y, kind)?.values;
    Ok(dx
        .into_iter()
        .zip(dy)
        .enumerate()
        .map(|(i, (depth_x, depth_y))| DdPoint {
            depth_x,
            depth_y,
            from_x: i < x.nrows(),
        })
        .collect())
}

pub fn write_ddplot_csv<W: Write>(points: &[DdPoint], mut out: W) -> Result<()> {
    writeln!(out, "depth_x,depth_y,group")?;
    for p in points {
        writeln!(
            out,
            "{},{},{}",
            p.depth_x,
            p.depth_y,
            if p.from_x { "x" } else { "y" }
        )?;
    }
    Ok(())
}
