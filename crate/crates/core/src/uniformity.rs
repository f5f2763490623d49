//! Uniformity statistics on `[0, 1]` samples and their Monte Carlo null
//! distributions.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rayon::prelude::*;

use crate::depth::UnitSample;
use crate::error::{Error, Result};
use crate::seed::{role, Seed};

/// Environment variable naming a directory for persisted null tables.
pub const CACHE_DIR_ENV: &str = "DEPTHGOF_CACHE_DIR";
/// Smallest admissible null-table size.
pub const MIN_NULL_REPLICATES: usize = 1000;
/// Clamping constant for logarithms when no reference size is known.
pub const DEFAULT_LOG_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GreenwoodVariant {
    /// `(1/n) sum_{j=1}^n [n (G(j) - G(j-1))]^2` with `G(0) = 0`.
    PaperLiteral,
    /// `(n+1) sum` of all `n+1` squared spacings, including `1 - G(n)`.
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdForm {
    /// `-n - (1/n) sum (2j-1)[ln G(j) + ln(1 - G(n-j+1))]`.
    Classical,
    /// `-n - (1/n) sum (2j-1)[ln G(j) - ln G(n-j+1)]`, kept for audit only.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatKind {
    Ks,
    Cvm,
    Ad(AdForm),
    Greenwood(GreenwoodVariant),
}

impl StatKind {
    pub const KS: StatKind = StatKind::Ks;
    pub const CVM: StatKind = StatKind::Cvm;
    pub const AD: StatKind = StatKind::Ad(AdForm::Classical);
    pub const GREENWOOD: StatKind = StatKind::Greenwood(GreenwoodVariant::PaperLiteral);
    pub const ALL: [StatKind; 4] = [Self::KS, Self::CVM, Self::AD, Self::GREENWOOD];

    /// Suffix used in test identifiers such as `tdCvM`.
    pub fn label(&self) -> &'static str {
        match self {
            StatKind::Ks => "KS",
            StatKind::Cvm => "CvM",
            StatKind::Ad(AdForm::Classical) => "AD",
            StatKind::Ad(AdForm::Literal) => "ADlit",
            StatKind::Greenwood(GreenwoodVariant::PaperLiteral) => "GD",
            StatKind::Greenwood(GreenwoodVariant::Classical) => "GDc",
        }
    }

    fn code(&self) -> u64 {
        match self {
            StatKind::Ks => 1,
            StatKind::Cvm => 2,
            StatKind::Ad(AdForm::Classical) => 3,
            StatKind::Ad(AdForm::Literal) => 4,
            StatKind::Greenwood(GreenwoodVariant::PaperLiteral) => 5,
            StatKind::Greenwood(GreenwoodVariant::Classical) => 6,
        }
    }

    /// Statistic of an ascending sample, logs clamped into `[eps, 1 - eps]`.
    pub(crate) fn eval_sorted(&self, sorted: &[f64], eps: f64) -> f64 {
        match self {
            StatKind::Ks => ks_sorted(sorted),
            StatKind::Cvm => cvm_sorted(sorted),
            StatKind::Ad(form) => ad_sorted(sorted, eps, *form),
            StatKind::Greenwood(v) => greenwood_sorted(sorted, *v),
        }
    }

    pub fn eval(&self, u: &UnitSample) -> f64 {
        self.eval_sorted(&u.sorted(), log_eps(u))
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatKind::Ks => "ks",
            StatKind::Cvm => "cvm",
            StatKind::Ad(AdForm::Classical) => "ad",
            StatKind::Ad(AdForm::Literal) => "ad-literal",
            StatKind::Greenwood(GreenwoodVariant::PaperLiteral) => "gd",
            StatKind::Greenwood(GreenwoodVariant::Classical) => "gd-classical",
        })
    }
}

impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "ks" => StatKind::Ks,
            "cvm" => StatKind::Cvm,
            "ad" => StatKind::AD,
            "ad-literal" | "adlit" => StatKind::Ad(AdForm::Literal),
            "gd" | "greenwood" => StatKind::GREENWOOD,
            "gd-classical" | "gdc" | "greenwood-classical" => {
                StatKind::Greenwood(GreenwoodVariant::Classical)
            }
            other => return Err(Error::Parse(format!("unknown statistic '{other}'"))),
        })
    }
}

/// Parses a comma-separated statistic list such as `ks,cvm`.
pub fn parse_stats(s: &str) -> Result<Vec<StatKind>> {
    let stats = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<StatKind>>>()?;
    if stats.is_empty() {
        return Err(Error::Parse("empty statistic list".into()));
    }
    Ok(stats)
}

fn log_eps(u: &UnitSample) -> f64 {
    match u.reference_size() {
        Some(n) if n > 0 => 1.0 / (2.0 * n as f64),
        _ => DEFAULT_LOG_EPS,
    }
}

pub fn ks_stat(u: &UnitSample) -> f64 {
    ks_sorted(&u.sorted())
}

pub fn cvm_stat(u: &UnitSample) -> f64 {
    cvm_sorted(&u.sorted())
}

pub fn ad_stat(u: &UnitSample) -> f64 {
    ad_sorted(&u.sorted(), log_eps(u), AdForm::Classical)
}

/// The AD variant with `ln G(j) - ln G(n-j+1)` in the summand.
pub fn ad_stat_literal(u: &UnitSample) -> f64 {
    ad_sorted(&u.sorted(), log_eps(u), AdForm::Literal)
}

pub fn greenwood_stat(u: &UnitSample, variant: GreenwoodVariant) -> f64 {
    greenwood_sorted(&u.sorted(), variant)
}

fn ks_sorted(g: &[f64]) -> f64 {
    let n = g.len() as f64;
    g.iter()
        .enumerate()
        .map(|(j, &x)| ((j + 1) as f64 / n - x).max(x - j as f64 / n))
        .fold(0.0, f64::max)
}

fn cvm_sorted(g: &[f64]) -> f64 {
    let n = g.len() as f64;
    let s: f64 = g
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let e = (2 * j + 1) as f64 / (2.0 * n) - x;
            e * e
        })
        .sum();
    1.0 / (12.0 * n) + s
}

fn ad_sorted(g: &[f64], eps: f64, form: AdForm) -> f64 {
    let n = g.len();
    let c = |x: f64| x.clamp(eps, 1.0 - eps);
    let s: f64 = (0..n)
        .map(|j| {
            let lo = c(g[j]).ln();
            let hi = c(g[n - 1 - j]);
            let w = (2 * j + 1) as f64;
            match form {
                AdForm::Classical => w * (lo + (1.0 - hi).ln()),
                AdForm::Literal => w * (lo - hi.ln()),
            }
        })
        .sum();
    -(n as f64) - s / n as f64
}

fn greenwood_sorted(g: &[f64], variant: GreenwoodVariant) -> f64 {
    let n = g.len() as f64;
    let mut prev = 0.0;
    let mut s = 0.0;
    for &x in g {
        s += (x - prev) * (x - prev);
        prev = x;
    }
    match variant {
        GreenwoodVariant::PaperLiteral => n * s,
        GreenwoodVariant::Classical => {
            s += (1.0 - prev) * (1.0 - prev);
            (n + 1.0) * s
        }
    }
}

/// Sorted Monte Carlo null distribution of a statistic for iid `U[0,1]`
/// samples of size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullTable {
    pub stat: StatKind,
    pub n: usize,
    pub seed: u64,
    values: Vec<f64>,
}

impl NullTable {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn replicates(&self) -> usize {
        self.values.len()
    }

    /// `(1 + #{t >= observed}) / (B + 1)`.
    pub fn pvalue(&self, observed: f64) -> f64 {
        let ge = self.values.len() - self.values.partition_point(|&t| t < observed);
        (1 + ge) as f64 / (self.values.len() + 1) as f64
    }

    /// Smallest table value `c` such that `observed > c` exactly when the
    /// p-value is at most `level`; infinite if no observation can reach it.
    pub fn critical_value(&self, level: f64) -> f64 {
        let b = self.values.len();
        let k = (level * (b + 1) as f64).floor() as i64 - 1;
        if k < 0 {
            return f64::INFINITY;
        }
        let k = (k as usize).min(b - 1);
        self.values[b - 1 - k]
    }

    pub fn rejects(&self, observed: f64, level: f64) -> bool {
        observed > self.critical_value(level)
    }

    /// Writes the table as `#stat,n,B,seed` and a data comment line, then one
    /// value per line.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut s = String::with_capacity(self.values.len() * 20 + 64);
        s.push_str("#stat,n,B,seed\n");
        s.push_str(&format!(
            "#{},{},{},{}\n",
            self.stat,
            self.n,
            self.values.len(),
            self.seed
        ));
        for v in &self.values {
            s.push_str(&format!("{v}\n"));
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, s)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<NullTable> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let bad = || Error::Parse(format!("malformed null table {}", path.display()));
        if lines.next() != Some("#stat,n,B,seed") {
            return Err(bad());
        }
        let meta = lines.next().and_then(|l| l.strip_prefix('#')).ok_or_else(bad)?;
        let parts: Vec<&str> = meta.split(',').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let stat: StatKind = parts[0].parse()?;
        let n: usize = parts[1].parse().map_err(|_| bad())?;
        let b: usize = parts[2].parse().map_err(|_| bad())?;
        let seed: u64 = parts[3].parse().map_err(|_| bad())?;
        let values = lines
            .map(|l| l.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != b || values.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad());
        }
        Ok(NullTable { stat, n, seed, values })
    }
}

/// Simulates `b` statistics from iid uniform samples of size `n`. Each
/// replicate has its own derived seed, so the table does not depend on the
/// thread count.
pub fn mc_null_table(stat: StatKind, n: usize, b: usize, seed: u64) -> Result<NullTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    if b < MIN_NULL_REPLICATES {
        return Err(Error::InvalidArgument(format!(
            "null table needs at least {MIN_NULL_REPLICATES} replicates (got {b})"
        )));
    }
    let base = Seed(seed).derive_path(&[role::NULL_TABLE, stat.code(), n as u64]);
    let mut values: Vec<f64> = (0..b)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, i| {
                let mut rng = base.derive(i as u64).rng();
                buf.clear();
                buf.extend((0..n).map(|_| rng.gen::<f64>()));
                buf.sort_by(|a, c| a.total_cmp(c));
                stat.eval_sorted(buf, DEFAULT_LOG_EPS)
            },
        )
        .collect();
    values.sort_by(|a, c| a.total_cmp(c));
    Ok(NullTable {
        stat,
        n,
        seed,
        values,
    })
}

/// `(1 + #{t >= observed}) / (B + 1)`.
pub fn mc_pvalue(table: &NullTable, observed: f64) -> f64 {
    table.pvalue(observed)
}

type TableKey = (StatKind, usize, usize, u64);
type TableCache = Mutex<HashMap<TableKey, Arc<OnceLock<Arc<NullTable>>>>>;

fn memo() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn disk_path(key: &TableKey) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_DIR_ENV)?;
    let (stat, n, b, seed) = key;
    Some(PathBuf::from(dir).join(format!("{stat}_{n}_{b}_{seed}.csv")))
}

/// Memoized [`mc_null_table`]: built once per `(stat, n, B, seed)` per
/// process, and persisted under `$DEPTHGOF_CACHE_DIR` when that is set.
pub fn null_table(stat: StatKind, n: usize, b: usize, seed: u64) -> Result<Arc<NullTable>> {
    let key = (stat, n, b, seed);
    let cell = {
        let mut map = memo().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_default().clone()
    };
    if let Some(t) = cell.get() {
        return Ok(t.clone());
    }
    let path = disk_path(&key);
    let table = match path.as_deref().map(NullTable::read_from) {
        Some(Ok(t)) if t.stat == stat && t.n == n && t.replicates() == b && t.seed == seed => t,
        _ => {
            let t = mc_null_table(stat, n, b, seed)?;
            if let Some(p) = &path {
                if let Some(dir) = p.parent() {
                    let _ = std::fs::create_dir_all(dir);
                }
                let _ = t.write_to(p);
            }
            t
        }
    };
    Ok(cell.get_or_init(|| Arc::new(table)).clone())
}
