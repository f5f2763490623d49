//! Half-space and zonoid depth, batch profiles and the `G_N` transform.

mod halfspace;
pub(crate) mod sort;
mod zonoid;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

pub use halfspace::{
    halfspace_depth_1d, halfspace_depth_2d_exact, halfspace_depth_approx, DirectionSet,
};
pub use zonoid::{zonoid_depth, FEASIBILITY_TOL};

use halfspace::{approx_counts, AngularSweep, Sorted1d};
use zonoid::ZonoidLp;

/// Direction count used when exact half-space depth is unavailable (d > 2).
pub const DEFAULT_DIRECTIONS: usize = 10_000;
/// Seed of the default direction set.
pub const DEFAULT_DIRECTION_SEED: u64 = 0x5eed_d1ec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepthFamily {
    Halfspace,
    Zonoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Exact,
    Approximate { directions: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DepthKind {
    pub family: DepthFamily,
    pub strategy: Strategy,
}

impl DepthKind {
    pub const HALFSPACE: DepthKind = DepthKind {
        family: DepthFamily::Halfspace,
        strategy: Strategy::Exact,
    };
    pub const ZONOID: DepthKind = DepthKind {
        family: DepthFamily::Zonoid,
        strategy: Strategy::Exact,
    };

    pub fn halfspace_approx(directions: usize, seed: u64) -> DepthKind {
        DepthKind {
            family: DepthFamily::Halfspace,
            strategy: Strategy::Approximate { directions, seed },
        }
    }

    /// Checks the kind is usable in dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        match (self.family, self.strategy) {
            (DepthFamily::Halfspace, Strategy::Exact) if d > 2 => Err(Error::InvalidDepth(format!(
                "exact half-space depth is only available for d <= 2 (got d={d})"
            ))),
            (DepthFamily::Zonoid, Strategy::Approximate { .. }) => Err(Error::InvalidDepth(
                "zonoid depth has no approximate strategy".into(),
            )),
            (_, Strategy::Approximate { directions: 0, .. }) => Err(Error::InvalidDepth(
                "direction count must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Replaces exact half-space depth by the default direction set when
    /// `d > 2`; otherwise returns `self`.
    pub fn for_dimension(self, d: usize) -> DepthKind {
        match (self.family, self.strategy) {
            (DepthFamily::Halfspace, Strategy::Exact) if d > 2 => {
                DepthKind::halfspace_approx(DEFAULT_DIRECTIONS, DEFAULT_DIRECTION_SEED)
            }
            _ => self,
        }
    }

    /// Short prefix used in test identifiers (`td`, `zd`).
    pub fn label(&self) -> &'static str {
        match self.family {
            DepthFamily::Halfspace => "td",
            DepthFamily::Zonoid => "zd",
        }
    }
}

impl fmt::Display for DepthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.family, self.strategy) {
            (DepthFamily::Halfspace, Strategy::Exact) => write!(f, "halfspace"),
            (DepthFamily::Halfspace, Strategy::Approximate { directions, seed }) => {
                if seed == DEFAULT_DIRECTION_SEED {
                    write!(f, "halfspace-approx={directions}")
                } else {
                    write!(f, "halfspace-approx={directions}@{seed}")
                }
            }
            (DepthFamily::Zonoid, _) => write!(f, "zonoid"),
        }
    }
}

impl FromStr for DepthKind {
    type Err = Error;

    /// Accepts `halfspace`, `zonoid` and `halfspace-approx=M[@seed]`
    /// (`tukey`/`td` and `zd` are aliases).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "halfspace" | "tukey" | "td" => return Ok(DepthKind::HALFSPACE),
            "zonoid" | "zd" => return Ok(DepthKind::ZONOID),
            _ => {}
        }
        let rest = s
            .strip_prefix("halfspace-approx")
            .ok_or_else(|| Error::InvalidDepth(format!("unknown depth '{s}'")))?;
        if rest.is_empty() {
            return Ok(DepthKind::halfspace_approx(DEFAULT_DIRECTIONS, DEFAULT_DIRECTION_SEED));
        }
        let rest = rest
            .strip_prefix('=')
            .ok_or_else(|| Error::InvalidDepth(format!("unknown depth '{s}'")))?;
        let (m, seed) = match rest.split_once('@') {
            Some((m, seed)) => (m, seed.parse::<u64>().ok()),
            None => (rest, Some(DEFAULT_DIRECTION_SEED)),
        };
        match (m.parse::<usize>(), seed) {
            (Ok(m), Some(seed)) if m >= 1 => Ok(DepthKind::halfspace_approx(m, seed)),
            _ => Err(Error::InvalidDepth(format!("bad direction count in '{s}'"))),
        }
    }
}

/// Depth values, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthVector {
    pub values: Vec<f64>,
}

impl DepthVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Single-column CSV with header `depth`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "depth")?;
        for v in &self.values {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }
}

/// A sample of values in `[0, 1]` fed to the uniformity statistics.
///
/// `reference_size` records `N` when the values came from the `G_N`
/// transform, which fixes the log-clamping constant of the AD statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSample {
    values: Vec<f64>,
    reference_size: Option<usize>,
}

impl UnitSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutsideUnitInterval { index, value });
        }
        Ok(UnitSample {
            values,
            reference_size: None,
        })
    }

    pub fn with_reference_size(mut self, n: usize) -> Self {
        self.reference_size = Some(n);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn reference_size(&self) -> Option<usize> {
        self.reference_size
    }

    /// Values sorted ascending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }
}

/// Depth of every row of `points` with respect to `reference`.
pub fn depth_profile(
    points: &DataMatrix,
    reference: &DataMatrix,
    kind: DepthKind,
) -> Result<DepthVector> {
    let (_, q) = profiles(reference, points, kind, false)?;
    Ok(DepthVector { values: q })
}

/// `G_N(X_j) = (1/N) #{i : D_N(W_i) <= D_N(X_j)}` for every row of `x`.
pub fn gn_transform(x: &DataMatrix, w: &DataMatrix, kind: DepthKind) -> Result<UnitSample> {
    let (mut wd, xd) = profiles(w, x, kind, true)?;
    Ok(gn_from_depths(&mut wd, &xd))
}

pub(crate) fn gn_from_depths(reference_depths: &mut [f64], query_depths: &[f64]) -> UnitSample {
    let n = reference_depths.len();
    reference_depths.sort_by(|a, b| a.total_cmp(b));
    let values = query_depths
        .iter()
        .map(|&d| reference_depths.partition_point(|&r| r <= d) as f64 / n as f64)
        .collect();
    UnitSample {
        values,
        reference_size: Some(n),
    }
}

/// [`gn_transform`] of several samples against one reference, computing the
/// reference depths once.
pub fn gn_transform_many(
    xs: &[&DataMatrix],
    w: &DataMatrix,
    kind: DepthKind,
) -> Result<Vec<UnitSample>> {
    let Some((first, rest)) = xs.split_first() else {
        return Ok(Vec::new());
    };
    let mut stacked = (*first).clone();
    for x in rest {
        stacked = stacked.vstack(x)?;
    }
    let (mut wd, xd) = profiles(w, &stacked, kind, true)?;
    wd.sort_by(|a, b| a.total_cmp(b));
    let mut out = Vec::with_capacity(xs.len());
    let mut start = 0;
    for x in xs {
        let end = start + x.nrows();
        out.push(gn_from_depths(&mut wd, &xd[start..end]));
        start = end;
    }
    Ok(out)
}

/// Depths of the reference rows (when `with_reference`) and of the query rows,
/// all with respect to the reference.
pub(crate) fn profiles(
    reference: &DataMatrix,
    queries: &DataMatrix,
    kind: DepthKind,
    with_reference: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = reference.ncols();
    queries.ensure_dim(d)?;
    kind.validate(d)?;
    let n = reference.nrows() as f64;
    let scale = |c: usize| c as f64 / n;

    match (kind.family, kind.strategy) {
        (DepthFamily::Halfspace, Strategy::Approximate { directions, seed }) => {
            let dirs = DirectionSet::new(d, directions, seed)?;
            let counts = approx_counts(reference, &dirs, with_reference, queries);
            Ok((
                counts.reference.into_iter().map(scale).collect(),
                counts.queries.into_iter().map(scale).collect(),
            ))
        }
        (DepthFamily::Halfspace, Strategy::Exact) if d == 1 => {
            let sorted = Sorted1d::new(reference);
            let eval = |m: &DataMatrix| -> Vec<f64> {
                m.as_slice().iter().map(|&x| scale(sorted.count(x))).collect()
            };
            let r = if with_reference { eval(reference) } else { Vec::new() };
            Ok((r, eval(queries)))
        }
        (DepthFamily::Halfspace, Strategy::Exact) => {
            let eval = |m: &DataMatrix| -> Vec<f64> {
                (0..m.nrows())
                    .into_par_iter()
                    .map_init(AngularSweep::default, |sweep, i| {
                        scale(sweep.count(m.row(i), reference))
                    })
                    .collect()
            };
            let r = if with_reference { eval(reference) } else { Vec::new() };
            Ok((r, eval(queries)))
        }
        (DepthFamily::Zonoid, _) => {
            let eval = |m: &DataMatrix| -> Result<Vec<f64>> {
                let order = spatial_order(m);
                let chunks: Vec<Vec<(usize, f64)>> = order
                    .par_chunks(ZONOID_CHUNK)
                    .map_init(
                        || ZonoidLp::new(reference),
                        |lp, chunk| {
                            lp.reset();
                            chunk
                                .iter()
                                .map(|&i| lp.depth(m.row(i)).map(|v| (i, v)))
                                .collect::<Result<Vec<_>>>()
                        },
                    )
                    .collect::<Result<_>>()?;
                let mut out = vec![0.0; m.nrows()];
                for (i, v) in chunks.into_iter().flatten() {
                    out[i] = v;
                }
                Ok(out)
            };
            let r = if with_reference { eval(reference)? } else { Vec::new() };
            Ok((r, eval(queries)?))
        }
    }
}

/// Queries per warm-started zonoid batch. Each batch starts cold, so results
/// do not depend on how batches are spread over threads.
const ZONOID_CHUNK: usize = 64;

/// Row indices in Morton (Z-curve) order, so that consecutive rows tend to
/// be close in space.
fn spatial_order(m: &DataMatrix) -> Vec<usize> {
    let d = m.ncols();
    let bits = (64 / d).min(21) as u32;
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in m.rows() {
        for k in 0..d {
            lo[k] = lo[k].min(row[k]);
            hi[k] = hi[k].max(row[k]);
        }
    }
    let levels = ((1u64 << bits) - 1) as f64;
    let mut keyed: Vec<(u64, usize)> = m
        .rows()
        .enumerate()
        .map(|(i, row)| {
            let mut key = 0u64;
            let cells: Vec<u64> = (0..d)
                .map(|k| {
                    let span = hi[k] - lo[k];
                    if span > 0.0 {
                        ((row[k] - lo[k]) / span * levels) as u64
                    } else {
                        0
                    }
                })
                .collect();
            for b in (0..bits).rev() {
                for c in &cells {
                    key = (key << 1) | ((c >> b) & 1);
                }
            }
            (key, i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}
