//! Tukey half-space depth.
//!
//! Depths are handled internally as integer counts: the depth of `x` is the
//! smallest number of reference points in a closed half-space containing `x`,
//! and the public functions divide by `N` at the very end.

use rand::Rng;
use rand_distr::StandardNormal;

use super::sort::{ordered_key, sort_keys, sort_pairs};
use crate::error::{Error, Result};
use crate::matrix::{check_point, DataMatrix};
use crate::seed::Seed;

/// `min(#{W <= x}, #{W >= x}) / N` for a one-dimensional reference.
pub fn halfspace_depth_1d(x: f64, reference: &DataMatrix) -> Result<f64> {
    reference.ensure_dim(1)?;
    check_point(&[x], 1)?;
    let n = reference.nrows();
    Ok(count_1d(x, reference.as_slice()) as f64 / n as f64)
}

fn count_1d(x: f64, values: &[f64]) -> usize {
    let (mut le, mut ge) = (0, 0);
    for &w in values {
        le += (w <= x) as usize;
        ge += (w >= x) as usize;
    }
    le.min(ge)
}

/// Sorted reference for repeated one-dimensional queries.
pub(crate) struct Sorted1d {
    values: Vec<f64>,
}

impl Sorted1d {
    pub(crate) fn new(reference: &DataMatrix) -> Self {
        let mut values = reference.as_slice().to_vec();
        values.sort_by(|a, b| a.total_cmp(b));
        Sorted1d { values }
    }

    pub(crate) fn count(&self, x: f64) -> usize {
        let n = self.values.len();
        let lt = self.values.partition_point(|&w| w < x);
        let le = self.values.partition_point(|&w| w <= x);
        le.min(n - lt)
    }
}

/// Exact empirical half-space depth of a point in the plane.
pub fn halfspace_depth_2d_exact(x: &[f64], reference: &DataMatrix) -> Result<f64> {
    reference.ensure_dim(2)?;
    check_point(x, 2)?;
    let mut sweep = AngularSweep::default();
    Ok(sweep.count(x, reference) as f64 / reference.nrows() as f64)
}

const LOWER: u64 = 1 << 63;

/// Sort key of a nonzero direction `(vx, vy)`: the top bit marks the lower
/// half-plane, the rest is a pseudo-angle in `[0, 2)` of the direction folded
/// into the upper half-plane, monotone in the true angle. Opposite directions
/// get the same pseudo-angle bit for bit.
#[inline]
fn direction_key(vx: f64, vy: f64) -> u64 {
    let lower = vy < 0.0 || (vy == 0.0 && vx < 0.0);
    let (a, b) = if lower { (-vx, -vy) } else { (vx, vy) };
    let num = if a >= 0.0 { b } else { -a };
    let t = num / (a.abs() + b) + if a >= 0.0 { 0.0 } else { 1.0 };
    (t + 0.0).to_bits() | if lower { LOWER } else { 0 }
}

/// Reusable buffers for the angular sweep around one query point.
#[derive(Default)]
pub(crate) struct AngularSweep {
    keys: Vec<u64>,
}

impl AngularSweep {
    /// Depth count of `x`: `N` minus the largest number of reference points
    /// inside an open half-plane whose boundary passes through `x`.
    pub(crate) fn count(&mut self, x: &[f64], reference: &DataMatrix) -> usize {
        let n = reference.nrows();
        self.keys.clear();
        let (x0, x1) = (x[0], x[1]);
        for w in reference.rows() {
            let vx = w[0] - x0;
            let vy = w[1] - x1;
            if vx != 0.0 || vy != 0.0 {
                self.keys.push(direction_key(vx, vy));
            }
        }
        let m = self.keys.len();
        if m == 0 {
            return n;
        }
        self.keys.sort_unstable();

        let keys = &self.keys;
        let at = |k: usize| keys[if k >= m { k - m } else { k }];
        let mut best = 0;
        let mut end = 0;
        for (j, &kj) in keys.iter().enumerate() {
            let (hj, tj) = (kj & LOWER, kj & !LOWER);
            end = end.max(j + 1);
            while end < j + m {
                let kk = at(end);
                let tk = kk & !LOWER;
                let inside = if kk & LOWER == hj { tk >= tj } else { tk < tj };
                if !inside {
                    break;
                }
                end += 1;
            }
            best = best.max(end - j);
            if best == m {
                break;
            }
        }
        n - best
    }
}

/// Axis-aligned directions `±e_k` followed by `m` seeded uniform directions
/// on the sphere (normalised Gaussian vectors).
#[derive(Debug, Clone)]
pub struct DirectionSet {
    dim: usize,
    dirs: Vec<f64>,
}

impl DirectionSet {
    pub fn new(dim: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDepth("direction count must be at least 1".into()));
        }
        let mut dirs = Vec::with_capacity((2 * dim + m) * dim);
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                dirs.extend((0..dim).map(|c| if c == k { sign } else { 0.0 }));
            }
        }
        let mut rng = Seed(seed).rng();
        let mut buf = vec![0.0; dim];
        for _ in 0..m {
            loop {
                for b in buf.iter_mut() {
                    *b = rng.sample(StandardNormal);
                }
                let norm = buf.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    dirs.extend(buf.iter().map(|v| v / norm));
                    break;
                }
            }
        }
        Ok(DirectionSet { dim, dirs })
    }

    pub fn len(&self) -> usize {
        self.dirs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.dirs[k * self.dim..(k + 1) * self.dim]
    }
}

#[inline]
fn dot(u: &[f64], x: &[f64]) -> f64 {
    u.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Approximate half-space depth: the minimum closed-half-space count over a
/// finite direction set. Never smaller than the exact depth.
pub fn halfspace_depth_approx(
    x: &[f64],
    reference: &DataMatrix,
    directions: usize,
    seed: u64,
) -> Result<f64> {
    check_point(x, reference.ncols())?;
    let dirs = DirectionSet::new(reference.ncols(), directions, seed)?;
    let queries = DataMatrix::from_row_major(x.to_vec(), 1, x.len())?;
    let counts = approx_counts(reference, &dirs, false, &queries);
    Ok(counts.queries[0] as f64 / reference.nrows() as f64)
}

pub(crate) struct ApproxCounts {
    pub(crate) reference: Vec<usize>,
    pub(crate) queries: Vec<usize>,
}

/// Depth counts over `dirs` for the query rows and, optionally, for every
/// reference row with respect to the reference itself. Streams one direction
/// at a time: the reference projections are sorted once per direction and
/// shared by all queries.
pub(crate) fn approx_counts(
    reference: &DataMatrix,
    dirs: &DirectionSet,
    with_reference: bool,
    queries: &DataMatrix,
) -> ApproxCounts {
    let n = reference.nrows();
    let nq = queries.nrows();
    let mut ref_counts = if with_reference { vec![n; n] } else { Vec::new() };
    let mut q_counts = vec![n; nq];
    let mut keys = Vec::with_capacity(n);
    let mut idx: Vec<u32> = Vec::with_capacity(n);
    let (mut sk, mut si) = (Vec::new(), Vec::new());
    for k in 0..dirs.len() {
        let u = dirs.direction(k);
        keys.clear();
        keys.extend(reference.rows().map(|w| ordered_key(dot(u, w))));
        if with_reference {
            idx.clear();
            idx.extend(0..n as u32);
            sort_pairs(&mut keys, &mut idx, &mut sk, &mut si);
            let mut first = 0;
            for pos in 0..n {
                if keys[pos] != keys[first] {
                    first = pos;
                }
                let c = &mut ref_counts[idx[pos] as usize];
                *c = (*c).min(n - first);
            }
        } else {
            sort_keys(&mut keys, &mut sk);
        }
        for (q, c) in queries.rows().zip(q_counts.iter_mut()) {
            let key = ordered_key(dot(u, q));
            let lt = keys.partition_point(|&w| w < key);
            *c = (*c).min(n - lt);
        }
    }
    ApproxCounts {
        reference: ref_counts,
        queries: q_counts,
    }
}
