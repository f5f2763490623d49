//! Empirical zonoid depth by linear programming.
//!
//! The depth of `y` with respect to `W_1..W_N` is `1 / (N t*)` where
//!
//! ```text
//! t* = min t   s.t.  sum l_i W_i = y,  sum l_i = 1,  0 <= l_i <= t.
//! ```
//!
//! Substituting `l_i = t m_i` gives the equivalent bounded program
//!
//! ```text
//! max sum m_i   s.t.  sum m_i (W_i - y) = 0,  0 <= m_i <= 1,
//! ```
//!
//! whose optimum is `N * depth`. It has only `d` rows, so it is solved by a
//! dual simplex over a `d x d` basis with bound flipping: nonbasic columns sit
//! at whichever bound their reduced cost prefers, and each iteration performs
//! an exact line search along the released constraint. Points outside the
//! convex hull yield `m = 0` and depth 0; no phase one is needed because
//! `m = 0` is always feasible.

use crate::error::{Error, Result};
use crate::matrix::{check_point, DataMatrix};

/// Feasibility tolerance on the multipliers.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const DEGENERATE_BEFORE_BLAND: usize = 25;

/// Zonoid depth of `y` with respect to `reference`.
pub fn zonoid_depth(y: &[f64], reference: &DataMatrix) -> Result<f64> {
    check_point(y, reference.ncols())?;
    ZonoidLp::new(reference).depth(y)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    /// Strictly inside the hinge: `m_i = 1`.
    Below,
    /// `m_i = 0`.
    Above,
    Tight,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Basic {
    /// Coordinate constraint on the multiplier vector; starts basic and never
    /// re-enters once released.
    Art(usize),
    Data(usize),
}

impl Basic {
    fn order(self, d: usize) -> usize {
        match self {
            Basic::Art(k) => k,
            Basic::Data(i) => d + i,
        }
    }
}

/// Solver state reused across queries against one reference sample.
///
/// After a solve whose final basis consists of data points only, that basis
/// seeds the next solve, which pays off when consecutive queries are close.
pub(crate) struct ZonoidLp<'a> {
    reference: &'a DataMatrix,
    side: Vec<Side>,
    candidates: Vec<(f64, f64, u32)>,
    warm: Vec<usize>,
}

fn cmp_candidates(a: &(f64, f64, u32), b: &(f64, f64, u32)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.2.cmp(&b.2))
}

impl<'a> ZonoidLp<'a> {
    pub(crate) fn new(reference: &'a DataMatrix) -> Self {
        let n = reference.nrows();
        ZonoidLp {
            reference,
            side: vec![Side::Below; n],
            candidates: Vec::with_capacity(n),
            warm: Vec::new(),
        }
    }

    /// Forgets the warm-start basis.
    pub(crate) fn reset(&mut self) {
        self.warm.clear();
    }

    /// Tight data basis from the previous solve, with `pi` solving
    /// `pi . (W_q - y) = 1` on it; `None` if unusable for this `y`.
    fn warm_start(&self, y: &[f64], bmat: &mut [f64], binv: &mut [f64]) -> Option<Vec<f64>> {
        let d = y.len();
        if self.warm.len() != d {
            return None;
        }
        for (c, &q) in self.warm.iter().enumerate() {
            let row = self.reference.row(q);
            for r in 0..d {
                bmat[r * d + c] = row[r] - y[r];
            }
        }
        invert(bmat, binv, d).ok()?;
        Some((0..d).map(|k| (0..d).map(|r| binv[r * d + k]).sum()).collect())
    }

    pub(crate) fn depth(&mut self, y: &[f64]) -> Result<f64> {
        let w = self.reference;
        let n = w.nrows();
        let d = w.ncols();

        let mut scale: f64 = 0.0;
        for row in w.rows() {
            for (a, b) in row.iter().zip(y) {
                scale = scale.max((a - b).abs());
            }
        }
        if scale == 0.0 {
            return Ok(1.0);
        }
        let art_tol = FEASIBILITY_TOL * scale;

        let mut bmat = vec![0.0; d * d];
        let mut binv = vec![0.0; d * d];
        let mut s = vec![0.0; d];
        let mut mu = vec![0.0; d];
        let mut delta = vec![0.0; d];

        let (mut pi, mut basis) = match self.warm_start(y, &mut bmat, &mut binv) {
            Some(pi) => {
                let pi_y: f64 = pi.iter().zip(y).map(|(a, b)| a * b).sum();
                for (row, side) in w.rows().zip(self.side.iter_mut()) {
                    let pw: f64 = pi.iter().zip(row).map(|(a, b)| a * b).sum();
                    *side = if 1.0 - (pw - pi_y) >= 0.0 {
                        Side::Below
                    } else {
                        Side::Above
                    };
                }
                let basis: Vec<Basic> = self.warm.iter().map(|&q| Basic::Data(q)).collect();
                for &q in &self.warm {
                    self.side[q] = Side::Tight;
                }
                (pi, basis)
            }
            None => {
                self.side.iter_mut().for_each(|s| *s = Side::Below);
                (vec![0.0; d], (0..d).map(Basic::Art).collect())
            }
        };

        let mut degenerate_run = 0;
        let max_iter = 50 * (n + d) + 1000;

        for _ in 0..max_iter {
            // Sum of v_i = W_i - y over points at their upper bound.
            s.iter_mut().for_each(|v| *v = 0.0);
            let mut below = 0usize;
            for (row, side) in w.rows().zip(&self.side) {
                if *side == Side::Below {
                    below += 1;
                    for k in 0..d {
                        s[k] += row[k];
                    }
                }
            }
            for k in 0..d {
                s[k] -= below as f64 * y[k];
            }

            for (c, b) in basis.iter().enumerate() {
                for r in 0..d {
                    bmat[r * d + c] = match *b {
                        Basic::Art(k) => (r == k) as u8 as f64,
                        Basic::Data(i) => w.row(i)[r] - y[r],
                    };
                }
            }
            invert(&bmat, &mut binv, d)?;

            // Basic multipliers solve B mu = -s.
            for r in 0..d {
                mu[r] = -(0..d).map(|c| binv[r * d + c] * s[c]).sum::<f64>();
            }

            // Leaving variable: largest violation, or smallest index once a
            // run of degenerate steps suggests cycling.
            let bland = degenerate_run >= DEGENERATE_BEFORE_BLAND;
            let mut leave: Option<(usize, f64)> = None;
            for (pos, b) in basis.iter().enumerate() {
                let violation = match *b {
                    Basic::Art(_) => (mu[pos].abs() - art_tol).max(0.0) / scale,
                    Basic::Data(_) => {
                        (-mu[pos] - FEASIBILITY_TOL).max(mu[pos] - 1.0 - FEASIBILITY_TOL)
                    }
                };
                if violation <= 0.0 {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((p, v)) => {
                        if bland {
                            b.order(d) < basis[p].order(d)
                        } else {
                            violation > v
                        }
                    }
                };
                if better {
                    leave = Some((pos, violation));
                }
            }
            let Some((r, _)) = leave else {
                let mut tight = 0.0;
                self.warm.clear();
                for (b, m) in basis.iter().zip(&mu) {
                    if let Basic::Data(q) = *b {
                        tight += m.clamp(0.0, 1.0);
                        self.warm.push(q);
                    }
                }
                return Ok(((below as f64 + tight) / n as f64).clamp(0.0, 1.0));
            };

            // Direction in dual space: orthogonal to the other basic columns,
            // moving the leaving constraint to the side that reduces the
            // objective.
            let (sigma, slope0) = match basis[r] {
                Basic::Art(_) => (-mu[r].signum(), -mu[r].abs()),
                Basic::Data(_) => {
                    if mu[r] > 1.0 {
                        (-1.0, 1.0 - mu[r])
                    } else {
                        (1.0, mu[r])
                    }
                }
            };
            for k in 0..d {
                delta[k] = sigma * binv[r * d + k];
            }

            let pi_y: f64 = pi.iter().zip(y).map(|(a, b)| a * b).sum();
            let delta_y: f64 = delta.iter().zip(y).map(|(a, b)| a * b).sum();
            let delta_norm = delta.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let g_tol = 1e-12 * delta_norm * scale;
            self.candidates.clear();
            for (i, row) in w.rows().enumerate() {
                let side = self.side[i];
                if side == Side::Tight {
                    continue;
                }
                let mut pw = 0.0;
                let mut dw = 0.0;
                for k in 0..d {
                    pw += pi[k] * row[k];
                    dw += delta[k] * row[k];
                }
                let slack = 1.0 - (pw - pi_y);
                let g = dw - delta_y;
                let theta = match side {
                    Side::Below if g > g_tol => slack.max(0.0) / g,
                    Side::Above if g < -g_tol => slack.min(0.0) / g,
                    _ => continue,
                };
                self.candidates.push((theta, g.abs(), i as u32));
            }

            // Exact line search: breakpoints in increasing order until the
            // directional derivative turns nonnegative. Only the needed
            // prefix is ever sorted.
            let mut slope = slope0;
            let mut entering = None;
            let mut start = 0;
            let mut chunk = 16;
            let total = self.candidates.len();
            'search: while start < total {
                let rest = &mut self.candidates[start..];
                let k = chunk.min(rest.len());
                if k < rest.len() {
                    rest.select_nth_unstable_by(k - 1, cmp_candidates);
                }
                rest[..k].sort_unstable_by(cmp_candidates);
                for (off, &(theta, weight, i)) in rest[..k].iter().enumerate() {
                    slope += weight;
                    if slope >= 0.0 {
                        entering = Some((start + off, theta, i as usize));
                        break 'search;
                    }
                }
                start += k;
                chunk *= 4;
            }
            let (pos, theta, q) = match entering {
                Some(e) => e,
                None => {
                    // The objective is bounded below by zero; a residual
                    // negative slope can only be rounding on a degenerate
                    // reference.
                    let passed: f64 = self.candidates.iter().map(|c| c.1).sum();
                    if slope < -1e-9 * (slope0.abs() + passed) {
                        return Err(Error::NotConverged { iterations: 0 });
                    }
                    match self.candidates.last() {
                        Some(&(theta, _, i)) => (total - 1, theta, i as usize),
                        None => {
                            return Err(Error::SingularBasis {
                                condition: f64::INFINITY,
                            })
                        }
                    }
                }
            };

            for &(_, _, i) in &self.candidates[..pos] {
                let side = &mut self.side[i as usize];
                *side = match *side {
                    Side::Below => Side::Above,
                    Side::Above => Side::Below,
                    Side::Tight => Side::Tight,
                };
            }
            for k in 0..d {
                pi[k] += theta * delta[k];
            }
            if let Basic::Data(i) = basis[r] {
                self.side[i] = if sigma < 0.0 { Side::Below } else { Side::Above };
            }
            self.side[q] = Side::Tight;
            basis[r] = Basic::Data(q);

            if theta == 0.0 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
        }
        self.warm.clear();
        Err(Error::NotConverged {
            iterations: max_iter,
        })
    }
}

/// Gauss-Jordan inverse of a small dense matrix with partial pivoting.
fn invert(a: &[f64], out: &mut [f64], d: usize) -> Result<()> {
    let mut m = a.to_vec();
    out.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..d {
        out[i * d + i] = 1.0;
    }
    let norm_a = one_norm(a, d);
    for col in 0..d {
        let pivot_row = (col..d)
            .max_by(|&x, &y| m[x * d + col].abs().total_cmp(&m[y * d + col].abs()))
            .unwrap_or(col);
        let pivot = m[pivot_row * d + col];
        if pivot.abs() <= 1e-14 * norm_a {
            return Err(Error::SingularBasis {
                condition: f64::INFINITY,
            });
        }
        if pivot_row != col {
            for k in 0..d {
                m.swap(pivot_row * d + k, col * d + k);
                out.swap(pivot_row * d + k, col * d + k);
            }
        }
        let inv = 1.0 / pivot;
        for k in 0..d {
            m[col * d + k] *= inv;
            out[col * d + k] *= inv;
        }
        for row in 0..d {
            if row == col {
                continue;
            }
            let f = m[row * d + col];
            if f != 0.0 {
                for k in 0..d {
                    m[row * d + k] -= f * m[col * d + k];
                    out[row * d + k] -= f * out[col * d + k];
                }
            }
        }
    }
    let condition = norm_a * one_norm(out, d);
    if !condition.is_finite() || condition > 1e14 {
        return Err(Error::SingularBasis { condition });
    }
    Ok(())
}

fn one_norm(a: &[f64], d: usize) -> f64 {
    (0..d)
        .map(|c| (0..d).map(|r| a[r * d + c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
