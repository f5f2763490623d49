//! Seeded samplers for the null and alternative families: multivariate
//! normal, multivariate t, multivariate Laplace and the bivariate
//! Farlie-Gumbel-Morgenstern (FGM) family with uniform or beta marginals.

mod grammar;

use rand::distributions::Open01;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    Uniform,
    Beta { a: f64, b: f64 },
}

impl Marginal {
    /// Quantile function; `p` must lie in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        match *self {
            Marginal::Uniform => {
                if p > 0.0 && p < 1.0 {
                    Ok(p)
                } else {
                    Err(Error::InvalidArgument(format!("probability {p} not in (0, 1)")))
                }
            }
            Marginal::Beta { a, b } => beta_quantile(p, a, b),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Marginal::Uniform => x.clamp(0.0, 1.0),
            Marginal::Beta { a, b } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    beta_reg(a, b, x)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Marginal::Uniform => Ok(()),
            Marginal::Beta { a, b } => {
                if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "beta parameters must be positive (got a={a}, b={b})"
                    )))
                }
            }
        }
    }
}

/// A sampling distribution. `sigma` is a row-major `d x d` scale matrix;
/// for the t and Laplace families it is the scale of the elliptical law, not
/// its covariance.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    MvNormal {
        mu: Vec<f64>,
        sigma: Vec<f64>,
    },
    MvT {
        mu: Vec<f64>,
        sigma: Vec<f64>,
        nu: f64,
    },
    MvLaplace {
        mu: Vec<f64>,
        sigma: Vec<f64>,
    },
    Fgm {
        theta: f64,
        m1: Marginal,
        m2: Marginal,
    },
}

pub(crate) fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

impl DistributionSpec {
    /// Standard normal in `d` dimensions.
    pub fn standard_normal(d: usize) -> Self {
        DistributionSpec::MvNormal {
            mu: vec![0.0; d],
            sigma: identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::MvNormal { mu, .. }
            | DistributionSpec::MvT { mu, .. }
            | DistributionSpec::MvLaplace { mu, .. } => mu.len(),
            DistributionSpec::Fgm { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sampler().map(|_| ())
    }

    /// Validates the spec and prepares the scale factorization.
    pub fn sampler(&self) -> Result<Sampler> {
        let kind = match self {
            DistributionSpec::MvNormal { mu, sigma }
            | DistributionSpec::MvLaplace { mu, sigma }
            | DistributionSpec::MvT { mu, sigma, .. } => {
                let d = mu.len();
                if d == 0 {
                    return Err(Error::InvalidSpec("dimension must be at least 1".into()));
                }
                if sigma.len() != d * d {
                    return Err(Error::InvalidSpec(format!(
                        "scale matrix has {} entries, expected {}",
                        sigma.len(),
                        d * d
                    )));
                }
                if mu.iter().chain(sigma).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidSpec("non-finite parameter".into()));
                }
                let chol = cholesky(sigma, d)?;
                let mixing = match self {
                    DistributionSpec::MvT { nu, .. } => {
                        if !(*nu >= 1.0 && nu.is_finite()) {
                            return Err(Error::InvalidSpec(format!(
                                "degrees of freedom must be at least 1 (got {nu})"
                            )));
                        }
                        Mixing::T(ChiSquared::new(*nu).map_err(|e| Error::InvalidSpec(e.to_string()))?, *nu)
                    }
                    DistributionSpec::MvLaplace { .. } => Mixing::Laplace,
                    _ => Mixing::Normal,
                };
                SamplerKind::Elliptical {
                    mu: mu.clone(),
                    chol,
                    mixing,
                }
            }
            DistributionSpec::Fgm { theta, m1, m2 } => {
                if theta.is_nan() || theta.abs() > 1.0 {
                    return Err(Error::InvalidSpec(format!(
                        "FGM parameter must satisfy |theta| <= 1 (got {theta})"
                    )));
                }
                m1.validate()?;
                m2.validate()?;
                SamplerKind::Fgm {
                    theta: *theta,
                    m1: *m1,
                    m2: *m2,
                }
            }
        };
        Ok(Sampler {
            dim: self.dim(),
            kind,
        })
    }
}

#[derive(Debug, Clone)]
enum Mixing {
    Normal,
    T(ChiSquared<f64>, f64),
    Laplace,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Elliptical {
        mu: Vec<f64>,
        chol: Vec<f64>,
        mixing: Mixing,
    },
    Fgm {
        theta: f64,
        m1: Marginal,
        m2: Marginal,
    },
}

/// A validated spec ready for repeated sampling.
#[derive(Debug, Clone)]
pub struct Sampler {
    dim: usize,
    kind: SamplerKind,
}

impl Sampler {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n` iid rows; identical for identical seeds.
    pub fn sample(&self, n: usize, seed: Seed) -> Result<DataMatrix> {
        let d = self.dim;
        let mut rng = seed.rng();
        let mut values = Vec::with_capacity(n * d);
        match &self.kind {
            SamplerKind::Elliptical { mu, chol, mixing } => {
                let mut z = vec![0.0; d];
                for _ in 0..n {
                    for v in z.iter_mut() {
                        *v = rng.sample(StandardNormal);
                    }
                    let scale = match mixing {
                        Mixing::Normal => 1.0,
                        Mixing::T(chi, nu) => 1.0 / (chi.sample(&mut rng) / nu).sqrt(),
                        Mixing::Laplace => {
                            let e: f64 = rng.sample(Exp1);
                            e.sqrt()
                        }
                    };
                    for r in 0..d {
                        let lz: f64 = (0..=r).map(|c| chol[r * d + c] * z[c]).sum();
                        values.push(mu[r] + scale * lz);
                    }
                }
            }
            SamplerKind::Fgm { theta, m1, m2 } => {
                for _ in 0..n {
                    let u1: f64 = rng.sample(Open01);
                    let w: f64 = rng.sample(Open01);
                    let u2 = fgm_conditional_inverse(u1, w, *theta)
                        .clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                    values.push(m1.quantile(u1)?);
                    values.push(m2.quantile(u2)?);
                }
            }
        }
        DataMatrix::from_row_major(values, n, d)
    }
}

/// `n` iid draws from `spec`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: Seed) -> Result<DataMatrix> {
    spec.sampler()?.sample(n, seed)
}

/// Lower Cholesky factor of a symmetric positive definite row-major matrix.
pub fn cholesky(a: &[f64], d: usize) -> Result<Vec<f64>> {
    for i in 0..d {
        for j in 0..i {
            let (x, y) = (a[i * d + j], a[j * d + i]);
            if (x - y).abs() > 1e-12 * (1.0 + x.abs().max(y.abs())) {
                return Err(Error::InvalidSpec("scale matrix is not symmetric".into()));
            }
        }
    }
    let mut l = vec![0.0; d * d];
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= l[j * d + k] * l[j * d + k];
        }
        if diag.is_nan() || diag <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = diag.sqrt();
        l[j * d + j] = ljj;
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = v / ljj;
        }
    }
    Ok(l)
}

/// Solves `u2 [1 + theta (1 - 2 u1)(1 - u2)] = w` for `u2` in `[0, 1]`, the
/// inverse of the FGM conditional distribution of the second coordinate.
pub fn fgm_conditional_inverse(u1: f64, w: f64, theta: f64) -> f64 {
    let a = theta * (1.0 - 2.0 * u1);
    if a == 0.0 {
        return w;
    }
    let b = 1.0 + a;
    // root of a u^2 - (1 + a) u + w = 0 written without cancellation
    let disc = (b * b - 4.0 * a * w).max(0.0);
    (2.0 * w / (b + disc.sqrt())).clamp(0.0, 1.0)
}

/// FGM copula `C(u, v) = u v [1 + theta (1 - u)(1 - v)]`.
pub fn fgm_copula(u: f64, v: f64, theta: f64) -> f64 {
    u * v * (1.0 + theta * (1.0 - u) * (1.0 - v))
}

/// Inverse of the regularized incomplete beta function, refined until
/// `|I_x(a, b) - p| <= 1e-12` or the bracket collapses.
pub fn beta_quantile(p: f64, a: f64, b: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("probability {p} not in (0, 1)")));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "beta parameters must be positive (got a={a}, b={b})"
        )));
    }
    if a == 1.0 && b == 1.0 {
        return Ok(p);
    }
    let lnb = ln_beta(a, b);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x = a / (a + b);
    for _ in 0..300 {
        let f = beta_reg(a, b, x) - p;
        if f.abs() <= 1e-12 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= f64::EPSILON * hi {
            return Ok(x);
        }
        let ln_pdf = (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - lnb;
        let step = f / ln_pdf.exp();
        let next = x - step;
        x = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(x)
}
