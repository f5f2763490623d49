//! Compact text form of [`DistributionSpec`].
//!
//! ```text
//! mvnormal:d=2,mu=0,sigma=I
//! mvnormal:mu=[1 1],sigma=1.5I
//! mvt:d=5,nu=1
//! mvlaplace:d=2,sigma=[1 0.5;0.5 1]
//! fgm:theta=0.5,m1=beta(2,3),m2=uniform
//! ```
//!
//! `mu` is a scalar (repeated in every coordinate) or a bracketed vector.
//! `sigma` is `I`, a multiple of the identity (`2I`, `2*I` or plain `2`), or
//! a bracketed matrix with rows separated by `;`. `d` defaults to the size
//! implied by `mu` or `sigma`, else 2. For FGM, `m` sets both marginals.
//! `normal`, `t` and `laplace` are accepted as family aliases, and `cauchy`
//! is `mvt` with `nu=1`.

use std::fmt;
use std::str::FromStr;

use super::{identity, DistributionSpec, Marginal};
use crate::error::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

/// Splits on commas that are not nested inside `()` or `[]`.
fn split_top(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(bad(format!("unbalanced brackets in '{s}'")));
                }
            }
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(bad(format!("unbalanced brackets in '{s}'")));
    }
    parts.push(&s[start..]);
    Ok(parts.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect())
}

fn number(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| bad(format!("'{}' is not a number", s.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(format!("'{}' is not finite", s.trim())))
    }
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(number)
        .collect()
}

enum Mu {
    Scalar(f64),
    Vector(Vec<f64>),
}

enum Sigma {
    Scaled(f64),
    Matrix(Vec<Vec<f64>>),
}

fn bracketed(s: &str) -> Option<&str> {
    s.trim().strip_prefix('[')?.strip_suffix(']')
}

fn parse_mu(s: &str) -> Result<Mu> {
    match bracketed(s) {
        Some(inner) => Ok(Mu::Vector(numbers(inner)?)),
        None => Ok(Mu::Scalar(number(s)?)),
    }
}

fn parse_sigma(s: &str) -> Result<Sigma> {
    let t = s.trim();
    if let Some(inner) = bracketed(t) {
        let rows = inner
            .split(';')
            .map(numbers)
            .collect::<Result<Vec<Vec<f64>>>>()?;
        return Ok(Sigma::Matrix(rows));
    }
    if let Some(c) = t.strip_suffix('I').or_else(|| t.strip_suffix('i')) {
        let c = c.trim().trim_end_matches('*').trim();
        return Ok(Sigma::Scaled(if c.is_empty() { 1.0 } else { number(c)? }));
    }
    Ok(Sigma::Scaled(number(t)?))
}

fn parse_marginal(s: &str) -> Result<Marginal> {
    let t = s.trim().to_ascii_lowercase();
    if t == "uniform" || t == "u" || t == "unif" {
        return Ok(Marginal::Uniform);
    }
    let inner = t
        .strip_prefix("beta(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| bad(format!("unknown marginal '{s}'")))?;
    let v = numbers(inner)?;
    if v.len() != 2 {
        return Err(bad(format!("beta marginal needs two parameters in '{s}'")));
    }
    Ok(Marginal::Beta { a: v[0], b: v[1] })
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let family = family.trim().to_ascii_lowercase();
        let mut params = Vec::new();
        for part in split_top(rest)? {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found '{part}'")))?;
            let k = k.trim().to_ascii_lowercase();
            if params.iter().any(|(p, _): &(String, &str)| *p == k) {
                return Err(bad(format!("parameter '{k}' given twice")));
            }
            params.push((k, v.trim()));
        }
        let take = |params: &mut Vec<(String, &str)>, key: &str| -> Option<String> {
            let pos = params.iter().position(|(k, _)| k == key)?;
            Some(params.remove(pos).1.to_string())
        };

        let spec = match family.as_str() {
            "fgm" | "morgenstern" => {
                let theta = take(&mut params, "theta").map(|v| number(&v)).transpose()?.unwrap_or(0.0);
                let both = take(&mut params, "m").map(|v| parse_marginal(&v)).transpose()?;
                let m1 = take(&mut params, "m1").map(|v| parse_marginal(&v)).transpose()?;
                let m2 = take(&mut params, "m2").map(|v| parse_marginal(&v)).transpose()?;
                if let Some(d) = take(&mut params, "d") {
                    if number(&d)? != 2.0 {
                        return Err(bad("FGM is bivariate (d=2)"));
                    }
                }
                DistributionSpec::Fgm {
                    theta,
                    m1: m1.or(both).unwrap_or(Marginal::Uniform),
                    m2: m2.or(both).unwrap_or(Marginal::Uniform),
                }
            }
            "mvnormal" | "normal" | "mvn" | "mvt" | "t" | "cauchy" | "mvlaplace" | "laplace" => {
                let d = take(&mut params, "d")
                    .map(|v| {
                        let x = number(&v)?;
                        if x >= 1.0 && x.fract() == 0.0 {
                            Ok(x as usize)
                        } else {
                            Err(bad(format!("invalid dimension '{v}'")))
                        }
                    })
                    .transpose()?;
                let mu = take(&mut params, "mu").map(|v| parse_mu(&v)).transpose()?;
                let sigma = take(&mut params, "sigma").map(|v| parse_sigma(&v)).transpose()?;
                let implied = match (&mu, &sigma) {
                    (Some(Mu::Vector(v)), _) => Some(v.len()),
                    (_, Some(Sigma::Matrix(rows))) => Some(rows.len()),
                    _ => None,
                };
                let d = match (d, implied) {
                    (Some(d), Some(i)) if d != i => {
                        return Err(bad(format!("d={d} conflicts with parameters of size {i}")))
                    }
                    (Some(d), _) => d,
                    (None, Some(i)) => i,
                    (None, None) => 2,
                };
                let mu = match mu {
                    None => vec![0.0; d],
                    Some(Mu::Scalar(c)) => vec![c; d],
                    Some(Mu::Vector(v)) if v.len() == d => v,
                    Some(Mu::Vector(v)) => {
                        return Err(bad(format!("mu has {} entries, expected {d}", v.len())))
                    }
                };
                let sigma = match sigma {
                    None => identity(d),
                    Some(Sigma::Scaled(c)) => identity(d).into_iter().map(|v| v * c).collect(),
                    Some(Sigma::Matrix(rows)) => {
                        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                            return Err(bad(format!("sigma must be {d}x{d}")));
                        }
                        rows.concat()
                    }
                };
                match family.as_str() {
                    "mvt" | "t" | "cauchy" => {
                        let nu = take(&mut params, "nu").map(|v| number(&v)).transpose()?;
                        let nu = match (family.as_str(), nu) {
                            ("cauchy", None) | ("cauchy", Some(1.0)) => 1.0,
                            ("cauchy", Some(_)) => return Err(bad("cauchy has nu=1")),
                            (_, Some(nu)) => nu,
                            (_, None) => return Err(bad("mvt needs nu")),
                        };
                        DistributionSpec::MvT { mu, sigma, nu }
                    }
                    "mvlaplace" | "laplace" => DistributionSpec::MvLaplace { mu, sigma },
                    _ => DistributionSpec::MvNormal { mu, sigma },
                }
            }
            other => return Err(bad(format!("unknown family '{other}'"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(bad(format!("unknown parameter '{k}' for {family}")));
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn fmt_mu(mu: &[f64]) -> String {
    if mu.iter().all(|&v| v == mu[0]) {
        mu[0].to_string()
    } else {
        format!("[{}]", fmt_vec(mu))
    }
}

fn fmt_sigma(sigma: &[f64], d: usize) -> String {
    let c = sigma[0];
    let scaled = (0..d).all(|i| (0..d).all(|j| sigma[i * d + j] == if i == j { c } else { 0.0 }));
    if scaled {
        if c == 1.0 {
            "I".into()
        } else {
            format!("{c}I")
        }
    } else {
        let rows: Vec<String> = sigma.chunks(d).map(fmt_vec).collect();
        format!("[{}]", rows.join(";"))
    }
}

impl fmt::Display for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marginal::Uniform => write!(f, "uniform"),
            Marginal::Beta { a, b } => write!(f, "beta({a},{b})"),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        match self {
            DistributionSpec::MvNormal { mu, sigma } => write!(
                f,
                "mvnormal:d={d},mu={},sigma={}",
                fmt_mu(mu),
                fmt_sigma(sigma, d)
            ),
            DistributionSpec::MvT { mu, sigma, nu } => write!(
                f,
                "mvt:d={d},nu={nu},mu={},sigma={}",
                fmt_mu(mu),
                fmt_sigma(sigma, d)
            ),
            DistributionSpec::MvLaplace { mu, sigma } => write!(
                f,
                "mvlaplace:d={d},mu={},sigma={}",
                fmt_mu(mu),
                fmt_sigma(sigma, d)
            ),
            DistributionSpec::Fgm { theta, m1, m2 } => {
                write!(f, "fgm:theta={theta},m1={m1},m2={m2}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> DistributionSpec {
        s.parse().unwrap()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(parse("mvnormal:d=2,mu=0,sigma=I"), DistributionSpec::standard_normal(2));
        assert_eq!(
            parse("mvt:d=5,nu=1"),
            DistributionSpec::MvT {
                mu: vec![0.0; 5],
                sigma: identity(5),
                nu: 1.0
            }
        );
        assert_eq!(
            parse("fgm:theta=0.5,m1=beta(2,3),m2=beta(2,3)"),
            DistributionSpec::Fgm {
                theta: 0.5,
                m1: Marginal::Beta { a: 2.0, b: 3.0 },
                m2: Marginal::Beta { a: 2.0, b: 3.0 }
            }
        );
        assert_eq!(parse("mvlaplace").dim(), 2);
        assert_eq!(parse("cauchy:d=3"), parse("mvt:nu=1,d=3"));
    }

    #[test]
    fn vectors_and_matrices() {
        let s = parse("mvnormal:mu=[1 1],sigma=1.5I");
        assert_eq!(
            s,
            DistributionSpec::MvNormal {
                mu: vec![1.0, 1.0],
                sigma: vec![1.5, 0.0, 0.0, 1.5]
            }
        );
        assert_eq!(parse("mvnormal:mu=[1,1],sigma=1.5*I"), s);
        let m = parse("mvnormal:sigma=[2 0.5;0.5 1]");
        assert_eq!(m.dim(), 2);
        assert_eq!(parse("mvnormal:d=2,sigma=2"), parse("mvnormal:d=2,sigma=2I"));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "mvnormal:d=2,mu=0,sigma=I",
            "mvnormal:d=2,mu=[1 -1],sigma=[2 0.5;0.5 1]",
            "mvt:d=5,nu=1,mu=0,sigma=I",
            "mvlaplace:d=2,mu=0,sigma=2I",
            "fgm:theta=-0.25,m1=beta(0.5,0.5),m2=uniform",
        ] {
            let spec = parse(s);
            assert_eq!(spec.to_string(), s);
            assert_eq!(parse(&spec.to_string()), spec);
        }
    }

    #[test]
    fn errors() {
        for s in [
            "gamma:d=2",
            "mvnormal:d=2,mu=[1 2 3]",
            "mvnormal:d=2,foo=1",
            "mvnormal:d=2,mu=0,mu=1",
            "mvt:d=2",
            "fgm:theta=2",
            "fgm:m1=beta(1)",
            "fgm:d=3",
            "mvnormal:sigma=[1 2;2 1]",
            "mvnormal:mu=[1,2",
            "mvnormal:d=0",
        ] {
            assert!(s.parse::<DistributionSpec>().is_err(), "{s}");
        }
    }
}
