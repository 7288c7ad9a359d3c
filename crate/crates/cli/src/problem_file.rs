//! TOML problem files.
//!
//! ```toml
//! name = "bessel0"                      # optional
//! order = 2
//! coeff_polys = [[0, 1], [1], [0, 1]]   # multipliers of u, u', u''
//! quad_poly = [0]                       # optional multiplier of u²
//! rhs_poly = [0]
//! init_conditions = [1, 0]              # u(0), u'(0)
//! N = 10
//! rms_points = 101
//! exact_poly = [0, 0, 0, -1, 1]         # optional exact solution
//! ```
//!
//! Polynomials are ascending monomial coefficient lists. A coefficient is an integer,
//! a decimal, or a string holding a fraction such as `"7/12"`.

use std::ops::Range;

use bernoulli_opmat::scalar::{parse_rational, rational_to_f64};
use bernoulli_opmat::{ExactProblem, Rational};
use serde::Deserialize;
use toml::Spanned;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Coef {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    name: Option<String>,
    order: Spanned<i64>,
    coeff_polys: Spanned<Vec<Spanned<Vec<Coef>>>>,
    quad_poly: Option<Spanned<Vec<Coef>>>,
    rhs_poly: Spanned<Vec<Coef>>,
    init_conditions: Spanned<Vec<Coef>>,
    #[serde(rename = "N")]
    n: Option<Spanned<i64>>,
    rms_points: Option<Spanned<i64>>,
    exact_poly: Option<Spanned<Vec<Coef>>>,
}

/// A parsed problem file.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub name: String,
    pub problem: ExactProblem,
    pub n: Option<usize>,
    pub rms_points: Option<usize>,
    pub exact_poly: Option<Vec<f64>>,
}

impl ProblemFile {
    /// Horner evaluation of `exact_poly`, or NaN when absent.
    pub fn exact(&self, x: f64) -> f64 {
        match &self.exact_poly {
            Some(p) => p.iter().rev().fold(0.0, |acc, c| acc * x + c),
            None => f64::NAN,
        }
    }
}

struct Source<'a> {
    text: &'a str,
    origin: &'a str,
}

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn fail(&self, span: Range<usize>, field: &str, msg: impl std::fmt::Display) -> String {
        format!("{}:{}: field `{field}`: {msg}", self.origin, self.line(span))
    }

    fn coefs(&self, field: &str, list: &Spanned<Vec<Coef>>) -> Result<Vec<Rational>, String> {
        if list.get_ref().is_empty() {
            return Err(self.fail(list.span(), field, "polynomial needs at least one coefficient"));
        }
        list.get_ref()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let parsed = match c {
                    Coef::Int(v) => Ok(Rational::from_integer((*v).into())),
                    // Display of an f64 is its shortest decimal form, so 0.1 reads as 1/10
                    Coef::Float(v) if v.is_finite() => parse_rational(&v.to_string()),
                    Coef::Float(v) => Err(bernoulli_opmat::Error::Argument(format!("{v} is not finite"))),
                    Coef::Text(s) => parse_rational(s),
                };
                parsed.map_err(|e| self.fail(list.span(), field, format_args!("entry {i}: {e}")))
            })
            .collect()
    }

    fn count(&self, field: &str, v: &Spanned<i64>, min: i64) -> Result<usize, String> {
        if *v.get_ref() < min {
            return Err(self.fail(v.span(), field, format_args!("must be at least {min}, got {}", v.get_ref())));
        }
        usize::try_from(*v.get_ref()).map_err(|e| self.fail(v.span(), field, e))
    }
}

/// Parses `text`; `origin` names the source in diagnostics.
pub fn parse(text: &str, origin: &str) -> Result<ProblemFile, String> {
    let raw: Raw = toml::from_str(text).map_err(|e| format!("{origin}: {}", e.to_string().trim_end()))?;
    let src = Source { text, origin };
    let order = *raw.order.get_ref();
    if !(1..=2).contains(&order) {
        return Err(src.fail(raw.order.span(), "order", format_args!("must be 1 or 2, got {order}")));
    }
    let order = order as usize;
    let polys = raw.coeff_polys.get_ref();
    if polys.len() != order + 1 {
        return Err(src.fail(
            raw.coeff_polys.span(),
            "coeff_polys",
            format_args!("expected {} polynomials (one per derivative level), got {}", order + 1, polys.len()),
        ));
    }
    let coeff_polys = polys
        .iter()
        .map(|p| src.coefs("coeff_polys", p))
        .collect::<Result<Vec<_>, _>>()?;
    let init = src.coefs("init_conditions", &raw.init_conditions)?;
    if init.len() != order {
        return Err(src.fail(
            raw.init_conditions.span(),
            "init_conditions",
            format_args!("expected {order} values, got {}", init.len()),
        ));
    }
    let rhs = src.coefs("rhs_poly", &raw.rhs_poly)?;
    let mut problem = ExactProblem::new(order, coeff_polys, rhs, init).map_err(|e| format!("{origin}: {e}"))?;
    if let Some(q) = &raw.quad_poly {
        problem = problem.with_quadratic(src.coefs("quad_poly", q)?);
    }
    let exact_poly = match &raw.exact_poly {
        Some(p) => Some(src.coefs("exact_poly", p)?.iter().map(rational_to_f64).collect()),
        None => None,
    };
    Ok(ProblemFile {
        name: raw.name.unwrap_or_else(|| origin.to_string()),
        problem,
        n: raw.n.as_ref().map(|v| src.count("N", v, 0)).transpose()?,
        rms_points: raw.rms_points.as_ref().map(|v| src.count("rms_points", v, 2)).transpose()?,
        exact_poly,
    })
}
