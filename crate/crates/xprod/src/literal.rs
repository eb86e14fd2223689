//! Exact scalar literals.
//!
//! Grammar, whitespace insensitive:
//!
//! ```text
//! scalar  := coeff | coeff? "sqrt" rational | "(" coeff ")" "sqrt" rational
//! coeff   := rational | imag | rational ("+" | "-") imag
//! imag    := rational? "i" | "-i"
//! ```
//!
//! Examples: `3/4`, `-1/2 i`, `1/2 + 3/4 i`, `2 sqrt 3`, `1/2 sqrt 2/3`,
//! `(1 + i) sqrt 2`. Formatting goes through the canonical `Display` of
//! [`RadScalar`], which this parser reads back unchanged.

use xprod_core::{GaussQ, RadScalar, Rational};

use crate::error::CliError;

fn rational(field: &str, s: &str) -> Result<Rational, CliError> {
    let s = s.strip_prefix('+').unwrap_or(s);
    s.parse::<Rational>().map_err(|_| CliError::parse(field, format!("not a rational number: {s:?}")))
}

fn imaginary(field: &str, s: &str) -> Result<Rational, CliError> {
    match s {
        "" | "+" => Ok(Rational::from_integer(1.into())),
        "-" => Ok(Rational::from_integer((-1).into())),
        _ => rational(field, s),
    }
}

pub fn parse_gauss(field: &str, s: &str) -> Result<GaussQ, CliError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(&s);
    if s.is_empty() {
        return Err(CliError::parse(field, "empty scalar"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(GaussQ::real(rational(field, s)?));
    };
    // split at the last sign that is not leading
    match body.char_indices().rev().find(|&(k, c)| k > 0 && (c == '+' || c == '-')) {
        Some((k, _)) => Ok(GaussQ::new(rational(field, &body[..k])?, imaginary(field, &body[k..])?)),
        None => Ok(GaussQ::new(Rational::from_integer(0.into()), imaginary(field, body)?)),
    }
}

pub fn parse_scalar(field: &str, s: &str) -> Result<RadScalar, CliError> {
    let Some((coeff, radicand)) = s.split_once("sqrt") else {
        return Ok(RadScalar::from_gauss(parse_gauss(field, s)?));
    };
    let coeff = if coeff.trim().is_empty() { GaussQ::one() } else { parse_gauss(field, coeff)? };
    let radicand = rational(field, radicand.trim())?;
    RadScalar::new(coeff, &radicand).map_err(|e| CliError::parse(field, e.to_string()))
}

pub fn format_scalar(x: &RadScalar) -> String {
    x.to_string()
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        q.to_string()
    }
}
