//! The plain-text point-set format.
//!
//! ```text
//! # comment
//! 2 4
//! 0 0
//! 6 0
//! 0 6
//! 2/1 2.0
//! ```
//!
//! The first non-comment line holds `d n`; each of the next `n` lines holds
//! `d` coordinates written as integers, fractions `p/q` or decimals
//! (`-1.25`, `3e-2`). Lines starting with `#` and blank lines are ignored.
//! All values are converted to exact rationals.

use std::fmt::Write as _;

use convextest::{BigInt, BigRational, GeometryError, Point, PointSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Parses `p/q`, an integer, or a decimal with optional exponent, exactly.
pub fn parse_rational(token: &str) -> Result<BigRational, String> {
    if let Some((p, q)) = token.split_once('/') {
        let p: BigInt = parse_integer(p)?;
        let q: BigInt = parse_integer(q)?;
        if q == BigInt::from(0) {
            return Err(format!("zero denominator in `{token}`"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match token.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = token[i + 1..]
                .parse()
                .map_err(|_| format!("bad exponent in `{token}`"))?;
            (&token[..i], e)
        }
        None => (token, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(format!("`{token}` is not a number"));
    }
    let digits: BigInt = format!("{whole}{frac}0")
        .parse::<BigInt>()
        .map_err(|e| e.to_string())?
        / 10;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow(scale.unsigned_abs()))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

fn parse_integer(s: &str) -> Result<BigInt, String> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("`{s}` is not an integer"));
    }
    s.parse::<BigInt>().map_err(|e| e.to_string())
}

pub fn parse_point_set(text: &str) -> Result<PointSet, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines.next().ok_or_else(|| err(1, "missing `d n` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [d, n] = fields[..] else {
        return Err(err(header_line, "header must be `d n`"));
    };
    let d: usize = d
        .parse()
        .map_err(|_| err(header_line, format!("bad dimension `{d}`")))?;
    let n: usize = n
        .parse()
        .map_err(|_| err(header_line, format!("bad point count `{n}`")))?;
    if d == 0 {
        return Err(err(header_line, "dimension must be positive"));
    }
    let mut points = Vec::with_capacity(n);
    let mut line_of = Vec::with_capacity(n);
    for (line, content) in lines.by_ref() {
        if points.len() == n {
            return Err(err(line, format!("more than {n} points")));
        }
        let coords = content
            .split_whitespace()
            .map(|t| parse_rational(t).map_err(|m| err(line, m)))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() != d {
            return Err(err(
                line,
                format!("expected {d} coordinates, found {}", coords.len()),
            ));
        }
        points.push(Point::new(coords));
        line_of.push(line);
    }
    if points.len() != n {
        let last = text.lines().count().max(1);
        return Err(err(
            last,
            format!("expected {n} points, found {}", points.len()),
        ));
    }
    PointSet::new(d, points).map_err(|e| match e {
        GeometryError::DuplicatePoint { first, second } => err(
            line_of[second],
            format!("duplicate of the point on line {}", line_of[first]),
        ),
        other => err(header_line, other.to_string()),
    })
}

/// Writes `ps` with the given comment lines; coordinates as `p/q` or
/// integers.
pub fn write_point_set(ps: &PointSet, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{} {}", ps.dim(), ps.len());
    for p in ps {
        let line: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}
