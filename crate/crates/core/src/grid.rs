//! Number and grid literals shared by circuit scripts and the command line.
//!
//! Numbers are plain decimals or multiples/fractions of pi: `0.25`, `-1e-3`,
//! `pi`, `pi/4`, `-pi/8`, `3pi/4`, `3*pi/4`. Grids are `start:end:step`
//! (endpoints inclusive within half a step) or a single number.

use thiserror::Error;

/// Upper bound on the number of grid points.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("invalid number {0:?}")]
    InvalidNumber(String),
    #[error("grid must be start:end:step or a single number, got {0:?}")]
    Malformed(String),
    #[error("grid step must be positive")]
    NonPositiveStep,
    #[error("grid end is below its start")]
    Reversed,
    #[error("grid has more than {MAX_GRID_POINTS} points")]
    TooManyPoints,
}

fn parse_decimal(s: &str) -> Option<f64> {
    let ok_chars = s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
    if s.is_empty() || !ok_chars || !s.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parses a decimal or pi-multiple literal.
pub fn parse_number(token: &str) -> Option<f64> {
    let (sign, body) = match token.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, token.strip_prefix('+').unwrap_or(token)),
    };
    let Some(pos) = body.find("pi") else {
        return parse_decimal(body).map(|x| sign * x);
    };
    let (prefix, suffix) = (&body[..pos], &body[pos + 2..]);
    let coeff = match prefix.strip_suffix('*').unwrap_or(prefix) {
        "" if prefix.is_empty() => 1.0,
        "" => return None,
        p => parse_decimal(p)?,
    };
    let divisor = match suffix {
        "" => 1.0,
        s => {
            let d = parse_decimal(s.strip_prefix('/')?)?;
            if d == 0.0 {
                return None;
            }
            d
        }
    };
    let v = sign * coeff * std::f64::consts::PI / divisor;
    v.is_finite().then_some(v)
}

/// Expands a `start:end:step` grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, GridError> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let num = |s: &str| parse_number(s.trim()).ok_or_else(|| GridError::InvalidNumber(s.trim().to_owned()));
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, end, step] => {
            let (start, end, step) = (num(start)?, num(end)?, num(step)?);
            if step.is_nan() || step <= 0.0 {
                return Err(GridError::NonPositiveStep);
            }
            if end < start {
                return Err(GridError::Reversed);
            }
            let span = (end - start) / step + 0.5;
            if span.is_nan() || span >= MAX_GRID_POINTS as f64 {
                return Err(GridError::TooManyPoints);
            }
            let count = span.floor() as usize + 1;
            let mut out: Vec<f64> = (0..count).map(|k| start + k as f64 * step).collect();
            if let Some(last) = out.last_mut() {
                if (*last - end).abs() <= 1e-9 * step {
                    *last = end;
                }
            }
            Ok(out)
        }
        _ => Err(GridError::Malformed(spec.to_owned())),
    }
}
