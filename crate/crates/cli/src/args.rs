//! Value parsers for ranges (`min:max`), angles (`pi/4`) and number lists.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("`{s}` is not of the form min:max"))?;
    let (min, max) = (number(lo)?, number(hi)?);
    if min >= max {
        return Err(format!("range `{s}` is empty"));
    }
    Ok(Range { min, max })
}

/// Accepts decimals and multiples of pi: `0.5`, `pi`, `pi/4`, `2pi/3`, `2*pi/3`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let Some(pos) = t.find("pi") else {
        return number(&t);
    };
    let coeff = t[..pos].trim_end_matches('*').trim();
    let coeff = if coeff.is_empty() { 1.0 } else { number(coeff)? };
    let rest = t[pos + 2..].trim();
    let denom = match rest.strip_prefix('/') {
        Some(d) => number(d)?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("`{s}` is not an angle")),
    };
    if denom == 0.0 {
        return Err(format!("`{s}` divides by zero"));
    }
    Ok(coeff * PI / denom)
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be > 0"))
    }
}
