//! Parameter grids: `v`, `v1,v2,...`, `start:stop:step`, or any comma-separated
//! mix of values and ranges.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

/// Upper limit on the number of values one grid may expand to.
pub const MAX_GRID_LEN: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    Empty,
    BadNumber(String),
    BadRange(String),
    TooLarge(usize),
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::Empty => write!(f, "empty grid"),
            GridError::BadNumber(s) => write!(f, "not a number: `{s}`"),
            GridError::BadRange(s) => {
                write!(f, "bad range `{s}` (need start:stop:step with step > 0, stop >= start)")
            }
            GridError::TooLarge(n) => write!(f, "grid expands to {n} values (limit {MAX_GRID_LEN})"),
        }
    }
}

impl std::error::Error for GridError {}

fn number(s: &str) -> Result<f64, GridError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| GridError::BadNumber(s.trim().to_string()))
}

/// Round to 12 significant digits so `0.1:1:0.1` ends exactly at `1`.
fn snap(v: f64) -> f64 {
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Expand a grid expression into its values, in order.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, GridError> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(number(v)?),
            [start, stop, step] => {
                let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
                if !(step > 0.0 && stop >= start) {
                    return Err(GridError::BadRange(item.to_string()));
                }
                let span = (stop - start) / step;
                let n = (span + 1e-9).floor() + 1.0;
                if n > MAX_GRID_LEN as f64 {
                    return Err(GridError::TooLarge(n as usize));
                }
                out.extend((0..n as usize).map(|i| snap(start + i as f64 * step)));
            }
            _ => return Err(GridError::BadRange(item.to_string())),
        }
        if out.len() > MAX_GRID_LEN {
            return Err(GridError::TooLarge(out.len()));
        }
    }
    if out.is_empty() {
        return Err(GridError::Empty);
    }
    Ok(out)
}

/// A grid as given on the command line or in a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub text: String,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn single(&self) -> Option<f64> {
        match self.values.as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Grid {
            text: s.to_string(),
            values: parse_grid(s)?,
        })
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            List(Vec<f64>),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Num(v) => format!("{v:?}"),
            Raw::List(vs) => vs.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(","),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}
