//! Points on the unit cell `[-1/2, 1/2)^2` and the two metrics defined on it.
//!
//! The same cell serves as a square (plain Euclidean distance, boundary
//! effects present) and as a torus (distance is the minimum over integer
//! translates, no boundary).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HALF: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    x: f64,
    y: f64,
}

impl Point2 {
    /// Rejects coordinates outside `[-1/2, 1/2)` rather than wrapping them.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if in_cell(x) && in_cell(y) {
            Ok(Self { x, y })
        } else {
            Err(Error::PointOutOfCell { x, y })
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }
}

#[inline]
fn in_cell(v: f64) -> bool {
    (-HALF..HALF).contains(&v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Torus,
    Square,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Torus => "torus",
            Metric::Square => "square",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" => Ok(Metric::Torus),
            "square" => Ok(Metric::Square),
            other => Err(Error::Parse(format!("unknown metric {other:?}"))),
        }
    }
}

const OFFSETS: [f64; 3] = [-1.0, 0.0, 1.0];

/// Squared distance under `metric`. The torus case takes the minimum over
/// the 3x3 block of integer translates, which is exhaustive for a unit cell.
#[inline]
pub fn distance_sq(metric: Metric, p: Point2, q: Point2) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    match metric {
        Metric::Square => dx * dx + dy * dy,
        Metric::Torus => {
            let mut best = f64::INFINITY;
            for zx in OFFSETS {
                let ax = dx + zx;
                let ax2 = ax * ax;
                for zy in OFFSETS {
                    let ay = dy + zy;
                    best = best.min(ax2 + ay * ay);
                }
            }
            best
        }
    }
}

#[inline]
pub fn distance(metric: Metric, p: Point2, q: Point2) -> f64 {
    distance_sq(metric, p, q).sqrt()
}
