use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `count` equally spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Self { start, stop, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        match self.count {
            0 => Err(Error::Config("grid needs at least one point".into())),
            1 => Ok(()),
            _ if self.stop > self.start => Ok(()),
            _ => Err(Error::Config(format!("grid must be increasing, got {}:{}", self.start, self.stop))),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + k as f64 * step })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// Parses `start:stop:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid `{s}` is not start:stop:count")));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number `{p}` in grid `{s}`")));
        let count = parts[2].trim().parse::<usize>().map_err(|_| Error::Config(format!("bad count in grid `{s}`")))?;
        Grid::new(num(parts[0])?, num(parts[1])?, count)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}
