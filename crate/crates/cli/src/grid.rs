use std::fmt;
use std::str::FromStr;

use bcnf_core::{ParamError, Params};
use thiserror::Error;

/// `lo:hi:steps`, `steps` evenly spaced values including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RangeError {
    #[error("expected lo:hi:steps")]
    Shape,
    #[error("bad number {0:?}")]
    Number(String),
    #[error("need finite lo <= hi")]
    Order,
    #[error("steps must be at least 1")]
    Steps,
}

impl Range {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self, RangeError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(RangeError::Order);
        }
        if steps == 0 {
            return Err(RangeError::Steps);
        }
        Ok(Self { lo, hi, steps })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 {
            self.lo
        } else if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|i| self.value(i))
    }
}

impl FromStr for Range {
    type Err = RangeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(RangeError::Shape);
        };
        let real = |t: &str| t.trim().parse::<f64>().map_err(|_| RangeError::Number(t.to_string()));
        let steps = n
            .trim()
            .parse::<usize>()
            .map_err(|_| RangeError::Number(n.to_string()))?;
        Range::new(real(lo)?, real(hi)?, steps)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.steps)
    }
}

/// A `tau_L` by `tau_R` grid at fixed determinants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub tau_l: Range,
    pub tau_r: Range,
    pub delta_l: f64,
    pub delta_r: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            tau_l: Range {
                lo: 0.05,
                hi: 3.0,
                steps: 300,
            },
            tau_r: Range {
                lo: -3.0,
                hi: 3.0,
                steps: 300,
            },
            delta_l: 0.2,
            delta_r: 2.0,
        }
    }
}

impl GridSpec {
    /// Checks that every grid point is a valid parameter set.
    pub fn validate(&self) -> Result<(), ParamError> {
        Params::new(self.tau_l.lo, self.delta_l, self.tau_r.lo, self.delta_r).map(|_| ())
    }

    pub fn len(&self) -> usize {
        self.tau_l.steps * self.tau_r.steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(tau_L, tau_R)` in output order: `tau_L` major.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.tau_l
            .values()
            .flat_map(|tl| self.tau_r.values().map(move |tr| (tl, tr)))
            .collect()
    }
}
