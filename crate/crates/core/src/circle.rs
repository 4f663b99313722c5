//! Angles on the half circle `K = [0, pi)` with `0` and `pi` identified.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Reduces any angle into `[0, pi)`.
pub fn reduce(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    // rem_euclid can round up to exactly PI for tiny negative inputs
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Distance on `K`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = reduce(a - b);
    d.min(PI - d)
}

/// Counter-clockwise offset from `from` to `to`, in `[0, pi)`.
pub fn ccw_offset(from: f64, to: f64) -> f64 {
    reduce(to - from)
}

/// Closed arc `[lo, hi]` of `K`, running counter-clockwise from `lo` to `hi`.
/// When `lo > hi` the arc wraps through `0 = pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleInterval {
    pub lo: f64,
    pub hi: f64,
}

impl CircleInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo: reduce(lo),
            hi: reduce(hi),
        }
    }

    pub fn point(theta: f64) -> Self {
        Self::new(theta, theta)
    }

    pub fn length(&self) -> f64 {
        ccw_offset(self.lo, self.hi)
    }

    pub fn contains(&self, theta: f64) -> bool {
        ccw_offset(self.lo, theta) <= self.length()
    }

    /// Membership in the interior of the arc.
    pub fn contains_interior(&self, theta: f64) -> bool {
        let off = ccw_offset(self.lo, theta);
        off > 0.0 && off < self.length()
    }

    pub fn intersects(&self, other: &CircleInterval) -> bool {
        self.contains(other.lo) || other.contains(self.lo)
    }

    /// `[lo - eps, hi + eps]`. Returns `None` if the widened arc would cover
    /// the whole circle.
    pub fn widen(&self, eps: f64) -> Option<CircleInterval> {
        if self.length() + 2.0 * eps >= PI {
            return None;
        }
        Some(CircleInterval::new(self.lo - eps, self.hi + eps))
    }

    /// Angle `t` of the way along the arc, `t` in `[0, 1]`.
    pub fn lerp(&self, t: f64) -> f64 {
        reduce(self.lo + t * self.length())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction() {
        assert_eq!(reduce(0.0), 0.0);
        assert_eq!(reduce(PI), 0.0);
        assert!((reduce(-0.5) - (PI - 0.5)).abs() < 1e-15);
        assert_eq!(reduce(-1e-300), 0.0);
        assert!((circle_distance(0.01, PI - 0.01) - 0.02).abs() < 1e-12);
    }

    #[test]
    fn wrapping_interval() {
        let j = CircleInterval::new(3.0, 0.2);
        assert!(j.contains(3.1));
        assert!(j.contains(0.1));
        assert!(j.contains(3.0) && j.contains(0.2));
        assert!(!j.contains(1.0));
        assert!(!j.contains_interior(3.0));
        assert!((j.length() - (PI - 3.0 + 0.2)).abs() < 1e-12);

        let k = CircleInterval::new(0.1, 1.0);
        assert!(j.intersects(&k) && k.intersects(&j));
        let far = CircleInterval::new(1.0, 2.0);
        assert!(!j.intersects(&far) && !far.intersects(&j));
        // touching endpoints count as intersecting for closed arcs
        assert!(CircleInterval::new(0.2, 0.5).intersects(&j));
    }

    #[test]
    fn degenerate_interval() {
        let j = CircleInterval::point(1.0);
        assert!(j.contains(1.0));
        assert!(!j.contains_interior(1.0));
        assert_eq!(j.length(), 0.0);
        assert!(j.widen(2.0).is_none());
        let w = j.widen(0.1).unwrap();
        assert!(w.contains_interior(1.0));
    }
}
