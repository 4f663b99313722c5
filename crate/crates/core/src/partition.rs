//! Preimages of the switching line `x = 0` under the left branch, the regions
//! `D_p` between consecutive preimages, and the escape times from the closed
//! half-planes.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::map::{Params, Point, Side};

/// Snapping tolerance for `pi / phi - 1` landing on an integer. At such
/// parameters the last preimage line is exactly horizontal.
const INTEGER_SNAP: f64 = 1e-9;

/// Upper limit on the escape time from the left half-plane.
pub const CHI_L_CAP_LIMIT: usize = 64;
pub const DEFAULT_CHI_R_CAP: usize = 1000;

/// Non-vertical line `y = m x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub m: f64,
    pub c: f64,
}

impl Line {
    pub fn y_at(&self, x: f64) -> f64 {
        self.m * x + self.c
    }

    /// Pulls the line back through the left branch:
    /// `f_L(x, y)` lies on `self` iff `(x, y)` lies on the result.
    /// Requires `m != 0`.
    pub fn pull_back_left(&self, params: &Params) -> Line {
        let (tau, delta) = (params.tau_l(), params.delta_l());
        Line {
            m: -(delta + tau * self.m) / self.m,
            c: -self.c / self.m - 1.0,
        }
    }
}

/// Index of the first preimage line with non-negative slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PStar {
    Finite(usize),
    Infinite,
}

impl PStar {
    /// `min(self, n)`.
    pub fn clamp(self, n: usize) -> usize {
        match self {
            PStar::Finite(p) => p.min(n),
            PStar::Infinite => n,
        }
    }
}

impl fmt::Display for PStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PStar::Finite(p) => write!(f, "{p}"),
            PStar::Infinite => f.write_str("inf"),
        }
    }
}

/// Closed form for the index of the first non-negative slope.
pub fn p_star(params: &Params) -> PStar {
    let ratio = params.tau_l() / (2.0 * params.delta_l().sqrt());
    if ratio >= 1.0 {
        return PStar::Infinite;
    }
    let phi = ratio.acos();
    let x = PI / phi - 1.0;
    let nearest = x.round();
    let p = if (x - nearest).abs() < INTEGER_SNAP {
        nearest
    } else {
        x.ceil()
    };
    PStar::Finite((p as usize).max(2))
}

/// The lines `f_L^{-i}(Sigma)`, `i = 1..`, up to and including index `p*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageFan {
    lines: Vec<Line>,
    pub p_star: PStar,
}

impl PreimageFan {
    /// Builds lines `1..=min(k, p*)`.
    pub fn new(params: &Params, k: usize) -> Self {
        assert!(k >= 1, "fan needs at least one line");
        let p_star = p_star(params);
        let n = p_star.clamp(k);
        let mut lines = Vec::with_capacity(n);
        let mut line = Line {
            m: -params.tau_l(),
            c: -1.0,
        };
        lines.push(line);
        for _ in 1..n {
            let next = line.pull_back_left(params);
            // slopes converge when p* is infinite, so only rounding-level
            // monotonicity can be asked of them
            debug_assert!(
                next.m >= line.m - 1e-12 * line.m.abs() && next.c < line.c,
                "fan lost monotonicity"
            );
            lines.push(next);
            line = next;
        }
        Self { lines, p_star }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Line `i`, 1-based.
    pub fn line(&self, i: usize) -> Option<Line> {
        i.checked_sub(1).and_then(|k| self.lines.get(k)).copied()
    }

    /// `c_i`, 1-based.
    pub fn intercept(&self, i: usize) -> Option<f64> {
        self.line(i).map(|l| l.c)
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Index `p` with `z` in `D_p`. `D_1` is everything in the left half-plane
    /// strictly above line 1; `D_p` has a strict lower and non-strict upper
    /// boundary. `None` for `x > 0` and for points below the last line.
    pub fn region(&self, z: Point) -> Option<usize> {
        if z.x > 0.0 {
            return None;
        }
        let first = self.lines.first()?;
        if z.y > first.y_at(z.x) {
            return Some(1);
        }
        self.lines
            .windows(2)
            .position(|w| w[1].y_at(z.x) < z.y && z.y <= w[0].y_at(z.x))
            .map(|k| k + 2)
    }
}

/// Escape-time limits for the induced-map computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub chi_l: usize,
    pub chi_r: usize,
}

impl Caps {
    /// `chi_L` is capped at `p* + 1` (the escape time of points on line `p*`)
    /// clamped to [`CHI_L_CAP_LIMIT`].
    pub fn for_params(params: &Params) -> Self {
        let chi_l = match p_star(params) {
            PStar::Finite(p) => (p + 1).min(CHI_L_CAP_LIMIT),
            PStar::Infinite => CHI_L_CAP_LIMIT,
        };
        Self {
            chi_l,
            chi_r: DEFAULT_CHI_R_CAP,
        }
    }
}

/// Smallest `i` in `1..=cap` such that the `i`-th iterate leaves the closed
/// half-plane of `side`, together with that iterate.
pub fn escape(params: &Params, mut z: Point, side: Side, cap: usize) -> Option<(usize, Point)> {
    for i in 1..=cap {
        z = params.apply(z);
        let left = match side {
            Side::Left => z.x > 0.0,
            Side::Right => z.x < 0.0,
        };
        if left {
            return Some((i, z));
        }
        if !z.is_finite() {
            return None;
        }
    }
    None
}

/// Escape time from `x <= 0`.
pub fn chi_l(params: &Params, z: Point, cap: usize) -> Option<usize> {
    escape(params, z, Side::Left, cap).map(|(i, _)| i)
}

/// Escape time from `x >= 0`.
pub fn chi_r(params: &Params, z: Point, cap: usize) -> Option<usize> {
    escape(params, z, Side::Right, cap).map(|(i, _)| i)
}
