//! Brute-force dynamics of the forward orbit of the origin: periodic attractor
//! detection, a finite-time Lyapunov exponent, and the resulting
//! classification of a parameter point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::map::{Params, Point, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub transient: usize,
    pub samples: usize,
    pub divergence_radius: f64,
    pub period_cap: usize,
    pub period_tol: f64,
    /// Selects the initial tangent direction.
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            transient: 10_000,
            samples: 100_000,
            divergence_radius: 1e8,
            period_cap: 30,
            period_tol: 1e-10,
            seed: 0,
        }
    }
}

/// Exponents within this of zero are reported as non-positive.
pub const DEAD_BAND: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Periodic { period: usize },
    NegLe { lyapunov: f64 },
    PosLe { lyapunov: f64 },
    Diverged,
}

impl Classification {
    pub fn code(&self) -> &'static str {
        match self {
            Classification::Periodic { .. } => "PERIODIC",
            Classification::NegLe { .. } => "NEG_LE",
            Classification::PosLe { .. } => "POS_LE",
            Classification::Diverged => "DIVERGED",
        }
    }

    pub fn period(&self) -> Option<usize> {
        match *self {
            Classification::Periodic { period } => Some(period),
            _ => None,
        }
    }

    pub fn lyapunov(&self) -> Option<f64> {
        match *self {
            Classification::NegLe { lyapunov } | Classification::PosLe { lyapunov } => Some(lyapunov),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("orbit diverged")]
pub struct Diverged;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub final_point: Point,
    pub max_norm: f64,
    /// Number of steps whose image is on the other side of `x = 0`.
    pub crossings: usize,
    pub diverged: bool,
}

/// Applies the map `n` times, stopping early once the orbit leaves the disc of
/// radius `radius`.
pub fn iterate_orbit(params: &Params, z0: Point, n: usize, radius: f64) -> OrbitSummary {
    let mut z = z0;
    let mut max_norm = z.norm();
    let mut crossings = 0;
    for _ in 0..n {
        let next = params.apply(z);
        if Side::of(next) != Side::of(z) {
            crossings += 1;
        }
        z = next;
        let r = z.norm();
        max_norm = max_norm.max(r);
        if !(r <= radius) {
            return OrbitSummary {
                final_point: z,
                max_norm,
                crossings,
                diverged: true,
            };
        }
    }
    OrbitSummary {
        final_point: z,
        max_norm,
        crossings,
        diverged: false,
    }
}

/// Origin orbit after the transient.
fn settle(params: &Params, opts: &SimOptions) -> Result<Point, Diverged> {
    let s = iterate_orbit(params, Point::ORIGIN, opts.transient, opts.divergence_radius);
    if s.diverged {
        Err(Diverged)
    } else {
        Ok(s.final_point)
    }
}

fn smallest_period(params: &Params, z: Point, opts: &SimOptions) -> Option<usize> {
    let mut w = z;
    for k in 1..=opts.period_cap {
        w = params.apply(w);
        if (w - z).norm() < opts.period_tol {
            return Some(k);
        }
    }
    None
}

/// Period of an attracting cycle reached by the origin's orbit, confirmed
/// after a second transient block.
pub fn detect_periodic(params: &Params, opts: &SimOptions) -> Result<Option<usize>, Diverged> {
    let z = settle(params, opts)?;
    let Some(k) = smallest_period(params, z, opts) else {
        return Ok(None);
    };
    let again = iterate_orbit(params, z, opts.transient, opts.divergence_radius);
    if again.diverged {
        return Err(Diverged);
    }
    Ok((smallest_period(params, again.final_point, opts) == Some(k)).then_some(k))
}

/// Point of the settled periodic orbit, if one is detected.
pub fn periodic_orbit(params: &Params, opts: &SimOptions) -> Option<Vec<Point>> {
    let k = detect_periodic(params, opts).ok()??;
    let z = settle(params, opts).ok()?;
    Some(
        std::iter::successors(Some(z), |w| Some(params.apply(*w)))
            .take(k)
            .collect(),
    )
}

fn initial_tangent(seed: u64) -> Point {
    // golden-ratio sequence on the half circle
    let t = (seed as f64 * 0.618_033_988_749_894_9).fract();
    let theta = PI * (0.25 + t);
    Point::new(theta.cos(), theta.sin())
}

/// Average log-stretch of a tangent vector along `samples` steps of the
/// origin's orbit after the transient.
pub fn estimate_lyapunov(params: &Params, opts: &SimOptions) -> Result<f64, Diverged> {
    let mut z = settle(params, opts)?;
    let left = params.branch_matrix(Side::Left);
    let right = params.branch_matrix(Side::Right);
    let mut v = initial_tangent(opts.seed);
    let mut sum = 0.0;
    for _ in 0..opts.samples {
        let jac = match Side::of(z) {
            Side::Left => &left,
            Side::Right => &right,
        };
        v = jac.apply(v);
        let n = v.norm();
        sum += n.ln();
        v = v.scale(1.0 / n);
        z = params.apply(z);
        if !(z.norm() <= opts.divergence_radius) {
            return Err(Diverged);
        }
    }
    Ok(sum / opts.samples as f64)
}

pub fn classify_point(params: &Params, opts: &SimOptions) -> Classification {
    match detect_periodic(params, opts) {
        Err(Diverged) => return Classification::Diverged,
        Ok(Some(period)) => return Classification::Periodic { period },
        Ok(None) => {}
    }
    match estimate_lyapunov(params, opts) {
        Err(Diverged) => Classification::Diverged,
        Ok(l) if l > DEAD_BAND => Classification::PosLe { lyapunov: l },
        Ok(l) => Classification::NegLe { lyapunov: l },
    }
}

/// `n` points of the origin's orbit after the transient.
pub fn attractor_points(params: &Params, opts: &SimOptions, n: usize) -> Result<Vec<Point>, Diverged> {
    let z = settle(params, opts)?;
    let pts: Vec<Point> = std::iter::successors(Some(z), |w| Some(params.apply(*w)))
        .take(n)
        .collect();
    if pts.iter().any(|p| !(p.norm() <= opts.divergence_radius)) {
        return Err(Diverged);
    }
    Ok(pts)
}
