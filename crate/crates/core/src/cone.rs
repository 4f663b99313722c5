//! Action of the return matrices `M_{p,q} = A_R^q A_L^p` on directions and
//! lengths, and the checks that turn a family of such matrices into an
//! invariant expanding cone.
//!
//! Directions are angles on `K = [0, pi)`. For a unit vector `v(theta)`,
//! [`angle_map`] is the direction of `M v` and [`norm_map`] its length. With
//! `det M > 0` the angle map is an orientation preserving circle
//! diffeomorphism, so the image of an arc is the arc between the images of its
//! endpoints.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle::{ccw_offset, circle_distance, reduce, CircleInterval};
use crate::map::{Mat2, Params, Point};

/// Tolerance for an angle to count as lying on an arc.
pub const ANGLE_TOL: f64 = 1e-9;
/// Stable angles closer than this are merged.
pub const MERGE_TOL: f64 = 1e-10;
/// Threshold for the degenerate cases of the unit-crossing quadratic.
pub const QUADRATIC_EPS: f64 = 1e-12;

pub fn unit_vector(theta: f64) -> Point {
    let (s, c) = theta.sin_cos();
    Point::new(c, s)
}

/// Direction of `M v(theta)`, reduced to `[0, pi)`.
pub fn angle_map(m: &Mat2, theta: f64) -> f64 {
    let w = m.apply(unit_vector(theta));
    reduce(w.y.atan2(w.x))
}

/// `|M v(theta)|`.
pub fn norm_map(m: &Mat2, theta: f64) -> f64 {
    m.apply(unit_vector(theta)).norm()
}

/// `dG/dtheta = det M / H(theta)^2`.
pub fn angle_derivative(m: &Mat2, theta: f64) -> f64 {
    let h = norm_map(m, theta);
    m.det() / (h * h)
}

/// `H(theta)^2 = alpha + beta cos(2 theta) + gamma sin(2 theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormHarmonics {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl NormHarmonics {
    pub fn of(m: &Mat2) -> Self {
        let (a, b, c, d) = (m.a, m.b, m.c, m.d);
        Self {
            alpha: 0.5 * (a * a + b * b + c * c + d * d),
            beta: 0.5 * (a * a + c * c - b * b - d * d),
            gamma: a * b + c * d,
        }
    }

    pub fn norm_sq(&self, theta: f64) -> f64 {
        let (s, c) = (2.0 * theta).sin_cos();
        self.alpha + self.beta * c + self.gamma * s
    }

    /// `d(H^2)/dtheta`.
    pub fn slope(&self, theta: f64) -> f64 {
        let (s, c) = (2.0 * theta).sin_cos();
        2.0 * (self.gamma * c - self.beta * s)
    }

    /// Angle where `H` attains its minimum on `K`.
    pub fn argmin(&self) -> f64 {
        reduce(0.5 * (self.gamma.atan2(self.beta) + PI))
    }

    /// Minimum of `H` over the closed arc `arc`.
    pub fn min_norm_on(&self, arc: &CircleInterval) -> f64 {
        let mut lo = self.norm_sq(arc.lo).min(self.norm_sq(arc.hi));
        let crit = self.argmin();
        if arc.contains(crit) {
            lo = lo.min(self.norm_sq(crit));
        }
        lo.max(0.0).sqrt()
    }
}

/// Stable and unstable fixed angles of the angle map of a matrix with real
/// eigenvalues of distinct modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    /// Direction of the dominant eigenvector.
    pub stable: f64,
    pub unstable: f64,
    /// `lambda_2 / lambda_1`, the derivative of the angle map at `stable`.
    pub eta: f64,
}

/// `det M < trace(M)^2 / 4`.
pub fn has_real_distinct_eigenvalues(m: &Mat2) -> bool {
    m.det() < 0.25 * m.trace() * m.trace()
}

/// Eigen-direction for eigenvalue `lambda`: whichever of the two rows of the
/// adjugate of `M - lambda I` is better conditioned.
fn eigen_angle(m: &Mat2, lambda: f64) -> f64 {
    let u = Point::new(m.b, lambda - m.a);
    let w = Point::new(lambda - m.d, m.c);
    let v = if u.norm() >= w.norm() { u } else { w };
    reduce(v.y.atan2(v.x))
}

/// Fixed angles of the angle map, or `None` unless
/// `det M < trace(M)^2 / 4` with eigenvalues of distinct modulus.
pub fn fixed_points(m: &Mat2) -> Option<AnglePair> {
    if !has_real_distinct_eigenvalues(m) {
        return None;
    }
    let half = 0.5 * m.trace();
    let disc = half * half - m.det();
    let root = disc.sqrt();
    // Dominant eigenvalue without cancellation, the other from the product.
    let l1 = if half >= 0.0 { half + root } else { half - root };
    if l1 == 0.0 {
        return None;
    }
    let l2 = m.det() / l1;
    if l1.abs() == l2.abs() {
        return None;
    }
    Some(AnglePair {
        stable: eigen_angle(m, l1),
        unstable: eigen_angle(m, l2),
        eta: l2 / l1,
    })
}

/// Minimal arc containing every stable angle and no unstable angle, with
/// stable angles at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unmixed {
    pub interval: CircleInterval,
    /// Index (into the input slice) of a pair whose stable angle is `lo`.
    pub lo_witness: usize,
    /// Index of a pair whose stable angle is `hi`.
    pub hi_witness: usize,
}

/// Finds the interval `J`, or `None` when the fixed angles are mixed.
///
/// The circularly sorted stable angles cut `K` into gaps. An admissible arc is
/// the complement of one open gap, so `J` exists iff one gap holds every
/// unstable angle.
pub fn unmixed_interval(pairs: &[AnglePair]) -> Option<Unmixed> {
    if pairs.is_empty() {
        return None;
    }
    let mut stable: Vec<(f64, usize)> = pairs.iter().enumerate().map(|(i, p)| (p.stable, i)).collect();
    stable.sort_by(|a, b| a.0.total_cmp(&b.0));
    // merge near-duplicates, also across the 0 = pi seam
    let mut distinct: Vec<(f64, usize)> = Vec::with_capacity(stable.len());
    for s in stable {
        match distinct.last() {
            Some(last) if circle_distance(last.0, s.0) < MERGE_TOL => {}
            _ => distinct.push(s),
        }
    }
    if distinct.len() > 1 && circle_distance(distinct[0].0, distinct[distinct.len() - 1].0) < MERGE_TOL {
        distinct.pop();
    }

    let n = distinct.len();
    let mut best: Option<Unmixed> = None;
    for k in 0..n {
        let (start, _) = distinct[k];
        let (end, _) = distinct[(k + 1) % n];
        let gap = if n == 1 { PI } else { ccw_offset(start, end) };
        let holds_all = pairs.iter().all(|p| {
            let off = ccw_offset(start, p.unstable);
            off > 0.0 && off < gap
        });
        if holds_all {
            let candidate = Unmixed {
                interval: CircleInterval::new(end, start),
                lo_witness: distinct[(k + 1) % n].1,
                hi_witness: distinct[k].1,
            };
            let shorter = best.is_none_or(|b| candidate.interval.length() < b.interval.length());
            if shorter {
                best = Some(candidate);
            }
        }
    }
    best
}

/// The rectangle of `(p, q)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaSet {
    pub p_min: usize,
    pub p_max: usize,
    pub q_min: usize,
    pub q_max: usize,
}

impl GammaSet {
    /// Pairs with `p` running down from `p_max` and `q` up from `q_min`.
    /// Checks report the first failing pair in this order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.p_min..=self.p_max)
            .rev()
            .flat_map(move |p| (self.q_min..=self.q_max).map(move |q| (p, q)))
    }

    pub fn len(&self) -> usize {
        (self.p_max + 1 - self.p_min) * (self.q_max + 1 - self.q_min)
    }

    pub fn is_empty(&self) -> bool {
        self.p_max < self.p_min || self.q_max < self.q_min
    }

    /// `(p, q, M_{p,q})` for every pair, in [`GammaSet::pairs`] order.
    pub fn matrices(&self, params: &Params) -> Vec<(usize, usize, Mat2)> {
        self.pairs()
            .map(|(p, q)| (p, q, params.return_matrix(p as u32, q as u32)))
            .collect()
    }
}

fn within(arc: &CircleInterval, theta: f64, tol: f64) -> bool {
    arc.contains(theta) || circle_distance(theta, arc.lo) <= tol || circle_distance(theta, arc.hi) <= tol
}

/// `G(J) subset J` for every matrix, checked on the endpoints of `J` with
/// [`ANGLE_TOL`] slack.
pub fn invariance_check(matrices: &[(usize, usize, Mat2)], j: &CircleInterval) -> bool {
    matrices
        .iter()
        .all(|(_, _, m)| within(j, angle_map(m, j.lo), ANGLE_TOL) && within(j, angle_map(m, j.hi), ANGLE_TOL))
}

/// `G(J_eps) subset int(J_eps)` for every matrix, with
/// `J_eps = [lo - eps, hi + eps]`.
pub fn contracting_margin_check(matrices: &[(usize, usize, Mat2)], j: &CircleInterval, eps: f64) -> bool {
    let Some(wide) = j.widen(eps) else {
        return false;
    };
    matrices
        .iter()
        .all(|(_, _, m)| wide.contains_interior(angle_map(m, wide.lo)) && wide.contains_interior(angle_map(m, wide.hi)))
}

/// Largest `eps` in `(0, upper]` passing [`contracting_margin_check`], found
/// by bisection to within `tol`. `None` if even `tol` fails.
pub fn contracting_margin(matrices: &[(usize, usize, Mat2)], j: &CircleInterval, upper: f64, tol: f64) -> Option<f64> {
    if !contracting_margin_check(matrices, j, tol) {
        return None;
    }
    if contracting_margin_check(matrices, j, upper) {
        return Some(upper);
    }
    let (mut good, mut bad) = (tol, upper);
    while bad - good > tol {
        let mid = 0.5 * (good + bad);
        if contracting_margin_check(matrices, j, mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(good)
}

/// Solutions of `H(theta) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UnitCrossings {
    /// Two crossings; `H <= 1` exactly on the arc `[dec, inc]`.
    Crossing { dec: f64, inc: f64 },
    /// No crossings and `H > 1` everywhere.
    AllAbove,
    /// No crossings and `H <= 1` everywhere, or a tangency.
    NotExpanding,
}

impl UnitCrossings {
    pub fn arc(&self) -> Option<CircleInterval> {
        match *self {
            UnitCrossings::Crossing { dec, inc } => Some(CircleInterval::new(dec, inc)),
            _ => None,
        }
    }
}

/// Roots of `(b^2 + d^2 - 1) t^2 + 2 (a b + c d) t + (a^2 + c^2 - 1) = 0`
/// with `t = tan(theta)`, as angles.
fn unit_roots(m: &Mat2) -> Option<(f64, f64)> {
    let (a, b, c, d) = (m.a, m.b, m.c, m.d);
    let qa = b * b + d * d - 1.0;
    let qb = 2.0 * (a * b + c * d);
    let qc = a * a + c * c - 1.0;
    if qa.abs() < QUADRATIC_EPS {
        // theta = pi/2 is a root; the other comes from the linear part
        if qb.abs() < QUADRATIC_EPS {
            return None;
        }
        return Some((reduce((-qc / qb).atan()), 0.5 * PI));
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= QUADRATIC_EPS {
        return None;
    }
    let s = disc.sqrt();
    let big = -0.5 * (qb + qb.signum() * s);
    let big = if big == 0.0 { -0.5 * s } else { big };
    let t1 = big / qa;
    let t2 = qc / big;
    let (r1, r2) = (reduce(t1.atan()), reduce(t2.atan()));
    if circle_distance(r1, r2) < MERGE_TOL {
        return None;
    }
    Some((r1, r2))
}

pub fn unit_crossings(m: &Mat2) -> UnitCrossings {
    let harmonics = NormHarmonics::of(m);
    let Some((r1, r2)) = unit_roots(m) else {
        return if harmonics.norm_sq(0.0) > 1.0 {
            UnitCrossings::AllAbove
        } else {
            UnitCrossings::NotExpanding
        };
    };
    let (mut dec, mut inc) = if harmonics.slope(r1) < 0.0 { (r1, r2) } else { (r2, r1) };
    let mid = CircleInterval::new(dec, inc).lerp(0.5);
    if harmonics.norm_sq(mid) >= 1.0 {
        // slopes too flat to label reliably; the midpoint decides
        std::mem::swap(&mut dec, &mut inc);
    }
    UnitCrossings::Crossing { dec, inc }
}

/// Why the expansion check failed for a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExpansionFailure {
    /// `H = 1` has no pair of crossings.
    NoCrossings { all_above: bool },
    /// `J` meets the arc where `H <= 1`.
    Overlap,
    /// Numerically `min H <= 1` despite disjoint arcs.
    NotAboveOne,
}

/// Checks `J` against the `H <= 1` arc of every matrix and returns the
/// expansion factor `min H` over `J` and all matrices.
///
/// `accept_all_above` treats matrices with `H > 1` everywhere as passing.
pub fn expansion_check(
    matrices: &[(usize, usize, Mat2)],
    j: &CircleInterval,
    accept_all_above: bool,
) -> Result<f64, (usize, usize, ExpansionFailure)> {
    let mut factor = f64::INFINITY;
    for &(p, q, ref m) in matrices {
        match unit_crossings(m) {
            UnitCrossings::Crossing { dec, inc } => {
                if CircleInterval::new(dec, inc).intersects(j) {
                    return Err((p, q, ExpansionFailure::Overlap));
                }
            }
            UnitCrossings::AllAbove if accept_all_above => {}
            UnitCrossings::AllAbove => return Err((p, q, ExpansionFailure::NoCrossings { all_above: true })),
            UnitCrossings::NotExpanding => return Err((p, q, ExpansionFailure::NoCrossings { all_above: false })),
        }
        let h = NormHarmonics::of(m).min_norm_on(j);
        if !(h > 1.0) {
            return Err((p, q, ExpansionFailure::NotAboveOne));
        }
        factor = factor.min(h);
    }
    Ok(factor)
}
