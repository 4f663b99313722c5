//! The candidate trapping region `Omega` for the induced map and the induced
//! map itself.
//!
//! `Omega` is the quadrilateral with vertices `S = (0, c_{p_max})`,
//! `T = (0, c_{p_min})` and their images `f(S)`, `f(T)` on the negative
//! x-axis. Each of `S` and `T` is an [`Anchor`]: the orbit of the anchor point
//! is followed through `p + 1` left steps and `q` right steps back to the third
//! quadrant, and the line through that return point and its preimage is cut
//! with the switching line to give `U` (for `S`) or `V` (for `T`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map::{Params, Point, Side};
use crate::partition::{escape, Caps, PreimageFan};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrappingError {
    #[error("p = {0} is outside the preimage fan")]
    IndexOutOfFan(usize),
    #[error("need 1 <= p_min < p_max, got ({p_min}, {p_max})")]
    BadIndices { p_min: usize, p_max: usize },
    #[error("orbit of (0, c_{p}) did not leave the left half-plane after {p} + 1 steps")]
    AnchorNotExiting { p: usize },
    #[error("orbit of (0, c_{p}) not returning to the third quadrant within {cap} right steps")]
    NotReturning { p: usize, cap: usize },
    #[error("degenerate line through the return point of (0, c_{p})")]
    DegenerateLine { p: usize },
}

/// The four inequalities that make `Omega` forward invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// `U` lies above `S`.
    UAboveS,
    /// `V` lies below `T`.
    VBelowT,
    /// `F(S)` lies right of the line through `S` and `f(S)`.
    FsRight,
    /// `F(T)` lies left of the line through `T` and `f(T)`.
    FtLeft,
}

/// The orbit data attached to one corner `(0, c_p)` of `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub p: usize,
    /// `(0, c_p)`.
    pub point: Point,
    /// `f(point) = (c_p + 1, 0)`.
    pub image: Point,
    /// `f_L^{p+1}(point)`, the first iterate with `x > 0`.
    pub exit: Point,
    /// Escape time from the right half-plane starting at `exit`.
    pub q: usize,
    /// `f_R^q(exit)`, the induced-map image of the anchor.
    pub ret: Point,
    /// `f^{-1}(ret)`, computed with the right branch inverse.
    pub ret_preimage: Point,
    /// Intersection of the line through `ret` and `ret_preimage` with `x = 0`.
    pub cut: Point,
}

impl Anchor {
    pub fn new(params: &Params, fan: &PreimageFan, p: usize, caps: &Caps) -> Result<Self, TrappingError> {
        let c = fan.intercept(p).ok_or(TrappingError::IndexOutOfFan(p))?;
        let point = Point::new(0.0, c);
        let image = params.apply(point);
        // The p-th iterate lies on the switching line where rounding could
        // send the orbit either way; the left branch is continued explicitly.
        let exit = params.iterate_branch(point, Side::Left, p + 1);
        if !(exit.x > 0.0) {
            return Err(TrappingError::AnchorNotExiting { p });
        }
        let (q, ret) =
            escape(params, exit, Side::Right, caps.chi_r).ok_or(TrappingError::NotReturning { p, cap: caps.chi_r })?;
        let ret_preimage = params.apply_branch_inverse(ret, Side::Right);
        let dx = ret_preimage.x - ret.x;
        if dx == 0.0 || !dx.is_finite() {
            return Err(TrappingError::DegenerateLine { p });
        }
        let cut = Point::new(0.0, ret.y + (ret_preimage.y - ret.y) * (-ret.x) / dx);
        if !cut.is_finite() {
            return Err(TrappingError::DegenerateLine { p });
        }
        Ok(Self {
            p,
            point,
            image,
            exit,
            q,
            ret,
            ret_preimage,
            cut,
        })
    }

    /// Violated conditions when this anchor plays the role of `S`.
    pub fn s_violations(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        if !(self.cut.y > self.point.y) {
            out.push(Condition::UAboveS);
        }
        let (s, fs, big_fs) = (self.point, self.image, self.ret);
        if !(fs.x * big_fs.y + s.y * big_fs.x < fs.x * s.y) {
            out.push(Condition::FsRight);
        }
        out
    }

    /// Violated conditions when this anchor plays the role of `T`.
    pub fn t_violations(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        if !(self.cut.y < self.point.y) {
            out.push(Condition::VBelowT);
        }
        let (t, ft, big_ft) = (self.point, self.image, self.ret);
        if !(ft.x * big_ft.y + t.y * big_ft.x > ft.x * t.y) {
            out.push(Condition::FtLeft);
        }
        out
    }

    /// Left-branch orbit `point, f(point), ..., f^n(point)`.
    fn left_orbit(&self, params: &Params, n: usize) -> Vec<Point> {
        std::iter::successors(Some(self.point), |z| Some(params.apply_branch(*z, Side::Left)))
            .take(n + 1)
            .collect()
    }

    /// Orbit from `f^p(point)` (on the switching line) through the right
    /// branch up to `f^{-1}(ret)`.
    fn right_orbit(&self, params: &Params) -> Vec<Point> {
        let on_sigma = params.iterate_branch(self.point, Side::Left, self.p);
        let mut out = vec![on_sigma, self.exit];
        let mut z = self.exit;
        for _ in 1..self.q {
            z = params.apply_branch(z, Side::Right);
            out.push(z);
        }
        out
    }
}

/// The quadrilateral `Omega` for a pair `(p_min, p_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrappingRegion {
    pub p_min: usize,
    pub p_max: usize,
    /// Anchor at `S = (0, c_{p_max})`; its cut point is `U`.
    pub s: Anchor,
    /// Anchor at `T = (0, c_{p_min})`; its cut point is `V`.
    pub t: Anchor,
    pub q_min: usize,
    pub q_max: usize,
}

impl TrappingRegion {
    pub fn build(
        params: &Params,
        fan: &PreimageFan,
        p_min: usize,
        p_max: usize,
        caps: &Caps,
    ) -> Result<Self, TrappingError> {
        if p_min < 1 || p_min >= p_max {
            return Err(TrappingError::BadIndices { p_min, p_max });
        }
        let s = Anchor::new(params, fan, p_max, caps)?;
        let t = Anchor::new(params, fan, p_min, caps)?;
        Ok(Self::from_anchors(s, t))
    }

    pub fn from_anchors(s: Anchor, t: Anchor) -> Self {
        Self {
            p_min: t.p,
            p_max: s.p,
            q_min: s.q.min(t.q),
            q_max: s.q.max(t.q) + 1,
            s,
            t,
        }
    }

    pub fn u(&self) -> Point {
        self.s.cut
    }

    pub fn v(&self) -> Point {
        self.t.cut
    }

    /// Violated conditions; empty when `Omega` is forward invariant.
    pub fn violations(&self) -> Vec<Condition> {
        let mut out = self.s.s_violations();
        out.extend(self.t.t_violations());
        out
    }

    pub fn conditions_hold(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn contains(&self, z: Point) -> bool {
        self.contains_within(z, 0.0)
    }

    /// Membership with each defining inequality relaxed by `tol`.
    pub fn contains_within(&self, z: Point, tol: f64) -> bool {
        if !(z.x < tol && z.y <= tol) {
            return false;
        }
        let (lo, hi) = self.x_bounds(z.y);
        lo - tol <= z.x && z.x <= hi + tol
    }

    /// Range of `x` inside `Omega` at height `y`.
    pub fn x_bounds(&self, y: f64) -> (f64, f64) {
        let edge = |c: f64| (c + 1.0) / c * (c - y);
        (edge(self.s.point.y), edge(self.t.point.y))
    }

    /// `[S, f(S), f(T), T]`.
    pub fn omega_polygon(&self) -> Vec<Point> {
        vec![self.s.point, self.s.image, self.t.image, self.t.point]
    }

    /// Polygon containing the image of `Omega`:
    /// `[U, F(S), f(U), f(V), F(T), V]`.
    pub fn image_polygon(&self, params: &Params) -> Vec<Point> {
        vec![
            self.u(),
            self.s.ret,
            params.apply(self.u()),
            params.apply(self.v()),
            self.t.ret,
            self.v(),
        ]
    }

    /// Auxiliary polygons tracing the orbits of the edges of `Omega`.
    pub fn diagnostic_polygons(&self, params: &Params) -> DiagnosticPolygons {
        let mut psi_l = self.s.left_orbit(params, self.p_max);
        let mut t_side = self.t.left_orbit(params, self.p_min);
        t_side.reverse();
        psi_l.extend(t_side);

        let mut psi_r = self.s.right_orbit(params);
        psi_r.push(self.u());
        psi_r.push(self.v());
        let mut t_side = self.t.right_orbit(params);
        t_side.reverse();
        psi_r.extend(t_side);

        let s_sigma = params.iterate_branch(self.s.point, Side::Left, self.p_max);
        let t_sigma = params.iterate_branch(self.t.point, Side::Left, self.p_min);
        // For p_min = 1 the T corner of Delta is the origin and f^2(T) = (1, 0)
        // sits on the x-axis edge, leaving a triangle.
        let delta = if self.p_min == 1 {
            vec![s_sigma, self.s.exit, t_sigma]
        } else {
            vec![s_sigma, self.s.exit, self.t.exit, t_sigma]
        };
        DiagnosticPolygons { psi_l, psi_r, delta }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticPolygons {
    pub psi_l: Vec<Point>,
    pub psi_r: Vec<Point>,
    pub delta: Vec<Point>,
}

/// One application of the induced map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InducedReturn {
    pub p: usize,
    pub q: usize,
    pub image: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("orbit does not return to the third quadrant within the escape caps")]
pub struct NotReturning;

/// Induced map on `x < 0, y <= 0`: `p` steps to leave the left half-plane,
/// then `q` steps to leave the right half-plane.
pub fn induced_map(params: &Params, z: Point, caps: &Caps) -> Result<InducedReturn, NotReturning> {
    let (p, exit) = escape(params, z, Side::Left, caps.chi_l).ok_or(NotReturning)?;
    let (q, _) = escape(params, exit, Side::Right, caps.chi_r).ok_or(NotReturning)?;
    let image = params.iterate_branch(params.iterate_branch(z, Side::Left, p), Side::Right, q);
    Ok(InducedReturn { p, q, image })
}
