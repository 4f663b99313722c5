//! The normal-form map, its two affine branches and the small fixed-size
//! linear algebra used everywhere else.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

/// Parameters `(tau_L, delta_L, tau_R, delta_R)` of the normal form. The
/// border-collision parameter `mu` is fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    tau_l: f64,
    delta_l: f64,
    tau_r: f64,
    delta_r: f64,
}

impl Params {
    pub fn new(tau_l: f64, delta_l: f64, tau_r: f64, delta_r: f64) -> Result<Self, ParamError> {
        for (name, v) in [
            ("tau_L", tau_l),
            ("delta_L", delta_l),
            ("tau_R", tau_r),
            ("delta_R", delta_r),
        ] {
            if !v.is_finite() {
                return Err(ParamError::NonFinite(name));
            }
        }
        if tau_l <= 0.0 {
            return Err(ParamError::NotPositive("tau_L"));
        }
        if delta_l <= 0.0 {
            return Err(ParamError::NotPositive("delta_L"));
        }
        if delta_r <= 0.0 {
            return Err(ParamError::NotPositive("delta_R"));
        }
        Ok(Self {
            tau_l,
            delta_l,
            tau_r,
            delta_r,
        })
    }

    pub fn tau_l(&self) -> f64 {
        self.tau_l
    }

    pub fn delta_l(&self) -> f64 {
        self.delta_l
    }

    pub fn tau_r(&self) -> f64 {
        self.tau_r
    }

    pub fn delta_r(&self) -> f64 {
        self.delta_r
    }

    pub fn trace(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.tau_l,
            Side::Right => self.tau_r,
        }
    }

    pub fn det(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.delta_l,
            Side::Right => self.delta_r,
        }
    }

    /// The map itself. The left branch is used on the switching line, where
    /// both branches agree.
    pub fn apply(&self, z: Point) -> Point {
        self.apply_branch(z, Side::of(z))
    }

    pub fn apply_branch(&self, z: Point, side: Side) -> Point {
        let tau = self.trace(side);
        let delta = self.det(side);
        Point::new(tau * z.x + z.y + 1.0, -delta * z.x)
    }

    pub fn apply_branch_inverse(&self, z: Point, side: Side) -> Point {
        let tau = self.trace(side);
        let delta = self.det(side);
        let x = -z.y / delta;
        Point::new(x, z.x - 1.0 - tau * x)
    }

    /// Applies the given branch `n` times.
    pub fn iterate_branch(&self, mut z: Point, side: Side, n: usize) -> Point {
        for _ in 0..n {
            z = self.apply_branch(z, side);
        }
        z
    }

    /// Jacobian of the branch on `side`.
    pub fn branch_matrix(&self, side: Side) -> Mat2 {
        Mat2::new(self.trace(side), 1.0, -self.det(side), 0.0)
    }

    /// `M_{p,q} = A_R^q A_L^p`, the derivative of `p` left steps followed by
    /// `q` right steps.
    pub fn return_matrix(&self, p: u32, q: u32) -> Mat2 {
        self.branch_matrix(Side::Right)
            .pow(q)
            .matmul(&self.branch_matrix(Side::Left).pow(p))
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(tau_L={}, delta_L={}, tau_R={}, delta_R={})",
            self.tau_l, self.delta_l, self.tau_r, self.delta_r
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Branch used by the map at `z` (`x <= 0` is left).
    pub fn of(z: Point) -> Side {
        if z.x <= 0.0 {
            Side::Left
        } else {
            Side::Right
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Row-major 2x2 matrix `[a b; c d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn matmul(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, n: u32) -> Mat2 {
        (0..n).fold(Mat2::IDENTITY, |acc, _| acc.matmul(self))
    }

    pub fn apply(&self, v: Point) -> Point {
        Point::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        self.matmul(&rhs)
    }
}
