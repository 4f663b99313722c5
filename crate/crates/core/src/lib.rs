//! Certification of chaotic attractors in the two-dimensional border-collision
//! normal form
//!
//! ```text
//! f(x, y) = A_L (x, y) + (1, 0),  x <= 0
//! f(x, y) = A_R (x, y) + (1, 0),  x >= 0
//! ```
//!
//! with `A_s = [tau_s 1; -delta_s 0]`. The certificate is built from a trapping
//! region for an induced (first return) map on the third quadrant together with
//! an invariant expanding cone for the derivatives of that induced map.
//!
//! Module layout:
//!
//! * [`map`]: parameters, the affine branches and 2x2 linear algebra.
//! * [`partition`]: preimages of the switching line and escape times.
//! * [`trapping`]: the quadrilateral `Omega` and the induced map.
//! * [`cone`]: angle and norm maps, fixed angles, and cone checks.
//! * [`prover`]: the five step decision procedure.
//! * [`sim`]: brute force orbit simulation used as an independent check.

// `!(a > b)` is used on purpose so that NaN fails a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod cone;
pub mod map;
pub mod partition;
pub mod prover;
pub mod sim;
pub mod trapping;

pub use circle::{circle_distance, CircleInterval};
pub use map::{Mat2, ParamError, Params, Point, Side};
pub use prover::{prove_chaos, ProofOutcome, ProverOptions, Verdict};
