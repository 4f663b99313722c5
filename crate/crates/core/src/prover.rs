//! The five step decision procedure.
//!
//! 1. `p_max`: smallest `p` in `2..=min(p*, p_cap)` whose corner `(0, c_p)`
//!    satisfies the two `S` conditions.
//! 2. `p_min`: largest `p < p_max` whose corner satisfies the two `T`
//!    conditions.
//! 3. Every `M_{p,q}` over the `(p, q)` rectangle has real eigenvalues of
//!    distinct modulus.
//! 4. The stable and unstable fixed angles are unmixed, giving the arc `J`.
//! 5. `J` avoids the `H <= 1` arc of every `M_{p,q}`.
//!
//! If all five pass, the cone over `J` is invariant and expanding for the
//! induced map on `Omega`, and every orbit in `Omega` (off a null set) has
//! Lyapunov exponent at least `ln(c) / (p_max + q_max)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::CircleInterval;
use crate::cone::{
    expansion_check, fixed_points, unit_crossings, unmixed_interval, AnglePair, ExpansionFailure, GammaSet,
    UnitCrossings,
};
use crate::map::Params;
use crate::partition::{Caps, PStar, PreimageFan, DEFAULT_CHI_R_CAP};
use crate::trapping::{Anchor, TrappingError, TrappingRegion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProverOptions {
    /// Largest `p` tried for `p_max`.
    pub p_cap: usize,
    pub chi_r_cap: usize,
    /// Let matrices with `H > 1` everywhere pass step 5. Off by default.
    pub accept_all_above: bool,
}

impl Default for ProverOptions {
    fn default() -> Self {
        Self {
            p_cap: 15,
            chi_r_cap: DEFAULT_CHI_R_CAP,
            accept_all_above: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Chaos,
    Stop,
}

/// Fixed angles and unit crossings of one `M_{p,q}`, kept for audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub p: usize,
    pub q: usize,
    pub fixed: Option<AnglePair>,
    pub crossings: Option<UnitCrossings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofOutcome {
    pub params: Params,
    pub verdict: Verdict,
    pub stop_step: Option<u8>,
    pub stop_reason: Option<String>,
    pub p_star: PStar,
    pub p_min: Option<usize>,
    pub p_max: Option<usize>,
    pub q_min: Option<usize>,
    pub q_max: Option<usize>,
    pub region: Option<TrappingRegion>,
    pub j: Option<CircleInterval>,
    pub expansion_factor: Option<f64>,
    pub lyapunov_bound: Option<f64>,
    pub failing_pair: Option<(usize, usize)>,
    pub pairs: Vec<PairRecord>,
}

impl ProofOutcome {
    fn new(params: Params, p_star: PStar) -> Self {
        Self {
            params,
            verdict: Verdict::Stop,
            stop_step: None,
            stop_reason: None,
            p_star,
            p_min: None,
            p_max: None,
            q_min: None,
            q_max: None,
            region: None,
            j: None,
            expansion_factor: None,
            lyapunov_bound: None,
            failing_pair: None,
            pairs: Vec::new(),
        }
    }

    fn stop(mut self, step: u8, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Stop;
        self.stop_step = Some(step);
        self.stop_reason = Some(reason.into());
        self
    }

    pub fn is_chaos(&self) -> bool {
        self.verdict == Verdict::Chaos
    }

    pub fn gamma(&self) -> Option<GammaSet> {
        Some(GammaSet {
            p_min: self.p_min?,
            p_max: self.p_max?,
            q_min: self.q_min?,
            q_max: self.q_max?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("expansion factor must exceed 1, got {0}")]
pub struct BoundError(pub f64);

/// `ln(c) / (p_max + q_max)`, a lower bound on the Lyapunov exponent of `f`.
pub fn certified_bound(c: f64, p_max: usize, q_max: usize) -> Result<f64, BoundError> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(BoundError(c));
    }
    Ok(c.ln() / (p_max + q_max) as f64)
}

fn describe(err: &TrappingError) -> &'static str {
    match err {
        TrappingError::NotReturning { .. } => "not returning",
        TrappingError::AnchorNotExiting { .. } => "anchor orbit does not exit",
        TrappingError::DegenerateLine { .. } => "degenerate line",
        TrappingError::IndexOutOfFan(_) | TrappingError::BadIndices { .. } => "bad index",
    }
}

pub fn prove_chaos(params: &Params, options: &ProverOptions) -> ProofOutcome {
    let fan = PreimageFan::new(params, options.p_cap.max(2));
    let caps = Caps {
        chi_r: options.chi_r_cap,
        ..Caps::for_params(params)
    };
    let mut out = ProofOutcome::new(*params, fan.p_star);

    // Step 1
    let top = fan.p_star.clamp(options.p_cap).min(fan.len());
    let mut failures = Vec::new();
    let mut s_anchor = None;
    for p in 2..=top {
        match Anchor::new(params, &fan, p, &caps) {
            Ok(a) if a.s_violations().is_empty() => {
                s_anchor = Some(a);
                break;
            }
            Ok(_) => {}
            Err(e) => failures.push(describe(&e)),
        }
    }
    let Some(s) = s_anchor else {
        let reason = if top < 2 {
            "no candidate p_max".to_string()
        } else if failures.len() == top - 1 {
            format!("not returning: no candidate in 2..={top} returns to the third quadrant")
        } else {
            format!("no p in 2..={top} with U above S and F(S) right of S f(S)")
        };
        return out.stop(1, reason);
    };
    out.p_max = Some(s.p);

    // Step 2
    let mut t_anchor = None;
    let mut failures = 0;
    for p in (1..s.p).rev() {
        match Anchor::new(params, &fan, p, &caps) {
            Ok(a) if a.t_violations().is_empty() => {
                t_anchor = Some(a);
                break;
            }
            Ok(_) => {}
            Err(_) => failures += 1,
        }
    }
    let Some(t) = t_anchor else {
        let reason = if failures == s.p - 1 {
            format!(
                "not returning: no candidate in 1..={} returns to the third quadrant",
                s.p - 1
            )
        } else {
            format!("no p in 1..={} with V below T and F(T) left of T f(T)", s.p - 1)
        };
        return out.stop(2, reason);
    };
    let region = TrappingRegion::from_anchors(s, t);
    out.p_min = Some(region.p_min);
    out.q_min = Some(region.q_min);
    out.q_max = Some(region.q_max);
    out.region = Some(region);

    // Step 3
    let gamma = out.gamma().expect("gamma fields set above");
    let matrices = gamma.matrices(params);
    out.pairs = matrices
        .iter()
        .map(|&(p, q, ref m)| PairRecord {
            p,
            q,
            fixed: fixed_points(m),
            crossings: None,
        })
        .collect();
    if let Some(bad) = out.pairs.iter().find(|r| r.fixed.is_none()) {
        let (p, q) = (bad.p, bad.q);
        out.failing_pair = Some((p, q));
        return out.stop(
            3,
            format!("M_{{{p},{q}}} does not have real eigenvalues of distinct modulus"),
        );
    }

    // Step 4
    let angles: Vec<AnglePair> = out.pairs.iter().filter_map(|r| r.fixed).collect();
    let Some(unmixed) = unmixed_interval(&angles) else {
        return out.stop(4, "fixed points are mixed");
    };
    let j = unmixed.interval;
    out.j = Some(j);

    // Step 5
    for (record, (_, _, m)) in out.pairs.iter_mut().zip(&matrices) {
        record.crossings = Some(unit_crossings(m));
    }
    match expansion_check(&matrices, &j, options.accept_all_above) {
        Ok(c) => {
            let (p_max, q_max) = (region.p_max, region.q_max);
            let bound = certified_bound(c, p_max, q_max).expect("expansion factor checked above 1");
            out.verdict = Verdict::Chaos;
            out.expansion_factor = Some(c);
            out.lyapunov_bound = Some(bound);
            out
        }
        Err((p, q, why)) => {
            out.failing_pair = Some((p, q));
            let reason = match why {
                ExpansionFailure::NoCrossings { all_above: true } => {
                    format!("H = 1 has no crossings for M_{{{p},{q}}} (H > 1 everywhere)")
                }
                ExpansionFailure::NoCrossings { all_above: false } => {
                    format!("H = 1 has no crossings for M_{{{p},{q}}} (H <= 1 everywhere)")
                }
                ExpansionFailure::Overlap => format!("J meets the H <= 1 arc of M_{{{p},{q}}}"),
                ExpansionFailure::NotAboveOne => format!("min of H over J is not above 1 for M_{{{p},{q}}}"),
            };
            out.stop(5, reason)
        }
    }
}
