//! JSON documents written by `prove`, `simulate` and `phase`.

use bcnf_core::partition::Line;
use bcnf_core::prover::PairRecord;
use bcnf_core::sim::Classification;
use bcnf_core::{Params, Point, ProofOutcome, Verdict};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsDoc {
    #[serde(rename = "tau_L")]
    pub tau_l: f64,
    #[serde(rename = "delta_L")]
    pub delta_l: f64,
    #[serde(rename = "tau_R")]
    pub tau_r: f64,
    #[serde(rename = "delta_R")]
    pub delta_r: f64,
}

impl From<&Params> for ParamsDoc {
    fn from(p: &Params) -> Self {
        Self {
            tau_l: p.tau_l(),
            delta_l: p.delta_l(),
            tau_r: p.tau_r(),
            delta_r: p.delta_r(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProveDoc {
    pub verdict: Verdict,
    pub stop_step: Option<u8>,
    pub p_min: Option<usize>,
    pub p_max: Option<usize>,
    pub q_min: Option<usize>,
    pub q_max: Option<usize>,
    #[serde(rename = "J")]
    pub j: Option<[f64; 2]>,
    pub expansion_factor: Option<f64>,
    pub lyap_bound: Option<f64>,
    pub failing_pair: Option<[usize; 2]>,
    pub stop_reason: Option<String>,
    pub p_star: Option<usize>,
    pub params: ParamsDoc,
    /// Fixed angles and unit crossings of every `M_{p,q}` examined.
    pub pairs: Vec<PairRecord>,
}

impl From<&ProofOutcome> for ProveDoc {
    fn from(o: &ProofOutcome) -> Self {
        Self {
            verdict: o.verdict,
            stop_step: o.stop_step,
            p_min: o.p_min,
            p_max: o.p_max,
            q_min: o.q_min,
            q_max: o.q_max,
            j: o.j.map(|j| [j.lo, j.hi]),
            expansion_factor: o.expansion_factor,
            lyap_bound: o.lyapunov_bound,
            failing_pair: o.failing_pair.map(|(p, q)| [p, q]),
            stop_reason: o.stop_reason.clone(),
            p_star: match o.p_star {
                bcnf_core::partition::PStar::Finite(p) => Some(p),
                bcnf_core::partition::PStar::Infinite => None,
            },
            params: (&o.params).into(),
            pairs: o.pairs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateDoc {
    pub kind: &'static str,
    pub period: Option<usize>,
    pub lyapunov_estimate: Option<f64>,
    pub params: ParamsDoc,
}

impl SimulateDoc {
    pub fn new(params: &Params, c: &Classification) -> Self {
        Self {
            kind: c.code(),
            period: c.period(),
            lyapunov_estimate: c.lyapunov(),
            params: params.into(),
        }
    }
}

/// Plot data for the trapping region, its image and the attractor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDoc {
    pub outcome: ProveDoc,
    pub omega_polygon: Vec<[f64; 2]>,
    #[serde(rename = "F_omega_polygon")]
    pub f_omega_polygon: Vec<[f64; 2]>,
    pub psi_l: Vec<[f64; 2]>,
    pub psi_r: Vec<[f64; 2]>,
    pub delta: Vec<[f64; 2]>,
    /// Preimages of the switching line, `y = m x + c`, index 1 first.
    pub preimage_lines: Vec<LineDoc>,
    pub attractor: Vec<[f64; 2]>,
    /// Set when the origin's orbit diverges.
    pub attractor_diverged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineDoc {
    pub m: f64,
    pub c: f64,
}

impl From<&Line> for LineDoc {
    fn from(l: &Line) -> Self {
        Self { m: l.m, c: l.c }
    }
}

pub fn xy(points: &[Point]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.x, p.y]).collect()
}
