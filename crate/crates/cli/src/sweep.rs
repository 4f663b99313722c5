//! Parameter grid classification, one CSV row per point.

use std::io::Write;

use bcnf_core::sim::{classify_point, Classification, SimOptions};
use bcnf_core::{prove_chaos, Params, ProofOutcome, ProverOptions, Verdict};
use rayon::prelude::*;

use crate::grid::GridSpec;

pub const HEADER: [&str; 13] = [
    "tau_L",
    "tau_R",
    "verdict",
    "stop_step",
    "p_min",
    "p_max",
    "q_min",
    "q_max",
    "expansion_factor",
    "lyap_bound",
    "sim_kind",
    "sim_period",
    "sim_lyap",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau_l: f64,
    pub tau_r: f64,
    pub verdict: Verdict,
    pub stop_step: Option<u8>,
    pub p_min: Option<usize>,
    pub p_max: Option<usize>,
    pub q_min: Option<usize>,
    pub q_max: Option<usize>,
    pub expansion_factor: Option<f64>,
    pub lyap_bound: Option<f64>,
    pub sim: Option<Classification>,
}

impl SweepRow {
    pub fn new(tau_l: f64, tau_r: f64, o: &ProofOutcome, sim: Option<Classification>) -> Self {
        Self {
            tau_l,
            tau_r,
            verdict: o.verdict,
            stop_step: o.stop_step,
            p_min: o.p_min,
            p_max: o.p_max,
            q_min: o.q_min,
            q_max: o.q_max,
            expansion_factor: o.expansion_factor,
            lyap_bound: o.lyapunov_bound,
            sim,
        }
    }

    pub fn fields(&self) -> [String; 13] {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let verdict = match self.verdict {
            Verdict::Chaos => "CHAOS",
            Verdict::Stop => "STOP",
        };
        [
            self.tau_l.to_string(),
            self.tau_r.to_string(),
            verdict.to_string(),
            opt(self.stop_step),
            opt(self.p_min),
            opt(self.p_max),
            opt(self.q_min),
            opt(self.q_max),
            opt(self.expansion_factor),
            opt(self.lyap_bound),
            opt(self.sim.map(|s| s.code())),
            opt(self.sim.and_then(|s| s.period())),
            opt(self.sim.and_then(|s| s.lyapunov())),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub prover: ProverOptions,
    /// Classify every point by simulation as well.
    pub sim: Option<SimOptions>,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

fn evaluate(grid: &GridSpec, opts: &SweepOptions, (tau_l, tau_r): (f64, f64)) -> SweepRow {
    let params = Params::new(tau_l, grid.delta_l, tau_r, grid.delta_r).expect("grid validated");
    let outcome = prove_chaos(&params, &opts.prover);
    let sim = opts.sim.map(|s| classify_point(&params, &s));
    SweepRow::new(tau_l, tau_r, &outcome, sim)
}

/// Rows in grid order, whatever the thread count.
pub fn run(grid: &GridSpec, opts: &SweepOptions) -> Result<Vec<SweepRow>, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build()?;
    let points = grid.points();
    Ok(pool.install(|| points.par_iter().map(|&pt| evaluate(grid, opts, pt)).collect()))
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}
