//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use bcnf_cli::grid::{GridSpec, Range};
use bcnf_cli::sweep::{self, SweepOptions};
use bcnf_core::circle::{circle_distance, CircleInterval};
use bcnf_core::cone::{
    angle_derivative, angle_map, expansion_check, fixed_points, norm_map, unit_vector, unmixed_interval, GammaSet,
    NormHarmonics,
};
use bcnf_core::partition::{p_star, Caps, PStar, PreimageFan};
use bcnf_core::sim::{estimate_lyapunov, periodic_orbit, Classification, SimOptions};
use bcnf_core::trapping::{induced_map, TrappingRegion};
use bcnf_core::{prove_chaos, Mat2, Params, Point, ProofOutcome, ProverOptions, Side, Verdict};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn params(tl: f64, dl: f64, tr: f64, dr: f64) -> Params {
    Params::new(tl, dl, tr, dr).expect("valid parameters")
}

fn prove(p: &Params) -> ProofOutcome {
    prove_chaos(p, &ProverOptions::default())
}

fn caps(p: &Params) -> Caps {
    Caps::for_params(p)
}

fn region(p: &Params, p_min: usize, p_max: usize) -> Result<TrappingRegion, String> {
    let fan = PreimageFan::new(p, p_max.max(2));
    TrappingRegion::build(p, &fan, p_min, p_max, &caps(p)).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- oracles

/// First return to `x < 0, y <= 0` by plain iteration: leave the closed left
/// half-plane, then leave the closed right half-plane.
fn direct_first_return(p: &Params, z: Point) -> Option<(usize, usize, Point)> {
    let mut w = z;
    let mut left = 0;
    while w.x <= 0.0 {
        w = p.apply(w);
        left += 1;
        if left > 200 {
            return None;
        }
    }
    let mut right = 0;
    while w.x >= 0.0 {
        w = p.apply(w);
        right += 1;
        if right > 2000 {
            return None;
        }
    }
    Some((left, right, w))
}

/// `f_R^q f_L^p` as a single affine map `M z + b`.
fn composed(p: &Params, steps_l: usize, steps_r: usize, z: Point) -> Point {
    let affine = |m: Mat2, n: usize| {
        let mut power = Mat2::IDENTITY;
        let mut offset = Point::ORIGIN;
        for _ in 0..n {
            offset = m.apply(offset) + Point::new(1.0, 0.0);
            power = m * power;
        }
        (power, offset)
    };
    let (ml, bl) = affine(p.branch_matrix(Side::Left), steps_l);
    let (mr, br) = affine(p.branch_matrix(Side::Right), steps_r);
    mr.apply(ml.apply(z) + bl) + br
}

fn slope_count(p: &Params) -> Option<usize> {
    let mut m = -p.tau_l();
    for i in 1..10_000 {
        if m >= -1e-9 {
            return Some(i);
        }
        m = -(p.delta_l() + p.tau_l() * m) / m;
    }
    None
}

/// Dense sampling followed by golden-section refinement.
fn sampled_min_norm(m: &Mat2, arc: &CircleInterval, n: usize) -> f64 {
    let h = |t: f64| norm_map(m, arc.lerp(t));
    let step = 1.0 / n as f64;
    let mut best = (0.0, h(0.0));
    for k in 1..=n {
        let t = k as f64 * step;
        if h(t) < best.1 {
            best = (t, h(t));
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if h(x1) < h(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.1.min(h(0.5 * (a + b)))
}

fn random_matrix(rng: &mut StdRng) -> Mat2 {
    loop {
        let m = Mat2::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        if m.det() > 0.05 {
            return m;
        }
    }
}

/// Uniform sample of `Omega` by rejection from its bounding box.
fn sample_omega(rng: &mut StdRng, r: &TrappingRegion) -> Point {
    let poly = r.omega_polygon();
    let (x0, x1) = poly
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.x), a.1.max(p.x)));
    let (y0, y1) = poly
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.y), a.1.max(p.y)));
    loop {
        let z = Point::new(rng.random_range(x0..x1), rng.random_range(y0..y1));
        if r.contains(z) {
            return z;
        }
    }
}

/// Seeded draws around the slice studied numerically, kept when CHAOS.
fn chaos_draws(n: usize) -> Vec<(Params, ProofOutcome)> {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut out = Vec::new();
    while out.len() < n {
        let p = params(
            rng.random_range(0.8..2.0),
            rng.random_range(0.05..0.5),
            rng.random_range(-2.0..1.0),
            rng.random_range(1.0..3.0),
        );
        let o = prove(&p);
        if o.is_chaos() {
            out.push((p, o));
        }
    }
    out
}

// ------------------------------------------------------------- criteria

fn c1() -> Check {
    let p = params(1.35, 0.2, 0.0, 2.0);
    let start = Instant::now();
    let o = prove(&p);
    let dt = start.elapsed();
    ensure(
        o.verdict == Verdict::Chaos,
        format!("verdict {:?}: {:?}", o.verdict, o.stop_reason),
    )?;
    ensure(
        (o.p_min, o.p_max) == (Some(2), Some(6)),
        format!("(p_min, p_max) = {:?}", (o.p_min, o.p_max)),
    )?;
    ensure(dt < Duration::from_millis(100), format!("took {dt:?}"))?;
    Ok(format!("CHAOS (2, 6), c = {:.6}, {dt:?}", o.expansion_factor.unwrap()))
}

fn c2() -> Check {
    let p = params(1.35, 0.2, -0.7, 2.0);
    let o = prove(&p);
    ensure(
        o.verdict == Verdict::Stop && o.stop_step == Some(3),
        format!("{:?} at {:?}", o.verdict, o.stop_step),
    )?;
    ensure(
        (o.p_min, o.p_max) == (Some(2), Some(4)),
        format!("(p_min, p_max) = {:?}", (o.p_min, o.p_max)),
    )?;
    ensure(
        o.failing_pair == Some((3, 2)),
        format!("failing pair {:?}", o.failing_pair),
    )?;
    let opts = SimOptions::default();
    let period = bcnf_core::sim::detect_periodic(&p, &opts).map_err(|e| e.to_string())?;
    ensure(period == Some(5), format!("period {period:?}"))?;
    let orbit = periodic_orbit(&p, &opts).ok_or("no periodic orbit")?;
    let omega = o.region.ok_or("no Omega")?;
    let z = *orbit
        .iter()
        .find(|z| omega.contains(**z))
        .ok_or("no orbit point in Omega")?;
    let r = induced_map(&p, z, &caps(&p)).map_err(|e| e.to_string())?;
    let err = (r.image - z).norm();
    ensure((r.p, r.q) == (3, 2), format!("(p, q) = ({}, {})", r.p, r.q))?;
    ensure(err < 1e-8, format!("|F(Z) - Z| = {err:e}"))?;
    Ok(format!(
        "STOP at 3, failing (3, 2), period 5, Z = ({:.6}, {:.6}), |F(Z) - Z| = {err:.1e}",
        z.x, z.y
    ))
}

fn c3() -> Check {
    let o = prove(&params(1.35, 0.2, -1.4, 2.0));
    ensure(
        o.verdict == Verdict::Chaos,
        format!("verdict {:?}: {:?}", o.verdict, o.stop_reason),
    )?;
    ensure(
        (o.p_min, o.p_max) == (Some(1), Some(5)),
        format!("(p_min, p_max) = {:?}", (o.p_min, o.p_max)),
    )?;
    Ok(format!("CHAOS (1, 5), c = {:.6}", o.expansion_factor.unwrap()))
}

fn c4() -> Check {
    let r = region(&params(1.1, 0.4, 0.4, 2.0), 2, 4)?;
    ensure(r.conditions_hold(), format!("violations {:?}", r.violations()))?;
    ensure(
        (r.q_min, r.q_max) == (2, 3),
        format!("(q_min, q_max) = ({}, {})", r.q_min, r.q_max),
    )?;
    Ok("conditions hold, (q_min, q_max) = (2, 3)".into())
}

fn c5() -> Check {
    let r = region(&params(1.0, 0.6, 1.2, 1.2), 2, 3)?;
    ensure((r.s.q, r.t.q) == (3, 4), format!("(q_S, q_T) = ({}, {})", r.s.q, r.t.q))?;
    ensure(
        (r.q_min, r.q_max) == (3, 5),
        format!("(q_min, q_max) = ({}, {})", r.q_min, r.q_max),
    )?;
    Ok("q_S = 3, q_T = 4, (q_min, q_max) = (3, 5)".into())
}

fn c6() -> Check {
    let p = params(1.0, 0.2, -1.2, 2.0);
    let gamma = GammaSet {
        p_min: 1,
        p_max: 3,
        q_min: 1,
        q_max: 2,
    };
    let matrices = gamma.matrices(&p);
    let pairs: Vec<_> = matrices
        .iter()
        .map(|(pp, q, m)| fixed_points(m).ok_or(format!("M_{{{pp},{q}}} has no real distinct eigenvalues")))
        .collect::<Result<_, _>>()?;
    let j = unmixed_interval(&pairs).ok_or("fixed points mixed")?.interval;
    let c = expansion_check(&matrices, &j, false).map_err(|e| format!("expansion fails: {e:?}"))?;
    ensure(c > 1.0, format!("c = {c}"))?;
    Ok(format!("J = [{:.6}, {:.6}], c = {c:.6}", j.lo, j.hi))
}

fn c7(draws: &[(Params, ProofOutcome)]) -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let mut violations = 0;
    let mut first = None;
    for (p, o) in draws {
        let r = o.region.expect("CHAOS has a region");
        let caps = caps(p);
        for _ in 0..10_000 {
            let z = sample_omega(&mut rng, &r);
            let ok = match induced_map(p, z, &caps) {
                Ok(f) => {
                    r.contains_within(f.image, 1e-9)
                        && (r.p_min..=r.p_max).contains(&f.p)
                        && (r.q_min..=r.q_max).contains(&f.q)
                }
                Err(_) => false,
            };
            if !ok {
                violations += 1;
                first.get_or_insert((*p, z));
            }
        }
    }
    ensure(violations == 0, format!("{violations} violations, first {first:?}"))?;
    Ok(format!("{} draws x 10^4 samples, 0 violations", draws.len()))
}

fn c8(draws: &[(Params, ProofOutcome)]) -> Check {
    let dots = [params(1.35, 0.2, 0.0, 2.0), params(1.35, 0.2, -1.4, 2.0)];
    let mut points: Vec<(Params, ProofOutcome)> = dots.iter().map(|p| (*p, prove(p))).collect();
    points.extend_from_slice(draws);
    let opts = SimOptions::default();
    let mut worst = f64::INFINITY;
    let mut slowest = Duration::ZERO;
    for (p, o) in &points {
        ensure(o.is_chaos(), format!("{p}: expected CHAOS"))?;
        let bound = o.lyapunov_bound.unwrap();
        let start = Instant::now();
        let le = estimate_lyapunov(p, &opts).map_err(|e| format!("{p}: {e}"))?;
        let dt = start.elapsed();
        slowest = slowest.max(dt);
        ensure(le >= bound - 0.01, format!("{p}: estimate {le} below bound {bound}"))?;
        ensure(dt < Duration::from_secs(1), format!("{p}: took {dt:?}"))?;
        worst = worst.min(le - bound);
    }
    Ok(format!(
        "{} points, min(estimate - bound) = {worst:.4}, slowest {slowest:?}",
        points.len()
    ))
}

fn c9() -> Check {
    // induced map vs direct first return
    let mut rng = StdRng::seed_from_u64(9);
    let cases = [
        params(1.35, 0.2, 0.0, 2.0),
        params(1.35, 0.2, -1.4, 2.0),
        params(1.1, 0.4, 0.4, 2.0),
    ];
    let mut worst_f = 0.0f64;
    for k in 0..10_000 {
        let p = &cases[k % cases.len()];
        let r = prove(p).region.ok_or("no Omega")?;
        let z = sample_omega(&mut rng, &r);
        let f = induced_map(p, z, &caps(p)).map_err(|e| format!("{p} {z:?}: {e}"))?;
        let (pl, qr, direct) = direct_first_return(p, z).ok_or(format!("{p} {z:?}: no direct return"))?;
        ensure(
            (pl, qr) == (f.p, f.q),
            format!("{z:?}: ({}, {}) vs ({pl}, {qr})", f.p, f.q),
        )?;
        let affine = composed(p, f.p, f.q, z);
        let scale = 1.0 + direct.norm();
        worst_f = worst_f
            .max((f.image - direct).norm() / scale)
            .max((affine - direct).norm() / scale);
    }
    ensure(worst_f < 1e-9, format!("induced map differs by {worst_f:e}"))?;

    // p* formula vs slope recurrence
    let mut finite = 0;
    for i in 1..=50 {
        for j in 1..=50 {
            let p = params(0.06 * i as f64, 0.06 * j as f64, 0.0, 1.0);
            match p_star(&p) {
                PStar::Finite(n) => {
                    finite += 1;
                    ensure(
                        Some(n) == slope_count(&p),
                        format!("{p}: p* {n} vs {:?}", slope_count(&p)),
                    )?;
                }
                PStar::Infinite => {
                    let ok = p.tau_l() >= 2.0 * p.delta_l().sqrt() - 1e-12;
                    ensure(ok, format!("{p}: infinite p* with complex eigenvalues"))?;
                }
            }
        }
    }

    // closed-form min of H vs dense sampling
    let mut worst_h = 0.0f64;
    for _ in 0..1000 {
        let m = random_matrix(&mut rng);
        let j = CircleInterval::new(rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let closed = NormHarmonics::of(&m).min_norm_on(&j);
        let sampled = sampled_min_norm(&m, &j, 10_000);
        worst_h = worst_h.max((closed - sampled).abs());
    }
    ensure(worst_h < 1e-9, format!("H minimum differs by {worst_h:e}"))?;

    // dG/dtheta vs finite differences of the image angle
    let mut worst_d = 0.0f64;
    let h = 1e-6;
    for _ in 0..1000 {
        let m = random_matrix(&mut rng);
        let t = rng.random_range(0.0..PI);
        let w0 = m.apply(unit_vector(t - h));
        let w1 = m.apply(unit_vector(t + h));
        let fd = w0.cross(w1).atan2(w0.dot(w1)) / (2.0 * h);
        let exact = angle_derivative(&m, t);
        worst_d = worst_d.max(((fd - exact) / exact).abs());
    }
    ensure(worst_d < 1e-6, format!("derivative relative error {worst_d:e}"))?;

    Ok(format!(
        "induced {worst_f:.1e}; p* exact on 2500 ({finite} finite); H-min {worst_h:.1e}; dG/dtheta rel {worst_d:.1e}"
    ))
}

fn c10() -> Check {
    let mut rng = StdRng::seed_from_u64(10);
    let mut checked = 0;
    for _ in 0..10_000 {
        let p = params(
            rng.random_range(0.01..5.0),
            rng.random_range(0.01..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(0.01..5.0),
        );
        let z = Point::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let w = p.apply(z);
        // y' = -delta x
        ensure(z.x == 0.0 || w.y.signum() == -z.x.signum(), format!("{p} {z:?}: sign"))?;
        // right half-plane to lower half-plane, left to upper
        ensure(z.x < 0.0 || w.y <= 0.0, format!("{p} {z:?}: quadrant"))?;
        ensure(z.x > 0.0 || w.y >= 0.0, format!("{p} {z:?}: quadrant"))?;
        let m = random_matrix(&mut rng);
        let t = rng.random_range(0.0..PI);
        ensure(angle_derivative(&m, t) > 0.0, format!("{m:?} at {t}: dG <= 0"))?;
        let _ = angle_map(&m, t);
        checked += 1;
    }
    Ok(format!("{checked} draws, 0 violations"))
}

fn c11() -> Check {
    let grid = GridSpec {
        tau_l: Range::new(0.8, 2.0, 60).unwrap(),
        tau_r: Range::new(-2.0, 1.0, 60).unwrap(),
        delta_l: 0.2,
        delta_r: 2.0,
    };
    let opts = SweepOptions {
        prover: ProverOptions::default(),
        sim: Some(SimOptions::default()),
        threads: 8,
    };
    let start = Instant::now();
    let rows = sweep::run(&grid, &opts).map_err(|e| e.to_string())?;
    let dt = start.elapsed();
    let chaos: Vec<_> = rows.iter().filter(|r| r.verdict == Verdict::Chaos).collect();
    let bad: Vec<_> = chaos
        .iter()
        .filter(|r| !matches!(r.sim, Some(Classification::PosLe { .. })))
        .map(|r| (r.tau_l, r.tau_r, r.sim))
        .collect();
    let pos = rows
        .iter()
        .filter(|r| matches!(r.sim, Some(Classification::PosLe { .. })))
        .count();
    ensure(!chaos.is_empty(), "no CHAOS cells")?;
    ensure(
        bad.is_empty(),
        format!("{} CHAOS cells not POS_LE, e.g. {:?}", bad.len(), bad.first()),
    )?;
    ensure(dt < Duration::from_secs(300), format!("took {dt:?}"))?;
    Ok(format!(
        "{} CHAOS cells within {pos} POS_LE cells of 3600, {dt:.1?}",
        chaos.len()
    ))
}

/// Angles this close agree to the last few bits of a value near pi.
const ROUNDOFF_FLOOR: f64 = 1e-14;

fn c12() -> Check {
    let mut rng = StdRng::seed_from_u64(12);
    let mut draws = 0;
    let mut worst = 0.0f64;
    let mut attempts = 0;
    let mut saturated = 0;
    while draws < 10 {
        attempts += 1;
        ensure(attempts < 1000, "too few usable draws")?;
        let delta_l = rng.random_range(0.05..1.0);
        let tau_l = rng.random_range(delta_l + 1.05..delta_l + 2.5);
        let p = params(tau_l, delta_l, rng.random_range(-2.0..2.0), rng.random_range(0.2..3.0));
        let left = fixed_points(&p.branch_matrix(Side::Left)).ok_or(format!("{p}: A_L without fixed angles"))?;
        let mut rows = Vec::new();
        for q in [1u32, 2] {
            let target = angle_map(&p.branch_matrix(Side::Right).pow(q), left.stable);
            let dist = |pp: u32| fixed_points(&p.return_matrix(pp, q)).map(|fp| circle_distance(fp.stable, target));
            rows.push((q, dist(10), dist(20)));
        }
        // the limit needs M_{p,q} to have real eigenvalues at both p
        if rows.iter().any(|r| r.1.is_none() || r.2.is_none()) {
            continue;
        }
        for (q, d10, d20) in rows {
            let (d10, d20) = (d10.unwrap(), d20.unwrap());
            ensure(d20 < 1e-3, format!("{p} q={q}: distance {d20:e} at p = 20"))?;
            // both at rounding level: the decrease is not resolvable in f64
            let floor = d20 <= ROUNDOFF_FLOOR && d10 <= ROUNDOFF_FLOOR;
            ensure(d20 < d10 || floor, format!("{p} q={q}: {d20:e} at 20 vs {d10:e} at 10"))?;
            saturated += usize::from(floor);
            worst = worst.max(d20);
        }
        draws += 1;
    }
    Ok(format!(
        "{draws} draws ({attempts} tried), max distance at p = 20: {worst:.1e}, {saturated} of {} at rounding level",
        2 * draws
    ))
}

fn main() {
    let draws = chaos_draws(20);
    let criteria: Vec<Criterion> = vec![
        ("(1.35, 0.2, 0, 2) is CHAOS with (2, 6)", Box::new(c1)),
        (
            "(1.35, 0.2, -0.7, 2) stops at step 3, period-5 fixed point of F",
            Box::new(c2),
        ),
        ("(1.35, 0.2, -1.4, 2) is CHAOS with (1, 5)", Box::new(c3)),
        ("(1.1, 0.4, 0.4, 2) region conditions and q range", Box::new(c4)),
        ("(1, 0.6, 1.2, 1.2) return times", Box::new(c5)),
        ("(1, 0.2, -1.2, 2) unmixed interval and expansion", Box::new(c6)),
        ("forward invariance of Omega", Box::new(|| c7(&draws))),
        ("Lyapunov estimate above certified bound", Box::new(|| c8(&draws))),
        ("oracle equivalences", Box::new(c9)),
        ("sign, quadrant and monotone angle map", Box::new(c10)),
        ("sweep CHAOS cells are POS_LE", Box::new(c11)),
        ("stable angle limit for large p", Box::new(c12)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let dt = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{dt:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{dt:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
