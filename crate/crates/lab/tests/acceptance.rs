//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//!
//! Run with `cargo test -p snod-lab --test acceptance`. Criteria listed in
//! `KNOWN_UNATTAINABLE` still run and still print FAIL when they fail; they
//! only stop counting towards the exit status. Set `SNOD_ACCEPTANCE_STRICT=1`
//! to make every failure fatal.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use snod_lab::config::{Grid, Purpose, RunConfig};
use snod_lab::core::{
    algebra::{det_poly_at, trace_poly_at},
    bounding_box, classify, classify_regime, find_fixed_points, input_thresholds, integrate,
    limit_cycle_envelope,
    model::{jacobian, phi, residual_h, tanh_prime},
    pitchfork_mu0, singular_period, thm3_condition, threshold_curve, IntegratorConfig, ModelParams,
    Regime, Stability, State,
};
use snod_lab::sweeps::{fi_curve, frequency_heatmap, spike_metrics, SimSettings, NUDGE};

const SEED: u64 = 0x5eed;

const LEMMA1_SETS: usize = 200;
const LEMMA1_RTOL: f64 = 1e-10;
const EQ5_RTOL: f64 = 1e-6;
const EQ5_STEP: f64 = 1e-5;
const REMARK2_TOL: f64 = 1e-10;
const ONSET_TOL: f64 = 1e-3;
const BOX_STARTS: usize = 1000;
const BOX_T_END: f64 = 1000.0;
const BOX_TOL: f64 = 1e-6;
const MIRROR_TOL: f64 = 1e-6;
const FI_STEP: f64 = 2e-3;
const FI_STRICT_SHARE: f64 = 0.8;
const HEATMAP_N: usize = 60;
const HEATMAP_MAX_CELLS: f64 = 2.0;
const SINGULAR_RTOL: f64 = 0.15;
const SINGULAR_EPS: f64 = 0.01;
const HOMOCLINIC_T_END: f64 = 40_000.0;

const KNOWN_UNATTAINABLE: &[&str] = &["singular-period"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Parameter sets drawn log-uniformly over `d, a ∈ [0.5, 2]`, `k ∈ [0.5, 5]`,
/// `k_s ∈ [1, 32]`, `μ0 ∈ [0.1, 2]`, `ε ∈ [0.01, 0.5]`, with `b` uniform on `[−1, 1]`.
fn random_params(n: usize) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..n)
        .map(|_| {
            let d = log_uniform(&mut rng, 0.5, 2.0);
            let a = log_uniform(&mut rng, 0.5, 2.0);
            let k = log_uniform(&mut rng, 0.5, 5.0);
            let k_s = log_uniform(&mut rng, 1.0, 32.0);
            let mu0 = log_uniform(&mut rng, 0.1, 2.0);
            let eps = log_uniform(&mut rng, 0.01, 0.5);
            let b = rng.gen_range(-1.0..1.0);
            ModelParams::new(d, a, k, k_s, mu0, b, eps).unwrap()
        })
        .collect()
}

fn fig2() -> ModelParams {
    ModelParams::reference()
}

/// Errors are scaled by `max(1, |x|, |y|)`.
fn lemma1() -> Outcome {
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for p in random_params(LEMMA1_SETS) {
        for e in find_fixed_points(&p) {
            let j = jacobian(State::new(e.z_hat, e.s_hat), &p);
            for (poly, num) in [
                (trace_poly_at(e.z_hat, &p), j.trace()),
                (det_poly_at(e.z_hat, &p), j.det()),
            ] {
                worst = worst.max((poly - num).abs() / poly.abs().max(num.abs()).max(1.0));
            }
            points += 1;
        }
    }
    outcome(
        worst <= LEMMA1_RTOL && points >= LEMMA1_SETS,
        format!("{points} fixed points, worst scaled error {worst:.1e} (tol {LEMMA1_RTOL:.0e})"),
    )
}

fn eq5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for p in random_params(LEMMA1_SETS) {
        for e in find_fixed_points(&p) {
            let z = e.z_hat;
            let h = EQ5_STEP * p.z_bound();
            let fd = (residual_h(z + h, &p) - residual_h(z - h, &p)) / (2.0 * h);
            let want = -det_poly_at(z, &p) / p.eps();
            worst = worst.max((fd - want).abs() / fd.abs().max(want.abs()).max(1.0));
            points += 1;
        }
    }
    outcome(
        worst <= EQ5_RTOL,
        format!("{points} fixed points, worst scaled error {worst:.1e} (tol {EQ5_RTOL:.0e})"),
    )
}

fn remark2() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in random_params(LEMMA1_SETS) {
        for e in find_fixed_points(&p) {
            let lhs = tanh_prime(phi(e.z_hat, e.s_hat, &p));
            let rhs = 1.0 - p.d() * p.d() * e.z_hat * e.z_hat;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    outcome(
        worst <= REMARK2_TOL,
        format!("worst error {worst:.1e} (tol {REMARK2_TOL:.0e})"),
    )
}

fn fig2_reproduction() -> Outcome {
    let p = fig2();
    let regime = classify_regime(&p);
    let b_star = match input_thresholds(&p) {
        Ok(r) => r.b_star,
        Err(e) => return outcome(false, format!("no thresholds: {e}")),
    };
    // long horizon so the slow amplitude growth just above b* is resolved
    let mut onset = SimSettings::for_params(&p, 2000.0);
    onset.integrator.t_transient = 1000.0;
    onset.detector.t_transient = 1000.0;
    onset.t_end = 3000.0;
    let spikes = |b: f64| {
        spike_metrics(&p.with_b(b).unwrap(), State::default(), &onset)
            .unwrap()
            .is_spiking()
    };
    let (mut lo, mut hi) = (0.0, 0.1);
    if spikes(lo) || !spikes(hi) {
        return outcome(false, "onset not bracketed by [0, 0.1]");
    }
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if spikes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let simulated = 0.5 * (lo + hi);
    let s = SimSettings::for_params(&p, 40.0 / p.eps());
    let up = spike_metrics(&p.with_b(0.1).unwrap(), State::default(), &s).unwrap();
    let down = spike_metrics(&p.with_b(-0.1).unwrap(), State::default(), &s).unwrap();
    let pass = regime == Regime::HopfWindow
        && (simulated - b_star).abs() <= ONSET_TOL
        && up.is_spiking()
        && up.polarity == 1
        && down.is_spiking()
        && down.polarity == -1;
    outcome(
        pass,
        format!(
            "regime {regime}, b* = {b_star:.6}, simulated onset {simulated:.6} (tol {ONSET_TOL:.0e}), polarity at ±0.1: {}/{}",
            up.polarity, down.polarity
        ),
    )
}

fn bounding_box_invariance() -> Outcome {
    let sets = [
        fig2().with_b(0.1).unwrap(),
        fig2().with_mu0(1.05).unwrap(),
        ModelParams::new(2.0, 1.5, 3.0, 8.0, 0.5, 0.3, 0.05).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut jobs = Vec::new();
    for p in &sets {
        let bx = bounding_box(p);
        for _ in 0..BOX_STARTS {
            let z = rng.gen_range(bx.z_min..=bx.z_max);
            let s = rng.gen_range(bx.s_min..=bx.s_max);
            jobs.push((*p, State::new(z, s)));
        }
    }
    let escaped: usize = jobs
        .par_iter()
        .map(|(p, ic)| {
            let mut cfg = IntegratorConfig::for_params(p);
            cfg.sample_dt = None;
            let bx = bounding_box(p);
            match integrate(p, *ic, BOX_T_END, &cfg) {
                Ok(tr) => usize::from(!tr.states.iter().all(|x| bx.contains(*x, BOX_TOL))),
                Err(_) => 1,
            }
        })
        .sum();
    outcome(
        escaped == 0,
        format!(
            "{} trajectories to t = {BOX_T_END}, {escaped} left the box (tol {BOX_TOL:.0e})",
            jobs.len()
        ),
    )
}

fn fig3_reproduction() -> Outcome {
    let p = fig2();
    let pf = pitchfork_mu0(&p);
    let origin = |mu0: f64| classify(0.0, &p.with_mu0(mu0).unwrap()).unwrap().stability;
    let flips =
        pf == 1.0 && origin(0.99) == Stability::StableNode && origin(1.01) == Stability::Saddle;
    let counts: Vec<usize> = [1.0, 1.05, 1.1]
        .iter()
        .map(|&m| find_fixed_points(&p.with_mu0(m).unwrap()).len())
        .collect();
    let q = p.with_mu0(1.05).unwrap();
    let thm3 = thm3_condition(&q);
    let mut cfg = IntegratorConfig::for_params(&q);
    cfg.t_transient = 1000.0;
    cfg.sample_dt = Some(0.05);
    let up = limit_cycle_envelope(&q, State::new(0.1, 0.0), 4000.0, &cfg).unwrap();
    let down = limit_cycle_envelope(&q, State::new(-0.1, 0.0), 4000.0, &cfg).unwrap();
    let mirror = (up.z_min + down.z_max)
        .abs()
        .max((up.z_max + down.z_min).abs());
    let pass = flips
        && counts == [3, 3, 3]
        && thm3
        && mirror <= MIRROR_TOL
        && !up.encircles_origin
        && !down.encircles_origin
        && up.width() > 0.1;
    outcome(
        pass,
        format!(
            "origin flip at {pf}: {flips}, fixed-point counts {counts:?}, thm3 {thm3}, cycles [{:.3e}, {:.4}] / [{:.4}, {:.3e}], mirror error {mirror:.1e} (tol {MIRROR_TOL:.0e})",
            up.z_min, up.z_max, down.z_min, down.z_max
        ),
    )
}

fn threshold_monotone() -> Outcome {
    let grid: Vec<f64> = (0..30).map(|i| 0.7 + 0.01 * i as f64).collect();
    let curve = threshold_curve(&fig2(), &grid).unwrap();
    let all_defined = curve.defined_mask.iter().all(|&m| m);
    let decreasing = curve.b_star_values.windows(2).all(|w| w[1] < w[0]);
    outcome(
        all_defined && decreasing,
        format!(
            "b*(0.70) = {:.5}, b*(0.99) = {:.5}, {} cells, strictly decreasing: {decreasing}",
            curve.b_star_values[0],
            curve.b_star_values[29],
            grid.len()
        ),
    )
}

fn fi_monotone() -> Outcome {
    let c = RunConfig::default().resolve(Purpose::Fi).unwrap();
    let s = c.sim_settings().unwrap();
    let b_grid = Grid::new(0.0, 0.1, (0.1 / FI_STEP).round() as usize + 1)
        .unwrap()
        .values();
    let mut pass = true;
    let mut parts = Vec::new();
    for mu0 in [0.82, 0.9, 0.98, 1.06] {
        let f: Vec<f64> = fi_curve(&fig2().with_mu0(mu0).unwrap(), &b_grid, &s)
            .unwrap()
            .iter()
            .map(|x| x.frequency)
            .collect();
        let nondecreasing = f.windows(2).all(|w| w[1] >= w[0]);
        let spiking_pairs: Vec<&[f64]> =
            f.windows(2).filter(|w| w[0] > 0.0 && w[1] > 0.0).collect();
        let strict = spiking_pairs.iter().filter(|w| w[1] > w[0]).count();
        let share = if spiking_pairs.is_empty() {
            0.0
        } else {
            strict as f64 / spiking_pairs.len() as f64
        };
        pass &= nondecreasing && share >= FI_STRICT_SHARE;
        parts.push(format!("μ0={mu0}: {strict}/{} strict", spiking_pairs.len()));
    }
    outcome(
        pass,
        format!(
            "{} (need ≥ {:.0}%)",
            parts.join(", "),
            FI_STRICT_SHARE * 100.0
        ),
    )
}

fn heatmap_consistency() -> Outcome {
    let c = RunConfig::default().resolve(Purpose::Heatmap).unwrap();
    let (mu0_grid, b_grid) = (
        Grid::new(0.75, 1.1, HEATMAP_N).unwrap(),
        Grid::new(0.0, 0.1, HEATMAP_N).unwrap(),
    );
    let s = c.sim_settings().unwrap();
    let p = fig2();
    let h = frequency_heatmap(&p, &mu0_grid.values(), &b_grid.values(), &s).unwrap();
    let curve = threshold_curve(&p, &mu0_grid.values()).unwrap();
    let db = b_grid.spacing();
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    for (i, edge) in h.spiking_boundary().into_iter().enumerate() {
        let Some(r) = curve.reports[i] else { continue };
        if !r.is_hopf() || r.b_star < b_grid.min || r.b_star > b_grid.max {
            continue;
        }
        compared += 1;
        let dev = match edge {
            Some(b) => (b - r.b_star).abs() / db,
            None => (b_grid.max - r.b_star) / db + 1.0,
        };
        worst = worst.max(dev);
    }
    outcome(
        compared > 0 && worst <= HEATMAP_MAX_CELLS,
        format!(
            "{}x{} cells, {compared} rows with a Hopf b* in range, worst deviation {worst:.2} cells (tol {HEATMAP_MAX_CELLS})",
            HEATMAP_N, HEATMAP_N
        ),
    )
}

fn singular_period_match() -> Outcome {
    let p = fig2().with_eps(SINGULAR_EPS).unwrap();
    let s = SimSettings::for_params(&p, 2000.0);
    let mut pass = true;
    let mut singular = Vec::new();
    let mut parts = Vec::new();
    for b in [0.05, 0.08, 0.1] {
        let q = p.with_b(b).unwrap();
        let t0 = singular_period(&q).unwrap();
        let sim = spike_metrics(&q, State::default(), &s)
            .unwrap()
            .period
            .unwrap_or(f64::NAN);
        let err = (t0 - sim).abs() / sim;
        pass &= err <= SINGULAR_RTOL;
        singular.push(t0);
        parts.push(format!("b={b}: {t0:.1} vs {sim:.1} ({:.0}%)", err * 100.0));
    }
    let decreasing = singular.windows(2).all(|w| w[1] < w[0]);
    outcome(
        pass && decreasing,
        format!(
            "{}; decreasing in b: {decreasing} (tol {:.0}%)",
            parts.join(", "),
            SINGULAR_RTOL * 100.0
        ),
    )
}

fn homoclinic_frequency() -> Outcome {
    let freq = |mu0: f64| {
        let p = fig2().with_mu0(mu0).unwrap();
        let mut s = SimSettings::for_params(&p, HOMOCLINIC_T_END);
        s.integrator.sample_dt = Some(0.1);
        s.integrator.t_transient = 2000.0;
        s.detector.t_transient = 2000.0;
        s.t_end = HOMOCLINIC_T_END;
        spike_metrics(&p, NUDGE, &s).unwrap().frequency
    };
    let (near, far) = (freq(1.005), freq(1.05));
    outcome(
        near > 0.0 && far > 0.0 && near < far,
        format!("f(1.005) = {near:.3e}, f(1.05) = {far:.3e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 11] = [
        ("lemma1-trace-det", lemma1, Duration::from_secs(10)),
        ("eq5-derivative-identity", eq5, Duration::from_secs(10)),
        ("remark2-tanh-prime", remark2, Duration::from_secs(10)),
        (
            "fig2-hopf-onset",
            fig2_reproduction,
            Duration::from_secs(30),
        ),
        (
            "bounding-box",
            bounding_box_invariance,
            Duration::from_secs(60),
        ),
        (
            "fig3-twin-cycles",
            fig3_reproduction,
            Duration::from_secs(30),
        ),
        (
            "threshold-monotone",
            threshold_monotone,
            Duration::from_secs(10),
        ),
        ("fi-monotone", fi_monotone, Duration::from_secs(300)),
        (
            "heatmap-boundary",
            heatmap_consistency,
            Duration::from_secs(600),
        ),
        (
            "singular-period",
            singular_period_match,
            Duration::from_secs(60),
        ),
        (
            "homoclinic-frequency",
            homoclinic_frequency,
            Duration::from_secs(60),
        ),
    ];
    let strict = std::env::var_os("SNOD_ACCEPTANCE_STRICT").is_some_and(|v| v == "1");
    let mut fatal = 0;
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = o.pass && in_time;
        let known = KNOWN_UNATTAINABLE.contains(&name);
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "{tag} {name}: {} [{:.1}s, limit {}s]",
            o.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed += 1;
            if strict || !known {
                fatal += 1;
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if fatal > 0 {
        std::process::exit(1);
    }
}
