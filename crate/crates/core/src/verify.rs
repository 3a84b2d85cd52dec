//! Self-checks shared by the `verify` command and the acceptance suite.
//!
//! Each check is deterministic (fixed seeds) and reports the measured
//! quantity next to its verdict, so failures say by how much.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::experiments::{
    estimate_event_probability, run_plan_with, Execution, ExperimentPlan, NoiseModel, SignalSpec,
};
use crate::haar::{haar_coeff_closed_form, haar_dwt, haar_idwt, CoeffKind};
use crate::interval::IntervalSystem;
use crate::noise::NoiseFamily;
use crate::samples::SignalSamples;
use crate::shrink::WaveletSystem;
use crate::signals::{check_holder, make_signal, SignalKind};
use crate::threshold::{coarse_level_for_moments, soft_threshold, ThresholdMode};

/// Relative slack for comparisons that are exact in real arithmetic.
const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

pub fn random_samples(n: usize, rng: &mut impl Rng) -> SignalSamples {
    SignalSamples::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("finite values")
}

/// Largest Haar roundtrip error and Parseval defect (relative to `Σ y²`)
/// over one random signal per level in `levels`.
pub fn haar_exactness(levels: impl IntoIterator<Item = u32>, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut roundtrip, mut parseval) = (0.0f64, 0.0f64);
    for j in levels {
        let y = random_samples(1 << j, &mut rng);
        let p = haar_dwt(&y, 0)?;
        let back = haar_idwt(&p)?;
        roundtrip = roundtrip.max(
            back.values()
                .iter()
                .zip(y.values())
                .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        );
        let energy = y.sum_of_squares();
        parseval = parseval.max((p.scaled_energy() - energy).abs() / energy.max(1.0));
    }
    Ok((roundtrip, parseval))
}

/// Largest interval roundtrip error for `N` in `moments` at every level of
/// `levels`.
pub fn interval_roundtrip(moments: &[usize], levels: impl IntoIterator<Item = u32> + Clone, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for &nm in moments {
        for j in levels.clone() {
            let sys = IntervalSystem::build(nm, 1 << j, coarse_level_for_moments(nm))?;
            let y = random_samples(1 << j, &mut rng);
            let back = sys.inverse(&sys.forward(&y)?)?;
            worst = worst.max(
                back.values()
                    .iter()
                    .zip(y.values())
                    .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
            );
        }
    }
    Ok(worst)
}

/// Largest gap between the fast Haar pyramid and direct closed-form
/// summation, over `signals` random signals of length `n`.
pub fn haar_oracle_gap(n: usize, signals: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..signals {
        let y = random_samples(n, &mut rng);
        let p = haar_dwt(&y, 0)?;
        worst = worst.max((p.approx()[0] - haar_coeff_closed_form(&y, 0, 0, CoeffKind::Approx)?).abs());
        for (j, d) in p.details() {
            for (k, v) in d.iter().enumerate() {
                worst = worst.max((v - haar_coeff_closed_form(&y, j, k, CoeffKind::Detail)?).abs());
            }
        }
    }
    Ok(worst)
}

/// Violations of `|d| < M 2^{−j(1/2+α)}` among the Haar details of a
/// certified signal, and the largest ratio `|d| / bound`.
pub fn haar_decay_violations(kind: SignalKind, alpha: f64, m: f64, n: usize) -> Result<(usize, f64)> {
    let f = make_signal(kind, alpha, m)?;
    let samples = f.sample(n)?;
    let p = haar_dwt(&samples, 0)?;
    let (mut violations, mut worst) = (0, 0.0f64);
    for (j, d) in p.details() {
        let bound = m * (-(j as f64) * (0.5 + alpha)).exp2();
        for v in d {
            let r = v.abs() / bound;
            worst = worst.max(r);
            violations += usize::from(r >= 1.0);
        }
    }
    Ok((violations, worst))
}

/// Fitted slope of `log₂ max_k |d_{j,k}|` against `j` over `levels`, for
/// the interval transform of `sin(2πt)`.
pub fn sine_decay_slope(moments: usize, n: usize, levels: std::ops::RangeInclusive<u32>) -> Result<f64> {
    let sys = IntervalSystem::build(moments, n, coarse_level_for_moments(moments))?;
    let y = SignalSamples::from_fn(n, |t| (2.0 * std::f64::consts::PI * t).sin())?;
    let p = sys.forward(&y)?;
    let pts: Vec<(f64, f64)> = levels
        .map(|j| {
            let d = p.detail(j).unwrap_or(&[]);
            (j as f64, d.iter().fold(0.0f64, |m, v| m.max(v.abs())).log2())
        })
        .collect();
    Ok(crate::experiments::stats::ls_slope(&pts).0)
}

/// Outcome of the brute-force soft-threshold grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOutcome {
    pub triples: usize,
    /// `|d̃ − d_f| > |d_f|`.
    pub over_signal: usize,
    /// `|d̃ − d_f| > 2λ`.
    pub over_two_lambda: usize,
}

/// Checks both soft-threshold inequalities on a `steps³` grid of
/// `d_f ∈ [−3, 3]`, `λ ∈ (0, 2]` and `e = sλ` with `s ∈ [−1, 1]`.
pub fn soft_threshold_grid(steps: usize) -> GridOutcome {
    let steps = steps.max(2);
    let mut out = GridOutcome {
        triples: 0,
        over_signal: 0,
        over_two_lambda: 0,
    };
    let last = (steps - 1) as f64;
    for a in 0..steps {
        let df = -3.0 + 6.0 * a as f64 / last;
        for b in 0..steps {
            let lambda = 2.0 * (b + 1) as f64 / steps as f64;
            for c in 0..steps {
                let e = lambda * (-1.0 + 2.0 * c as f64 / last);
                let err = (soft_threshold(df + e, lambda) - df).abs();
                let slack = ROUNDING * (1.0 + df.abs() + lambda);
                out.triples += 1;
                out.over_signal += usize::from(err > df.abs() + slack);
                out.over_two_lambda += usize::from(err > 2.0 * lambda + slack);
            }
        }
    }
    out
}

/// Largest `|W Wᵀ − I|` entry of an interval system.
pub fn orthogonality_defect(sys: &IntervalSystem) -> f64 {
    let n = sys.n();
    let w = sys.matrix();
    let mut worst = 0.0f64;
    for r in 0..n {
        for s in r..n {
            let dot: f64 = w[r * n..(r + 1) * n]
                .iter()
                .zip(&w[s * n..(s + 1) * n])
                .map(|(a, b)| a * b)
                .sum();
            worst = worst.max((dot - f64::from(u8::from(r == s))).abs());
        }
    }
    worst
}

fn small_plan(system: WaveletSystem, kind: SignalKind, alpha: f64) -> ExperimentPlan {
    ExperimentPlan {
        signal: SignalSpec { kind, alpha, m: 1.0 },
        noise: NoiseModel {
            family: NoiseFamily::Uniform,
            b: 1.0,
        },
        n_list: vec![256, 512],
        delta_list: vec![0.5, 1.0],
        trials: 40,
        mode: ThresholdMode::Soft,
        system,
        master_seed: 20_240_601,
        envelope_quantile: 0.999,
        envelope: None,
    }
}

/// The quick invariant suite run by `wavshrink verify`.
pub fn run_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut push = |name: &str, r: Result<(bool, String)>| match r {
        Ok((passed, detail)) => out.push(CheckResult::new(name, passed, detail)),
        Err(e) => out.push(CheckResult::new(name, false, format!("error: {e}"))),
    };

    push(
        "haar roundtrip and Parseval",
        haar_exactness(1..=12, 1)
            .map(|(r, p)| (r < 1e-10 && p < 1e-10, format!("roundtrip {r:.2e}, Parseval {p:.2e}"))),
    );
    push(
        "haar closed-form oracle",
        haar_oracle_gap(256, 10, 2).map(|g| (g < 1e-10, format!("max gap {g:.2e}"))),
    );
    push(
        "soft-threshold inequalities",
        Ok({
            let g = soft_threshold_grid(60);
            (
                g.over_signal == 0 && g.over_two_lambda == 0,
                format!(
                    "{} triples, {} + {} violations",
                    g.triples, g.over_signal, g.over_two_lambda
                ),
            )
        }),
    );
    push(
        "haar decay of certified signals",
        (|| {
            let mut worst = 0.0f64;
            let mut violations = 0;
            for kind in [SignalKind::Cusp, SignalKind::Weierstrass] {
                for alpha in [0.5, 1.0] {
                    let (v, w) = haar_decay_violations(kind, alpha, 1.0, 1024)?;
                    violations += v;
                    worst = worst.max(w);
                }
            }
            Ok((
                violations == 0,
                format!("{violations} violations, worst ratio {worst:.3}"),
            ))
        })(),
    );
    push(
        "signal certificates",
        (|| {
            let mut ok = true;
            for (kind, alpha) in [
                (SignalKind::Cusp, 0.5),
                (SignalKind::Weierstrass, 0.5),
                (SignalKind::Sinusoid, 2.0),
            ] {
                ok &= check_holder(&make_signal(kind, alpha, 1.0)?.sample(512)?, alpha, 1.0).holds;
            }
            Ok((ok, "cusp, weierstrass, sinusoid".to_string()))
        })(),
    );
    push(
        "interval orthogonality",
        (|| {
            let mut worst = 0.0f64;
            for nm in 1..=3 {
                worst = worst.max(orthogonality_defect(&IntervalSystem::build(
                    nm,
                    128,
                    coarse_level_for_moments(nm),
                )?));
            }
            Ok((worst < 1e-8, format!("max |WWᵀ − I| {worst:.2e}")))
        })(),
    );
    push(
        "interval roundtrip",
        interval_roundtrip(&[2, 3], 7..=9, 3).map(|r| (r < 1e-8, format!("max error {r:.2e}"))),
    );
    push(
        "interval sine decay",
        sine_decay_slope(2, 1024, 4..=8).map(|s| (s <= -2.3, format!("slope {s:.3}"))),
    );
    push(
        "event implies coefficient bound",
        (|| {
            let mut plan = small_plan(WaveletSystem::Haar, SignalKind::Constant, 1.0);
            plan.n_list = vec![256];
            plan.trials = 500;
            let est = estimate_event_probability(&plan, Execution::default())?;
            let e = &est[0];
            Ok((
                e.coeff_violations == 0,
                format!("{} members, {} violations", e.members, e.coeff_violations),
            ))
        })(),
    );
    push(
        "trial reproducibility",
        (|| {
            let plan = small_plan(WaveletSystem::Haar, SignalKind::Cusp, 0.5);
            let a = run_plan_with(&plan, Execution::Sequential)?;
            let b = run_plan_with(&plan, Execution::Parallel)?;
            let mse_ok = a.reports.iter().all(|r| r.mse <= r.max_sq_err);
            let checks: usize = a.summaries.iter().map(|s| s.check_violations).sum();
            Ok((
                a == b && mse_ok && checks == 0,
                format!("{} reports, {checks} thresholding violations", a.reports.len()),
            ))
        })(),
    );
    push(
        "interval trials",
        (|| {
            let plan = small_plan(WaveletSystem::Interval { moments: 2 }, SignalKind::Sinusoid, 2.0);
            let out = run_plan_with(&plan, Execution::default())?;
            let checks: usize = out.summaries.iter().map(|s| s.check_violations).sum();
            Ok((
                checks == 0,
                format!("{} reports, {checks} thresholding violations", out.reports.len()),
            ))
        })(),
    );
    out
}
