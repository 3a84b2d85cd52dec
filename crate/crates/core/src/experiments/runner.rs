//! Seeded Monte Carlo trials over the cells of a plan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{in_event_a, noise_coeff_ratio, SystemRef};
use crate::experiments::plan::{Cell, ExperimentPlan};
use crate::experiments::stats::{median, quantile, rate, wilson_interval};
use crate::interval::IntervalSystem;
use crate::noise::sample_noise;
use crate::pyramid::CoefficientPyramid;
use crate::samples::SignalSamples;
use crate::shrink::{shrink_with, HaarTransform, ShrinkageConfig, WaveletSystem, WaveletTransform};
use crate::threshold::ThresholdMode;

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.99;

/// Relative slack of the per-coefficient thresholding checks.
const CHECK_TOL: f64 = 1e-12;

/// How trials are scheduled. Both produce identical reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon's current pool; runs sequentially without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Self::Parallel
        } else {
            Self::Sequential
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Noise seed of trial `trial` in cell `cell`. Each step is a bijection,
/// so seeds are distinct across trials of a cell and across cells for a
/// fixed trial.
pub fn derive_seed(master: u64, cell: usize, trial: usize) -> u64 {
    mix(mix(mix(master) ^ cell as u64) ^ trial as u64)
}

/// Outcome of the per-coefficient thresholding checks in one trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ThresholdCheck {
    /// Every noise coefficient (details and the coarse block) was `<= λ`.
    pub applicable: bool,
    /// Coefficients with `|d̃ − d_f| > |d_f|` (soft mode only).
    pub over_signal: usize,
    /// Coefficients with `|d̃ − d_f| > 2λ`.
    pub over_two_lambda: usize,
}

/// Per-trial coefficient diagnostics; not part of the JSON-lines output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialDiagnostics {
    pub coarse_level: u32,
    /// Detail coefficients of the noise with `|d| > λ`, by level from `J0`.
    pub exceed_by_level: Vec<usize>,
    /// Same for the coarse approximation block.
    pub approx_exceed: usize,
    pub lambda: f64,
    /// Largest noise coefficient over `b C_φ √(log₂ n / n)`.
    pub noise_coeff_ratio: f64,
    pub check: ThresholdCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub n: usize,
    pub delta: f64,
    pub max_sq_err: f64,
    pub mse: f64,
    /// Membership in the good event; `None` when `n` has no block geometry.
    #[serde(rename = "in_A")]
    pub in_a: Option<bool>,
    pub exceed_count: usize,
    pub seed: u64,
    #[serde(skip)]
    pub diagnostics: TrialDiagnostics,
}

/// Aggregates of one `(n, δ)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub delta: f64,
    pub trials: usize,
    pub below_n0: bool,
    pub lambda: f64,
    pub q50_max: f64,
    pub q50_mse: f64,
    /// Envelope constant applied to this cell's `δ`.
    pub envelope: f64,
    /// Fraction of trials with `max_sq_err <= envelope · rate(n)`.
    pub p_within_envelope: f64,
    pub p_a_hat: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub exceed_total: usize,
    pub check_violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutput {
    /// Every trial, cell by cell in plan order.
    pub reports: Vec<TrialReport>,
    pub summaries: Vec<CellSummary>,
}

enum Transform {
    Haar(HaarTransform),
    Interval(Box<IntervalSystem>),
}

impl Transform {
    fn build(system: WaveletSystem, n: usize) -> Result<Self> {
        Ok(match system {
            WaveletSystem::Haar => Self::Haar(HaarTransform { coarse_level: 0 }),
            WaveletSystem::Interval { moments } => {
                let j0 = crate::threshold::coarse_level_for_moments(moments);
                Self::Interval(Box::new(IntervalSystem::build(moments, n, j0)?))
            }
        })
    }

    fn as_dyn(&self) -> &dyn WaveletTransform {
        match self {
            Self::Haar(t) => t,
            Self::Interval(s) => s.as_ref(),
        }
    }

    fn event_ref(&self) -> SystemRef<'_> {
        match self {
            Self::Haar(_) => SystemRef::Haar,
            Self::Interval(s) => SystemRef::Interval(s),
        }
    }
}

/// Everything a trial of one sample count shares.
struct SizeContext {
    n: usize,
    signal: SignalSamples,
    signal_coeffs: CoefficientPyramid,
    transform: Transform,
}

struct CellContext<'a> {
    cell: Cell,
    size: &'a SizeContext,
    config: ShrinkageConfig,
}

fn has_event_geometry(n: usize) -> bool {
    matches!(n, 16 | 256 | 65536)
}

fn run_trial(plan: &ExperimentPlan, ctx: &CellContext<'_>, trial: usize) -> Result<TrialReport> {
    let seed = derive_seed(plan.master_seed, ctx.cell.index, trial);
    let noise = sample_noise(&plan.noise.with_seed(seed), ctx.size.n)?;
    let transform = ctx.size.transform.as_dyn();
    let y = ctx.size.signal.add(&noise)?;
    let estimate = shrink_with(&y, &ctx.config, transform)?;

    let lambda = ctx.config.lambda();
    let noise_coeffs = transform.forward(&noise)?;
    let over = |v: &[f64]| v.iter().filter(|x| x.abs() > lambda).count();
    let exceed_by_level: Vec<usize> = noise_coeffs.details().map(|(_, d)| over(d)).collect();
    let approx_exceed = over(noise_coeffs.approx());
    let exceed_count = approx_exceed + exceed_by_level.iter().sum::<usize>();

    let mut check = ThresholdCheck {
        applicable: exceed_count == 0,
        ..Default::default()
    };
    if check.applicable {
        let mode = ctx.config.mode();
        let observed = transform.forward(&y)?;
        for ((_, df), (_, dy)) in ctx.size.signal_coeffs.details().zip(observed.details()) {
            for (&f, &obs) in df.iter().zip(dy) {
                let err = (mode.apply(obs, lambda) - f).abs();
                let slack = CHECK_TOL * (1.0 + f.abs() + lambda);
                if mode == ThresholdMode::Soft && err > f.abs() + slack {
                    check.over_signal += 1;
                }
                if err > 2.0 * lambda + slack {
                    check.over_two_lambda += 1;
                }
            }
        }
    }

    let in_a = if has_event_geometry(ctx.size.n) {
        Some(in_event_a(&noise, plan.noise.b, ctx.size.transform.event_ref())?.member)
    } else {
        None
    };
    Ok(TrialReport {
        trial,
        n: ctx.size.n,
        delta: ctx.cell.delta,
        max_sq_err: estimate.max_sq_error(&ctx.size.signal),
        mse: estimate.mean_sq_error(&ctx.size.signal),
        in_a,
        exceed_count,
        seed,
        diagnostics: TrialDiagnostics {
            coarse_level: noise_coeffs.coarse_level(),
            exceed_by_level,
            approx_exceed,
            lambda,
            noise_coeff_ratio: noise_coeff_ratio(&noise, plan.noise.b, ctx.size.transform.event_ref())?,
            check,
        },
    })
}

fn prepare_sizes(plan: &ExperimentPlan) -> Result<Vec<SizeContext>> {
    let signal = plan.signal.build()?;
    let mut ns = plan.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let transform = Transform::build(plan.system, n)?;
            let samples = signal.sample(n)?;
            let signal_coeffs = transform.as_dyn().forward(&samples)?;
            Ok(SizeContext {
                n,
                signal: samples,
                signal_coeffs,
                transform,
            })
        })
        .collect()
}

fn map_trials<T: Send>(
    jobs: &[(usize, usize)],
    execution: Execution,
    f: impl Fn(usize, usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(|&(c, t)| f(c, t)).collect()
        }
        _ => jobs.iter().map(|&(c, t)| f(c, t)).collect(),
    }
}

/// Runs every trial of `plan` with the default execution strategy.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanOutput> {
    run_plan_with(plan, Execution::default())
}

/// Runs every trial of `plan`. The output depends only on the plan, never
/// on scheduling or worker count.
pub fn run_plan_with(plan: &ExperimentPlan, execution: Execution) -> Result<PlanOutput> {
    plan.validate()?;
    let cells = plan.cells();
    if plan.trials == 0 || cells.is_empty() {
        return Ok(PlanOutput {
            reports: Vec::new(),
            summaries: Vec::new(),
        });
    }
    let sizes = prepare_sizes(plan)?;
    let contexts = cells
        .iter()
        .map(|&cell| {
            let size = sizes.iter().find(|s| s.n == cell.n).expect("every n was prepared");
            let config =
                ShrinkageConfig::for_transform_relaxed(size.transform.as_dyn(), cell.n, plan.params(cell.delta))?;
            Ok(CellContext { cell, size, config })
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..plan.trials).map(move |t| (c, t)))
        .collect();
    let reports = map_trials(&jobs, execution, |c, t| run_trial(plan, &contexts[c], t))?;
    let summaries = summarize(plan, &contexts, &reports)?;
    Ok(PlanOutput { reports, summaries })
}

/// Envelope constant of one `δ`: the plan's fixed value, or the
/// `envelope_quantile` of `max_sq_err / rate(n)` at the smallest `n`.
fn envelope_for(plan: &ExperimentPlan, delta: f64, contexts: &[CellContext<'_>], reports: &[TrialReport]) -> f64 {
    if let Some(c) = plan.envelope {
        return c;
    }
    let n_min = contexts.iter().map(|c| c.cell.n).min().expect("at least one cell");
    let ratios: Vec<f64> = reports
        .iter()
        .filter(|r| r.n == n_min && r.delta == delta)
        .map(|r| r.max_sq_err / rate(r.n, plan.signal.alpha))
        .collect();
    quantile(&ratios, plan.envelope_quantile)
}

fn summarize(plan: &ExperimentPlan, contexts: &[CellContext<'_>], reports: &[TrialReport]) -> Result<Vec<CellSummary>> {
    let mut summaries = Vec::with_capacity(contexts.len());
    for (ctx, chunk) in contexts.iter().zip(reports.chunks(plan.trials)) {
        let envelope = envelope_for(plan, ctx.cell.delta, contexts, reports);
        let maxes: Vec<f64> = chunk.iter().map(|r| r.max_sq_err).collect();
        let mses: Vec<f64> = chunk.iter().map(|r| r.mse).collect();
        let bound = envelope * rate(ctx.cell.n, plan.signal.alpha);
        let within = maxes.iter().filter(|&&m| m <= bound).count();
        let members: Vec<bool> = chunk.iter().filter_map(|r| r.in_a).collect();
        let (p_a_hat, ci) = if members.len() == chunk.len() {
            let k = members.iter().filter(|&&m| m).count();
            (
                Some(k as f64 / chunk.len() as f64),
                Some(wilson_interval(k, chunk.len(), CONFIDENCE)?),
            )
        } else {
            (None, None)
        };
        summaries.push(CellSummary {
            n: ctx.cell.n,
            delta: ctx.cell.delta,
            trials: chunk.len(),
            below_n0: ctx.cell.below_n0,
            lambda: ctx.config.lambda(),
            q50_max: median(&maxes),
            q50_mse: median(&mses),
            envelope,
            p_within_envelope: within as f64 / chunk.len() as f64,
            p_a_hat,
            ci,
            exceed_total: chunk.iter().map(|r| r.exceed_count).sum(),
            check_violations: chunk
                .iter()
                .map(|r| r.diagnostics.check.over_signal + r.diagnostics.check.over_two_lambda)
                .sum(),
        });
    }
    Ok(summaries)
}

/// Empirical probability of the good event at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventEstimate {
    pub n: usize,
    pub trials: usize,
    pub members: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Members whose noise coefficients broke `b C_φ √(log₂ n / n)`.
    pub coeff_violations: usize,
    /// Largest coefficient ratio seen among members.
    pub worst_member_ratio: f64,
}

/// Estimates `P(A)` for each `n` of the plan (which must all lie in
/// `{16, 256, 65536}`), with a Wilson interval at [`CONFIDENCE`]. The
/// signal, `δ` list and mode play no part.
pub fn estimate_event_probability(plan: &ExperimentPlan, execution: Execution) -> Result<Vec<EventEstimate>> {
    plan.validate()?;
    if let Some(&n) = plan.n_list.iter().find(|&&n| !has_event_geometry(n)) {
        return Err(Error::UnsupportedGeometry(format!(
            "event probability needs n in {{16, 256, 65536}}, got {n}"
        )));
    }
    if plan.trials == 0 {
        return Err(Error::InvalidParameter(
            "event probability needs at least one trial".into(),
        ));
    }
    let mut out = Vec::with_capacity(plan.n_list.len());
    for (cell, &n) in plan.n_list.iter().enumerate() {
        let transform = Transform::build(plan.system, n)?;
        let jobs: Vec<(usize, usize)> = (0..plan.trials).map(|t| (cell, t)).collect();
        let outcomes = map_trials(&jobs, execution, |c, t| {
            let noise = sample_noise(&plan.noise.with_seed(derive_seed(plan.master_seed, c, t)), n)?;
            let member = in_event_a(&noise, plan.noise.b, transform.event_ref())?.member;
            let ratio = if member {
                noise_coeff_ratio(&noise, plan.noise.b, transform.event_ref())?
            } else {
                0.0
            };
            Ok((member, ratio))
        })?;
        let members = outcomes.iter().filter(|o| o.0).count();
        let (ci_lo, ci_hi) = wilson_interval(members, plan.trials, CONFIDENCE)?;
        out.push(EventEstimate {
            n,
            trials: plan.trials,
            members,
            p_hat: members as f64 / plan.trials as f64,
            ci_lo,
            ci_hi,
            coeff_violations: outcomes.iter().filter(|o| o.0 && o.1 > 1.0).count(),
            worst_member_ratio: outcomes.iter().map(|o| o.1).fold(0.0, f64::max),
        });
    }
    Ok(out)
}
