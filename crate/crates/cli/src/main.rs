//! `wavshrink`: denoise sample files, run Monte Carlo plans, fit rates and
//! self-check the library.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a failed self-check.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wavshrink::csv_io::{format_f64, read_vector, write_atomic, write_vector};
use wavshrink::experiments::io::{parse_summary_csv, write_reports, write_summaries};
use wavshrink::experiments::{fit_rate, run_plan_with, Execution, ExperimentPlan};
use wavshrink::samples::dyadic_level;
use wavshrink::threshold::min_samples;
use wavshrink::{
    coarse_level_for_moments, shrink_with, HaarTransform, IntervalSystem, ShrinkageConfig, ShrinkageParams,
    SignalSamples, ThresholdMode, WaveletSystem, WaveletTransform,
};

const WORKERS_ENV: &str = "WAVSHRINK_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "wavshrink", version, about = "Wavelet shrinkage under bounded noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PadMode {
    /// Drop samples beyond the largest power of two that fits.
    Truncate,
    /// Append zeros up to the next power of two.
    Zero,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Denoise a CSV file of samples (one value per line).
    Denoise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Hölder exponent of the signal class.
        #[arg(long)]
        alpha: f64,
        /// Hölder constant of the signal class.
        #[arg(long = "M", alias = "m")]
        m: f64,
        /// Noise range: every noise value lies in [-b/2, b/2].
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value = "soft")]
        mode: ThresholdMode,
        /// `haar` or `interval:N` with N vanishing moments.
        #[arg(long, default_value = "haar")]
        system: WaveletSystem,
        /// Accept inputs whose length is not a power of two.
        #[arg(long, value_enum)]
        n_pad: Option<PadMode>,
    },
    /// Run an experiment plan; writes JSON-lines reports and a CSV summary.
    Simulate {
        #[arg(long)]
        plan: PathBuf,
        /// Master seed of every trial (overrides the plan).
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        summary: PathBuf,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Fit convergence exponents from a summary CSV, one row per delta.
    Rates {
        #[arg(long)]
        summary: PathBuf,
        /// Hölder exponent the plan was run with (sets the target exponent).
        #[arg(long)]
        alpha: f64,
        /// Write the table here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the self-check suite; exits with 2 if any check fails.
    Verify,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check,
}

impl From<wavshrink::Error> for Failure {
    fn from(e: wavshrink::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn check_input(path: &Path) -> Outcome {
    if !path.is_file() {
        return usage(format!("cannot read {}", path.display()));
    }
    Ok(())
}

fn check_output(path: &Path) -> Outcome {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return usage(format!("output directory {} does not exist", parent.display()));
    }
    if path.is_dir() {
        return usage(format!("output path {} is a directory", path.display()));
    }
    Ok(())
}

fn fit_length(mut values: Vec<f64>, pad: Option<PadMode>) -> Result<Vec<f64>, Failure> {
    let n = values.len();
    if dyadic_level(n).is_ok() {
        return Ok(values);
    }
    let target = match pad {
        None => {
            return usage(format!(
                "input has {n} samples, not a power of two >= 2; pass --n-pad truncate|zero"
            ))
        }
        Some(PadMode::Truncate) if n < 2 => return usage(format!("cannot truncate {n} samples")),
        Some(PadMode::Truncate) => 1 << n.ilog2(),
        Some(PadMode::Zero) => n.next_power_of_two().max(2),
    };
    eprintln!(
        "warning: input has {n} samples; {} to {target}",
        if target < n { "truncated" } else { "zero-padded" }
    );
    values.resize(target, 0.0);
    Ok(values)
}

fn denoise(
    input: &Path,
    output: &Path,
    params: ShrinkageParams,
    system: WaveletSystem,
    pad: Option<PadMode>,
) -> Outcome {
    check_input(input)?;
    check_output(output)?;
    let y = SignalSamples::new(fit_length(read_vector(input)?, pad)?)?;
    let n = y.len();
    let transform: Box<dyn WaveletTransform> = match system {
        WaveletSystem::Haar => {
            if params.alpha > 1.0 {
                return usage(format!(
                    "Haar wavelets cover alpha <= 1 only; use --system interval:N with N >= {}",
                    params.alpha.ceil()
                ));
            }
            Box::new(HaarTransform { coarse_level: 0 })
        }
        WaveletSystem::Interval { moments } => {
            if (moments as f64) < params.alpha {
                return usage(format!("interval:{moments} cannot cover alpha={}", params.alpha));
            }
            Box::new(IntervalSystem::build(moments, n, coarse_level_for_moments(moments))?)
        }
    };
    let cfg = ShrinkageConfig::for_transform_relaxed(transform.as_ref(), n, params)?;
    let n0 = min_samples(params.alpha).n0;
    if (n as u64) < n0 {
        eprintln!(
            "warning: n={n} is below the minimum sample count {n0} for alpha={}",
            params.alpha
        );
    }
    let levels = cfg.levels();
    eprintln!(
        "J={} J0={} J1={} lambda={} C_phi={}",
        levels.j,
        levels.j0,
        levels.j1,
        format_f64(cfg.lambda()),
        cfg.c_phi()
    );
    let estimate = shrink_with(&y, &cfg, transform.as_ref())?;
    write_vector(output, estimate.values())?;
    Ok(())
}

fn worker_pool() -> Result<Option<rayon::ThreadPool>, Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(None);
    };
    let workers: usize = match raw.trim().parse() {
        Ok(w) if w > 0 => w,
        _ => return usage(format!("{WORKERS_ENV} must be a positive integer, got '{raw}'")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Failure::Usage(format!("cannot start {workers} workers: {e}")))
}

fn simulate(plan_path: &Path, seed: u64, reports: &Path, summary: &Path, sequential: bool) -> Outcome {
    check_input(plan_path)?;
    check_output(reports)?;
    check_output(summary)?;
    let text = fs::read_to_string(plan_path).map_err(|e| Failure::Usage(format!("{}: {e}", plan_path.display())))?;
    let mut plan: ExperimentPlan = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("malformed plan {}: {e}", plan_path.display())))?;
    plan.master_seed = seed;
    plan.validate()?;
    let mut below: Vec<usize> = plan.cells().iter().filter(|c| c.below_n0).map(|c| c.n).collect();
    below.dedup();
    if !below.is_empty() {
        eprintln!(
            "note: n in {below:?} is below the minimum sample count; those cells are outside the theorem's range"
        );
    }
    let execution = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let out = match worker_pool()? {
        Some(pool) => pool.install(|| run_plan_with(&plan, execution)),
        None => run_plan_with(&plan, execution),
    }?;
    write_reports(reports, &out.reports)?;
    write_summaries(summary, &out.summaries)?;
    eprintln!("{} reports in {} cells", out.reports.len(), out.summaries.len());
    Ok(())
}

fn rates(summary: &Path, alpha: f64, output: Option<&Path>) -> Outcome {
    check_input(summary)?;
    if let Some(out) = output {
        check_output(out)?;
    }
    let text = fs::read_to_string(summary).map_err(|e| Failure::Usage(format!("{}: {e}", summary.display())))?;
    let rows = parse_summary_csv(&text)?;
    let mut deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let mut table = String::from("delta,points,exponent,target,intercept,residual\n");
    for delta in deltas {
        let pts: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.delta == delta)
            .map(|r| (r.n, r.q50_max))
            .collect();
        let fit = fit_rate(&pts, alpha).map_err(|e| Failure::Usage(format!("delta={delta}: {e}")))?;
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_f64(delta),
            fit.points,
            format_f64(fit.exponent),
            format_f64(fit.target),
            format_f64(fit.intercept),
            format_f64(fit.residual)
        ));
    }
    match output {
        Some(path) => write_atomic(path, table.as_bytes())?,
        None => print!("{table}"),
    }
    Ok(())
}

fn verify() -> Outcome {
    let results = wavshrink::verify::run_checks();
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    if failed > 0 {
        Err(Failure::Check)
    } else {
        Ok(())
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Denoise {
            input,
            output,
            alpha,
            m,
            b,
            delta,
            mode,
            system,
            n_pad,
        } => denoise(
            &input,
            &output,
            ShrinkageParams {
                alpha,
                m,
                b,
                delta,
                mode,
            },
            system,
            n_pad,
        ),
        Command::Simulate {
            plan,
            seed,
            reports,
            summary,
            sequential,
        } => simulate(&plan, seed, &reports, &summary, sequential),
        Command::Rates { summary, alpha, output } => rates(&summary, alpha, output.as_deref()),
        Command::Verify => verify(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check) => ExitCode::from(2),
    }
}
