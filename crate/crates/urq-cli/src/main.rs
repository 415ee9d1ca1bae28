//! `urq`: consistency bounds, Monte Carlo validation, decay experiments,
//! and measurement-rate planning for randomized modulo-quantized acquisition.
//!
//! Every command writes one CSV file (atomically) and is a deterministic
//! function of its flags and seed.

mod errors;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use urq_core::analytics::{
    ball_failure_bound, consistency_bounds, consistency_probability,
    consistency_probability_multibit, norm_tail, plan_rate, GuaranteeConstants,
};
use urq_core::model::SignalModel;
use urq_core::montecarlo::{estimate_ball_failure, estimate_consistency, estimate_norm_tail, McEstimate};
use urq_core::reconstruct::{
    decay_experiment, DecayConfig, DeltaRule, EnsembleMode, PairSampler,
};
use urq_core::Signal;

use errors::{CliError, CliResult};
use output::{real, CsvDoc};
use settings::{parse_grid, parse_m_list, Settings};

#[derive(Parser)]
#[command(
    name = "urq",
    version,
    about = "Dithered modulo-quantized acquisition: consistency laws, failure bounds, rate planners, and Monte Carlo experiments",
    after_help = "Exit codes: 0 success, 2 usage error, 3 precondition violation."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the exact single-measurement consistency probability and its
    /// closed-form bounds over a distance grid.
    Bounds(BoundsArgs),
    /// Run a Monte Carlo estimator against its analytic counterpart.
    Mc(McArgs),
    /// Run the worst-consistent-distance decay experiment.
    Decay(DecayArgs),
    /// Plan the measurement count for a signal model and target distance.
    Plan(PlanArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Output CSV path (written atomically).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Optional flat `key = value` config file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Distance grid: `a,b,c` or `start:stop:count`.
    #[arg(long)]
    grid: Option<String>,
    /// Measurement-vector entry standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Quantizer precision.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which estimator: `consistency`, `tail`, or `ball`.
    #[arg(long)]
    kind: Option<String>,
    /// Parameter grid: distance for consistency/ball, norm threshold for
    /// tail. The same seed substreams are replayed at every grid point
    /// (common random numbers), so estimates vary smoothly along the grid.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Signal dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Quantizer depth in bits.
    #[arg(long)]
    bits: Option<u32>,
    /// Trials per grid point.
    #[arg(long)]
    trials: Option<u64>,
    /// Ball radius (ball kind).
    #[arg(long)]
    radius: Option<f64>,
    /// Norm cap certifying bounded ball projections (ball kind).
    #[arg(long)]
    cap: Option<f64>,
}

#[derive(Args)]
struct DecayArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Signal dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Measurement counts: `10,20,...` or `start:stop:count`.
    #[arg(long)]
    m_list: Option<String>,
    /// Signal pairs tested per measurement count.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Fixed quantizer precision (`--delta-rule fixed`).
    #[arg(long)]
    delta: Option<f64>,
    /// Precision rule: `fixed`, or `guarantee` to tie delta to the
    /// guaranteed distance at each measurement count.
    #[arg(long)]
    delta_rule: Option<String>,
    /// Precision-to-distance ratio for `--delta-rule guarantee`.
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    bits: Option<u32>,
    /// Ensemble mode: `fresh` (per pair) or `shared` (one ensemble, prefix
    /// evaluation).
    #[arg(long)]
    mode: Option<String>,
    /// Pair sampler: `independent`, `uniform-distance`, or `log-uniform`.
    #[arg(long)]
    sampler: Option<String>,
    /// Smallest separation probed by the log-uniform sampler.
    #[arg(long)]
    min_separation: Option<f64>,
    /// Failure probability of the guarantee column.
    #[arg(long)]
    p0: Option<f64>,
    /// Guarantee constants (default: the concrete instance 60, 3/4).
    #[arg(long)]
    c_o: Option<f64>,
    #[arg(long)]
    c_r: Option<f64>,
    /// Rows enter the log-linear fit only above this worst-distance floor.
    #[arg(long)]
    floor: Option<f64>,
    /// Rows enter the fit only with at least this many consistent pairs.
    #[arg(long)]
    min_consistent: Option<usize>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Signal model: `unitball`, `sparse`, `union`, or `similar`.
    #[arg(long)]
    model: Option<String>,
    /// Signal dimension (intrinsic).
    #[arg(long)]
    k: Option<usize>,
    /// Ambient dimension (sparse/union models).
    #[arg(long)]
    n: Option<usize>,
    /// Subspace count (union model).
    #[arg(long)]
    l: Option<usize>,
    /// Ball radius around the known signal (similar model).
    #[arg(long)]
    radius: Option<f64>,
    /// Target worst-case distance.
    #[arg(long)]
    d: Option<f64>,
    /// Failure probability.
    #[arg(long)]
    p0: Option<f64>,
    /// Guarantee constants (default: the concrete instance 60, 3/4).
    #[arg(long)]
    c_o: Option<f64>,
    #[arg(long)]
    c_r: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Mc(args) => cmd_mc(args),
        Command::Decay(args) => cmd_decay(args),
        Command::Plan(args) => cmd_plan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

struct Common {
    out: PathBuf,
    seed: u64,
    settings: Settings,
}

fn resolve_common(common: &CommonArgs) -> CliResult<Common> {
    let settings = Settings::load(common.config.as_deref())?;
    let out = settings.require(common.out.clone(), "out")?;
    let seed = settings.resolve(common.seed, "seed", 0u64)?;
    Ok(Common { out, seed, settings })
}

fn cmd_bounds(args: BoundsArgs) -> CliResult<()> {
    let common = resolve_common(&args.common)?;
    let s = &common.settings;
    let grid = parse_grid(&s.require(args.grid, "grid")?)?;
    let sigma = s.resolve(args.sigma, "sigma", 1.0)?;
    let delta = s.resolve(args.delta, "delta", 1.0)?;
    let mut doc = CsvDoc::new("bounds", common.seed);
    doc.header(&["d", "exact", "lower_first_term", "lower_linear", "upper"]);
    for &d in &grid {
        let b = consistency_bounds(d, sigma, delta)?;
        doc.row(&[
            real(d),
            real(b.exact_series),
            real(b.lower_first_term),
            real(b.lower_linear),
            real(b.upper),
        ]);
    }
    doc.write(&common.out)
}

fn z_score(mc: &McEstimate, analytic: f64) -> f64 {
    let diff = mc.mean - analytic;
    if mc.stderr == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    } else {
        diff / mc.stderr
    }
}

fn cmd_mc(args: McArgs) -> CliResult<()> {
    let common = resolve_common(&args.common)?;
    let s = &common.settings;
    let kind = s.require(args.kind, "kind")?;
    let grid = parse_grid(&s.require(args.grid, "grid")?)?;
    let sigma = s.resolve(args.sigma, "sigma", 1.0)?;
    let delta = s.resolve(args.delta, "delta", 1.0)?;
    let k = s.resolve(args.k, "k", 1usize)?;
    let bits = s.resolve(args.bits, "bits", 1u32)?;
    let trials = s.resolve(args.trials, "trials", 100_000u64)?;
    let mut doc = CsvDoc::new("mc", common.seed);
    match kind.as_str() {
        "consistency" => {
            doc.header(&["d", "mc_mean", "stderr", "analytic", "z_score"]);
            for &d in &grid {
                let est = estimate_consistency(d, sigma, delta, k, bits, trials, common.seed)?;
                let analytic = if bits == 1 {
                    consistency_probability(d, sigma, delta)?
                } else {
                    consistency_probability_multibit(d, sigma, delta, bits)?
                };
                doc.row(&[
                    real(d),
                    real(est.mean),
                    real(est.stderr),
                    real(analytic),
                    real(z_score(&est, analytic)),
                ]);
            }
        }
        "tail" => {
            doc.header(&["cap", "mc_mean", "stderr", "analytic", "z_score"]);
            for &cap in &grid {
                let est = estimate_norm_tail(k, sigma, cap, trials, common.seed)?;
                let analytic = norm_tail(k, sigma, cap)?;
                doc.row(&[
                    real(cap),
                    real(est.mean),
                    real(est.stderr),
                    real(analytic),
                    real(z_score(&est, analytic)),
                ]);
            }
        }
        "ball" => {
            let radius = s.require(args.radius, "radius")?;
            let cap = s.resolve(args.cap, "cap", 2.0)?;
            doc.header(&["d", "mc_mean", "stderr", "analytic", "z_score"]);
            for &d in &grid {
                let est =
                    estimate_ball_failure(d, radius, cap, sigma, delta, k, trials, common.seed)?;
                let analytic = ball_failure_bound(d, radius, cap, sigma, delta, k)?;
                doc.row(&[
                    real(d),
                    real(est.mean),
                    real(est.stderr),
                    real(analytic),
                    real(z_score(&est, analytic)),
                ]);
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown mc kind '{other}' (expected consistency, tail, or ball)"
            )))
        }
    }
    doc.write(&common.out)
}

fn guarantee_constants(
    s: &Settings,
    c_o: Option<f64>,
    c_r: Option<f64>,
    dim: usize,
) -> CliResult<GuaranteeConstants> {
    let c_o = s.resolve_opt(c_o, "c-o")?;
    let c_r = s.resolve_opt(c_r, "c-r")?;
    match (c_o, c_r) {
        (None, None) => Ok(GuaranteeConstants::concrete(dim)?),
        (Some(leading), Some(decay_base)) => Ok(GuaranteeConstants::new(leading, decay_base)?),
        _ => Err(CliError::Usage(
            "provide both --c-o and --c-r, or neither".into(),
        )),
    }
}

fn cmd_decay(args: DecayArgs) -> CliResult<()> {
    let common = resolve_common(&args.common)?;
    let s = &common.settings;
    let k = s.resolve(args.k, "k", 2usize)?;
    let m_list = parse_m_list(&s.require(args.m_list, "m-list")?)?;
    let pairs = s.resolve(args.trials, "trials", 2000usize)?;
    let sigma = s.resolve(args.sigma, "sigma", 2.5)?;
    let bits = s.resolve(args.bits, "bits", 1u32)?;
    let p0 = s.resolve(args.p0, "p0", 0.05)?;
    let guarantee = guarantee_constants(s, args.c_o, args.c_r, k)?;
    let rule_name = s.resolve(args.delta_rule, "delta-rule", "fixed".to_string())?;
    let delta_rule = match rule_name.as_str() {
        "fixed" => DeltaRule::Fixed(s.require(args.delta, "delta")?),
        "guarantee" => DeltaRule::MatchGuarantee { ratio: s.resolve(args.ratio, "ratio", 1.0)? },
        other => {
            return Err(CliError::Usage(format!(
                "unknown delta rule '{other}' (expected fixed or guarantee)"
            )))
        }
    };
    let mode = match s.resolve(args.mode, "mode", "fresh".to_string())?.as_str() {
        "fresh" => EnsembleMode::FreshPerPair,
        "shared" => EnsembleMode::Shared,
        other => {
            return Err(CliError::Usage(format!(
                "unknown mode '{other}' (expected fresh or shared)"
            )))
        }
    };
    let min_separation = s.resolve(args.min_separation, "min-separation", 0.002)?;
    let sampler = match s
        .resolve(args.sampler, "sampler", "log-uniform".to_string())?
        .as_str()
    {
        "independent" => PairSampler::IndependentUniform,
        "uniform-distance" => PairSampler::UniformDistance,
        "log-uniform" => PairSampler::LogUniformDistance { min_separation },
        other => {
            return Err(CliError::Usage(format!(
                "unknown sampler '{other}' (expected independent, uniform-distance, or log-uniform)"
            )))
        }
    };
    let config = DecayConfig {
        model: SignalModel::unit_ball(k)?,
        m_list,
        pairs_per_m: pairs,
        sigma,
        bits,
        seed: common.seed,
        delta_rule,
        mode,
        sampler,
        guarantee,
        guarantee_p0: p0,
        min_consistent_for_fit: s.resolve(args.min_consistent, "min-consistent", 30usize)?,
        resolution_floor: s.resolve(args.floor, "floor", 2.25 * min_separation)?,
        collision_threshold: 0.1,
    };
    let report = decay_experiment(&config)?;
    let mut doc = CsvDoc::new("decay", common.seed);
    doc.header(&["m", "worst", "mean", "guarantee_d"]);
    for row in &report.rows {
        doc.row(&[
            row.measurements.to_string(),
            real(row.worst),
            real(row.mean),
            real(row.guarantee_distance),
        ]);
    }
    match &report.fit {
        Some(fit) => doc.comment(&format!(
            "fit slope={} intercept={} r_squared={} points={}",
            real(fit.slope),
            real(fit.intercept),
            real(fit.r_squared),
            fit.points
        )),
        None => doc.comment("fit insufficient points"),
    }
    doc.write(&common.out)
}

fn cmd_plan(args: PlanArgs) -> CliResult<()> {
    let common = resolve_common(&args.common)?;
    let s = &common.settings;
    let model_name = s.require(args.model, "model")?;
    let k = s.require(args.k, "k")?;
    let d = s.require(args.d, "d")?;
    let p0 = s.resolve(args.p0, "p0", 1e-3)?;
    let model = match model_name.as_str() {
        "unitball" => SignalModel::unit_ball(k)?,
        "sparse" => {
            let n = s.require(args.n, "n")?;
            SignalModel::sparse(n, k)?
        }
        "union" => {
            let n = s.require(args.n, "n")?;
            let l = s.require(args.l, "l")?;
            SignalModel::union_described(n, k, l)?
        }
        "similar" => {
            let radius = s.require(args.radius, "radius")?;
            SignalModel::similar_signal(Signal::zeros(k)?, radius)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown model '{other}' (expected unitball, sparse, union, or similar)"
            )))
        }
    };
    let constants = guarantee_constants(s, args.c_o, args.c_r, k)?;
    let plan = plan_rate(&model, d, p0, &constants)?;
    let mut doc = CsvDoc::new("plan", common.seed);
    doc.header(&["model", "d", "p0", "c_o", "c_r", "covering_log", "required_m"]);
    doc.row(&[
        model_name,
        real(d),
        real(p0),
        real(constants.leading),
        real(constants.decay_base),
        real(plan.covering_log),
        plan.required_measurements.to_string(),
    ]);
    doc.write(&common.out)
}
