use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use clmm_jit_core::jit::{classify_archetype, optimal_strategy};
use clmm_jit_core::valuation::{classify_move, price_impact, threshold_sign};
use clmm_jit_core::{
    Direction, JitConfig, MarketPrices, PoolState, Position, SolverKind, SwapParams,
};
use clmm_jit_sim::ingest::{ingest, write_corpus, SwapEvent};
use clmm_jit_sim::oracle::{compare_swap, compare_utility, DEFAULT_STEPS};
use clmm_jit_sim::output::{to_json, write_json, write_records_csv, write_sweep_csv};
use clmm_jit_sim::replay::{replay, threads_from_env, ReplayConfig};
use clmm_jit_sim::snapshot::{load_pool, PoolSnapshot};
use clmm_jit_sim::summary::summarize;
use clmm_jit_sim::sweep::budget_sweep;
use clmm_jit_sim::synth::{synthetic_corpus, SynthConfig};
use serde::{Deserialize, Serialize};

/// Concentrated-liquidity price impact and JIT liquidity optimization.
#[derive(Parser)]
#[command(name = "clmm-jit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price impact of a position for a pool price move.
    Impact(ImpactArgs),
    /// Best JIT position for a single swap.
    Optimize(OptimizeArgs),
    /// Move class and trade archetype of a price move.
    Classify(ClassifyArgs),
    /// Replay a swap corpus; writes records.csv and summary.json.
    Replay(CorpusArgs),
    /// Budget sweep over a swap corpus; writes sweep.csv.
    Sweep(SweepArgs),
    /// Check the fast swap and optimizer against slow references.
    Oracle(OracleArgs),
    /// Write a seeded synthetic corpus (swaps.csv and pools/).
    Synth(SynthArgs),
}

#[derive(Args)]
struct ImpactArgs {
    #[arg(long, default_value_t = 1.0)]
    liquidity: f64,
    /// Lower price of the range (0 for full range).
    #[arg(long, default_value_t = 0.0)]
    lower: f64,
    /// Upper price of the range (inf for full range).
    #[arg(long, default_value_t = f64::INFINITY)]
    upper: f64,
    #[arg(long)]
    q: f64,
    #[arg(long = "q-prime")]
    q_prime: f64,
    #[arg(long)]
    px: f64,
    #[arg(long)]
    py: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    q: f64,
    #[arg(long = "q-prime")]
    q_prime: f64,
    #[arg(long)]
    px: f64,
    #[arg(long)]
    py: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct JitArgs {
    /// Dollar budget; for replay and sweep only events without an observed
    /// position or budget_usd use it.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long = "bid-cost")]
    bid_cost: Option<f64>,
    /// GRID_REFINE or PSO.
    #[arg(long)]
    solver: Option<SolverKind>,
    #[arg(long = "grid-points")]
    grid_points: Option<usize>,
    #[arg(long = "refine-iterations")]
    refine_iterations: Option<usize>,
    #[arg(long = "pso-particles")]
    pso_particles: Option<usize>,
    #[arg(long = "pso-iterations")]
    pso_iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "utility-floor")]
    utility_floor: Option<f64>,
    /// Only consider ranges that contain the pre-trade price.
    #[arg(long = "strict-membership")]
    strict_membership: bool,
}

impl JitArgs {
    fn apply(&self, mut cfg: JitConfig) -> JitConfig {
        if let Some(v) = self.budget {
            cfg.budget = v;
        }
        if let Some(v) = self.bid_cost {
            cfg.bid_cost = v;
        }
        if let Some(v) = self.solver {
            cfg.solver = v;
        }
        if let Some(v) = self.grid_points {
            cfg.grid_points = v;
        }
        if let Some(v) = self.refine_iterations {
            cfg.refine_iterations = v;
        }
        if let Some(v) = self.pso_particles {
            cfg.pso_particles = v;
        }
        if let Some(v) = self.pso_iterations {
            cfg.pso_iterations = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.utility_floor {
            cfg.utility_floor = v;
        }
        cfg.strict_membership |= self.strict_membership;
        cfg
    }
}

#[derive(Args)]
struct OptimizeArgs {
    /// Pool snapshot (pool.json format).
    #[arg(long, required_unless_present = "request")]
    pool: Option<PathBuf>,
    /// Swap description: amount_in, direction, p_x_usd, p_y_usd and an
    /// optional fee_rate.
    #[arg(long, required_unless_present = "request")]
    swap: Option<PathBuf>,
    /// Request file {pool, swap, jit_config} instead of --pool/--swap.
    #[arg(long, conflicts_with_all = ["pool", "swap"])]
    request: Option<PathBuf>,
    #[command(flatten)]
    jit: JitArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    swaps: PathBuf,
    /// Directory holding <pool_id>.json snapshots.
    #[arg(long)]
    pools: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    jit: JitArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Comma-separated budget multipliers.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,2.5,3")]
    multipliers: Vec<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    pool: PathBuf,
    #[arg(long)]
    swap: PathBuf,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Largest accepted relative deviation of q' and amount_out.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Size of the exhaustive (range, L) grid for the optimizer check.
    #[arg(long = "grid-candidates", default_value_t = 10_000)]
    grid_candidates: usize,
    /// Also check the optimizer; needs a budget.
    #[command(flatten)]
    jit: JitArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    events: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SwapFile {
    amount_in: f64,
    direction: Direction,
    #[serde(alias = "p_x")]
    p_x_usd: f64,
    #[serde(alias = "p_y")]
    p_y_usd: f64,
    #[serde(default)]
    fee_rate: Option<f64>,
}

impl SwapFile {
    fn params(&self, pool: PoolState) -> Result<SwapParams> {
        let pool = match self.fee_rate {
            Some(f) => pool.with_fee_rate(f)?,
            None => pool,
        };
        let prices = MarketPrices::new(self.p_x_usd, self.p_y_usd)?;
        Ok(SwapParams::new(
            pool,
            self.amount_in,
            self.direction,
            prices,
        )?)
    }
}

#[derive(Deserialize)]
struct OptimizeRequest {
    pool: PoolSnapshot,
    swap: SwapFile,
    jit_config: JitConfig,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn impact(args: &ImpactArgs) -> Result<()> {
    let prices = MarketPrices::new(args.px, args.py)?;
    let pos = Position::new(args.liquidity, args.lower, args.upper)?;
    if !(args.q > 0.0 && args.q_prime > 0.0) {
        bail!("prices q and q' must be positive");
    }
    let report = price_impact(&pos, args.q, args.q_prime, &prices);
    let value = serde_json::json!({
        "value_at_mint": report.value_at_mint,
        "value_at_withdraw": report.value_at_withdraw,
        "absolute": report.absolute,
        "relative": report.relative,
        "sign": threshold_sign(args.q, args.q_prime, pos.lower, pos.upper, &prices),
        "move_class": classify_move(args.q, args.q_prime, &prices),
    });
    emit(args.output.as_deref(), &to_json(&value))
}

fn classify(args: &ClassifyArgs) -> Result<()> {
    let prices = MarketPrices::new(args.px, args.py)?;
    if !(args.q > 0.0 && args.q_prime > 0.0) {
        bail!("prices q and q' must be positive");
    }
    let value = serde_json::json!({
        "move_class": classify_move(args.q, args.q_prime, &prices),
        "archetype": classify_archetype(args.q, args.q_prime, &prices).ok(),
    });
    emit(args.output.as_deref(), &to_json(&value))
}

fn optimize(args: &OptimizeArgs) -> Result<()> {
    let (params, base) = match &args.request {
        Some(path) => {
            let req: OptimizeRequest = read_json(path)?;
            (req.swap.params(req.pool.to_pool()?)?, req.jit_config)
        }
        None => {
            let pool = load_pool(args.pool.as_deref().expect("clap requires --pool"))?;
            let file: SwapFile = read_json(args.swap.as_deref().expect("clap requires --swap"))?;
            if args.jit.budget.is_none() {
                bail!("--budget is required");
            }
            (file.params(pool)?, JitConfig::new(0.0, 0.0))
        }
    };
    let cfg = args.jit.apply(base);
    let decision = optimal_strategy(&params, &cfg)?;
    emit(args.output.as_deref(), &to_json(&decision))
}

fn load_corpus(args: &CorpusArgs) -> Result<(Vec<SwapEvent>, ReplayConfig)> {
    let events = ingest(&args.swaps, &args.pools)?;
    let cfg = args
        .jit
        .apply(JitConfig::new(args.jit.budget.unwrap_or(0.0), 0.0));
    if args.jit.budget.is_none() {
        if let Some(e) = events
            .iter()
            .find(|e| e.observed_jit.is_none() && e.budget.is_none())
        {
            bail!(
                "event {} has neither an observed position nor budget_usd; pass --budget",
                e.event_id
            );
        }
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    Ok((
        events,
        ReplayConfig {
            jit: cfg,
            threads: threads_from_env(),
        },
    ))
}

fn run_replay(args: &CorpusArgs) -> Result<()> {
    let (events, cfg) = load_corpus(args)?;
    let records = replay(&events, &cfg);
    write_records_csv(&args.out.join("records.csv"), &records)?;
    let summary = summarize(&records)?;
    write_json(&args.out.join("summary.json"), &summary)?;
    let brief = serde_json::json!({
        "events": summary.events,
        "failed": summary.failed,
        "participated": summary.participated,
        "total_optimized": summary.total_optimized,
        "total_real": summary.total_real,
        "uplift": summary.uplift,
        "mean_impact_share": summary.mean_impact_share,
    });
    emit(None, &to_json(&brief))
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let (events, cfg) = load_corpus(&args.corpus)?;
    let points = budget_sweep(&events, &args.multipliers, &cfg)?;
    write_sweep_csv(&args.corpus.out.join("sweep.csv"), &points)?;
    emit(None, &to_json(&points))
}

fn oracle(args: &OracleArgs) -> Result<bool> {
    let pool = load_pool(&args.pool)?;
    let file: SwapFile = read_json(&args.swap)?;
    let params = file.params(pool)?;
    let swap = compare_swap(&params.pool, params.amount_in, params.direction, args.steps)
        .context("swap runs off the grid")?;
    let swap_ok = swap.max_rel_dev() <= args.tolerance;
    let mut report = serde_json::json!({
        "swap": swap,
        "max_rel_dev": swap.max_rel_dev(),
        "tolerance": args.tolerance,
        "swap_pass": swap_ok,
    });
    let mut pass = swap_ok;
    if args.jit.budget.is_some() {
        let cfg = args.jit.apply(JitConfig::new(0.0, 0.0));
        let decision = optimal_strategy(&params, &cfg)?;
        let cmp = compare_utility(&params, &cfg, &decision, args.grid_candidates)?;
        let ok = cmp.margin >= -1e-9;
        report["utility"] = serde_json::to_value(cmp)?;
        report["utility_pass"] = ok.into();
        pass &= ok;
    }
    report["pass"] = pass.into();
    emit(args.output.as_deref(), &to_json(&report))?;
    Ok(pass)
}

fn synth(args: &SynthArgs) -> Result<()> {
    let events = synthetic_corpus(&SynthConfig::new(args.events, args.seed));
    let (swaps, pools) = write_corpus(&args.out, &events)?;
    let value = serde_json::json!({
        "events": events.len(),
        "swaps": swaps,
        "pools": pools,
    });
    emit(None, &to_json(&value))
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors; 2 is reserved for oracle mismatches
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
    let result = match &cli.command {
        Command::Impact(a) => impact(a).map(|_| true),
        Command::Optimize(a) => optimize(a).map(|_| true),
        Command::Classify(a) => classify(a).map(|_| true),
        Command::Replay(a) => run_replay(a).map(|_| true),
        Command::Sweep(a) => run_sweep(a).map(|_| true),
        Command::Oracle(a) => oracle(a),
        Command::Synth(a) => synth(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: oracle mismatch");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
