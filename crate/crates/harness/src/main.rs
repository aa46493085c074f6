//! `monodag` CLI: generate instances, run testers, compute exact distances,
//! verify bundles, and drive experiments.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use monodag::gibbs::{
    decode_index, edge_statistics, run_adaptive_game, sample_batch, GibbsModel, GibbsParams,
    RandomStrategy, SamplerConfig,
};
use monodag::graph::Dag;
use monodag::hard::{HardSampleFile, HardSampler, SampleTag};
use monodag::monotonicity::{distance_to_monotone, is_eps_far, Assignment};
use monodag::pmrs::{
    build_shift_pmrs, extract_dense_core, refine_family, verify_pmrs, DenseCoreConfig,
    PmrsFamily, ShiftParams, ShiftSetMode,
};
use monodag::rat::parse_rat;
use monodag::rng::substream_seed;
use monodag::testers::{run_tester, TesterConfig, TesterKind};
use monodag_harness::{regime_table, regimes_csv, run_experiment, verify_bundle, ExperimentSpec};

#[derive(Parser)]
#[command(name = "monodag", about = "Monotonicity testing on explicit DAGs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run one tester on a (graph, function) pair; prints a JSON report.
    Test(TestArgs),
    /// Exact distance to monotonicity with a matching certificate.
    Dist(DistArgs),
    /// Verify every instance file in a directory.
    Verify { dir: PathBuf },
    /// Experiments.
    #[command(subcommand)]
    Exp(ExpCommand),
    /// Gibbs adversary: sampling, games, statistics.
    #[command(subcommand)]
    Gibbs(GibbsCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Build a shift-matching PMRS family file.
    Pmrs(GenPmrsArgs),
    /// Draw hard YES/NO samples from a family file.
    Hard(GenHardArgs),
    /// Build a truncated-Gibbs model file over a family.
    Gibbs(GenGibbsArgs),
}

#[derive(Args)]
struct GenPmrsArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long = "N")]
    n_side: usize,
    #[arg(long = "P")]
    shift_cap: usize,
    /// full_box | difference_free
    #[arg(long, default_value = "full_box")]
    mode: String,
    /// Refine to this eps after building (optional), e.g. "1/8".
    #[arg(long)]
    refine_eps: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenHardArgs {
    #[arg(long)]
    family: PathBuf,
    /// yes | no
    #[arg(long)]
    dist: String,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GenGibbsArgs {
    #[arg(long)]
    family: PathBuf,
    /// Extract the balanced dense core first (difference-free families).
    #[arg(long)]
    core: bool,
    #[arg(long, default_value_t = 0)]
    core_seed: u64,
    #[arg(long)]
    hidden: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long = "boxB")]
    box_b: f64,
    #[arg(long, default_value_t = 100)]
    budget: usize,
    /// Drift tolerance u; defaults to beta * gamma / 10.
    #[arg(long)]
    drift_u: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TestArgs {
    /// mt_tr | mt3 | pair
    #[arg(long)]
    tester: String,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    function: PathBuf,
    /// Proximity parameter, e.g. "1/20".
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 8.0)]
    c1: f64,
    #[arg(long, default_value_t = 8.0)]
    c2: f64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    function: PathBuf,
    /// Also report eps-farness at this eps.
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Subcommand)]
enum ExpCommand {
    /// Run a rejection-probability sweep from a spec file; writes CSV.
    Run(ExpRunArgs),
    /// Emit the regime-comparison table as CSV.
    Regimes(ExpRegimesArgs),
}

#[derive(Args)]
struct ExpRunArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExpRegimesArgs {
    #[arg(long, default_value_t = 1_000_000.0)]
    n: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GibbsCommand {
    /// Draw configurations from a model file.
    Sample(GibbsSampleArgs),
    /// Play the adaptive game with a random strategy.
    Game(GibbsGameArgs),
    /// Edge/boundary statistics over sampled configurations.
    Stats(GibbsStatsArgs),
}

#[derive(Args)]
struct GibbsSampleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 200)]
    sweeps: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output assignment file (single sample) or directory (count > 1).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GibbsGameArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    budget: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    games: usize,
}

#[derive(Args)]
struct GibbsStatsArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    burn_in: usize,
    #[arg(long, default_value_t = 5)]
    thin: usize,
}

fn parse_mode(s: &str) -> anyhow::Result<ShiftSetMode> {
    match s {
        "full_box" | "full-box" => Ok(ShiftSetMode::FullBox),
        "difference_free" | "difference-free" => Ok(ShiftSetMode::DifferenceFree),
        other => bail!("unknown shift mode {other:?}"),
    }
}

fn parse_dist(s: &str) -> anyhow::Result<SampleTag> {
    match s {
        "yes" => Ok(SampleTag::Yes),
        "no" => Ok(SampleTag::No),
        other => bail!("unknown distribution {other:?} (yes|no)"),
    }
}

/// Atomic write via temp-and-rename.
fn write_atomic(path: &PathBuf, data: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, data)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn main() -> anyhow::Result<()> {
    if let Ok(threads) = std::env::var("MONODAG_THREADS") {
        let threads: usize = threads.parse().context("MONODAG_THREADS must be a number")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match Cli::parse().command {
        Command::Gen(GenCommand::Pmrs(args)) => {
            let params = ShiftParams::new(args.k, args.n_side, args.shift_cap, parse_mode(&args.mode)?)?;
            let mut family = build_shift_pmrs(&params)?;
            if let Some(eps) = &args.refine_eps {
                family = refine_family(&family, &parse_rat(eps)?)?;
            }
            family.to_file(&args.out)?;
            let report = verify_pmrs(&family);
            eprintln!(
                "wrote {} (n0 = {}, s = {}, verification {})",
                args.out.display(),
                family.n0(),
                family.s(),
                if report.pass { "pass" } else { "FAIL" }
            );
            if !report.pass {
                bail!("generated family failed verification");
            }
        }
        Command::Gen(GenCommand::Hard(args)) => {
            let family = PmrsFamily::from_file(&args.family)?;
            let sampler = HardSampler::new(&family)?;
            let dist = parse_dist(&args.dist)?;
            std::fs::create_dir_all(&args.out_dir)?;
            // Family reference stored relative to the sample directory.
            let family_abs = std::fs::canonicalize(&args.family)?;
            let dir_abs = std::fs::canonicalize(&args.out_dir)?;
            let family_rel = pathdiff(&family_abs, &dir_abs);
            for i in 0..args.count {
                let mut rng = monodag::rng::seeded_rng(substream_seed(args.seed, i as u64));
                let sample = sampler.sample(dist, &mut rng);
                let mut file = HardSampleFile::from(&sample);
                file.family = Some(family_rel.clone());
                let path = args.out_dir.join(format!("sample_{i:05}.json"));
                write_atomic(&path, &serde_json::to_string(&file)?)?;
            }
            eprintln!("wrote {} samples to {}", args.count, args.out_dir.display());
        }
        Command::Gen(GenCommand::Gibbs(args)) => {
            let mut family = PmrsFamily::from_file(&args.family)?;
            if args.core {
                let (core, report) =
                    extract_dense_core(&family, args.core_seed, &DenseCoreConfig::default())?;
                eprintln!(
                    "dense core: n0 = {}, degrees {}..{}, kept fraction {}",
                    report.n0_core,
                    report.min_degree,
                    report.max_degree,
                    monodag::rat::format_rat(&report.kept_fraction)
                );
                family = core;
            }
            let params = GibbsParams {
                alpha: args.alpha,
                lambda: args.lambda,
                beta: args.beta,
                gamma: args.gamma,
                box_b: args.box_b,
                query_budget: args.budget,
                drift_tolerance: args.drift_u.unwrap_or(args.beta * args.gamma / 10.0),
            };
            let model = GibbsModel::from_family(&family, args.hidden, params)?;
            model.to_file(&args.out)?;
            eprintln!("wrote {}", args.out.display());
        }
        Command::Test(args) => {
            let kind: TesterKind = args.tester.parse()?;
            let graph = Dag::from_file(&args.graph)?;
            let function = Assignment::from_file(&args.function)?;
            if function.len() != graph.n() {
                bail!("function length {} != n = {}", function.len(), graph.n());
            }
            let cfg = TesterConfig {
                eps: parse_rat(&args.eps)?,
                c1: args.c1,
                c2: args.c2,
                seed: args.seed,
            };
            let report = match &function {
                Assignment::Exact(vals) => {
                    let oracle = |v: usize| vals[v];
                    run_tester(kind, &graph, &oracle, &cfg)?
                }
                Assignment::Float(vals) => {
                    let oracle = |v: usize| vals[v];
                    run_tester(kind, &graph, &oracle, &cfg)?
                }
            };
            let json = serde_json::json!({
                "tester": args.tester,
                "verdict": report.verdict,
                "witness": report.witness,
                "stage": report.stage,
                "queries_raw": report.queries_raw,
                "queries_unique": report.queries_unique,
                "q_loop1": report.q_per_loop.0,
                "q_loop2": report.q_per_loop.1,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
        Command::Dist(args) => {
            let graph = Dag::from_file(&args.graph)?;
            let function = Assignment::from_file(&args.function)?;
            let report = distance_to_monotone(&graph, &function)?;
            let eps_far = match &args.eps {
                Some(e) => Some(is_eps_far(&graph, &function, &parse_rat(e)?)?),
                None => None,
            };
            let json = serde_json::json!({
                "n": graph.n(),
                "distance": report.distance,
                "certificate_size": report.certificate.len(),
                "certificate": report.certificate,
                "eps": args.eps,
                "eps_far": eps_far,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
        Command::Verify { dir } => {
            let report = verify_bundle(&dir)?;
            print!("{}", report.render());
            if !report.pass {
                std::process::exit(1);
            }
        }
        Command::Exp(ExpCommand::Run(args)) => {
            let spec = ExperimentSpec::from_file(args.spec.to_str().context("spec path")?)?;
            let started = std::time::Instant::now();
            let report = run_experiment(&spec, args.seed)?;
            // Wall time goes to stderr only; the report file stays a pure
            // function of (spec, seed).
            eprintln!("experiment finished in {:?}", started.elapsed());
            write_atomic(&args.out, &report.to_csv())?;
            eprintln!("wrote {}", args.out.display());
        }
        Command::Exp(ExpCommand::Regimes(args)) => {
            let table = regime_table(args.n, args.eps, args.step);
            let csv = regimes_csv(&table);
            match args.out {
                Some(path) => {
                    write_atomic(&path, &csv)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
        }
        Command::Gibbs(GibbsCommand::Sample(args)) => {
            let model = GibbsModel::from_file(&args.model)?;
            if args.count == 1 {
                let config = monodag::gibbs::gibbs_sweep_sample(&model, args.sweeps, args.seed)?;
                config.to_file(&args.out)?;
                eprintln!("wrote {}", args.out.display());
            } else {
                std::fs::create_dir_all(&args.out)?;
                let cfg = SamplerConfig {
                    burn_in: args.sweeps,
                    thin: 5,
                    chains: 0,
                };
                let samples = sample_batch(&model, args.count, &cfg, args.seed)?;
                for (i, values) in samples.into_iter().enumerate() {
                    let path = args.out.join(format!("config_{i:05}.json"));
                    Assignment::Float(values).to_file(&path)?;
                }
                eprintln!("wrote {} configs to {}", args.count, args.out.display());
            }
        }
        Command::Gibbs(GibbsCommand::Game(args)) => {
            let model = GibbsModel::from_file(&args.model)?;
            let sampler = SamplerConfig {
                burn_in: args.burn_in,
                thin: 5,
                chains: 1,
            };
            let mut rows = Vec::new();
            for g in 0..args.games {
                let seed = substream_seed(args.seed, g as u64);
                let mut strategy = RandomStrategy::new(seed ^ 0xABCD);
                let record = run_adaptive_game(&model, &mut strategy, args.budget, seed, &sampler)?;
                let decoded = decode_index(&model, &record);
                rows.push(serde_json::json!({
                    "game": g,
                    "verdict": record.verdict,
                    "queries": record.queries_used,
                    "closed_edges": record.closed_edges.len(),
                    "witnessed_violations": record.witnessed_violations().count(),
                    "spur_qry": record.spur_qry,
                    "bdry_qry": record.bdry_qry,
                    "decoded_index": decoded,
                    "hidden_recovered": decoded == model.verification_index(),
                }));
            }
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
        Command::Gibbs(GibbsCommand::Stats(args)) => {
            let model = GibbsModel::from_file(&args.model)?;
            let cfg = SamplerConfig {
                burn_in: args.burn_in,
                thin: args.thin,
                chains: 0,
            };
            let samples = sample_batch(&model, args.count, &cfg, args.seed)?;
            let report = edge_statistics(&model, &samples)?;
            let diag = monodag::gibbs::diagnostics(&model);
            let json = serde_json::json!({
                "samples": report.samples,
                "matching_violation_freq": report.matching_violation_freq,
                "spurious_violation_freq": report.spurious_violation_freq,
                "goodmatch_freq": report.goodmatch_freq,
                "boundary_strip_freq_left": report.boundary_strip_freq_left,
                "boundary_strip_freq_right": report.boundary_strip_freq_right,
                "mean_violated_matching_fraction": report.mean_violated_matching_fraction,
                "mean_farness_bound": report.mean_farness_bound,
                "diagnostics": diag,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
    }
    Ok(())
}

/// Relative path from `dir` to `target` (both absolute), using `..` hops.
fn pathdiff(target: &std::path::Path, dir: &std::path::Path) -> String {
    let t: Vec<_> = target.components().collect();
    let d: Vec<_> = dir.components().collect();
    let common = t.iter().zip(&d).take_while(|(a, b)| a == b).count();
    let mut parts: Vec<String> = std::iter::repeat_n("..".to_string(), d.len() - common).collect();
    for c in &t[common..] {
        parts.push(c.as_os_str().to_string_lossy().into_owned());
    }
    if parts.is_empty() {
        ".".into()
    } else {
        parts.join("/")
    }
}
