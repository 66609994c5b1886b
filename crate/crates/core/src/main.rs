use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use aivat::estimators::EstimatorSpec;
use aivat::game::{extend_with_seat_chance, BaseGame, GameDescriptor, GameTree};
use aivat::harness::{
    decomposition_text, estimate_log, read_samples, run_oracle, samples_to_text, simulate, solve, with_workers,
    AgentSpec, EpisodeLog, EstimationPlan, LogHeader, OracleConfig, ValueSource,
};
use aivat::partitions::{build_h_partition, build_w_partition, PaSpec};
use aivat::solver::ValueFunction;
use aivat::stats::{compare, summarize, to_csv, to_table};
use aivat::strategy::Profile;
use aivat::{Error, Result};

/// Unbiased low-variance evaluation of poker agents on Kuhn and Leduc.
#[derive(Parser, Debug)]
#[command(name = "aivat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a game with MCCFR and write strategy and value files.
    Solve(SolveArgs),
    /// Simulate seat-alternating matches and write an episode log.
    Simulate(SimulateArgs),
    /// Run estimators over an episode log.
    Estimate(EstimateArgs),
    /// Check exact unbiasedness of every estimator by enumeration.
    Oracle(OracleArgs),
    /// Summarize a samples file.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    game: BaseGame,
    #[arg(long, default_value_t = 1_000_000)]
    iterations: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    game: BaseGame,
    /// Strategy file, `uniform` or `callraise`.
    #[arg(long)]
    x: AgentSpec,
    #[arg(long)]
    y: AgentSpec,
    #[arg(long, default_value_t = 10_000)]
    games: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Episode log; defaults to `<out>/episodes.txt`.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Must match the log when given.
    #[arg(long)]
    game: Option<BaseGame>,
    /// Overrides the agent named in the log header.
    #[arg(long)]
    x: Option<AgentSpec>,
    #[arg(long)]
    y: Option<AgentSpec>,
    /// Known players for estimators given without an explicit set.
    #[arg(long, default_value = "cx")]
    pa: PaSpec,
    /// Value file; exact self-play values of x are computed when absent.
    #[arg(long)]
    values: Option<PathBuf>,
    #[arg(long, default_value = "chips,mivat,mivat_io,aivat")]
    estimators: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Also write base values and correction terms per episode.
    #[arg(long)]
    decompose: bool,
    /// Also write the partitions used by each AIVAT estimator.
    #[arg(long)]
    dump_partitions: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    game: BaseGame,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Added to every AIVAT estimate to check the oracle detects bias.
    #[arg(long, default_value_t = 0.0, hide = true)]
    inject_bias: f64,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    samples: PathBuf,
    /// Directory for report.csv and report.txt; printed only when absent.
    #[arg(long)]
    out: Option<PathBuf>,
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn extended_tree(game: BaseGame) -> GameTree {
    GameTree::build(extend_with_seat_chance(GameDescriptor {
        base: game,
        seat_extended: false,
    }))
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    if a.iterations == 0 {
        return Err(Error::usage("--iterations must be at least 1"));
    }
    let (report, files) = solve(a.game, a.iterations, a.seed, &a.out)?;
    println!("iterations {}", report.iterations);
    println!("exploitability {:.6}", report.exploitability);
    println!("strategy {}", files.strategy.display());
    println!("values {}", files.values.display());
    println!("values_exact {}", files.values_exact.display());
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    if a.games == 0 {
        return Err(Error::usage("--games must be at least 1"));
    }
    let tree = extended_tree(a.game);
    let x = Arc::new(a.x.load(a.game)?);
    let y = Arc::new(a.y.load(a.game)?);
    let profile = tree.resolve(&Profile::full(x, y))?;
    let episodes = with_workers(a.workers, || simulate(&tree, &profile, a.games, a.seed))??;
    let log = EpisodeLog {
        header: LogHeader {
            game: a.game,
            seed: a.seed,
            x: a.x.to_string(),
            y: a.y.to_string(),
        },
        episodes,
    };
    std::fs::create_dir_all(&a.out)?;
    let path = a.out.join("episodes.txt");
    log.write(&path)?;
    let mean = summarize(log.episodes.iter().map(|e| e.outcome), "chips").ok();
    println!("episodes {} -> {}", log.episodes.len(), path.display());
    if let Some(r) = mean {
        println!("mean chips {:.5} +- {:.5}", r.mean, r.stderr);
    }
    Ok(())
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let log_path = a.log.clone().unwrap_or_else(|| a.out.join("episodes.txt"));
    let log = EpisodeLog::read(&log_path)?;
    let game = log.header.game;
    if let Some(g) = a.game {
        if g != game {
            return Err(Error::usage(format!("--game {g} but the log holds {game}")));
        }
    }
    let x_spec = match a.x {
        Some(s) => s,
        None => log.header.x.parse()?,
    };
    let y_spec = match a.y {
        Some(s) => s,
        None => log.header.y.parse()?,
    };
    let specs = EstimatorSpec::parse_list(&a.estimators, a.pa)?;
    let tree = extended_tree(game);
    let x = Arc::new(x_spec.load(game)?);
    let y = Arc::new(y_spec.load(game)?);
    let source = match &a.values {
        Some(path) => ValueSource::File(ValueFunction::parse(&read(path)?)?),
        None => ValueSource::Exact,
    };
    let (plan, result) = with_workers(a.workers, || -> Result<_> {
        let plan = EstimationPlan::build(&tree, x, Some(y), &specs, &source)?;
        let result = estimate_log(&tree, &log.episodes, &plan)?;
        Ok((plan, result))
    })??;
    if plan.zero_reach_parts > 0 {
        eprintln!(
            "note: {} value-function parts are unreachable under x's strategy and use uniform weights",
            plan.zero_reach_parts
        );
    }

    std::fs::create_dir_all(&a.out)?;
    std::fs::write(a.out.join("samples.txt"), samples_to_text(&log.episodes, &result))?;
    if a.decompose {
        std::fs::write(
            a.out.join("decomposition.txt"),
            decomposition_text(&log.episodes, &result),
        )?;
    }
    if a.dump_partitions {
        for spec in &specs {
            if spec.kind == aivat::estimators::EstimatorKind::Aivat {
                dump_partitions(&tree, spec.pa, &a.out)?;
            }
        }
    }
    write_report(&result.rows, &result.reductions, Some(&a.out))
}

fn dump_partitions(tree: &GameTree, pa: PaSpec, out: &Path) -> Result<()> {
    let hp = build_h_partition(tree, pa);
    let wp = build_w_partition(tree, pa, &hp);
    let mut text = hp.to_text(tree);
    for part in &wp.parts {
        let members: Vec<String> = part.members.iter().map(|&z| tree.node(z).state.to_string()).collect();
        text.push_str(&format!("W {} members={}\n", part.key, members.join(",")));
    }
    std::fs::write(out.join(format!("partitions_{pa}.txt")), text)?;
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let mut config = OracleConfig::new(a.game, a.trials, a.seed);
    config.bias = a.inject_bias;
    let report = run_oracle(&config)?;
    for name in ["aivat", "mivat", "mivat_io", "mivat_io_end", "base", "parts"] {
        println!("{name:<12} max error {:.3e}", report.max_error(name));
    }
    let failures: Vec<_> = report.failures().collect();
    for f in &failures {
        println!("{f}");
    }
    if failures.is_empty() {
        println!("PASS {} checks", report.checks.len());
        Ok(())
    } else {
        Err(Error::OracleFailure(format!(
            "{} of {} checks failed",
            failures.len(),
            report.checks.len()
        )))
    }
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let samples = read_samples(&read(&a.samples)?)?;
    let rows = samples
        .into_iter()
        .map(|(label, vs)| summarize(vs, label))
        .collect::<Result<Vec<_>>>()?;
    let baseline = rows
        .iter()
        .find(|r| r.label == "chips")
        .or(rows.first())
        .ok_or_else(|| Error::usage("samples file is empty"))?;
    let reductions = compare(baseline, &rows)?;
    write_report(&rows, &reductions, a.out.as_deref())
}

fn write_report(
    rows: &[aivat::stats::SummaryRow],
    reductions: &[aivat::stats::ReductionRow],
    out: Option<&Path>,
) -> Result<()> {
    let table = to_table(rows, reductions);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), to_csv(rows, reductions))?;
        std::fs::write(dir.join("report.txt"), &table)?;
    }
    print!("{table}");
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read `{}`: {e}", path.display())))
}
