//! Command line front end. [`run`] parses arguments, executes one verb and
//! returns the process exit code: 0 on success, 1 for usage errors and 2
//! for data errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rcc8::generator::{count_inconsistent_triples, RegionCount};
use rcc8::harness::{self, instance_seed, SweepConfig, SweepEntry};
use rcc8::portfolio::{self, PortfolioPlan};
use rcc8::{Calculus, FlawReport, GenSpec, HeuristicConfig, Instance, Model, Order, Scope, Solver, SplitSetId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rcc8", version, about = "RCC-8 consistency workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write random instances, one numbered file each.
    Generate(GenerateArgs),
    /// Solve one instance with one heuristic configuration.
    Solve(SolveArgs),
    /// Phase-transition sweep; emits the sweep CSV.
    Sweep(SweepArgs),
    /// Keep the corpus instances some configuration cannot decide within the cap.
    CollectHard(CollectArgs),
    /// Run or optimise heuristic portfolios.
    #[command(subcommand)]
    Portfolio(PortfolioCommand),
    /// Triple census and degree thresholds of the random models.
    Flaws(FlawsArgs),
    /// Relation subset tables.
    #[command(subcommand)]
    Subsets(SubsetsCommand),
    /// Turn sweep or run-record CSVs into report files.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_model)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: f64,
    #[arg(long, default_value_t = 4.0)]
    l: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_split)]
    split: SplitSetId,
    #[arg(long, value_parser = parse_order)]
    order: Order,
    #[arg(long, value_parser = parse_scope)]
    scope: Scope,
    #[arg(long, default_value_t = 10_000)]
    max_nodes: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_model)]
    model: Model,
    /// Region counts; repeat for several.
    #[arg(long = "n", required = true)]
    ns: Vec<usize>,
    #[arg(long)]
    d_start: f64,
    #[arg(long)]
    d_stop: f64,
    #[arg(long, default_value_t = 0.5)]
    d_step: f64,
    #[arg(long, default_value_t = 4.0)]
    l: f64,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// `split/order/scope`, `portfolio` or `all`; repeat for several.
    #[arg(long = "config", default_value = "portfolio")]
    configs: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CollectArgs {
    /// Directory of `.rcc8` files.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    cap: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum PortfolioCommand {
    /// Solve instances live with a plan.
    Run {
        #[arg(long = "instance", required = true)]
        instances: Vec<PathBuf>,
        /// Plan file; the default four-heuristic plan when absent.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Best combination per total budget over recorded runs.
    Optimize {
        #[arg(long)]
        records: PathBuf,
        #[arg(long = "budget", required = true)]
        budgets: Vec<u64>,
    },
}

#[derive(Debug, Args)]
struct FlawsArgs {
    /// Count inconsistent relation triples.
    #[arg(long)]
    census: bool,
    /// `n=<count>` or `n=inf`; repeat for several.
    #[arg(long = "thresholds", value_parser = parse_region_count)]
    thresholds: Vec<RegionCount>,
    /// Expected inconsistent-triple counts to solve for.
    #[arg(long = "target", default_values_t = [1.0, 0.5])]
    targets: Vec<f64>,
    #[arg(long, value_parser = parse_model, default_value = "A")]
    model: Model,
}

#[derive(Debug, Subcommand)]
enum SubsetsCommand {
    /// One CSV row per relation.
    Dump {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Sweep CSV to chart.
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Run-record CSV to summarise.
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_model(s: &str) -> Result<Model, String> {
    match s.parse::<Model>() {
        Ok(Model::Custom) | Err(_) => Err(format!("`{s}` is not A or H")),
        Ok(m) => Ok(m),
    }
}

fn parse_split(s: &str) -> Result<SplitSetId, String> {
    s.parse().map_err(|e: rcc8::Error| e.to_string())
}

fn parse_order(s: &str) -> Result<Order, String> {
    s.parse().map_err(|e: rcc8::Error| e.to_string())
}

fn parse_scope(s: &str) -> Result<Scope, String> {
    s.parse().map_err(|e: rcc8::Error| e.to_string())
}

fn parse_region_count(s: &str) -> Result<RegionCount, String> {
    let v = s.strip_prefix("n=").unwrap_or(s);
    if v.eq_ignore_ascii_case("inf") || v == "∞" {
        return Ok(RegionCount::Infinite);
    }
    v.parse::<u64>()
        .ok()
        .filter(|&n| n >= 3)
        .map(RegionCount::Finite)
        .ok_or_else(|| format!("`{s}` is not n=<count ≥ 3> or n=inf"))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<rcc8::Error> for Failure {
    fn from(e: rcc8::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (program name first), runs the verb and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DATA
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Outcome {
    let calculus = Calculus::shared();
    match cmd {
        Command::Generate(a) => generate(a, out),
        Command::Solve(a) => solve(calculus, a, out),
        Command::Sweep(a) => sweep(calculus, a, out),
        Command::CollectHard(a) => collect_hard(calculus, a, out),
        Command::Portfolio(PortfolioCommand::Run { instances, plan }) => portfolio_run(calculus, &instances, plan, out),
        Command::Portfolio(PortfolioCommand::Optimize { records, budgets }) => portfolio_optimize(&records, &budgets, out),
        Command::Flaws(a) => flaws(calculus, a, out),
        Command::Subsets(SubsetsCommand::Dump { out: path }) => emit(harness::subsets_csv(calculus), path.as_deref(), out),
        Command::Report(a) => report(a, out),
    }
}

fn emit(text: String, path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Outcome {
    if a.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    std::fs::create_dir_all(&a.out).map_err(|e| Failure::Data(format!("{}: {e}", a.out.display())))?;
    for k in 0..a.count {
        let seed = instance_seed(a.seed, a.model, a.n, a.d, k);
        let spec = GenSpec::new(a.model, a.n, a.d, seed).with_label_size(a.l);
        let inst = rcc8::generate(&spec)?;
        let path = a.out.join(format!("{}_n{}_d{}_{k:04}.rcc8", a.model, a.n, a.d));
        inst.save(&path)?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn solve(calculus: &Calculus, a: SolveArgs, out: &mut dyn Write) -> Outcome {
    let inst = Instance::load(&a.instance)?;
    let cfg = HeuristicConfig::new(a.split, a.order, a.scope);
    let res = Solver::new(calculus, cfg).solve(&inst.network, a.max_nodes)?;
    writeln!(out, "instance,split,order,scope,status,visited_nodes,millis")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{:.3}",
        a.instance.display(),
        cfg.split,
        cfg.order,
        cfg.scope,
        res.status,
        res.visited_nodes,
        res.wall_time.as_secs_f64() * 1e3
    )?;
    Ok(())
}

fn sweep_entries(specs: &[String]) -> Result<Vec<SweepEntry>, Failure> {
    let mut entries = Vec::new();
    for s in specs {
        if s.eq_ignore_ascii_case("all") {
            entries.extend(HeuristicConfig::all().into_iter().map(SweepEntry::Config));
        } else {
            entries.push(s.parse().map_err(|e: rcc8::Error| Failure::Usage(format!("--config {s}: {e}")))?);
        }
    }
    Ok(entries)
}

fn sweep(calculus: &Calculus, a: SweepArgs, out: &mut dyn Write) -> Outcome {
    let cfg = SweepConfig {
        model: a.model,
        ns: a.ns,
        d_start: a.d_start,
        d_stop: a.d_stop,
        d_step: a.d_step,
        l: a.l,
        instances: a.instances,
        entries: sweep_entries(&a.configs)?,
        cap: a.cap,
        seed: a.seed,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let points = harness::sweep(calculus, &cfg)?;
    emit(harness::sweep_csv(&points)?, a.out.as_deref(), out)
}

fn collect_hard(calculus: &Calculus, a: CollectArgs, out: &mut dyn Write) -> Outcome {
    let corpus = harness::load_corpus(&a.corpus)?;
    let set = harness::collect_hard(calculus, &corpus, a.cap)?;
    set.write(&a.out)?;
    writeln!(out, "{} of {} instances are hard at cap {}", set.len(), corpus.len(), a.cap)?;
    Ok(())
}

fn portfolio_run(calculus: &Calculus, paths: &[PathBuf], plan: Option<PathBuf>, out: &mut dyn Write) -> Outcome {
    let plan = plan.map(PortfolioPlan::load).transpose()?;
    writeln!(out, "instance,status,first_responder,total_nodes,millis")?;
    for path in paths {
        let inst = Instance::load(path)?;
        let plan = plan.clone().unwrap_or_else(|| portfolio::default_plan(inst.network.len()));
        let res = portfolio::run_portfolio(calculus, &inst.network, &plan)?;
        writeln!(
            out,
            "{},{},{},{},{:.3}",
            path.display(),
            res.status,
            res.first_responder.map(|c| c.to_string()).unwrap_or_default(),
            res.total_nodes,
            res.wall_time.as_secs_f64() * 1e3
        )?;
    }
    Ok(())
}

fn portfolio_optimize(records: &Path, budgets: &[u64], out: &mut dyn Write) -> Outcome {
    let records = portfolio::read_records(records)?;
    let mut text = String::from("budget,solved,combination\n");
    for &b in budgets {
        let best = portfolio::optimize_combination(&records, b)?;
        let _ = writeln!(text, "{},{},{}", best.budget, best.solved, best.combination_label());
    }
    Ok(out.write_all(text.as_bytes())?)
}

fn flaws(calculus: &Calculus, a: FlawsArgs, out: &mut dyn Write) -> Outcome {
    if !a.census && a.thresholds.is_empty() {
        return Err(Failure::Usage("give --census and/or --thresholds n=<count|inf>".into()));
    }
    if a.targets.iter().any(|&t| !(t > 0.0)) {
        return Err(Failure::Usage("--target values must be positive".into()));
    }
    let census = count_inconsistent_triples(calculus.full());
    if a.census {
        writeln!(out, "inconsistent,total,ratio,percent")?;
        writeln!(
            out,
            "{},{},{:.8},{:.6}",
            census.inconsistent,
            census.total,
            census.probability(),
            100.0 * census.probability()
        )?;
    }
    if !a.thresholds.is_empty() {
        let analysis = FlawReport::for_model(a.model, census.ratio());
        writeln!(out, "model,n,target_eit,d")?;
        for &n in &a.thresholds {
            let label = match n {
                RegionCount::Finite(v) => v.to_string(),
                RegionCount::Infinite => "inf".into(),
            };
            for &t in &a.targets {
                let d = analysis.d_for_eit(n, t).map(|d| format!("{d:.4}")).unwrap_or_default();
                writeln!(out, "{},{label},{t},{d}", a.model)?;
            }
        }
    }
    Ok(())
}

fn report(a: ReportArgs, out: &mut dyn Write) -> Outcome {
    if a.sweep.is_none() && a.records.is_none() {
        return Err(Failure::Usage("give --sweep FILE and/or --records FILE".into()));
    }
    std::fs::create_dir_all(&a.out).map_err(|e| Failure::Data(format!("{}: {e}", a.out.display())))?;
    if let Some(path) = &a.sweep {
        let points = harness::read_sweep_csv(path)?;
        harness::write_report(&a.out, &points)?;
        writeln!(out, "{}", a.out.join("sweep.csv").display())?;
    }
    if let Some(path) = &a.records {
        let records = portfolio::read_records(path)?;
        let mut text = String::from("config,solved_pct,first_pct\n");
        for row in portfolio::first_response_table(&records)? {
            let _ = writeln!(text, "{},{:.2},{:.2}", row.config, row.solved_pct, row.first_pct);
        }
        let target = a.out.join("first_response.csv");
        std::fs::write(&target, text).map_err(|e| Failure::Data(format!("{}: {e}", target.display())))?;
        writeln!(out, "{}", target.display())?;
    }
    Ok(())
}
