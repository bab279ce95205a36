//! Command-line surface: solve / bench / verify / oracle / generate /
//! certify. Exit codes: 0 ok, 1 verification failure, 2 invalid input,
//! 3 solver failure, 4 size caps exceeded.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hybrid_sched::allocate::{optimal_b, round_half, RoundingParams};
use hybrid_sched::bounds::{bounds_report, load_and_cp, theoretical_ratio, OracleCaps};
use hybrid_sched::error::Error;
use hybrid_sched::genlab::{
    corollary_instance, gap_report, qpartite_yes_graph, random_layered_dag, reduction_instance,
    yes_case_schedule, QPartiteGraph, RandomDagConfig, ReductionParams, SizeCaps,
};
use hybrid_sched::instance::{validate_schedule, Instance, Schedule};
use hybrid_sched::lp::{allocation_lp_names, build_allocation_lp, solve_relaxation};
use hybrid_sched::schedule::{gantt_csv, hlp_b, list_schedule, Diagnostics};

/// Above this task count the LP path is refused by default: dense arc sets
/// (as in the hardness reductions) blow up the row count, and the certified
/// schedules do not need the LP.
const DEFAULT_LP_CAP: usize = 5000;

#[derive(Parser)]
#[command(name = "hybrid-sched", version, about = "Scheduling on hybrid CPU/GPU platforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with the LP + rounding + list-scheduling pipeline.
    Solve(SolveArgs),
    /// Batch-run a corpus and emit a CSV report.
    Bench(BenchArgs),
    /// Validate a schedule against an instance.
    Verify(VerifyArgs),
    /// Lower bounds and, within caps, the exact optimum.
    Oracle(OracleArgs),
    /// Generate instances.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Certify constructed schedules.
    #[command(subcommand)]
    Certify(CertifyCmd),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Rounding {
    Hlpb,
    Half,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON path.
    #[arg(long)]
    instance: PathBuf,
    /// Rounding strategy.
    #[arg(long, value_enum, default_value = "hlpb")]
    rounding: Rounding,
    /// Rounding parameter: "auto" or a real >= 2.
    #[arg(long, default_value = "auto")]
    b: String,
    /// Output path for the schedule JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the LP in text form for external cross-checking.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
    /// Write a machine,task,start,end CSV of the schedule.
    #[arg(long)]
    gantt: Option<PathBuf>,
    /// Refuse the LP above this task count.
    #[arg(long, default_value_t = DEFAULT_LP_CAP)]
    lp_cap: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance JSON files (*.json).
    #[arg(long, conflicts_with = "generate")]
    dir: Option<PathBuf>,
    /// Generate this many random layered instances instead of reading --dir.
    #[arg(long)]
    generate: Option<u32>,
    #[arg(long, default_value_t = 40)]
    tasks: u32,
    #[arg(long, default_value_t = 4)]
    layers: u32,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long, default_value_t = 4)]
    m: u32,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Output CSV path.
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record real wall-clock times. Off by default so that repeated runs
    /// produce byte-identical CSV.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 10)]
    max_tasks: usize,
    #[arg(long, default_value_t = 4)]
    max_machines: u32,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Random layered DAG benchmark instance.
    Random(GenRandomArgs),
    /// Hardness-reduction instance from a planted q-partite graph.
    Qpartite(GenQpartiteArgs),
}

#[derive(Args)]
struct GenRandomArgs {
    #[arg(long)]
    tasks: u32,
    #[arg(long)]
    layers: u32,
    #[arg(long)]
    edge_prob: f64,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CPU time range as lo,hi.
    #[arg(long, default_value = "1,10", value_parser = parse_range)]
    cpu_range: (f64, f64),
    /// GPU time range as lo,hi.
    #[arg(long, default_value = "1,10", value_parser = parse_range)]
    gpu_range: (f64, f64),
    /// Instance JSON output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenQpartiteArgs {
    #[arg(long)]
    q: u32,
    #[arg(long = "Q")]
    big_q: u32,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Build the incompatibility variant instead of the base reduction.
    #[arg(long)]
    corollary: bool,
    /// CPU count for the incompatibility variant.
    #[arg(long, requires = "corollary")]
    m_target: Option<u64>,
    #[arg(long, default_value_t = 100_000_000)]
    max_tasks: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_edges: u64,
    /// Instance JSON output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Graph JSON output path.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// Rebuild and validate the pipelined YES-case schedule.
    YesSchedule(CertifyYesArgs),
}

#[derive(Args)]
struct CertifyYesArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    /// Schedule JSON output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Solver(_) => 3,
        Error::OracleCaps(_) | Error::SizeCap { .. } => 4,
        _ => 2,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    Instance::from_json(&std::fs::read(path)?)
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, contents)?,
        None => println!("{contents}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => return cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Generate(GenerateCmd::Random(args)) => cmd_generate_random(args),
        Command::Generate(GenerateCmd::Qpartite(args)) => cmd_generate_qpartite(args),
        Command::Certify(CertifyCmd::YesSchedule(args)) => cmd_certify_yes(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => fail(err),
    }
}

/// Runs the chosen rounding strategy, returning the schedule and diagnostics.
fn solve_with(
    instance: &Instance,
    rounding: Rounding,
    b_choice: Option<f64>,
) -> Result<(Schedule, Diagnostics), Error> {
    match rounding {
        Rounding::Hlpb => hlp_b(instance, b_choice),
        Rounding::Half => {
            let fractional = solve_relaxation(instance)?;
            let allocation = round_half(&fractional);
            let schedule = list_schedule(instance, &allocation, &instance.topological_order())?;
            let (w_cpu, w_gpu, critical_path) = load_and_cp(instance, &allocation);
            let lp_bound = fractional.objective;
            let makespan = schedule.makespan();
            let b = match b_choice {
                Some(b) => RoundingParams::finite(b)?,
                None => optimal_b(instance.cpu_count(), instance.gpu_count()),
            };
            let diagnostics = Diagnostics {
                lp_bound,
                b,
                w_cpu,
                w_gpu,
                critical_path,
                makespan,
                ratio: if lp_bound > 0.0 { makespan / lp_bound } else { 1.0 },
            };
            Ok((schedule, diagnostics))
        }
    }
}

fn parse_b(raw: &str) -> Result<Option<f64>, Error> {
    if raw == "auto" {
        return Ok(None);
    }
    let b: f64 = raw
        .parse()
        .map_err(|_| Error::InvalidParams(format!("--b expects 'auto' or a real, got {raw:?}")))?;
    // Validate eagerly so the error surfaces before any LP work.
    RoundingParams::finite(b)?;
    Ok(Some(b))
}

fn cmd_solve(args: SolveArgs) -> Result<(), Error> {
    let b_choice = parse_b(&args.b)?;
    let instance = read_instance(&args.instance)?;
    if instance.task_count() > args.lp_cap {
        return Err(Error::InvalidParams(format!(
            "instance has {} tasks, above the LP cap {}; raise --lp-cap to force",
            instance.task_count(),
            args.lp_cap
        )));
    }
    if let Some(path) = &args.dump_lp {
        let lp = build_allocation_lp(&instance)?;
        std::fs::write(path, lp.to_lp_text(&allocation_lp_names(instance.task_count())))?;
    }
    let (schedule, diagnostics) = solve_with(&instance, args.rounding, b_choice)?;
    if let Some(path) = &args.gantt {
        std::fs::write(path, gantt_csv(&instance, &schedule))?;
    }
    if let Some(path) = &args.out {
        std::fs::write(path, schedule.to_json())?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&diagnostics).expect("diagnostics serialize")
    );
    Ok(())
}

const BENCH_HEADER: &str = "instance_id,status,n,m,k,b,lp_bound,makespan_hlpb,makespan_half,\
                            ratio_hlpb,ratio_half,theoretical_ratio,wall_ms";

fn bench_row(id: &str, instance: &Instance, timing: bool) -> String {
    let started = Instant::now();
    let hlpb = solve_with(instance, Rounding::Hlpb, None);
    let half = solve_with(instance, Rounding::Half, None);
    let wall_ms = if timing { started.elapsed().as_millis() } else { 0 };
    match (hlpb, half) {
        (Ok((_, d)), Ok((_, dh))) => format!(
            "{id},ok,{n},{m},{k},{b},{lp},{mh},{mhalf},{rh},{rhalf},{tr},{wall_ms}",
            n = instance.task_count(),
            m = instance.cpu_count(),
            k = instance.gpu_count(),
            b = d.b,
            lp = d.lp_bound,
            mh = d.makespan,
            mhalf = dh.makespan,
            rh = d.ratio,
            rhalf = dh.ratio,
            tr = theoretical_ratio(instance.cpu_count(), instance.gpu_count()),
        ),
        (hlpb, half) => {
            let err = hlpb.err().or(half.err()).expect("one side failed");
            let reason = err.to_string().replace([',', '\n'], ";");
            format!(
                "{id},error: {reason},{n},{m},{k},,,,,,,,{wall_ms}",
                n = instance.task_count(),
                m = instance.cpu_count(),
                k = instance.gpu_count(),
            )
        }
    }
}

fn worker_pool() -> Result<rayon::ThreadPool, Error> {
    let threads = std::env::var("HYBRID_SCHED_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    // Collect (id, instance) pairs first; rows are emitted in id order
    // regardless of which worker finishes when.
    let mut corpus: Vec<(String, Instance)> = Vec::new();
    if let Some(dir) = &args.dir {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            corpus.push((id, read_instance(&path)?));
        }
    } else if let Some(count) = args.generate {
        for i in 0..count {
            let cfg = RandomDagConfig {
                tasks: args.tasks,
                layers: args.layers,
                edge_prob: args.edge_prob,
                cpu_range: (1.0, 10.0),
                gpu_range: (1.0, 10.0),
                m: args.m,
                k: args.k,
                seed: args.seed.wrapping_add(i as u64),
            };
            corpus.push((format!("gen-{i:04}"), random_layered_dag(&cfg)?));
        }
    } else {
        return Err(Error::InvalidParams(
            "bench needs either --dir or --generate".into(),
        ));
    }

    let timing = args.timing;
    let rows: Vec<String> = worker_pool()?.install(|| {
        use rayon::prelude::*;
        corpus
            .par_iter()
            .map(|(id, instance)| bench_row(id, instance, timing))
            .collect()
    });

    let mut out = std::fs::File::create(&args.csv)?;
    writeln!(out, "{BENCH_HEADER}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let run = || -> Result<bool, Error> {
        let instance = read_instance(&args.instance)?;
        let schedule = Schedule::from_json(&std::fs::read(&args.schedule)?)?;
        let report = validate_schedule(&instance, &schedule.allocation(), &schedule);
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialize")
        );
        Ok(report.ok)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => fail(err),
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<(), Error> {
    let instance = read_instance(&args.instance)?;
    let caps = OracleCaps {
        max_tasks: args.max_tasks,
        max_machines: args.max_machines,
    };
    let report = bounds_report(&instance, Some(caps))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serialize")
    );
    Ok(())
}

fn cmd_generate_random(args: GenRandomArgs) -> Result<(), Error> {
    let cfg = RandomDagConfig {
        tasks: args.tasks,
        layers: args.layers,
        edge_prob: args.edge_prob,
        cpu_range: args.cpu_range,
        gpu_range: args.gpu_range,
        m: args.m,
        k: args.k,
        seed: args.seed,
    };
    let instance = random_layered_dag(&cfg)?;
    write_output(args.out.as_deref(), &instance.to_json())
}

fn cmd_generate_qpartite(args: GenQpartiteArgs) -> Result<(), Error> {
    let params = ReductionParams::new(args.q, args.big_q, args.n, args.epsilon, args.delta)?;
    let graph = qpartite_yes_graph(&params, args.edge_prob, args.seed)?;
    let caps = SizeCaps {
        max_tasks: args.max_tasks,
        max_edges: args.max_edges,
    };
    let (instance, _) = if args.corollary {
        let m_target = args
            .m_target
            .ok_or_else(|| Error::InvalidParams("--corollary requires --m-target".into()))?;
        corollary_instance(&graph, &params, m_target, &caps)?
    } else {
        reduction_instance(&graph, &params, &caps)?
    };
    if let Some(path) = &args.graph_out {
        std::fs::write(path, graph.to_json())?;
    }
    let report = gap_report(&params);
    eprintln!(
        "gap: yes_upper={} no_lower={}",
        report.yes_upper, report.no_lower
    );
    write_output(args.out.as_deref(), &instance.to_json())
}

fn cmd_certify_yes(args: CertifyYesArgs) -> Result<(), Error> {
    let instance = read_instance(&args.instance)?;
    let graph = QPartiteGraph::from_json(&std::fs::read(&args.graph)?)?;
    let labels = graph
        .planted()
        .ok_or_else(|| Error::InvalidParams("graph has no planted labels".into()))?;
    let classes = labels.iter().copied().max().map_or(0, |c| c as u32 + 1);
    // Epsilon and delta do not affect the certificate; use their loosest
    // admissible values.
    let params = ReductionParams::new(
        graph.layer_count(),
        classes,
        graph.layer_size(),
        1.0 / (classes as f64 * classes as f64),
        1.0 / (2.0 * classes as f64),
    )?;
    let (allocation, schedule) = yes_case_schedule(&instance, &graph, &params)?;
    let report = validate_schedule(&instance, &allocation, &schedule);
    if !report.ok {
        return Err(Error::Construction(format!(
            "constructed schedule failed validation: {} violations",
            report.violations.len()
        )));
    }
    if let Some(path) = &args.out {
        std::fs::write(path, schedule.to_json())?;
    }
    println!(
        "{{\"ok\":true,\"makespan\":{},\"tasks\":{}}}",
        schedule.makespan(),
        schedule.len()
    );
    Ok(())
}
