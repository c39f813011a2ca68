use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use riumapf::format::{parse_plan, write_galactic_instance, write_instance, write_plan};
use riumapf::ilp::{build_bounded_model, build_galactic_model, export_lp};
use riumapf::instance::{plan_metrics, sample_random_instance};
use riumapf::kernel::kernelize;
use riumapf::lacam::DEFAULT_LIVELOCK_DEPTH;
use riumapf::GridMap;
use riumapf_cli::bench::{write_records, write_summary};
use riumapf_cli::trace::render_frames;
use riumapf_cli::{load_graph, load_instance, run_algorithm, run_sweep, summarize, Algo, RunOptions, RunRecord, Status, SweepConfig};

#[derive(Parser)]
#[command(name = "riumapf", version, about = "Distance-r independent unlabeled MAPF toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random instance on a map.
    Gen(GenArgs),
    /// Write a random grid map (largest 4-connected component kept).
    GenMap(GenMapArgs),
    /// Solve one instance and write the plan.
    Solve(SolveArgs),
    /// Check a plan against its instance.
    Validate(ValidateArgs),
    /// Reduce an instance to its galactic kernel.
    Kernelize(KernelizeArgs),
    /// Export the bounded-makespan integer program in LP format.
    ExportLp(ExportLpArgs),
    /// Run a benchmark sweep and write per-run and summary CSVs.
    Bench(BenchArgs),
    /// Render a plan as one SVG frame per step.
    Trace(TraceArgs),
}

#[derive(Args)]
struct Problem {
    /// Grid map (.map) or edge list (p/e lines).
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    /// Replace the instance's radius.
    #[arg(long)]
    r: Option<u32>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenMapArgs {
    #[arg(long)]
    height: usize,
    #[arg(long)]
    width: usize,
    /// Fraction of cells turned into obstacles before pruning.
    #[arg(long, default_value_t = 0.0)]
    obstacles: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, default_value = "lacam")]
    algo: Algo,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    /// Recorded in the run record.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LIVELOCK_DEPTH)]
    livelock_depth: usize,
    /// Plan file; stdout gets the run record either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Args)]
struct KernelizeArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportLpArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long)]
    tau: usize,
    /// Kernelize first and export the galactic model.
    #[arg(long)]
    galactic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Maps to sweep; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', required = true)]
    map: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<u32>,
    /// Instances per (map, n, r) cell.
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, value_delimiter = ',', default_value = "lacam")]
    algo: Vec<Algo>,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = DEFAULT_LIVELOCK_DEPTH)]
    livelock_depth: usize,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Per-run CSV.
    #[arg(long)]
    out: PathBuf,
    /// Per-cell summary CSV; defaults to `<out stem>.summary.csv`.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long)]
    plan: PathBuf,
    /// Directory receiving frame_0000.svg, frame_0001.svg, ...
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::GenMap(a) => gen_map(a),
        Command::Solve(a) => solve(a),
        Command::Validate(a) => validate(a),
        Command::Kernelize(a) => kernel(a),
        Command::ExportLp(a) => export(a),
        Command::Bench(a) => bench(a),
        Command::Trace(a) => trace(a),
    };
    match result {
        Ok(code) => code,
        // output piped into something like `head`
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let loaded = load_graph(&a.map)?;
    let inst = sample_random_instance(loaded.graph.clone(), a.n, a.r, a.seed)?;
    emit(a.out.as_deref(), &write_instance(&inst, loaded.grid.is_some()))?;
    Ok(ExitCode::SUCCESS)
}

fn gen_map(a: GenMapArgs) -> Result<ExitCode> {
    if a.height == 0 || a.width == 0 {
        bail!("map dimensions must be positive");
    }
    if !(0.0..1.0).contains(&a.obstacles) {
        bail!("--obstacles must lie in [0, 1)");
    }
    let map = GridMap::random_obstacles(a.height, a.width, a.obstacles, a.seed);
    emit(a.out.as_deref(), &map.to_map_string())?;
    Ok(ExitCode::SUCCESS)
}

fn solve(a: SolveArgs) -> Result<ExitCode> {
    let loaded = load_graph(&a.problem.map)?;
    let inst = load_instance(&loaded, &a.problem.instance, a.problem.r)?;
    let options = RunOptions {
        timeout: Duration::from_millis(a.timeout_ms),
        livelock_depth: a.livelock_depth,
    };
    let outcome = run_algorithm(&inst, a.algo, &options);
    let record = RunRecord::new(&loaded.name, &inst, a.seed, a.algo, &outcome);
    print!("{}", record.csv_line());
    match (&outcome.status, &outcome.plan) {
        (Status::Solved, Some(plan)) => {
            if let Some(out) = &a.out {
                emit(Some(out), &write_plan(plan))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        (status, _) => {
            eprintln!("unsolved: {}", status.reason());
            Ok(ExitCode::from(2))
        }
    }
}

fn validate(a: ValidateArgs) -> Result<ExitCode> {
    let loaded = load_graph(&a.problem.map)?;
    let inst = load_instance(&loaded, &a.problem.instance, a.problem.r)?;
    let text = fs::read_to_string(&a.plan).with_context(|| format!("reading {}", a.plan.display()))?;
    let plan = parse_plan(&text)?;
    match plan_metrics(&inst, &plan) {
        Ok(m) => {
            println!(
                "valid makespan={} lower_bound={} suboptimality={:.4}",
                m.makespan, m.lower_bound, m.suboptimality
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(v) => {
            println!("invalid: {v}");
            Ok(ExitCode::from(2))
        }
    }
}

fn kernel(a: KernelizeArgs) -> Result<ExitCode> {
    let loaded = load_graph(&a.problem.map)?;
    let inst = load_instance(&loaded, &a.problem.instance, a.problem.r)?;
    let k = kernelize(&inst);
    eprintln!(
        "vertices {} -> {} ({} black holes)",
        inst.graph().vertex_count(),
        k.galactic.vertex_count(),
        k.galactic.black_holes().len()
    );
    emit(a.out.as_deref(), &write_galactic_instance(&k))?;
    Ok(ExitCode::SUCCESS)
}

fn export(a: ExportLpArgs) -> Result<ExitCode> {
    let loaded = load_graph(&a.problem.map)?;
    let inst = load_instance(&loaded, &a.problem.instance, a.problem.r)?;
    let model = if a.galactic {
        build_galactic_model(&kernelize(&inst), a.tau)?
    } else {
        build_bounded_model(&inst, a.tau)
    };
    let mut w = sink(a.out.as_deref())?;
    export_lp(&model, &mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let maps = a.map.iter().map(|p| load_graph(p)).collect::<Result<Vec<_>>>()?;
    let config = SweepConfig {
        maps,
        agents: a.n,
        radii: a.r,
        instances: a.instances,
        algos: a.algo,
        options: RunOptions {
            timeout: Duration::from_millis(a.timeout_ms),
            livelock_depth: a.livelock_depth,
        },
        jobs: a.jobs,
    };
    let records = run_sweep(&config)?;
    write_records(File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?, &records)?;
    let summary_path = a.summary.unwrap_or_else(|| {
        let stem = a.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        a.out.with_file_name(format!("{stem}.summary.csv"))
    });
    let rows = summarize(&records);
    write_summary(File::create(&summary_path)?, &rows)?;
    for row in &rows {
        eprintln!(
            "{} n={} r={} {}: {:.0}% solved, mean {} ms",
            row.map,
            row.n,
            row.r,
            row.algo,
            row.rate_percent,
            row.mean_time_ms.map_or("-".into(), |t| format!("{t:.1}"))
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn trace(a: TraceArgs) -> Result<ExitCode> {
    let loaded = load_graph(&a.problem.map)?;
    let Some(grid) = loaded.grid.as_ref() else {
        bail!("trace needs a grid map");
    };
    let inst = load_instance(&loaded, &a.problem.instance, a.problem.r)?;
    let text = fs::read_to_string(&a.plan).with_context(|| format!("reading {}", a.plan.display()))?;
    let plan = parse_plan(&text)?;
    if let Err(v) = riumapf::instance::validate_plan(&inst, &plan) {
        bail!("invalid plan: {v}");
    }
    fs::create_dir_all(&a.out)?;
    let frames = render_frames(grid, &loaded.graph, inst.radius(), &plan);
    for (t, frame) in frames.iter().enumerate() {
        fs::write(a.out.join(format!("frame_{t:04}.svg")), frame)?;
    }
    eprintln!("{} frames written to {}", frames.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}
