//! `gjk-accel`: distance queries, benchmark suites and convergence traces.

mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gjk_accel::bench::{self, BenchOptions, SolverSpec};
use gjk_accel::benchgen::{self, ShapeFamily, SuiteConfig, SuiteManifest, DESK_DISTANCE_GRID};
use gjk_accel::solvers::DEFAULT_EPSILON;
use gjk_accel::{solve, Algorithm, CollisionPair, Mode, Pose, QueryResult, SolverConfig, Status, Vec3};

const EXIT_SEPARATED: u8 = 0;
const EXIT_ERROR: u8 = 2;
const EXIT_INTERSECTING: u8 = 10;

#[derive(Parser, Debug)]
#[command(name = "gjk-accel", version, about = "Convex collision queries with GJK and Nesterov-accelerated GJK")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance or collision query between two shapes.
    Query(QueryArgs),
    /// Generate a seeded suite and write per-problem iteration and timing records.
    Bench(BenchArgs),
    /// Write the per-iteration trace of one solve as CSV.
    Trace(TraceArgs),
    /// Summarize a bench CSV per distance bucket.
    Aggregate(AggregateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Ellipsoids,
    Cubes,
    Meshes,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Iteration budget (default 1000, 50000 for fw).
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value = "distance")]
    mode: Mode,
    /// Normalize momentum directions in Nesterov-accelerated GJK.
    #[arg(long, value_enum, default_value = "on")]
    normalize: Switch,
}

impl SolverArgs {
    fn config(&self, algorithm: Algorithm) -> SolverConfig {
        let mut cfg = SolverConfig::for_algorithm(algorithm)
            .with_mode(self.mode)
            .with_normalization(self.normalize == Switch::On);
        cfg.epsilon = self.epsilon;
        if let Some(m) = self.max_iters {
            cfg.max_iterations = m;
        }
        cfg
    }
}

#[derive(Args, Debug)]
struct PairArgs {
    /// sphere:R | box:HX,HY,HZ | ellipsoid:A,B,C | mesh:PATH
    #[arg(long, value_parser = args::parse_shape)]
    shape1: Option<gjk_accel::ConvexShape>,
    #[arg(long, value_parser = args::parse_shape)]
    shape2: Option<gjk_accel::ConvexShape>,
    /// Translation of shape 1 (m).
    #[arg(long, value_parser = args::parse_vec3, allow_hyphen_values = true)]
    pos1: Option<Vec3>,
    #[arg(long, value_parser = args::parse_vec3, allow_hyphen_values = true)]
    pos2: Option<Vec3>,
    /// Rotation vector of shape 1 (axis times angle in radians).
    #[arg(long, value_parser = args::parse_vec3, allow_hyphen_values = true)]
    rot1: Option<Vec3>,
    #[arg(long, value_parser = args::parse_vec3, allow_hyphen_values = true)]
    rot2: Option<Vec3>,
}

impl PairArgs {
    fn explicit_pair(&self) -> Result<Option<CollisionPair>, String> {
        match (&self.shape1, &self.shape2) {
            (Some(s1), Some(s2)) => {
                let pose = |rot: Option<Vec3>, pos: Option<Vec3>| {
                    Pose::from_axis_angle(rot.unwrap_or_else(Vec3::zeros), pos.unwrap_or_else(Vec3::zeros))
                };
                Ok(Some(CollisionPair::from_shapes(
                    s1.clone(),
                    pose(self.rot1, self.pos1),
                    s2.clone(),
                    pose(self.rot2, self.pos2),
                )))
            }
            (None, None) => Ok(None),
            _ => Err("--shape1 and --shape2 must be given together".into()),
        }
    }
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value = "gjk")]
    algo: Algorithm,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "ellipsoids")]
    family: Family,
    /// Directory of OBJ files for `--family meshes`.
    #[arg(long)]
    meshes_dir: Option<PathBuf>,
}

impl SuiteArgs {
    fn shape_family(&self) -> Result<ShapeFamily, String> {
        Ok(match self.family {
            Family::Ellipsoids => ShapeFamily::Ellipsoids,
            Family::Cubes => ShapeFamily::Cubes,
            Family::Meshes => {
                let dir = self.meshes_dir.clone().unwrap_or_else(default_meshes_dir);
                let paths = benchgen::list_meshes(&dir).map_err(|e| e.to_string())?;
                if paths.is_empty() {
                    return Err(format!("no .obj files in {}", dir.display()));
                }
                ShapeFamily::Meshes(paths)
            }
        })
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    suite: SuiteArgs,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    /// Relative poses sampled per pair.
    #[arg(long, default_value_t = 100)]
    poses: usize,
    /// Target signed distances (m), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    dists: Option<Vec<f64>>,
    /// Solvers to run; repeatable.
    #[arg(long = "algo", default_values = ["gjk", "nesterov"])]
    algos: Vec<Algorithm>,
    /// Timed repetitions per problem and solver.
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: PathBuf,
    /// Also write the suite manifest (JSON).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    suite: SuiteArgs,
    /// Target distance of the random problem (m).
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    dist: f64,
    #[arg(long, default_value = "nesterov")]
    algo: Algorithm,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AggregateArgs {
    /// Bench CSV to summarize.
    input: PathBuf,
    /// Also write the summary as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_meshes_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/assets/meshes")
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn fmt_vec(v: &Vec3) -> String {
    format!("{:.6} {:.6} {:.6}", v.x, v.y, v.z)
}

fn print_result(r: &QueryResult) {
    match r.status {
        Status::Separated => println!("separated {:.6}", r.distance),
        other => println!("{other}"),
    }
    println!("witness1 {}", fmt_vec(&r.witness1));
    println!("witness2 {}", fmt_vec(&r.witness2));
    println!("iterations {}", r.iterations);
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Separated => EXIT_SEPARATED,
        Status::Intersecting => EXIT_INTERSECTING,
        Status::MaxIterations | Status::NumericalFailure => EXIT_ERROR,
    }
}

fn cmd_query(args: &QueryArgs) -> Result<u8, String> {
    let pair = args
        .pair
        .explicit_pair()?
        .ok_or("query needs --shape1 and --shape2")?;
    let r = solve(&pair, &args.solver.config(args.algo), args.algo).map_err(|e| e.to_string())?;
    print_result(&r);
    if matches!(r.status, Status::MaxIterations | Status::NumericalFailure) {
        eprintln!("error: solver stopped with status {}", r.status);
    }
    Ok(exit_code(r.status))
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, String> {
    let grid = args.dists.clone().unwrap_or_else(|| DESK_DISTANCE_GRID.to_vec());
    let config = SuiteConfig::new(args.suite.seed, args.pairs, args.poses, grid, args.suite.shape_family()?);
    // Fail on an unwritable path before spending time on generation.
    let out = create(&args.out)?;
    let problems = benchgen::generate_suite(&config).map_err(|e| e.to_string())?;
    if let Some(path) = &args.manifest {
        SuiteManifest::new(&config, &problems)
            .write(path)
            .map_err(|e| e.to_string())?;
    }
    let solvers: Vec<SolverSpec> = args
        .algos
        .iter()
        .map(|&algorithm| SolverSpec {
            algorithm,
            normalize: args.solver.normalize == Switch::On,
        })
        .collect();
    let options = BenchOptions {
        mode: args.solver.mode,
        epsilon: args.solver.epsilon,
        max_iterations: args.solver.max_iters,
        repetitions: args.reps,
    };
    let records = bench::run_bench(&problems, &solvers, &options).map_err(|e| e.to_string())?;
    bench::write_records(&records, out).map_err(|e| e.to_string())?;
    eprintln!(
        "{} problems x {} solvers -> {}",
        problems.len(),
        solvers.len(),
        args.out.display()
    );
    Ok(EXIT_SEPARATED)
}

fn cmd_trace(args: &TraceArgs) -> Result<u8, String> {
    let pair = match args.pair.explicit_pair()? {
        Some(pair) => pair,
        None => {
            let config = SuiteConfig::new(args.suite.seed, 1, 1, vec![args.dist], args.suite.shape_family()?);
            let mut problems = benchgen::generate_suite(&config).map_err(|e| e.to_string())?;
            problems.remove(0).pair
        }
    };
    let cfg = args.solver.config(args.algo).with_trace(true);
    let r = solve(&pair, &cfg, args.algo).map_err(|e| e.to_string())?;
    let written = match &args.out {
        Some(path) => r.write_trace_csv(create(path)?),
        None => r.write_trace_csv(io::stdout().lock()),
    };
    written.map_err(|e| e.to_string())?;
    eprintln!("{} after {} iterations", r.status, r.iterations);
    Ok(EXIT_SEPARATED)
}

fn cmd_aggregate(args: &AggregateArgs) -> Result<u8, String> {
    let file = File::open(&args.input).map_err(|e| format!("cannot read {}: {e}", args.input.display()))?;
    let records = bench::read_records(file).map_err(|e| e.to_string())?;
    let rows = bench::aggregate(&records);
    print!("{}", bench::format_summary(&rows));
    io::stdout().flush().map_err(|e| e.to_string())?;
    if let Some(path) = &args.out {
        bench::write_summary(&rows, create(path)?).map_err(|e| e.to_string())?;
    }
    Ok(EXIT_SEPARATED)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Aggregate(a) => cmd_aggregate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use gjk_accel::solvers::DEFAULT_MAX_ITERATIONS;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn default_budget_follows_algorithm() {
        let args = SolverArgs {
            epsilon: DEFAULT_EPSILON,
            max_iters: None,
            mode: Mode::Distance,
            normalize: Switch::On,
        };
        assert_eq!(args.config(Algorithm::Gjk).max_iterations, DEFAULT_MAX_ITERATIONS);
        assert!(args.config(Algorithm::FrankWolfe).max_iterations > DEFAULT_MAX_ITERATIONS);
    }
}
