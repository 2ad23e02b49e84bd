//! `inflate`: solve, benchmark, generate and gap-scan from the command line.
//!
//! Exit codes: 0 converged, 1 usage or input error, 2 not converged.

mod methods;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use inflation::{
    estimate_gap_scan, generate, gershgorin_bounds, read_matrix_market, write_matrix_market,
    write_trace, GapScanConfig, GeneratorSpec, Solution, SparseSymMatrix,
};
use methods::{Method, SolverOptions};

const BENCH_THRESHOLDS: [f64; 3] = [1e-4, 1e-8, 1e-12];

#[derive(Debug, Parser)]
#[command(name = "inflate", version, about = "Extremal eigenpairs by inflationary dynamics")]
struct Cli {
    /// Seed for random start vectors
    #[arg(long, global = true, env = "INFLATE_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the lowest eigenpair(s) of one matrix
    Solve(SolveArgs),
    /// Run several methods from the same start and compare matvec counts
    Bench(BenchArgs),
    /// Write a generated test matrix in Matrix Market form
    Gen(GenArgs),
    /// Probe candidate gap estimates and report the steepest mu decay
    ScanGap(ScanArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Matrix Market file
    matrix: Option<PathBuf>,

    /// Generator spec, e.g. laplacian1d:100 or random_sparse:200:0.05:7
    #[arg(long = "gen", value_name = "SPEC")]
    generator: Option<GeneratorSpec>,
}

impl Source {
    fn load(&self) -> Result<SparseSymMatrix, String> {
        if let Some(spec) = &self.generator {
            return generate(spec).map_err(|e| format!("{spec}: {e}"));
        }
        let path = self.matrix.as_ref().expect("clap enforces one source");
        let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        read_matrix_market(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,

    #[arg(long, short, value_enum, default_value_t = Method::Inflation)]
    method: Method,

    #[command(flatten)]
    options: SolverOptions,

    /// Write the convergence trace as CSV
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Write eigenvectors as CSV, one column per pair
    #[arg(long)]
    vectors: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    source: Source,

    /// Methods to compare (at least two)
    #[arg(long, short, value_enum, value_delimiter = ',', required = true)]
    methods: Vec<Method>,

    #[command(flatten)]
    options: SolverOptions,

    /// Directory for `<method>.csv` traces and `summary.csv`
    #[arg(long, short, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    spec: GeneratorSpec,

    /// Output file [default: stdout]
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    source: Source,

    /// Gap estimates to try, comma separated
    #[arg(long, short, value_delimiter = ',', required = true, num_args = 1..)]
    candidates: Vec<f64>,

    #[arg(long, default_value_t = 40)]
    probe_steps: usize,

    /// Steps before probing [default: probe steps]
    #[arg(long)]
    burn_in: Option<usize>,

    /// Gap used during burn-in [default: median candidate]
    #[arg(long)]
    initial_guess: Option<f64>,

    #[arg(long)]
    dt: Option<f64>,

    #[arg(long, default_value_t = 0.9)]
    safety: f64,
}

/// Failure with an exit code.
struct Exit {
    code: u8,
    msg: String,
}

impl Exit {
    fn usage(msg: impl Into<String>) -> Self {
        Exit {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<io::Error> for Exit {
    fn from(e: io::Error) -> Self {
        Exit::usage(e.to_string())
    }
}

impl From<inflation::Error> for Exit {
    fn from(e: inflation::Error) -> Self {
        Exit::usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Solve(args) => solve(args, cli.seed),
        Command::Bench(args) => bench(args, cli.seed),
        Command::Gen(args) => gen(args),
        Command::ScanGap(args) => scan_gap(args, cli.seed),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Exit> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

fn solve(args: &SolveArgs, seed: u64) -> Result<u8, Exit> {
    let a = args.source.load().map_err(Exit::usage)?;
    let start = Instant::now();
    let sol = args.options.run(args.method, &a, None, seed)?;
    let elapsed = start.elapsed();

    if let Some(path) = &args.trace {
        let mut out = create(path)?;
        write_trace(&sol.trace, &mut out)?;
        out.flush()?;
    }
    if let Some(path) = &args.vectors {
        let mut out = create(path)?;
        write_vectors(&sol, &mut out)?;
        out.flush()?;
    }

    println!("method     {}", args.method.name());
    println!("dimension  {} (nnz {})", a.dim(), a.nnz());
    for (k, (value, mu)) in sol.pairs.values.iter().zip(&sol.pairs.residuals).enumerate() {
        println!("pair {k:<5} value {value:.15e}  mu {mu:.3e}");
    }
    println!("matvecs    {}", sol.matvecs);
    println!("steps      {}", sol.steps);
    println!("time       {:.3}s", elapsed.as_secs_f64());
    if sol.converged() {
        println!("status     converged");
        Ok(0)
    } else {
        println!("status     NOT converged");
        Ok(2)
    }
}

fn write_vectors(sol: &Solution, mut out: impl Write) -> io::Result<()> {
    let k = sol.pairs.len();
    let header: Vec<String> = (0..k).map(|j| format!("v{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    let n = sol.pairs.vectors.first().map_or(0, |v| v.len());
    for i in 0..n {
        let row: Vec<String> = sol
            .pairs
            .vectors
            .iter()
            .map(|v| format!("{:.16e}", v[i]))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn bench(args: &BenchArgs, seed: u64) -> Result<u8, Exit> {
    let mut methods = args.methods.clone();
    methods.dedup();
    if methods.len() < 2 {
        return Err(Exit::usage("bench needs at least two distinct methods"));
    }
    let a = args.source.load().map_err(Exit::usage)?;
    fs::create_dir_all(&args.out_dir)?;
    let x0 = inflation::rng::random_unit_vector(a.dim(), &mut inflation::rng::seeded(seed));

    let results: Vec<(Method, Result<Solution, String>)> = methods
        .par_iter()
        .map(|&m| {
            let r = args.options.run(m, &a, Some(&x0), seed).map_err(|e| e.to_string());
            (m, r)
        })
        .collect();

    let mut summary = create(&args.out_dir.join("summary.csv"))?;
    let columns = ["method", "converged", "value", "matvecs", "m_1e-4", "m_1e-8", "m_1e-12"];
    writeln!(summary, "{}", columns.join(","))?;
    println!(
        "{:<12} {:>9} {:>22} {:>9} {:>9} {:>9} {:>9}",
        "method", "converged", "value", "matvecs", "m@1e-4", "m@1e-8", "m@1e-12"
    );
    let mut all_converged = true;
    for (m, r) in &results {
        match r {
            Ok(sol) => {
                let mut out = create(&args.out_dir.join(format!("{}.csv", m.name())))?;
                write_trace(&sol.trace, &mut out)?;
                out.flush()?;
                let at: Vec<String> = BENCH_THRESHOLDS
                    .iter()
                    .map(|&t| sol.trace.matvecs_to(t).map_or("-".into(), |v| v.to_string()))
                    .collect();
                all_converged &= sol.converged();
                writeln!(
                    summary,
                    "{},{},{:.16e},{},{}",
                    m.name(),
                    sol.converged(),
                    sol.value(),
                    sol.matvecs,
                    at.join(",")
                )?;
                println!(
                    "{:<12} {:>9} {:>22.15e} {:>9} {:>9} {:>9} {:>9}",
                    m.name(),
                    sol.converged(),
                    sol.value(),
                    sol.matvecs,
                    at[0],
                    at[1],
                    at[2]
                );
            }
            Err(e) => {
                all_converged = false;
                writeln!(summary, "{},error,,,,,", m.name())?;
                println!("{:<12} failed: {e}", m.name());
            }
        }
    }
    summary.flush()?;
    Ok(if all_converged { 0 } else { 2 })
}

fn gen(args: &GenArgs) -> Result<u8, Exit> {
    let a = generate(&args.spec)?;
    let b = gershgorin_bounds(&a);
    match &args.output {
        Some(path) => {
            let mut out = create(path)?;
            write_matrix_market(&a, &mut out)?;
            out.flush()?;
            println!("n {}  nnz {}  bounds [{}, {}]", a.dim(), a.nnz(), b.lo, b.hi);
        }
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            write_matrix_market(&a, &mut out)?;
            out.flush()?;
            eprintln!("n {}  nnz {}  bounds [{}, {}]", a.dim(), a.nnz(), b.lo, b.hi);
        }
    }
    Ok(0)
}

fn scan_gap(args: &ScanArgs, seed: u64) -> Result<u8, Exit> {
    let a = args.source.load().map_err(Exit::usage)?;
    let cfg = GapScanConfig {
        probe_steps: args.probe_steps,
        burn_in_steps: args.burn_in,
        initial_guess: args.initial_guess,
        dt: args.dt,
        safety: args.safety,
        seed,
    };
    let scan = match estimate_gap_scan(&a, None, &args.candidates, &cfg) {
        Ok(s) => s,
        Err(inflation::Error::ScanFailed) => {
            return Err(Exit {
                code: 2,
                msg: "every candidate diverged; rerun with a smaller --dt or --safety".into(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    println!("{:>14} {:>16}", "candidate", "slope");
    for (c, s) in &scan.slopes {
        if s.is_nan() {
            println!("{c:>14} {:>16}", "diverged");
        } else {
            println!("{c:>14} {s:>16.6}");
        }
    }
    println!("best {}  (matvecs {})", scan.best, scan.matvecs);
    Ok(0)
}
