use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use w2line::curvature::branching_witness;
use w2line::isometry1d::{exotic_flow, exotic_flow_quantized, IsometryElement, Sign};
use w2line::measures::QuantilePieces;
use w2line::rank_embed::{embed_sorted_tuple, embed_sorted_tuple_unscaled};
use w2line::rn::{solvers, PlanReport};
use w2line::suite::{random_defects, run_suite};
use w2line::{crosscheck, extension_interval, geodesic, wasserstein2, Error, Measure1D, MeasureRn};

const EXIT_BAD_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_SIZE_CAP: u8 = 4;

#[derive(Parser)]
#[command(
    name = "w2line",
    version,
    about = "Exact computations in the Wasserstein space of the line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the distance between two measures.
    Dist { a: PathBuf, b: PathBuf },
    /// Print the geodesic between two measures as JSON, one point of it, or CSV frames.
    Geodesic {
        a: PathBuf,
        b: PathBuf,
        /// Evaluate at this time and print the measure.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "frames")]
        t: Option<f64>,
        /// Emit `t,mass,position` rows for N equally spaced times in [0, 1].
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Print the maximal extension interval of the geodesic.
    Extend { a: PathBuf, b: PathBuf },
    /// Apply the exotic flow to an atomic measure.
    Flow(FlowArgs),
    /// Build an isometry in normal form, or apply it to a measure.
    Isom(IsomArgs),
    /// Solve a discrete transport problem in ℝⁿ.
    Ot {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "simplex")]
        solver: String,
    },
    /// Emit comparison defects of random triangles as CSV.
    Curvature {
        #[arg(long, required_unless_present = "branching")]
        triples: Option<usize>,
        #[arg(long, required_unless_present = "branching")]
        seed: Option<u64>,
        /// Print the branching witness in the plane instead.
        #[arg(long)]
        branching: bool,
    },
    /// Embed a sorted tuple as an equal-weight measure.
    Embed {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        tuple: Vec<f64>,
        /// Omit the √k scale.
        #[arg(long)]
        unscaled: bool,
    },
    /// Run the seeded property suite and the cross-check report.
    Check {
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
struct FlowArgs {
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "snapshots"
    )]
    t: Option<f64>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit `t,mass,position` rows for each listed time.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "t"
    )]
    snapshots: Option<Vec<f64>>,
    /// Replace the input by N equal-mass atoms first.
    #[arg(long)]
    quantize: Option<usize>,
}

#[derive(Args)]
struct IsomArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    eps: i32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    v: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    eta: i32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    t: f64,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    SizeCap(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeCap { .. } => Failure::SizeCap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_measure(path: &Path) -> Result<Measure1D, Failure> {
    Measure1D::from_json(&read_text(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_measure_rn(path: &Path) -> Result<MeasureRn, Failure> {
    MeasureRn::from_json(&read_text(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Writes to `out` when given and returns nothing to print; returns `body` otherwise.
fn emit(body: String, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => {
            fs::write(p, body + "\n")?;
            Ok(String::new())
        }
        None => Ok(body),
    }
}

fn quantile_rows(csv: &mut String, t: f64, q: &QuantilePieces) {
    let b = q.breakpoints();
    for (k, s) in q.segments().iter().enumerate() {
        let _ = writeln!(csv, "{t},{},{}", b[k], s.start);
        let _ = writeln!(csv, "{t},{},{}", b[k + 1], s.end);
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Dist { a, b } => {
            Ok(wasserstein2(&read_measure(&a)?, &read_measure(&b)?).to_string())
        }
        Command::Geodesic { a, b, t, frames } => {
            let g = geodesic(&read_measure(&a)?, &read_measure(&b)?);
            if let Some(t) = t {
                return Ok(g.eval(t)?.to_json());
            }
            match frames {
                None => Ok(serde_json::to_string(&g).expect("geodesic serializes")),
                Some(0) => Err(Failure::Input("--frames must be at least 1".into())),
                Some(n) => {
                    let mut csv = String::from("t,mass,position\n");
                    for i in 0..n {
                        let t = if n == 1 {
                            0.0
                        } else {
                            i as f64 / (n - 1) as f64
                        };
                        quantile_rows(&mut csv, t, &g.quantile_at(t));
                    }
                    Ok(csv.trim_end().to_string())
                }
            }
        }
        Command::Extend { a, b } => {
            Ok(extension_interval(&read_measure(&a)?, &read_measure(&b)?).to_string())
        }
        Command::Flow(args) => flow(args),
        Command::Isom(args) => {
            let g = IsometryElement::new(
                Sign::from_i32(args.eps)?,
                args.v,
                Sign::from_i32(args.eta)?,
                args.t,
            );
            match &args.input {
                None => Ok(serde_json::to_string(&g).expect("element serializes")),
                Some(p) => emit(g.apply(&read_measure(p)?)?.to_json(), args.out.as_deref()),
            }
        }
        Command::Ot { a, b, solver } => {
            let registry = solvers();
            let s = registry
                .get(&solver)
                .ok_or_else(|| Failure::from(Error::UnknownSolver(solver.clone())))?;
            let plan = s.solve(&read_measure_rn(&a)?, &read_measure_rn(&b)?)?;
            Ok(serde_json::to_string(&PlanReport::from(&plan)).expect("plan serializes"))
        }
        Command::Curvature {
            triples,
            seed,
            branching,
        } => {
            if branching {
                return Ok(
                    serde_json::to_string(&branching_witness()?).expect("witness serializes")
                );
            }
            let (k, seed) = (
                triples.expect("required by clap"),
                seed.expect("required by clap"),
            );
            let mut csv = String::from("index,t,defect\n");
            for r in random_defects(k, seed)? {
                let _ = writeln!(csv, "{},{},{}", r.index, r.t, r.defect);
            }
            Ok(csv.trim_end().to_string())
        }
        Command::Embed { tuple, unscaled } => {
            let m = if unscaled {
                embed_sorted_tuple_unscaled(&tuple)?
            } else {
                embed_sorted_tuple(&tuple)?
            };
            Ok(m.to_json())
        }
        Command::Check { seed } => {
            let mut text = String::new();
            let mut failed = 0;
            for o in run_suite(seed)? {
                let verdict = if o.passed() { "PASS" } else { "FAIL" };
                failed += usize::from(!o.passed());
                let _ = writeln!(
                    text,
                    "{verdict} {} (cases {}, worst {:e}, tolerance {:e})",
                    o.name, o.cases, o.worst, o.tolerance
                );
            }
            let _ = write!(text, "{}", crosscheck::report()?);
            if failed > 0 {
                return Err(Failure::Violation(format!(
                    "{text}{failed} properties violated"
                )));
            }
            Ok(text.trim_end().to_string())
        }
    }
}

fn flow(args: FlowArgs) -> Outcome {
    let mut mu = read_measure(&args.input)?;
    if let Some(n) = args.quantize {
        let q = exotic_flow_quantized(&mu, 0.0, n)?;
        eprintln!("quantization error bound {}", q.error_bound);
        mu = q.measure;
    }
    if let Some(ts) = args.snapshots {
        let mut csv = String::from("t,mass,position\n");
        for t in ts {
            quantile_rows(&mut csv, t, &exotic_flow(&mu, t)?.quantile_pieces());
        }
        return emit(csv.trim_end().to_string(), args.out.as_deref());
    }
    let t = args.t.expect("required by clap");
    emit(exotic_flow(&mu, t)?.to_json(), args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(s) => {
            if !s.is_empty() {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
        Err(Failure::SizeCap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SIZE_CAP)
        }
        Err(Failure::Violation(report)) => {
            println!("{report}");
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}
