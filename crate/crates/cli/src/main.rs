use std::io::Read;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use locusforge::jobs::{BranchSet, Job, JobError, JobOutput, ProvePayload, TracePayload, DEFAULT_DEADLINE_MS};
use locusforge_core::cancel::Deadline;
use locusforge_core::fit::{read_point_rows, FitMode, FitRequest};
use locusforge_core::linkage::LinkageSpec;
use locusforge_core::tracer::trace;

const EXIT_VALIDATION: u8 = 2;
const EXIT_CANCELLED: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

#[derive(Parser)]
#[command(name = "locusforge", version, about = "Exact locus equations for four-bar linkages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Branches {
    Both,
    Ccw,
    Cw,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Leastsq,
}

#[derive(Subcommand)]
enum Command {
    /// Print the implicit equation of the coupler curve as JSON.
    Locus {
        /// Linkage JSON file, or `-` for stdin.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEADLINE_MS)]
        deadline_ms: u64,
        /// Report the elapsed time on stderr.
        #[arg(long)]
        timing: bool,
    },
    /// Sample the motion and print one row per crank angle and branch.
    Trace {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long, value_enum, default_value = "both")]
        branches: Branches,
        #[arg(long, value_enum, default_value = "csv")]
        format: TraceFormat,
    },
    /// Fit an implicit curve of the given degree through `x,y` rows.
    Fit {
        #[arg(long)]
        degree: i64,
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Print the full JSON report instead of the polynomial.
        #[arg(long)]
        json: bool,
    },
    /// Decide whether the thesis follows from the hypotheses.
    Prove {
        /// One polynomial per line, or a JSON array of strings.
        #[arg(long)]
        hypotheses: PathBuf,
        #[arg(long)]
        thesis: String,
        #[arg(long, default_value_t = DEFAULT_DEADLINE_MS)]
        deadline_ms: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run the JSON HTTP service.
    Serve {
        #[arg(long, env = "LOCUSFORGE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

enum Failure {
    Job(JobError),
    Io(String),
}

impl From<JobError> for Failure {
    fn from(e: JobError) -> Self {
        Failure::Job(e)
    }
}

impl From<locusforge_core::Error> for Failure {
    fn from(e: locusforge_core::Error) -> Self {
        Failure::Job(e.into())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut s = String::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    res.map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn read_spec(path: &Path) -> Result<LinkageSpec, Failure> {
    let text = read_input(path)?;
    let spec: LinkageSpec =
        serde_json::from_str(&text).map_err(|e| Failure::Job(JobError::BadRequest(e.to_string())))?;
    spec.validate()?;
    Ok(spec)
}

fn read_hypotheses(path: &Path) -> Result<Vec<String>, Failure> {
    let text = read_input(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| Failure::Job(JobError::BadRequest(e.to_string())));
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn branch_set(b: Branches) -> BranchSet {
    match b {
        Branches::Both => BranchSet::Both,
        Branches::Ccw => BranchSet::Ccw,
        Branches::Cw => BranchSet::Cw,
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Locus { spec, deadline_ms, timing } => {
            let job = Job::Locus(read_spec(&spec)?);
            let start = Instant::now();
            let out = job.run(&Deadline::after_ms(deadline_ms))?;
            if timing {
                eprintln!("elapsed_ms {}", start.elapsed().as_millis());
            }
            println!("{}", out.to_json());
            Ok(if out.degenerate() { EXIT_DEGENERATE } else { 0 })
        }
        Command::Trace { spec, samples, branches, format } => {
            let spec = read_spec(&spec)?;
            match format {
                TraceFormat::Csv => {
                    let t = trace(&spec, samples, &branch_set(branches).branches())?;
                    print!("{}", t.to_csv());
                }
                TraceFormat::Json => {
                    let job = Job::Trace(TracePayload { spec, samples, branches: branch_set(branches) });
                    println!("{}", job.run(&Deadline::none())?.to_json());
                }
            }
            Ok(0)
        }
        Command::Fit { degree, points, mode, json } => {
            let mode = match mode {
                Mode::Exact => FitMode::Exact,
                Mode::Leastsq => FitMode::Leastsq,
            };
            let rows = read_point_rows(&read_input(&points)?)?;
            let job = Job::Fit(FitRequest { degree, mode, points: rows });
            let out = job.run(&Deadline::none())?;
            match (&out, json) {
                (JobOutput::Fit(w), false) => println!("{}", w.polynomial.string),
                _ => println!("{}", out.to_json()),
            }
            Ok(0)
        }
        Command::Prove { hypotheses, thesis, deadline_ms, json } => {
            let payload = ProvePayload { hypotheses: read_hypotheses(&hypotheses)?, thesis };
            let out = Job::Prove(payload).run(&Deadline::after_ms(deadline_ms))?;
            match (&out, json) {
                (JobOutput::Prove(w), false) => println!("{}", w.verdict.as_str()),
                _ => println!("{}", out.to_json()),
            }
            Ok(0)
        }
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
            rt.block_on(locusforge::server::serve(SocketAddr::new(host, port)))
                .map_err(|e| Failure::Io(e.to_string()))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Job(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cancelled() {
                EXIT_CANCELLED
            } else if e.is_internal() {
                1
            } else {
                EXIT_VALIDATION
            })
        }
    }
}
