use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ore_gcrd::bench::{run_experiment, ExperimentConfig, Protocol, SuiteReport, CSV_HEADER, TRIAL_LOG_HEADER};
use ore_gcrd::parse::parse_diffpoly;
use ore_gcrd::sylvester::{build_sylvester, inflate};
use ore_gcrd::{
    nearest_with_gcrd, numeric_gcrd, ContentRemoval, DiffPoly, Error, GcrdOptions, GcrdOutcome, ReconstructionMode,
};

const EXIT_USAGE: u8 = 1;
const EXIT_FAILURE: u8 = 2;
const EXIT_SEPARATION: u8 = 3;

#[derive(Parser)]
#[command(name = "ore-gcrd", version, about = "Approximate GCRDs of differential polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate GCRD of two operators.
    Gcrd(PairArgs),
    /// Nearest pair with a nontrivial GCRD, and that GCRD.
    Nearest {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = Mode::FirstRow)]
        mode: Mode,
    },
    /// Differential Sylvester matrix of two operators.
    Sylvester {
        /// Operator text, JSON, or a path to a file holding either.
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
        /// Print the inflated real matrix instead.
        #[arg(long)]
        inflated: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized perturbation experiments.
    Bench {
        #[arg(long, value_enum, default_value_t = ProtocolArg::Bounded)]
        protocol: ProtocolArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Tolerances, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        rho: Vec<f64>,
        /// Noise levels, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.01")]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write one CSV line per trial to this file.
        #[arg(long)]
        trial_log: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PairArgs {
    /// Operator text, JSON, or a path to a file holding either.
    #[arg(allow_hyphen_values = true)]
    f: String,
    #[arg(allow_hyphen_values = true)]
    g: String,
    #[arg(short, long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Content::Fft)]
    content: Content,
    /// Coefficients below this are treated as zero during content removal.
    #[arg(long, default_value_t = 1e-8)]
    threshold: f64,
    /// Work with the inputs as given instead of scaling them to unit norm.
    #[arg(long)]
    no_normalize: bool,
    /// Decimals in text output.
    #[arg(long, default_value_t = 5)]
    digits: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Content {
    Fft,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    FirstRow,
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Bounded,
    Normalized,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Io(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other),
        }
    }
}

fn read_operator(arg: &str) -> Result<DiffPoly<f64>, Failure> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    parse_diffpoly(&text).map_err(|e| Failure::Usage(format!("{arg}: {e}")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn options(pair: &PairArgs) -> GcrdOptions {
    GcrdOptions {
        eps: pair.epsilon,
        content: match pair.content {
            Content::Fft => ContentRemoval::Fft {
                threshold: pair.threshold,
            },
            Content::None => ContentRemoval::None,
        },
        normalize: !pair.no_normalize,
    }
}

fn render_outcome(out: &GcrdOutcome, pair: &PairArgs) -> Result<String, Failure> {
    match pair.format {
        Format::Json => Ok(serde_json::to_string_pretty(&out.to_json()).expect("json")),
        Format::Csv => Err(Failure::Usage("csv output is only available for bench".into())),
        Format::Text => {
            let digits = Some(pair.digits);
            let mut text = out.gcrd.render("D", "t", digits);
            if let Some(p) = &out.perturbed {
                text.push_str(&format!(
                    "\nf~ = {}\ng~ = {}\n||f - f~|| = {:e}\n||g - g~|| = {:e}",
                    p.f.render("D", "t", digits),
                    p.g.render("D", "t", digits),
                    p.perturbation_f,
                    p.perturbation_g
                ));
            }
            Ok(text)
        }
    }
}

fn bench_output(reports: &[SuiteReport], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut lines = vec![CSV_HEADER.to_string()];
            lines.extend(reports.iter().flat_map(SuiteReport::csv_rows));
            lines.join("\n")
        }
        Format::Json => serde_json::to_string_pretty(&json!(reports)).expect("json"),
        Format::Text => reports
            .iter()
            .map(SuiteReport::text_table)
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gcrd(pair) => {
            let (f, g) = (read_operator(&pair.f)?, read_operator(&pair.g)?);
            let out = numeric_gcrd(&f, &g, &options(&pair))?;
            emit(&pair.out, &render_outcome(&out, &pair)?)
        }
        Command::Nearest { pair, mode } => {
            let (f, g) = (read_operator(&pair.f)?, read_operator(&pair.g)?);
            let mode = match mode {
                Mode::FirstRow => ReconstructionMode::FirstRow,
                Mode::Weighted => ReconstructionMode::Weighted,
            };
            let out = nearest_with_gcrd(&f, &g, &options(&pair), mode)?;
            emit(&pair.out, &render_outcome(&out, &pair)?)
        }
        Command::Sylvester {
            f,
            g,
            inflated,
            format,
            out,
        } => {
            let v = build_sylvester(&read_operator(&f)?, &read_operator(&g)?)?;
            let text = match (inflated, format) {
                (false, Format::Text) => v.to_text(),
                (false, Format::Json) => {
                    json!({ "m": v.m(), "n": v.n(), "d": v.d(), "mu": v.mu(), "rows": v.to_nested() }).to_string()
                }
                (true, Format::Text) => inflate(&v).to_text(),
                (true, Format::Json) => inflate(&v).to_json().to_string(),
                (_, Format::Csv) => return Err(Failure::Usage("csv output is only available for bench".into())),
            };
            emit(&out, &text)
        }
        Command::Bench {
            protocol,
            trials,
            rho,
            delta,
            seed,
            format,
            out,
            trial_log,
        } => {
            let protocol = match protocol {
                ProtocolArg::Bounded => Protocol::Bounded,
                ProtocolArg::Normalized => Protocol::Normalized,
            };
            let mut reports = Vec::new();
            for &r in &rho {
                for &d in &delta {
                    let config = ExperimentConfig {
                        trials,
                        seed,
                        ..ExperimentConfig::new(protocol, r, d)
                    };
                    reports.push(run_experiment(&config).map_err(|e| match e {
                        Error::InvalidInput(msg) => Failure::Usage(msg),
                        other => Failure::Compute(other),
                    })?);
                }
            }
            if let Some(path) = &trial_log {
                let mut log = format!("{TRIAL_LOG_HEADER}\n");
                log.extend(reports.iter().map(SuiteReport::trial_log_csv));
                fs::write(path, log).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            emit(&out, &bench_output(&reports, format))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Compute(e)) => {
            println!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            let code = if matches!(e, Error::SeparationFailure { .. }) {
                EXIT_SEPARATION
            } else {
                EXIT_FAILURE
            };
            ExitCode::from(code)
        }
    }
}
