use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use genv::io::{schema, to_canonical_string, Input, SCHEMA_NAMES};
use genv::report::{run, Command, RunConfig};
use genv::Error;

#[derive(Parser)]
#[command(name = "genv", version, about = "Envelopes, invariant measures and Fourier reports for finite groupoid actions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check groupoid axioms and action laws
    Validate(Opts),
    /// Compile the input to explicit tables
    Build(Opts),
    /// Close the generators into the envelope
    Envelope(Opts),
    /// Classify the groupoid or envelope
    Classify(Opts),
    /// Fixed-space dimension and orbit classes
    Ergodicity(Opts),
    /// Relatively invariant measures
    Rim(Opts),
    /// Invariant sections and projection residuals
    Fourier(Opts),
    /// Full pipeline with the combined verdict
    Report(Opts),
    /// Print a JSON schema
    Schema { name: String },
}

#[derive(Args)]
struct Opts {
    /// Input JSON file, `-` for stdin
    #[arg(long, default_value = "-")]
    input: String,
    #[arg(long, value_parser = nonnegative)]
    epsilon: Option<f64>,
    /// Resolutions for the modulus diagnostic, e.g. `8,16,32` or `4x8,8x16`
    #[arg(long, value_parser = parse_resolutions)]
    resolutions: Option<Resolutions>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Metric comparison tolerance
    #[arg(long, value_parser = positive)]
    tol: Option<f64>,
    /// Maximum envelope size
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a nonnegative number")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Clone)]
struct Resolutions(Vec<Vec<usize>>);

fn parse_resolutions(s: &str) -> Result<Resolutions, String> {
    s.split(',')
        .map(|r| {
            r.trim()
                .split('x')
                .map(|c| c.trim().parse::<usize>().map_err(|e| format!("bad resolution `{r}`: {e}")))
                .collect()
        })
        .collect::<Result<_, _>>()
        .map(Resolutions)
}

fn read_input(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::UnknownKind { .. } | Error::Spec(_) => 1,
        Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, opts) = match cli.command {
        Cmd::Schema { name } => {
            return match schema(&name) {
                Some(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!("unknown schema `{name}`; known: {}", SCHEMA_NAMES.join(", "));
                    ExitCode::from(1)
                }
            };
        }
        Cmd::Validate(o) => (Command::Validate, o),
        Cmd::Build(o) => (Command::Build, o),
        Cmd::Envelope(o) => (Command::Envelope, o),
        Cmd::Classify(o) => (Command::Classify, o),
        Cmd::Ergodicity(o) => (Command::Ergodicity, o),
        Cmd::Rim(o) => (Command::Rim, o),
        Cmd::Fourier(o) => (Command::Fourier, o),
        Cmd::Report(o) => (Command::Report, o),
    };
    let cfg = RunConfig {
        epsilon: opts.epsilon,
        resolutions: opts.resolutions.map(|r| r.0),
        seed: opts.seed,
        tol: opts.tol,
        cap: opts.cap,
    };

    let result = read_input(&opts.input)
        .map_err(Error::from)
        .and_then(|text| Input::parse(&text))
        .and_then(|input| run(command, &input, &cfg));
    let (document, code) = match result {
        Ok(o) => (o.document, if o.violations { 2 } else { 0 }),
        Err(e) => {
            eprintln!("genv: {e}");
            let code = exit_code(&e);
            if code == 1 {
                return ExitCode::from(1);
            }
            (json!({"error": e.to_string()}), code)
        }
    };
    if let Err(e) = emit(&to_canonical_string(&document), opts.out.as_ref()) {
        eprintln!("genv: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
