mod commands;
mod sample;
mod wire;

use std::io::Read;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use commands::{Options, VERBS};
use wire::CliError;

/// Barycentric decompositions, convexity tests and mean-value bounds.
///
/// Reads a JSON document for the chosen verb and prints a JSON result.
/// Exit status: 0 success, 1 malformed input, 2 rejected by the operation.
#[derive(Parser, Debug)]
#[command(name = "barydecomp", version)]
struct Args {
    /// One of: barycenter, decompose, refine, transport, reduce-nd, gap-bound,
    /// amgm, hh-weights, hh-discrete, hh-seq, squeeze, hull, gap-set,
    /// check-convex-at, check-weighted-convex-at, propagate, interval-union,
    /// quad-mean, verify.
    verb: String,
    /// Use exact rational arithmetic where the operation offers both modes.
    #[arg(long)]
    exact: bool,
    /// Seed for the random spot checks run by `verify`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Input file, or `-` for standard input.
    #[arg(short = 'i', long = "input", default_value = "-")]
    input: String,
}

fn fail(code: u8, error: &str, detail: impl Into<String>) -> ExitCode {
    println!("{}", json!({ "error": error, "detail": detail.into() }));
    ExitCode::from(code)
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

fn main() -> ExitCode {
    let args = Args::parse();
    if !VERBS.contains(&args.verb.as_str()) {
        return fail(1, "unknown_verb", format!("`{}`; expected one of {}", args.verb, VERBS.join(", ")));
    }
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(1, "io_error", format!("{}: {e}", args.input)),
    };
    let input: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return fail(1, "parse_error", e.to_string()),
    };
    let opts = Options {
        exact: args.exact,
        seed: args.seed,
    };
    match commands::run(&args.verb, &input, opts, false) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.result).expect("values serialize"));
            ExitCode::SUCCESS
        }
        Err(CliError::Schema(msg)) => fail(1, "schema_error", msg),
        Err(CliError::Domain(e)) => fail(2, e.code(), e.to_string()),
    }
}
