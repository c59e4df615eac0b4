use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use transfinitum::cli::{parse, run_batch, run_repl, Env, Options, Value, EXIT_IO};
use transfinitum::genreal::Universe;

/// Calculator for ordinals, epsilon towers, skands and transfinite fractions.
#[derive(Parser, Debug)]
#[command(name = "transfinitum", version)]
struct Args {
    /// Print results as JSON.
    #[arg(long)]
    json: bool,
    /// Run a batch file instead of the interactive loop.
    #[arg(long, value_name = "FILE")]
    batch: Option<PathBuf>,
    /// Default universe for fraction constructors, e.g. w*2.
    #[arg(long, value_name = "ORD")]
    universe: Option<String>,
    /// Deepest skand nesting a result may have.
    #[arg(long, value_name = "N", default_value_t = 16)]
    max_depth: usize,
}

fn universe(src: &str, max_depth: usize) -> Result<Universe, String> {
    let e = parse(src).map_err(|e| e.to_string())?;
    match Env::new(None, max_depth).eval(&e).map_err(|e| e.to_string())? {
        Value::Ordinal(a) => Universe::new(a).map_err(|e| e.to_string()),
        v => Err(format!("a universe is an ordinal, got a {}", v.type_name())),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut opts = Options { json: args.json, universe: None, max_depth: args.max_depth };
    if let Some(u) = &args.universe {
        match universe(u, args.max_depth) {
            Ok(u) => opts.universe = Some(u),
            Err(e) => {
                eprintln!("--universe: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let mut out = io::stdout().lock();
    let code = match &args.batch {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(src) => run_batch(&src, &path.display().to_string(), &opts, &mut out),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                EXIT_IO
            }
        },
        None => {
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            run_repl(&mut stdin.lock(), &mut out, &opts, prompt)
        }
    };
    ExitCode::from(code as u8)
}
