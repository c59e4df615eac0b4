//! Batch files and the interactive loop.
//!
//! A batch line is `expr`, `expr => expected` or `expr => error Kind`;
//! `#` starts a comment and `:universe <ord>` sets the default universe.

use std::io::{BufRead, Write};

use serde_json::{json, Value as Json};

use super::eval::Env;
use super::parse::parse_line;
use super::{CliError, Value, EXIT_IO, EXIT_MISMATCH, EXIT_OK};
use crate::genreal::{GenInterval, Universe};

#[derive(Clone, Debug)]
pub struct Options {
    pub json: bool,
    pub universe: Option<Universe>,
    pub max_depth: usize,
}

impl Default for Options {
    fn default() -> Options {
        Options { json: false, universe: None, max_depth: 16 }
    }
}

/// Shifts the column of a syntax error by `by` characters.
fn shift(e: CliError, by: usize) -> CliError {
    match e {
        CliError::Syntax { line, col, expected } => CliError::Syntax { line, col: col + by, expected },
        e => e,
    }
}

enum Line<'a> {
    Blank,
    Universe(&'a str),
    Expr { lhs: &'a str, rhs: Option<(&'a str, usize)> },
}

fn classify(raw: &str) -> Line<'_> {
    let text = raw.split('#').next().unwrap_or_default();
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Line::Blank;
    }
    if let Some(rest) = trimmed.strip_prefix(":universe") {
        return Line::Universe(rest.trim());
    }
    match text.find("=>") {
        Some(i) => Line::Expr { lhs: &text[..i], rhs: Some((&text[i + 2..], text[..i + 2].chars().count())) },
        None => Line::Expr { lhs: text, rhs: None },
    }
}

fn set_universe(env: &mut Env, src: &str, line: usize) -> Result<(), CliError> {
    let v = env.eval(&parse_line(src, line)?)?;
    match v {
        Value::Ordinal(alpha) => {
            env.universe = Some(Universe::new(alpha)?);
            Ok(())
        }
        v => Err(CliError::Type(format!("a universe is an ordinal, got a {}", v.type_name()))),
    }
}

fn render(v: &Value, opts: &Options) -> String {
    if opts.json {
        v.to_json().to_string()
    } else {
        v.to_string()
    }
}

fn render_error(e: &CliError, label: &str, line: usize, opts: &Options) -> String {
    if opts.json {
        return json!({"line": line, "error": {"kind": e.kind(), "message": e.message()}}).to_string();
    }
    match e {
        CliError::Syntax { .. } => format!("{label}:{e}"),
        _ => format!("{label}:{line}: error[{}]: {}", e.kind(), e.message()),
    }
}

enum Shown {
    Value(Value),
    Error(&'static str),
}

impl Shown {
    fn text(&self) -> String {
        match self {
            Shown::Value(v) => v.to_string(),
            Shown::Error(k) => format!("error[{k}]"),
        }
    }

    fn json(&self) -> Json {
        match self {
            Shown::Value(v) => v.to_json(),
            Shown::Error(k) => json!({"type": "error", "kind": k}),
        }
    }
}

/// Runs a batch source, stopping at the first failure. Returns the exit
/// status.
pub fn run_batch(src: &str, label: &str, opts: &Options, out: &mut dyn Write) -> i32 {
    match batch(src, label, opts, out) {
        Ok(code) => code,
        Err(_) => EXIT_IO,
    }
}

fn batch(src: &str, label: &str, opts: &Options, out: &mut dyn Write) -> std::io::Result<i32> {
    let mut env = Env::new(opts.universe.clone(), opts.max_depth);
    for (i, raw) in src.lines().enumerate() {
        let n = i + 1;
        let (lhs, rhs) = match classify(raw) {
            Line::Blank => continue,
            Line::Universe(u) => {
                if let Err(e) = set_universe(&mut env, u, n) {
                    writeln!(out, "{}", render_error(&e, label, n, opts))?;
                    return Ok(e.exit_code());
                }
                continue;
            }
            Line::Expr { lhs, rhs } => (lhs, rhs),
        };
        let got = parse_line(lhs, n).and_then(|e| env.eval(&e));
        if let Err(e @ CliError::Syntax { .. }) = &got {
            writeln!(out, "{}", render_error(e, label, n, opts))?;
            return Ok(e.exit_code());
        }
        let Some((rhs, offset)) = rhs else {
            match got {
                Ok(v) => writeln!(out, "{}", render(&v, opts))?,
                Err(e) => {
                    writeln!(out, "{}", render_error(&e, label, n, opts))?;
                    return Ok(e.exit_code());
                }
            }
            continue;
        };
        let verdict: Result<Shown, Shown> = match rhs.trim().strip_prefix("error") {
            Some(kind) => {
                let kind = kind.trim();
                match got {
                    Err(e) if e.kind() == kind => Ok(Shown::Error(e.kind())),
                    Err(e) => Err(Shown::Error(e.kind())),
                    Ok(v) => Err(Shown::Value(v)),
                }
            }
            None => {
                let want = match parse_line(rhs, n).map_err(|e| shift(e, offset)).and_then(|e| env.eval(&e)) {
                    Ok(w) => w,
                    Err(e) => {
                        writeln!(out, "{}", render_error(&e, label, n, opts))?;
                        return Ok(e.exit_code());
                    }
                };
                match got {
                    Ok(v) if v == want => Ok(Shown::Value(v)),
                    Ok(v) => Err(Shown::Value(v)),
                    Err(e) => Err(Shown::Error(e.kind())),
                }
            }
        };
        let expected = rhs.trim();
        match verdict {
            Ok(shown) if opts.json => writeln!(out, "{}", json!({"line": n, "status": "ok", "result": shown.json()}))?,
            Ok(shown) => writeln!(out, "ok {n}: {}", shown.text())?,
            Err(shown) => {
                if opts.json {
                    writeln!(out, "{}", json!({"line": n, "status": "mismatch", "got": shown.json(), "expected": expected}))?;
                } else {
                    writeln!(out, "{label}:{n}: mismatch: got {}, expected {expected}", shown.text())?;
                }
                return Ok(EXIT_MISMATCH);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Reads expressions until end of input, printing each result; errors are
/// reported and the loop continues.
pub fn run_repl(input: &mut dyn BufRead, out: &mut dyn Write, opts: &Options, prompt: bool) -> i32 {
    let mut env = Env::new(opts.universe.clone(), opts.max_depth);
    let mut n = 0;
    let mut buf = String::new();
    loop {
        if prompt {
            let _ = write!(out, "> ");
            let _ = out.flush();
        }
        buf.clear();
        match input.read_line(&mut buf) {
            Ok(0) => return EXIT_OK,
            Ok(_) => {}
            Err(_) => return EXIT_IO,
        }
        n += 1;
        let text = buf.trim();
        if text == ":quit" || text == ":q" {
            return EXIT_OK;
        }
        let shown = match classify(text) {
            Line::Blank => continue,
            Line::Universe(u) => match set_universe(&mut env, u, n) {
                Ok(()) => continue,
                Err(e) => render_error(&e, "<stdin>", n, opts),
            },
            Line::Expr { lhs, .. } => match parse_line(lhs, n).and_then(|e| env.eval(&e)) {
                Ok(v) => render(&v, opts),
                Err(e) => render_error(&e, "<stdin>", n, opts),
            },
        };
        if writeln!(out, "{shown}").is_err() {
            return EXIT_IO;
        }
    }
}

/// Rebuilds a value from its JSON rendering.
pub fn value_from_json(j: &Json, opts: &Options) -> Result<Value, CliError> {
    let bad = || CliError::Type(format!("not a rendered value: {j}"));
    let tag = j.get("type").and_then(Json::as_str).ok_or_else(bad)?;
    let env = Env::new(opts.universe.clone(), opts.max_depth);
    let text = |s: &str| parse_line(s, 1).and_then(|e| env.eval(&e));
    let v = match tag {
        "fraction" => {
            let alpha = j.get("alpha").and_then(Json::as_str).ok_or_else(bad)?;
            let runs = j.get("runs").and_then(Json::as_array).ok_or_else(bad)?;
            let mut spans = Vec::new();
            for r in runs {
                let pair = r.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                let (a, b) = (pair[0].as_str().ok_or_else(bad)?, pair[1].as_str().ok_or_else(bad)?);
                spans.push(format!("[{a}, {b})"));
            }
            text(&format!("frac(alpha={alpha}; runs=[{}])", spans.join(", ")))?
        }
        "interval" => {
            let lo = value_from_json(j.get("lo").ok_or_else(bad)?, opts)?;
            let hi = value_from_json(j.get("hi").ok_or_else(bad)?, opts)?;
            match (lo, hi) {
                (Value::Fraction(lo), Value::Fraction(hi)) => Value::Interval(GenInterval::new(lo, hi)?),
                _ => return Err(bad()),
            }
        }
        "boolean" => Value::Bool(j.get("value").and_then(Json::as_bool).ok_or_else(bad)?),
        "list" | "tuple" => {
            let items = j.get("items").and_then(Json::as_array).ok_or_else(bad)?;
            let items = items.iter().map(|i| value_from_json(i, opts)).collect::<Result<Vec<_>, _>>()?;
            if tag == "list" {
                Value::List(items)
            } else {
                Value::Tuple(items)
            }
        }
        _ => text(j.get("value").and_then(Json::as_str).ok_or_else(bad)?)?,
    };
    if v.type_name() != tag {
        return Err(bad());
    }
    Ok(v)
}
