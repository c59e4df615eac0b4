//! Evaluation results and their text and JSON renderings.

use std::cmp::Ordering;
use std::fmt;

use serde_json::{json, Value as Json};

use crate::genreal::{GenFraction, GenInterval};
use crate::ordinal::Ordinal;
use crate::skand::{Component, SetValue, Skand};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Ordinal(Ordinal),
    Fraction(GenFraction),
    Interval(GenInterval),
    Skand(Skand),
    Set(Component),
    Bool(bool),
    Ordering(Ordering),
    List(Vec<Value>),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Ordinal(_) => "ordinal",
            Value::Fraction(_) => "fraction",
            Value::Interval(_) => "interval",
            Value::Skand(_) => "skand",
            Value::Set(_) => "set",
            Value::Bool(_) => "boolean",
            Value::Ordering(_) => "ordering",
            Value::List(_) => "list",
            Value::Tuple(_) => "tuple",
        }
    }

    /// Tagged JSON; every string inside is valid input to the parser.
    pub fn to_json(&self) -> Json {
        let tag = self.type_name();
        match self {
            Value::Fraction(x) => fraction_json(x),
            Value::Interval(i) => json!({"type": tag, "lo": fraction_json(i.lo()), "hi": fraction_json(i.hi())}),
            Value::Bool(b) => json!({"type": tag, "value": b}),
            Value::List(v) | Value::Tuple(v) => {
                json!({"type": tag, "items": v.iter().map(Value::to_json).collect::<Vec<_>>()})
            }
            other => json!({"type": tag, "value": other.to_string()}),
        }
    }
}

fn fraction_json(x: &GenFraction) -> Json {
    let runs: Vec<Json> = x.runs().iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect();
    json!({"type": "fraction", "runs": runs, "alpha": x.universe().alpha().to_string()})
}

fn ordering_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Ordinal(o) => write!(f, "{o}"),
            Value::Fraction(x) => write!(f, "{x}"),
            Value::Interval(i) => write!(f, "{i}"),
            Value::Skand(s) => write!(f, "{s}"),
            Value::Set(c) => write!(f, "{}", SetValue::FinSet(c.clone())),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Ordering(o) => write!(f, "{}", ordering_name(*o)),
            Value::List(v) => write_seq(f, "[", v, "]"),
            Value::Tuple(v) => write_seq(f, "(", v, ")"),
        }
    }
}

fn write_seq(f: &mut fmt::Formatter<'_>, open: &str, items: &[Value], close: &str) -> fmt::Result {
    write!(f, "{open}")?;
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "{close}")
}
