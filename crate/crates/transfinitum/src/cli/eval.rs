//! Evaluation of parsed expressions.

use std::cell::RefCell;
use std::cmp::Ordering;

use super::parse::{Arg, BinOp, Expr};
use super::{CliError, Value};
use crate::epsilon::{epsilon_paper, is_epsilon_number, omega_limit_power, paper_index, try_finite_tower, try_tower_limit_general, TowerSpec};
use crate::genreal::{self, Bound, GenFraction, GenInterval, Sign, Universe};
use crate::ordinal::{self, Ordinal};
use crate::skand::{self, Component, Piece, PieceContent, SetOp, SetValue, Skand, Tail};

/// Search bound for `period`.
const PERIOD_BOUND: u64 = 1024;

/// Evaluation context.
#[derive(Clone, Debug)]
pub struct Env {
    /// Universe for fraction constructors without an explicit `@alpha`.
    pub universe: Option<Universe>,
    /// Deepest skand nesting a result may have.
    pub max_depth: usize,
    var: Option<Value>,
}

impl Env {
    pub fn new(universe: Option<Universe>, max_depth: usize) -> Env {
        Env { universe, max_depth, var: None }
    }
}

impl Default for Env {
    fn default() -> Env {
        Env::new(None, 16)
    }
}

type R<T> = Result<T, CliError>;

fn type_err<T>(msg: impl Into<String>) -> R<T> {
    Err(CliError::Type(msg.into()))
}

fn want<'a>(name: &str, args: &'a [Arg], n: usize) -> R<Vec<&'a Expr>> {
    if let Some(a) = args.iter().find(|a| a.key.is_some()) {
        return type_err(format!("{name} takes no keyword '{}'", a.key.as_deref().unwrap_or_default()));
    }
    if args.len() != n {
        return type_err(format!("{name} takes {n} argument(s), got {}", args.len()));
    }
    Ok(args.iter().map(|a| &a.value).collect())
}

fn keyword<'a>(name: &str, args: &'a [Arg], allowed: &[&str]) -> R<Vec<(&'a str, &'a Expr)>> {
    let mut out = Vec::new();
    for a in args {
        let Some(k) = a.key.as_deref() else {
            return type_err(format!("{name} takes keyword arguments only"));
        };
        if !allowed.contains(&k) || out.iter().any(|(seen, _)| *seen == k) {
            return type_err(format!("{name}: unexpected keyword '{k}'"));
        }
        out.push((k, &a.value));
    }
    Ok(out)
}

fn as_ord(v: Value) -> R<Ordinal> {
    match v {
        Value::Ordinal(o) => Ok(o),
        v => type_err(format!("expected an ordinal, got a {}", v.type_name())),
    }
}

fn as_frac(v: Value) -> R<GenFraction> {
    match v {
        Value::Fraction(x) => Ok(x),
        v => type_err(format!("expected a fraction, got a {}", v.type_name())),
    }
}

fn as_interval(v: Value) -> R<GenInterval> {
    match v {
        Value::Interval(i) => Ok(i),
        v => type_err(format!("expected an interval, got a {}", v.type_name())),
    }
}

fn as_skand(v: Value) -> R<Skand> {
    match v {
        Value::Skand(s) => Ok(s),
        v => type_err(format!("expected a skand, got a {}", v.type_name())),
    }
}

fn as_set(v: Value) -> R<Component> {
    match v {
        Value::Set(c) => Ok(c),
        v => type_err(format!("expected a set, got a {}", v.type_name())),
    }
}

fn as_u64(v: Value) -> R<u64> {
    let o = as_ord(v)?;
    o.to_u64().map_or_else(|| type_err(format!("expected a natural number, got {o}")), Ok)
}

fn universe_of(alpha: Ordinal) -> R<Universe> {
    Ok(Universe::new(alpha)?)
}

impl Env {
    fn universe(&self) -> R<Universe> {
        self.universe
            .clone()
            .map_or_else(|| type_err("no universe: append @alpha or set one with :universe"), Ok)
    }

    fn ord(&self, e: &Expr) -> R<Ordinal> {
        as_ord(self.eval(e)?)
    }

    fn nat(&self, e: &Expr) -> R<u64> {
        as_u64(self.eval(e)?)
    }

    fn frac(&self, e: &Expr) -> R<GenFraction> {
        as_frac(self.eval(e)?)
    }

    fn skand(&self, e: &Expr) -> R<Skand> {
        as_skand(self.eval(e)?)
    }

    /// A set element: bare names and numbers are atoms.
    fn elem(&self, e: &Expr) -> R<SetValue> {
        match e {
            Expr::Nat(n) => Ok(SetValue::atom(n.to_string())),
            Expr::Name(s) => Ok(SetValue::atom(s.clone())),
            Expr::Set(items) => Ok(SetValue::FinSet(self.set(items)?)),
            _ => match self.eval(e)? {
                Value::Skand(s) => Ok(SetValue::skand(s)),
                Value::Set(c) => Ok(SetValue::FinSet(c)),
                v => type_err(format!("a {} cannot be a set element", v.type_name())),
            },
        }
    }

    fn set(&self, items: &[Expr]) -> R<Component> {
        items.iter().map(|e| self.elem(e)).collect()
    }

    fn depth_checked(&self, s: Skand) -> R<Value> {
        let r = skand::rank(&s);
        if r > self.max_depth {
            return Err(CliError::domain("TooDeep", format!("skand nesting {r} exceeds max depth {}", self.max_depth)));
        }
        Ok(Value::Skand(s))
    }

    pub fn eval(&self, e: &Expr) -> R<Value> {
        match e {
            Expr::Nat(n) => Ok(Value::Ordinal(Ordinal::from_biguint(n.clone()))),
            Expr::Name(s) => match s.as_str() {
                "w" => Ok(Value::Ordinal(Ordinal::omega())),
                "true" => Ok(Value::Bool(true)),
                "false" => Ok(Value::Bool(false)),
                "less" => Ok(Value::Ordering(Ordering::Less)),
                "equal" => Ok(Value::Ordering(Ordering::Equal)),
                "greater" => Ok(Value::Ordering(Ordering::Greater)),
                "x" if self.var.is_some() => Ok(self.var.clone().expect("bound")),
                _ => type_err(format!("unknown name '{s}'")),
            },
            Expr::Index(name, idx) => {
                let i = self.ord(idx)?;
                match name.as_str() {
                    "eps" => Ok(Value::Ordinal(Ordinal::eps(i))),
                    "eps_paper" => Ok(Value::Ordinal(epsilon_paper(&i))),
                    _ => type_err(format!("'{name}' cannot be indexed")),
                }
            }
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.ord(a)?, self.ord(b)?);
                Ok(Value::Ordinal(match op {
                    BinOp::Add => ordinal::ord_add(&a, &b),
                    BinOp::Mul => ordinal::ord_mul(&a, &b),
                    BinOp::Pow => ordinal::try_ord_exp(&a, &b)?,
                }))
            }
            Expr::At(inner, alpha) => {
                let u = universe_of(self.ord(alpha)?)?;
                let env = Env { universe: Some(u), ..self.clone() };
                env.eval(inner)
            }
            Expr::Set(items) => Ok(Value::Set(self.set(items)?)),
            Expr::List(items) => Ok(Value::List(items.iter().map(|e| self.eval(e)).collect::<R<_>>()?)),
            Expr::Tuple(items) => Ok(Value::Tuple(items.iter().map(|e| self.eval(e)).collect::<R<_>>()?)),
            Expr::Span(..) => type_err("a half-open span is only allowed inside frac(...)"),
            Expr::Call(name, args) => self.call(name, args),
        }
    }

    fn call(&self, name: &str, args: &[Arg]) -> R<Value> {
        let ordv = |o: Ordinal| Ok(Value::Ordinal(o));
        let fracv = |x: GenFraction| Ok(Value::Fraction(x));
        match name {
            // ordinals
            "nsum" | "nprod" | "osub" => {
                let a = want(name, args, 2)?;
                let (x, y) = (self.ord(a[0])?, self.ord(a[1])?);
                match name {
                    "nsum" => ordv(ordinal::natural_sum(&x, &y)),
                    "nprod" => ordv(ordinal::natural_product(&x, &y)),
                    _ => ordv(ordinal::ord_sub_left(&x, &y)?),
                }
            }
            "E" => {
                let a = want(name, args, 2)?;
                ordv(try_tower_limit_general(&self.ord(a[0])?, &self.ord(a[1])?)?)
            }
            "tower" => {
                let a = want(name, args, 2)?;
                ordv(try_finite_tower(&self.ord(a[0])?, self.nat(a[1])?)?)
            }
            "limpow" => {
                let a = want(name, args, 2)?;
                let prefix = match self.eval(a[0])? {
                    Value::List(v) => v.into_iter().map(as_ord).collect::<R<Vec<_>>>()?,
                    v => return type_err(format!("limpow expects a list prefix, got a {}", v.type_name())),
                };
                ordv(omega_limit_power(&TowerSpec::new(prefix, self.ord(a[1])?)?))
            }
            "cmp" => {
                let a = want(name, args, 2)?;
                let o = match (self.eval(a[0])?, self.eval(a[1])?) {
                    (Value::Ordinal(x), Value::Ordinal(y)) => x.cmp(&y),
                    (Value::Fraction(x), Value::Fraction(y)) => genreal::compare(&x, &y)?,
                    (x, y) => return type_err(format!("cannot order a {} against a {}", x.type_name(), y.type_name())),
                };
                Ok(Value::Ordering(o))
            }
            "eq" => {
                let a = want(name, args, 2)?;
                Ok(Value::Bool(self.eval(a[0])? == self.eval(a[1])?))
            }
            "cnf2" => {
                let a = want(name, args, 1)?;
                let digits = ordinal::base_expand(&self.ord(a[0])?, 2)?;
                let items = digits
                    .into_iter()
                    .map(|(e, d)| Value::Tuple(vec![Value::Ordinal(e), Value::Ordinal(Ordinal::nat(d))]))
                    .collect();
                Ok(Value::List(items))
            }
            "leps" | "is_eps" | "indecomp" | "pidx" => {
                let a = want(name, args, 1)?;
                let x = self.ord(a[0])?;
                match name {
                    "leps" => ordv(ordinal::least_epsilon_above(&x)),
                    "is_eps" => Ok(Value::Bool(is_epsilon_number(&x))),
                    "indecomp" => Ok(Value::Bool(ordinal::is_additively_indecomposable(&x)?)),
                    _ => paper_index(&x).map_or_else(|| Err(CliError::domain("DomainError", format!("{x} is not an epsilon number"))), ordv),
                }
            }
            // fractions
            "dyad" | "block" => {
                let a = want(name, args, 1)?;
                let (p, u) = (self.ord(a[0])?, self.universe()?);
                fracv(if name == "dyad" { genreal::dyadic(&p, &u)? } else { genreal::block_sum(&p, &u)? })
            }
            "zero" | "one" => {
                want(name, args, 0)?;
                let u = self.universe()?;
                fracv(if name == "zero" { GenFraction::zero(&u) } else { GenFraction::one(&u) })
            }
            "frac" => self.frac_literal(args),
            "add" | "sub" => {
                let a = want(name, args, 2)?;
                let (x, y) = (self.frac(a[0])?, self.frac(a[1])?);
                fracv(if name == "add" { genreal::add(&x, &y)? } else { genreal::subtract(&x, &y)? })
            }
            "half" => {
                let a = want(name, args, 1)?;
                fracv(genreal::halve(&self.frac(a[0])?)?)
            }
            "mulp2" => {
                let a = want(name, args, 2)?;
                fracv(genreal::mul_by_pow2(&self.frac(a[0])?, &self.ord(a[1])?)?)
            }
            "dmul" => {
                let a = want(name, args, 2)?;
                fracv(genreal::mul_dyadic(&self.ord(a[0])?, &self.ord(a[1])?, &self.universe()?)?)
            }
            "between" => {
                let a = want(name, args, 2)?;
                let (x2, y2, g) = genreal::between(&self.frac(a[0])?, &self.frac(a[1])?)?;
                Ok(Value::Tuple(vec![Value::Fraction(x2), Value::Fraction(y2), Value::Ordinal(g)]))
            }
            "embed" => {
                let a = want(name, args, 2)?;
                fracv(genreal::embed(&self.frac(a[0])?, &universe_of(self.ord(a[1])?)?)?)
            }
            "sup" | "inf" => {
                let a = want(name, args, 1)?;
                let set = match self.eval(a[0])? {
                    Value::List(v) => v.into_iter().map(as_frac).collect::<R<Vec<_>>>()?,
                    v => return type_err(format!("{name} expects a list, got a {}", v.type_name())),
                };
                fracv(genreal::sup_inf_finite(&set, if name == "sup" { Bound::Sup } else { Bound::Inf })?)
            }
            "dbounds" => {
                let a = want(name, args, 2)?;
                let (s, i) = genreal::dyadic_family_bounds(&self.ord(a[0])?, &self.ord(a[1])?, &self.universe()?)?;
                Ok(Value::Tuple(vec![Value::Fraction(s), Value::Fraction(i)]))
            }
            "deriv" => {
                let a = want(name, args, 2)?;
                Ok(Value::Bool(genreal::in_derivative_stage(&self.ord(a[0])?, &self.ord(a[1])?)))
            }
            // intervals
            "interval" => {
                let a = want(name, args, 2)?;
                Ok(Value::Interval(GenInterval::new(self.frac(a[0])?, self.frac(a[1])?)?))
            }
            "length" => {
                let a = want(name, args, 1)?;
                fracv(as_interval(self.eval(a[0])?)?.length()?)
            }
            "contains" => {
                let a = want(name, args, 2)?;
                let i = as_interval(self.eval(a[0])?)?;
                Ok(Value::Bool(i.contains(&self.frac(a[1])?)?))
            }
            "halves" => {
                let a = want(name, args, 1)?;
                let (l, r) = genreal::interval_halve(&as_interval(self.eval(a[0])?)?)?;
                Ok(Value::Tuple(vec![Value::Interval(l), Value::Interval(r)]))
            }
            "nestleft" => {
                let a = want(name, args, 2)?;
                let start = as_interval(self.eval(a[0])?)?;
                let budget = self.nat(a[1])?;
                let halves = std::iter::successors(Some(start), |i| genreal::interval_halve(i).ok().map(|(l, _)| l));
                Ok(Value::Interval(genreal::nested_intersect(halves, budget)?))
            }
            "bisect" => {
                let a = want(name, args, 4)?;
                let i = GenInterval::new(self.frac(a[1])?, self.frac(a[2])?)?;
                let budget = self.nat(a[3])?;
                let failure = RefCell::new(None);
                let f = |x: &GenFraction| {
                    let env = Env { var: Some(Value::Fraction(x.clone())), ..self.clone() };
                    match env.eval(a[0]) {
                        Ok(Value::Ordering(o)) => match o {
                            Ordering::Less => Sign::Neg,
                            Ordering::Equal => Sign::Zero,
                            Ordering::Greater => Sign::Pos,
                        },
                        other => {
                            let err = match other {
                                Err(e) => e,
                                Ok(v) => CliError::Type(format!("bisect needs an ordering-valued body, got a {}", v.type_name())),
                            };
                            failure.borrow_mut().get_or_insert(err);
                            Sign::Zero
                        }
                    }
                };
                let r = genreal::dichotomy_root(f, &i, budget);
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                Ok(Value::Interval(r?))
            }
            // skands
            "skand" => self.skand_literal(args),
            "strivial" => {
                let a = want(name, args, 1)?;
                self.depth_checked(Skand::trivial(self.ord(a[0])?)?)
            }
            "ssingleton" => {
                let a = want(name, args, 1)?;
                self.depth_checked(skand::singleton_skand(&self.skand(a[0])?)?)
            }
            "eord" => {
                let a = want(name, args, 2)?;
                self.depth_checked(skand::ordinal_skand(self.nat(a[0])?, self.nat(a[1])?)?)
            }
            "member" => {
                let a = want(name, args, 2)?;
                Ok(Value::Bool(skand::member(&self.elem(a[0])?, &self.skand(a[1])?)))
            }
            "selfsim" | "reflexive" | "rank" | "period" | "tail" | "sview" | "power" | "slen" => {
                let a = want(name, args, 1)?;
                let s = self.skand(a[0])?;
                match name {
                    "selfsim" => Ok(Value::Bool(skand::is_self_similar(&s))),
                    "reflexive" => Ok(Value::Bool(skand::is_reflexive(&s))),
                    "rank" => ordv(Ordinal::nat(skand::rank(&s) as u64)),
                    "period" => skand::circular_period(&s, PERIOD_BOUND)
                        .map_or_else(|| Err(CliError::domain("NotCircular", format!("no membership cycle of length <= {PERIOD_BOUND}"))), |n| ordv(Ordinal::nat(n))),
                    "tail" => match skand::tail(&s) {
                        Tail::Skand(t) => Ok(Value::Skand(t)),
                        Tail::Set(c) => Ok(Value::Set(c)),
                    },
                    "sview" => Ok(Value::Set(skand::set_view(&s))),
                    "slen" => ordv(s.length().clone()),
                    _ => self.depth_checked(skand::power_skand(&s)?),
                }
            }
            "seq" => {
                let a = want(name, args, 2)?;
                let (s, i) = (self.skand(a[0])?, self.ord(a[1])?);
                match s.component(&i) {
                    Some(c) => Ok(Value::Set(c.clone())),
                    None => Err(CliError::domain("OutOfRange", format!("index {i} is not below the length {}", s.length()))),
                }
            }
            "union" | "inter" | "diff" => {
                let a = want(name, args, 2)?;
                let op = match name {
                    "union" => SetOp::Union,
                    "inter" => SetOp::Intersection,
                    _ => SetOp::Difference,
                };
                self.depth_checked(skand::skand_setop(op, &self.skand(a[0])?, &self.skand(a[1])?)?)
            }
            "subset" => {
                let a = want(name, args, 2)?;
                let (x, y) = (self.skand(a[0])?, self.skand(a[1])?);
                Ok(Value::Bool(skand::set_view(&x).is_subset(&skand::set_view(&y))))
            }
            _ => type_err(format!("unknown function '{name}'")),
        }
    }

    fn frac_literal(&self, args: &[Arg]) -> R<Value> {
        let kw = keyword("frac", args, &["alpha", "runs"])?;
        let get = |k: &str| kw.iter().find(|(n, _)| *n == k).map(|(_, e)| *e);
        let alpha = match get("alpha") {
            Some(e) => universe_of(self.ord(e)?)?,
            None => self.universe()?,
        };
        let runs = match get("runs") {
            None => Vec::new(),
            Some(Expr::List(items)) => items
                .iter()
                .map(|s| match s {
                    Expr::Span(a, b) => Ok((self.ord(a)?, self.ord(b)?)),
                    _ => type_err("runs must be half-open spans [a, b)"),
                })
                .collect::<R<Vec<_>>>()?,
            Some(_) => return type_err("runs must be a list of spans"),
        };
        if let Some((a, b)) = runs.iter().find(|(a, b)| a > b) {
            return Err(CliError::domain("DomainError", format!("run [{a}, {b}) is reversed")));
        }
        Ok(Value::Fraction(GenFraction::canonicalize(runs, &alpha)?))
    }

    fn skand_literal(&self, args: &[Arg]) -> R<Value> {
        let kw = keyword("skand", args, &["len", "const", "period", "pieces"])?;
        let Some((_, len)) = kw.iter().find(|(k, _)| *k == "len") else {
            return type_err("skand needs len=");
        };
        let length = self.ord(len)?;
        let content: Vec<_> = kw.iter().filter(|(k, _)| *k != "len").collect();
        let s = match content.as_slice() {
            [] => Skand::trivial(length)?,
            [("const", e)] => Skand::constant(length, as_set(self.eval(e)?)?)?,
            [("period", e)] => Skand::periodic(length, self.pattern(self.eval(e)?)?)?,
            [("pieces", e)] => {
                let Value::List(items) = self.eval(e)? else {
                    return type_err("pieces must be a list of (lo, hi, content)");
                };
                let pieces = items.into_iter().map(|p| self.piece(p)).collect::<R<Vec<_>>>()?;
                Skand::from_pieces(length, pieces)?
            }
            _ => return type_err("skand takes exactly one of const=, period=, pieces="),
        };
        self.depth_checked(s)
    }

    fn pattern(&self, v: Value) -> R<Vec<Component>> {
        match v {
            Value::List(items) if !items.is_empty() => items.into_iter().map(as_set).collect(),
            v => type_err(format!("a period must be a nonempty list of sets, got a {}", v.type_name())),
        }
    }

    fn piece(&self, v: Value) -> R<Piece> {
        let Value::Tuple(mut t) = v else {
            return type_err("each piece is a tuple (lo, hi, content)");
        };
        if t.len() != 3 {
            return type_err("each piece is a tuple (lo, hi, content)");
        }
        let content = match t.pop().expect("three") {
            Value::Set(c) => PieceContent::Constant(c),
            v => {
                let pat = self.pattern(v)?;
                if pat.len() == 1 {
                    PieceContent::Constant(pat.into_iter().next().expect("one"))
                } else {
                    PieceContent::Periodic(pat)
                }
            }
        };
        let hi = as_ord(t.pop().expect("three"))?;
        let lo = as_ord(t.pop().expect("three"))?;
        Ok(Piece { lo, hi, content })
    }
}

/// Evaluates with a default environment.
pub fn eval(e: &Expr) -> Result<Value, CliError> {
    Env::default().eval(e)
}
