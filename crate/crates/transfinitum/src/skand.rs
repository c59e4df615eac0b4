//! Skands: ordinal-indexed systems of nested braces whose components are
//! finite sets.
//!
//! A skand of length `w*q + r` is stored as `q` blocks of length `w`
//! followed by `r` trailing components. Every block is an eventually
//! periodic sequence `prefix ++ cycle ++ cycle ++ ...`, and consecutive
//! blocks with the same purely periodic shape are grouped into runs over
//! block indices. With primitive cycles, minimal prefixes and maximal runs
//! this layout is unique, so equality of skands is structural equality.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::ordinal::{div_by_omega, is_additively_indecomposable, ord_add, ord_mul, Ordinal};

/// Cap on explicitly stored positions (prefixes, cycles, finite tails).
pub const MAX_CELLS: usize = 1 << 16;

/// Cap on the size of a component handed to [`power_skand`].
pub const MAX_POWERSET_BASE: usize = 12;

pub type Component = BTreeSet<SetValue>;

/// A value that can sit inside a component.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetValue {
    Atom(String),
    FinSet(Component),
    SkandRef(Arc<Skand>),
}

impl SetValue {
    pub fn atom(label: impl Into<String>) -> SetValue {
        SetValue::Atom(label.into())
    }

    pub fn skand(s: Skand) -> SetValue {
        SetValue::SkandRef(Arc::new(s))
    }

    /// A length-one skand and its sole component are the same set.
    fn identified(&self) -> SetValue {
        match self {
            SetValue::SkandRef(s) if s.length.is_one() => SetValue::FinSet(s.rest[0].clone()),
            v => v.clone(),
        }
    }

    fn rank(&self) -> usize {
        match self {
            SetValue::Atom(_) => 0,
            SetValue::FinSet(s) => s.iter().map(SetValue::rank).max().unwrap_or(0),
            SetValue::SkandRef(s) => rank(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkandError {
    #[error("skand lengths differ: {0} vs {1}")]
    LengthMismatch(String, String),
    #[error("singleton-skand needs a self-similar skand of length at least w")]
    NotSelfSimilar,
    #[error("invalid pieces: {0}")]
    InvalidPieces(String),
    #[error("too large: {0}")]
    TooLarge(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceContent {
    Constant(Component),
    Periodic(Vec<Component>),
}

impl PieceContent {
    fn pattern(&self) -> &[Component] {
        match self {
            PieceContent::Constant(c) => std::slice::from_ref(c),
            PieceContent::Periodic(p) => p,
        }
    }

    fn from_cycle(cycle: &[Component]) -> PieceContent {
        if cycle.len() == 1 {
            PieceContent::Constant(cycle[0].clone())
        } else {
            PieceContent::Periodic(cycle.to_vec())
        }
    }
}

/// Components on `[lo, hi)`: the one at `lo + d` is `pattern[r mod n]`
/// with `r` the finite part of `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: Ordinal,
    pub hi: Ordinal,
    pub content: PieceContent,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Block {
    prefix: Vec<Component>,
    cycle: Vec<Component>,
}

impl Block {
    fn at(&self, i: usize) -> &Component {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    fn at_big(&self, i: &BigUint) -> &Component {
        match i.to_usize() {
            Some(i) => self.at(i),
            None => {
                let off = i - BigUint::from(self.prefix.len());
                let r = (off % BigUint::from(self.cycle.len())).to_usize().expect("below cycle length");
                &self.cycle[r]
            }
        }
    }

    fn normalized(mut self) -> Block {
        let n = self.cycle.len();
        if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| self.cycle[i] == self.cycle[i % d])) {
            self.cycle.truncate(d);
        }
        while self.prefix.last().is_some_and(|p| Some(p) == self.cycle.last()) {
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
        self
    }

    fn drop_first(&self) -> Block {
        let mut b = self.clone();
        if b.prefix.is_empty() {
            b.cycle.rotate_left(1);
        } else {
            b.prefix.remove(0);
        }
        b
    }

    fn map(&self, f: &impl Fn(&Component) -> Component) -> Block {
        Block { prefix: self.prefix.iter().map(f).collect(), cycle: self.cycle.iter().map(f).collect() }
    }
}

/// Blocks `w*start .. w*end` all shaped like `block`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Run {
    start: Ordinal,
    end: Ordinal,
    block: Block,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Skand {
    length: Ordinal,
    runs: Vec<Run>,
    rest: Vec<Component>,
}

/// What remains after dropping the first component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    Skand(Skand),
    Set(Component),
}

fn omega_times(x: &Ordinal) -> Ordinal {
    ord_mul(&Ordinal::omega(), x)
}

fn small(n: &BigUint, what: &str) -> Result<usize, SkandError> {
    n.to_usize()
        .filter(|&k| k <= MAX_CELLS)
        .ok_or_else(|| SkandError::TooLarge(format!("{what} {n} exceeds {MAX_CELLS} explicit positions")))
}

impl Skand {
    fn from_layout(length: Ordinal, runs: Vec<Run>, rest: Vec<Component>) -> Skand {
        let mut merged: Vec<Run> = Vec::with_capacity(runs.len());
        for mut r in runs {
            r.block = r.block.normalized();
            match merged.last_mut() {
                Some(last) if last.block == r.block && r.block.prefix.is_empty() && last.end == r.start => {
                    last.end = r.end;
                }
                _ => merged.push(r),
            }
        }
        Skand { length, runs: merged, rest }
    }

    /// Every component equal to `c`.
    pub fn constant(length: Ordinal, c: Component) -> Result<Skand, SkandError> {
        Skand::from_pieces(length.clone(), vec![Piece { lo: Ordinal::zero(), hi: length, content: PieceContent::Constant(c) }])
    }

    /// The empty skand `e` of the given length.
    pub fn trivial(length: Ordinal) -> Result<Skand, SkandError> {
        Skand::constant(length, Component::new())
    }

    /// Components `pattern[r mod n]` at positions `lambda + r`.
    pub fn periodic(length: Ordinal, pattern: Vec<Component>) -> Result<Skand, SkandError> {
        Skand::from_pieces(length.clone(), vec![Piece { lo: Ordinal::zero(), hi: length, content: PieceContent::Periodic(pattern) }])
    }

    /// A skand of finite length listing its components.
    pub fn finite(components: Vec<Component>) -> Result<Skand, SkandError> {
        let n = components.len() as u64;
        let pieces = components
            .into_iter()
            .enumerate()
            .map(|(i, c)| Piece { lo: Ordinal::nat(i as u64), hi: Ordinal::nat(i as u64 + 1), content: PieceContent::Constant(c) })
            .collect();
        Skand::from_pieces(Ordinal::nat(n), pieces)
    }

    /// Builds a skand from pieces partitioning `[0, length)`.
    pub fn from_pieces(length: Ordinal, pieces: Vec<Piece>) -> Result<Skand, SkandError> {
        let bad = |m: String| Err(SkandError::InvalidPieces(m));
        if length.is_zero() {
            return bad("length must be at least 1".into());
        }
        let mut at = Ordinal::zero();
        for p in &pieces {
            if p.lo != at {
                return bad(format!("piece starts at {} but previous coverage ends at {at}", p.lo));
            }
            if p.lo >= p.hi {
                return bad(format!("empty span [{}, {})", p.lo, p.hi));
            }
            if p.content.pattern().is_empty() {
                return bad("periodic pattern must be nonempty".into());
            }
            if p.content.pattern().len() > MAX_CELLS {
                return Err(SkandError::TooLarge("pattern length".into()));
            }
            at = p.hi.clone();
        }
        if at != length {
            return bad(format!("pieces cover [0, {at}) but length is {length}"));
        }

        let (q, _) = div_by_omega(&length);
        let mut runs = Vec::new();
        let mut cur: Option<(Ordinal, Vec<Component>)> = None;
        for p in &pieces {
            let pat = p.content.pattern();
            let n = pat.len();
            let (x0, k0) = div_by_omega(&p.lo);
            let (x1, k1) = div_by_omega(&p.hi);
            let k0 = small(&k0, "offset")?;
            let k1 = small(&k1, "offset")?;
            let mut cells = match cur.take() {
                Some((x, cells)) if x == x0 && cells.len() == k0 => cells,
                None if k0 == 0 => Vec::new(),
                _ => return bad(format!("cannot place piece at {}", p.lo)),
            };
            if x0 == x1 {
                cells.extend((k0..k1).map(|i| pat[(i - k0) % n].clone()));
                cur = Some((x0, cells));
            } else {
                let next = x0.succ();
                runs.push(Run { start: x0, end: next.clone(), block: Block { prefix: cells, cycle: pat.to_vec() } });
                if next < x1 {
                    runs.push(Run { start: next, end: x1.clone(), block: Block { prefix: vec![], cycle: pat.to_vec() } });
                }
                let cells: Vec<Component> = (0..k1).map(|i| pat[i % n].clone()).collect();
                cur = (k1 > 0 || x1 == q).then_some((x1, cells));
            }
        }
        let rest = match cur {
            Some((x, cells)) if x == q => cells,
            None => Vec::new(),
            Some((x, _)) => return bad(format!("block {x} left incomplete")),
        };
        Ok(Skand::from_layout(length, runs, rest))
    }

    pub fn length(&self) -> &Ordinal {
        &self.length
    }

    /// Number of full `w`-blocks.
    fn blocks(&self) -> Ordinal {
        div_by_omega(&self.length).0
    }

    /// Component at position `idx`, or `None` past the end.
    pub fn component(&self, idx: &Ordinal) -> Option<&Component> {
        if *idx >= self.length {
            return None;
        }
        let (x, k) = div_by_omega(idx);
        if x < self.blocks() {
            let i = self.runs.partition_point(|r| r.start <= x) - 1;
            Some(self.runs[i].block.at_big(&k))
        } else {
            self.rest.get(k.to_usize()?)
        }
    }

    /// Canonical piece decomposition.
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out: Vec<Piece> = Vec::new();
        let mut push = |lo: Ordinal, hi: Ordinal, content: PieceContent| {
            if let Some(last) = out.last_mut() {
                let joinable = match (&last.content, &content) {
                    (PieceContent::Constant(a), PieceContent::Constant(b)) => a == b,
                    (PieceContent::Periodic(a), PieceContent::Periodic(b)) => a == b && lo.is_limit(),
                    _ => false,
                };
                if joinable && last.hi == lo {
                    last.hi = hi;
                    return;
                }
            }
            out.push(Piece { lo, hi, content });
        };
        for r in &self.runs {
            let lo = omega_times(&r.start);
            let hi = omega_times(&r.end);
            for (i, c) in r.block.prefix.iter().enumerate() {
                let a = ord_add(&lo, &Ordinal::nat(i as u64));
                push(a.clone(), a.succ(), PieceContent::Constant(c.clone()));
            }
            let from = ord_add(&lo, &Ordinal::nat(r.block.prefix.len() as u64));
            push(from, hi, PieceContent::from_cycle(&r.block.cycle));
        }
        let base = omega_times(&self.blocks());
        for (i, c) in self.rest.iter().enumerate() {
            let a = ord_add(&base, &Ordinal::nat(i as u64));
            push(a.clone(), a.succ(), PieceContent::Constant(c.clone()));
        }
        out
    }

    /// The single component when all components coincide.
    pub fn constant_value(&self) -> Option<&Component> {
        let mut it = self
            .runs
            .iter()
            .map(|r| (r.block.prefix.is_empty() && r.block.cycle.len() == 1).then(|| &r.block.cycle[0]))
            .chain(self.rest.iter().map(Some));
        let first = it.next()??;
        it.all(|c| c == Some(first)).then_some(first)
    }

    /// Drops the first component.
    pub fn tail(&self) -> Tail {
        if self.runs.is_empty() {
            if self.rest.len() == 1 {
                return Tail::Set(self.rest[0].clone());
            }
            return Tail::Skand(Skand::from_layout(Ordinal::nat(self.rest.len() as u64 - 1), vec![], self.rest[1..].to_vec()));
        }
        let mut runs = self.runs.clone();
        let first = runs.remove(0);
        let one = Ordinal::one();
        if first.end > one {
            runs.insert(0, Run { start: one.clone(), end: first.end.clone(), block: first.block.clone() });
        }
        runs.insert(0, Run { start: Ordinal::zero(), end: one, block: first.block.drop_first() });
        Tail::Skand(Skand::from_layout(self.length.clone(), runs, self.rest.clone()))
    }

    fn map(&self, f: impl Fn(&Component) -> Component) -> Skand {
        let runs = self.runs.iter().map(|r| Run { start: r.start.clone(), end: r.end.clone(), block: r.block.map(&f) }).collect();
        Skand::from_layout(self.length.clone(), runs, self.rest.iter().map(&f).collect())
    }

    fn zip_with(&self, other: &Skand, f: impl Fn(&Component, &Component) -> Component) -> Result<Skand, SkandError> {
        if self.length != other.length {
            return Err(SkandError::LengthMismatch(self.length.to_string(), other.length.to_string()));
        }
        let mut runs = Vec::new();
        let (mut i, mut j) = (0, 0);
        let mut at = Ordinal::zero();
        while i < self.runs.len() && j < other.runs.len() {
            let (a, b) = (&self.runs[i], &other.runs[j]);
            let end = a.end.clone().min(b.end.clone());
            let (x, y) = (&a.block, &b.block);
            let p = x.prefix.len().max(y.prefix.len());
            let n = x.cycle.len().lcm(&y.cycle.len());
            if n > MAX_CELLS {
                return Err(SkandError::TooLarge(format!("combined period {n}")));
            }
            let block = Block {
                prefix: (0..p).map(|k| f(x.at(k), y.at(k))).collect(),
                cycle: (p..p + n).map(|k| f(x.at(k), y.at(k))).collect(),
            };
            runs.push(Run { start: at, end: end.clone(), block });
            if a.end == end {
                i += 1;
            }
            if b.end == end {
                j += 1;
            }
            at = end;
        }
        let rest = self.rest.iter().zip(&other.rest).map(|(a, b)| f(a, b)).collect();
        Ok(Skand::from_layout(self.length.clone(), runs, rest))
    }
}

pub fn skand_equal(x: &Skand, y: &Skand) -> bool {
    x == y
}

pub fn tail(x: &Skand) -> Tail {
    x.tail()
}

/// Equal to all of its tails: indecomposable length and one repeated set.
pub fn is_self_similar(x: &Skand) -> bool {
    is_additively_indecomposable(&x.length).unwrap_or(false) && x.constant_value().is_some()
}

/// Elements of the skand read as a set: the first component's elements
/// together with the tail.
pub fn set_view(x: &Skand) -> BTreeSet<SetValue> {
    let mut out: BTreeSet<SetValue> = x.component(&Ordinal::zero()).expect("length is positive").iter().map(SetValue::identified).collect();
    if let Tail::Skand(t) = x.tail() {
        out.insert(SetValue::skand(t).identified());
    }
    out
}

pub fn member(v: &SetValue, x: &Skand) -> bool {
    set_view(x).contains(&v.identified())
}

pub fn is_reflexive(x: &Skand) -> bool {
    member(&SetValue::skand(x.clone()), x)
}

/// Least `n <= bound` whose `n`-fold tail gives back `x`.
pub fn circular_period(x: &Skand, bound: u64) -> Option<u64> {
    let mut cur = x.clone();
    for n in 1..=bound {
        cur = match cur.tail() {
            Tail::Skand(s) => s,
            Tail::Set(_) => return None,
        };
        if cur == *x {
            return Some(n);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

pub fn skand_setop(op: SetOp, x: &Skand, y: &Skand) -> Result<Skand, SkandError> {
    x.zip_with(y, |a, b| match op {
        SetOp::Union => a.union(b).cloned().collect(),
        SetOp::Intersection => a.intersection(b).cloned().collect(),
        SetOp::Difference => a.difference(b).cloned().collect(),
    })
}

/// Componentwise power set.
pub fn power_skand(x: &Skand) -> Result<Skand, SkandError> {
    let too_big = x.pieces().iter().flat_map(|p| p.content.pattern().to_vec()).any(|c| c.len() > MAX_POWERSET_BASE);
    if too_big {
        return Err(SkandError::TooLarge(format!("power set of a component with more than {MAX_POWERSET_BASE} elements")));
    }
    Ok(x.map(|c| {
        let items: Vec<&SetValue> = c.iter().collect();
        (0u32..1 << items.len())
            .map(|mask| SetValue::FinSet(items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| (*v).clone()).collect()))
            .collect()
    }))
}

/// The skand whose every component is `{x}`.
pub fn singleton_skand(x: &Skand) -> Result<Skand, SkandError> {
    if !is_self_similar(x) || x.length.is_finite() {
        return Err(SkandError::NotSelfSimilar);
    }
    Skand::constant(x.length.clone(), BTreeSet::from([SetValue::skand(x.clone())]))
}

/// Largest `n` accepted by [`ordinal_skand`].
pub const MAX_ORDINAL_SKAND: u64 = 6;

/// `e^(n)` of length `w^k`: constant with component `{e^(1), ..., e^(n-1)}`.
pub fn ordinal_skand(n: u64, k: u64) -> Result<Skand, SkandError> {
    if n == 0 || k == 0 {
        return Err(SkandError::InvalidPieces("e^(n) needs n >= 1 and k >= 1".into()));
    }
    if n > MAX_ORDINAL_SKAND {
        return Err(SkandError::TooLarge(format!("e^({n}); the bound is {MAX_ORDINAL_SKAND}")));
    }
    let length = Ordinal::omega_pow(Ordinal::nat(k));
    let mut built: Vec<Skand> = Vec::new();
    for _ in 0..n {
        let c = built.iter().cloned().map(SetValue::skand).collect();
        built.push(Skand::constant(length.clone(), c)?);
    }
    Ok(built.pop().expect("n >= 1"))
}

/// Nesting depth of skands: 1 plus the deepest skand inside a component.
pub fn rank(x: &Skand) -> usize {
    let inner = x.pieces().iter().flat_map(|p| p.content.pattern().iter().flatten().map(SetValue::rank).collect::<Vec<_>>()).max();
    1 + inner.unwrap_or(0)
}

fn fmt_set(c: &Component, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, v) in c.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "}}")
}

fn fmt_pattern(p: &[Component], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "[")?;
    for (i, c) in p.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        fmt_set(c, f)?;
    }
    write!(f, "]")
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetValue::Atom(a) => write!(f, "{a}"),
            SetValue::FinSet(s) => fmt_set(s, f),
            SetValue::SkandRef(s) => write!(f, "{s}"),
        }
    }
}

/// Renders as a constructor call the CLI reads back.
impl fmt::Display for Skand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces = self.pieces();
        write!(f, "skand(len={}, ", self.length)?;
        match pieces.as_slice() {
            [Piece { content: PieceContent::Constant(c), .. }] => {
                write!(f, "const=")?;
                fmt_set(c, f)?;
            }
            [Piece { content: PieceContent::Periodic(p), .. }] => {
                write!(f, "period=")?;
                fmt_pattern(p, f)?;
            }
            _ => {
                write!(f, "pieces=[")?;
                for (i, p) in pieces.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "({}, {}, ", p.lo, p.hi)?;
                    match &p.content {
                        PieceContent::Constant(c) => fmt_set(c, f)?,
                        PieceContent::Periodic(pat) => fmt_pattern(pat, f)?,
                    }
                    write!(f, ")")?;
                }
                write!(f, "]")?;
            }
        }
        write!(f, ")")
    }
}
