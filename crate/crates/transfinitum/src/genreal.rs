//! Binary fractions of transfinite length.
//!
//! In a universe `alpha = w*nu` a fraction is a 0/1 sequence indexed by
//! positions `p < alpha`, ordered lexicographically, where the digit at `p`
//! stands for `1/2^(p+1)`. Values are stored as sorted half-open runs of
//! ones. A run of ones `[s, alpha)` with `s` a successor has a twin that
//! ends in a single one at `s - 1`; the canonical form always uses the
//! latter.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::ordinal::{div_by_omega, natural_sum, ord_add, ord_sub_left, Ordinal, MAX_FINITE_POWER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("universe must be a limit ordinal w*nu with nu >= 1, got {0}")]
    InvalidUniverse(String),
    #[error("position {0} lies outside the universe {1}")]
    OutOfUniverse(String, String),
    #[error("universes differ: {0} vs {1}")]
    UniverseMismatch(String, String),
    #[error("no magnitude: {0}")]
    UndefinedSum(String),
    #[error("not subtractable: no spelling of the minuend dominates the subtrahend digitwise")]
    NotSubtractable,
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("intervals are not nested: {0}")]
    NotNested(String),
    #[error("expected a strictly smaller first argument")]
    NotLess,
    #[error("interval length is not a single dyadic fraction")]
    NotDyadicLength,
    #[error("endpoint values have the same sign")]
    SameSign,
    #[error("empty set has no bounds")]
    EmptySet,
    #[error("result needs infinitely many runs: {0}")]
    Unrepresentable(String),
    #[error("{0}")]
    Domain(String),
}

/// The index range `[0, alpha)` of the digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Universe {
    alpha: Ordinal,
}

impl Universe {
    pub fn new(alpha: Ordinal) -> Result<Universe, GenError> {
        if !alpha.is_limit() {
            return Err(GenError::InvalidUniverse(alpha.to_string()));
        }
        Ok(Universe { alpha })
    }

    pub fn alpha(&self) -> &Ordinal {
        &self.alpha
    }
}

type Span = (Ordinal, Ordinal);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenFraction {
    universe: Universe,
    runs: Vec<Span>,
}

fn covered(runs: &[Span], p: &Ordinal) -> bool {
    let i = runs.partition_point(|(a, _)| a <= p);
    i > 0 && *p < runs[i - 1].1
}

fn push_span(out: &mut Vec<Span>, lo: Ordinal, hi: Ordinal) {
    if lo >= hi {
        return;
    }
    if let Some(last) = out.last_mut() {
        if last.1 >= lo {
            if hi > last.1 {
                last.1 = hi;
            }
            return;
        }
    }
    out.push((lo, hi));
}

/// Runs where `f(digit in a, digit in b)` holds.
fn sweep(a: &[Span], b: &[Span], f: impl Fn(bool, bool) -> bool) -> Vec<Span> {
    let mut pts: Vec<Ordinal> = a.iter().chain(b).flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
    pts.push(Ordinal::zero());
    pts.sort();
    pts.dedup();
    let mut out = Vec::new();
    for w in pts.windows(2) {
        if f(covered(a, &w[0]), covered(b, &w[0])) {
            push_span(&mut out, w[0].clone(), w[1].clone());
        }
    }
    out
}

/// Start of the block holding `p`: the largest limit (or zero) `<= p`.
fn block_start(p: &Ordinal) -> Ordinal {
    p.limit_part()
}

fn next_limit(p: &Ordinal) -> Ordinal {
    ord_add(&block_start(p), &Ordinal::omega())
}

/// Natural difference: `beta = result (+) gamma`, if any.
fn natural_difference(beta: &Ordinal, gamma: &Ordinal) -> Option<Ordinal> {
    let mut terms = beta.terms().into_owned();
    for g in gamma.terms().iter() {
        let i = terms.iter().position(|t| t.exp() == g.exp())?;
        if terms[i].coef() < g.coef() {
            return None;
        }
        let rest = terms[i].coef() - g.coef();
        if rest == 0u32.into() {
            terms.remove(i);
        } else {
            terms[i] = crate::ordinal::Term::new(g.exp().clone(), rest);
        }
    }
    Some(Ordinal::from_terms(terms))
}

impl GenFraction {
    /// Normalizes arbitrary runs of ones into canonical form.
    pub fn canonicalize(mut raw: Vec<Span>, universe: &Universe) -> Result<GenFraction, GenError> {
        let alpha = &universe.alpha;
        if let Some((_, hi)) = raw.iter().find(|(_, hi)| hi > alpha) {
            return Err(GenError::OutOfUniverse(hi.to_string(), alpha.to_string()));
        }
        raw.sort();
        let mut runs = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            push_span(&mut runs, lo, hi);
        }
        // a trailing run of ones from a successor s equals one digit at s-1
        if let Some((lo, hi)) = runs.last().cloned() {
            if hi == *alpha && lo.is_successor() {
                runs.pop();
                let p = lo.pred().expect("successor");
                push_span(&mut runs, p, lo);
            }
        }
        Ok(GenFraction { universe: universe.clone(), runs })
    }

    pub fn zero(universe: &Universe) -> GenFraction {
        GenFraction { universe: universe.clone(), runs: vec![] }
    }

    pub fn one(universe: &Universe) -> GenFraction {
        GenFraction { universe: universe.clone(), runs: vec![(Ordinal::zero(), universe.alpha.clone())] }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn runs(&self) -> &[Span] {
        &self.runs
    }

    pub fn is_zero(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn digit(&self, p: &Ordinal) -> bool {
        covered(&self.runs, p)
    }

    /// `a` when the value is exactly `1/2^a`.
    pub fn as_dyadic(&self) -> Option<Ordinal> {
        match self.runs.as_slice() {
            [(lo, hi)] if *hi == self.universe.alpha => Some(lo.clone()),
            [(lo, hi)] if *hi == lo.succ() => Some(hi.clone()),
            _ => None,
        }
    }

    fn same_universe(&self, other: &GenFraction) -> Result<(), GenError> {
        if self.universe != other.universe {
            return Err(GenError::UniverseMismatch(self.universe.alpha.to_string(), other.universe.alpha.to_string()));
        }
        Ok(())
    }

    fn with_runs(&self, runs: Vec<Span>) -> GenFraction {
        GenFraction::canonicalize(runs, &self.universe).expect("runs stay inside the universe")
    }

    /// The other spelling of a value ending in a single one at a successor
    /// position: that one replaced by ones everywhere after it.
    fn twin_runs(&self) -> Option<Vec<Span>> {
        let (lo, hi) = self.runs.last()?;
        let p = hi.pred()?;
        let mut runs = self.runs[..self.runs.len() - 1].to_vec();
        push_span(&mut runs, lo.clone(), p);
        runs.push((hi.clone(), self.universe.alpha.clone()));
        Some(runs)
    }
}

/// Lexicographic comparison by first differing digit.
pub fn compare(x: &GenFraction, y: &GenFraction) -> Result<Ordering, GenError> {
    x.same_universe(y)?;
    let diff = sweep(&x.runs, &y.runs, |a, b| a != b);
    Ok(match diff.first() {
        None => Ordering::Equal,
        Some((p, _)) if x.digit(p) => Ordering::Greater,
        Some(_) => Ordering::Less,
    })
}

/// `1/2^a`.
pub fn dyadic(a: &Ordinal, universe: &Universe) -> Result<GenFraction, GenError> {
    let alpha = &universe.alpha;
    if a >= alpha {
        return Err(GenError::OutOfUniverse(a.to_string(), alpha.to_string()));
    }
    let runs = match a.pred() {
        Some(p) => vec![(p, a.clone())],
        None => vec![(a.clone(), alpha.clone())],
    };
    GenFraction::canonicalize(runs, universe)
}

pub fn subtract(y: &GenFraction, x: &GenFraction) -> Result<GenFraction, GenError> {
    y.same_universe(x)?;
    let attempt = |minuend: &[Span]| {
        sweep(&x.runs, minuend, |a, b| a && !b)
            .is_empty()
            .then(|| sweep(minuend, &x.runs, |a, b| a && !b))
    };
    if let Some(d) = attempt(&y.runs) {
        return Ok(y.with_runs(d));
    }
    if let Some(d) = y.twin_runs().and_then(|t| attempt(&t)) {
        return Ok(y.with_runs(d));
    }
    Err(GenError::NotSubtractable)
}

/// Digitwise sum with carries toward smaller positions.
///
/// A carry leaves position `p` for `p - 1`. A carry out of a limit
/// position `l` is the summand `1/2^l`, a tail of ones from `l`; it is
/// only representable when nothing else is left at or above `l`. A carry
/// out of position 0 is likewise only allowed when the sum is exactly 1.
pub fn add(x: &GenFraction, y: &GenFraction) -> Result<GenFraction, GenError> {
    x.same_universe(y)?;
    let alpha = x.universe.alpha.clone();
    let mut pts: Vec<Ordinal> = vec![Ordinal::zero(), alpha.clone()];
    for p in x.runs.iter().chain(&y.runs).flat_map(|(a, b)| [a, b]) {
        // split so that each piece with a successor top stays in one block
        pts.push(p.clone());
        pts.push(next_limit(p).min(alpha.clone()));
        if let Some(q) = p.pred() {
            pts.push(block_start(&q));
        }
    }
    pts.sort();
    pts.dedup();

    let blocked = |p: &Ordinal| GenError::UndefinedSum(format!("carry at limit position {p}"));
    // digits collected so far, all at or above the current position
    let mut out: Vec<Span> = Vec::new();
    let mut carry = false;
    let mut overflow = false;
    for w in pts.windows(2).rev() {
        let (a, b) = (&w[0], &w[1]);
        let s = x.digit(a) as u8 + y.digit(a) as u8;
        let top = b.pred();
        let carry_out = match (s, carry) {
            (0, false) => false,
            (0, true) => {
                let t = top.expect("carries only arrive at successor tops");
                out.push((t, b.clone()));
                false
            }
            (1, false) => {
                out.push((a.clone(), b.clone()));
                false
            }
            // the carry ripples down through the ones of this piece
            (1, true) => true,
            (_, c) => {
                if next_limit(a) < *b {
                    return Err(blocked(&next_limit(a)));
                }
                match top {
                    Some(t) => {
                        out.push((a.clone(), t.clone()));
                        if c {
                            out.push((t, b.clone()));
                        }
                    }
                    None => out.push((a.clone(), b.clone())),
                }
                true
            }
        };
        carry = false;
        if !carry_out {
            continue;
        }
        if a.is_zero() {
            overflow = true;
        } else if a.is_limit() {
            if out.iter().any(|(l, h)| l < h) {
                return Err(blocked(a));
            }
            out.push((a.clone(), alpha.clone()));
        } else {
            carry = true;
        }
    }
    out.reverse();
    let out: Vec<Span> = out.into_iter().filter(|(a, b)| a < b).collect();
    if overflow {
        if !out.is_empty() {
            return Err(GenError::UndefinedSum("sum exceeds 1".into()));
        }
        return Ok(GenFraction::one(&x.universe));
    }
    GenFraction::canonicalize(out, &x.universe)
}

/// `1/2^a * 1/2^b = 1/2^(a (+) b)`.
pub fn mul_dyadic(a: &Ordinal, b: &Ordinal, universe: &Universe) -> Result<GenFraction, GenError> {
    dyadic(&natural_sum(a, b), universe)
}

/// Multiplies by `2^g`, dividing every summand `1/2^(b' (+) g)` down to
/// `1/2^b'`.
pub fn mul_by_pow2(x: &GenFraction, g: &Ordinal) -> Result<GenFraction, GenError> {
    let u = &x.universe;
    let alpha = &u.alpha;
    let (g_lim, m) = (g.limit_part(), g.finite_part());
    let m: u64 = num_traits::ToPrimitive::to_u64(&m).ok_or_else(|| GenError::NotDivisible(format!("factor 2^{g} too large")))?;
    let no = |what: &Ordinal| GenError::NotDivisible(format!("1/2^{what} is not a multiple of 1/2^{g}"));
    let mut acc = GenFraction::zero(u);
    let mut absorb = |part: GenFraction| -> Result<(), GenError> {
        acc = add(&acc, &part)?;
        Ok(())
    };
    for (lo, hi) in &x.runs {
        if hi == alpha && !lo.is_successor() {
            // a tail of ones from a limit (or 0) is the single summand 1/2^lo
            let e = natural_difference(lo, g).ok_or_else(|| no(lo))?;
            absorb(dyadic(&e, u)?)?;
            continue;
        }
        for (s, e) in block_segments(lo, hi)? {
            // digits lam+i for i in [j, k) are summands 1/2^(lam+i+1)
            let lam = block_start(&s);
            let j = s.finite_part();
            let j: u64 = num_traits::ToPrimitive::to_u64(&j).expect("offset fits");
            let lam2 = natural_difference(&lam, &g_lim).ok_or_else(|| no(&s.succ()))?;
            if j + 1 < m {
                return Err(no(&s.succ()));
            }
            let from = j + 1 - m;
            let k_end = if e.is_limit() { None } else { Some(num_traits::ToPrimitive::to_u64(&e.finite_part()).expect("offset fits") - m) };
            let mut first = from;
            if from == 0 {
                absorb(dyadic(&lam2, u)?)?;
                first = 1;
            }
            let lo2 = ord_add(&lam2, &Ordinal::nat(first - 1));
            let hi2 = match k_end {
                Some(k) => ord_add(&lam2, &Ordinal::nat(k)),
                None => ord_add(&lam2, &Ordinal::omega()),
            };
            if lo2 < hi2 {
                absorb(GenFraction::canonicalize(vec![(lo2, hi2)], u)?)?;
            }
        }
    }
    Ok(acc)
}

/// Half of `x`: every summand `1/2^b` becomes `1/2^(b+1)`.
///
/// Digits move one place right, so a run crossing a limit position leaves
/// a zero there. Fails only when that would need infinitely many gaps.
pub fn halve(x: &GenFraction) -> Result<GenFraction, GenError> {
    let alpha = &x.universe.alpha;
    let mut runs = Vec::new();
    for (a, b) in &x.runs {
        if b == alpha {
            // a tail from a limit (or 0) is the summand 1/2^a
            runs.push((a.clone(), a.succ()));
            continue;
        }
        for (s, e) in block_segments(a, b)? {
            let e = if e.is_limit() { e } else { e.succ() };
            runs.push((s.succ(), e));
        }
    }
    Ok(x.with_runs(runs))
}

/// Splits `[lo, hi)` into pieces that each stay inside one w-block.
fn block_segments(lo: &Ordinal, hi: &Ordinal) -> Result<Vec<Span>, GenError> {
    let first_end = next_limit(lo).min(hi.clone());
    let mut segments = vec![(lo.clone(), first_end.clone())];
    if first_end < *hi {
        let (xs, _) = div_by_omega(&first_end);
        let (xe, _) = div_by_omega(&block_start(hi));
        let count = ord_sub_left(&xs, &xe)
            .expect("ascending blocks")
            .to_u64()
            .filter(|&c| c <= MAX_FINITE_POWER)
            .ok_or_else(|| GenError::Unrepresentable(format!("run [{lo}, {hi}) spans too many blocks")))?;
        let mut at = first_end;
        for _ in 0..count {
            let nxt = ord_add(&at, &Ordinal::omega());
            segments.push((at, nxt.clone()));
            at = nxt;
        }
        if at < *hi {
            segments.push((at, hi.clone()));
        }
    }
    Ok(segments)
}

/// Ones on `[a-1, a+w)`: the sum of `1/2^b` over `a <= b < a + w`.
pub fn block_sum(a: &Ordinal, universe: &Universe) -> Result<GenFraction, GenError> {
    let p = a
        .pred()
        .ok_or_else(|| GenError::UndefinedSum(format!("block sum from {a} needs a predecessor")))?;
    let end = ord_add(a, &Ordinal::omega());
    if end > universe.alpha {
        return Err(GenError::OutOfUniverse(end.to_string(), universe.alpha.to_string()));
    }
    GenFraction::canonicalize(vec![(p, end)], universe)
}

/// Two values strictly between `x < y` whose distance
/// is the returned dyadic `1/2^a`.
pub fn between(x: &GenFraction, y: &GenFraction) -> Result<(GenFraction, GenFraction, Ordinal), GenError> {
    if compare(x, y)? != Ordering::Less {
        return Err(GenError::NotLess);
    }
    let diff = sweep(&x.runs, &y.runs, |a, b| a != b);
    let first = diff[0].0.clone();
    // first zero of x after the first difference
    let after = first.succ();
    let zero_at = match x.runs.iter().find(|(a, b)| *a <= after && after < *b) {
        Some((_, b)) => b.clone(),
        None => after,
    };
    let mut xr: Vec<Span> = Vec::new();
    for (a, b) in &x.runs {
        if *a < zero_at {
            push_span(&mut xr, a.clone(), b.clone().min(zero_at.clone()));
        }
    }
    push_span(&mut xr, zero_at.clone(), zero_at.succ());
    let x2 = x.with_runs(xr.clone());
    let mut yr = xr;
    let next = zero_at.succ();
    push_span(&mut yr, next.clone(), next.succ());
    let y2 = x.with_runs(yr);
    Ok((x2, y2, next.succ()))
}

/// Zero-extension into a longer universe.
pub fn embed(x: &GenFraction, target: &Universe) -> Result<GenFraction, GenError> {
    if target.alpha < x.universe.alpha {
        return Err(GenError::Domain(format!("cannot embed into the shorter universe {}", target.alpha)));
    }
    GenFraction::canonicalize(x.runs.clone(), target)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Sup,
    Inf,
}

pub fn sup_inf_finite(set: &[GenFraction], which: Bound) -> Result<GenFraction, GenError> {
    let (first, rest) = set.split_first().ok_or(GenError::EmptySet)?;
    let mut best = first;
    for v in rest {
        let o = compare(v, best)?;
        if (which == Bound::Sup && o == Ordering::Greater) || (which == Bound::Inf && o == Ordering::Less) {
            best = v;
        }
    }
    Ok(best.clone())
}

/// Supremum and infimum of `{1/2^b : a <= b < c}`.
pub fn dyadic_family_bounds(a: &Ordinal, c: &Ordinal, universe: &Universe) -> Result<(GenFraction, GenFraction), GenError> {
    if a >= c || *c > universe.alpha {
        return Err(GenError::Domain(format!("need {a} < {c} <= {}", universe.alpha)));
    }
    let sup = dyadic(a, universe)?;
    let inf = if *c == universe.alpha {
        GenFraction::zero(universe)
    } else if let Some(p) = c.pred() {
        // the family has a least member
        dyadic(&p, universe)?
    } else {
        dyadic(c, universe)?
    };
    Ok((sup, inf))
}

/// A closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenInterval {
    lo: GenFraction,
    hi: GenFraction,
}

impl GenInterval {
    pub fn new(lo: GenFraction, hi: GenFraction) -> Result<GenInterval, GenError> {
        if compare(&lo, &hi)? == Ordering::Greater {
            return Err(GenError::Domain("interval endpoints out of order".into()));
        }
        Ok(GenInterval { lo, hi })
    }

    pub fn lo(&self) -> &GenFraction {
        &self.lo
    }

    pub fn hi(&self) -> &GenFraction {
        &self.hi
    }

    pub fn length(&self) -> Result<GenFraction, GenError> {
        subtract(&self.hi, &self.lo)
    }

    pub fn contains(&self, x: &GenFraction) -> Result<bool, GenError> {
        Ok(compare(&self.lo, x)? != Ordering::Greater && compare(x, &self.hi)? != Ordering::Greater)
    }
}

/// Splits an interval of length `1/2^a` at its midpoint.
pub fn interval_halve(i: &GenInterval) -> Result<(GenInterval, GenInterval), GenError> {
    let a = i.length()?.as_dyadic().ok_or(GenError::NotDyadicLength)?;
    let h = dyadic(&a.succ(), i.lo.universe())?;
    let mid = add(&i.lo, &h).or_else(|_| subtract(&i.hi, &h))?;
    Ok((GenInterval { lo: i.lo.clone(), hi: mid.clone() }, GenInterval { lo: mid, hi: i.hi.clone() }))
}

fn short_enough(i: &GenInterval, budget: u64) -> Result<bool, GenError> {
    let bound = dyadic(&Ordinal::nat(budget), i.lo.universe())?;
    Ok(match i.length() {
        Ok(len) => compare(&len, &bound)? != Ordering::Greater,
        Err(_) => false,
    })
}

/// Follows a nested sequence of intervals until one is no longer than
/// `1/2^budget` or the sequence ends.
pub fn nested_intersect(intervals: impl IntoIterator<Item = GenInterval>, budget: u64) -> Result<GenInterval, GenError> {
    let mut it = intervals.into_iter();
    let mut cur = it.next().ok_or(GenError::EmptySet)?;
    while !short_enough(&cur, budget)? {
        let Some(next) = it.next() else { break };
        let inside = compare(&cur.lo, &next.lo)? != Ordering::Greater && compare(&next.hi, &cur.hi)? != Ordering::Greater;
        if !inside {
            return Err(GenError::NotNested(format!("[{}, {}] is not inside [{}, {}]", next.lo, next.hi, cur.lo, cur.hi)));
        }
        cur = next;
    }
    Ok(cur)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

/// Bisection: keeps the half whose endpoints' signs differ until the
/// bracket is no longer than `1/2^budget`.
pub fn dichotomy_root(f: impl Fn(&GenFraction) -> Sign, i: &GenInterval, budget: u64) -> Result<GenInterval, GenError> {
    let (sl, sh) = (f(&i.lo), f(&i.hi));
    if sl == Sign::Zero {
        return Ok(GenInterval { lo: i.lo.clone(), hi: i.lo.clone() });
    }
    if sh == Sign::Zero {
        return Ok(GenInterval { lo: i.hi.clone(), hi: i.hi.clone() });
    }
    if sl == sh {
        return Err(GenError::SameSign);
    }
    let mut cur = i.clone();
    while !short_enough(&cur, budget)? {
        let (left, right) = interval_halve(&cur)?;
        cur = if f(&left.hi) == sl { right } else { left };
    }
    Ok(cur)
}

/// Whether `1/2^a` survives `b` Cantor derivatives of the dyadic family:
/// every exponent in the normal form of `a` is at least `b`.
pub fn in_derivative_stage(a: &Ordinal, b: &Ordinal) -> bool {
    !a.is_zero() && a.terms().iter().all(|t| t.exp() >= b)
}

/// A signed value with an ordinal integer part and a fraction part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenNumber {
    sign: Sign,
    integer: Ordinal,
    fraction: GenFraction,
}

impl GenNumber {
    pub fn new(sign: Sign, integer: Ordinal, fraction: GenFraction) -> Result<GenNumber, GenError> {
        let nil = integer.is_zero() && fraction.is_zero();
        if nil != (sign == Sign::Zero) {
            return Err(GenError::Domain("sign must be 0 exactly for the zero value".into()));
        }
        Ok(GenNumber { sign, integer, fraction })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn integer(&self) -> &Ordinal {
        &self.integer
    }

    pub fn fraction(&self) -> &GenFraction {
        &self.fraction
    }

    /// Base-2 digits of the integer part.
    pub fn integer_digits(&self) -> Vec<(Ordinal, u64)> {
        crate::ordinal::base_expand(&self.integer, 2).expect("base 2")
    }

    pub fn negate(&self) -> GenNumber {
        let sign = match self.sign {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        };
        GenNumber { sign, ..self.clone() }
    }

    pub fn compare(&self, other: &GenNumber) -> Result<Ordering, GenError> {
        if self.sign != other.sign {
            return Ok(self.sign.cmp(&other.sign));
        }
        let mag = self.integer.cmp(&other.integer).then(compare(&self.fraction, &other.fraction)?);
        Ok(if self.sign == Sign::Neg { mag.reverse() } else { mag })
    }
}

impl fmt::Display for GenFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "frac(alpha={}; runs=[", self.universe.alpha)?;
        for (i, (a, b)) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{a}, {b})")?;
        }
        write!(f, "])")
    }
}

impl fmt::Display for GenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "interval({}, {})", self.lo, self.hi)
    }
}

impl fmt::Display for GenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Neg => "-",
            Sign::Zero => "",
            Sign::Pos => "+",
        };
        write!(f, "{s}({} ; {})", self.integer, self.fraction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn u(s: &str) -> Universe {
        Universe::new(o(s)).unwrap()
    }

    fn runs(v: &[(&str, &str)]) -> Vec<Span> {
        v.iter().map(|(a, b)| (o(a), o(b))).collect()
    }

    fn fr(v: &[(&str, &str)], alpha: &str) -> GenFraction {
        GenFraction::canonicalize(runs(v), &u(alpha)).unwrap()
    }

    fn d(a: &str, alpha: &str) -> GenFraction {
        dyadic(&o(a), &u(alpha)).unwrap()
    }

    #[test]
    fn twins_canonicalize() {
        assert_eq!(fr(&[("1", "w*2")], "w*2").runs(), runs(&[("0", "1")]).as_slice());
        assert_eq!(fr(&[("w", "w*2")], "w*2").runs(), runs(&[("w", "w*2")]).as_slice());
        assert!(fr(&[], "w*2").is_zero());
        assert_eq!(fr(&[("0", "3"), ("3", "5"), ("w+1", "w*2")], "w*2").runs(), runs(&[("0", "5"), ("w", "w+1")]).as_slice());
        assert!(GenFraction::canonicalize(runs(&[("0", "w*3")]), &u("w*2")).is_err());
        assert!(Universe::new(o("w+1")).is_err());
        assert!(Universe::new(Ordinal::zero()).is_err());
    }

    #[test]
    fn ordering() {
        let a = "w*2";
        assert_eq!(compare(&d("1", a), &d("2", a)).unwrap(), Ordering::Greater);
        for n in 1..8 {
            assert_eq!(compare(&d("w", a), &d(&n.to_string(), a)).unwrap(), Ordering::Less);
        }
        let half = fr(&[("1", "w*2")], a);
        assert_eq!(compare(&half, &d("1", a)).unwrap(), Ordering::Equal);
        assert!(compare(&d("1", a), &d("1", "w*3")).is_err());
    }

    #[test]
    fn dyadics() {
        assert_eq!(d("1", "w*2").runs(), runs(&[("0", "1")]).as_slice());
        assert_eq!(d("w", "w*2").runs(), runs(&[("w", "w*2")]).as_slice());
        assert_eq!(d("0", "w*2"), GenFraction::one(&u("w*2")));
        assert!(dyadic(&o("w*2"), &u("w*2")).is_err());
        assert_eq!(d("w+3", "w*2").as_dyadic(), Some(o("w+3")));
        assert_eq!(d("w", "w*2").as_dyadic(), Some(o("w")));
        assert_eq!(d("0", "w*2").as_dyadic(), Some(o("0")));
    }

    #[test]
    fn subtraction() {
        let a = "w*3";
        assert_eq!(subtract(&d("w", a), &d("w*2", a)).unwrap().runs(), runs(&[("w", "w*2")]).as_slice());
        assert!(subtract(&d("5", a), &d("5", a)).unwrap().is_zero());
        assert_eq!(subtract(&GenFraction::one(&u(a)), &d("1", a)).unwrap(), d("1", a));
        // 1/8 - 1/32 = 1/16 + 1/32
        assert_eq!(subtract(&d("3", a), &d("5", a)).unwrap().runs(), runs(&[("3", "5")]).as_slice());
        // successor minus limit
        assert_eq!(subtract(&d("3", a), &d("w", a)).unwrap().runs(), runs(&[("3", "w")]).as_slice());
        assert_eq!(subtract(&d("w", a), &d("1", a)), Err(GenError::NotSubtractable));
    }

    #[test]
    fn addition() {
        let a = "w*2";
        assert_eq!(add(&d("2", a), &d("2", a)).unwrap(), d("1", a));
        assert!(matches!(add(&d("w", a), &d("w", a)), Err(GenError::UndefinedSum(_))));
        assert_eq!(add(&d("1", a), &d("w", a)).unwrap().runs(), runs(&[("0", "1"), ("w", "w*2")]).as_slice());
        assert_eq!(add(&d("1", a), &d("1", a)).unwrap(), GenFraction::one(&u(a)));
        assert!(matches!(add(&GenFraction::one(&u(a)), &d("3", a)), Err(GenError::UndefinedSum(_))));
        // a carry out of a limit position is the tail from there
        let x = fr(&[("w", "w+3")], a);
        assert_eq!(add(&x, &d("w+3", a)).unwrap(), d("w", a));
        assert_eq!(add(&d("w+1", a), &d("w+1", a)).unwrap(), d("w", a));
        assert!(matches!(add(&fr(&[("w", "w+2")], a), &d("w+1", a)), Err(GenError::UndefinedSum(_))));
        // ones from 3 to just past w, plus the last of them: the twin of 1/8
        assert_eq!(add(&fr(&[("3", "w+2")], a), &d("w+2", a)).unwrap(), d("3", a));
        // but one that stops inside the block is fine
        let x = fr(&[("w+1", "w+3")], a);
        assert_eq!(add(&x, &d("w+3", a)).unwrap(), d("w+1", a));
        // infinitely many ones in a block, doubled
        let x = fr(&[("1", "w")], a);
        assert_eq!(add(&x, &x).unwrap().runs(), runs(&[("0", "w")]).as_slice());
    }

    #[test]
    fn products_by_powers_of_two() {
        let un = u("w*3");
        assert_eq!(mul_dyadic(&o("w"), &o("w"), &un).unwrap(), dyadic(&o("w*2"), &un).unwrap());
        assert_eq!(mul_by_pow2(&dyadic(&o("w"), &un).unwrap(), &o("w")).unwrap(), GenFraction::one(&un));
        assert_eq!(mul_by_pow2(&dyadic(&o("w+1"), &un).unwrap(), &o("1")).unwrap(), dyadic(&o("w"), &un).unwrap());
        assert_eq!(mul_by_pow2(&dyadic(&o("3"), &un).unwrap(), &o("2")).unwrap(), dyadic(&o("1"), &un).unwrap());
        assert!(matches!(mul_by_pow2(&dyadic(&o("w"), &un).unwrap(), &o("1")), Err(GenError::NotDivisible(_))));
        assert!(matches!(mul_by_pow2(&dyadic(&o("2"), &un).unwrap(), &o("w")), Err(GenError::NotDivisible(_))));
        // a finite block of ones shifts as a whole
        let x = GenFraction::canonicalize(runs(&[("w+2", "w+5")]), &un).unwrap();
        assert_eq!(mul_by_pow2(&x, &o("w+1")).unwrap().runs(), runs(&[("1", "4")]).as_slice());
    }

    #[test]
    fn halving() {
        let a = "w*2";
        assert_eq!(halve(&GenFraction::one(&u(a))).unwrap(), d("1", a));
        assert_eq!(halve(&d("w", a)).unwrap(), d("w+1", a));
        assert_eq!(halve(&d("1", a)).unwrap(), d("2", a));
        let x = fr(&[("0", "w")], a);
        assert_eq!(halve(&x).unwrap().runs(), runs(&[("1", "w")]).as_slice());
        let x = fr(&[("3", "w+2")], a);
        let h = halve(&x).unwrap();
        assert_eq!(h.runs(), runs(&[("4", "w"), ("w+1", "w+3")]).as_slice());
        assert_eq!(add(&h, &h).unwrap(), x);
        let wide = GenFraction::canonicalize(runs(&[("0", "w^2")]), &u("w^2*2")).unwrap();
        assert!(matches!(halve(&wide), Err(GenError::Unrepresentable(_))));
    }

    #[test]
    fn block_sums() {
        let un = u("w*2");
        let one = GenFraction::one(&un);
        assert_eq!(block_sum(&o("1"), &un).unwrap(), subtract(&one, &dyadic(&o("w"), &un).unwrap()).unwrap());
        let un3 = u("w*3");
        assert_eq!(
            block_sum(&o("w+1"), &un3).unwrap(),
            subtract(&dyadic(&o("w"), &un3).unwrap(), &dyadic(&o("w*2"), &un3).unwrap()).unwrap()
        );
        for s in ["1", "4", "w+2"] {
            let b = block_sum(&o(s), &un3).unwrap();
            let tail = dyadic(&ord_add(&o(s), &o("w")), &un3).unwrap();
            assert_eq!(add(&b, &tail).unwrap(), dyadic(&o(s).pred().unwrap(), &un3).unwrap());
        }
        assert!(matches!(block_sum(&o("w"), &un3), Err(GenError::UndefinedSum(_))));
    }

    #[test]
    fn density_witnesses() {
        let a = "w*2";
        for (x, y) in [
            (GenFraction::zero(&u(a)), GenFraction::one(&u(a))),
            (d("2", a), d("1", a)),
            (d("w", a), d("7", a)),
            (fr(&[("0", "3")], a), fr(&[("0", "4")], a)),
        ] {
            let (x2, y2, g) = between(&x, &y).unwrap();
            assert_eq!(compare(&x, &x2).unwrap(), Ordering::Less);
            assert_eq!(compare(&x2, &y2).unwrap(), Ordering::Less);
            assert_eq!(compare(&y2, &y).unwrap(), Ordering::Less);
            assert!(g.is_successor());
            assert_eq!(subtract(&y2, &x2).unwrap(), dyadic(&g, &u(a)).unwrap());
        }
        assert_eq!(between(&d("1", a), &d("2", a)), Err(GenError::NotLess));
    }

    #[test]
    fn embedding() {
        let x = d("w", "w*2");
        let e = embed(&x, &u("w*3")).unwrap();
        assert_eq!(e.runs(), runs(&[("w", "w*2")]).as_slice());
        assert_ne!(e, d("w", "w*3"));
        assert!(embed(&GenFraction::zero(&u("w*2")), &u("w^2")).unwrap().is_zero());
        assert!(embed(&x, &u("w")).is_err());
    }

    #[test]
    fn bounds() {
        let a = u("w*2");
        let q = dyadic(&o("2"), &a).unwrap();
        let h = dyadic(&o("1"), &a).unwrap();
        assert_eq!(sup_inf_finite(&[q.clone(), h.clone()], Bound::Sup).unwrap(), h);
        assert_eq!(sup_inf_finite(&[q.clone(), h], Bound::Inf).unwrap(), q);
        assert_eq!(sup_inf_finite(&[], Bound::Sup), Err(GenError::EmptySet));
        let (s, i) = dyadic_family_bounds(&o("1"), &o("w*2"), &a).unwrap();
        assert_eq!(s, dyadic(&o("1"), &a).unwrap());
        assert!(i.is_zero());
        let (s, i) = dyadic_family_bounds(&o("w"), &o("w+5"), &a).unwrap();
        assert_eq!(s, dyadic(&o("w"), &a).unwrap());
        assert_eq!(i, dyadic(&o("w+4"), &a).unwrap());
        let (_, i) = dyadic_family_bounds(&o("3"), &o("w"), &a).unwrap();
        assert_eq!(i, dyadic(&o("w"), &a).unwrap());
    }

    #[test]
    fn interval_halving() {
        let a = u("w*2");
        let unit = GenInterval::new(GenFraction::zero(&a), GenFraction::one(&a)).unwrap();
        let (l, r) = interval_halve(&unit).unwrap();
        let half = dyadic(&o("1"), &a).unwrap();
        assert_eq!((l.lo(), l.hi()), (&GenFraction::zero(&a), &half));
        assert_eq!((r.lo(), r.hi()), (&half, &GenFraction::one(&a)));
        let total = add(&l.length().unwrap(), &r.length().unwrap()).unwrap();
        assert_eq!(total, unit.length().unwrap());
        let lo = dyadic(&o("3"), &a).unwrap();
        let deep = GenInterval::new(lo.clone(), add(&lo, &dyadic(&o("w+1"), &a).unwrap()).unwrap()).unwrap();
        let (l, r) = interval_halve(&deep).unwrap();
        assert_eq!(l.length().unwrap(), dyadic(&o("w+2"), &a).unwrap());
        assert_eq!(r.length().unwrap(), dyadic(&o("w+2"), &a).unwrap());
        let odd = GenInterval::new(GenFraction::zero(&a), fr(&[("0", "2")], "w*2")).unwrap();
        assert_eq!(interval_halve(&odd), Err(GenError::NotDyadicLength));
    }

    #[test]
    fn nesting() {
        let a = u("w*2");
        let unit = GenInterval::new(GenFraction::zero(&a), GenFraction::one(&a)).unwrap();
        let same = nested_intersect(std::iter::repeat_n(unit.clone(), 3), 5).unwrap();
        assert_eq!(same, unit);
        let halves = std::iter::successors(Some(unit.clone()), |i| interval_halve(i).ok().map(|(l, _)| l));
        let got = nested_intersect(halves, 5).unwrap();
        assert_eq!(got.length().unwrap(), dyadic(&o("5"), &a).unwrap());
        assert!(got.contains(&GenFraction::zero(&a)).unwrap());
        let (_, r) = interval_halve(&unit).unwrap();
        let (l, _) = interval_halve(&unit).unwrap();
        assert!(matches!(nested_intersect(vec![l, r], 5), Err(GenError::NotNested(_))));
    }

    #[test]
    fn bisection() {
        let a = u("w*2");
        let half = dyadic(&o("1"), &a).unwrap();
        let f = |x: &GenFraction| match compare(x, &half).unwrap() {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        };
        let unit = GenInterval::new(GenFraction::zero(&a), GenFraction::one(&a)).unwrap();
        let got = dichotomy_root(f, &unit, 4).unwrap();
        assert_eq!(got.length().unwrap(), dyadic(&o("4"), &a).unwrap());
        assert!(got.contains(&half).unwrap());
        let at_lo = GenInterval::new(half.clone(), GenFraction::one(&a)).unwrap();
        let got = dichotomy_root(f, &at_lo, 4).unwrap();
        assert_eq!((got.lo(), got.hi()), (&half, &half));
        let right = GenInterval::new(dyadic(&o("w"), &a).unwrap(), dyadic(&o("2"), &a).unwrap()).unwrap();
        assert_eq!(dichotomy_root(f, &right, 4), Err(GenError::SameSign));
    }

    #[test]
    fn derivative_stages() {
        assert!(in_derivative_stage(&o("w*3"), &o("1")));
        assert!(!in_derivative_stage(&o("w+1"), &o("1")));
        assert!(in_derivative_stage(&o("eps[0]"), &o("w")));
        assert!(in_derivative_stage(&o("w^2"), &o("2")));
        assert!(!in_derivative_stage(&o("w^2 + w"), &o("2")));
    }

    #[test]
    fn signed_numbers() {
        let a = u("w*2");
        let half = dyadic(&o("1"), &a).unwrap();
        let x = GenNumber::new(Sign::Pos, o("w"), half.clone()).unwrap();
        let y = GenNumber::new(Sign::Pos, o("w"), GenFraction::zero(&a)).unwrap();
        let z = GenNumber::new(Sign::Zero, Ordinal::zero(), GenFraction::zero(&a)).unwrap();
        assert_eq!(x.compare(&y).unwrap(), Ordering::Greater);
        assert_eq!(x.negate().compare(&y.negate()).unwrap(), Ordering::Less);
        assert_eq!(z.compare(&y.negate()).unwrap(), Ordering::Greater);
        assert_eq!(x.negate().negate(), x);
        assert!(GenNumber::new(Sign::Pos, Ordinal::zero(), GenFraction::zero(&a)).is_err());
        assert_eq!(x.integer_digits(), vec![(o("w"), 1)]);
    }
}
