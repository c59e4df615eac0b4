//! Ordinal notations below the least fixpoint of `mu -> eps_mu`.
//!
//! Values are kept in Cantor normal form with epsilon atoms. A bare
//! `w^eps[mu]` with coefficient one is always stored as the atom
//! `eps[mu]`, so two notations are equal exactly when they are
//! structurally equal.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Upper bound on the bit size of a natural produced by exponentiation.
pub const MAX_NATURAL_BITS: u64 = 1 << 20;

/// Upper bound on the finite exponent applied to an infinite base with a
/// nonzero finite part (the result grows one block of terms per step).
pub const MAX_FINITE_POWER: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("not subtractable: {0} is greater than {1}")]
    NotSubtractable(String, String),
    #[error("{0}")]
    Domain(String),
    #[error("result too large: {0}")]
    TooLarge(String),
    #[error("syntax error at col {col}: {msg}")]
    Parse { col: usize, msg: String },
}

/// One CNF term `w^exp * coef` with `coef >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    exp: Ordinal,
    coef: BigUint,
}

impl Term {
    pub fn new(exp: Ordinal, coef: BigUint) -> Term {
        assert!(!coef.is_zero(), "CNF coefficient must be positive");
        Term { exp, coef }
    }

    pub fn exp(&self) -> &Ordinal {
        &self.exp
    }

    pub fn coef(&self) -> &BigUint {
        &self.coef
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    Cnf(Vec<Term>),
    Eps(Box<Ordinal>),
}

/// An ordinal notation. Cheap to compare, hash and print; all operations
/// return fresh normalized values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ordinal(Repr);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindTag {
    Zero,
    Successor,
    Limit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinalKind {
    pub tag: KindTag,
    pub finite_part: BigUint,
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        Ordinal(Repr::Zero)
    }

    pub fn one() -> Ordinal {
        Ordinal::nat(1)
    }

    pub fn omega() -> Ordinal {
        Ordinal::omega_pow(Ordinal::one())
    }

    pub fn nat(n: u64) -> Ordinal {
        Ordinal::from_biguint(BigUint::from(n))
    }

    pub fn from_biguint(n: BigUint) -> Ordinal {
        if n.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal(Repr::Cnf(vec![Term::new(Ordinal::zero(), n)]))
        }
    }

    /// The Cantor-indexed epsilon number `eps_mu`.
    pub fn eps(index: Ordinal) -> Ordinal {
        Ordinal(Repr::Eps(Box::new(index)))
    }

    /// `w^e`.
    pub fn omega_pow(e: Ordinal) -> Ordinal {
        Ordinal::from_terms(vec![Term::new(e, BigUint::one())])
    }

    /// `w^e * c`.
    pub fn omega_pow_times(e: Ordinal, c: BigUint) -> Ordinal {
        if c.is_zero() {
            return Ordinal::zero();
        }
        Ordinal::from_terms(vec![Term::new(e, c)])
    }

    /// Builds a notation from terms with strictly descending exponents.
    pub fn from_terms(terms: Vec<Term>) -> Ordinal {
        debug_assert!(terms
            .windows(2)
            .all(|w| compare(&w[0].exp, &w[1].exp) == Ordering::Greater));
        match terms.len() {
            0 => Ordinal::zero(),
            1 if terms[0].coef.is_one() && terms[0].exp.is_eps() => terms[0].exp.clone(),
            _ => Ordinal(Repr::Cnf(terms)),
        }
    }

    /// CNF terms, with an epsilon atom read as `w^eps * 1`.
    pub fn terms(&self) -> Cow<'_, [Term]> {
        match &self.0 {
            Repr::Zero => Cow::Borrowed(&[]),
            Repr::Cnf(t) => Cow::Borrowed(t),
            Repr::Eps(_) => Cow::Owned(vec![Term::new(self.clone(), BigUint::one())]),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Zero)
    }

    pub fn is_one(&self) -> bool {
        self.to_biguint().is_some_and(|n| n.is_one())
    }

    pub fn is_eps(&self) -> bool {
        matches!(self.0, Repr::Eps(_))
    }

    /// The Cantor index when this is an epsilon atom.
    pub fn eps_index(&self) -> Option<&Ordinal> {
        match &self.0 {
            Repr::Eps(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.0 {
            Repr::Zero => true,
            Repr::Cnf(t) => t[0].exp.is_zero(),
            Repr::Eps(_) => false,
        }
    }

    pub fn to_biguint(&self) -> Option<BigUint> {
        match &self.0 {
            Repr::Zero => Some(BigUint::zero()),
            Repr::Cnf(t) if t[0].exp.is_zero() => Some(t[0].coef.clone()),
            _ => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_biguint().and_then(|n| n.to_u64())
    }

    /// The trailing natural `r` in `lambda + r`.
    pub fn finite_part(&self) -> BigUint {
        match &self.0 {
            Repr::Cnf(t) => {
                let last = t.last().expect("nonempty CNF");
                if last.exp.is_zero() {
                    last.coef.clone()
                } else {
                    BigUint::zero()
                }
            }
            _ => BigUint::zero(),
        }
    }

    /// The limit (or zero) part `lambda` in `lambda + r`.
    pub fn limit_part(&self) -> Ordinal {
        let mut t = self.terms().into_owned();
        if t.last().is_some_and(|l| l.exp.is_zero()) {
            t.pop();
        }
        Ordinal::from_terms(t)
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.finite_part().is_zero()
    }

    pub fn is_successor(&self) -> bool {
        !self.finite_part().is_zero()
    }

    pub fn succ(&self) -> Ordinal {
        ord_add(self, &Ordinal::one())
    }

    /// Predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut t = self.terms().into_owned();
        let last = t.last_mut().expect("successor has a finite term");
        last.coef -= 1u32;
        if last.coef.is_zero() {
            t.pop();
        }
        Some(Ordinal::from_terms(t))
    }

    /// Leading CNF exponent; zero for naturals and for zero itself.
    pub fn leading_exponent(&self) -> Ordinal {
        self.terms().first().map(|t| t.exp.clone()).unwrap_or_else(Ordinal::zero)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Ordinal {
        Ordinal::nat(n)
    }
}

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    use Repr::*;
    match (&a.0, &b.0) {
        (Zero, Zero) => Ordering::Equal,
        (Zero, _) => Ordering::Less,
        (_, Zero) => Ordering::Greater,
        (Eps(m), Eps(n)) => compare(m, n),
        (Eps(_), Cnf(t)) => cmp_eps_cnf(a, t),
        (Cnf(t), Eps(_)) => cmp_eps_cnf(b, t).reverse(),
        (Cnf(s), Cnf(t)) => cmp_terms(s, t),
    }
}

// An epsilon atom behaves as the single term w^eps.
fn cmp_eps_cnf(e: &Ordinal, t: &[Term]) -> Ordering {
    match compare(e, &t[0].exp) {
        Ordering::Equal if t[0].coef.is_one() && t.len() == 1 => Ordering::Equal,
        Ordering::Equal => Ordering::Less,
        o => o,
    }
}

fn cmp_terms(s: &[Term], t: &[Term]) -> Ordering {
    for (x, y) in s.iter().zip(t) {
        let o = compare(&x.exp, &y.exp).then_with(|| x.coef.cmp(&y.coef));
        if o != Ordering::Equal {
            return o;
        }
    }
    s.len().cmp(&t.len())
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn ord_add(a: &Ordinal, b: &Ordinal) -> Ordinal {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return b.clone();
    }
    let bt = b.terms();
    let lead = &bt[0].exp;
    let mut out = Vec::new();
    let mut carry = BigUint::zero();
    for t in a.terms().iter() {
        match compare(&t.exp, lead) {
            Ordering::Greater => out.push(t.clone()),
            Ordering::Equal => {
                carry = t.coef.clone();
                break;
            }
            Ordering::Less => break,
        }
    }
    out.push(Term::new(lead.clone(), &bt[0].coef + carry));
    out.extend(bt[1..].iter().cloned());
    Ordinal::from_terms(out)
}

pub fn ord_mul(a: &Ordinal, b: &Ordinal) -> Ordinal {
    if a.is_zero() || b.is_zero() {
        return Ordinal::zero();
    }
    let at = a.terms();
    let mut acc = Ordinal::zero();
    for t in b.terms().iter() {
        let piece = if t.exp.is_zero() {
            let mut v = at.to_vec();
            v[0].coef *= &t.coef;
            Ordinal::from_terms(v)
        } else {
            Ordinal::omega_pow_times(ord_add(&at[0].exp, &t.exp), t.coef.clone())
        };
        acc = ord_add(&acc, &piece);
    }
    acc
}

/// The unique `d` with `a + d = b`.
pub fn ord_sub_left(a: &Ordinal, b: &Ordinal) -> Result<Ordinal, OrdinalError> {
    let at = a.terms();
    let bt = b.terms();
    let fail = || OrdinalError::NotSubtractable(a.to_string(), b.to_string());
    let mut i = 0;
    loop {
        if i == at.len() {
            return Ok(Ordinal::from_terms(bt[i..].to_vec()));
        }
        if i == bt.len() {
            return Err(fail());
        }
        match compare(&at[i].exp, &bt[i].exp) {
            Ordering::Less => return Ok(Ordinal::from_terms(bt[i..].to_vec())),
            Ordering::Greater => return Err(fail()),
            Ordering::Equal => match at[i].coef.cmp(&bt[i].coef) {
                Ordering::Less => {
                    let mut out = vec![Term::new(bt[i].exp.clone(), &bt[i].coef - &at[i].coef)];
                    out.extend(bt[i + 1..].iter().cloned());
                    return Ok(Ordinal::from_terms(out));
                }
                Ordering::Greater => return Err(fail()),
                Ordering::Equal => i += 1,
            },
        }
    }
}

/// Splits `p = w * q + n`.
pub fn div_by_omega(p: &Ordinal) -> (Ordinal, BigUint) {
    let mut q = Vec::new();
    let mut n = BigUint::zero();
    for t in p.terms().iter() {
        if t.exp.is_zero() {
            n = t.coef.clone();
        } else {
            let e = if t.exp.is_finite() { t.exp.pred().expect("positive natural") } else { t.exp.clone() };
            q.push(Term::new(e, t.coef.clone()));
        }
    }
    (Ordinal::from_terms(q), n)
}

fn pow_natural(k: &BigUint, n: &BigUint) -> Result<BigUint, OrdinalError> {
    if n.is_zero() || k.is_one() {
        return Ok(BigUint::one());
    }
    let too_large = || OrdinalError::TooLarge(format!("{k}^{n}"));
    let n64 = n.to_u64().ok_or_else(too_large)?;
    if k.bits().saturating_sub(1).saturating_mul(n64) > MAX_NATURAL_BITS {
        return Err(too_large());
    }
    let e = u32::try_from(n64).map_err(|_| too_large())?;
    Ok(num_traits::pow::pow(k.clone(), e as usize))
}

/// Ordinal exponentiation, reporting results whose naturals would be
/// unreasonably large instead of attempting them.
pub fn try_ord_exp(a: &Ordinal, b: &Ordinal) -> Result<Ordinal, OrdinalError> {
    if b.is_zero() {
        return Ok(Ordinal::one());
    }
    if a.is_zero() {
        return Ok(Ordinal::zero());
    }
    if a.is_one() {
        return Ok(Ordinal::one());
    }
    if let Some(k) = a.to_biguint() {
        // k^(w*q + n) = w^q * k^n
        let (q, n) = div_by_omega(b);
        let kn = Ordinal::from_biguint(pow_natural(&k, &n)?);
        return Ok(ord_mul(&Ordinal::omega_pow(q), &kn));
    }
    let lead = a.leading_exponent();
    let n = b.finite_part();
    let b_lim = b.limit_part();
    let head = if b_lim.is_zero() {
        Ordinal::one()
    } else {
        Ordinal::omega_pow(ord_mul(&lead, &b_lim))
    };
    let tail = if n.is_zero() {
        Ordinal::one()
    } else if a.finite_part().is_zero() {
        // a * a = w^lead * a when a has no finite part
        let shift = ord_mul(&lead, &Ordinal::from_biguint(&n - 1u32));
        ord_mul(&Ordinal::omega_pow(shift), a)
    } else {
        let n64 = n
            .to_u64()
            .filter(|&n| n <= MAX_FINITE_POWER)
            .ok_or_else(|| OrdinalError::TooLarge(format!("({a})^{n}")))?;
        let mut result = Ordinal::one();
        let mut base = a.clone();
        let mut e = n64;
        while e > 0 {
            if e & 1 == 1 {
                result = ord_mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = ord_mul(&base, &base);
            }
        }
        result
    };
    Ok(ord_mul(&head, &tail))
}

/// Ordinal exponentiation.
///
/// # Panics
/// When a natural in the result would exceed [`MAX_NATURAL_BITS`] bits;
/// use [`try_ord_exp`] to get an error instead.
pub fn ord_exp(a: &Ordinal, b: &Ordinal) -> Ordinal {
    try_ord_exp(a, b).unwrap_or_else(|e| panic!("{e}"))
}

/// Hessenberg natural sum: coefficients merge termwise.
pub fn natural_sum(a: &Ordinal, b: &Ordinal) -> Ordinal {
    let (at, bt) = (a.terms(), b.terms());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(at.len() + bt.len());
    while i < at.len() || j < bt.len() {
        let o = match (at.get(i), bt.get(j)) {
            (Some(x), Some(y)) => compare(&x.exp, &y.exp),
            (Some(_), None) => Ordering::Greater,
            _ => Ordering::Less,
        };
        match o {
            Ordering::Greater => {
                out.push(at[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(bt[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(Term::new(at[i].exp.clone(), &at[i].coef + &bt[j].coef));
                i += 1;
                j += 1;
            }
        }
    }
    Ordinal::from_terms(out)
}

/// Hessenberg natural product: multiply as polynomials in `w`, adding
/// exponents with the natural sum.
pub fn natural_product(a: &Ordinal, b: &Ordinal) -> Ordinal {
    let mut acc = Ordinal::zero();
    for s in a.terms().iter() {
        for t in b.terms().iter() {
            let term = Ordinal::omega_pow_times(natural_sum(&s.exp, &t.exp), &s.coef * &t.coef);
            acc = natural_sum(&acc, &term);
        }
    }
    acc
}

pub fn kind_of(a: &Ordinal) -> OrdinalKind {
    let finite_part = a.finite_part();
    let tag = if a.is_zero() {
        KindTag::Zero
    } else if finite_part.is_zero() {
        KindTag::Limit
    } else {
        KindTag::Successor
    };
    OrdinalKind { tag, finite_part }
}

/// True iff `a = w^e` for some `e`.
pub fn is_additively_indecomposable(a: &Ordinal) -> Result<bool, OrdinalError> {
    if a.is_zero() {
        return Err(OrdinalError::Domain("0 has no additive decomposition question".into()));
    }
    let t = a.terms();
    Ok(t.len() == 1 && t[0].coef.is_one())
}

/// Base-`k` normal form: `a = sum k^e_i * d_i` with descending `e_i` and
/// digits `1 <= d_i < k`.
pub fn base_expand(a: &Ordinal, base: u64) -> Result<Vec<(Ordinal, u64)>, OrdinalError> {
    if base < 2 {
        return Err(OrdinalError::Domain(format!("base must be at least 2, got {base}")));
    }
    let b = BigUint::from(base);
    let mut out = Vec::new();
    for t in a.terms().iter() {
        // k^(w*e + j) = w^e * k^j
        let hi = ord_mul(&Ordinal::omega(), &t.exp);
        let mut digits = Vec::new();
        let mut c = t.coef.clone();
        while !c.is_zero() {
            let (q, r) = c.div_rem(&b);
            digits.push(r.to_u64().expect("digit below base"));
            c = q;
        }
        for (j, d) in digits.iter().enumerate().rev() {
            if *d != 0 {
                out.push((ord_add(&hi, &Ordinal::nat(j as u64)), *d));
            }
        }
    }
    Ok(out)
}

fn max_eps_index(a: &Ordinal) -> Option<Ordinal> {
    match &a.0 {
        Repr::Zero => None,
        // Every atom inside the index is smaller than the index itself.
        Repr::Eps(m) => Some((**m).clone()),
        Repr::Cnf(t) => t.iter().filter_map(|t| max_eps_index(&t.exp)).max(),
    }
}

/// Smallest epsilon atom strictly above `a`.
pub fn least_epsilon_above(a: &Ordinal) -> Ordinal {
    match max_eps_index(a) {
        None => Ordinal::eps(Ordinal::zero()),
        Some(m) => Ordinal::eps(m.succ()),
    }
}

fn fmt_exponent(e: &Ordinal, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let t = e.terms();
    let atomic = e.is_eps() || (t.len() == 1 && (t[0].exp.is_zero() || (t[0].exp.is_one() && t[0].coef.is_one())));
    if atomic {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Zero => write!(f, "0"),
            Repr::Eps(m) => write!(f, "eps[{m}]"),
            Repr::Cnf(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if t.exp.is_zero() {
                        write!(f, "{}", t.coef)?;
                        continue;
                    }
                    if t.exp.is_eps() {
                        write!(f, "{}", t.exp)?;
                    } else if t.exp.is_one() {
                        write!(f, "w")?;
                    } else {
                        write!(f, "w^")?;
                        fmt_exponent(&t.exp, f)?;
                    }
                    if !t.coef.is_one() {
                        write!(f, "*{}", t.coef)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Recursive-descent reader for the notation grammar
/// `sum := prod ('+' prod)*`, `prod := pow ('*' pow)*`,
/// `pow := atom ('^' pow)?`, `atom := nat | w | eps[sum] | (sum)`.
struct Reader<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, msg: impl Into<String>) -> OrdinalError {
        OrdinalError::Parse { col: self.pos + 1, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut v = self.prod()?;
        while self.eat(b'+') {
            v = ord_add(&v, &self.prod()?);
        }
        Ok(v)
    }

    fn prod(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut v = self.pow()?;
        while self.eat(b'*') {
            v = ord_mul(&v, &self.pow()?);
        }
        Ok(v)
    }

    fn pow(&mut self) -> Result<Ordinal, OrdinalError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.pow()?;
            return try_ord_exp(&base, &e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        let rest = &self.s[self.pos..];
        if rest.starts_with(b"eps[") {
            self.pos += 4;
            let i = self.sum()?;
            if !self.eat(b']') {
                return Err(self.err("expected ']'"));
            }
            return Ok(Ordinal::eps(i));
        }
        match rest.first() {
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
                Ok(Ordinal::from_biguint(digits.parse().expect("digits parse")))
            }
            _ => Err(self.err("expected an ordinal")),
        }
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Ordinal, OrdinalError> {
        let mut r = Reader { s: s.as_bytes(), pos: 0 };
        let v = r.sum()?;
        r.skip_ws();
        if r.pos != r.s.len() {
            return Err(r.err("unexpected trailing input"));
        }
        Ok(v)
    }
}
