//! Epsilon numbers through exponential towers.
//!
//! Atoms inside [`Ordinal`] use Cantor's numbering. The shifted numbering
//! used by [`epsilon_paper`] counts `1` and `w` as the first two epsilon
//! numbers (`1^1 = 1` and `2^w = w`), so shifted index `k + 2` is Cantor `k`
//! for finite `k`, and the two agree from `w` on.

use num_traits::Zero;

use crate::ordinal::{
    least_epsilon_above, ord_exp, ord_sub_left, try_ord_exp, Ordinal, OrdinalError,
    MAX_FINITE_POWER,
};

/// An eventually constant sequence of tower bases: the listed prefix, then
/// `tail` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    pub prefix: Vec<Ordinal>,
    pub tail: Ordinal,
}

impl TowerSpec {
    pub fn new(prefix: Vec<Ordinal>, tail: Ordinal) -> Result<TowerSpec, OrdinalError> {
        if tail.is_zero() || prefix.iter().any(Ordinal::is_zero) {
            return Err(OrdinalError::Domain("tower bases must be at least 1".into()));
        }
        Ok(TowerSpec { prefix, tail })
    }
}

/// The epsilon number with the given shifted index.
pub fn epsilon_paper(k: &Ordinal) -> Ordinal {
    match k.to_u64() {
        Some(0) => Ordinal::one(),
        Some(1) => Ordinal::omega(),
        _ => Ordinal::eps(ord_sub_left(&Ordinal::nat(2), k).expect("index is at least 2")),
    }
}

/// `g^g^...^g` with `n` copies of `g`; height zero gives 1.
pub fn try_finite_tower(g: &Ordinal, n: u64) -> Result<Ordinal, OrdinalError> {
    let mut v = Ordinal::one();
    for _ in 0..n {
        v = try_ord_exp(g, &v)?;
    }
    Ok(v)
}

/// # Panics
/// When an intermediate natural is too large, see [`try_finite_tower`].
pub fn finite_tower(g: &Ordinal, n: u64) -> Ordinal {
    try_finite_tower(g, n).unwrap_or_else(|e| panic!("{e}"))
}

/// Limit of the `w`-tower `p_0^p_1^...^t^t^t^...`.
pub fn omega_limit_power(spec: &TowerSpec) -> Ordinal {
    let t = &spec.tail;
    let mut v = if t.is_one() {
        Ordinal::one()
    } else if t.is_finite() {
        Ordinal::omega()
    } else {
        least_epsilon_above(t)
    };
    for p in spec.prefix.iter().rev() {
        v = ord_exp(p, &v);
    }
    v
}

/// `E(g, a)`: the limit power of length `a` over a constant finite base.
///
/// `a` is read in Cantor normal form; the trailing natural contributes
/// ordinary exponentiations by `g`, and each term `w^h * c` contributes `c`
/// exponentiations by the epsilon number with shifted index `h`, most
/// significant term applied last.
pub fn try_tower_limit_general(g: &Ordinal, a: &Ordinal) -> Result<Ordinal, OrdinalError> {
    let base = g.to_u64().filter(|&k| k >= 2).ok_or_else(|| {
        OrdinalError::Domain(format!("tower base must be a natural of at least 2, got {g}"))
    })?;
    let base = Ordinal::nat(base);
    let mut v = Ordinal::one();
    let mut n = a.finite_part();
    while !n.is_zero() {
        v = try_ord_exp(&base, &v)?;
        n -= 1u32;
    }
    let terms = a.terms();
    for t in terms.iter().rev().filter(|t| !t.exp().is_zero()) {
        let e = epsilon_paper(t.exp());
        if t.coef() > &num_bigint::BigUint::from(MAX_FINITE_POWER) {
            return Err(OrdinalError::TooLarge(format!("tower of length {a}")));
        }
        let mut c = t.coef().clone();
        while !c.is_zero() {
            v = try_ord_exp(&e, &v)?;
            c -= 1u32;
        }
    }
    Ok(v)
}

/// # Panics
/// On a base outside `[2, w)` or when a natural grows too large.
pub fn tower_limit_general(g: &Ordinal, a: &Ordinal) -> Ordinal {
    try_tower_limit_general(g, a).unwrap_or_else(|e| panic!("{e}"))
}

/// Epsilon numbers in the shifted numbering: `1`, `w` and the Cantor ones.
pub fn is_epsilon_number(a: &Ordinal) -> bool {
    a.is_one() || *a == Ordinal::omega() || a.is_eps()
}

/// Cantor index `mu` of an epsilon atom written in shifted numbering, the
/// inverse of [`epsilon_paper`] on atoms.
pub fn paper_index(a: &Ordinal) -> Option<Ordinal> {
    if a.is_one() {
        return Some(Ordinal::zero());
    }
    if *a == Ordinal::omega() {
        return Some(Ordinal::one());
    }
    a.eps_index().map(|m| crate::ordinal::ord_add(&Ordinal::nat(2), m))
}
