#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigUint;
use proptest::prelude::*;
use transfinitum::genreal::{GenFraction, Universe};
use transfinitum::ordinal::{ord_add, ord_mul, Term};
use transfinitum::skand::{Component, Piece, PieceContent, SetValue, Skand};
use transfinitum::Ordinal;

pub fn o(s: &str) -> Ordinal {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// Ordinals below `w^w` as coefficient vectors, index `i` holding the
/// coefficient of `w^i`, computed from the recursive definitions of sum
/// and product with suprema taken over sampled fundamental sequences.
/// Nothing here uses normal-form arithmetic.
#[derive(Default)]
pub struct Oracle {
    add_memo: HashMap<(Vec<u64>, Vec<u64>), Vec<u64>>,
    mul_memo: HashMap<(Vec<u64>, Vec<u64>), Vec<u64>>,
}

/// Index where fundamental sequences are sampled. Along `l + w^p * n` the
/// sum and product move in one coordinate from `n = 1` on; a few extra
/// steps keep a coincidence at small `n` from hiding it.
const SAMPLE: u64 = 4;

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn succ(v: &[u64]) -> Vec<u64> {
    let mut v = v.to_vec();
    if v.is_empty() {
        v.push(0);
    }
    v[0] += 1;
    v
}

fn pred(v: &[u64]) -> Option<Vec<u64>> {
    match v.first() {
        Some(&c) if c > 0 => {
            let mut v = v.to_vec();
            v[0] -= 1;
            Some(trim(v))
        }
        _ => None,
    }
}

/// `n`-th element of the standard sequence converging to the limit `v`:
/// `l + w^p` becomes `l + w^(p-1) * n`.
fn fundamental(v: &[u64], n: u64) -> Vec<u64> {
    let p = v.iter().position(|&c| c > 0).expect("nonzero limit");
    let mut f = v.to_vec();
    f[p] -= 1;
    f[p - 1] += n;
    trim(f)
}

/// Supremum of an increasing sequence from two late samples: the highest
/// coordinate still moving grows without bound.
fn sup(a: &[u64], b: &[u64]) -> Vec<u64> {
    let len = a.len().max(b.len());
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    let Some(i) = (0..len).rev().find(|&i| at(a, i) != at(b, i)) else {
        return a.to_vec();
    };
    let mut s: Vec<u64> = (0..len + 1).map(|j| if j > i + 1 { at(a, j) } else { 0 }).collect();
    s[i + 1] = at(a, i + 1) + 1;
    trim(s)
}

impl Oracle {
    pub fn add(&mut self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let key = (a.to_vec(), b.to_vec());
        if let Some(r) = self.add_memo.get(&key) {
            return r.clone();
        }
        let r = if b.is_empty() {
            a.to_vec()
        } else if let Some(p) = pred(b) {
            succ(&self.add(a, &p))
        } else {
            let lo = self.add(a, &fundamental(b, SAMPLE));
            let hi = self.add(a, &fundamental(b, SAMPLE + 1));
            sup(&lo, &hi)
        };
        self.add_memo.insert(key, r.clone());
        r
    }

    pub fn mul(&mut self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let key = (a.to_vec(), b.to_vec());
        if let Some(r) = self.mul_memo.get(&key) {
            return r.clone();
        }
        let r = if b.is_empty() {
            Vec::new()
        } else if let Some(p) = pred(b) {
            let m = self.mul(a, &p);
            self.add(&m, a)
        } else {
            let lo = self.mul(a, &fundamental(b, SAMPLE));
            let hi = self.mul(a, &fundamental(b, SAMPLE + 1));
            sup(&lo, &hi)
        };
        self.mul_memo.insert(key, r.clone());
        r
    }
}

pub fn from_coefs(v: &[u64]) -> Ordinal {
    let terms = v
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| Term::new(Ordinal::nat(i as u64), BigUint::from(c)))
        .collect();
    Ordinal::from_terms(terms)
}

/// `(a, b, c)` meaning `w^2*a + w*b + c`, as a coefficient vector.
pub fn triple(a: u64, b: u64, c: u64) -> Vec<u64> {
    trim(vec![c, b, a])
}

/// Every triple in the test grid for the `< w^3` oracle.
pub fn grid() -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for a in 0..=3 {
        for b in 0..=6 {
            for c in 0..=5 {
                out.push(triple(a, b, c));
            }
        }
    }
    out
}

/// Coefficientwise sum over naturals-as-exponents.
pub fn poly_add(a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)).collect())
}

/// Product of the coefficient vectors as polynomials in `w`.
pub fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(r)
}

/// Ordinals mixing naturals, `w`, small epsilon atoms and towers of them.
pub fn ordinal() -> impl Strategy<Value = Ordinal> {
    let leaf = prop_oneof![
        4 => (0u64..8).prop_map(Ordinal::nat),
        3 => Just(Ordinal::omega()),
        1 => (0u64..3).prop_map(|i| Ordinal::eps(Ordinal::nat(i))),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ord_add(&a, &b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ord_mul(&a, &b)),
            inner.prop_map(Ordinal::omega_pow),
        ]
    })
}

/// Ordinals below `w^w` with small coefficients.
pub fn small_ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::vec(0u64..4, 0..4).prop_map(|v| from_coefs(&v))
}

pub fn universe_w2() -> Universe {
    Universe::new(o("w*2")).unwrap()
}

/// A position below `alpha` drawn near block starts, where the structure is.
fn position(alpha: &Ordinal) -> impl Strategy<Value = Ordinal> {
    let blocks = match alpha.to_string().as_str() {
        "w*2" => 2,
        "w*3" => 3,
        _ => 4,
    };
    (0..blocks as u64, 0u64..6).prop_map(|(k, n)| ord_add(&ord_mul(&Ordinal::omega(), &Ordinal::nat(k)), &Ordinal::nat(n)))
}

/// Canonical fractions in the given universe: up to three runs, possibly
/// ending in a tail.
pub fn fraction_in(u: Universe) -> impl Strategy<Value = GenFraction> {
    let alpha = u.alpha().clone();
    (prop::collection::vec(position(&alpha), 0..6), any::<bool>()).prop_map(move |(mut pts, tail)| {
        pts.sort();
        pts.dedup();
        if tail {
            pts.push(alpha.clone());
        }
        if pts.len() % 2 == 1 {
            pts.pop();
        }
        let runs = pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
        GenFraction::canonicalize(runs, &u).expect("inside the universe")
    })
}

pub fn fraction() -> impl Strategy<Value = GenFraction> {
    prop_oneof![
        fraction_in(universe_w2()),
        fraction_in(Universe::new(o("w*3")).unwrap()),
        fraction_in(Universe::new(o("w^2")).unwrap()),
    ]
}

pub fn set_of(atoms: &[&str]) -> Component {
    atoms.iter().map(|a| SetValue::atom(*a)).collect()
}

fn component() -> impl Strategy<Value = Component> {
    prop::collection::btree_set(prop_oneof![Just("a"), Just("b"), Just("c")], 0..3)
        .prop_map(|s| s.into_iter().map(SetValue::atom).collect())
}

fn content() -> impl Strategy<Value = PieceContent> {
    prop_oneof![
        component().prop_map(PieceContent::Constant),
        prop::collection::vec(component(), 2..4).prop_map(PieceContent::Periodic),
    ]
}

/// Skands of a few shapes over a fixed menu of lengths, with pieces cut at
/// random block-aligned or finite points.
pub fn skand() -> impl Strategy<Value = Skand> {
    let lengths = prop_oneof![Just("3"), Just("w"), Just("w+2"), Just("w*2"), Just("w^2")];
    (lengths, prop::collection::vec(content(), 1..4), 0u64..3).prop_map(|(len, contents, cut)| {
        let length = o(len);
        let cuts: Vec<Ordinal> = match len {
            "3" => vec![Ordinal::nat(1 + cut % 2)],
            "w" => vec![Ordinal::nat(cut + 1)],
            "w+2" => vec![o("w"), o("w+1")],
            "w*2" => vec![Ordinal::nat(cut + 1), o("w")],
            _ => vec![o("w"), ord_mul(&Ordinal::omega(), &Ordinal::nat(cut + 2))],
        };
        let mut bounds = vec![Ordinal::zero()];
        bounds.extend(cuts.into_iter().take(contents.len() - 1));
        bounds.push(length.clone());
        let pieces = bounds
            .windows(2)
            .zip(contents)
            .map(|(w, content)| Piece { lo: w[0].clone(), hi: w[1].clone(), content })
            .collect();
        Skand::from_pieces(length, pieces).expect("valid pieces")
    })
}

/// Positions below `len` that probe every piece of the skands and
/// fractions used in the tests: small offsets into the first few blocks of
/// the first few `w^2`-blocks.
pub fn sample_positions(len: &Ordinal) -> Vec<Ordinal> {
    let w = Ordinal::omega();
    let mut out = Vec::new();
    for j in 0..3u64 {
        for k in 0..4u64 {
            for n in 0..12u64 {
                let hi = ord_mul(&ord_mul(&w, &w), &Ordinal::nat(j));
                let mid = ord_mul(&w, &Ordinal::nat(k));
                let p = ord_add(&ord_add(&hi, &mid), &Ordinal::nat(n));
                if p < *len {
                    out.push(p);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Whether the tail of `x` from `a1` equals `x`, read off components.
pub fn tail_from_equals(x: &Skand, a1: &Ordinal) -> bool {
    let len = x.length();
    let rest = transfinitum::ordinal::ord_sub_left(a1, len).expect("a1 below length");
    rest == *len
        && sample_positions(len)
            .iter()
            .all(|b| x.component(&ord_add(a1, b)) == x.component(b))
}

/// Self-similarity straight from its definition, on sampled start points.
pub fn self_similar_by_tails(x: &Skand) -> bool {
    sample_positions(x.length()).iter().filter(|p| !p.is_zero()).all(|a1| tail_from_equals(x, a1))
}
