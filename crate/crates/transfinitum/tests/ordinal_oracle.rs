mod common;

use common::{from_coefs, grid, o, poly_add, poly_mul, triple, Oracle};
use transfinitum::ordinal::{compare, natural_product, natural_sum, ord_add, ord_mul};
use transfinitum::Ordinal;

#[test]
fn oracle_sanity() {
    let mut or = Oracle::default();
    let one = triple(0, 0, 1);
    let w = triple(0, 1, 0);
    assert_eq!(or.add(&one, &w), w);
    assert_eq!(or.add(&w, &one), triple(0, 1, 1));
    assert_eq!(or.mul(&triple(0, 0, 2), &w), w);
    assert_eq!(or.mul(&w, &triple(0, 0, 2)), triple(0, 2, 0));
    assert_eq!(or.mul(&w, &w), triple(1, 0, 0));
    assert_eq!(or.mul(&triple(0, 1, 1), &triple(0, 1, 1)), triple(1, 1, 1));
}

#[test]
fn sum_and_product_match_the_oracle_below_w_cubed() {
    let mut or = Oracle::default();
    let g = grid();
    let ords: Vec<Ordinal> = g.iter().map(|v| from_coefs(v)).collect();
    let mut pairs = 0;
    for (x, a) in g.iter().zip(&ords) {
        for (y, b) in g.iter().zip(&ords) {
            assert_eq!(ord_add(a, b), from_coefs(&or.add(x, y)), "{a} + {b}");
            assert_eq!(ord_mul(a, b), from_coefs(&or.mul(x, y)), "{a} * {b}");
            pairs += 1;
        }
    }
    assert!(pairs > 25_000);
}

#[test]
fn natural_operations_match_polynomials() {
    let g = grid();
    for x in &g {
        for y in &g {
            let (a, b) = (from_coefs(x), from_coefs(y));
            assert_eq!(natural_sum(&a, &b), from_coefs(&poly_add(x, y)));
            assert_eq!(natural_product(&a, &b), from_coefs(&poly_mul(x, y)));
        }
    }
}

#[test]
fn worked_examples() {
    assert_eq!(ord_mul(&Ordinal::nat(2), &o("w")), o("w"));
    assert_eq!(ord_mul(&o("w"), &Ordinal::nat(2)), o("w*2"));
    assert_eq!(natural_sum(&o("w+1"), &o("w")), o("w*2+1"));
    assert_eq!(natural_product(&o("w+1"), &o("w+1")), o("w^2+w*2+1"));
}

#[test]
fn epsilon_exceeds_finite_towers() {
    use transfinitum::epsilon::finite_tower;
    let e0 = o("eps[0]");
    for n in 0..=6 {
        let t = finite_tower(&o("w"), n);
        assert_eq!(compare(&e0, &t), std::cmp::Ordering::Greater, "{t}");
    }
    assert_eq!(compare(&e0, &o("w^(w^w)")), std::cmp::Ordering::Greater);
}
