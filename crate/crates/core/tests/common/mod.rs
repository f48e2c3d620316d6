//! Shared oracles for the property suites: naive rational evaluation of
//! Laurent polynomials at integer points, independent of the sparse
//! arithmetic under test.

// Each test target compiles its own copy and uses a different subset.
#![allow(dead_code)]

use cluster_atlas::laurent::{LaurentFraction, LaurentPoly};
use num_bigint::BigInt;

/// An unreduced rational number.
pub type Rat = (BigInt, BigInt);

pub fn big_pow(base: &BigInt, exp: u32) -> BigInt {
    let mut out = BigInt::from(1);
    for _ in 0..exp {
        out *= base;
    }
    out
}

pub fn rat_add(a: &Rat, b: &Rat) -> Rat {
    (&a.0 * &b.1 + &b.0 * &a.1, &a.1 * &b.1)
}

pub fn rat_mul(a: &Rat, b: &Rat) -> Rat {
    (&a.0 * &b.0, &a.1 * &b.1)
}

pub fn rat_div(a: &Rat, b: &Rat) -> Rat {
    (&a.0 * &b.1, &a.1 * &b.0)
}

pub fn rat_eq(a: &Rat, b: &Rat) -> bool {
    &a.0 * &b.1 == &b.0 * &a.1
}

/// Term-by-term evaluation at a nonzero integer point.
pub fn eval_poly(p: &LaurentPoly, point: &[i64]) -> Rat {
    assert_eq!(point.len(), p.rank());
    assert!(point.iter().all(|&x| x != 0), "point must avoid zeros");
    let mut acc: Rat = (BigInt::from(0), BigInt::from(1));
    for (exps, coeff) in p.terms() {
        let mut num = coeff.clone();
        let mut den = BigInt::from(1);
        for (&e, &x) in exps.entries().iter().zip(point) {
            let base = BigInt::from(x);
            if e >= 0 {
                num *= big_pow(&base, e as u32);
            } else {
                den *= big_pow(&base, (-e) as u32);
            }
        }
        acc = rat_add(&acc, &(num, den));
    }
    acc
}

pub fn eval_fraction(f: &LaurentFraction, point: &[i64]) -> Rat {
    rat_div(&eval_poly(f.numerator(), point), &eval_poly(f.denominator(), point))
}
