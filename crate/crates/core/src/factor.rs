//! Integer factorisation for weight-group bookkeeping.
//!
//! Weight-group elements are stored as prime-exponent vectors, so the
//! crate needs exact factorisation of the (desk-scale) numerators and
//! denominators that occur as edge weights. Trial division handles the
//! common case; Pollard's rho with Brent cycling covers the rest.
//! Everything is deterministic.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Deterministic Miller-Rabin. The witness set is exact for all inputs
/// below 3.3e24, which covers every value this crate factors by a wide
/// margin; above that the test is (extremely) probable-prime only.
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    let small: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in small {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if n.is_multiple_of(&p) {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in small {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    // n is odd, composite, and has no factor below 1000 here.
    let one = BigUint::one();
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break; // cycle without factor, retry with next c
            }
            d = diff.gcd(n);
        }
        if d != one && &d != n {
            return d;
        }
    }
    unreachable!("pollard_rho exhausted constants");
}

fn factor_into(n: BigUint, out: &mut BTreeMap<BigUint, i64>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(&n);
    let q = &n / &d;
    factor_into(d, out);
    factor_into(q, out);
}

/// Prime factorisation `n = prod p^e` with `n >= 1`.
pub fn factorize(n: &BigUint) -> BTreeMap<BigUint, i64> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut out = BTreeMap::new();
    let mut n = n.clone();
    // strip small primes first
    let mut p = 2u64;
    while p < 1000 && n > BigUint::one() {
        let bp = BigUint::from(p);
        while n.is_multiple_of(&bp) {
            n /= &bp;
            *out.entry(bp.clone()).or_insert(0) += 1;
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    factor_into(n, &mut out);
    out
}
