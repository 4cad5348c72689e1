//! Exact comparisons between integers and powers `(1+ε)^j` for rational `ε`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::Weight;

const EXACT_BITS: f64 = 200_000.0;

/// The ratio `1 + p/q` of a geometric scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometricScale {
    p: u128,
    q: u128,
}

impl GeometricScale {
    pub fn new(p: u128, q: u128) -> Self {
        assert!(p > 0 && q > 0, "ε must be positive");
        let g = p.gcd(&q);
        Self { p: p / g, q: q / g }
    }

    pub fn eps(&self) -> (u128, u128) {
        (self.p, self.q)
    }

    fn ln_ratio(&self) -> f64 {
        (self.p as f64 / self.q as f64).ln_1p()
    }

    /// Compares `(1+ε)^j` with `l`.
    pub fn cmp_pow(&self, j: u64, l: Weight) -> Ordering {
        if l == 0 {
            return Ordering::Greater;
        }
        if j == 0 {
            return 1.cmp(&l);
        }
        if self.q == 1 {
            return match (1 + self.p).checked_pow(j.min(200) as u32) {
                Some(x) if j < 200 => x.cmp(&(l as u128)),
                _ => Ordering::Greater,
            };
        }
        let a = self.ln_ratio();
        let x = j as f64 * a;
        let y = (l as f64).ln();
        let tol = 1e-10 * (x + y + 1.0);
        if x - y > tol {
            return Ordering::Greater;
        }
        if y - x > tol {
            return Ordering::Less;
        }
        if j as f64 * ((self.p + self.q) as f64).log2() <= EXACT_BITS {
            let lhs = BigUint::from(self.p + self.q).pow(j as u32);
            let rhs = BigUint::from(l) * BigUint::from(self.q).pow(j as u32);
            return lhs.cmp(&rhs);
        }
        // q > 1 and gcd(p, q) = 1, so (p+q)^j = l q^j is impossible
        let mut bits = 192u32;
        loop {
            if let Some(o) = compare_logs(self.p, self.q, j, l, bits) {
                return o;
            }
            bits *= 2;
            assert!(bits <= 1 << 16, "logarithm comparison did not separate");
        }
    }

    pub fn pow_ge(&self, j: u64, l: Weight) -> bool {
        self.cmp_pow(j, l) != Ordering::Less
    }

    /// Smallest `j ≥ 0` with `(1+ε)^j ≥ l`.
    pub fn ceil_log(&self, l: Weight) -> u64 {
        if l <= 1 {
            return 0;
        }
        let mut j = ((l as f64).ln() / self.ln_ratio()).ceil().max(0.0) as u64;
        while !self.pow_ge(j, l) {
            j += 1;
        }
        while j > 0 && self.pow_ge(j - 1, l) {
            j -= 1;
        }
        j
    }

    /// Largest `j` with `(1+ε)^j ≤ l`, for `l ≥ 1`.
    pub fn floor_log(&self, l: Weight) -> u64 {
        assert!(l >= 1);
        let mut j = ((l as f64).ln() / self.ln_ratio()).floor().max(0.0) as u64;
        while self.cmp_pow(j, l) == Ordering::Greater {
            j -= 1;
        }
        while self.cmp_pow(j + 1, l) != Ordering::Greater {
            j += 1;
        }
        j
    }
}

/// Fixed-point value with `bits` fractional bits and an absolute error bound in ulps.
struct Fixed {
    v: BigInt,
    err: BigInt,
}

/// `atanh(a/b)` for `0 ≤ a/b ≤ 1/3`, as a fixed-point number.
fn atanh(a: &BigUint, b: &BigUint, bits: u32) -> Fixed {
    let one = BigInt::one() << bits;
    let y = BigInt::from(a.clone()) * &one / BigInt::from(b.clone());
    let y2 = &y * &y >> bits;
    let mut pow = y.clone();
    let mut sum = BigInt::zero();
    let mut i = 0u64;
    let mut terms = 0u64;
    while !pow.is_zero() {
        sum += &pow / BigInt::from(2 * i + 1);
        pow = &pow * &y2 >> bits;
        i += 1;
        terms += 1;
    }
    // rounding of each product/quotient plus the truncated tail (≤ 2 ulps)
    let err = BigInt::from(terms * (terms + 4) + 8);
    Fixed { v: sum, err }
}

fn ln_rational(num: &BigUint, den: &BigUint, bits: u32) -> Fixed {
    // num/den ≥ 1 written as 2^e · m with m ∈ [1, 2)
    let mut e = num.bits() as i64 - den.bits() as i64;
    let (mut mn, mut md) = (num.clone(), den.clone());
    if e >= 0 {
        md <<= e as u64;
    } else {
        mn <<= (-e) as u64;
    }
    if mn < md {
        mn <<= 1u64;
        e -= 1;
    }
    let a = &mn - &md;
    let b = &mn + &md;
    let lm = atanh(&a, &b, bits);
    let ln2 = atanh(&BigUint::one(), &BigUint::from(3u32), bits);
    let v = (lm.v + BigInt::from(e) * &ln2.v) * 2;
    let err = (lm.err + BigInt::from(e.unsigned_abs()) * ln2.err) * 2 + 2;
    Fixed { v, err }
}

fn compare_logs(p: u128, q: u128, j: u64, l: Weight, bits: u32) -> Option<Ordering> {
    let a = ln_rational(&BigUint::from(p + q), &BigUint::from(q), bits);
    let b = ln_rational(&BigUint::from(l), &BigUint::one(), bits);
    let lhs = &a.v * BigInt::from(j);
    let bound = &a.err * BigInt::from(j) + &b.err;
    let diff = lhs - &b.v;
    if diff > bound {
        Some(Ordering::Greater)
    } else if -diff.clone() > bound {
        Some(Ordering::Less)
    } else {
        None
    }
}
