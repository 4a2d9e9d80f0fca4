//! Riemann zeta at integers `p ≥ 2` to about 60 significant digits, as an
//! exact rational together with a rigorous error bound.
//!
//! Euler–Maclaurin summation with cutoff `N` and `M` Bernoulli corrections:
//! every term is rational for integer `p`, and the remainder is bounded by
//! the first omitted correction.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::numeric::Rational;

const CUTOFF: u64 = 64;
const CORRECTIONS: usize = 20;

#[derive(Clone, Debug)]
pub struct ZetaValue {
    pub exponent: u32,
    pub approx: Rational,
    /// `|ζ(p) − approx| ≤ error`.
    pub error: Rational,
}

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    let mut binom: Vec<BigInt> = vec![BigInt::one()];
    for m in 0..=n {
        // binom holds row m + 1 of Pascal's triangle.
        let mut next = vec![BigInt::one(); binom.len() + 1];
        for k in 1..binom.len() {
            next[k] = &binom[k - 1] + &binom[k];
        }
        binom = next;
        if m == 0 {
            b.push(Rational::one());
            continue;
        }
        let mut acc = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from_integer(binom[k].clone()) * bk;
        }
        b.push(-acc / Rational::from_integer(BigInt::from(m as u64 + 1)));
    }
    b
}

fn rising(p: u32, k: usize) -> BigInt {
    (0..k as u32).fold(BigInt::one(), |acc, i| acc * BigInt::from(p + i))
}

fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn inverse_power(base: u64, exp: u32) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(base), exp as usize))
}

fn compute(p: u32) -> ZetaValue {
    assert!(p >= 2, "zeta needs an exponent of at least 2");
    let n = CUTOFF;
    let mut sum = Rational::zero();
    for k in 1..n {
        sum += inverse_power(k, p);
    }
    // ∫_N^∞ x^-p dx + f(N)/2
    sum += inverse_power(n, p - 1) / Rational::from_integer(BigInt::from(p - 1));
    sum += inverse_power(n, p) / Rational::from_integer(BigInt::from(2));
    let b = bernoulli(2 * CORRECTIONS + 2);
    let term = |j: usize| {
        // B_2j/(2j)! · p(p+1)…(p+2j−2) · N^{−p−2j+1}
        let coeff = &b[2 * j] / Rational::from_integer(factorial(2 * j));
        coeff * Rational::from_integer(rising(p, 2 * j - 1)) * inverse_power(n, p + 2 * j as u32 - 1)
    };
    for j in 1..=CORRECTIONS {
        sum += term(j);
    }
    let error = term(CORRECTIONS + 1).abs() * Rational::from_integer(BigInt::from(2));
    ZetaValue { exponent: p, approx: sum, error }
}

/// Cached `ζ(p)`.
pub fn zeta(p: u32) -> ZetaValue {
    static CACHE: OnceLock<Mutex<HashMap<u32, ZetaValue>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&p) {
        return v.clone();
    }
    let v = compute(p);
    cache.lock().unwrap().insert(p, v.clone());
    v
}

/// Cached `ζ(p)` rounded to a float.
pub fn zeta_f64(p: u32) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&p) {
        return v;
    }
    let v = crate::numeric::to_f64(&zeta(p).approx);
    cache.lock().unwrap().insert(p, v);
    v
}

/// `Σ_{L=1}^{upto} L^{-p}` exactly.
pub fn partial_sum(p: u32, upto: u64) -> Rational {
    (1..=upto).map(|l| inverse_power(l, p)).fold(Rational::zero(), |a, b| a + b)
}
