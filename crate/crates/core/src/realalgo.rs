//! The rounding-based factoring pipeline, written as host procedures that use
//! only real-RAM-legal primitives: `+ - * /`, the sign test, and floor. Every
//! primitive charges one unit to a shared [`CostMeter`], so the step-count
//! claims can be checked directly:
//!
//!   pow_by_squaring   O(bits(n))        real ops
//!   factorial_fast    O(bits(n)^2)      real + floor ops
//!   gcd_fast          O(min bits)       real + floor ops
//!   shamir_factor     O(bits(n)^3)      total, via binary search on k
//!
//! The factoring key fact: gcd(n, k!) > 1 iff n has a nontrivial factor at
//! most k, so the smallest such k is the smallest prime factor of n.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{floor_rational, BigInt, Rational};
use crate::machine::CostMeter;

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn r_add(a: &Rational, b: &Rational, m: &mut CostMeter) -> Rational {
    m.real_ops += 1;
    a + b
}

fn r_sub(a: &Rational, b: &Rational, m: &mut CostMeter) -> Rational {
    m.real_ops += 1;
    a - b
}

fn r_mul(a: &Rational, b: &Rational, m: &mut CostMeter) -> Rational {
    m.real_ops += 1;
    a * b
}

/// Caller guarantees b != 0.
fn r_div(a: &Rational, b: &Rational, m: &mut CostMeter) -> Rational {
    m.real_ops += 1;
    a / b
}

fn r_floor(x: &Rational, m: &mut CostMeter) -> Rational {
    m.floor_ops += 1;
    Rational::from_integer(floor_rational(x))
}

/// The sign test `x > 0`.
fn r_pos(x: &Rational, m: &mut CostMeter) -> bool {
    m.real_ops += 1;
    x.is_positive()
}

/// a > b as subtract-and-test.
fn r_gt(a: &Rational, b: &Rational, m: &mut CostMeter) -> bool {
    let d = r_sub(a, b, m);
    r_pos(&d, m)
}

/// a = b via two sign tests around the difference.
fn r_eq(a: &Rational, b: &Rational, m: &mut CostMeter) -> bool {
    let d = r_sub(a, b, m);
    let pos = r_pos(&d, m);
    m.real_ops += 1;
    let neg = d.is_negative();
    !pos && !neg
}

/// k^n by repeated squaring; n >= 0, 0^0 = 1. At most 2*bits(n)+2 real ops.
pub fn pow_by_squaring(k: &Rational, n: &BigInt, meter: &mut CostMeter) -> Rational {
    if n.is_zero() {
        return rat(1);
    }
    // exponent bookkeeping is word-side
    meter.word_ops += 1;
    let half = pow_by_squaring(k, &(n >> 1), meter);
    let sq = r_mul(&half, &half, meter);
    if n.is_odd() {
        r_mul(&sq, k, meter)
    } else {
        sq
    }
}

/// Bits lo..hi-1 of a non-negative integer, via two floor divisions: shift
/// off the low bits, then reduce modulo 2^(hi-lo) using
/// x mod M = x - floor(x/M)*M.
pub fn extract_bits(r: &BigInt, lo: u64, hi: u64, meter: &mut CostMeter) -> BigInt {
    assert!(lo < hi, "extract_bits needs lo < hi");
    let x = Rational::from_integer(r.clone());
    let p_lo = pow_by_squaring(&rat(2), &BigInt::from(lo), meter);
    let shifted = r_floor(&r_div(&x, &p_lo, meter), meter);
    let p_w = pow_by_squaring(&rat(2), &BigInt::from(hi - lo), meter);
    let q = r_floor(&r_div(&shifted, &p_w, meter), meter);
    let s = r_sub(&shifted, &r_mul(&q, &p_w, meter), meter);
    s.to_integer()
}

/// Central binomial coefficient binom(2m, m), read out of the bit blocks of
/// (2^l + 1)^(2m) with block length l = 2m: binom(2m, i) occupies the l bits
/// starting at position l*i, and no carries cross block boundaries.
pub fn central_binomial(m: &BigInt, meter: &mut CostMeter) -> BigInt {
    let l = m * 2; // block length, l >= 2m suffices
    meter.word_ops += 1;
    let p_l = pow_by_squaring(&rat(2), &l, meter);
    let base = r_add(&p_l, &rat(1), meter);
    let x = pow_by_squaring(&base, &l, meter);
    let l_u64 = u64::try_from(&l).expect("block index fits in u64");
    let m_u64 = u64::try_from(m).expect("block index fits in u64");
    meter.word_ops += 2; // block boundary arithmetic
    extract_bits(&x.to_integer(), l_u64 * m_u64, l_u64 * (m_u64 + 1), meter)
}

/// n! in O(bits(n)^2) charged ops: odd n peels one factor, even n = 2m uses
/// (2m)! = binom(2m, m) * (m!)^2.
pub fn factorial_fast(n: &BigInt, meter: &mut CostMeter) -> BigInt {
    if n <= &BigInt::one() {
        return BigInt::one();
    }
    meter.word_ops += 1; // parity of the word-register argument
    if n.is_odd() {
        let prev = factorial_fast(&(n - 1u32), meter);
        let product = r_mul(
            &Rational::from_integer(n.clone()),
            &Rational::from_integer(prev),
            meter,
        );
        return product.to_integer();
    }
    let m = n >> 1;
    let fm = Rational::from_integer(factorial_fast(&m, meter));
    let binom = Rational::from_integer(central_binomial(&m, meter));
    let sq = r_mul(&fm, &fm, meter);
    r_mul(&binom, &sq, meter).to_integer()
}

/// Evenness via rounding: x is even iff floor(x/2)*2 = x. Returns the parity
/// and floor(x/2).
fn half_and_parity(x: &Rational, meter: &mut CostMeter) -> (bool, Rational) {
    let h = r_div(x, &rat(2), meter);
    let f = r_floor(&h, meter);
    let back = r_mul(&f, &rat(2), meter);
    let even = r_eq(&back, x, meter);
    (even, f)
}

/// gcd(a, b) for a, b >= 1 in O(min(bits a, bits b)) charged ops: one
/// remainder step brings the larger number below the smaller, then each loop
/// turn shaves a bit (halve the even one; if both are odd, subtract).
pub fn gcd_fast(a: &BigInt, b: &BigInt, meter: &mut CostMeter) -> BigInt {
    let mut x = Rational::from_integer(a.clone());
    let mut y = Rational::from_integer(b.clone());
    if r_gt(&x, &y, meter) {
        std::mem::swap(&mut x, &mut y);
    }
    // y = x*q + r, replace y by r; gcd(x, y) = gcd(x, r)
    let q = r_floor(&r_div(&y, &x, meter), meter);
    y = r_sub(&y, &r_mul(&q, &x, meter), meter);

    // common factors of two are stripped here and restored at the end
    let mut twos = BigInt::zero();
    let result = loop {
        if r_eq(&x, &rat(0), meter) {
            break y;
        }
        if r_eq(&y, &rat(0), meter) {
            break x;
        }
        if r_eq(&x, &rat(1), meter) || r_eq(&y, &rat(1), meter) {
            break rat(1);
        }
        if r_eq(&x, &y, meter) {
            break x;
        }
        let (x_even, x_half) = half_and_parity(&x, meter);
        let (y_even, y_half) = half_and_parity(&y, meter);
        match (x_even, y_even) {
            (true, true) => {
                x = x_half;
                y = y_half;
                twos += 1;
                meter.word_ops += 1;
            }
            (true, false) => x = x_half,
            (false, true) => y = y_half,
            (false, false) => {
                // both odd: the difference is even, so the next turn halves
                if r_gt(&x, &y, meter) {
                    x = r_sub(&x, &y, meter);
                } else {
                    y = r_sub(&y, &x, meter);
                }
            }
        }
    };
    let scale = pow_by_squaring(&rat(2), &twos, meter);
    r_mul(&result, &scale, meter).to_integer()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOutcome {
    /// The smallest prime factor.
    Factor(BigInt),
    Prime,
}

impl fmt::Display for FactorOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorOutcome::Factor(k) => write!(f, "{k}"),
            FactorOutcome::Prime => write!(f, "PRIME"),
        }
    }
}

/// Binary search over k in [2, n-1] for the smallest k with gcd(n, k!) > 1.
/// That k is the smallest prime factor of n; if no such k exists, n is prime
/// (gcd(n, n!) > 1 always, so the search range stops at n-1).
pub fn shamir_factor(n: &BigInt, meter: &mut CostMeter) -> FactorOutcome {
    assert!(n >= &BigInt::from(2), "shamir_factor needs n >= 2");
    fn has_factor_upto(n: &BigInt, k: &BigInt, meter: &mut CostMeter) -> bool {
        let fact = factorial_fast(k, meter);
        let g = gcd_fast(n, &fact, meter);
        r_gt(&Rational::from_integer(g), &rat(1), meter)
    }
    let mut lo = BigInt::from(2);
    let mut hi = n - 1u32;
    if lo > hi {
        return FactorOutcome::Prime; // n = 2
    }
    while lo < hi {
        meter.word_ops += 2; // midpoint and comparison bookkeeping
        let mid = (&lo + &hi) >> 1;
        if has_factor_upto(n, &mid, meter) {
            hi = mid;
        } else {
            lo = mid + 1u32;
        }
    }
    if has_factor_upto(n, &lo, meter) {
        FactorOutcome::Factor(lo)
    } else {
        FactorOutcome::Prime
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigInt {
        BigInt::from(n)
    }

    /// Iterative product oracle.
    fn factorial_oracle(n: u64) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, i| acc * i)
    }

    /// Classic Euclid oracle.
    fn euclid(a: &BigInt, b: &BigInt) -> BigInt {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.mod_floor(&y);
            x = y;
            y = r;
        }
        x
    }

    /// Trial-division oracle for the smallest prime factor.
    fn smallest_factor_oracle(n: u64) -> Option<u64> {
        (2..n).find(|k| n % k == 0)
    }

    #[test]
    fn pow_examples() {
        let mut m = CostMeter::new();
        assert_eq!(pow_by_squaring(&rat(2), &big(10), &mut m), rat(1024));
        assert_eq!(pow_by_squaring(&rat(3), &big(0), &mut m), rat(1));
        let mut m = CostMeter::new();
        assert_eq!(pow_by_squaring(&rat(3), &big(5), &mut m), rat(243));
        assert!(m.real_ops <= 8, "real_ops = {}", m.real_ops);
    }

    #[test]
    fn pow_op_bound() {
        for n in 0u64..=400 {
            let mut m = CostMeter::new();
            pow_by_squaring(&rat(3), &big(n), &mut m);
            let bits = 64 - n.leading_zeros() as u64;
            assert!(m.real_ops <= 2 * bits + 2, "n={n}: {} ops", m.real_ops);
        }
    }

    #[test]
    fn extract_bits_examples() {
        let mut m = CostMeter::new();
        assert_eq!(extract_bits(&big(45), 1, 4, &mut m), big(6));
        assert_eq!(extract_bits(&big(45), 0, 6, &mut m), big(45));
        let x = BigInt::from(65u64).pow(6); // (2^6 + 1)^6
        assert_eq!(extract_bits(&x, 18, 24, &mut m), big(20));
    }

    #[test]
    fn extract_bits_matches_bitstring_oracle() {
        use num_traits::ToPrimitive;
        let word = 0b1011_0110_0101_1101u64;
        let r = big(word);
        for lo in 0..12 {
            for hi in (lo + 1)..16 {
                let mut m = CostMeter::new();
                let got = extract_bits(&r, lo, hi, &mut m).to_u64().unwrap();
                let want = (word >> lo) & ((1 << (hi - lo)) - 1);
                assert_eq!(got, want, "lo={lo} hi={hi}");
            }
        }
    }

    #[test]
    fn central_binomial_of_three_is_twenty() {
        let mut m = CostMeter::new();
        assert_eq!(central_binomial(&big(3), &mut m), big(20));
    }

    #[test]
    fn factorial_examples() {
        let mut m = CostMeter::new();
        assert_eq!(factorial_fast(&big(1), &mut m), big(1));
        assert_eq!(factorial_fast(&big(6), &mut m), big(720));
        assert_eq!(factorial_fast(&big(10), &mut m), big(3628800));
    }

    #[test]
    fn factorial_matches_iterative_oracle() {
        for n in 1..=32u64 {
            let mut m = CostMeter::new();
            assert_eq!(factorial_fast(&big(n), &mut m), factorial_oracle(n), "n={n}");
        }
    }

    #[test]
    fn gcd_examples() {
        let mut m = CostMeter::new();
        assert_eq!(gcd_fast(&big(12), &big(18), &mut m), big(6));
        assert_eq!(gcd_fast(&big(1), &big(999), &mut m), big(1));
        assert_eq!(gcd_fast(&big(128), &big(128), &mut m), big(128));
    }

    #[test]
    fn gcd_matches_euclid_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9cd);
        for _ in 0..500 {
            let a = big(rng.gen_range(1..u32::MAX as u64));
            let b = big(rng.gen_range(1..u32::MAX as u64));
            let mut m = CostMeter::new();
            assert_eq!(gcd_fast(&a, &b, &mut m), euclid(&a, &b), "a={a} b={b}");
        }
    }

    #[test]
    fn gcd_of_huge_factorial_is_cheap() {
        // the remainder step collapses k! immediately; the op count depends
        // on the small side only
        let mut m = CostMeter::new();
        let fact = factorial_oracle(200);
        let g = gcd_fast(&big(1999), &fact, &mut m);
        assert_eq!(g, euclid(&big(1999), &fact));
        assert!(m.total() < 800, "ops = {}", m.total());
    }

    #[test]
    fn shamir_examples() {
        let mut m = CostMeter::new();
        assert_eq!(shamir_factor(&big(15), &mut m), FactorOutcome::Factor(big(3)));
        assert_eq!(shamir_factor(&big(4), &mut m), FactorOutcome::Factor(big(2)));
        assert_eq!(shamir_factor(&big(13), &mut m), FactorOutcome::Prime);
        assert_eq!(shamir_factor(&big(2), &mut m), FactorOutcome::Prime);
        assert_eq!(shamir_factor(&big(3), &mut m), FactorOutcome::Prime);
    }

    #[test]
    fn shamir_matches_trial_division_on_a_sample() {
        for n in 4..=200u64 {
            let mut m = CostMeter::new();
            let got = shamir_factor(&big(n), &mut m);
            match smallest_factor_oracle(n) {
                Some(k) => assert_eq!(got, FactorOutcome::Factor(big(k)), "n={n}"),
                None => assert_eq!(got, FactorOutcome::Prime, "n={n}"),
            }
        }
    }
}
