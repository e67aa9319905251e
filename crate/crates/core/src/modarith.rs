//! Scalar modular arithmetic over 32-bit NTT-friendly primes.
//!
//! Residues are kept in 32-bit words and every multiplication goes through
//! [`wide_mul_32x32`], which recombines four 16x16-bit partial products the
//! way the target DPU routine does, followed by a Barrett reduction with a
//! fixed 64-bit shift. All functions here are pure and functionally exact;
//! cycle counts for the DPU routines live in the simulator's cost table.

use crate::error::{Error, Result};

/// One NTT-friendly prime together with its precomputed Barrett factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueModulus {
    p: u32,
    barrett_factor: u64,
    two_n: u64,
}

impl ResidueModulus {
    /// Wraps a prime `p`. The stored negacyclic order is the largest power
    /// of two `2n` with `p = 1 (mod 2n)`; smaller powers are supported too.
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 {
            return Err(Error::ModulusOutOfRange(p as u64));
        }
        if !is_prime_u32(p) {
            return Err(Error::CompositeModulus(p as u64));
        }
        let two_n = 1u64 << (p - 1).trailing_zeros();
        Ok(Self {
            p,
            barrett_factor: barrett_factor(p),
            two_n,
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// `floor(2^64 / p)`, recomputable from `p`.
    #[inline]
    pub fn barrett_factor(&self) -> u64 {
        self.barrett_factor
    }

    /// Largest power-of-two negacyclic order `2n` with `p = 1 (mod 2n)`.
    #[inline]
    pub fn two_n(&self) -> u64 {
        self.two_n
    }

    /// Whether this prime supports a negacyclic transform of order `two_n`.
    pub fn supports_order(&self, two_n: u64) -> bool {
        two_n.is_power_of_two() && two_n <= self.two_n
    }
}

/// `floor(2^64 / p)` -- the scaled reciprocal used by [`barrett_reduce`].
pub fn barrett_factor(p: u32) -> u64 {
    ((1u128 << 64) / p as u128) as u64
}

/// Exact 64-bit product of two 32-bit values, kept as two 32-bit limbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WideProduct {
    pub lo: u32,
    pub hi: u32,
}

impl WideProduct {
    /// Reassembles `hi * 2^32 + lo`.
    #[inline]
    pub fn value(self) -> u64 {
        ((self.hi as u64) << 32) | self.lo as u64
    }
}

/// 32x32 -> 64-bit multiplication built from four 16x16-bit partial
/// products, recombined as `hi << 32 + (m1 + m2) << 16 + lo`.
///
/// The three-multiplication Karatsuba recombination is deliberately not
/// used; its extra fix-up work costs more than the saved multiplication on
/// the modeled hardware.
#[inline]
pub fn wide_mul_32x32(a: u32, b: u32) -> WideProduct {
    let (a0, a1) = (a & 0xFFFF, a >> 16);
    let (b0, b1) = (b & 0xFFFF, b >> 16);
    let lo = a0 * b0;
    let m1 = a0 * b1;
    let m2 = a1 * b0;
    let hi = a1 * b1;
    // m1 + m2 may carry past 32 bits; fold it through 64-bit adds.
    let mid = m1 as u64 + m2 as u64;
    let low = lo as u64 + (mid << 16);
    let high = hi as u64 + (low >> 32);
    WideProduct {
        lo: low as u32,
        hi: high as u32,
    }
}

/// Barrett reduction: `v mod p` via `v - p * floor(v * R / 2^64)` and a
/// conditional subtraction, no division.
///
/// Valid for every 64-bit `v`: with `R = floor(2^64 / p)` and `p < 2^32`,
/// the remainder estimate lands in `[0, 2p)`.
#[inline]
pub fn barrett_reduce(v: u64, m: &ResidueModulus) -> u32 {
    let p = m.p as u64;
    let q = ((v as u128 * m.barrett_factor as u128) >> 64) as u64;
    let mut r = v - q * p;
    if r >= p {
        r -= p;
    }
    debug_assert!(r < p);
    r as u32
}

/// `(a + b) mod p` for reduced inputs; single conditional correction.
#[inline]
pub fn mod_add(a: u32, b: u32, m: &ResidueModulus) -> u32 {
    debug_assert!(a < m.p && b < m.p);
    let s = a as u64 + b as u64;
    let p = m.p as u64;
    if s >= p {
        (s - p) as u32
    } else {
        s as u32
    }
}

/// `(a - b) mod p` for reduced inputs; single conditional correction.
#[inline]
pub fn mod_sub(a: u32, b: u32, m: &ResidueModulus) -> u32 {
    debug_assert!(a < m.p && b < m.p);
    if a >= b {
        a - b
    } else {
        (a as u64 + m.p as u64 - b as u64) as u32
    }
}

/// `(-a) mod p`, with 0 as a fixed point.
#[inline]
pub fn mod_neg(a: u32, m: &ResidueModulus) -> u32 {
    debug_assert!(a < m.p);
    if a == 0 {
        0
    } else {
        m.p - a
    }
}

/// `(a * b) mod p`: the wide multiplication followed by Barrett reduction.
#[inline]
pub fn mod_mul(a: u32, b: u32, m: &ResidueModulus) -> u32 {
    debug_assert!(a < m.p && b < m.p);
    barrett_reduce(wide_mul_32x32(a, b).value(), m)
}

/// Square-and-multiply exponentiation.
pub fn mod_pow(base: u32, mut exp: u64, m: &ResidueModulus) -> u32 {
    let mut acc: u32 = 1 % m.p;
    let mut sq = base % m.p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, sq, m);
        }
        sq = mod_mul(sq, sq, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse via Fermat (`p` is prime). Errors on zero.
pub fn mod_inverse(a: u32, m: &ResidueModulus) -> Result<u32> {
    if a.is_multiple_of(m.p) {
        return Err(Error::ZeroInverse);
    }
    Ok(mod_pow(a, m.p as u64 - 2, m))
}

/// Deterministic Miller-Rabin; the base set {2, 7, 61} is exact for all
/// inputs below 4_759_123_141, which covers the full u32 range.
pub fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u32, 3, 5, 7, 11, 13] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let n64 = n as u64;
    let d = n64 - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 7, 61] {
        let a = a % n64;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod_u64(a, d, n64);
        if x == 1 || x == n64 - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n64;
            if x == n64 - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Plain u64 exponentiation; safe because n < 2^32 keeps squares in range.
fn pow_mod_u64(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1u64;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % n;
        }
        base = base * base % n;
        exp >>= 1;
    }
    acc
}

/// Downward walk over primes `p = 1 (mod 2n)` with exactly `bit_size` bits.
///
/// Candidates step by `2n` starting just below `2^bit_size`, so the yielded
/// sequence is deterministic for a fixed `(n, bit_size)`.
#[derive(Debug, Clone)]
pub struct NttPrimeSequence {
    step: u64,
    candidate: u64,
    floor: u64,
}

impl NttPrimeSequence {
    pub fn new(n: usize, bit_size: u32) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::BadPolyLength(n));
        }
        if !(2..=32).contains(&bit_size) {
            return Err(Error::BadBitSize(bit_size));
        }
        let two_n = 2 * n as u64;
        let hi = 1u64 << bit_size;
        if two_n >= hi {
            return Err(Error::PrimeExhausted { two_n, bit_size });
        }
        // Largest candidate = 1 (mod 2n) strictly below 2^bit_size.
        let candidate = ((hi - 2) / two_n) * two_n + 1;
        Ok(Self {
            step: two_n,
            candidate,
            floor: 1u64 << (bit_size - 1),
        })
    }
}

impl Iterator for NttPrimeSequence {
    type Item = ResidueModulus;

    fn next(&mut self) -> Option<ResidueModulus> {
        while self.candidate > self.floor {
            let c = self.candidate;
            self.candidate = c.saturating_sub(self.step);
            if c > 2 && is_prime_u32(c as u32) {
                return Some(ResidueModulus::new(c as u32).expect("candidate vetted"));
            }
        }
        None
    }
}

/// The `index`-th (0-based) largest prime with exactly `bit_size` bits and
/// `p = 1 (mod 2n)`. Errors when the range holds no further prime.
pub fn find_ntt_prime(n: usize, bit_size: u32, index: usize) -> Result<ResidueModulus> {
    let mut seq = NttPrimeSequence::new(n, bit_size)?;
    seq.nth(index).ok_or(Error::PrimeExhausted {
        two_n: 2 * n as u64,
        bit_size,
    })
}

/// Finds a primitive `2n`-th root of unity `psi` modulo `m.p()`:
/// `psi^(2n) = 1` and `psi^n = -1`, which is what makes the wrap at `x^n`
/// negate. Deterministic: the first generator candidate (from 2 upward)
/// whose `(p-1)/(2n)`-th power has exact order `2n` wins.
pub fn find_primitive_2n_root(m: &ResidueModulus, n: usize) -> Result<u32> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::BadPolyLength(n));
    }
    let two_n = 2 * n as u64;
    if !m.supports_order(two_n) {
        return Err(Error::UnsupportedOrder {
            p: m.p as u64,
            two_n,
        });
    }
    let exp = (m.p as u64 - 1) / two_n;
    for g in 2..m.p {
        let psi = mod_pow(g, exp, m);
        // Order divides 2n (a power of two), so psi^n = -1 pins it at 2n.
        if mod_pow(psi, n as u64, m) == m.p - 1 {
            return Ok(psi);
        }
    }
    Err(Error::NoPrimitiveRoot { p: m.p as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn p17() -> ResidueModulus {
        ResidueModulus::new(17).unwrap()
    }

    #[test]
    fn wide_mul_examples() {
        assert_eq!(wide_mul_32x32(0, 12345).value(), 0);
        let w = wide_mul_32x32(1 << 16, 1 << 16);
        assert_eq!((w.hi, w.lo), (1, 0));
        // Oracle: exact product in 128-bit arithmetic.
        let oracle = u32::MAX as u128 * u32::MAX as u128;
        assert_eq!(oracle, 0xFFFF_FFFE_0000_0001);
        assert_eq!(wide_mul_32x32(u32::MAX, u32::MAX).value() as u128, oracle);
    }

    #[test]
    fn wide_mul_exhaustive_bytes() {
        for a in 0..=u8::MAX as u32 {
            for b in 0..=u8::MAX as u32 {
                assert_eq!(wide_mul_32x32(a, b).value(), (a * b) as u64);
            }
        }
    }

    #[test]
    #[ignore = "2^32 cases; run explicitly with --ignored on a release build"]
    fn wide_mul_exhaustive_sixteen_bit() {
        for a in 0..=u16::MAX as u32 {
            for b in 0..=u16::MAX as u32 {
                assert_eq!(wide_mul_32x32(a, b).value(), a as u64 * b as u64);
            }
        }
    }

    #[test]
    fn wide_mul_sixteen_bit_grid() {
        // 16-bit inputs on a stride-torn grid plus the boundary rows.
        let edge = [0u32, 1, 2, 0x7FFF, 0x8000, 0xFFFE, 0xFFFF];
        for a in edge {
            for b in 0..=0xFFFFu32 {
                assert_eq!(wide_mul_32x32(a, b).value(), (a as u64) * (b as u64));
                assert_eq!(wide_mul_32x32(b, a).value(), (a as u64) * (b as u64));
            }
        }
    }

    proptest! {
        #[test]
        fn wide_mul_matches_native(a: u32, b: u32) {
            prop_assert_eq!(wide_mul_32x32(a, b).value(), a as u64 * b as u64);
        }

        #[test]
        fn barrett_matches_rem(v: u64, raw in 3u32..u32::MAX) {
            // Walk up to the next prime so the modulus is always valid.
            let mut p = raw | 1;
            while !is_prime_u32(p) {
                p = p.wrapping_add(2);
                if p < 3 { p = 3; }
            }
            let m = ResidueModulus::new(p).unwrap();
            prop_assert_eq!(barrett_reduce(v, &m) as u64, v % p as u64);
        }

        #[test]
        fn mod_mul_matches_oracle(a: u64, b: u64) {
            let m = find_ntt_prime(1024, 30, 0).unwrap();
            let (a, b) = ((a % m.p() as u64) as u32, (b % m.p() as u64) as u32);
            let want = (a as u128 * b as u128 % m.p() as u128) as u32;
            prop_assert_eq!(mod_mul(a, b, &m), want);
        }

        #[test]
        fn inverse_roundtrip(a in 1u64..) {
            let m = find_ntt_prime(2048, 30, 1).unwrap();
            let a = (a % (m.p() as u64 - 1)) as u32 + 1;
            let inv = mod_inverse(a, &m).unwrap();
            prop_assert_eq!(mod_mul(a, inv, &m), 1);
        }
    }

    #[test]
    fn barrett_examples() {
        let m = find_ntt_prime(1024, 27, 0).unwrap();
        assert_eq!(barrett_reduce(0, &m), 0);
        assert_eq!(barrett_reduce(m.p() as u64, &m), 0);
        // Valid for v far above p^2 as well (digit sum 90 => divisible by 3).
        let m3 = ResidueModulus::new(3).unwrap();
        let v = 12345678901234567890u64;
        assert_eq!(v % 3, 0);
        assert_eq!(barrett_reduce(v, &m3), 0);
    }

    #[test]
    fn barrett_factor_recomputable() {
        for idx in 0..4 {
            let m = find_ntt_prime(4096, 30, idx).unwrap();
            assert_eq!(m.barrett_factor(), barrett_factor(m.p()));
            assert_eq!((m.p() as u64 - 1) % 8192, 0);
        }
    }

    #[test]
    fn add_sub_examples() {
        let m = p17();
        assert_eq!(mod_add(16, 1, &m), 0);
        assert_eq!(mod_sub(0, 1, &m), 16);
        assert_eq!(mod_add(5, 0, &m), 5);
        assert_eq!(mod_neg(0, &m), 0);
        assert_eq!(mod_neg(4, &m), 13);
        // Near the top of the 32-bit range the correction must not overflow.
        let big = NttPrimeSequence::new(2, 32).unwrap().next().unwrap();
        assert_eq!(mod_add(big.p() - 1, 1, &big), 0);
        assert_eq!(mod_sub(0, 1, &big), big.p() - 1);
    }

    #[test]
    fn pow_and_inverse_examples() {
        let m = p17();
        assert_eq!(mod_pow(5, 0, &m), 1);
        assert_eq!(mod_inverse(1, &m).unwrap(), 1);
        for g in 1..17 {
            assert_eq!(mod_pow(g, 16, &m), 1); // Fermat
        }
        assert_eq!(mod_inverse(0, &m), Err(Error::ZeroInverse));
        let m2 = find_ntt_prime(1024, 27, 0).unwrap();
        assert_eq!(mod_mul(m2.p() - 1, m2.p() - 1, &m2), 1); // (-1)^2 = 1
        assert_eq!(mod_mul(1, 777, &m2), 777);
    }

    /// Trial-division walk used as the independent oracle for prime search.
    fn sieve_primes_downward(bit_size: u32, two_n: u64) -> Vec<u32> {
        let hi = 1u64 << bit_size;
        let lo = 1u64 << (bit_size - 1);
        let mut found = Vec::new();
        let mut c = ((hi - 2) / two_n) * two_n + 1;
        while c > lo {
            let mut prime = c > 1;
            let mut d = 2u64;
            while d * d <= c {
                if c.is_multiple_of(d) {
                    prime = false;
                    break;
                }
                d += 1;
            }
            if prime {
                found.push(c as u32);
            }
            c -= two_n;
        }
        found
    }

    #[test]
    fn prime_search_matches_sieve_oracle() {
        let oracle = sieve_primes_downward(27, 2048);
        let got: Vec<u32> = NttPrimeSequence::new(1024, 27)
            .unwrap()
            .map(|m| m.p())
            .collect();
        assert_eq!(got, oracle);
        assert_eq!(find_ntt_prime(1024, 27, 0).unwrap().p(), oracle[0]);
    }

    #[test]
    fn prime_search_exhaustion() {
        let oracle = sieve_primes_downward(16, 8192);
        assert!(oracle.len() < 3, "oracle found {:?}", oracle);
        let got: Vec<u32> = NttPrimeSequence::new(4096, 16)
            .unwrap()
            .map(|m| m.p())
            .collect();
        assert_eq!(got, oracle);
        assert_eq!(
            find_ntt_prime(4096, 16, oracle.len()),
            Err(Error::PrimeExhausted {
                two_n: 8192,
                bit_size: 16
            })
        );
    }

    #[test]
    fn prime_search_deterministic() {
        let a = find_ntt_prime(2048, 30, 2).unwrap();
        let b = find_ntt_prime(2048, 30, 2).unwrap();
        assert_eq!(a, b);
    }

    /// Brute force over Z_p: all elements of exact multiplicative order 2n.
    fn primitive_roots_oracle(p: u32, n: usize) -> Vec<u32> {
        let m = ResidueModulus::new(p).unwrap();
        let two_n = 2 * n as u64;
        (1..p)
            .filter(|&x| {
                let mut pow = 1u32;
                for k in 1..=two_n {
                    pow = mod_mul(pow, x, &m);
                    if pow == 1 {
                        return k == two_n;
                    }
                }
                false
            })
            .collect()
    }

    #[test]
    fn primitive_root_small_prime() {
        let m = p17();
        let oracle = primitive_roots_oracle(17, 4);
        assert_eq!(oracle, vec![2, 8, 9, 15]);
        let psi = find_primitive_2n_root(&m, 4).unwrap();
        assert!(oracle.contains(&psi));
        assert_eq!(mod_pow(psi, 4, &m), 16); // psi^n = -1
        // Order-16 elements are the classic primitive roots mod 17.
        assert_eq!(
            primitive_roots_oracle(17, 8),
            vec![3, 5, 6, 7, 10, 11, 12, 14]
        );
        let psi8 = find_primitive_2n_root(&m, 8).unwrap();
        assert!(primitive_roots_oracle(17, 8).contains(&psi8));
    }

    #[test]
    fn primitive_root_exhaustive_order() {
        let m = ResidueModulus::new(97).unwrap(); // 96 = 2^5 * 3
        let psi = find_primitive_2n_root(&m, 16).unwrap();
        let mut pow = 1u32;
        for k in 1..32 {
            pow = mod_mul(pow, psi, &m);
            assert_ne!(pow, 1, "psi^{k} = 1 before 2n");
        }
        assert_eq!(mod_mul(pow, psi, &m), 1);
    }

    #[test]
    fn primitive_root_large_primes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [1024usize, 4096] {
            let m = find_ntt_prime(n, 30, rng.gen_range(0..4)).unwrap();
            let psi = find_primitive_2n_root(&m, n).unwrap();
            assert_eq!(mod_pow(psi, n as u64, &m), m.p() - 1);
            assert_eq!(mod_pow(psi, 2 * n as u64, &m), 1);
        }
    }

    #[test]
    fn barrett_exhaustive_small_prime() {
        let m = p17();
        for v in 0..(17u64 * 17) {
            assert_eq!(barrett_reduce(v, &m) as u64, v % 17);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            ResidueModulus::new(15),
            Err(Error::CompositeModulus(15))
        ));
        assert!(matches!(
            NttPrimeSequence::new(1000, 27),
            Err(Error::BadPolyLength(1000))
        ));
        assert!(matches!(
            NttPrimeSequence::new(1024, 33),
            Err(Error::BadBitSize(33))
        ));
    }
}
