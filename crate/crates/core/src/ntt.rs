//! Forward and inverse negacyclic NTT with bit-reversed outputs.
//!
//! The forward transform uses Cooley-Tukey butterflies on natural-order
//! input and leaves the result in bit-reversed order; the inverse uses
//! Gentleman-Sande butterflies on bit-reversed input and restores natural
//! order, scaling by `n^-1` at the end. No reordering pass runs in between:
//! pointwise operations consume the bit-reversed data directly.
//!
//! Both kernels stream their twiddle tables front to back. The forward
//! table stores `psi^bit_reverse(i)` at slot `i`; the inverse table is
//! scrambled so that slot `1 + bit_reverse(i - 1)` holds `psi^-i`, which is
//! exactly the order the Gentleman-Sande stages consume.

use crate::error::{Error, Result};
use crate::modarith::{
    find_primitive_2n_root, mod_add, mod_inverse, mod_mul, mod_sub, ResidueModulus,
};
use crate::polyring::{Domain, RnsPolynomial, SubPolynomial};
use crate::rns::RnsBase;

/// How DPU threads share transform work; a scheduling hint only, the
/// kernels themselves are single-threaded per sub-polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threading {
    /// One thread per sub-polynomial.
    CoarseGrained,
    /// Several threads inside one sub-polynomial.
    FineGrained,
}

/// Static shape of a transform: length, stage count, threading hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NttPlan {
    pub n: usize,
    pub log2_n: u32,
    pub threading: Threading,
}

impl NttPlan {
    pub fn new(n: usize, threading: Threading) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::BadPolyLength(n));
        }
        Ok(Self {
            n,
            log2_n: n.trailing_zeros(),
            threading,
        })
    }

    /// Transforms run `log2(n)` passes over the data.
    pub fn stages(&self) -> u32 {
        self.log2_n
    }
}

/// Reverses the low `width_bits` bits of `index`. Involution.
#[inline]
pub fn bit_reverse(index: usize, width_bits: u32) -> usize {
    debug_assert!(width_bits as usize <= usize::BITS as usize);
    debug_assert!(index < (1usize << width_bits));
    if width_bits == 0 {
        return 0;
    }
    index.reverse_bits() >> (usize::BITS - width_bits)
}

/// Precomputed powers of a primitive `2n`-th root of unity for one modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwiddleTable {
    modulus_index: usize,
    modulus: ResidueModulus,
    psi: u32,
    /// `forward[i] = psi^bit_reverse(i, log2 n)`; consumed sequentially
    /// from slot 1 by the forward kernel.
    forward: Vec<u32>,
    /// `inverse_scrambled[1 + bit_reverse(i - 1, log2 n)] = psi^-i`; slot 0
    /// holds `psi^0 = 1` and is never read. Consumed sequentially from
    /// slot 1 by the inverse kernel.
    inverse_scrambled: Vec<u32>,
    n_inv: u32,
}

impl TwiddleTable {
    pub fn n(&self) -> usize {
        self.forward.len()
    }

    pub fn log2_n(&self) -> u32 {
        self.forward.len().trailing_zeros()
    }

    pub fn modulus_index(&self) -> usize {
        self.modulus_index
    }

    pub fn modulus(&self) -> &ResidueModulus {
        &self.modulus
    }

    pub fn psi(&self) -> u32 {
        self.psi
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn inverse_scrambled(&self) -> &[u32] {
        &self.inverse_scrambled
    }

    pub fn n_inv(&self) -> u32 {
        self.n_inv
    }

    /// Rebuilds a table around externally supplied twiddle data (the
    /// interface codec path). Validates range and the `n_inv` relation but
    /// trusts the table contents themselves.
    pub fn from_raw_parts(
        modulus: ResidueModulus,
        modulus_index: usize,
        forward: Vec<u32>,
        inverse_scrambled: Vec<u32>,
        n_inv: u32,
    ) -> Result<Self> {
        let n = forward.len();
        if n < 2 || !n.is_power_of_two() || inverse_scrambled.len() != n {
            return Err(Error::BadPolyLength(n));
        }
        for &t in forward.iter().chain(&inverse_scrambled) {
            if t >= modulus.p() {
                return Err(Error::ResidueOutOfRange {
                    index: 0,
                    value: t as u64,
                    modulus: modulus.p() as u64,
                });
            }
        }
        if mod_mul(n_inv, (n as u64 % modulus.p() as u64) as u32, &modulus) != 1 {
            return Err(Error::ZeroInverse);
        }
        let psi = forward[bit_reverse(1, n.trailing_zeros())];
        Ok(Self {
            modulus_index,
            modulus,
            psi,
            forward,
            inverse_scrambled,
            n_inv,
        })
    }

    /// De-scrambles the inverse table back to logical power order
    /// `psi^-1, psi^-2, ...` (index 0 holds `psi^0`).
    pub fn inverse_logical_order(&self) -> Vec<u32> {
        let n = self.n();
        let w = self.log2_n();
        let mut out = vec![0u32; n];
        out[0] = self.inverse_scrambled[0];
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = self.inverse_scrambled[1 + bit_reverse(i - 1, w)];
        }
        out
    }
}

/// Builds the twiddle table for `(m, n)`. Deterministic: the root comes
/// from [`find_primitive_2n_root`].
pub fn build_twiddles(m: &ResidueModulus, n: usize, modulus_index: usize) -> Result<TwiddleTable> {
    let psi = find_primitive_2n_root(m, n)?;
    let psi_inv = mod_inverse(psi, m)?;
    let w = n.trailing_zeros();

    let mut forward = vec![0u32; n];
    let mut power = 1u32;
    for i in 0..n {
        forward[bit_reverse(i, w)] = power;
        power = mod_mul(power, psi, m);
    }

    let mut inverse_scrambled = vec![0u32; n];
    inverse_scrambled[0] = 1;
    let mut inv_power = 1u32;
    for i in 1..n {
        inv_power = mod_mul(inv_power, psi_inv, m);
        inverse_scrambled[1 + bit_reverse(i - 1, w)] = inv_power;
    }

    let n_inv = mod_inverse((n as u64 % m.p() as u64) as u32, m)?;
    Ok(TwiddleTable {
        modulus_index,
        modulus: *m,
        psi,
        forward,
        inverse_scrambled,
        n_inv,
    })
}

/// One table per base modulus, in base order.
pub fn twiddles_for_base(base: &RnsBase, n: usize) -> Result<Vec<TwiddleTable>> {
    base.moduli()
        .iter()
        .enumerate()
        .map(|(i, m)| build_twiddles(m, n, i))
        .collect()
}

fn check_sub(sub: &SubPolynomial, table: &TwiddleTable, expected: Domain) -> Result<()> {
    if sub.domain() != expected {
        return Err(Error::DomainMismatch {
            expected,
            found: sub.domain(),
        });
    }
    if sub.len() != table.n() {
        return Err(Error::ShapeMismatch {
            what: "polynomial length",
            left: sub.len(),
            right: table.n(),
        });
    }
    if sub.modulus_index() != table.modulus_index() {
        return Err(Error::ShapeMismatch {
            what: "modulus index",
            left: sub.modulus_index(),
            right: table.modulus_index(),
        });
    }
    Ok(())
}

/// Forward negacyclic NTT: Cooley-Tukey butterflies, natural-order input,
/// bit-reversed output. Slot `j` of the result holds the evaluation at
/// `psi^(2 * bit_reverse(j) + 1)`. In place; the input storage is reused.
pub fn ntt_forward(mut sub: SubPolynomial, table: &TwiddleTable) -> Result<SubPolynomial> {
    check_sub(&sub, table, Domain::Coefficient)?;
    forward_kernel(sub.coeffs_mut(), table);
    sub.set_domain(Domain::NttBitReversed);
    Ok(sub)
}

/// Inverse negacyclic NTT: Gentleman-Sande butterflies, bit-reversed input,
/// natural-order output, final scaling by `n^-1`. Consumes the scrambled
/// inverse table strictly sequentially.
pub fn ntt_inverse(mut sub: SubPolynomial, table: &TwiddleTable) -> Result<SubPolynomial> {
    check_sub(&sub, table, Domain::NttBitReversed)?;
    inverse_kernel(sub.coeffs_mut(), table, |_| {});
    sub.set_domain(Domain::Coefficient);
    Ok(sub)
}

/// [`ntt_inverse`] with every twiddle-table index it reads appended to
/// `access_log`, for validating the sequential-access contract.
#[doc(hidden)]
pub fn ntt_inverse_traced(
    mut sub: SubPolynomial,
    table: &TwiddleTable,
    access_log: &mut Vec<usize>,
) -> Result<SubPolynomial> {
    check_sub(&sub, table, Domain::NttBitReversed)?;
    inverse_kernel(sub.coeffs_mut(), table, |i| access_log.push(i));
    sub.set_domain(Domain::Coefficient);
    Ok(sub)
}

fn forward_kernel(a: &mut [u32], table: &TwiddleTable) {
    let n = a.len();
    let m = &table.modulus;
    let mut t = n;
    let mut groups = 1;
    let mut root = 1usize;
    while groups < n {
        t /= 2;
        for i in 0..groups {
            let s = table.forward[root];
            root += 1;
            let j1 = 2 * i * t;
            for j in j1..j1 + t {
                let u = a[j];
                let v = mod_mul(a[j + t], s, m);
                a[j] = mod_add(u, v, m);
                a[j + t] = mod_sub(u, v, m);
            }
        }
        groups *= 2;
    }
}

fn inverse_kernel(a: &mut [u32], table: &TwiddleTable, mut observe: impl FnMut(usize)) {
    let n = a.len();
    let m = &table.modulus;
    let mut t = 1;
    let mut groups = n / 2;
    let mut root = 1usize;
    while groups >= 1 {
        let mut j1 = 0;
        for _ in 0..groups {
            observe(root);
            let s = table.inverse_scrambled[root];
            root += 1;
            for j in j1..j1 + t {
                let u = a[j];
                let v = a[j + t];
                a[j] = mod_add(u, v, m);
                a[j + t] = mod_mul(mod_sub(u, v, m), s, m);
            }
            j1 += 2 * t;
        }
        t *= 2;
        groups /= 2;
    }
    for x in a.iter_mut() {
        *x = mod_mul(*x, table.n_inv, m);
    }
}

/// Applies the forward transform to every sub-polynomial.
pub fn forward_polynomial(poly: RnsPolynomial, tables: &[TwiddleTable]) -> Result<RnsPolynomial> {
    transform_polynomial(poly, tables, ntt_forward)
}

/// Applies the inverse transform to every sub-polynomial.
pub fn inverse_polynomial(poly: RnsPolynomial, tables: &[TwiddleTable]) -> Result<RnsPolynomial> {
    transform_polynomial(poly, tables, ntt_inverse)
}

fn transform_polynomial(
    poly: RnsPolynomial,
    tables: &[TwiddleTable],
    kernel: fn(SubPolynomial, &TwiddleTable) -> Result<SubPolynomial>,
) -> Result<RnsPolynomial> {
    if poly.k() != tables.len() {
        return Err(Error::ShapeMismatch {
            what: "table count",
            left: poly.k(),
            right: tables.len(),
        });
    }
    RnsPolynomial::new(
        poly.into_subs()
            .into_iter()
            .zip(tables)
            .map(|(s, t)| kernel(s, t))
            .collect::<Result<Vec<_>>>()?,
    )
}
