//! RNS polynomial containers in the tuple-of-arrays layout, pointwise
//! operations, layout conversions, and the brute-force negacyclic
//! multiplication oracle.
//!
//! A polynomial over `Z_M[x]/(x^n + 1)` is held as `k` sub-polynomials, one
//! per base modulus, each a contiguous array of `n` residues. The domain
//! flag travels with the data and is enforced at every operation boundary.

use crate::error::{Error, Result};
use crate::modarith::{mod_add, mod_mul, mod_neg, mod_sub, ResidueModulus};
use crate::rns::RnsBase;

/// Which representation the residues are in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Plain coefficients of the ring element.
    Coefficient,
    /// Evaluations at odd root powers, in bit-reversed slot order.
    NttBitReversed,
}

/// Flat buffer orderings for a `k x n` residue matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Sub-polynomial after sub-polynomial (the native layout).
    TupleOfArrays,
    /// Coefficient after coefficient, each a k-tuple of residues.
    ArrayOfTuples,
}

/// One polynomial's residues under a single base modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubPolynomial {
    coeffs: Vec<u32>,
    modulus_index: usize,
    domain: Domain,
}

impl SubPolynomial {
    pub fn new(
        base: &RnsBase,
        modulus_index: usize,
        coeffs: Vec<u32>,
        domain: Domain,
    ) -> Result<Self> {
        if modulus_index >= base.len() {
            return Err(Error::ShapeMismatch {
                what: "modulus index",
                left: modulus_index,
                right: base.len(),
            });
        }
        if coeffs.len() < 2 || !coeffs.len().is_power_of_two() {
            return Err(Error::BadPolyLength(coeffs.len()));
        }
        let p = base.modulus(modulus_index).p();
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= p {
                return Err(Error::ResidueOutOfRange {
                    index: i,
                    value: c as u64,
                    modulus: p as u64,
                });
            }
        }
        Ok(Self {
            coeffs,
            modulus_index,
            domain,
        })
    }

    pub(crate) fn from_parts_unchecked(
        coeffs: Vec<u32>,
        modulus_index: usize,
        domain: Domain,
    ) -> Self {
        Self {
            coeffs,
            modulus_index,
            domain,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn modulus_index(&self) -> usize {
        self.modulus_index
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [u32] {
        &mut self.coeffs
    }

    pub(crate) fn set_domain(&mut self, domain: Domain) {
        self.domain = domain;
    }

    /// Binary dump: `n` little-endian 4-byte residues.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.coeffs.len() * 4);
        for &c in &self.coeffs {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    /// Inverse of [`to_le_bytes`](Self::to_le_bytes); residues are
    /// re-validated against the base.
    pub fn from_le_bytes(
        base: &RnsBase,
        modulus_index: usize,
        bytes: &[u8],
        domain: Domain,
    ) -> Result<Self> {
        if !bytes.len().is_multiple_of(4) {
            return Err(Error::BadPolyLength(bytes.len()));
        }
        let coeffs = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Self::new(base, modulus_index, coeffs, domain)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.modulus_index != other.modulus_index {
            return Err(Error::ShapeMismatch {
                what: "modulus index",
                left: self.modulus_index,
                right: other.modulus_index,
            });
        }
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::ShapeMismatch {
                what: "polynomial length",
                left: self.coeffs.len(),
                right: other.coeffs.len(),
            });
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch {
                expected: self.domain,
                found: other.domain,
            });
        }
        Ok(())
    }
}

/// A full RNS polynomial: `k` sub-polynomials, one per base modulus, each
/// contiguous (tuple of arrays of residues).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnsPolynomial {
    subs: Vec<SubPolynomial>,
}

impl RnsPolynomial {
    pub fn new(subs: Vec<SubPolynomial>) -> Result<Self> {
        if subs.is_empty() {
            return Err(Error::EmptyBase);
        }
        let n = subs[0].len();
        let domain = subs[0].domain();
        for (i, s) in subs.iter().enumerate() {
            if s.modulus_index() != i {
                return Err(Error::ShapeMismatch {
                    what: "sub-polynomial order",
                    left: s.modulus_index(),
                    right: i,
                });
            }
            if s.len() != n {
                return Err(Error::ShapeMismatch {
                    what: "polynomial length",
                    left: s.len(),
                    right: n,
                });
            }
            if s.domain() != domain {
                return Err(Error::DomainMismatch {
                    expected: domain,
                    found: s.domain(),
                });
            }
        }
        Ok(Self { subs })
    }

    pub fn zero(base: &RnsBase, n: usize, domain: Domain) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::BadPolyLength(n));
        }
        Ok(Self {
            subs: (0..base.len())
                .map(|i| SubPolynomial::from_parts_unchecked(vec![0; n], i, domain))
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.subs[0].len()
    }

    pub fn k(&self) -> usize {
        self.subs.len()
    }

    pub fn domain(&self) -> Domain {
        self.subs[0].domain()
    }

    pub fn subs(&self) -> &[SubPolynomial] {
        &self.subs
    }

    pub fn sub(&self, index: usize) -> &SubPolynomial {
        &self.subs[index]
    }

    pub fn into_subs(self) -> Vec<SubPolynomial> {
        self.subs
    }

    #[cfg(test)]
    pub(crate) fn subs_mut(&mut self) -> &mut [SubPolynomial] {
        &mut self.subs
    }

    /// Coefficient-wise negation, `m - x` with 0 as a fixed point.
    pub fn negated(&self, base: &RnsBase) -> Result<Self> {
        self.check_against_base(base)?;
        Ok(Self {
            subs: self
                .subs
                .iter()
                .map(|s| {
                    let m = base.modulus(s.modulus_index());
                    SubPolynomial::from_parts_unchecked(
                        s.coeffs().iter().map(|&c| mod_neg(c, m)).collect(),
                        s.modulus_index(),
                        s.domain(),
                    )
                })
                .collect(),
        })
    }

    /// Serializes the residue matrix into a flat buffer in `layout` order.
    pub fn to_flat(&self, layout: Layout) -> Vec<u32> {
        let native: Vec<u32> = self
            .subs
            .iter()
            .flat_map(|s| s.coeffs().iter().copied())
            .collect();
        match layout {
            Layout::TupleOfArrays => native,
            Layout::ArrayOfTuples => {
                convert_layout(&native, self.n(), self.k(), Layout::TupleOfArrays, layout)
            }
        }
    }

    fn check_against_base(&self, base: &RnsBase) -> Result<()> {
        if self.k() != base.len() {
            return Err(Error::ShapeMismatch {
                what: "base size",
                left: self.k(),
                right: base.len(),
            });
        }
        Ok(())
    }
}

/// Re-permutes a flat `k x n` residue buffer between the two layouts.
/// Lossless: converting back yields the original buffer.
pub fn convert_layout(buf: &[u32], n: usize, k: usize, from: Layout, to: Layout) -> Vec<u32> {
    assert_eq!(buf.len(), n * k, "buffer must hold k*n residues");
    if from == to {
        return buf.to_vec();
    }
    let mut out = vec![0u32; buf.len()];
    for sub in 0..k {
        for coeff in 0..n {
            let tuple_of_arrays = sub * n + coeff;
            let array_of_tuples = coeff * k + sub;
            match from {
                Layout::TupleOfArrays => out[array_of_tuples] = buf[tuple_of_arrays],
                Layout::ArrayOfTuples => out[tuple_of_arrays] = buf[array_of_tuples],
            }
        }
    }
    out
}

fn check_pair(base: &RnsBase, a: &RnsPolynomial, b: &RnsPolynomial) -> Result<()> {
    a.check_against_base(base)?;
    b.check_against_base(base)?;
    if a.n() != b.n() {
        return Err(Error::ShapeMismatch {
            what: "polynomial length",
            left: a.n(),
            right: b.n(),
        });
    }
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch {
            expected: a.domain(),
            found: b.domain(),
        });
    }
    Ok(())
}

/// Residue-wise `(a + b) mod m_i` per coefficient slot. Works in either
/// domain as long as both operands agree.
pub fn pointwise_add(base: &RnsBase, a: &RnsPolynomial, b: &RnsPolynomial) -> Result<RnsPolynomial> {
    check_pair(base, a, b)?;
    let subs = a
        .subs()
        .iter()
        .zip(b.subs())
        .map(|(sa, sb)| {
            let m = base.modulus(sa.modulus_index());
            SubPolynomial::from_parts_unchecked(
                sa.coeffs()
                    .iter()
                    .zip(sb.coeffs())
                    .map(|(&x, &y)| mod_add(x, y, m))
                    .collect(),
                sa.modulus_index(),
                sa.domain(),
            )
        })
        .collect();
    Ok(RnsPolynomial { subs })
}

/// Residue-wise `(a * b) mod m_i` per coefficient slot. Only meaningful on
/// NTT-domain data, where slot products realize the ring product.
pub fn pointwise_mul(base: &RnsBase, a: &RnsPolynomial, b: &RnsPolynomial) -> Result<RnsPolynomial> {
    check_pair(base, a, b)?;
    if a.domain() != Domain::NttBitReversed {
        return Err(Error::DomainMismatch {
            expected: Domain::NttBitReversed,
            found: a.domain(),
        });
    }
    let subs = a
        .subs()
        .iter()
        .zip(b.subs())
        .map(|(sa, sb)| {
            let m = base.modulus(sa.modulus_index());
            SubPolynomial::from_parts_unchecked(
                sa.coeffs()
                    .iter()
                    .zip(sb.coeffs())
                    .map(|(&x, &y)| mod_mul(x, y, m))
                    .collect(),
                sa.modulus_index(),
                sa.domain(),
            )
        })
        .collect();
    Ok(RnsPolynomial { subs })
}

/// O(n^2) negacyclic product in `Z_m[x]/(x^n + 1)`:
/// `c_j = sum_{i+l=j} a_i b_l - sum_{i+l=j+n} a_i b_l (mod m)`.
///
/// This is the independent oracle the transform kernels are checked
/// against; it never touches the NTT path.
pub fn schoolbook_negacyclic_mul(
    a: &SubPolynomial,
    b: &SubPolynomial,
    m: &ResidueModulus,
) -> Result<SubPolynomial> {
    a.check_compatible(b)?;
    if a.domain() != Domain::Coefficient {
        return Err(Error::DomainMismatch {
            expected: Domain::Coefficient,
            found: a.domain(),
        });
    }
    let n = a.len();
    let p = m.p() as u64;
    // n * p^2 < 2^13 * 2^64 fits comfortably in the 128-bit accumulators.
    let mut pos = vec![0u128; n];
    let mut neg = vec![0u128; n];
    for (i, &ai) in a.coeffs().iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (l, &bl) in b.coeffs().iter().enumerate() {
            let term = ai as u128 * bl as u128;
            let j = i + l;
            if j < n {
                pos[j] += term;
            } else {
                neg[j - n] += term;
            }
        }
    }
    let coeffs = pos
        .iter()
        .zip(&neg)
        .map(|(&s_pos, &s_neg)| {
            let sp = (s_pos % p as u128) as u32;
            let sn = (s_neg % p as u128) as u32;
            mod_sub(sp, sn, m)
        })
        .collect();
    Ok(SubPolynomial::from_parts_unchecked(
        coeffs,
        a.modulus_index(),
        Domain::Coefficient,
    ))
}

/// A two-element ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub c0: RnsPolynomial,
    pub c1: RnsPolynomial,
}

impl Ciphertext {
    pub fn new(c0: RnsPolynomial, c1: RnsPolynomial) -> Result<Self> {
        check_same_shape(&c0, &c1)?;
        Ok(Self { c0, c1 })
    }

    pub fn n(&self) -> usize {
        self.c0.n()
    }

    pub fn k(&self) -> usize {
        self.c0.k()
    }

    pub fn domain(&self) -> Domain {
        self.c0.domain()
    }
}

/// The three-element result of a BGV ciphertext multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgvProduct {
    pub c0: RnsPolynomial,
    pub c1: RnsPolynomial,
    pub c2: RnsPolynomial,
}

impl BgvProduct {
    pub fn new(c0: RnsPolynomial, c1: RnsPolynomial, c2: RnsPolynomial) -> Result<Self> {
        check_same_shape(&c0, &c1)?;
        check_same_shape(&c0, &c2)?;
        Ok(Self { c0, c1, c2 })
    }

    pub fn domain(&self) -> Domain {
        self.c0.domain()
    }
}

fn check_same_shape(a: &RnsPolynomial, b: &RnsPolynomial) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::ShapeMismatch {
            what: "polynomial length",
            left: a.n(),
            right: b.n(),
        });
    }
    if a.k() != b.k() {
        return Err(Error::ShapeMismatch {
            what: "base size",
            left: a.k(),
            right: b.k(),
        });
    }
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch {
            expected: a.domain(),
            found: b.domain(),
        });
    }
    Ok(())
}
