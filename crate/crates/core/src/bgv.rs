//! BGV ciphertext multiplication over the RNS/NTT representation.
//!
//! Multiplying `ct = (ct_0, ct_1)` by `ct' = (ct'_0, ct'_1)` yields the
//! three-element ciphertext
//!
//! ```text
//! c_0 = ct_0 * ct'_0
//! c_1 = ct_0 * ct'_1 + ct_1 * ct'_0
//! c_2 = ct_1 * ct'_1
//! ```
//!
//! with every product taken pointwise per residue, all modulo the current
//! level modulus. No relinearization and no modulus switching: evaluation
//! keys live client-side, and the level modulus is whatever base the
//! ciphertexts carry.

use crate::error::{Error, Result};
use crate::ntt::{forward_polynomial, inverse_polynomial, TwiddleTable};
use crate::polyring::{pointwise_add, pointwise_mul, BgvProduct, Ciphertext, Domain};
use crate::rns::RnsBase;

/// The active coefficient modulus `q_l`, i.e. the RNS base currently in
/// force for ciphertext arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelModulus {
    base: RnsBase,
}

impl LevelModulus {
    pub fn new(base: RnsBase) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::EmptyBase);
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> &RnsBase {
        &self.base
    }
}

/// BGV multiplication of two NTT-domain ciphertexts. Residues never mix
/// across moduli; each sub-computation is independent per modulus.
pub fn bgv_multiply(level: &LevelModulus, ct: &Ciphertext, ct2: &Ciphertext) -> Result<BgvProduct> {
    if ct.domain() != Domain::NttBitReversed {
        return Err(Error::DomainMismatch {
            expected: Domain::NttBitReversed,
            found: ct.domain(),
        });
    }
    let base = level.base();
    let c0 = pointwise_mul(base, &ct.c0, &ct2.c0)?;
    let cross_a = pointwise_mul(base, &ct.c0, &ct2.c1)?;
    let cross_b = pointwise_mul(base, &ct.c1, &ct2.c0)?;
    let c1 = pointwise_add(base, &cross_a, &cross_b)?;
    let c2 = pointwise_mul(base, &ct.c1, &ct2.c1)?;
    BgvProduct::new(c0, c1, c2)
}

/// End-to-end pipeline: forward-transform all four input polynomials,
/// multiply, inverse-transform the three outputs. Purely compositional --
/// no hidden normalization between the steps.
pub fn pipeline_multiply(
    level: &LevelModulus,
    tables: &[TwiddleTable],
    a: &Ciphertext,
    b: &Ciphertext,
) -> Result<BgvProduct> {
    if a.domain() != Domain::Coefficient {
        return Err(Error::DomainMismatch {
            expected: Domain::Coefficient,
            found: a.domain(),
        });
    }
    let fa = Ciphertext::new(
        forward_polynomial(a.c0.clone(), tables)?,
        forward_polynomial(a.c1.clone(), tables)?,
    )?;
    let fb = Ciphertext::new(
        forward_polynomial(b.c0.clone(), tables)?,
        forward_polynomial(b.c1.clone(), tables)?,
    )?;
    let prod = bgv_multiply(level, &fa, &fb)?;
    BgvProduct::new(
        inverse_polynomial(prod.c0, tables)?,
        inverse_polynomial(prod.c1, tables)?,
        inverse_polynomial(prod.c2, tables)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::{mod_add, mod_mul};
    use crate::ntt::twiddles_for_base;
    use crate::polyring::{RnsPolynomial, SubPolynomial};
    use crate::rns::build_base;
    use rand::{Rng, SeedableRng};

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(47)
    }

    fn random_poly(
        base: &RnsBase,
        n: usize,
        domain: Domain,
        rng: &mut impl Rng,
    ) -> RnsPolynomial {
        RnsPolynomial::new(
            (0..base.len())
                .map(|i| {
                    let p = base.modulus(i).p();
                    SubPolynomial::from_parts_unchecked(
                        (0..n).map(|_| rng.gen_range(0..p)).collect(),
                        i,
                        domain,
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    fn random_ct(base: &RnsBase, n: usize, domain: Domain, rng: &mut impl Rng) -> Ciphertext {
        Ciphertext::new(
            random_poly(base, n, domain, rng),
            random_poly(base, n, domain, rng),
        )
        .unwrap()
    }

    #[test]
    fn zero_second_components_collapse() {
        let mut rng = rng();
        let base = build_base(16, 54).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let zero = RnsPolynomial::zero(&base, 16, Domain::NttBitReversed).unwrap();
        let ct = Ciphertext::new(
            random_poly(&base, 16, Domain::NttBitReversed, &mut rng),
            zero.clone(),
        )
        .unwrap();
        let ct2 = Ciphertext::new(
            random_poly(&base, 16, Domain::NttBitReversed, &mut rng),
            zero.clone(),
        )
        .unwrap();
        let prod = bgv_multiply(&level, &ct, &ct2).unwrap();
        assert_eq!(prod.c1, zero);
        assert_eq!(prod.c2, zero);
        assert_eq!(prod.c0, crate::polyring::pointwise_mul(&base, &ct.c0, &ct2.c0).unwrap());
    }

    #[test]
    fn symmetric_inputs_double_the_cross_term() {
        let mut rng = rng();
        let base = build_base(16, 54).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let ct = random_ct(&base, 16, Domain::NttBitReversed, &mut rng);
        let prod = bgv_multiply(&level, &ct, &ct).unwrap();
        let cross = crate::polyring::pointwise_mul(&base, &ct.c0, &ct.c1).unwrap();
        let doubled = crate::polyring::pointwise_add(&base, &cross, &cross).unwrap();
        assert_eq!(prod.c1, doubled);
    }

    #[test]
    fn commutative_in_its_arguments() {
        let mut rng = rng();
        let base = build_base(8, 54).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let a = random_ct(&base, 8, Domain::NttBitReversed, &mut rng);
        let b = random_ct(&base, 8, Domain::NttBitReversed, &mut rng);
        let ab = bgv_multiply(&level, &a, &b).unwrap();
        let ba = bgv_multiply(&level, &b, &a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn slot_formula_oracle() {
        let mut rng = rng();
        let base = build_base(8, 54).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let a = random_ct(&base, 8, Domain::NttBitReversed, &mut rng);
        let b = random_ct(&base, 8, Domain::NttBitReversed, &mut rng);
        let prod = bgv_multiply(&level, &a, &b).unwrap();
        for i in 0..base.len() {
            let m = base.modulus(i);
            for j in 0..8 {
                let (a0, a1) = (a.c0.sub(i).coeffs()[j], a.c1.sub(i).coeffs()[j]);
                let (b0, b1) = (b.c0.sub(i).coeffs()[j], b.c1.sub(i).coeffs()[j]);
                assert_eq!(prod.c0.sub(i).coeffs()[j], mod_mul(a0, b0, m));
                assert_eq!(
                    prod.c1.sub(i).coeffs()[j],
                    mod_add(mod_mul(a0, b1, m), mod_mul(a1, b0, m), m)
                );
                assert_eq!(prod.c2.sub(i).coeffs()[j], mod_mul(a1, b1, m));
            }
        }
    }

    #[test]
    fn multiply_by_one_zero_is_identity() {
        // b = (1, 0): c0 = a.c0, c1 = a.c1, c2 = 0.
        let mut rng = rng();
        let base = build_base(16, 54).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let tables = twiddles_for_base(&base, 16).unwrap();
        let a = random_ct(&base, 16, Domain::Coefficient, &mut rng);
        let mut one = RnsPolynomial::zero(&base, 16, Domain::Coefficient).unwrap();
        for s in one.subs_mut() {
            s.coeffs_mut()[0] = 1;
        }
        let b = Ciphertext::new(
            one,
            RnsPolynomial::zero(&base, 16, Domain::Coefficient).unwrap(),
        )
        .unwrap();
        let prod = pipeline_multiply(&level, &tables, &a, &b).unwrap();
        assert_eq!(prod.c0, a.c0);
        assert_eq!(prod.c1, a.c1);
        assert_eq!(
            prod.c2,
            RnsPolynomial::zero(&base, 16, Domain::Coefficient).unwrap()
        );
    }

    #[test]
    fn pipeline_composes_without_normalization() {
        let mut rng = rng();
        let base = build_base(8, 54).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let tables = twiddles_for_base(&base, 8).unwrap();
        let a = random_ct(&base, 8, Domain::Coefficient, &mut rng);
        let b = random_ct(&base, 8, Domain::Coefficient, &mut rng);
        let via_pipeline = pipeline_multiply(&level, &tables, &a, &b).unwrap();
        let fa = Ciphertext::new(
            forward_polynomial(a.c0.clone(), &tables).unwrap(),
            forward_polynomial(a.c1.clone(), &tables).unwrap(),
        )
        .unwrap();
        let fb = Ciphertext::new(
            forward_polynomial(b.c0.clone(), &tables).unwrap(),
            forward_polynomial(b.c1.clone(), &tables).unwrap(),
        )
        .unwrap();
        let manual = bgv_multiply(&level, &fa, &fb).unwrap();
        let manual = BgvProduct::new(
            inverse_polynomial(manual.c0, &tables).unwrap(),
            inverse_polynomial(manual.c1, &tables).unwrap(),
            inverse_polynomial(manual.c2, &tables).unwrap(),
        )
        .unwrap();
        assert_eq!(via_pipeline, manual);
    }

    #[test]
    fn ct1_zero_pipeline_gives_schoolbook_c0() {
        let mut rng = rng();
        let base = build_base(16, 27).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let tables = twiddles_for_base(&base, 16).unwrap();
        let zero = RnsPolynomial::zero(&base, 16, Domain::Coefficient).unwrap();
        let a = Ciphertext::new(
            random_poly(&base, 16, Domain::Coefficient, &mut rng),
            zero.clone(),
        )
        .unwrap();
        let b = Ciphertext::new(
            random_poly(&base, 16, Domain::Coefficient, &mut rng),
            zero.clone(),
        )
        .unwrap();
        let prod = pipeline_multiply(&level, &tables, &a, &b).unwrap();
        for i in 0..base.len() {
            let want = crate::polyring::schoolbook_negacyclic_mul(
                a.c0.sub(i),
                b.c0.sub(i),
                base.modulus(i),
            )
            .unwrap();
            assert_eq!(prod.c0.sub(i), &want);
        }
        assert_eq!(prod.c1, zero);
        assert_eq!(prod.c2, zero);
    }

    #[test]
    fn residue_independence() {
        // Dropping modulus i from inputs and base leaves the others alone.
        let mut rng = rng();
        let base = build_base(8, 80).unwrap();
        assert!(base.len() >= 3);
        let level = LevelModulus::new(base.clone()).unwrap();
        let a = random_ct(&base, 8, Domain::NttBitReversed, &mut rng);
        let b = random_ct(&base, 8, Domain::NttBitReversed, &mut rng);
        let full = bgv_multiply(&level, &a, &b).unwrap();

        let drop_idx = 1usize;
        let keep: Vec<usize> = (0..base.len()).filter(|&i| i != drop_idx).collect();
        let reduced_base = RnsBase::new(
            keep.iter().map(|&i| *base.modulus(i)).collect(),
        )
        .unwrap();
        let strip = |poly: &RnsPolynomial| {
            RnsPolynomial::new(
                keep.iter()
                    .enumerate()
                    .map(|(new_idx, &old_idx)| {
                        SubPolynomial::from_parts_unchecked(
                            poly.sub(old_idx).coeffs().to_vec(),
                            new_idx,
                            poly.domain(),
                        )
                    })
                    .collect(),
            )
            .unwrap()
        };
        let a2 = Ciphertext::new(strip(&a.c0), strip(&a.c1)).unwrap();
        let b2 = Ciphertext::new(strip(&b.c0), strip(&b.c1)).unwrap();
        let reduced_level = LevelModulus::new(reduced_base).unwrap();
        let reduced = bgv_multiply(&reduced_level, &a2, &b2).unwrap();
        for (new_idx, &old_idx) in keep.iter().enumerate() {
            assert_eq!(
                reduced.c0.sub(new_idx).coeffs(),
                full.c0.sub(old_idx).coeffs()
            );
            assert_eq!(
                reduced.c1.sub(new_idx).coeffs(),
                full.c1.sub(old_idx).coeffs()
            );
            assert_eq!(
                reduced.c2.sub(new_idx).coeffs(),
                full.c2.sub(old_idx).coeffs()
            );
        }
    }

    #[test]
    fn rejects_coefficient_domain() {
        let mut rng = rng();
        let base = build_base(8, 27).unwrap();
        let level = LevelModulus::new(base.clone()).unwrap();
        let a = random_ct(&base, 8, Domain::Coefficient, &mut rng);
        assert!(matches!(
            bgv_multiply(&level, &a, &a),
            Err(Error::DomainMismatch { .. })
        ));
    }
}
