//! Residue number system: decomposition of large coefficients into 32-bit
//! residues and CRT reconstruction.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modarith::{mod_inverse, mod_mul, NttPrimeSequence, ResidueModulus};

/// Residue primes are searched at this width: products `a * b < p^2 < 2^60`
/// leave headroom under the 64-bit Barrett shift.
pub const RESIDUE_PRIME_BITS: u32 = 30;

const BITS_PER_MODULUS: u32 = 30;

/// An ordered list of pairwise-coprime residue moduli with the CRT
/// precomputation `M = prod m_i`, `M_i = M / m_i`, `N_i = M_i^-1 mod m_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnsBase {
    moduli: Vec<ResidueModulus>,
    big_modulus: BigUint,
    crt_weights: Vec<CrtWeight>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct CrtWeight {
    /// M_i = M / m_i
    big_quotient: BigUint,
    /// N_i = M_i^-1 mod m_i
    inverse: u32,
}

impl RnsBase {
    /// Builds a base from explicit moduli. Distinct primes are pairwise
    /// coprime, which is all the CRT needs.
    pub fn new(moduli: Vec<ResidueModulus>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::EmptyBase);
        }
        for (i, a) in moduli.iter().enumerate() {
            for b in &moduli[i + 1..] {
                if a.p() == b.p() {
                    return Err(Error::DuplicateModulus);
                }
            }
        }
        let mut big_modulus = BigUint::one();
        for m in &moduli {
            big_modulus *= BigUint::from(m.p());
        }
        let crt_weights = moduli
            .iter()
            .map(|m| {
                let big_quotient = &big_modulus / BigUint::from(m.p());
                let reduced = (&big_quotient % BigUint::from(m.p()))
                    .to_u32()
                    .expect("residue fits u32");
                let inverse = mod_inverse(reduced, m)?;
                Ok(CrtWeight {
                    big_quotient,
                    inverse,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            moduli,
            big_modulus,
            crt_weights,
        })
    }

    pub fn from_primes(primes: &[u32]) -> Result<Self> {
        Self::new(
            primes
                .iter()
                .map(|&p| ResidueModulus::new(p))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn moduli(&self) -> &[ResidueModulus] {
        &self.moduli
    }

    pub fn modulus(&self, index: usize) -> &ResidueModulus {
        &self.moduli[index]
    }

    /// The big modulus `M`.
    pub fn big_modulus(&self) -> &BigUint {
        &self.big_modulus
    }

    /// `x_i = x mod m_i` for every modulus. Requires `0 <= x < M`.
    pub fn decompose(&self, x: &BigUint) -> Result<Vec<u32>> {
        if x >= &self.big_modulus {
            return Err(Error::ValueOutOfRange);
        }
        Ok(self
            .moduli
            .iter()
            .map(|m| (x % BigUint::from(m.p())).to_u32().expect("fits u32"))
            .collect())
    }

    /// The unique `x` in `[0, M)` with `x = x_i (mod m_i)`, computed as
    /// `sum x_i M_i N_i (mod M)`.
    pub fn reconstruct(&self, residues: &[u32]) -> Result<BigUint> {
        if residues.len() != self.moduli.len() {
            return Err(Error::ShapeMismatch {
                what: "residue count",
                left: residues.len(),
                right: self.moduli.len(),
            });
        }
        let mut acc = BigUint::zero();
        for (index, ((&x, m), w)) in residues
            .iter()
            .zip(&self.moduli)
            .zip(&self.crt_weights)
            .enumerate()
        {
            if x >= m.p() {
                return Err(Error::ResidueOutOfRange {
                    index,
                    value: x as u64,
                    modulus: m.p() as u64,
                });
            }
            // M_i * (x_i N_i mod m_i) is congruent to x_i M_i N_i mod M.
            let t = mod_mul(x, w.inverse, m);
            acc += &w.big_quotient * BigUint::from(t);
        }
        Ok(acc % &self.big_modulus)
    }

    /// Plain-text form: one `modulus=` line per prime, in base order.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for m in &self.moduli {
            out.push_str(&format!("modulus={}\n", m.p()));
        }
        out
    }

    /// Parses the `modulus=` lines of a key=value config.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut primes = Vec::new();
        for (entry, _line) in crate::config::parse_kv(text)? {
            if let ("modulus", value) = (entry.0.as_str(), entry.1) {
                let p: u32 = value.parse().map_err(|_| Error::BadConfig {
                    line: _line,
                    reason: format!("bad modulus value '{value}'"),
                })?;
                primes.push(p);
            }
        }
        Self::from_primes(&primes)
    }
}

/// Builds the base for polynomials of length `n` and coefficients of
/// `total_bits` bits: `ceil(total_bits / 30)` distinct 30-bit primes, all
/// `= 1 (mod 2n)`, taken largest-first so the walk is deterministic.
pub fn build_base(n: usize, total_bits: u32) -> Result<RnsBase> {
    if total_bits < 17 {
        return Err(Error::BadCoefficientBits(total_bits));
    }
    let k = total_bits.div_ceil(BITS_PER_MODULUS) as usize;
    let moduli: Vec<ResidueModulus> = NttPrimeSequence::new(n, RESIDUE_PRIME_BITS)?
        .take(k)
        .collect();
    if moduli.len() < k {
        return Err(Error::PrimeExhausted {
            two_n: 2 * n as u64,
            bit_size: RESIDUE_PRIME_BITS,
        });
    }
    let base = RnsBase::new(moduli)?;
    let got = base.big_modulus().bits();
    if got < total_bits as u64 {
        return Err(Error::InsufficientBits {
            needed: total_bits,
            got,
        });
    }
    Ok(base)
}

/// Default coefficient width for the standard polynomial lengths
/// (the 128-bit-security pairings used throughout the benchmarks).
pub fn default_coeff_bits(n: usize) -> Option<u32> {
    match n {
        1024 => Some(27),
        2048 => Some(54),
        4096 => Some(109),
        8192 => Some(218),
        _ if n < 1024 => Some(27),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn small_base() -> RnsBase {
        RnsBase::from_primes(&[3, 5, 7]).unwrap()
    }

    #[test]
    fn build_base_shapes() {
        let b = build_base(4096, 109).unwrap();
        assert_eq!(b.len(), 4);
        assert!(b.big_modulus().bits() >= 109);
        for m in b.moduli() {
            assert_eq!((m.p() as u64 - 1) % 8192, 0);
            assert!(m.p() > 1 << 29 && (m.p() as u64) < 1 << 30);
        }
        assert_eq!(build_base(2048, 54).unwrap().len(), 2);
        assert_eq!(build_base(1024, 27).unwrap().len(), 1);
        assert_eq!(build_base(8192, 218).unwrap().len(), 8);
    }

    #[test]
    fn build_base_deterministic() {
        let a = build_base(2048, 54).unwrap();
        let b = build_base(2048, 54).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decompose_examples() {
        let b = small_base();
        assert_eq!(b.decompose(&BigUint::from(0u32)).unwrap(), vec![0, 0, 0]);
        assert_eq!(b.decompose(&BigUint::from(23u32)).unwrap(), vec![2, 3, 2]);
        let m_minus_1 = b.big_modulus() - 1u32;
        assert_eq!(b.decompose(&m_minus_1).unwrap(), vec![2, 4, 6]);
        assert_eq!(
            b.decompose(b.big_modulus()),
            Err(Error::ValueOutOfRange)
        );
    }

    #[test]
    fn reconstruct_examples() {
        let b = small_base();
        assert_eq!(b.reconstruct(&[2, 3, 2]).unwrap(), BigUint::from(23u32));
        assert_eq!(b.reconstruct(&[0, 0, 0]).unwrap(), BigUint::from(0u32));
        assert!(matches!(
            b.reconstruct(&[3, 0, 0]),
            Err(Error::ResidueOutOfRange { .. })
        ));
    }

    #[test]
    fn roundtrip_randomized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let base = build_base(1024, 60).unwrap();
        let m = base.big_modulus().clone();
        for _ in 0..2000 {
            let x = BigUint::from(rng.gen::<u64>()) % &m;
            let r = base.decompose(&x).unwrap();
            assert_eq!(base.reconstruct(&r).unwrap(), x);
        }
    }

    proptest! {
        #[test]
        fn homomorphism(x: u64, y: u64) {
            let base = small_base();
            let m = base.big_modulus();
            let (x, y) = (BigUint::from(x) % m, BigUint::from(y) % m);
            let xs = base.decompose(&x).unwrap();
            let ys = base.decompose(&y).unwrap();

            let sum: Vec<u32> = xs.iter().zip(&ys).zip(base.moduli())
                .map(|((&a, &b), mm)| crate::modarith::mod_add(a, b, mm))
                .collect();
            prop_assert_eq!(base.decompose(&((&x + &y) % m)).unwrap(), sum);

            let prod: Vec<u32> = xs.iter().zip(&ys).zip(base.moduli())
                .map(|((&a, &b), mm)| crate::modarith::mod_mul(a, b, mm))
                .collect();
            prop_assert_eq!(base.decompose(&(&x * &y % m)).unwrap(), prod);
        }
    }

    #[test]
    fn config_roundtrip() {
        let b = build_base(2048, 54).unwrap();
        let text = b.to_config_string();
        let back = RnsBase::from_config_str(&text).unwrap();
        assert_eq!(b, back);
    }

    #[test]
    fn rejects_degenerate_bases() {
        assert_eq!(RnsBase::from_primes(&[]), Err(Error::EmptyBase));
        assert_eq!(
            RnsBase::from_primes(&[5, 5]),
            Err(Error::DuplicateModulus)
        );
        assert!(matches!(build_base(1024, 5), Err(Error::BadCoefficientBits(5))));
    }
}
