use thiserror::Error;

use crate::polyring::Domain;

/// Errors produced by the arithmetic and polynomial layers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("modular inverse of zero is undefined")]
    ZeroInverse,

    #[error("{0} is not prime")]
    CompositeModulus(u64),

    #[error("modulus {0} is out of the supported range (3 <= p < 2^32)")]
    ModulusOutOfRange(u64),

    #[error("modulus {p} does not support negacyclic order {two_n} (p - 1 not divisible)")]
    UnsupportedOrder { p: u64, two_n: u64 },

    #[error("no primitive root found modulo {p}")]
    NoPrimitiveRoot { p: u64 },

    #[error(
        "no further prime = 1 (mod {two_n}) between 2^{} and 2^{bit_size}; \
         try a larger bit size or a shorter polynomial", bit_size - 1
    )]
    PrimeExhausted { two_n: u64, bit_size: u32 },

    #[error("bit size {0} outside the supported range 2..=32")]
    BadBitSize(u32),

    #[error("requested coefficient width {0} is below the 17-bit minimum")]
    BadCoefficientBits(u32),

    #[error("polynomial length {0} must be a power of two >= 2")]
    BadPolyLength(usize),

    #[error("RNS base moduli must be distinct primes")]
    DuplicateModulus,

    #[error("RNS base may not be empty")]
    EmptyBase,

    #[error("generated base covers only {got} bits, {needed} required")]
    InsufficientBits { needed: u32, got: u64 },

    #[error("value out of range [0, M)")]
    ValueOutOfRange,

    #[error("residue {value} at index {index} not below modulus {modulus}")]
    ResidueOutOfRange {
        index: usize,
        value: u64,
        modulus: u64,
    },

    #[error("expected {expected:?} domain, found {found:?}")]
    DomainMismatch { expected: Domain, found: Domain },

    #[error("{what} mismatch: {left} vs {right}")]
    ShapeMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("config line {line}: {reason}")]
    BadConfig { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
