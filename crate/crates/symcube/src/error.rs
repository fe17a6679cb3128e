//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SymcubeError {
    #[error("invalid weight {0}: Eisenstein series require even weight >= 4")]
    InvalidWeight(u32),

    #[error("Eisenstein series E_{0} does not have integral coefficients; only weights 4, 6, 8, 10, 14 are needed and supported")]
    NonIntegralEisenstein(u32),

    #[error("unsupported weight {0}: only level-1 weights with a one-dimensional cusp space are supported (12, 16, 18, 20, 22, 26)")]
    UnsupportedWeight(u32),

    #[error("insufficient precision: coefficient a_{needed} requested but only {available} terms computed")]
    InsufficientPrecision { needed: usize, available: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("f is not ordinary at p = {p} (p divides a_p); the vanishing criterion requires an ordinary prime")]
    NotOrdinary { p: u64 },

    #[error("gamma factor pole at s = {0}")]
    GammaPole(String),

    #[error("root number must be fixed before the mirror sum is used; call root_number first")]
    RootNumberUnset,

    #[error("root number solve failed: reflected value indistinguishable from zero after {0} retries")]
    RootNumberFailed(u32),

    #[error("requested {digits} digits unreachable with {terms} coefficients; need about {needed}")]
    PrecisionShortfall { digits: u32, terms: usize, needed: usize },

    #[error("rationalization unstable: recognized {first} at {digits} digits but {second} at {digits_hi}")]
    RationalizationUnstable { first: String, second: String, digits: u32, digits_hi: u32 },

    #[error("unit residue required: u = {u} is 0 mod p = {p}")]
    NotAUnit { u: u64, p: u64 },

    #[error("j = {j} outside the critical range 0..={jmax}")]
    JOutOfRange { j: i64, jmax: i64 },

    #[error("character conductor {0} is not a power of p = {1}")]
    BadConductor(u64, u64),

    #[error("ramified branch requires conductor exponent m >= 1; got m = 0 (route trivial characters to the unramified branch)")]
    RamifiedBranchMisuse,

    #[error("p-adic precision exhausted: {0}")]
    PadicPrecision(String),

    #[error("incompatible congruence pair (j={j}, j'={jp}): need j = j' mod (p-1)p^(n-1) = {modulus} and equal parity")]
    PairingError { j: i64, jp: i64, modulus: u64 },

    #[error("checklist does not pass: {0}")]
    ChecklistFailed(String),

    #[error("only quadratic characters of conductor <= 20 are supported; got conductor {0}")]
    UnsupportedTwist(u64),

    #[error("cache io: {0}")]
    CacheIo(String),

    #[error("cache format: {0}")]
    CacheFormat(String),
}

pub type Result<T> = std::result::Result<T, SymcubeError>;
