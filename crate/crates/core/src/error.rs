use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("empty congruence class beyond finitely many primes (gcd({res}, {modulus}) != 1)")]
    EmptyCongruenceClass { modulus: u64, res: u64 },

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("enumeration budget exceeded: {needed} candidates > cap {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },

    #[error("box requires prime field")]
    BoxRequiresPrimeField,

    #[error("residue {value} out of range for modulus {modulus}")]
    OutOfRange { value: u64, modulus: u64 },

    #[error("bad prime {0}: reduction fails (prime divides a denominator)")]
    BadPrime(u64),

    #[error("wild degree; bound not applicable (degree {degree}, p = {p})")]
    WildDegree { degree: u64, p: u64 },

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("invalid Laurent polynomial: {0}")]
    InvalidLaurent(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("no points")]
    NoPoints,

    #[error("polynomial is reducible; factor {factor}")]
    Reducible { factor: String },

    #[error("certificate not found: irreducibility undetermined by the implemented tests")]
    CertificateNotFound,

    #[error("element is rational; equidistribution claim does not apply")]
    RationalElement,

    #[error("empty input")]
    EmptyInput,

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable '{name}' at offset {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
