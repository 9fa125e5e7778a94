//! Error type shared by all modules.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("factoring budget exhausted on {n} (rho budget {budget})")]
    FactorBoundExceeded { n: BigUint, budget: u64 },

    #[error("{0} is not prime")]
    NotPrime(BigUint),

    #[error("not a perfect square: exponent of {prime} is odd")]
    NotASquare { prime: BigUint },

    #[error("gcd({a}, {modulus}) != 1: the progression holds at most one prime")]
    GcdViolation { a: BigUint, modulus: BigUint },

    #[error("search exhausted after {scanned} candidates ({what})")]
    SearchExhausted { scanned: u64, what: String },

    #[error("sieve budget exceeded: {x} > {budget}")]
    SieveBudgetExceeded { x: u64, budget: u64 },

    #[error("parity violation: step target {target} must be even")]
    ParityViolation { target: i64 },

    #[error("pell solver needs a non-square d >= 2, got {d}")]
    NotApplicable { d: BigUint },

    #[error("pell continued-fraction period budget {budget} exceeded for d = {d}")]
    PeriodBudgetExceeded { d: BigUint, budget: u64 },

    #[error(
        "strict mode rejects largest support prime {p_s} > {max}: \
         the factorial modulus makes the progression search infeasible"
    )]
    ModulusTooLarge { p_s: u64, max: u64 },

    #[error("quadruple ({a},{b},{r},{s}) is not known representable (verdict {verdict})")]
    UnsupportedQuadruple {
        a: u64,
        b: u64,
        r: u64,
        s: u64,
        verdict: String,
    },

    #[error("no verified witness found within budget: {0}")]
    ConstructionFailed(String),

    #[error("no exemplar exponent k <= {bound} satisfies the divisibility conditions")]
    NoSuchK { bound: u64 },

    #[error("internal invariant broken ({0}); this is a bug")]
    InvariantBroken(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Honest-failure errors are budget or search exhaustions the caller
    /// asked for; everything else is either usage or a bug.
    pub fn is_honest_failure(&self) -> bool {
        matches!(
            self,
            Error::FactorBoundExceeded { .. }
                | Error::SearchExhausted { .. }
                | Error::SieveBudgetExceeded { .. }
                | Error::PeriodBudgetExceeded { .. }
                | Error::ModulusTooLarge { .. }
                | Error::ConstructionFailed(_)
        )
    }
}
