//! The shared witness type: a constructed pair (m, n) plus the identity it
//! certifies and an independently recomputed verification flag.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, ExponentVector, Factorization};
use crate::config::Config;

/// One side of a witness. Constructions that work in factored form carry
/// the factorization; Pell-derived values may be too hard to factor, in
/// which case only the expanded integer is stored. Verification never
/// depends on the optional factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operand {
    value: BigUint,
    factored: Option<Factorization>,
}

impl Operand {
    pub fn from_factored(f: Factorization) -> Self {
        Operand {
            value: f.value(),
            factored: Some(f),
        }
    }

    pub fn from_value(value: BigUint) -> Self {
        Operand {
            value,
            factored: None,
        }
    }

    /// Attach a factorization when it comes cheap; keep the plain value
    /// otherwise. Pell-derived operands can run to thousands of digits, so
    /// anything past 256 bits is not even attempted.
    pub fn from_value_best_effort(value: BigUint, cfg: &Config) -> Self {
        if value.bits() > 256 {
            return Operand {
                value,
                factored: None,
            };
        }
        let modest = Config {
            rho_iteration_budget: cfg.rho_iteration_budget.min(50_000),
            ..cfg.clone()
        };
        let factored = factorize(&value, &modest).ok();
        Operand { value, factored }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factored(&self) -> Option<&Factorization> {
        self.factored.as_ref()
    }
}

/// Which identity a witness certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessForm {
    /// phi(m^2) / phi(n^2)^b = q
    Thm1 { b: u64 },
    /// phi(k (m^2 - 1)) / phi(l n^2) = q
    Thm2 { k: String, l: String },
    /// phi(m^r)^a / phi(n^s)^b = q
    General { a: u64, b: u64, r: u64, s: u64 },
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub m: Operand,
    pub n: Operand,
    pub form: WitnessForm,
    pub target: ExponentVector,
    pub verified: bool,
}
