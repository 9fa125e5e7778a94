//! The on-disk witness document: everything needed to re-verify a
//! construction, in a canonical byte-stable layout (fixed key order, primes
//! ascending, big integers as decimal strings).

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use totient_rep::witness::{Operand, Witness, WitnessForm};
use totient_rep::{Config, Factorization};

/// Decimal expansion is suppressed above this many digits; the factored
/// form is always available for constructions that produced one.
pub const EXPANSION_DIGIT_LIMIT: u64 = 10_000;

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub tool: String,
    pub version: String,
    pub form: WitnessForm,
    pub target: TargetDoc,
    pub m: OperandDoc,
    pub n: OperandDoc,
    pub verified: bool,
    pub trace: serde_json::Value,
    pub config: Config,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TargetDoc {
    pub num: String,
    pub den: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OperandDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factored: Option<Factorization>,
    /// Decimal expansion; omitted above the digit limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
    pub digits: u64,
}

impl OperandDoc {
    pub fn from_operand(op: &Operand) -> Self {
        let digits = decimal_digits(op.value());
        let decimal = (digits <= EXPANSION_DIGIT_LIMIT).then(|| op.value().to_str_radix(10));
        OperandDoc {
            factored: op.factored().cloned(),
            decimal,
            digits,
        }
    }

    /// Recover the integer, preferring the decimal expansion.
    pub fn value(&self) -> Option<BigUint> {
        if let Some(d) = &self.decimal {
            return d.parse().ok();
        }
        self.factored.as_ref().map(|f| f.value())
    }
}

pub fn decimal_digits(v: &BigUint) -> u64 {
    if v.bits() <= 64 {
        return v.to_string().len() as u64;
    }
    // floor(log10) from the bit length, corrected exactly
    let est = ((v.bits() - 1) as f64 * std::f64::consts::LOG10_2).floor() as u64;
    let mut digits = est + 1;
    let mut bound = BigUint::from(10u8).pow(u32::try_from(digits).expect("digit count fits"));
    while *v >= bound {
        digits += 1;
        bound *= 10u8;
    }
    digits
}

pub fn build_document(witness: &Witness, trace: serde_json::Value, cfg: &Config) -> WitnessDocument {
    let target = witness.target.to_rational();
    WitnessDocument {
        tool: "totient-rep".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        form: witness.form.clone(),
        target: TargetDoc {
            num: target.num().to_str_radix(10),
            den: target.den().to_str_radix(10),
        },
        m: OperandDoc::from_operand(&witness.m),
        n: OperandDoc::from_operand(&witness.n),
        verified: witness.verified,
        trace,
        config: cfg.clone(),
    }
}
