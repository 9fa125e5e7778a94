//! Bounded experimental search for the open representation shapes:
//! q = phi(k(m^2 - t)) / phi(l n^2) over a finite rectangle of (m, n).
//!
//! The denominator side phi(l n^2) is tabulated once into an index keyed by
//! exact value; the m side streams and probes q^-1 * phi(k(m^2 - t)), so the
//! full cross product is never materialized. Results are exact; an empty
//! result is inconclusive and never a non-existence claim.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;

use crate::arith::{factorize, ExponentVector, Factorization, Rational};
use crate::config::Config;
use crate::error::Error;
use crate::Result;

/// The target shape phi(k(m^2 - t)) / phi(l n^2) with a signed offset t.
#[derive(Debug, Clone, Serialize)]
pub struct SearchForm {
    #[serde(serialize_with = "crate::ser::biguint")]
    pub k: BigUint,
    #[serde(serialize_with = "crate::ser::biguint")]
    pub l: BigUint,
    pub t: i64,
}

#[derive(Debug, Clone)]
pub struct SearchTask {
    pub form: SearchForm,
    pub target: Rational,
    pub m_limit: u64,
    pub n_limit: u64,
    /// Set by the frontend when the limits were not chosen by the user;
    /// echoed in the report since the defaults are arbitrary.
    pub limits_defaulted: bool,
    pub resume_from: Option<Checkpoint>,
}

impl SearchTask {
    pub fn new(form: SearchForm, target: Rational, m_limit: u64, n_limit: u64) -> Result<Self> {
        if m_limit < 1 || n_limit < 1 {
            return Err(Error::InvalidInput("search limits must be at least 1".into()));
        }
        if form.k.is_zero() || form.l.is_zero() {
            return Err(Error::InvalidInput("k and l must be positive".into()));
        }
        Ok(SearchTask {
            form,
            target,
            m_limit,
            n_limit,
            limits_defaulted: false,
            resume_from: None,
        })
    }

    /// The power-of-two question: 2^w = phi(m^2 + 1) / phi(n^2).
    pub fn pow2(w: u32, m_limit: u64, n_limit: u64) -> Result<Self> {
        let target = Rational::new(BigUint::from(2u8).pow(w), BigUint::one())?;
        SearchTask::new(
            SearchForm {
                k: BigUint::one(),
                l: BigUint::one(),
                t: -1,
            },
            target,
            m_limit,
            n_limit,
        )
    }

    /// The open question restricts t to non-squares; square t (including 0
    /// and 1) are still searchable but labeled out of scope.
    pub fn in_question_scope(&self) -> bool {
        if self.form.t < 0 {
            return true;
        }
        let t = self.form.t as u64;
        t.sqrt() * t.sqrt() != t
    }
}

/// A verified hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub m: u64,
    pub n: u64,
    pub verified: bool,
}

impl Serialize for Hit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Hit", 4)?;
        st.serialize_field("kind", "hit")?;
        st.serialize_field("m", &self.m.to_string())?;
        st.serialize_field("n", &self.n.to_string())?;
        st.serialize_field("verified", &self.verified)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Hit {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: String,
            m: String,
            n: String,
            verified: bool,
        }
        let raw = Raw::deserialize(de)?;
        if raw.kind != "hit" {
            return Err(D::Error::custom(format!("expected kind \"hit\", got {:?}", raw.kind)));
        }
        let parse = |s: &str| s.parse::<u64>().map_err(|_| D::Error::custom("bad integer"));
        Ok(Hit {
            m: parse(&raw.m)?,
            n: parse(&raw.n)?,
            verified: raw.verified,
        })
    }
}

/// Resume token: everything the scan had produced up to `last_m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub last_m: u64,
    pub hits: Vec<Hit>,
    pub skipped_m: u64,
    pub degenerate_m: u64,
}

/// Terminal record: the exhaustively covered rectangle and skip counts.
#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub kind: &'static str,
    pub form: SearchForm,
    pub target: String,
    pub m_range: [u64; 2],
    pub n_range: [u64; 2],
    pub hit_count: usize,
    /// m values whose factorization blew the budget (entries skipped).
    pub skipped_m: u64,
    /// m values where k(m^2 - t) < 1 (outside the domain).
    pub degenerate_m: u64,
    pub in_question_scope: bool,
    pub limits_defaulted: bool,
    pub conclusion: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub hits: Vec<Hit>,
    pub report: SearchReport,
}

/// Exact totients of the numerator side for all valid m up to the limit.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub entries: Vec<(u64, Factorization)>,
    pub skipped: Vec<u64>,
    pub degenerate: u64,
}

/// The numerator argument k(m^2 - t), or None when it is below 1.
fn numerator_argument(form: &SearchForm, m: u64) -> Option<BigUint> {
    let m2 = BigUint::from(m) * BigUint::from(m);
    let shifted = if form.t >= 0 {
        let t = BigUint::from(form.t as u64);
        if m2 <= t {
            return None;
        }
        m2 - t
    } else {
        m2 + BigUint::from((-form.t) as u64)
    };
    Some(&form.k * shifted)
}

/// phi(k(m^2 - t)) in factored form for every valid m in [m_from, m_to].
pub fn tabulate_range(
    form: &SearchForm,
    m_from: u64,
    m_to: u64,
    cfg: &Config,
) -> Result<Tabulation> {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let mut degenerate = 0u64;
    for m in m_from..=m_to {
        let Some(arg) = numerator_argument(form, m) else {
            degenerate += 1;
            continue;
        };
        match factorize(&arg, cfg).and_then(|f| f.totient(cfg)) {
            Ok(tot) => entries.push((m, tot)),
            Err(Error::FactorBoundExceeded { .. }) => skipped.push(m),
            Err(e) => return Err(e),
        }
    }
    Ok(Tabulation {
        entries,
        skipped,
        degenerate,
    })
}

pub fn tabulate(form: &SearchForm, m_limit: u64, cfg: &Config) -> Result<Tabulation> {
    tabulate_range(form, 1, m_limit, cfg)
}

/// Reusable scan state: the denominator index is built once.
pub struct Searcher {
    task: SearchTask,
    /// phi(l n^2) value -> all n with that value, ascending.
    index: HashMap<BigUint, Vec<u64>>,
    target_vec: ExponentVector,
}

impl Searcher {
    pub fn new(task: SearchTask, cfg: &Config) -> Result<Self> {
        let target_vec = task.target.to_vector(cfg)?;
        let l_fact = factorize(&task.form.l, cfg)?;
        let spf = smallest_prime_factors(task.n_limit);
        let mut index: HashMap<BigUint, Vec<u64>> = HashMap::new();
        for n in 1..=task.n_limit {
            let mut arg = l_fact.clone();
            for (p, e) in factor_by_spf(n, &spf) {
                arg = arg.mul(&Factorization::prime_power(BigUint::from(p), 2 * e));
            }
            let phi = phi_value(&arg);
            index.entry(phi).or_default().push(n);
        }
        Ok(Searcher {
            task,
            index,
            target_vec,
        })
    }

    pub fn task(&self) -> &SearchTask {
        &self.task
    }

    /// Scan m in [m_from, m_to]; hits come back verified and ordered.
    pub fn run_range(&self, m_from: u64, m_to: u64, cfg: &Config) -> Result<Checkpoint> {
        let mut out = Checkpoint {
            last_m: m_to,
            hits: Vec::new(),
            skipped_m: 0,
            degenerate_m: 0,
        };
        let num = self.task.target.num();
        let den = self.task.target.den();
        for m in m_from..=m_to {
            let Some(arg) = numerator_argument(&self.task.form, m) else {
                out.degenerate_m += 1;
                continue;
            };
            let phi = match factorize(&arg, cfg) {
                Ok(f) => phi_value(&f),
                Err(Error::FactorBoundExceeded { .. }) => {
                    out.skipped_m += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            // phi(l n^2) must equal phi * den / num exactly
            let scaled = phi * den;
            let (probe, rem) = num_integer::Integer::div_rem(&scaled, num);
            if !rem.is_zero() {
                continue;
            }
            if let Some(ns) = self.index.get(&probe) {
                for &n in ns {
                    if self.verify_hit(m, n, cfg)? {
                        out.hits.push(Hit {
                            m,
                            n,
                            verified: true,
                        });
                    } else {
                        return Err(Error::InvariantBroken(format!(
                            "index probe produced a non-verifying pair ({m}, {n})"
                        )));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Independent recomputation of the identity for a candidate pair.
    fn verify_hit(&self, m: u64, n: u64, cfg: &Config) -> Result<bool> {
        let Some(arg) = numerator_argument(&self.task.form, m) else {
            return Ok(false);
        };
        let num_tot = factorize(&arg, cfg)?.totient(cfg)?;
        let den_arg = &self.task.form.l * BigUint::from(n) * BigUint::from(n);
        let den_tot = factorize(&den_arg, cfg)?.totient(cfg)?;
        Ok(ExponentVector::from_parts(&num_tot, &den_tot) == self.target_vec)
    }

    /// Terminal report for a completed (or resumed) scan state.
    pub fn report(&self, state: &Checkpoint) -> SearchReport {
        let note = if self.task.limits_defaulted {
            Some("default limits are arbitrary; absence of hits within them carries no weight".into())
        } else {
            None
        };
        SearchReport {
            kind: "report",
            form: self.task.form.clone(),
            target: self.task.target.to_string(),
            m_range: [1, self.task.m_limit],
            n_range: [1, self.task.n_limit],
            hit_count: state.hits.len(),
            skipped_m: state.skipped_m,
            degenerate_m: state.degenerate_m,
            in_question_scope: self.task.in_question_scope(),
            limits_defaulted: self.task.limits_defaulted,
            conclusion: if state.hits.is_empty() {
                "inconclusive"
            } else {
                "hits-found"
            },
            note,
        }
    }

    /// Full scan honoring the resume token.
    pub fn run(&self, cfg: &Config) -> Result<SearchOutcome> {
        let mut state = match &self.task.resume_from {
            Some(cp) => cp.clone(),
            None => Checkpoint {
                last_m: 0,
                hits: Vec::new(),
                skipped_m: 0,
                degenerate_m: 0,
            },
        };
        if state.last_m < self.task.m_limit {
            let chunk = self.run_range(state.last_m + 1, self.task.m_limit, cfg)?;
            state.hits.extend(chunk.hits);
            state.skipped_m += chunk.skipped_m;
            state.degenerate_m += chunk.degenerate_m;
            state.last_m = self.task.m_limit;
        }
        state.hits.sort_by_key(|h| (h.m, h.n));
        state.hits.dedup();
        let report = self.report(&state);
        Ok(SearchOutcome {
            hits: state.hits,
            report,
        })
    }
}

/// One-shot search over the task's full rectangle.
pub fn search(task: SearchTask, cfg: &Config) -> Result<SearchOutcome> {
    Searcher::new(task, cfg)?.run(cfg)
}

// -- small-number helpers ----------------------------------------------------

fn smallest_prime_factors(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn factor_by_spf(mut n: u64, spf: &[u32]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n as usize] as u64;
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}

fn phi_value(f: &Factorization) -> BigUint {
    let mut acc = BigUint::one();
    for (p, e) in f.entries() {
        if e > 1 {
            acc *= p.pow(u32::try_from(e - 1).expect("exponent fits"));
        }
        acc *= p - BigUint::one();
    }
    acc
}
