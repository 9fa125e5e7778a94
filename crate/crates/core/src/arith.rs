//! Exact arithmetic over factored integers and rationals.
//!
//! [`Factorization`] is a positive integer stored as an ordered map
//! `prime -> exponent >= 1`; the empty map is 1. [`ExponentVector`] is a
//! positive rational stored as `prime -> signed exponent != 0`. All
//! constructions in this crate operate on these factored forms; expanded
//! integers are produced only for display and serialization. Primes are
//! kept ascending everywhere so serialized values are byte-stable.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::config::Config;
use crate::error::Error;
use crate::primes::{is_prime, is_prime_u64};
use crate::Result;

/// Trial divisors: primes below 10^6, sieved once. `Config::trial_division_bound`
/// caps how far into this table a factorization walks.
fn trial_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limit = 1_000_000usize;
        let mut composite = vec![false; limit + 1];
        let mut out = Vec::with_capacity(78_498);
        for i in 2..=limit {
            if !composite[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j <= limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

/// A positive integer in fully factored form: ordered `prime -> exponent`
/// with every exponent at least 1. The empty factorization is 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    entries: BTreeMap<BigUint, u64>,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization::default()
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }

    /// `p^e`; `e = 0` gives 1. The caller is responsible for `p` being prime.
    pub fn prime_power(p: BigUint, e: u64) -> Self {
        let mut entries = BTreeMap::new();
        if e > 0 {
            entries.insert(p, e);
        }
        Factorization { entries }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BigUint, u64)> + '_ {
        self.entries.iter().map(|(p, &e)| (p, e))
    }

    pub fn num_primes(&self) -> usize {
        self.entries.len()
    }

    pub fn max_prime(&self) -> Option<&BigUint> {
        self.entries.keys().next_back()
    }

    /// Stored exponent of `p`, 0 when absent. No primality check.
    pub fn exponent_of(&self, p: &BigUint) -> u64 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    /// The p-adic valuation; rejects non-prime `p`.
    pub fn valuation(&self, p: &BigUint, cfg: &Config) -> Result<u64> {
        if !is_prime(p, cfg) {
            return Err(Error::NotPrime(p.clone()));
        }
        Ok(self.exponent_of(p))
    }

    /// Expand back to the integer.
    pub fn value(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (p, e) in &self.entries {
            acc *= pow_big(p, *e);
        }
        acc
    }

    pub fn mul(&self, rhs: &Factorization) -> Factorization {
        let mut entries = self.entries.clone();
        for (p, e) in &rhs.entries {
            *entries.entry(p.clone()).or_insert(0) += e;
        }
        Factorization { entries }
    }

    pub fn pow(&self, e: u64) -> Factorization {
        if e == 0 {
            return Factorization::one();
        }
        let entries = self
            .entries
            .iter()
            .map(|(p, &k)| (p.clone(), k * e))
            .collect();
        Factorization { entries }
    }

    /// Copy with every occurrence of `p` removed.
    pub fn without_prime(&self, p: &BigUint) -> Factorization {
        let mut entries = self.entries.clone();
        entries.remove(p);
        Factorization { entries }
    }

    /// Same primes, all exponents 1.
    pub fn radical(&self) -> Factorization {
        let entries = self.entries.keys().map(|p| (p.clone(), 1)).collect();
        Factorization { entries }
    }

    /// The square-free kernel: exactly the primes of odd exponent, each to
    /// the first power. Dividing by it leaves a perfect square.
    pub fn squarefree_kernel(&self) -> Factorization {
        let entries = self
            .entries
            .iter()
            .filter(|(_, &e)| e % 2 == 1)
            .map(|(p, _)| (p.clone(), 1))
            .collect();
        Factorization { entries }
    }

    /// Halve all exponents; errors on any odd exponent.
    pub fn sqrt_exact(&self) -> Result<Factorization> {
        let mut entries = BTreeMap::new();
        for (p, &e) in &self.entries {
            if e % 2 != 0 {
                return Err(Error::NotASquare { prime: p.clone() });
            }
            entries.insert(p.clone(), e / 2);
        }
        Ok(Factorization { entries })
    }

    /// Euler's totient in factored form: `prod p^(e-1) * factor(p - 1)`.
    /// Exact; factoring `p - 1` is budgeted.
    pub fn totient(&self, cfg: &Config) -> Result<Factorization> {
        let mut acc = Factorization::one();
        for (p, &e) in &self.entries {
            if e > 1 {
                acc = acc.mul(&Factorization::prime_power(p.clone(), e - 1));
            }
            let pm1 = p - BigUint::one();
            if !pm1.is_one() {
                acc = acc.mul(&factorize(&pm1, cfg)?);
            }
        }
        Ok(acc)
    }

    pub fn to_vector(&self) -> ExponentVector {
        let entries = self
            .entries
            .iter()
            .map(|(p, &e)| (p.clone(), e as i64))
            .collect();
        ExponentVector { entries }
    }

    /// `(prime decimal string, exponent)` pairs, ascending by prime.
    pub fn pairs(&self) -> Vec<(String, u64)> {
        self.entries
            .iter()
            .map(|(p, &e)| (p.to_str_radix(10), e))
            .collect()
    }

    pub fn from_pairs(pairs: Vec<(String, u64)>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut last: Option<BigUint> = None;
        for (p, e) in pairs {
            let p = BigUint::from_str(&p)
                .map_err(|_| Error::InvalidInput(format!("bad prime string {p:?}")))?;
            if e == 0 {
                return Err(Error::InvalidInput(format!("zero exponent on {p}")));
            }
            if let Some(prev) = &last {
                if prev >= &p {
                    return Err(Error::InvalidInput("primes must be strictly ascending".into()));
                }
            }
            last = Some(p.clone());
            entries.insert(p, e);
        }
        Ok(Factorization { entries })
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in &self.entries {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Factorization {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for (p, e) in &self.entries {
            seq.serialize_element(&(p.to_str_radix(10), *e))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Factorization {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(String, u64)>::deserialize(deserializer)?;
        Factorization::from_pairs(pairs).map_err(D::Error::custom)
    }
}

fn pow_big(base: &BigUint, exp: u64) -> BigUint {
    let exp32 = u32::try_from(exp).expect("exponent too large to expand");
    base.pow(exp32)
}

// ---------------------------------------------------------------------------
// Factoring
// ---------------------------------------------------------------------------

/// Full factorization of `n >= 1`. Trial division by sieved primes up to
/// `cfg.trial_division_bound`, then Brent's rho with a fixed parameter
/// sequence (deterministic) under `cfg.rho_iteration_budget`.
pub fn factorize(n: &BigUint, cfg: &Config) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut budget = cfg.rho_iteration_budget;
    if let Some(small) = n.to_u64() {
        return factorize_u64_with_budget(small, cfg, &mut budget);
    }
    let mut entries = BTreeMap::new();
    let mut rest = n.clone();
    for &p in trial_primes() {
        if p > cfg.trial_division_bound {
            break;
        }
        let pb = BigUint::from(p);
        // quick skip: most primes will not divide
        if (&rest % &pb).is_zero() {
            let mut e = 0u64;
            loop {
                let (q, r) = rest.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            entries.insert(pb, e);
            if rest.is_one() {
                return Ok(Factorization { entries });
            }
            if let Some(small) = rest.to_u64() {
                let tail = factorize_u64_with_budget(small, cfg, &mut budget)?;
                return Ok(merge(entries, tail));
            }
        }
    }
    // rest > 2^64: split recursively
    let mut stack = vec![rest];
    while let Some(v) = stack.pop() {
        if v.is_one() {
            continue;
        }
        if let Some(small) = v.to_u64() {
            let tail = factorize_u64_with_budget(small, cfg, &mut budget)?;
            for (p, e) in tail.entries {
                *entries.entry(p).or_insert(0) += e;
            }
            continue;
        }
        if is_prime(&v, cfg) {
            *entries.entry(v).or_insert(0) += 1;
            continue;
        }
        // perfect powers defeat rho; peel them first
        if let Some((root, k)) = perfect_power(&v) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        let d = brent_rho_big(&v, &mut budget).ok_or(Error::FactorBoundExceeded {
            n: n.clone(),
            budget: cfg.rho_iteration_budget,
        })?;
        let q = &v / &d;
        stack.push(d);
        stack.push(q);
    }
    Ok(Factorization { entries })
}

/// Convenience wrapper for machine-word inputs.
pub fn factorize_u64(n: u64, cfg: &Config) -> Result<Factorization> {
    let mut budget = cfg.rho_iteration_budget;
    factorize_u64_with_budget(n, cfg, &mut budget)
}

fn merge(mut entries: BTreeMap<BigUint, u64>, tail: Factorization) -> Factorization {
    for (p, e) in tail.entries {
        *entries.entry(p).or_insert(0) += e;
    }
    Factorization { entries }
}

fn factorize_u64_with_budget(n: u64, cfg: &Config, budget: &mut u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut entries = BTreeMap::new();
    let mut rest = n;
    for &p in trial_primes() {
        if p > cfg.trial_division_bound || p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0u64;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            entries.insert(BigUint::from(p), e);
        }
    }
    if rest > 1 {
        let bound = cfg.trial_division_bound.min(1_000_000);
        if rest <= bound.saturating_mul(bound) || is_prime_u64(rest) {
            // every composite below bound^2 would have had a divisor stripped
            *entries.entry(BigUint::from(rest)).or_insert(0) += 1;
        } else {
            let mut stack = vec![rest];
            while let Some(v) = stack.pop() {
                if v == 1 {
                    continue;
                }
                if is_prime_u64(v) {
                    *entries.entry(BigUint::from(v)).or_insert(0) += 1;
                    continue;
                }
                let d = brent_rho_u64(v, budget).ok_or(Error::FactorBoundExceeded {
                    n: BigUint::from(n),
                    budget: cfg.rho_iteration_budget,
                })?;
                stack.push(d);
                stack.push(v / d);
            }
        }
    }
    Ok(Factorization { entries })
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Brent's cycle-finding variant of the rho method on a machine word.
/// The polynomial offset walks 1, 2, 3, ... so runs are reproducible.
fn brent_rho_u64(n: u64, budget: &mut u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1u64.. {
        if *budget == 0 {
            return None;
        }
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys = y;
                let m = 128.min(r - k);
                if *budget < m {
                    *budget = 0;
                    return None;
                }
                *budget -= m;
                for _ in 0..m {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
            }
        }
        if g != n {
            return Some(g);
        }
        // cycle collapsed to n itself; retry with the next offset
    }
    unreachable!()
}

fn brent_rho_big(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u8));
    }
    let one = BigUint::one();
    for c in 1u64.. {
        if *budget == 0 {
            return None;
        }
        let cb = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cb) % n;
        let mut y = BigUint::from(2u8);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                let m = 128.min(r - k);
                if *budget < m {
                    *budget = 0;
                    return None;
                }
                *budget -= m;
                for _ in 0..m {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            g = one.clone();
            while g.is_one() {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    unreachable!()
}

/// `Some((root, k))` with prime k when `n` is a perfect power.
///
/// Only prime exponents need testing, and only up to 61: after trial
/// division any composite cofactor has prime factors above 10^6, so a
/// perfect power with a larger exponent would exceed 10^400 and is out of
/// budget regardless.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    for k in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
        if k > bits {
            break;
        }
        let root = n.nth_root(k);
        if root > BigUint::one() && &root.pow(k) == n {
            return Some((root, k));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// ExponentVector
// ---------------------------------------------------------------------------

/// A positive rational as a finite signed exponent assignment over primes:
/// `q = prod p^(e_p)` with every stored `e_p` nonzero, ascending by prime.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExponentVector {
    entries: BTreeMap<BigUint, i64>,
}

impl ExponentVector {
    pub fn one() -> Self {
        ExponentVector::default()
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prime_power(p: BigUint, e: i64) -> Self {
        let mut entries = BTreeMap::new();
        if e != 0 {
            entries.insert(p, e);
        }
        ExponentVector { entries }
    }

    pub fn from_parts(num: &Factorization, den: &Factorization) -> Self {
        num.to_vector().mul(&den.to_vector().inverse())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BigUint, i64)> + '_ {
        self.entries.iter().map(|(p, &e)| (p, e))
    }

    pub fn support(&self) -> impl Iterator<Item = &BigUint> + '_ {
        self.entries.keys()
    }

    pub fn max_prime(&self) -> Option<&BigUint> {
        self.entries.keys().next_back()
    }

    pub fn exponent_of(&self, p: &BigUint) -> i64 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    /// The p-adic valuation `v_p(q)`; rejects non-prime `p`.
    pub fn valuation(&self, p: &BigUint, cfg: &Config) -> Result<i64> {
        if !is_prime(p, cfg) {
            return Err(Error::NotPrime(p.clone()));
        }
        Ok(self.exponent_of(p))
    }

    pub fn mul(&self, rhs: &ExponentVector) -> ExponentVector {
        let mut entries = self.entries.clone();
        for (p, e) in &rhs.entries {
            let slot = entries.entry(p.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                entries.remove(p);
            }
        }
        ExponentVector { entries }
    }

    pub fn pow(&self, e: i64) -> ExponentVector {
        if e == 0 {
            return ExponentVector::one();
        }
        let entries = self
            .entries
            .iter()
            .map(|(p, &k)| (p.clone(), k * e))
            .collect();
        ExponentVector { entries }
    }

    pub fn inverse(&self) -> ExponentVector {
        self.pow(-1)
    }

    /// Positive part: the factored numerator of the reduced fraction.
    pub fn numerator(&self) -> Factorization {
        let entries = self
            .entries
            .iter()
            .filter(|(_, &e)| e > 0)
            .map(|(p, &e)| (p.clone(), e as u64))
            .collect();
        Factorization { entries }
    }

    /// Negative part: the factored denominator of the reduced fraction.
    pub fn denominator(&self) -> Factorization {
        let entries = self
            .entries
            .iter()
            .filter(|(_, &e)| e < 0)
            .map(|(p, &e)| (p.clone(), (-e) as u64))
            .collect();
        Factorization { entries }
    }

    pub fn is_integral(&self) -> bool {
        self.entries.values().all(|&e| e > 0) || self.entries.is_empty()
    }

    pub fn to_rational(&self) -> Rational {
        Rational {
            num: self.numerator().value(),
            den: self.denominator().value(),
        }
    }

    pub fn pairs(&self) -> Vec<(String, i64)> {
        self.entries
            .iter()
            .map(|(p, &e)| (p.to_str_radix(10), e))
            .collect()
    }
}

impl std::ops::Mul<&ExponentVector> for &ExponentVector {
    type Output = ExponentVector;
    fn mul(self, rhs: &ExponentVector) -> ExponentVector {
        ExponentVector::mul(self, rhs)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in &self.entries {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}

impl Serialize for ExponentVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for (p, e) in &self.entries {
            seq.serialize_element(&(p.to_str_radix(10), *e))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ExponentVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(String, i64)>::deserialize(deserializer)?;
        let mut entries = BTreeMap::new();
        let mut last: Option<BigUint> = None;
        for (p, e) in pairs {
            let p = BigUint::from_str(&p)
                .map_err(|_| D::Error::custom(format!("bad prime string {p:?}")))?;
            if e == 0 {
                return Err(D::Error::custom("zero exponent stored"));
            }
            if let Some(prev) = &last {
                if prev >= &p {
                    return Err(D::Error::custom("primes must be strictly ascending"));
                }
            }
            last = Some(p.clone());
            entries.insert(p, e);
        }
        Ok(ExponentVector { entries })
    }
}

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

/// A positive rational `num/den` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational {
    num: BigUint,
    den: BigUint,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &self.num.to_str_radix(10))?;
        st.serialize_field("den", &self.den.to_str_radix(10))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: String,
            den: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let parse = |s: &str| {
            BigUint::from_str(s).map_err(|_| D::Error::custom(format!("bad integer {s:?}")))
        };
        Rational::new(parse(&raw.num)?, parse(&raw.den)?).map_err(D::Error::custom)
    }
}

impl Rational {
    pub fn new(num: BigUint, den: BigUint) -> Result<Self> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::InvalidInput(
                "rational must be positive: numerator and denominator >= 1".into(),
            ));
        }
        let g = num.gcd(&den);
        Ok(Rational {
            num: num / &g,
            den: den / &g,
        })
    }

    pub fn one() -> Self {
        Rational {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn to_vector(&self, cfg: &Config) -> Result<ExponentVector> {
        let num = factorize(&self.num, cfg)?;
        let den = factorize(&self.den, cfg)?;
        Ok(ExponentVector::from_parts(&num, &den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |_| Error::InvalidInput(format!("cannot parse rational {s:?}"));
        match s.split_once('/') {
            Some((u, v)) => {
                let num = BigUint::from_str(u.trim()).map_err(bad)?;
                let den = BigUint::from_str(v.trim()).map_err(bad)?;
                Rational::new(num, den)
            }
            None => {
                let num = BigUint::from_str(s.trim()).map_err(bad)?;
                Rational::new(num, BigUint::one())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn fact(pairs: &[(u64, u64)]) -> Factorization {
        let mut f = Factorization::one();
        for &(p, e) in pairs {
            f = f.mul(&Factorization::prime_power(big(p), e));
        }
        f
    }

    fn vec_of(pairs: &[(u64, i64)]) -> ExponentVector {
        let mut v = ExponentVector::one();
        for &(p, e) in pairs {
            v = v.mul(&ExponentVector::prime_power(big(p), e));
        }
        v
    }

    #[test]
    fn factorize_one_is_empty() {
        assert!(factorize(&big(1), &cfg()).unwrap().is_one());
    }

    #[test]
    fn factorize_3456000() {
        let f = factorize(&big(3_456_000), &cfg()).unwrap();
        assert_eq!(f, fact(&[(2, 10), (3, 3), (5, 3)]));
        assert_eq!(f.value(), big(3_456_000));
    }

    #[test]
    fn factorize_pell_square_minus_one() {
        // 19601^2 - 1
        let n = big(19601) * big(19601) - big(1u64);
        let f = factorize(&n, &cfg()).unwrap();
        assert_eq!(f, fact(&[(2, 5), (3, 4), (5, 2), (7, 2), (11, 2)]));
    }

    #[test]
    fn factorize_zero_rejected() {
        assert!(factorize(&BigUint::zero(), &cfg()).is_err());
    }

    #[test]
    fn factorize_big_path() {
        // (2^89 - 1) * 2^70: exceeds u64, splits into a Mersenne prime and a power of two.
        let m89 = (BigUint::one() << 89) - BigUint::one();
        let n = &m89 * (BigUint::one() << 70);
        let f = factorize(&n, &cfg()).unwrap();
        assert_eq!(f.exponent_of(&big(2)), 70);
        assert_eq!(f.exponent_of(&m89), 1);
        assert_eq!(f.value(), n);
    }

    #[test]
    fn totient_examples() {
        let c = cfg();
        assert!(Factorization::one().totient(&c).unwrap().is_one());
        assert_eq!(
            fact(&[(2, 2), (3, 1)]).totient(&c).unwrap(),
            fact(&[(2, 2)])
        );
        // phi(p^2) = p(p-1) with p = 3456001
        let f = Factorization::prime_power(big(3_456_001), 2);
        assert_eq!(
            f.totient(&c).unwrap(),
            fact(&[(2, 10), (3, 3), (5, 3), (3_456_001, 1)])
        );
    }

    #[test]
    fn radical_examples() {
        assert!(Factorization::one().radical().is_one());
        assert_eq!(fact(&[(2, 2), (3, 1)]).radical(), fact(&[(2, 1), (3, 1)]));
        assert_eq!(
            fact(&[(2, 10), (3, 3), (5, 3)]).radical(),
            fact(&[(2, 1), (3, 1), (5, 1)])
        );
    }

    #[test]
    fn valuation_examples() {
        let c = cfg();
        let q = vec_of(&[(2, -2), (3, -1), (5, 1)]); // 5/12
        assert_eq!(q.valuation(&big(2), &c).unwrap(), -2);
        assert_eq!(q.valuation(&big(5), &c).unwrap(), 1);
        assert_eq!(ExponentVector::one().valuation(&big(7), &c).unwrap(), 0);
        assert!(matches!(
            q.valuation(&big(4), &c),
            Err(Error::NotPrime(_))
        ));
    }

    #[test]
    fn vector_group_ops() {
        let q = vec_of(&[(2, 5), (3, 1), (5, -1)]);
        assert!(q.mul(&q.inverse()).is_one());
        assert_eq!(
            ExponentVector::prime_power(big(2), 1).pow(3),
            vec_of(&[(2, 3)])
        );
        assert_eq!(
            q.mul(&vec_of(&[(5, 1)])),
            vec_of(&[(2, 5), (3, 1)])
        );
    }

    #[test]
    fn squarefree_kernel_examples() {
        assert!(fact(&[(2, 2), (3, 2)]).squarefree_kernel().is_one());
        assert_eq!(
            fact(&[(2, 3), (3, 2), (5, 2)]).squarefree_kernel(),
            fact(&[(2, 1)])
        );
        let sf = fact(&[(2, 1), (3, 1)]);
        assert_eq!(sf.squarefree_kernel(), sf);
    }

    #[test]
    fn sqrt_exact_examples() {
        assert!(Factorization::one().sqrt_exact().unwrap().is_one());
        assert_eq!(
            fact(&[(2, 2), (3, 2), (5, 2)]).sqrt_exact().unwrap(),
            fact(&[(2, 1), (3, 1), (5, 1)])
        );
        assert!(matches!(
            fact(&[(2, 3)]).sqrt_exact(),
            Err(Error::NotASquare { .. })
        ));
    }

    #[test]
    fn rational_parsing_and_reduction() {
        let q: Rational = "10/24".parse().unwrap();
        assert_eq!(q, Rational::new(big(5), big(12)).unwrap());
        assert_eq!(q.to_string(), "5/12");
        let w: Rational = "7".parse().unwrap();
        assert_eq!(w.den(), &big(1));
        assert!("0/3".parse::<Rational>().is_err());
        assert!("3/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn rational_vector_round_trip() {
        let c = cfg();
        let q: Rational = "5/12".parse().unwrap();
        let v = q.to_vector(&c).unwrap();
        assert_eq!(v, vec_of(&[(2, -2), (3, -1), (5, 1)]));
        assert_eq!(v.to_rational(), q);
        assert_eq!(v.numerator(), fact(&[(5, 1)]));
        assert_eq!(v.denominator(), fact(&[(2, 2), (3, 1)]));
    }

    #[test]
    fn serialization_is_ordered_pairs() {
        let f = fact(&[(3456001, 2), (2, 8), (5, 4), (3, 3)]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"[["2",8],["3",3],["5",4],["3456001",2]]"#);
        let back: Factorization = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);

        let v = vec_of(&[(2, -2), (5, 1)]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"[["2",-2],["5",1]]"#);
        let back: ExponentVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn factorize_round_trip(n in 1u64..1_000_000) {
                let f = factorize(&big(n), &cfg()).unwrap();
                prop_assert_eq!(f.value(), big(n));
                for (p, e) in f.entries() {
                    prop_assert!(is_prime(p, &cfg()));
                    prop_assert!(e >= 1);
                }
            }

            #[test]
            fn totient_is_multiplicative(a in 1u64..10_000, b in 1u64..10_000) {
                let (a, b) = (big(a), big(b));
                prop_assume!(a.gcd(&b).is_one());
                let c = cfg();
                let fa = factorize(&a, &c).unwrap();
                let fb = factorize(&b, &c).unwrap();
                let fab = factorize(&(&a * &b), &c).unwrap();
                prop_assert_eq!(
                    fab.totient(&c).unwrap(),
                    fa.totient(&c).unwrap().mul(&fb.totient(&c).unwrap())
                );
            }

            /// phi(m)/phi(n) = m/n whenever rad(m) = rad(n).
            #[test]
            fn rad_equal_pairs_satisfy_totient_identity(
                exps_m in proptest::collection::vec(1u64..4, 3),
                exps_n in proptest::collection::vec(1u64..4, 3),
            ) {
                let primes = [2u64, 3, 7];
                let c = cfg();
                let mut m = Factorization::one();
                let mut n = Factorization::one();
                for i in 0..3 {
                    m = m.mul(&Factorization::prime_power(big(primes[i]), exps_m[i]));
                    n = n.mul(&Factorization::prime_power(big(primes[i]), exps_n[i]));
                }
                prop_assert_eq!(m.radical(), n.radical());
                let lhs = ExponentVector::from_parts(
                    &m.totient(&c).unwrap(),
                    &n.totient(&c).unwrap(),
                );
                let rhs = ExponentVector::from_parts(&m, &n);
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn valuation_is_additive(
                ea in proptest::collection::vec(-5i64..5, 4),
                eb in proptest::collection::vec(-5i64..5, 4),
            ) {
                let primes = [2u64, 3, 5, 11];
                let c = cfg();
                let mut a = ExponentVector::one();
                let mut b = ExponentVector::one();
                for i in 0..4 {
                    a = a.mul(&ExponentVector::prime_power(big(primes[i]), ea[i]));
                    b = b.mul(&ExponentVector::prime_power(big(primes[i]), eb[i]));
                }
                let ab = a.mul(&b);
                for p in primes {
                    prop_assert_eq!(
                        ab.valuation(&big(p), &c).unwrap(),
                        a.valuation(&big(p), &c).unwrap() + b.valuation(&big(p), &c).unwrap()
                    );
                }
            }

            /// f / squarefree_kernel(f) is a perfect square.
            #[test]
            fn kernel_quotient_is_square(n in 1u64..200_000) {
                let f = factorize(&big(n), &cfg()).unwrap();
                let kernel = f.squarefree_kernel();
                let mut quotient = Factorization::one();
                for (p, e) in f.entries() {
                    let k = kernel.exponent_of(p);
                    if e > k {
                        quotient = quotient.mul(&Factorization::prime_power(p.clone(), e - k));
                    }
                }
                let root = quotient.sqrt_exact().unwrap();
                prop_assert_eq!(root.pow(2).mul(&kernel), f);
            }
        }
    }
}
