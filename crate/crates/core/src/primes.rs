//! Primality testing and bounded empirical search for primes in arithmetic
//! progressions. The progression search stands in for Dirichlet's theorem:
//! existence is assumed, the scan is explicit and budgeted.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

use crate::config::Config;
use crate::error::Error;
use crate::Result;

/// Witness bases that make Miller-Rabin deterministic for all n < 3.3e24,
/// which covers every u64.
const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Primes below 2^16, sieved once. Enough trial divisors to certify any
/// u32 and to strip small factors before the rho method takes over.
pub(crate) fn small_primes() -> &'static [u64] {
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    SMALL.get_or_init(|| sieve(1 << 16))
}

fn sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
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
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'base: for &a in &MR_BASES_U64 {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// splitmix64; used to derive deterministic Miller-Rabin bases for big
/// inputs so that repeated runs agree.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Primality test: deterministic and correct below 2^64, Miller-Rabin with
/// `cfg.mr_rounds` deterministic pseudo-random bases above (error <= 4^-rounds).
pub fn is_prime(n: &BigUint, cfg: &Config) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    for &p in small_primes().iter().take(256) {
        if (n % BigUint::from(p)).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    // Seed the base stream from the candidate itself: deterministic per n.
    let mut state = n
        .iter_u64_digits()
        .fold(0x5851f42d4c957f2du64, |acc, w| acc.rotate_left(7) ^ w);
    let two = BigUint::from(2u8);
    'round: for _ in 0..cfg.mr_rounds {
        // base in [2, n-2]
        let raw = BigUint::from(splitmix64(&mut state));
        let base = &two + (raw % (n - BigUint::from(4u8)));
        let mut x = base.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'round;
            }
        }
        return false;
    }
    true
}

/// Exactly the primes `<= x`, ascending.
pub fn primes_upto(x: u64, cfg: &Config) -> Result<Vec<u64>> {
    if x > cfg.sieve_budget {
        return Err(Error::SieveBudgetExceeded {
            x,
            budget: cfg.sieve_budget,
        });
    }
    if x < 2 {
        return Ok(Vec::new());
    }
    Ok(sieve(x))
}

/// A bounded search for the smallest prime `p ≡ residue (mod modulus)` with
/// `p >= min_value`.
#[derive(Debug, Clone)]
pub struct ApSearch {
    pub residue: BigUint,
    pub modulus: BigUint,
    pub min_value: BigUint,
    pub max_candidates: u64,
}

impl ApSearch {
    pub fn new(residue: BigUint, modulus: BigUint, min_value: BigUint, cfg: &Config) -> Self {
        ApSearch {
            residue,
            modulus,
            min_value,
            max_candidates: cfg.prime_search_budget,
        }
    }
}

/// Scan `residue, residue + M, residue + 2M, ...` and return the smallest
/// prime at or above `min_value`. Deterministic; errors out when the
/// candidate budget is spent.
pub fn find_prime_in_ap(spec: &ApSearch, cfg: &Config) -> Result<BigUint> {
    if spec.residue.gcd(&spec.modulus) != BigUint::one() {
        return Err(Error::GcdViolation {
            a: spec.residue.clone(),
            modulus: spec.modulus.clone(),
        });
    }
    let mut candidate = spec.residue.clone();
    // jump straight to the first candidate >= min_value
    if candidate < spec.min_value {
        let deficit = &spec.min_value - &candidate;
        let steps = (&deficit + &spec.modulus - BigUint::one()) / &spec.modulus;
        candidate += steps * &spec.modulus;
    }
    let mut scanned = 0u64;
    while scanned < spec.max_candidates {
        if candidate >= BigUint::from(2u8) && is_prime(&candidate, cfg) {
            return Ok(candidate);
        }
        candidate += &spec.modulus;
        scanned += 1;
    }
    Err(Error::SearchExhausted {
        scanned,
        what: format!(
            "prime ≡ {} (mod {}) above {}",
            spec.residue, spec.modulus, spec.min_value
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn small_prime_table_starts_correctly() {
        assert_eq!(&small_primes()[..5], &[2, 3, 5, 7, 11]);
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime_u64(3_456_001));
        assert!(is_prime_u64(5_184_001));
        assert!(is_prime_u64(14401));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1_728_001)); // 11 * 157091
    }

    #[test]
    fn is_prime_agrees_with_trial_division_below_1e6() {
        let table = sieve(1_000_000);
        let mut idx = 0usize;
        for n in 0..=1_000_000u64 {
            let in_table = idx < table.len() && table[idx] == n;
            if in_table {
                idx += 1;
            }
            assert_eq!(is_prime_u64(n), in_table, "mismatch at {n}");
        }
    }

    #[test]
    fn is_prime_biguint_path() {
        let c = cfg();
        // 2^89 - 1 is a Mersenne prime.
        let m89 = (BigUint::one() << 89) - BigUint::one();
        assert!(is_prime(&m89, &c));
        let m89_plus_2 = &m89 + BigUint::from(2u8);
        assert!(!is_prime(&m89_plus_2, &c));
    }

    #[test]
    fn primes_upto_examples() {
        let c = cfg();
        assert_eq!(primes_upto(10, &c).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_upto(2, &c).unwrap(), vec![2]);
        assert_eq!(
            primes_upto(30, &c).unwrap(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
        let tight = Config {
            sieve_budget: 10,
            ..cfg()
        };
        assert!(matches!(
            primes_upto(11, &tight),
            Err(Error::SieveBudgetExceeded { .. })
        ));
    }

    #[test]
    fn ap_search_finds_14401() {
        let c = cfg();
        let spec = ApSearch::new(
            BigUint::one(),
            BigUint::from(14400u32),
            BigUint::from(2u8),
            &c,
        );
        assert_eq!(find_prime_in_ap(&spec, &c).unwrap(), BigUint::from(14401u32));
    }

    #[test]
    fn ap_search_finds_3456001_skipping_composite_1728001() {
        let c = cfg();
        let spec = ApSearch::new(
            BigUint::one(),
            BigUint::from(1_728_000u32),
            BigUint::from(2u8),
            &c,
        );
        assert_eq!(
            find_prime_in_ap(&spec, &c).unwrap(),
            BigUint::from(3_456_001u32)
        );
    }

    #[test]
    fn ap_search_rejects_shared_factor() {
        let c = cfg();
        let spec = ApSearch::new(BigUint::from(2u8), BigUint::from(4u8), BigUint::from(2u8), &c);
        assert!(matches!(
            find_prime_in_ap(&spec, &c),
            Err(Error::GcdViolation { .. })
        ));
    }

    #[test]
    fn ap_search_result_is_minimal_by_rescan() {
        let c = cfg();
        for (a, m) in [(1u32, 30u32), (7, 12), (3, 8), (1, 14400)] {
            let spec = ApSearch::new(BigUint::from(a), BigUint::from(m), BigUint::from(2u8), &c);
            let p = find_prime_in_ap(&spec, &c).unwrap();
            assert!(is_prime(&p, &c));
            assert_eq!(&p % BigUint::from(m), BigUint::from(a % m));
            // no smaller qualifying candidate is prime
            let mut candidate = BigUint::from(a);
            while candidate < p {
                assert!(candidate < BigUint::from(2u8) || !is_prime(&candidate, &c));
                candidate += BigUint::from(m);
            }
        }
    }

    #[test]
    fn ap_search_budget_is_enforced() {
        let c = cfg();
        // 5 ≡ 2 (mod 3) are plentiful, so squeeze the budget to force the error.
        let spec = ApSearch {
            residue: BigUint::from(8u8),          // 8 ≡ 2 (mod 3), 8 < min
            modulus: BigUint::from(1_000_003u64), // huge gaps
            min_value: BigUint::from(2u8),
            max_candidates: 1,
        };
        // candidate 8 is composite, budget of 1 exhausted
        assert!(matches!(
            find_prime_in_ap(&spec, &c),
            Err(Error::SearchExhausted { .. })
        ));
    }
}
