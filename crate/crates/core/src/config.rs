//! Effort budgets shared by every operation that could otherwise run forever.

use serde::{Deserialize, Serialize};

/// Tunable budgets and limits. All operations are deterministic given a
/// config; budgets exist so that infeasible inputs fail loudly instead of
/// hanging.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Config {
    /// Trial-division bound used before switching to the rho method.
    pub trial_division_bound: u64,
    /// Total rho iterations allowed per factorization before
    /// `FactorBoundExceeded`.
    pub rho_iteration_budget: u64,
    /// Candidates scanned per arithmetic-progression prime search.
    pub prime_search_budget: u64,
    /// Largest sieve argument accepted by `primes_upto`.
    pub sieve_budget: u64,
    /// Continued-fraction steps allowed per Pell solve.
    pub pell_period_budget: u64,
    /// Miller-Rabin rounds for integers at or above 2^64 (error <= 4^-rounds).
    pub mr_rounds: u32,
    /// Strict-mode constructions reject supports whose largest prime exceeds
    /// this, since the factorial modulus makes the progression search
    /// infeasible at desk scale.
    pub max_support_prime_strict: u64,
    /// Seed-prime candidates scanned in compact mode before falling back to
    /// strict mode.
    pub compact_candidate_budget: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            trial_division_bound: 1_000_000,
            rho_iteration_budget: 4_000_000,
            prime_search_budget: 1_000_000,
            sieve_budget: 100_000_000,
            pell_period_budget: 4_000_000,
            mr_rounds: 64,
            max_support_prime_strict: 13,
            compact_candidate_budget: 100_000,
        }
    }
}
