//! Which cardinalities n + t(n-m) the flag family reaches, compared against
//! the closed-form prime/composite characterization.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ⌈n/2⌉
fn half_up(n: u64) -> u64 {
    n.div_ceil(2)
}

/// n + (⌈n/2⌉ - 1)(n - ⌈n/2⌉)
pub fn max_cardinality(n: usize) -> u64 {
    let n = n as u64;
    if n == 0 {
        return 0;
    }
    let h = half_up(n);
    n + (h - 1) * (n - h)
}

/// Ground truth: every n + t(n-m) over valid (m, t), by direct double loop.
pub fn achievable_cardinalities(n: usize) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for m in 1..=n as u64 {
        for t in 0..m {
            out.insert(n as u64 + t * (n as u64 - m));
        }
    }
    out
}

/// Sieve of Eratosthenes; `is_prime[k]` for `k <= limit`.
pub fn prime_sieve(limit: usize) -> Vec<bool> {
    let mut is_prime = vec![true; limit + 1];
    for flag in is_prime.iter_mut().take(2) {
        *flag = false;
    }
    let mut p = 2;
    while p * p <= limit {
        if is_prime[p] {
            let mut q = p * p;
            while q <= limit {
                is_prime[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    is_prime
}

/// Has a divisor strictly between 1 and itself. 0 and 1 are not composite.
pub fn is_composite(c: u64) -> bool {
    c >= 4 && (2..).take_while(|d| d * d <= c).any(|d| c.is_multiple_of(d))
}

fn check_range(n: usize, p: u64) -> Result<()> {
    let (low, high) = (n as u64, max_cardinality(n));
    if p < low || p > high {
        return Err(Error::OutOfRange { n, p, low, high });
    }
    Ok(())
}

/// The closed-form condition, read with m - 1 replaced by n - 2:
/// `p - n <= n - 2` or `p - n` composite. A zero delta always qualifies
/// (t = 0 works for every m), which only matters for n = 1.
pub fn paper_predicate(n: usize, p: u64) -> Result<bool> {
    check_range(n, p)?;
    Ok(predicate_with(n as u64, p - n as u64, is_composite))
}

fn predicate_with(n: u64, delta: u64, composite: impl Fn(u64) -> bool) -> bool {
    delta == 0 || delta + 2 <= n || composite(delta)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityAudit {
    pub n: usize,
    pub achievable: BTreeSet<u64>,
    pub paper_predicate_set: BTreeSet<u64>,
    pub discrepancies: BTreeSet<u64>,
    pub max_cardinality: u64,
}

/// One line of the human-readable audit table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRow {
    pub p: u64,
    pub in_oracle: bool,
    pub in_predicate: bool,
}

impl CardinalityAudit {
    pub fn rows(&self) -> Vec<AuditRow> {
        (self.n as u64..=self.max_cardinality)
            .map(|p| AuditRow {
                p,
                in_oracle: self.achievable.contains(&p),
                in_predicate: self.paper_predicate_set.contains(&p),
            })
            .collect()
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "n = {}\n{:>6}  {:>9}  {:>12}\n",
            self.n, "p", "in_oracle", "in_predicate"
        );
        for row in self.rows() {
            let mark = if row.in_oracle != row.in_predicate {
                "  <- discrepancy"
            } else {
                ""
            };
            out.push_str(&format!(
                "{:>6}  {:>9}  {:>12}{mark}\n",
                row.p, row.in_oracle, row.in_predicate
            ));
        }
        out
    }
}

/// Compares the ground-truth set with the predicate over the whole
/// admissible range. Compositeness here comes from a sieve, independent of
/// the trial division used by [`paper_predicate`].
pub fn audit(n: usize) -> CardinalityAudit {
    let achievable = achievable_cardinalities(n);
    let max = max_cardinality(n);
    let low = n as u64;
    let sieve = prime_sieve((max - low.min(max)) as usize);
    let composite = |d: u64| d >= 4 && !sieve[d as usize];
    let paper_predicate_set: BTreeSet<u64> = (low..=max)
        .filter(|&p| predicate_with(low, p - low, composite))
        .collect();
    let discrepancies = achievable
        .symmetric_difference(&paper_predicate_set)
        .copied()
        .collect();
    CardinalityAudit {
        n,
        achievable,
        paper_predicate_set,
        discrepancies,
        max_cardinality: max,
    }
}
