//! Quicksort-style LDP comparison baselines sharing the privacy and
//! protocol primitives: one with up-front query collection, one that
//! queries interactively against each pivot under a per-agent answer budget.

use rand::Rng;

use crate::error::{Error, Result};
use crate::privacy::{gaussian_sigma, randomize_bit, PrivacySpec};
use crate::protocol::{assign_queries, collect, tally_answers};
use crate::ranking::{pairwise_bit, PairwiseCounts, Ranking};

/// Remaining answer count per agent; every agent starts at K and each
/// answer spends exactly one unit.
#[derive(Debug, Clone)]
pub struct BudgetLedger {
    remaining: Vec<usize>,
    k: usize,
}

impl BudgetLedger {
    pub fn new(n: usize, k: usize) -> Self {
        BudgetLedger {
            remaining: vec![k; n],
            k,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn remaining(&self, agent: usize) -> usize {
        self.remaining[agent]
    }

    /// Agents that can still answer, in ascending order.
    pub fn agents_with_budget(&self) -> Vec<usize> {
        (0..self.remaining.len())
            .filter(|&u| self.remaining[u] > 0)
            .collect()
    }

    /// Spend one answer from `agent`'s budget.
    pub fn spend(&mut self, agent: usize) -> Result<()> {
        let slot = self
            .remaining
            .get_mut(agent)
            .ok_or_else(|| Error::invalid(format!("agent {agent} out of range")))?;
        if *slot == 0 {
            return Err(Error::invalid(format!("agent {agent} has no budget left")));
        }
        *slot -= 1;
        Ok(())
    }
}

/// Collect noisy answers exactly as the main pipeline does, then sort with
/// uniformly random pivots: an alternative goes before the pivot iff its
/// collected wins against the pivot exceed its losses, with ties and missing
/// data broken by a fair coin.
pub fn ldp_kwiksort<R: Rng>(
    profile: &[Ranking],
    spec: &PrivacySpec,
    rng: &mut R,
) -> Result<Ranking> {
    let first = profile
        .first()
        .ok_or_else(|| Error::invalid("profile must contain at least one ranking"))?;
    let m = first.m();
    let assignments = assign_queries(profile.len(), m, spec.k_queries, rng)?;
    let answers = collect(profile, &assignments, spec, rng)?;
    let counts = tally_answers(&answers, m)?;

    let alternatives: Vec<usize> = (0..m).collect();
    let order = kwiksort_order(
        &counts,
        &alternatives,
        &mut |subset, r: &mut R| r.random_range(0..subset.len()),
        &mut |r| r.random_bool(0.5),
        rng,
    );
    Ranking::new(order)
}

/// Pivot recursion on a fixed count matrix. `choose_pivot` returns an index
/// into the current subset; `coin` breaks ties and no-data comparisons.
pub(crate) fn kwiksort_order<R: Rng>(
    counts: &PairwiseCounts,
    subset: &[usize],
    choose_pivot: &mut impl FnMut(&[usize], &mut R) -> usize,
    coin: &mut impl FnMut(&mut R) -> bool,
    rng: &mut R,
) -> Vec<usize> {
    if subset.len() <= 1 {
        return subset.to_vec();
    }
    let pivot = subset[choose_pivot(subset, rng)];
    let mut before = Vec::new();
    let mut after = Vec::new();
    for &alt in subset {
        if alt == pivot {
            continue;
        }
        let wins = counts.get(alt, pivot);
        let losses = counts.get(pivot, alt);
        let goes_before = if wins != losses {
            wins > losses
        } else {
            coin(rng)
        };
        if goes_before {
            before.push(alt);
        } else {
            after.push(alt);
        }
    }
    let mut order = kwiksort_order(counts, &before, choose_pivot, coin, rng);
    order.push(pivot);
    order.extend(kwiksort_order(counts, &after, choose_pivot, coin, rng));
    order
}

/// Interactive quicksort: when a pivot is chosen, the curator queries the
/// preference between the pivot and each other alternative in the subset,
/// comparison by comparison, collecting one fresh Gaussian-noised answer
/// from every agent that still has budget; the majority of received bits
/// decides the partition side. No answers at all falls back to a fair coin.
///
/// With small K the early comparisons exhaust the whole answer supply and
/// deep recursion runs on coin flips; with K = C(m,2) every agent answers
/// every comparison (quicksort never makes more than C(m,2) of them).
pub fn ldp_quicksort(
    profile: &[Ranking],
    spec: &PrivacySpec,
    rng: &mut impl Rng,
) -> Result<Ranking> {
    run_quicksort(profile, spec, rng).map(|(ranking, _)| ranking)
}

pub(crate) fn run_quicksort(
    profile: &[Ranking],
    spec: &PrivacySpec,
    rng: &mut impl Rng,
) -> Result<(Ranking, BudgetLedger)> {
    spec.validate()?;
    let first = profile
        .first()
        .ok_or_else(|| Error::invalid("profile must contain at least one ranking"))?;
    let m = first.m();
    let n = profile.len();
    let sigma = gaussian_sigma(spec);

    let mut ledger = BudgetLedger::new(n, spec.k_queries);
    let alternatives: Vec<usize> = (0..m).collect();
    let order = quicksort_subset(profile, &alternatives, sigma, &mut ledger, rng)?;
    Ok((Ranking::new(order)?, ledger))
}

fn quicksort_subset(
    profile: &[Ranking],
    subset: &[usize],
    sigma: f64,
    ledger: &mut BudgetLedger,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    if subset.len() <= 1 {
        return Ok(subset.to_vec());
    }
    let pivot = subset[rng.random_range(0..subset.len())];
    let mut before = Vec::new();
    let mut after = Vec::new();
    for &alt in subset {
        if alt == pivot {
            continue;
        }
        let mut ones = 0usize;
        let mut zeros = 0usize;
        for agent in ledger.agents_with_budget() {
            ledger.spend(agent)?;
            let truth = pairwise_bit(&profile[agent], alt, pivot)?;
            if randomize_bit(truth, sigma, rng) == 1 {
                ones += 1;
            } else {
                zeros += 1;
            }
        }
        let goes_before = if ones != zeros {
            ones > zeros
        } else {
            rng.random_bool(0.5)
        };
        if goes_before {
            before.push(alt);
        } else {
            after.push(alt);
        }
    }
    let mut order = quicksort_subset(profile, &before, sigma, ledger, rng)?;
    order.push(pivot);
    order.extend(quicksort_subset(profile, &after, sigma, ledger, rng)?);
    Ok(order)
}
