//! The three-party pipeline: curator query assignment, agent-side noisy
//! answering, shuffler anonymization, and curator tallying.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::privacy::{gaussian_sigma, randomize_bit, PrivacySpec};
use crate::ranking::{pair_count, pairwise_bit, PairwiseCounts, Ranking};

/// An unordered pair of alternatives in canonical form `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairQuery {
    i: usize,
    j: usize,
}

impl PairQuery {
    /// Canonicalize `(a, b)` to `i < j`.
    pub fn new(a: usize, b: usize, m: usize) -> Result<Self> {
        if a == b {
            return Err(Error::invalid("a pair needs two distinct alternatives"));
        }
        if a >= m || b >= m {
            return Err(Error::invalid(format!(
                "pair ({a},{b}) out of range for m = {m}"
            )));
        }
        Ok(PairQuery {
            i: a.min(b),
            j: a.max(b),
        })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }
}

/// All `C(m,2)` canonical pairs in lexicographic order.
pub fn all_pairs(m: usize) -> Vec<PairQuery> {
    let mut pairs = Vec::with_capacity(pair_count(m));
    for i in 0..m {
        for j in (i + 1)..m {
            pairs.push(PairQuery { i, j });
        }
    }
    pairs
}

/// One noisy pairwise answer; `bit = 1` asserts `a_i ≻ a_j` for the
/// canonical pair. The agent id is present before shuffling only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoisyAnswer {
    pub pair: PairQuery,
    pub bit: u8,
    pub agent_id: Option<usize>,
}

/// Post-shuffle answers grouped per pair with agent identity erased; within
/// each group the bits carry a uniformly random order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffledBatch {
    groups: BTreeMap<PairQuery, Vec<u8>>,
}

impl ShuffledBatch {
    pub fn groups(&self) -> &BTreeMap<PairQuery, Vec<u8>> {
        &self.groups
    }

    /// Total number of answers across all pairs.
    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Debug dump: CSV `pair_i,pair_j,bit`, one row per answer in shuffled
    /// order. Deliberately carries no agent column.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "pair_i,pair_j,bit")?;
        for (pair, bits) in &self.groups {
            for bit in bits {
                writeln!(w, "{},{},{}", pair.i, pair.j, bit)?;
            }
        }
        Ok(())
    }
}

/// Assign each of `n` agents `k` distinct pairs drawn uniformly without
/// replacement from all `C(m,2)` pairs, independently across agents.
pub fn assign_queries(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<PairQuery>>> {
    if m < 2 {
        return Err(Error::invalid("need at least two alternatives"));
    }
    let pairs = all_pairs(m);
    if k < 1 || k > pairs.len() {
        return Err(Error::invalid(format!(
            "k = {k} must lie in 1..={}",
            pairs.len()
        )));
    }
    let mut assignments = Vec::with_capacity(n);
    for _ in 0..n {
        let chosen = rand::seq::index::sample(rng, pairs.len(), k);
        assignments.push(chosen.iter().map(|idx| pairs[idx]).collect());
    }
    Ok(assignments)
}

/// Agent-side collection: each agent answers its assigned pairs with a
/// Gaussian-noised, thresholded preference bit.
pub fn collect(
    profile: &[Ranking],
    assignments: &[Vec<PairQuery>],
    spec: &PrivacySpec,
    rng: &mut impl Rng,
) -> Result<Vec<NoisyAnswer>> {
    spec.validate()?;
    if profile.len() != assignments.len() {
        return Err(Error::invalid(format!(
            "{} assignments for {} agents",
            assignments.len(),
            profile.len()
        )));
    }
    let sigma = gaussian_sigma(spec);
    let mut answers = Vec::new();
    for (agent, (ranking, queries)) in profile.iter().zip(assignments).enumerate() {
        for query in queries {
            let truth = pairwise_bit(ranking, query.i, query.j)?;
            answers.push(NoisyAnswer {
                pair: *query,
                bit: randomize_bit(truth, sigma, rng),
                agent_id: Some(agent),
            });
        }
    }
    Ok(answers)
}

pub(crate) fn shuffle_in_place<T>(items: &mut [T], rng: &mut impl Rng) {
    items.shuffle(rng);
}

/// Shuffler: group answers by canonical pair, apply a uniform random
/// permutation within each group, and drop agent identities. The multiset of
/// bits per pair is preserved.
pub fn shuffle(answers: &[NoisyAnswer], rng: &mut impl Rng) -> ShuffledBatch {
    let mut groups: BTreeMap<PairQuery, Vec<u8>> = BTreeMap::new();
    for answer in answers {
        groups.entry(answer.pair).or_default().push(answer.bit);
    }
    for bits in groups.values_mut() {
        shuffle_in_place(bits, rng);
    }
    ShuffledBatch { groups }
}

/// Curator tally of a shuffled batch: 1-bits count for `a_i ≻ a_j`, 0-bits
/// for `a_j ≻ a_i`.
pub fn tally_batch(batch: &ShuffledBatch, m: usize) -> Result<PairwiseCounts> {
    let mut counts = PairwiseCounts::zeros(m)?;
    for (pair, bits) in &batch.groups {
        if pair.j >= m {
            return Err(Error::invalid(format!(
                "pair ({},{}) out of range for m = {m}",
                pair.i, pair.j
            )));
        }
        let ones = bits.iter().filter(|&&b| b == 1).count() as u64;
        let zeros = bits.len() as u64 - ones;
        counts.add(pair.i, pair.j, ones)?;
        counts.add(pair.j, pair.i, zeros)?;
    }
    Ok(counts)
}

/// Tally answers directly without a shuffler (the plain LDP curator view).
pub fn tally_answers(answers: &[NoisyAnswer], m: usize) -> Result<PairwiseCounts> {
    let mut counts = PairwiseCounts::zeros(m)?;
    for answer in answers {
        if answer.pair.j >= m {
            return Err(Error::invalid(format!(
                "pair ({},{}) out of range for m = {m}",
                answer.pair.i, answer.pair.j
            )));
        }
        if answer.bit == 1 {
            counts.add(answer.pair.i, answer.pair.j, 1)?;
        } else {
            counts.add(answer.pair.j, answer.pair.i, 1)?;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn noiseless_spec() -> PrivacySpec {
        PrivacySpec::for_bits(1e6, 1e-4, 1).unwrap()
    }

    #[test]
    fn pair_query_canonicalizes() {
        let p = PairQuery::new(3, 1, 4).unwrap();
        assert_eq!((p.i(), p.j()), (1, 3));
        assert!(PairQuery::new(2, 2, 4).is_err());
        assert!(PairQuery::new(0, 4, 4).is_err());
    }

    #[test]
    fn full_assignment_exhausts_all_pairs() {
        let mut rng = rng(1);
        let assignments = assign_queries(5, 4, 6, &mut rng).unwrap();
        for agent_pairs in &assignments {
            let mut sorted = agent_pairs.clone();
            sorted.sort();
            assert_eq!(sorted, all_pairs(4));
        }
    }

    #[test]
    fn assignment_rejects_bad_k() {
        let mut r = rng(2);
        assert!(assign_queries(3, 4, 0, &mut r).is_err());
        assert!(assign_queries(3, 4, 7, &mut r).is_err());
    }

    #[test]
    fn assignment_counts_concentrate() {
        // k = 1, n = 60000, m = 4: each pair receives Binomial(n, 1/6)
        // assignments, within 3 standard deviations of n/6 for this seed.
        let n = 60_000;
        let mut rng = rng(3);
        let assignments = assign_queries(n, 4, 1, &mut rng).unwrap();
        let mut per_pair: BTreeMap<PairQuery, usize> = BTreeMap::new();
        for pairs in &assignments {
            *per_pair.entry(pairs[0]).or_default() += 1;
        }
        let expected = n as f64 / 6.0;
        let band = 3.0 * (expected * (5.0 / 6.0)).sqrt();
        assert_eq!(per_pair.len(), 6);
        for (pair, count) in per_pair {
            assert!(
                (count as f64 - expected).abs() <= band,
                "pair {pair:?} count {count} outside {expected} +- {band}"
            );
        }
    }

    #[test]
    fn assignments_are_distinct_per_agent() {
        let mut rng = rng(4);
        let assignments = assign_queries(50, 5, 4, &mut rng).unwrap();
        for pairs in assignments {
            let mut sorted = pairs.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 4);
        }
    }

    #[test]
    fn noiseless_collection_reports_true_bits() {
        let profile = vec![
            Ranking::new(vec![2, 0, 1]).unwrap(),
            Ranking::new(vec![0, 1, 2]).unwrap(),
        ];
        let mut r = rng(5);
        let assignments = assign_queries(2, 3, 3, &mut r).unwrap();
        let answers = collect(&profile, &assignments, &noiseless_spec(), &mut r).unwrap();
        assert_eq!(answers.len(), 6);
        for answer in answers {
            let agent = answer.agent_id.unwrap();
            let truth = pairwise_bit(&profile[agent], answer.pair.i(), answer.pair.j()).unwrap();
            assert_eq!(answer.bit, truth);
        }
    }

    #[test]
    fn single_agent_answers_exactly_k_distinct_pairs() {
        let profile = vec![Ranking::new(vec![1, 0, 2]).unwrap()];
        let mut r = rng(6);
        let assignments = assign_queries(1, 3, 3, &mut r).unwrap();
        let answers = collect(&profile, &assignments, &noiseless_spec(), &mut r).unwrap();
        assert_eq!(answers.len(), 3);
        let mut pairs: Vec<PairQuery> = answers.iter().map(|a| a.pair).collect();
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.len(), 3);
    }

    #[test]
    fn collected_one_bit_fraction_matches_gaussian_tail() {
        // Unanimous m=2 profile: every answer is about the single pair with
        // true bit 1; the fraction of surviving 1-bits is Phi(0.5/sigma).
        let n = 100_000;
        let spec = PrivacySpec::for_bits(1.0, 1e-4, 1).unwrap();
        let profile = vec![Ranking::new(vec![0, 1]).unwrap(); n];
        let mut r = rng(7);
        let assignments = assign_queries(n, 2, 1, &mut r).unwrap();
        let answers = collect(&profile, &assignments, &spec, &mut r).unwrap();
        let ones = answers.iter().filter(|a| a.bit == 1).count();
        let expected = 1.0 - crate::privacy::flip_probability(crate::privacy::gaussian_sigma(&spec));
        assert!((expected - 0.5458).abs() < 1e-3);
        assert!((ones as f64 / n as f64 - expected).abs() < 0.01);
    }

    #[test]
    fn shuffle_preserves_multisets_and_drops_ids() {
        let profile = vec![
            Ranking::new(vec![0, 1, 2]).unwrap(),
            Ranking::new(vec![2, 1, 0]).unwrap(),
            Ranking::new(vec![1, 0, 2]).unwrap(),
        ];
        let mut r = rng(8);
        let assignments = assign_queries(3, 3, 3, &mut r).unwrap();
        let answers = collect(&profile, &assignments, &noiseless_spec(), &mut r).unwrap();
        let batch = shuffle(&answers, &mut r);

        assert_eq!(batch.len(), answers.len());
        for (pair, bits) in batch.groups() {
            let mut expected: Vec<u8> = answers
                .iter()
                .filter(|a| a.pair == *pair)
                .map(|a| a.bit)
                .collect();
            let mut got = bits.clone();
            expected.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn shuffle_of_single_answer() {
        let answers = vec![NoisyAnswer {
            pair: PairQuery::new(0, 1, 2).unwrap(),
            bit: 1,
            agent_id: Some(0),
        }];
        let mut r = rng(9);
        let batch = shuffle(&answers, &mut r);
        assert_eq!(batch.len(), 1);
        assert_eq!(batch.groups().values().next().unwrap(), &vec![1]);
    }

    #[test]
    fn shuffle_permutations_are_uniform() {
        // Drive the shuffler's permutation primitive with four distinct
        // sentinels; each of the 24 orderings should appear 1/24 +- 0.005
        // of the time.
        let trials = 100_000;
        let mut r = rng(10);
        let mut freq: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for _ in 0..trials {
            let mut items = vec![0u32, 1, 2, 3];
            shuffle_in_place(&mut items, &mut r);
            *freq.entry(items).or_default() += 1;
        }
        assert_eq!(freq.len(), 24);
        for (ordering, count) in freq {
            let f = count as f64 / trials as f64;
            assert!(
                (f - 1.0 / 24.0).abs() < 0.005,
                "ordering {ordering:?} frequency {f}"
            );
        }
    }

    #[test]
    fn tally_batch_counts_bits() {
        let answers = vec![
            NoisyAnswer {
                pair: PairQuery::new(0, 1, 3).unwrap(),
                bit: 1,
                agent_id: Some(0),
            },
            NoisyAnswer {
                pair: PairQuery::new(0, 1, 3).unwrap(),
                bit: 1,
                agent_id: Some(1),
            },
            NoisyAnswer {
                pair: PairQuery::new(0, 1, 3).unwrap(),
                bit: 0,
                agent_id: Some(2),
            },
        ];
        let mut r = rng(11);
        let counts = tally_batch(&shuffle(&answers, &mut r), 3).unwrap();
        assert_eq!(counts.get(0, 1), 2);
        assert_eq!(counts.get(1, 0), 1);
        assert_eq!(counts.total(), 3);
    }

    #[test]
    fn tally_of_empty_batch_is_zero() {
        let mut r = rng(12);
        let counts = tally_batch(&shuffle(&[], &mut r), 3).unwrap();
        assert_eq!(counts.total(), 0);
    }

    #[test]
    fn tally_rejects_out_of_range_pairs() {
        let answers = vec![NoisyAnswer {
            pair: PairQuery::new(0, 4, 5).unwrap(),
            bit: 1,
            agent_id: None,
        }];
        let mut r = rng(13);
        assert!(tally_batch(&shuffle(&answers, &mut r), 3).is_err());
        assert!(tally_answers(&answers, 3).is_err());
    }

    #[test]
    fn answer_dump_has_no_agent_column() {
        let profile = vec![Ranking::new(vec![0, 1]).unwrap(); 3];
        let mut r = rng(14);
        let assignments = assign_queries(3, 2, 1, &mut r).unwrap();
        let answers = collect(&profile, &assignments, &noiseless_spec(), &mut r).unwrap();
        let batch = shuffle(&answers, &mut r);

        let mut out = Vec::new();
        batch.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("pair_i,pair_j,bit"));
        for line in lines {
            assert_eq!(line.split(',').count(), 3);
        }
    }
}
