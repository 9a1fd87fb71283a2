//! Hierarchical rank aggregation on pairwise counts: the level-score
//! recursion with a net-win fallback (the private pipeline's final stage),
//! the same recursion with the classic Borda fallback, a plain Borda ranking,
//! and the exhaustive Kemeny oracle.

use crate::error::{Error, Result};
use crate::ranking::{borda_scores, pair_count, PairwiseCounts, Ranking};

/// Exhaustive Kemeny search refuses to enumerate beyond this many
/// alternatives (8! = 40320 candidate orders).
pub const KEMENY_MAX_M: usize = 8;

/// Comparison scores over a subset of alternatives:
/// `M(i,j) = counts[i][j] / (counts[i][j] + counts[j][i])`, with the neutral
/// value 0.5 when a pair has no data. Rows and columns are indexed by
/// position in `members`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceMatrix {
    members: Vec<usize>,
    entries: Vec<f64>,
}

impl PreferenceMatrix {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Entry for the pair at member positions `(a, b)`.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.members.len() + b]
    }
}

/// Thresholded preference relation with entries in {0, 0.5, 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationMatrix {
    members: Vec<usize>,
    entries: Vec<f64>,
}

impl RelationMatrix {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.members.len() + b]
    }

    /// Level score of the member at position `a`: its row sum (win count,
    /// counting equalities as half wins).
    pub fn level_score(&self, a: usize) -> f64 {
        let k = self.members.len();
        (0..k).filter(|&b| b != a).map(|b| self.get(a, b)).sum()
    }
}

/// An ordered partition of alternatives; earlier groups are more preferred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAssignment {
    groups: Vec<Vec<usize>>,
}

impl LevelAssignment {
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}

fn checked_subset(counts: &PairwiseCounts, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.len() < 2 {
        return Err(Error::invalid("subset must contain at least two alternatives"));
    }
    let mut members = subset.to_vec();
    members.sort_unstable();
    for pair in members.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::invalid(format!("duplicate alternative {}", pair[0])));
        }
    }
    if let Some(&last) = members.last() {
        if last >= counts.m() {
            return Err(Error::invalid(format!(
                "alternative {last} out of range for m = {}",
                counts.m()
            )));
        }
    }
    Ok(members)
}

/// Comparison-score matrix restricted to `subset` (sorted ascending).
pub fn pcm_from_counts(counts: &PairwiseCounts, subset: &[usize]) -> Result<PreferenceMatrix> {
    let members = checked_subset(counts, subset)?;
    let k = members.len();
    let mut entries = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let wins = counts.get(members[a], members[b]);
            let losses = counts.get(members[b], members[a]);
            let total = wins + losses;
            entries[a * k + b] = if total == 0 {
                0.5
            } else {
                wins as f64 / total as f64
            };
        }
    }
    Ok(PreferenceMatrix { members, entries })
}

/// Threshold a comparison-score matrix at 0.5 into a {0, 0.5, 1} relation.
pub fn ppr_from_pcm(pcm: &PreferenceMatrix) -> RelationMatrix {
    let k = pcm.members.len();
    let mut entries = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let score = pcm.get(a, b);
            entries[a * k + b] = if score > 0.5 {
                1.0
            } else if score < 0.5 {
                0.0
            } else {
                0.5
            };
        }
    }
    RelationMatrix {
        members: pcm.members.clone(),
        entries,
    }
}

/// Net-win scores over `subset`: `s(j) = Σ_i (counts[j][i] − counts[i][j])`,
/// summing over the other subset members. The scores always sum to zero.
pub fn net_win_scores(counts: &PairwiseCounts, subset: &[usize]) -> Result<Vec<i64>> {
    let members = checked_subset(counts, subset)?;
    Ok(members
        .iter()
        .map(|&j| {
            members
                .iter()
                .filter(|&&i| i != j)
                .map(|&i| counts.get(j, i) as i64 - counts.get(i, j) as i64)
                .sum()
        })
        .collect())
}

/// Group `subset` into levels of strictly decreasing level score.
pub fn level_assignment(counts: &PairwiseCounts, subset: &[usize]) -> Result<LevelAssignment> {
    let pcm = pcm_from_counts(counts, subset)?;
    let ppr = ppr_from_pcm(&pcm);
    Ok(levels_from_relation(&ppr))
}

fn levels_from_relation(ppr: &RelationMatrix) -> LevelAssignment {
    let k = ppr.members.len();
    let mut scored: Vec<(f64, usize)> = (0..k)
        .map(|a| (ppr.level_score(a), ppr.members[a]))
        .collect();
    // Sort by descending score; ascending index within a level keeps the
    // grouping deterministic.
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current_score = f64::NAN;
    for (score, alt) in scored {
        // Level scores are half-integers, so exact equality is the intended
        // grouping relation.
        if groups.is_empty() || score != current_score {
            groups.push(vec![alt]);
            current_score = score;
        } else {
            groups.last_mut().unwrap().push(alt);
        }
    }
    LevelAssignment { groups }
}

/// Which scoring rule breaks an all-tied level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TieRule {
    /// Net wins on raw counts; needs no extra budget beyond the counts.
    NetWin,
    /// Total pairwise wins (Borda on counts).
    Borda,
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct AggregationTrace {
    /// A tied level was split by the net-win / Borda rule somewhere.
    pub value_fallback_used: bool,
    /// A fully tied level fell through to ascending-index order somewhere.
    pub index_fallback_used: bool,
}

fn subset_borda(counts: &PairwiseCounts, members: &[usize]) -> Vec<i64> {
    members
        .iter()
        .map(|&j| {
            members
                .iter()
                .filter(|&&i| i != j)
                .map(|&i| counts.get(j, i) as i64)
                .sum()
        })
        .collect()
}

fn rank_subset(
    counts: &PairwiseCounts,
    subset: &[usize],
    rule: TieRule,
    trace: &mut AggregationTrace,
) -> Vec<usize> {
    if subset.len() <= 1 {
        return subset.to_vec();
    }

    let pcm = pcm_from_counts(counts, subset).expect("subset validated by caller");
    let ppr = ppr_from_pcm(&pcm);
    let levels = levels_from_relation(&ppr);

    if levels.groups.len() > 1 {
        let mut out = Vec::with_capacity(subset.len());
        for level in levels.groups() {
            out.extend(rank_subset(counts, level, rule, trace));
        }
        return out;
    }

    // Every level score ties: split by the fallback scores. The maximizers
    // form a higher sublevel; everyone else recurses below them.
    let scores = match rule {
        TieRule::NetWin => net_win_scores(counts, subset).expect("subset validated by caller"),
        TieRule::Borda => subset_borda(counts, subset),
    };
    let best = *scores.iter().max().expect("subset is non-empty");
    let mut winners = Vec::new();
    let mut rest = Vec::new();
    for (&alt, &score) in subset.iter().zip(&scores) {
        if score == best {
            winners.push(alt);
        } else {
            rest.push(alt);
        }
    }

    if rest.is_empty() {
        // Fallback scores tie across the whole set as well: deterministic
        // final order by ascending alternative index.
        trace.index_fallback_used = true;
        let mut out = subset.to_vec();
        out.sort_unstable();
        return out;
    }

    trace.value_fallback_used = true;
    let mut out = rank_subset(counts, &winners, rule, trace);
    out.extend(rank_subset(counts, &rest, rule, trace));
    out
}

fn aggregate_with(counts: &PairwiseCounts, rule: TieRule) -> (Ranking, AggregationTrace) {
    let subset: Vec<usize> = (0..counts.m()).collect();
    let mut trace = AggregationTrace::default();
    let order = rank_subset(counts, &subset, rule, &mut trace);
    let ranking = Ranking::new(order).expect("recursion emits each alternative exactly once");
    (ranking, trace)
}

/// Hierarchical aggregation with the net-win tie rule: build comparison
/// scores and the thresholded relation per subset, partition by level score,
/// recurse into each level, and split fully tied levels by net wins
/// (promoting the maximizers), falling back to ascending index when even
/// those tie.
pub fn ra_aggregate(counts: &PairwiseCounts) -> Ranking {
    aggregate_with(counts, TieRule::NetWin).0
}

/// The same recursion with the classic Borda-count tie rule.
pub fn hra_aggregate(counts: &PairwiseCounts) -> Ranking {
    aggregate_with(counts, TieRule::Borda).0
}

#[cfg(test)]
pub(crate) fn ra_aggregate_traced(counts: &PairwiseCounts) -> (Ranking, AggregationTrace) {
    aggregate_with(counts, TieRule::NetWin)
}

#[cfg(test)]
pub(crate) fn hra_aggregate_traced(counts: &PairwiseCounts) -> (Ranking, AggregationTrace) {
    aggregate_with(counts, TieRule::Borda)
}

/// Rank alternatives by descending Borda score (total pairwise wins), ties
/// by ascending index.
pub fn borda_aggregate(counts: &PairwiseCounts) -> Ranking {
    let scores = borda_scores(counts);
    let mut order: Vec<usize> = (0..counts.m()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    Ranking::new(order).expect("sorted indices form a permutation")
}

/// Exhaustively find the ranking minimizing the mean normalized Kendall
/// distance to the profile. Ties break to the lexicographically smallest
/// order. Guarded to `m ≤ 8`.
pub fn kemeny_optimal(profile: &[Ranking]) -> Result<(Ranking, f64)> {
    let first = profile
        .first()
        .ok_or_else(|| Error::invalid("profile must contain at least one ranking"))?;
    let m = first.m();
    if m > KEMENY_MAX_M {
        return Err(Error::UnsupportedSize {
            m,
            max: KEMENY_MAX_M,
        });
    }
    let counts = crate::ranking::tally(profile)?;
    let n = profile.len() as u64;

    // Summed raw distance of order R to the profile: every pair R orders as
    // i over j contributes one discordant pair per agent voting j over i.
    let discord = |order: &[usize]| -> u64 {
        let mut total = 0;
        for a in 0..m {
            for b in (a + 1)..m {
                total += counts.get(order[b], order[a]);
            }
        }
        total
    };

    let mut best_order: Option<Vec<usize>> = None;
    let mut best_discord = u64::MAX;
    let mut current: Vec<usize> = (0..m).collect();
    // Lexicographic enumeration; keeping strict improvement only makes the
    // first minimizer in lexicographic order win ties.
    loop {
        let d = discord(&current);
        if d < best_discord {
            best_discord = d;
            best_order = Some(current.clone());
        }
        if !next_permutation(&mut current) {
            break;
        }
    }

    let order = best_order.expect("at least one permutation exists");
    let pairs = pair_count(m) as u64;
    let value = if pairs == 0 {
        0.0
    } else {
        best_discord as f64 / (n * pairs) as f64
    };
    Ok((Ranking::new(order)?, value))
}

fn next_permutation(items: &mut [usize]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let mut i = items.len() - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = items.len() - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}
