//! Rankings, pairwise preference extraction, Kendall tau metrics, and the
//! pairwise count matrix consumed by every aggregator.

use crate::error::{Error, Result};

/// A strict total order over `m` alternatives.
///
/// `order[0]` is the most preferred alternative; alternatives are identified
/// by their 0-based index. A position lookup table is kept alongside the
/// order so pairwise comparisons are O(1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<usize>,
    positions: Vec<usize>,
}

impl Ranking {
    /// Build a ranking from a preference order (most preferred first).
    ///
    /// The order must be a permutation of `{0, …, m−1}` with `m ≥ 1`
    /// (singletons occur as aggregation base cases; parsed profiles
    /// require `m ≥ 2`).
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        if m == 0 {
            return Err(Error::invalid("ranking must contain at least one alternative"));
        }
        let mut positions = vec![usize::MAX; m];
        for (pos, &alt) in order.iter().enumerate() {
            if alt >= m {
                return Err(Error::invalid(format!(
                    "alternative index {alt} out of range for m = {m}"
                )));
            }
            if positions[alt] != usize::MAX {
                return Err(Error::invalid(format!("duplicate alternative index {alt}")));
            }
            positions[alt] = pos;
        }
        Ok(Ranking { order, positions })
    }

    /// The identity ranking `[0, 1, …, m−1]`.
    pub fn identity(m: usize) -> Result<Self> {
        Ranking::new((0..m).collect())
    }

    /// Number of alternatives.
    pub fn m(&self) -> usize {
        self.order.len()
    }

    /// Preference order, most preferred first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position (0-based rank) of an alternative; 0 = most preferred.
    pub fn position_of(&self, alt: usize) -> Result<usize> {
        self.positions
            .get(alt)
            .copied()
            .ok_or_else(|| Error::invalid(format!("alternative index {alt} out of range")))
    }

    /// The fully reversed ranking.
    pub fn reversed(&self) -> Ranking {
        let mut order = self.order.clone();
        order.reverse();
        Ranking::new(order).expect("reversal preserves the permutation")
    }

    /// Rank-index vector: `v[i]` is the 0-based position of alternative `i`.
    pub fn to_rank_vector(&self) -> Vec<usize> {
        self.positions.clone()
    }

    /// Inverse of [`Ranking::to_rank_vector`].
    pub fn from_rank_vector(ranks: &[usize]) -> Result<Self> {
        let m = ranks.len();
        let mut order = vec![usize::MAX; m];
        for (alt, &pos) in ranks.iter().enumerate() {
            if pos >= m {
                return Err(Error::invalid(format!("rank {pos} out of range for m = {m}")));
            }
            if order[pos] != usize::MAX {
                return Err(Error::invalid(format!("duplicate rank {pos}")));
            }
            order[pos] = alt;
        }
        Ranking::new(order)
    }
}

impl std::fmt::Display for Ranking {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.order.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Count matrix over ordered pairs: `counts[i][j]` answers assert `a_i ≻ a_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseCounts {
    m: usize,
    counts: Vec<u64>,
}

impl PairwiseCounts {
    /// All-zero matrix for `m` alternatives.
    pub fn zeros(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("count matrix needs at least one alternative"));
        }
        Ok(PairwiseCounts {
            m,
            counts: vec![0; m * m],
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.m && j < self.m, "pair index out of range");
        self.counts[i * self.m + j]
    }

    /// Record `by` additional answers voting `a_i ≻ a_j`.
    pub fn add(&mut self, i: usize, j: usize, by: u64) -> Result<()> {
        if i >= self.m || j >= self.m {
            return Err(Error::invalid(format!(
                "pair ({i},{j}) out of range for m = {}",
                self.m
            )));
        }
        if i == j {
            return Err(Error::invalid("diagonal entries must stay zero"));
        }
        self.counts[i * self.m + j] += by;
        Ok(())
    }

    /// Total number of binary answers ingested.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Number of unordered pairs among `m` alternatives, `C(m,2)`.
pub fn pair_count(m: usize) -> usize {
    m * (m - 1) / 2
}

/// 1 iff `i` precedes `j` in `r`, else 0.
pub fn pairwise_bit(r: &Ranking, i: usize, j: usize) -> Result<u8> {
    if i == j {
        return Err(Error::invalid("pairwise bit needs two distinct alternatives"));
    }
    let pi = r.position_of(i)?;
    let pj = r.position_of(j)?;
    Ok(u8::from(pi < pj))
}

/// Number of unordered pairs ordered differently in `a` and `b`.
pub fn kendall_raw(a: &Ranking, b: &Ranking) -> Result<u64> {
    if a.m() != b.m() {
        return Err(Error::invalid(format!(
            "rankings compare {} vs {} alternatives",
            a.m(),
            b.m()
        )));
    }
    let m = a.m();
    let mut discordant = 0;
    for i in 0..m {
        for j in (i + 1)..m {
            let in_a = a.positions[i] < a.positions[j];
            let in_b = b.positions[i] < b.positions[j];
            if in_a != in_b {
                discordant += 1;
            }
        }
    }
    Ok(discordant)
}

/// Kendall tau distance normalized by `C(m,2)`; 0 iff equal, 1 iff reversed.
pub fn kendall_normalized(a: &Ranking, b: &Ranking) -> Result<f64> {
    let raw = kendall_raw(a, b)?;
    let pairs = pair_count(a.m());
    if pairs == 0 {
        return Ok(0.0);
    }
    Ok(raw as f64 / pairs as f64)
}

/// Mean normalized Kendall distance from `r` to every ranking in `profile`.
pub fn average_kendall(r: &Ranking, profile: &[Ranking]) -> Result<f64> {
    if profile.is_empty() {
        return Err(Error::invalid("profile must contain at least one ranking"));
    }
    let mut sum = 0.0;
    for p in profile {
        sum += kendall_normalized(r, p)?;
    }
    Ok(sum / profile.len() as f64)
}

/// Full-information pairwise tally of a profile:
/// `counts[i][j]` = number of agents preferring `a_i` over `a_j`.
pub fn tally(profile: &[Ranking]) -> Result<PairwiseCounts> {
    let first = profile
        .first()
        .ok_or_else(|| Error::invalid("profile must contain at least one ranking"))?;
    let m = first.m();
    let mut counts = PairwiseCounts::zeros(m)?;
    for (u, p) in profile.iter().enumerate() {
        if p.m() != m {
            return Err(Error::invalid(format!(
                "ranking for agent {u} has {} alternatives, expected {m}",
                p.m()
            )));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if p.positions[i] < p.positions[j] {
                    counts.add(i, j, 1)?;
                } else {
                    counts.add(j, i, 1)?;
                }
            }
        }
    }
    Ok(counts)
}

/// Borda scores on pairwise counts: `score[i] = Σ_j counts[i][j]` (total wins).
pub fn borda_scores(counts: &PairwiseCounts) -> Vec<u64> {
    let m = counts.m();
    (0..m)
        .map(|i| (0..m).filter(|&j| j != i).map(|j| counts.get(i, j)).sum())
        .collect()
}
