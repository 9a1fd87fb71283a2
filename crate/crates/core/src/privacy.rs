//! Gaussian-mechanism noise sizing, the single-bit randomizer, and
//! shuffle-model amplification accounting.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::ranking::pair_count;

/// Everything needed to size the per-answer Gaussian noise and account for
/// shuffle amplification.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacySpec {
    /// Privacy budget ε > 0 (local unless stated otherwise).
    pub epsilon: f64,
    /// Failure probability δ ∈ (0,1).
    pub delta: f64,
    /// Number of pairwise answers K per agent; the budget is split ε/K.
    pub k_queries: usize,
    /// Global sensitivity of one answer (1 for a single pairwise bit).
    pub sensitivity: f64,
}

impl PrivacySpec {
    pub fn new(epsilon: f64, delta: f64, k_queries: usize, sensitivity: f64) -> Result<Self> {
        let spec = PrivacySpec {
            epsilon,
            delta,
            k_queries,
            sensitivity,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Spec for a single pairwise bit (sensitivity 1).
    pub fn for_bits(epsilon: f64, delta: f64, k_queries: usize) -> Result<Self> {
        PrivacySpec::new(epsilon, delta, k_queries, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::invalid("epsilon must be positive"));
        }
        if !self.delta.is_finite() || self.delta <= 0.0 || self.delta >= 1.0 {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if self.k_queries < 1 {
            return Err(Error::invalid("k_queries must be at least 1"));
        }
        if !self.sensitivity.is_finite() || self.sensitivity <= 0.0 {
            return Err(Error::invalid("sensitivity must be positive"));
        }
        Ok(())
    }
}

/// Why the central (shuffled) bound is not reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InapplicableReason {
    /// The amplification bound is only stated for K = 1.
    KNotOne,
    /// n′ = n / C(m,2) ≤ 1: too few messages per pair to amplify.
    NPrimeTooSmall,
    /// ε ≤ ln n′ would produce a non-positive central budget.
    EpsilonTooSmall,
}

impl std::fmt::Display for InapplicableReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InapplicableReason::KNotOne => write!(f, "k-not-one"),
            InapplicableReason::NPrimeTooSmall => write!(f, "n-prime-too-small"),
            InapplicableReason::EpsilonTooSmall => write!(f, "epsilon-too-small"),
        }
    }
}

/// Noise scale plus local and (when applicable) central budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyReport {
    /// Per-answer Gaussian noise scale.
    pub sigma: f64,
    pub epsilon_local: f64,
    /// Central budget ε − ln n′ after shuffling; present only when the
    /// amplification bound applies.
    pub epsilon_central: Option<f64>,
    /// Expected messages per pair after shuffling, n / C(m,2).
    pub n_prime: f64,
    pub applicable: bool,
    pub reason: Option<InapplicableReason>,
}

/// Per-answer noise scale `σ = K · Δf · sqrt(2 ln(1.25/δ)) / ε`.
///
/// The K factor implements the per-round budget split ε/K.
pub fn gaussian_sigma(spec: &PrivacySpec) -> f64 {
    let PrivacySpec {
        epsilon,
        delta,
        k_queries,
        sensitivity,
    } = *spec;
    k_queries as f64 * sensitivity * (2.0 * (1.25 / delta).ln()).sqrt() / epsilon
}

/// Perturb a single pairwise bit: add `N(0, σ²)` and threshold at 0.5
/// (strictly greater maps to 1). Output stays in {0, 1}.
pub fn randomize_bit(bit: u8, sigma: f64, rng: &mut impl Rng) -> u8 {
    debug_assert!(bit <= 1);
    debug_assert!(sigma > 0.0);
    let noise: f64 = rng.sample(StandardNormal);
    u8::from(bit as f64 + sigma * noise > 0.5)
}

/// Probability that [`randomize_bit`] flips its input: `1 − Φ(0.5/σ)`,
/// identical for both input bits by symmetry.
pub fn flip_probability(sigma: f64) -> f64 {
    let standard = Normal::new(0.0, 1.0).expect("unit normal");
    1.0 - standard.cdf(0.5 / sigma)
}

/// Account for shuffle amplification: with K = 1 and n′ = n/C(m,2) > 1, a
/// local budget ε yields a central budget ε − ln n′ (reported only when
/// positive).
pub fn amplification_report(spec: &PrivacySpec, n: usize, m: usize) -> Result<PrivacyReport> {
    spec.validate()?;
    if n < 1 {
        return Err(Error::invalid("agent count must be at least 1"));
    }
    if m < 2 {
        return Err(Error::invalid("need at least two alternatives"));
    }

    let n_prime = n as f64 / pair_count(m) as f64;
    let sigma = gaussian_sigma(spec);
    let epsilon_local = spec.epsilon;

    let reason = if spec.k_queries != 1 {
        Some(InapplicableReason::KNotOne)
    } else if n_prime <= 1.0 {
        Some(InapplicableReason::NPrimeTooSmall)
    } else if epsilon_local <= n_prime.ln() {
        Some(InapplicableReason::EpsilonTooSmall)
    } else {
        None
    };

    Ok(PrivacyReport {
        sigma,
        epsilon_local,
        epsilon_central: reason.is_none().then(|| epsilon_local - n_prime.ln()),
        n_prime,
        applicable: reason.is_none(),
        reason,
    })
}

/// Invert the amplification bound: the local budget whose shuffled central
/// guarantee equals `target_central` (K = 1, sensitivity 1). When n′ ≤ 1 no
/// amplification is available and the local budget equals the target.
pub fn local_epsilon_for_central(
    target_central: f64,
    delta: f64,
    n: usize,
    m: usize,
) -> Result<PrivacySpec> {
    if !target_central.is_finite() || target_central <= 0.0 {
        return Err(Error::invalid("central epsilon target must be positive"));
    }
    if m < 2 {
        return Err(Error::invalid("need at least two alternatives"));
    }
    let n_prime = n as f64 / pair_count(m) as f64;
    let epsilon = if n_prime > 1.0 {
        target_central + n_prime.ln()
    } else {
        target_central
    };
    PrivacySpec::for_bits(epsilon, delta, 1)
}
