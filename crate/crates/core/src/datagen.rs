//! Synthetic profile generation from the Mallows model and profile CSV I/O.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ranking::Ranking;

/// Parameters for sampling a profile from the Mallows model
/// `P(r) ∝ exp(−θ · d(r, reference))` with unnormalized Kendall distance `d`.
#[derive(Debug, Clone)]
pub struct MallowsConfig {
    pub m: usize,
    pub n: usize,
    /// Dispersion θ ≥ 0; larger θ concentrates samples on the reference.
    pub theta: f64,
    pub reference: Ranking,
    pub seed: u64,
}

impl MallowsConfig {
    /// Config with the identity reference `[0, 1, …, m−1]`.
    pub fn new(m: usize, n: usize, theta: f64, seed: u64) -> Result<Self> {
        let cfg = MallowsConfig {
            m,
            n,
            theta,
            reference: Ranking::identity(m)?,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("agent count must be at least 1"));
        }
        if !self.theta.is_finite() || self.theta < 0.0 {
            return Err(Error::invalid("theta must be a non-negative real"));
        }
        if self.reference.m() != self.m {
            return Err(Error::invalid(format!(
                "reference ranking has {} alternatives, expected {}",
                self.reference.m(),
                self.m
            )));
        }
        Ok(())
    }
}

/// Draw `n` independent Mallows samples via the repeated insertion model.
///
/// Item `i` (1-based; item 1 is placed first) inserts at position
/// `j ∈ {1..i}` from the top with probability
/// `exp(−θ(i−j)) / Σ_{k=1..i} exp(−θ(i−k))`, which yields exact samples
/// from `P(r) ∝ exp(−θ · kendall_raw(r, reference))`.
pub fn sample_mallows(cfg: &MallowsConfig) -> Result<Vec<Ranking>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reference = cfg.reference.order();
    let decay = (-cfg.theta).exp();

    let mut profile = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let mut order: Vec<usize> = Vec::with_capacity(cfg.m);
        order.push(reference[0]);
        for i in 2..=cfg.m {
            // Weights for positions j = 1..=i, top first: decay^(i−j).
            let mut weights = Vec::with_capacity(i);
            let mut total = 0.0;
            for j in 1..=i {
                let w = decay.powi((i - j) as i32);
                weights.push(w);
                total += w;
            }
            let mut draw = rng.random::<f64>() * total;
            let mut position = i - 1;
            for (idx, w) in weights.iter().enumerate() {
                draw -= w;
                if draw < 0.0 {
                    position = idx;
                    break;
                }
            }
            order.insert(position, reference[i - 1]);
        }
        profile.push(Ranking::new(order)?);
    }
    Ok(profile)
}

/// Read a profile from the CSV format `agent,r1,…,rm` (0-based alternative
/// indices, most preferred first). Parse failures name the 1-based line.
pub fn load_profile(path: impl AsRef<Path>) -> Result<Vec<Ranking>> {
    let file = File::open(path.as_ref())?;
    parse_profile(BufReader::new(file))
}

/// Parser behind [`load_profile`], usable on any reader.
pub fn parse_profile(reader: impl BufRead) -> Result<Vec<Ranking>> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty file, expected header `agent,r1,...,rm`".into(),
        })
        .and_then(|(i, l)| Ok((i, l?)))?;
    let header_fields: Vec<&str> = header.trim_end().split(',').collect();
    if header_fields.first() != Some(&"agent") || header_fields.len() < 3 {
        return Err(Error::Parse {
            line: 1,
            message: "header must be `agent,r1,...,rm` with m >= 2".into(),
        });
    }
    let m = header_fields.len() - 1;

    let mut profile = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != m + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, found {}", m + 1, fields.len()),
            });
        }
        let mut order = Vec::with_capacity(m);
        for field in &fields[1..] {
            let alt: usize = field.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{field}` is not an alternative index"),
            })?;
            order.push(alt);
        }
        let ranking = Ranking::new(order).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        profile.push(ranking);
    }

    if profile.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok(profile)
}

/// Write a profile in the CSV format read by [`load_profile`];
/// save → load round-trips to an identical profile.
pub fn save_profile(profile: &[Ranking], path: impl AsRef<Path>) -> Result<()> {
    let first = profile
        .first()
        .ok_or_else(|| Error::invalid("cannot save an empty profile"))?;
    let m = first.m();
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);

    let header: Vec<String> = std::iter::once("agent".to_string())
        .chain((1..=m).map(|i| format!("r{i}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;

    for (agent, ranking) in profile.iter().enumerate() {
        if ranking.m() != m {
            return Err(Error::invalid(format!(
                "ranking for agent {agent} has {} alternatives, expected {m}",
                ranking.m()
            )));
        }
        writeln!(w, "{agent},{ranking}")?;
    }
    w.flush()?;
    Ok(())
}
