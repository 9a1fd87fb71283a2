//! Configuration-driven experiment runner with deterministic CSV output.
//!
//! A sweep is a list of cells; each cell fixes a method, a data source, and
//! privacy parameters, runs a number of repetitions, and reports the mean
//! normalized Kendall distance of the method's output to the input profile.
//! Repetition `i` draws all of its randomness from a seed derived from
//! `(master_seed, i)`, so results are independent of execution order and
//! thread count; the dataset itself is derived from stream 0 and therefore
//! shared by every cell with the same master seed.

use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::aggregation::{hra_aggregate, kemeny_optimal, ra_aggregate};
use crate::baselines::{ldp_kwiksort, ldp_quicksort};
use crate::datagen::{load_profile, sample_mallows, MallowsConfig};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::privacy::{local_epsilon_for_central, PrivacySpec};
use crate::protocol::{assign_queries, collect, shuffle, tally_answers, tally_batch, ShuffledBatch};
use crate::ranking::{average_kendall, pair_count, tally, Ranking};

/// The aggregation method a cell runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DdpHelnaksort,
    DdpHelnaksortNoShuffle,
    LdpKwiksort,
    LdpQuicksort,
    Hra,
    Kemeny,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ddp-helnaksort" => Ok(Method::DdpHelnaksort),
            "ddp-helnaksort-noshuffle" => Ok(Method::DdpHelnaksortNoShuffle),
            "ldp-kwiksort" => Ok(Method::LdpKwiksort),
            "ldp-quicksort" => Ok(Method::LdpQuicksort),
            "hra" => Ok(Method::Hra),
            "kemeny" => Ok(Method::Kemeny),
            other => Err(Error::config(
                "method",
                format!(
                    "unknown method `{other}` (expected ddp-helnaksort, \
                     ddp-helnaksort-noshuffle, ldp-kwiksort, ldp-quicksort, hra, kemeny)"
                ),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::DdpHelnaksort => "ddp-helnaksort",
            Method::DdpHelnaksortNoShuffle => "ddp-helnaksort-noshuffle",
            Method::LdpKwiksort => "ldp-kwiksort",
            Method::LdpQuicksort => "ldp-quicksort",
            Method::Hra => "hra",
            Method::Kemeny => "kemeny",
        }
    }

    pub fn uses_shuffle(&self) -> bool {
        matches!(self, Method::DdpHelnaksort)
    }

    pub fn is_private(&self) -> bool {
        !matches!(self, Method::Hra | Method::Kemeny)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a cell's profile comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Mallows { m: usize, n: usize, theta: f64 },
    ProfileFile(PathBuf),
}

/// One sweep cell.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Section name from the config file, used in error reports.
    pub label: String,
    pub method: Method,
    pub data: DataSource,
    /// Privacy budget; interpreted as the central (post-shuffle) budget for
    /// the shuffle-enabled method and as the local budget otherwise, unless
    /// `epsilon_is_central` overrides the default.
    pub epsilon: f64,
    pub epsilon_is_central: Option<bool>,
    pub delta: f64,
    pub k_queries: usize,
    pub repetitions: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(method: Method, data: DataSource) -> Self {
        ExperimentConfig {
            label: method.name().to_string(),
            method,
            data,
            epsilon: 1.0,
            epsilon_is_central: None,
            delta: 1e-4,
            k_queries: 1,
            repetitions: 300,
            master_seed: 42,
        }
    }

    /// Whether `epsilon` is interpreted as a central budget.
    pub fn epsilon_central(&self) -> bool {
        self.epsilon_is_central
            .unwrap_or_else(|| self.method.uses_shuffle())
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::config("reps", "must be at least 1"));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::config("epsilon", "must be positive"));
        }
        if !self.delta.is_finite() || self.delta <= 0.0 || self.delta >= 1.0 {
            return Err(Error::config("delta", "must lie in (0, 1)"));
        }
        if self.k_queries < 1 {
            return Err(Error::config("k", "must be at least 1"));
        }
        match &self.data {
            DataSource::Mallows { m, n, theta } => {
                if *m < 2 {
                    return Err(Error::config("m", "need at least two alternatives"));
                }
                if *n < 1 {
                    return Err(Error::config("n", "need at least one agent"));
                }
                if !theta.is_finite() || *theta < 0.0 {
                    return Err(Error::config("theta", "must be non-negative"));
                }
                if self.method.is_private() && self.k_queries > pair_count(*m) {
                    return Err(Error::config(
                        "k",
                        format!("exceeds the {} available pairs", pair_count(*m)),
                    ));
                }
            }
            DataSource::ProfileFile(_) => {}
        }
        Ok(())
    }

    fn data_seed(&self) -> u64 {
        derive_seed(self.master_seed, 0)
    }

    fn rep_seed(&self, rep_index: usize) -> u64 {
        derive_seed(self.master_seed, 1 + rep_index as u64)
    }

    /// Load or generate the cell's profile (identical for every repetition).
    pub fn prepare_profile(&self) -> Result<Vec<Ranking>> {
        match &self.data {
            DataSource::Mallows { m, n, theta } => {
                let cfg = MallowsConfig::new(*m, *n, *theta, self.data_seed())?;
                sample_mallows(&cfg)
            }
            DataSource::ProfileFile(path) => load_profile(path),
        }
    }
}

/// Aggregated outcome of one cell.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Alternatives and agents actually used (resolved from the file for
    /// file-backed cells).
    pub m: usize,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    /// 95% confidence half-width, `1.96 · std / √reps`.
    pub ci95: f64,
    pub seconds: f64,
    pub distances: Vec<f64>,
}

fn resolve_privacy(cfg: &ExperimentConfig, n: usize, m: usize) -> Result<PrivacySpec> {
    let epsilon_local = if cfg.epsilon_central() {
        // The inversion is the K=1 amplification bound; it is applied to the
        // budget as a whole even when K > 1 splits it per answer.
        local_epsilon_for_central(cfg.epsilon, cfg.delta, n, m)?.epsilon
    } else {
        cfg.epsilon
    };
    PrivacySpec::for_bits(epsilon_local, cfg.delta, cfg.k_queries)
}

fn run_rep(cfg: &ExperimentConfig, profile: &[Ranking], rep_index: usize) -> Result<f64> {
    let m = profile[0].m();
    let n = profile.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rep_seed(rep_index));

    let output = match cfg.method {
        Method::Hra => hra_aggregate(&tally(profile)?),
        Method::Kemeny => kemeny_optimal(profile)?.0,
        Method::DdpHelnaksort | Method::DdpHelnaksortNoShuffle => {
            let spec = resolve_privacy(cfg, n, m)?;
            let assignments = assign_queries(n, m, cfg.k_queries, &mut rng)?;
            let answers = collect(profile, &assignments, &spec, &mut rng)?;
            let counts = if cfg.method.uses_shuffle() {
                tally_batch(&shuffle(&answers, &mut rng), m)?
            } else {
                tally_answers(&answers, m)?
            };
            ra_aggregate(&counts)
        }
        Method::LdpKwiksort => {
            let spec = resolve_privacy(cfg, n, m)?;
            ldp_kwiksort(profile, &spec, &mut rng)?
        }
        Method::LdpQuicksort => {
            let spec = resolve_privacy(cfg, n, m)?;
            ldp_quicksort(profile, &spec, &mut rng)?
        }
    };
    average_kendall(&output, profile)
}

/// Run a single repetition and return the normalized average Kendall
/// distance of the method's output to the profile.
pub fn run_once(cfg: &ExperimentConfig, rep_index: usize) -> Result<f64> {
    cfg.validate()?;
    let profile = cfg.prepare_profile()?;
    run_rep(cfg, &profile, rep_index)
}

/// The post-shuffle batch a shuffle-enabled repetition would tally; useful
/// for dumping the curator's view.
pub fn shuffled_batch(cfg: &ExperimentConfig, rep_index: usize) -> Result<ShuffledBatch> {
    cfg.validate()?;
    if !cfg.method.uses_shuffle() {
        return Err(Error::invalid(format!(
            "method {} has no shuffle stage",
            cfg.method
        )));
    }
    let profile = cfg.prepare_profile()?;
    let m = profile[0].m();
    let n = profile.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rep_seed(rep_index));
    let spec = resolve_privacy(cfg, n, m)?;
    let assignments = assign_queries(n, m, cfg.k_queries, &mut rng)?;
    let answers = collect(&profile, &assignments, &spec, &mut rng)?;
    Ok(shuffle(&answers, &mut rng))
}

/// Run every repetition of one cell (repetitions execute in parallel; the
/// outcome is independent of thread count).
pub fn run_config(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let profile = cfg.prepare_profile()?;
    let start = Instant::now();
    let distances = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| run_rep(cfg, &profile, rep))
        .collect::<Result<Vec<f64>>>()?;
    let seconds = start.elapsed().as_secs_f64();

    let reps = distances.len() as f64;
    let mean = distances.iter().sum::<f64>() / reps;
    let variance = if distances.len() > 1 {
        distances.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (reps - 1.0)
    } else {
        0.0
    };
    let std = variance.sqrt();
    let ci95 = 1.96 * std / reps.sqrt();

    Ok(ExperimentResult {
        m: profile[0].m(),
        n: profile.len(),
        config: cfg.clone(),
        mean,
        std,
        ci95,
        seconds,
        distances,
    })
}

/// Run a list of cells in order. A failing cell yields its error in place;
/// the sweep continues.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Vec<Result<ExperimentResult>> {
    configs.iter().map(run_config).collect()
}

pub const RESULT_CSV_HEADER: &str =
    "method,m,n,theta,epsilon,epsilon_scope,delta,k,shuffle,reps,mean_dist,std_dist,ci95,seconds";

fn result_row(result: &ExperimentResult, include_timings: bool) -> String {
    let cfg = &result.config;
    let theta = match &cfg.data {
        DataSource::Mallows { theta, .. } => theta.to_string(),
        DataSource::ProfileFile(_) => String::new(),
    };
    let scope = if cfg.epsilon_central() { "central" } else { "local" };
    let seconds = if include_timings { result.seconds } else { 0.0 };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.3}",
        cfg.method,
        result.m,
        result.n,
        theta,
        cfg.epsilon,
        scope,
        cfg.delta,
        cfg.k_queries,
        cfg.method.uses_shuffle(),
        cfg.repetitions,
        result.mean,
        result.std,
        result.ci95,
        seconds
    )
}

/// Render results as the fixed-column CSV. Timings are zeroed unless
/// requested so identical configs and seeds produce byte-identical output.
pub fn results_to_csv(results: &[ExperimentResult], include_timings: bool) -> String {
    let mut out = String::from(RESULT_CSV_HEADER);
    out.push('\n');
    for result in results {
        out.push_str(&result_row(result, include_timings));
        out.push('\n');
    }
    out
}

/// Which config field supplies the x coordinate of plot-ready output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotAxis {
    K,
    Epsilon,
    N,
    M,
    Theta,
}

impl PlotAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(PlotAxis::K),
            "epsilon" => Ok(PlotAxis::Epsilon),
            "n" => Ok(PlotAxis::N),
            "m" => Ok(PlotAxis::M),
            "theta" => Ok(PlotAxis::Theta),
            other => Err(Error::config(
                "plot-x",
                format!("unknown axis `{other}` (expected k, epsilon, n, m, theta)"),
            )),
        }
    }
}

/// Long-format plot data: one `x,series,y,ci` row per result, with the
/// method as the series.
pub fn results_to_plot_csv(results: &[ExperimentResult], axis: PlotAxis) -> String {
    let mut out = String::from("x,series,y,ci\n");
    for result in results {
        let cfg = &result.config;
        let x = match axis {
            PlotAxis::K => cfg.k_queries.to_string(),
            PlotAxis::Epsilon => cfg.epsilon.to_string(),
            PlotAxis::N => result.n.to_string(),
            PlotAxis::M => result.m.to_string(),
            PlotAxis::Theta => match &cfg.data {
                DataSource::Mallows { theta, .. } => theta.to_string(),
                DataSource::ProfileFile(_) => String::new(),
            },
        };
        out.push_str(&format!(
            "{},{},{:.6},{:.6}\n",
            x, cfg.method, result.mean, result.ci95
        ));
    }
    out
}

/// Parse the flat key/value sweep format: `[name]` opens a cell, `key = value`
/// lines fill it, `#` starts a comment. Recognized keys: `method`, `m`, `n`,
/// `theta`, `profile`, `epsilon`, `epsilon_scope` (central|local), `delta`,
/// `k`, `reps`, `seed`.
pub fn parse_sweep_config(text: &str, default_seed: u64) -> Result<Vec<ExperimentConfig>> {
    struct Cell {
        label: String,
        line: usize,
        keys: Vec<(String, String, usize)>,
    }

    let mut cells: Vec<Cell> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Parse {
                line: line_no,
                message: "unterminated section header".into(),
            })?;
            cells.push(Cell {
                label: name.trim().to_string(),
                line: line_no,
                keys: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let cell = cells.last_mut().ok_or_else(|| Error::Parse {
            line: line_no,
            message: "key/value line before any [section] header".into(),
        })?;
        cell.keys
            .push((key.trim().to_string(), value.trim().to_string(), line_no));
    }

    let mut configs = Vec::new();
    for cell in cells {
        configs.push(build_cell(cell.label, cell.line, cell.keys, default_seed)?);
    }
    Ok(configs)
}

fn build_cell(
    label: String,
    section_line: usize,
    keys: Vec<(String, String, usize)>,
    default_seed: u64,
) -> Result<ExperimentConfig> {
    fn parse_as<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
        value.parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid value `{value}` for `{key}`"),
        })
    }

    let mut method = None;
    let mut m = None;
    let mut n = None;
    let mut theta = None;
    let mut profile = None;
    let mut epsilon = None;
    let mut epsilon_scope = None;
    let mut delta = None;
    let mut k = None;
    let mut reps = None;
    let mut seed = None;

    for (key, value, line) in keys {
        match key.as_str() {
            "method" => method = Some(Method::parse(&value)?),
            "m" => m = Some(parse_as::<usize>("m", &value, line)?),
            "n" => n = Some(parse_as::<usize>("n", &value, line)?),
            "theta" => theta = Some(parse_as::<f64>("theta", &value, line)?),
            "profile" => profile = Some(PathBuf::from(value)),
            "epsilon" => epsilon = Some(parse_as::<f64>("epsilon", &value, line)?),
            "epsilon_scope" => {
                epsilon_scope = Some(match value.as_str() {
                    "central" => true,
                    "local" => false,
                    other => {
                        return Err(Error::Parse {
                            line,
                            message: format!(
                                "invalid `epsilon_scope` `{other}` (expected central or local)"
                            ),
                        })
                    }
                })
            }
            "delta" => delta = Some(parse_as::<f64>("delta", &value, line)?),
            "k" => k = Some(parse_as::<usize>("k", &value, line)?),
            "reps" => reps = Some(parse_as::<usize>("reps", &value, line)?),
            "seed" => seed = Some(parse_as::<u64>("seed", &value, line)?),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }

    let method = method.ok_or_else(|| Error::Parse {
        line: section_line,
        message: format!("cell [{label}] is missing `method`"),
    })?;

    let data = match (profile, m, n) {
        (Some(path), None, None) => {
            if theta.is_some() {
                return Err(Error::config("theta", "not applicable to profile files"));
            }
            DataSource::ProfileFile(path)
        }
        (None, Some(m), Some(n)) => DataSource::Mallows {
            m,
            n,
            theta: theta.unwrap_or(0.25),
        },
        _ => {
            return Err(Error::Parse {
                line: section_line,
                message: format!("cell [{label}] needs either `profile` or both `m` and `n`"),
            })
        }
    };

    let mut cfg = ExperimentConfig::new(method, data);
    cfg.label = label;
    if let Some(e) = epsilon {
        cfg.epsilon = e;
    }
    cfg.epsilon_is_central = epsilon_scope;
    if let Some(d) = delta {
        cfg.delta = d;
    }
    if let Some(k) = k {
        cfg.k_queries = k;
    }
    if let Some(r) = reps {
        cfg.repetitions = r;
    }
    cfg.master_seed = seed.unwrap_or(default_seed);
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mallows_cell(method: Method, m: usize, n: usize, theta: f64) -> ExperimentConfig {
        ExperimentConfig::new(method, DataSource::Mallows { m, n, theta })
    }

    #[test]
    fn hra_on_unanimous_profile_has_zero_distance() {
        // theta high enough that every sample equals the reference.
        let mut cfg = mallows_cell(Method::Hra, 4, 20, 60.0);
        cfg.repetitions = 3;
        let result = run_config(&cfg).unwrap();
        assert_eq!(result.mean, 0.0);
        assert_eq!(result.std, 0.0);
    }

    #[test]
    fn noiseless_full_information_pipeline_matches_hra() {
        // Enormous local budget and K = C(m,2): the private pipeline sees
        // the full noiseless tally.
        let mut private = mallows_cell(Method::DdpHelnaksort, 4, 101, 1.0);
        private.epsilon = 1e6;
        private.epsilon_is_central = Some(false);
        private.k_queries = 6;
        private.repetitions = 5;

        let mut reference = mallows_cell(Method::Hra, 4, 101, 1.0);
        reference.repetitions = 5;

        let private_result = run_config(&private).unwrap();
        let reference_result = run_config(&reference).unwrap();
        assert_eq!(private_result.mean, reference_result.mean);
        assert_eq!(private_result.std, 0.0);
    }

    #[test]
    fn kemeny_lower_bounds_every_method() {
        let mut best = f64::INFINITY;
        let mut kemeny_value = f64::NAN;
        for method in [
            Method::Kemeny,
            Method::Hra,
            Method::DdpHelnaksort,
            Method::LdpKwiksort,
            Method::LdpQuicksort,
        ] {
            let mut cfg = mallows_cell(method, 4, 40, 0.5);
            cfg.repetitions = 10;
            let result = run_config(&cfg).unwrap();
            assert!((0.0..=1.0).contains(&result.mean));
            assert!(result.std >= 0.0);
            assert_eq!(result.distances.len(), cfg.repetitions);
            if method == Method::Kemeny {
                kemeny_value = result.mean;
            } else {
                best = best.min(result.distances.iter().copied().fold(f64::INFINITY, f64::min));
            }
        }
        assert!(kemeny_value <= best + 1e-12);
    }

    #[test]
    fn run_once_is_reproducible_per_rep() {
        let mut cfg = mallows_cell(Method::DdpHelnaksort, 4, 50, 1.0);
        cfg.repetitions = 4;
        let a = run_once(&cfg, 2).unwrap();
        let b = run_once(&cfg, 2).unwrap();
        assert_eq!(a, b);
        // Each repetition draws fresh noise; distances line up with the
        // batched runner.
        let result = run_config(&cfg).unwrap();
        assert_eq!(result.distances[2], a);
    }

    #[test]
    fn config_validation_names_fields() {
        let mut cfg = mallows_cell(Method::DdpHelnaksort, 4, 50, 1.0);
        cfg.repetitions = 0;
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "reps"),
            other => panic!("expected config error, got {other:?}"),
        }

        let mut cfg = mallows_cell(Method::DdpHelnaksort, 4, 50, 1.0);
        cfg.k_queries = 7;
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "k"),
            other => panic!("expected config error, got {other:?}"),
        }

        let mut cfg = mallows_cell(Method::Hra, 1, 50, 1.0);
        cfg.k_queries = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sweep_csv_is_deterministic() {
        let text = "\
[compare]
method = ddp-helnaksort
m = 4
n = 30
theta = 1.0
epsilon = 1
reps = 5

[baseline] # trailing comment
method = ldp-kwiksort
m = 4
n = 30
theta = 1.0
epsilon = 1
reps = 5
";
        let configs = parse_sweep_config(text, 7).unwrap();
        assert_eq!(configs.len(), 2);
        assert_eq!(configs[0].label, "compare");
        assert_eq!(configs[0].master_seed, 7);

        let results_a: Vec<_> = run_sweep(&configs)
            .into_iter()
            .collect::<Result<_>>()
            .unwrap();
        let results_b: Vec<_> = run_sweep(&configs)
            .into_iter()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(
            results_to_csv(&results_a, false),
            results_to_csv(&results_b, false)
        );
    }

    #[test]
    fn empty_config_list_yields_header_only() {
        assert_eq!(
            results_to_csv(&[], false),
            format!("{RESULT_CSV_HEADER}\n")
        );
        assert!(parse_sweep_config("# nothing here\n", 1).unwrap().is_empty());
    }

    #[test]
    fn parser_rejects_unknown_keys_and_orphans() {
        match parse_sweep_config("[a]\nmethod = hra\nm = 4\nn = 5\nbogus = 1\n", 1) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("bogus"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_sweep_config("method = hra\n", 1).is_err());
        assert!(parse_sweep_config("[a]\nmethod = hra\n", 1).is_err());
    }

    #[test]
    fn scope_defaults_follow_the_method() {
        let cfg = mallows_cell(Method::DdpHelnaksort, 4, 100, 1.0);
        assert!(cfg.epsilon_central());
        let cfg = mallows_cell(Method::DdpHelnaksortNoShuffle, 4, 100, 1.0);
        assert!(!cfg.epsilon_central());
        let cfg = mallows_cell(Method::LdpKwiksort, 4, 100, 1.0);
        assert!(!cfg.epsilon_central());

        let mut cfg = mallows_cell(Method::DdpHelnaksort, 4, 100, 1.0);
        cfg.epsilon_is_central = Some(false);
        assert!(!cfg.epsilon_central());
    }

    #[test]
    fn ci_shrinks_with_repetitions() {
        let mut small = mallows_cell(Method::DdpHelnaksort, 4, 40, 1.0);
        small.repetitions = 30;
        let mut large = small.clone();
        large.repetitions = 300;

        let small_ci = run_config(&small).unwrap().ci95;
        let large_ci = run_config(&large).unwrap().ci95;
        // Expect roughly sqrt(10) ~= 3.16x shrinkage; allow generous slack
        // for the sampled standard deviations.
        let ratio = small_ci / large_ci;
        assert!(
            ratio > 1.8 && ratio < 5.5,
            "ci ratio {ratio} (30 reps: {small_ci}, 300 reps: {large_ci})"
        );
    }

    #[test]
    fn shuffled_batch_matches_the_assignment_volume() {
        let mut cfg = mallows_cell(Method::DdpHelnaksort, 4, 60, 1.0);
        cfg.repetitions = 1;
        let batch = shuffled_batch(&cfg, 0).unwrap();
        assert_eq!(batch.len(), 60); // n agents, K = 1 answers each

        let cfg = mallows_cell(Method::Hra, 4, 60, 1.0);
        assert!(shuffled_batch(&cfg, 0).is_err());
    }

    #[test]
    fn plot_csv_uses_the_requested_axis() {
        let mut cfg = mallows_cell(Method::DdpHelnaksort, 4, 30, 1.0);
        cfg.repetitions = 2;
        cfg.k_queries = 3;
        let result = run_config(&cfg).unwrap();
        let plot = results_to_plot_csv(std::slice::from_ref(&result), PlotAxis::K);
        let mut lines = plot.lines();
        assert_eq!(lines.next(), Some("x,series,y,ci"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("3,ddp-helnaksort,"));
    }
}
