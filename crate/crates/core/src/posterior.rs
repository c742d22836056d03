//! Dirichlet-categorical posterior over the categories of a conditioning
//! column, restricted to rows where a target column takes a given value.
//!
//! With a symmetric prior `Dirichlet(α, …, α)` and per-category counts
//! `n_k`, the posterior is `Dirichlet(α + n_1, …, α + n_K)` and the
//! predictive probability of category `k` is `(n_k + α) / (N + K·α)`.
//! Credible intervals come from seeded Monte Carlo: each draw normalizes
//! `K` independent `Gamma(α + n_k, 1)` variates.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::Gamma;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::round_simplex;
use crate::kind::ColumnKind;
use crate::table::DataTable;

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_LEVEL: f64 = 0.90;
pub const DEFAULT_MC_SAMPLES: usize = 10_000;
pub const MIN_MC_SAMPLES: usize = 1_000;
pub const DEFAULT_SYNTHETIC_DRAWS: usize = 1_000;
pub const BACKEND_NAME: &str = "dirichlet_categorical";

const MC_STREAM: u64 = 0;
const SYNTHETIC_STREAM: u64 = 1;

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn simplex<S: Serializer>(p: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    round_simplex(p).serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSummary {
    pub draws: u64,
    pub seed: u64,
    /// Draw counts per support category.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosteriorDistribution {
    pub target_column: String,
    pub target_value: String,
    pub condition_column: String,
    pub support: Vec<String>,
    pub counts: Vec<u64>,
    /// Matching rows dropped because the condition cell was missing.
    pub excluded_rows: u64,
    pub alpha: f64,
    /// Written rounded to multiples of 1e-6 that sum to exactly one.
    #[serde(serialize_with = "simplex")]
    pub point_estimates: Vec<f64>,
    pub level: f64,
    pub intervals: Vec<[f64; 2]>,
    pub seed: u64,
    pub mc_samples: u64,
    pub synthetic: Option<SyntheticSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilisticPayload {
    pub backend: String,
    pub entries: Vec<PosteriorDistribution>,
}

/// A fitted symmetric Dirichlet-categorical posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPosterior {
    pub support: Vec<String>,
    pub counts: Vec<u64>,
    pub alpha: f64,
}

impl DirichletPosterior {
    pub fn new(support: Vec<String>, counts: Vec<u64>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidOption(format!("alpha must be positive, got {alpha}")));
        }
        if support.len() != counts.len() || support.is_empty() {
            return Err(Error::InvalidOption("support and counts must be non-empty and aligned".into()));
        }
        Ok(Self { support, counts, alpha })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn concentrations(&self) -> Vec<f64> {
        self.counts.iter().map(|&n| n as f64 + self.alpha).collect()
    }

    /// `(n_k + α) / (N + K·α)` for each category.
    pub fn point_estimates(&self) -> Vec<f64> {
        let denom = self.total() as f64 + self.counts.len() as f64 * self.alpha;
        self.concentrations().iter().map(|c| c / denom).collect()
    }
}

/// `n` Dirichlet variates, draw-major, from one stream in a fixed order.
pub fn dirichlet_draws(concentrations: &[f64], n: usize, rng: &mut ChaCha20Rng) -> Vec<Vec<f64>> {
    let gammas: Vec<Gamma<f64>> = concentrations
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("concentration is positive and finite"))
        .collect();
    let mut draws = Vec::with_capacity(n);
    while draws.len() < n {
        let mut g: Vec<f64> = gammas.iter().map(|d| d.sample(rng)).collect();
        let sum: f64 = g.iter().sum();
        // all-zero underflow is possible for tiny shapes; redraw
        if sum <= 0.0 || !sum.is_finite() {
            continue;
        }
        g.iter_mut().for_each(|x| *x /= sum);
        draws.push(g);
    }
    draws
}

/// Linear interpolation between order statistics of a sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-tailed intervals at `level`, one `[lo, hi]` per category.
pub fn credible_intervals(
    posterior: &DirichletPosterior,
    level: f64,
    seed: u64,
    mc_samples: usize,
) -> Result<Vec<[f64; 2]>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidOption(format!("level must lie in (0, 1), got {level}")));
    }
    if mc_samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidOption(format!(
            "mc_samples must be at least {MIN_MC_SAMPLES}, got {mc_samples}"
        )));
    }
    let mut rng = rng_for(seed, MC_STREAM);
    let draws = dirichlet_draws(&posterior.concentrations(), mc_samples, &mut rng);
    let (p_lo, p_hi) = ((1.0 - level) / 2.0, (1.0 + level) / 2.0);
    Ok((0..posterior.support.len())
        .map(|k| {
            let mut marginal: Vec<f64> = draws.iter().map(|d| d[k]).collect();
            marginal.sort_by(f64::total_cmp);
            [quantile_sorted(&marginal, p_lo), quantile_sorted(&marginal, p_hi)]
        })
        .collect())
}

/// `m` independent category draws from the posterior predictive.
pub fn sample_synthetic(posterior: &DirichletPosterior, m: usize, seed: u64) -> Vec<String> {
    if m == 0 {
        return Vec::new();
    }
    let dist = WeightedIndex::new(posterior.point_estimates()).expect("predictive weights are positive");
    let mut rng = rng_for(seed, SYNTHETIC_STREAM);
    (0..m)
        .map(|_| posterior.support[dist.sample(&mut rng)].clone())
        .collect()
}

#[derive(Debug, Clone)]
pub struct FitRequest {
    pub target_column: String,
    pub target_value: String,
    pub condition_column: String,
    pub alpha: f64,
    pub level: f64,
    pub seed: u64,
    pub mc_samples: usize,
    pub synthetic_draws: usize,
}

impl FitRequest {
    pub fn new(target_column: &str, target_value: &str, condition_column: &str) -> Self {
        Self {
            target_column: target_column.to_string(),
            target_value: target_value.to_string(),
            condition_column: condition_column.to_string(),
            alpha: DEFAULT_ALPHA,
            level: DEFAULT_LEVEL,
            seed: 0,
            mc_samples: DEFAULT_MC_SAMPLES,
            synthetic_draws: DEFAULT_SYNTHETIC_DRAWS,
        }
    }
}

/// A source of conditional posteriors for the probabilistic module.
pub trait InferenceBackend {
    fn name(&self) -> &str;
    fn fit(&self, table: &DataTable, kinds: &[ColumnKind], request: &FitRequest) -> Result<PosteriorDistribution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DirichletBackend;

impl InferenceBackend for DirichletBackend {
    fn name(&self) -> &str {
        BACKEND_NAME
    }

    fn fit(&self, table: &DataTable, kinds: &[ColumnKind], request: &FitRequest) -> Result<PosteriorDistribution> {
        fit_conditional(table, kinds, request)
    }
}

fn require_categorical(table: &DataTable, kinds: &[ColumnKind], col: usize) -> Result<()> {
    let stratum = kinds[col].stratum;
    if stratum.is_numeric() {
        return Err(Error::WrongStratum {
            column: table.columns()[col].clone(),
            stratum: stratum.to_string(),
            expected: "ordinal or nominal",
        });
    }
    Ok(())
}

fn nearest_matches(candidates: &BTreeSet<&str>, value: &str) -> Vec<String> {
    let mut scored: Vec<(usize, &str)> = candidates
        .iter()
        .map(|c| (strsim::levenshtein(&c.to_lowercase(), &value.to_lowercase()), *c))
        .collect();
    scored.sort();
    scored.into_iter().take(3).map(|(_, c)| c.to_string()).collect()
}

/// Tallies condition categories over rows whose target cell equals the
/// requested value (compared after trimming) and fits the posterior.
pub fn fit_conditional(table: &DataTable, kinds: &[ColumnKind], req: &FitRequest) -> Result<PosteriorDistribution> {
    let it = table.require_column(&req.target_column)?;
    let ic = table.require_column(&req.condition_column)?;
    require_categorical(table, kinds, it)?;
    require_categorical(table, kinds, ic)?;

    let support: Vec<&str> = table
        .column(ic)
        .filter(|(_, m)| !m)
        .map(|(v, _)| v)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if support.len() < 2 {
        return Err(Error::TooFewCategories {
            column: req.condition_column.clone(),
            categories: support.len(),
        });
    }

    let wanted = req.target_value.trim();
    let matching: Vec<usize> = (0..table.row_count())
        .filter(|&r| !table.is_missing(r, it) && table.cell(r, it).trim() == wanted)
        .collect();
    if matching.is_empty() {
        let values: BTreeSet<&str> = table.column(it).filter(|(_, m)| !m).map(|(v, _)| v).collect();
        return Err(Error::TargetNotFound {
            column: req.target_column.clone(),
            value: req.target_value.clone(),
            nearest: nearest_matches(&values, wanted),
        });
    }

    let mut counts = vec![0u64; support.len()];
    let mut excluded = 0;
    for &r in &matching {
        if table.is_missing(r, ic) {
            excluded += 1;
            continue;
        }
        let k = support.binary_search(&table.cell(r, ic)).expect("support covers observed categories");
        counts[k] += 1;
    }

    let posterior = DirichletPosterior::new(
        support.iter().map(|s| s.to_string()).collect(),
        counts,
        req.alpha,
    )?;
    posterior_payload(req, &posterior, excluded)
}

/// Assembles the label entry for an already-fitted posterior.
pub fn posterior_payload(
    req: &FitRequest,
    posterior: &DirichletPosterior,
    excluded_rows: u64,
) -> Result<PosteriorDistribution> {
    let intervals = credible_intervals(posterior, req.level, req.seed, req.mc_samples)?;
    let synthetic = (req.synthetic_draws > 0).then(|| {
        let draws = sample_synthetic(posterior, req.synthetic_draws, req.seed);
        let mut counts = vec![0u64; posterior.support.len()];
        for d in &draws {
            let k = posterior.support.iter().position(|s| s == d).unwrap();
            counts[k] += 1;
        }
        SyntheticSummary {
            draws: req.synthetic_draws as u64,
            seed: req.seed,
            counts,
        }
    });
    Ok(PosteriorDistribution {
        target_column: req.target_column.clone(),
        target_value: req.target_value.clone(),
        condition_column: req.condition_column.clone(),
        support: posterior.support.clone(),
        counts: posterior.counts.clone(),
        excluded_rows,
        alpha: posterior.alpha,
        point_estimates: posterior.point_estimates(),
        level: req.level,
        intervals,
        seed: req.seed,
        mc_samples: req.mc_samples as u64,
        synthetic,
    })
}
