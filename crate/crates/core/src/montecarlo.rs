//! Monte Carlo ensembles over independent seeded replicates.
//!
//! Replicates run in parallel but are collected in replicate order before
//! any aggregation, so every report is bit-identical for a given master
//! seed regardless of thread count.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::exact;
use crate::params::ModelParams;
use crate::process::{generate, generate_tree, track_blocks_many, Outcome};
use crate::seed::{derive_seed, experiment_key};
use crate::stats::{compute_stats, GraphStats};
use crate::theory::{self, block_growth_expectation};

const Z95: f64 = 1.96;

/// Sample mean, unbiased variance and normal-theory 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub ci_half_width: f64,
}

impl Summary {
    pub fn from_samples(xs: &[f64]) -> Self {
        let count = xs.len();
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
                ci_half_width: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / count as f64;
        let variance = if count > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            f64::NAN
        };
        Self {
            count,
            mean,
            variance,
            ci_half_width: Z95 * (variance / count as f64).sqrt(),
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn ci(&self) -> (f64, f64) {
        (self.mean - self.ci_half_width, self.mean + self.ci_half_width)
    }
}

/// Deviation band `n^{(4+β)/(4+2β) + ε}` for the adjacent-pair count.
pub fn deviation_band(n: usize, beta: f64, epsilon: f64) -> f64 {
    (n as f64).powf((4.0 + beta) / (4.0 + 2.0 * beta) + epsilon)
}

fn params_key(params: &ModelParams) -> u64 {
    experiment_key(&[params.n as u64, params.m as u64, params.beta.to_bits()])
}

/// Seed of replicate `r` for `params`; shared by every experiment that
/// samples the same parameters.
pub fn replicate_seed(params: &ModelParams, master_seed: u64, r: usize) -> u64 {
    derive_seed(master_seed, params_key(params), r as u64)
}

/// Statistics of `replicates` independent graphs, in replicate order.
pub fn run_replicates(params: &ModelParams, replicates: usize, master_seed: u64) -> Result<Vec<GraphStats>> {
    params.validate()?;
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let seed = replicate_seed(params, master_seed, r);
            let g = generate(params, seed)?;
            Ok(compute_stats(&g).with_provenance(params.beta, seed))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub params: ModelParams,
    pub replicates: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub triangles: Summary,
    pub adjacent_pairs: Summary,
    pub degenerate_pairs: Summary,
    /// Over replicates where the coefficient is defined.
    pub clustering: Summary,
    pub clustering_undefined: usize,
    pub max_degree: Summary,
    pub tail_band: f64,
    pub tail_exceed_count: usize,
    #[serde(skip)]
    pub replicate_seeds: Vec<u64>,
}

impl EnsembleReport {
    pub const CSV_HEADER: &'static str = "n,m,beta,replicates,master_seed,statistic,mean,variance,ci_half_width,count";

    /// One CSV row per statistic.
    pub fn csv_rows(&self) -> Vec<String> {
        let p = &self.params;
        [
            ("triangles", &self.triangles),
            ("adjacent_pairs", &self.adjacent_pairs),
            ("degenerate_pairs", &self.degenerate_pairs),
            ("clustering", &self.clustering),
            ("max_degree", &self.max_degree),
        ]
        .iter()
        .map(|(name, s)| {
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                p.n, p.m, p.beta, self.replicates, self.master_seed, name, s.mean, s.variance,
                s.ci_half_width, s.count
            )
        })
        .collect()
    }
}

pub fn aggregate(
    params: &ModelParams,
    stats: &[GraphStats],
    master_seed: u64,
    epsilon: f64,
) -> EnsembleReport {
    let column = |f: &dyn Fn(&GraphStats) -> f64| stats.iter().map(f).collect::<Vec<_>>();
    let adjacent = column(&|s| s.adjacent_pairs as f64);
    let adjacent_pairs = Summary::from_samples(&adjacent);
    let clustering: Vec<f64> = stats.iter().filter_map(|s| s.clustering).collect();
    let tail_band = deviation_band(params.n, params.beta, epsilon);
    let tail_exceed_count = adjacent
        .iter()
        .filter(|&&d| (d - adjacent_pairs.mean).abs() >= tail_band)
        .count();
    EnsembleReport {
        params: *params,
        replicates: stats.len(),
        master_seed,
        epsilon,
        triangles: Summary::from_samples(&column(&|s| s.triangles as f64)),
        adjacent_pairs,
        degenerate_pairs: Summary::from_samples(&column(&|s| s.degenerate_pairs as f64)),
        clustering_undefined: stats.len() - clustering.len(),
        clustering: Summary::from_samples(&clustering),
        max_degree: Summary::from_samples(&column(&|s| s.max_degree as f64)),
        tail_band,
        tail_exceed_count,
        replicate_seeds: stats.iter().filter_map(|s| s.seed).collect(),
    }
}

pub fn run_ensemble(
    params: &ModelParams,
    replicates: usize,
    master_seed: u64,
    epsilon: f64,
) -> Result<EnsembleReport> {
    if replicates < 2 {
        return Err(Error::InsufficientReplicates(replicates));
    }
    let stats = run_replicates(params, replicates, master_seed)?;
    Ok(aggregate(params, &stats, master_seed, epsilon))
}

/// Least-squares fit of mean triangle count against `ln n`.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub m: usize,
    pub beta: f64,
    pub replicates: usize,
    pub weighted: bool,
    pub grid: Vec<usize>,
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub c1: f64,
    /// `slope / c1`, NaN when `c1 = 0`.
    pub ratio: f64,
}

/// Straight-line fit `y = intercept + slope x`; weights of `None` mean
/// ordinary least squares. Returns `(slope, intercept, slope_stderr)`.
pub fn fit_line(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<(f64, f64, f64)> {
    let k = x.len();
    if k < 3 || y.len() != k {
        return Err(Error::DegenerateGrid("need at least 3 points".into()));
    }
    let w: Vec<f64> = match weights {
        Some(w) => w.to_vec(),
        None => vec![1.0; k],
    };
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, b)| b * (a - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateGrid("x values do not vary".into()));
    }
    let sxy: f64 = (0..k).map(|i| w[i] * (x[i] - xm) * (y[i] - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residual: f64 = (0..k)
        .map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2))
        .sum();
    let stderr = if weights.is_some() {
        (1.0 / sxx).sqrt()
    } else {
        (residual / (k - 2) as f64 / sxx).sqrt()
    };
    Ok((slope, intercept, stderr))
}

/// Fits the mean triangle count against `ln n` over `grid`, isolating the
/// log-slope from the bounded intercept.
pub fn fit_triangle_slope(
    m: usize,
    beta: f64,
    grid: &[usize],
    replicates: usize,
    master_seed: u64,
    weighted: bool,
) -> Result<SlopeFit> {
    if grid.len() < 4 {
        return Err(Error::DegenerateGrid(format!(
            "grid needs at least 4 points, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
        return Err(Error::DegenerateGrid("grid must be strictly increasing and positive".into()));
    }
    if replicates < 2 {
        return Err(Error::InsufficientReplicates(replicates));
    }
    let mut means = Vec::with_capacity(grid.len());
    let mut std_errors = Vec::with_capacity(grid.len());
    for &n in grid {
        let params = ModelParams::new(n, m, beta)?;
        let report = run_ensemble(&params, replicates, master_seed, 0.0)?;
        means.push(report.triangles.mean);
        std_errors.push(report.triangles.std_error());
    }
    fit_means(m, beta, replicates, grid, means, std_errors, weighted)
}

/// Fit over precomputed per-grid means.
pub fn fit_means(
    m: usize,
    beta: f64,
    replicates: usize,
    grid: &[usize],
    means: Vec<f64>,
    std_errors: Vec<f64>,
    weighted: bool,
) -> Result<SlopeFit> {
    let x: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
    let weights: Option<Vec<f64>> = weighted.then(|| {
        std_errors
            .iter()
            .map(|se| if *se > 0.0 { 1.0 / (se * se) } else { 1.0 })
            .collect()
    });
    let (slope, intercept, slope_stderr) = if means.iter().all(|&y| y == means[0]) {
        (0.0, means[0], 0.0)
    } else {
        fit_line(&x, &means, weights.as_deref())?
    };
    let c1 = theory::constants(m, beta)?.c1;
    Ok(SlopeFit {
        m,
        beta,
        replicates,
        weighted,
        grid: grid.to_vec(),
        means,
        std_errors,
        slope,
        intercept,
        slope_stderr,
        c1,
        ratio: if c1 > 0.0 { slope / c1 } else { f64::NAN },
    })
}

/// Empirical exceedance of the deviation band by the adjacent-pair count.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub params: ModelParams,
    pub replicates: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub band: f64,
    /// Ensemble mean, standing in for the true expectation.
    pub mean_pairs: f64,
    pub sd_pairs: f64,
    pub band_over_sd: f64,
    pub exceedances: usize,
    pub frequency: f64,
}

pub fn concentration_experiment(
    params: &ModelParams,
    replicates: usize,
    master_seed: u64,
    epsilon: f64,
) -> Result<ConcentrationReport> {
    let report = run_ensemble(params, replicates, master_seed, epsilon)?;
    Ok(concentration_from(&report))
}

pub fn concentration_from(report: &EnsembleReport) -> ConcentrationReport {
    let sd = report.adjacent_pairs.std_dev();
    ConcentrationReport {
        params: report.params,
        replicates: report.replicates,
        master_seed: report.master_seed,
        epsilon: report.epsilon,
        band: report.tail_band,
        mean_pairs: report.adjacent_pairs.mean,
        sd_pairs: sd,
        band_over_sd: report.tail_band / sd,
        exceedances: report.tail_exceed_count,
        frequency: report.tail_exceed_count as f64 / report.replicates as f64,
    }
}

/// Sizes of one tracked non-base block at each of two owners.
#[derive(Debug, Clone, Serialize)]
pub struct BlockCorrelationReport {
    pub params: ModelParams,
    pub owners: (usize, usize),
    pub anchor: usize,
    pub horizon: usize,
    pub replicates: usize,
    pub master_seed: u64,
    pub first: Summary,
    pub second: Summary,
    pub mean_product: f64,
    /// `E[|A||B|] - E[|A|] E[|B|]`, estimated.
    pub covariance: f64,
    pub covariance_ci_half_width: f64,
    pub theory_mean: f64,
    /// `(mean - theory) / std_error` for each block.
    pub z_first: f64,
    pub z_second: f64,
}

impl BlockCorrelationReport {
    /// The lower end of the covariance interval does not exceed zero.
    pub fn covariance_consistent_with_non_positive(&self) -> bool {
        self.covariance - self.covariance_ci_half_width <= 0.0
    }
}

/// Tracks, for each owner, the block holding its lowest-numbered half-edge
/// at the anchor time.
pub fn block_correlation_experiment(
    params: &ModelParams,
    owners: (usize, usize),
    anchor: usize,
    horizon: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<BlockCorrelationReport> {
    if owners.0 == owners.1 {
        return Err(Error::Instrumentation("owners must be distinct".into()));
    }
    if replicates < 2 {
        return Err(Error::InsufficientReplicates(replicates));
    }
    let key = experiment_key(&[
        params_key(params),
        owners.0 as u64,
        owners.1 as u64,
        anchor as u64,
        horizon as u64,
    ]);
    let sizes: Vec<(f64, f64)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(master_seed, key, r as u64);
            let parts = track_blocks_many(params, seed, &[owners.0, owners.1], anchor, horizon)?;
            let tracked = |k: usize| {
                parts[k]
                    .blocks
                    .get(1)
                    .map(|b| b.len() as f64)
                    .ok_or_else(|| Error::Instrumentation(format!("owner {} has no half-edges", parts[k].owner_vertex)))
            };
            Ok((tracked(0)?, tracked(1)?))
        })
        .collect::<Result<_>>()?;
    let a: Vec<f64> = sizes.iter().map(|p| p.0).collect();
    let b: Vec<f64> = sizes.iter().map(|p| p.1).collect();
    let first = Summary::from_samples(&a);
    let second = Summary::from_samples(&b);
    let r = replicates as f64;
    let mean_product = sizes.iter().map(|(x, y)| x * y).sum::<f64>() / r;
    let centred: Vec<f64> = sizes
        .iter()
        .map(|(x, y)| (x - first.mean) * (y - second.mean))
        .collect();
    let covariance = centred.iter().sum::<f64>() / (r - 1.0);
    let spread = Summary::from_samples(&centred);
    let theory_mean = block_growth_expectation(anchor, horizon, params.beta)?;
    let z = |s: &Summary| {
        let se = s.std_error();
        if se > 0.0 {
            (s.mean - theory_mean) / se
        } else {
            0.0
        }
    };
    Ok(BlockCorrelationReport {
        params: *params,
        owners,
        anchor,
        horizon,
        replicates,
        master_seed,
        z_first: z(&first),
        z_second: z(&second),
        first,
        second,
        mean_product,
        covariance,
        covariance_ci_half_width: Z95 * spread.std_error(),
        theory_mean,
    })
}

/// Pearson goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquaredTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub pooled_cells: usize,
}

/// Pearson chi-squared test of `observed` counts against `probabilities`.
/// Cells with expected count below `min_expected` are pooled into one.
pub fn chi_squared_gof(observed: &[u64], probabilities: &[f64], min_expected: f64) -> Result<ChiSquaredTest> {
    if observed.len() != probabilities.len() || observed.is_empty() {
        return Err(Error::Parameter("observed and probabilities must align".into()));
    }
    let total: u64 = observed.iter().sum();
    let total = total as f64;
    let (mut statistic, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp, mut pooled_cells) = (0.0, 0.0, 0usize);
    for (&o, &p) in observed.iter().zip(probabilities) {
        let e = p * total;
        if e < min_expected {
            pooled_obs += o as f64;
            pooled_exp += e;
            pooled_cells += 1;
        } else {
            statistic += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_cells > 0 && pooled_exp > 0.0 {
        statistic += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    if cells < 2 {
        return Err(Error::Parameter("need at least two cells".into()));
    }
    let dof = cells - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(ChiSquaredTest {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic),
        pooled_cells,
    })
}

/// Compares sampled outcome histories at tree size `t` with the exact
/// history distribution.
pub fn sampler_goodness_of_fit(
    t: usize,
    beta: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<ChiSquaredTest> {
    let exact = exact::history_probabilities(t, beta, exact::DEFAULT_CAP)?;
    let key = experiment_key(&[t as u64, beta.to_bits(), 0x6766]);
    let logs: Vec<Vec<Outcome>> = (0..replicates)
        .into_par_iter()
        .map(|r| generate_tree(t, beta, derive_seed(master_seed, key, r as u64)).map(|(_, log)| log))
        .collect::<Result<_>>()?;
    let mut counts: HashMap<&[Outcome], u64> = HashMap::new();
    for log in &logs {
        *counts.entry(log.as_slice()).or_default() += 1;
    }
    let mut histories: Vec<(&Vec<Outcome>, &f64)> = exact.iter().collect();
    histories.sort_by(|a, b| a.0.cmp(b.0));
    let observed: Vec<u64> = histories
        .iter()
        .map(|(h, _)| counts.get(h.as_slice()).copied().unwrap_or(0))
        .collect();
    if observed.iter().sum::<u64>() != replicates as u64 {
        return Err(Error::Parameter("sampled a history outside the outcome space".into()));
    }
    let probabilities: Vec<f64> = histories.iter().map(|(_, &p)| p).collect();
    chi_squared_gof(&observed, &probabilities, 5.0)
}
