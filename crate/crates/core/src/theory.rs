//! Closed-form probabilities, expectations and asymptotic constants.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::forest::PossibleForest;
use crate::params::check_beta;
use crate::scalar::Scalar;

/// `(2 + beta)(i - 1) - 2`, the total attachment weight before vertex `i` arrives.
fn arrival_weight<S: Scalar>(i: usize, beta: &S) -> S {
    let two = S::from_u64(2);
    (two.clone() + beta.clone()) * S::from_u64(i as u64 - 1) - two
}

fn check_horizon(forest: &PossibleForest, t: usize) -> Result<()> {
    if t < forest.max_vertex().max(1) {
        return Err(Error::InvalidForest(format!(
            "horizon {t} is before the forest's last vertex {}",
            forest.max_vertex()
        )));
    }
    Ok(())
}

/// Exact containment probability `Pr(S ⊂ G^t)` of a possible forest in the
/// tree process, evaluated in any [`Scalar`] (exact for rationals).
///
/// The gamma ratios `Γ(1 + β + d) / Γ(1 + β)` have integer offsets and are
/// expanded as finite products.
pub fn lemma1_probability_exact<S: Scalar>(forest: &PossibleForest, t: usize, beta: &S) -> Result<S> {
    if *beta <= S::zero() {
        return Err(Error::Parameter("beta must satisfy beta > 0".into()));
    }
    check_horizon(forest, t)?;
    let d1 = forest.in_degree(1) as u64;
    let mut p = beta.clone() / (beta.clone() + S::from_u64(d1));
    for v in forest.v_minus() {
        for k in 1..=forest.in_degree(v) as u64 {
            p = p * (S::from_u64(k) + beta.clone());
        }
    }
    let crossing = forest.crossing_counts();
    for i in 2..=forest.max_vertex() {
        let w = arrival_weight::<S>(i, beta);
        if forest.out_degree(i) == 1 {
            p = p / w;
        } else if crossing[i] > 0 {
            p = p * (S::one() + S::from_u64(crossing[i] as u64) / w);
        }
    }
    Ok(p)
}

/// Same probability evaluated in log space, stable for large vertex labels.
pub fn lemma1_probability(forest: &PossibleForest, t: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    check_horizon(forest, t)?;
    let mut log_p = log_prefactor(forest, beta);
    let crossing = forest.crossing_counts();
    for i in 2..=forest.max_vertex() {
        let w = arrival_weight::<f64>(i, &beta);
        if forest.out_degree(i) == 1 {
            log_p -= w.ln();
        } else if crossing[i] > 0 {
            log_p += (crossing[i] as f64 / w).ln_1p();
        }
    }
    Ok(log_p.exp())
}

/// `ln[β / (β + d_in(v_1))] + Σ_{v ∈ V⁻} ln[Γ(1 + β + d_in(v)) / Γ(1 + β)]`.
fn log_prefactor(forest: &PossibleForest, beta: f64) -> f64 {
    let d1 = forest.in_degree(1) as f64;
    let mut acc = (beta / (beta + d1)).ln();
    for v in forest.v_minus() {
        acc += ln_gamma_ratio_integer(1.0 + beta, forest.in_degree(v));
    }
    acc
}

/// `ln Γ(x + k) - ln Γ(x)` for integer `k`, as a finite sum of logs.
fn ln_gamma_ratio_integer(x: f64, k: usize) -> f64 {
    (0..k).map(|j| (x + j as f64).ln()).sum()
}

/// Leading-order approximation of [`lemma1_probability`]: the gamma-ratio
/// prefactor times `1 / ((2 + β)(i^{1+β} j)^{1/(2+β)})` per edge `(i, j)`.
pub fn lemma2_leading(forest: &PossibleForest, t: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    check_horizon(forest, t)?;
    let mut log_p = log_prefactor(forest, beta);
    let e = 1.0 / (2.0 + beta);
    for (i, j) in forest.edges() {
        log_p -= (2.0 + beta).ln() + e * ((1.0 + beta) * (i as f64).ln() + (j as f64).ln());
    }
    Ok(log_p.exp())
}

fn check_triple(a: usize, b: usize, c: usize) -> Result<()> {
    if a >= 1 && a < b && b < c {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "expected a labelled triple 1 <= a < b < c, got ({a}, {b}, {c})"
        )))
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::Parameter("m must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Leading term of the expected number of triangles on `v_a, v_b, v_c`.
pub fn expected_triangles_on_triple(a: usize, b: usize, c: usize, m: usize, beta: f64) -> Result<f64> {
    check_triple(a, b, c)?;
    check_m(m)?;
    check_beta(beta)?;
    let m = m as f64;
    let x = (1.0 + beta) / (2.0 + beta);
    let coefficient = m * (m - 1.0) * x * x + m * (m - 1.0).powi(2) * x * x * x;
    Ok(coefficient * triple_power(a, b, c, [2.0, 2.0 + beta, 2.0 + 2.0 * beta], beta))
}

/// `(a^pa b^pb c^pc)^{-1/(2+β)}`.
fn triple_power(a: usize, b: usize, c: usize, p: [f64; 3], beta: f64) -> f64 {
    let log = p[0] * (a as f64).ln() + p[1] * (b as f64).ln() + p[2] * (c as f64).ln();
    (-log / (2.0 + beta)).exp()
}

/// Position of the shared vertex of an adjacent pair within its triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCase {
    Smallest,
    Middle,
    Largest,
}

/// Leading term of the expected number of non-degenerate adjacent
/// half-edge pairs on the labelled triple, by position of the shared vertex.
pub fn adjacent_pair_case_density(
    case: PairCase,
    a: usize,
    b: usize,
    c: usize,
    m: usize,
    beta: f64,
) -> Result<f64> {
    check_triple(a, b, c)?;
    check_m(m)?;
    check_beta(beta)?;
    let m = m as f64;
    let x = (1.0 + beta) / (2.0 + beta);
    Ok(match case {
        PairCase::Smallest => {
            (m * x + m * (m - 1.0) * x * x)
                * triple_power(a, b, c, [2.0, 1.0 + beta, 1.0 + beta], beta)
        }
        PairCase::Middle => m * m * x * x * triple_power(a, b, c, [1.0, 2.0 + beta, 1.0 + beta], beta),
        PairCase::Largest => {
            m * (m - 1.0) * x * x * triple_power(a, b, c, [1.0, 1.0, 2.0 + 2.0 * beta], beta)
        }
    })
}

/// Triangle log-slope `c1` and adjacent-pair linear coefficient `c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryConstants {
    pub c1: f64,
    pub c2: f64,
    pub m: usize,
    pub beta: f64,
}

pub fn constants(m: usize, beta: f64) -> Result<TheoryConstants> {
    check_m(m)?;
    check_beta(beta)?;
    let mf = m as f64;
    let b2 = beta * beta;
    let c1 = mf * (mf - 1.0) * (1.0 + beta).powi(2) / b2
        + mf * (mf - 1.0).powi(2) * (1.0 + beta).powi(3) / (b2 * (2.0 + beta));
    let c2 = (2.0 + 5.0 * beta) / (2.0 * beta) * mf * mf + (2.0 - beta) / (2.0 * beta) * mf;
    Ok(TheoryConstants { c1, c2, m, beta })
}

/// `c1 ln n`; the bounded additive term is not modelled.
pub fn predicted_triangles(n: usize, m: usize, beta: f64) -> Result<f64> {
    check_n(n)?;
    Ok(constants(m, beta)?.c1 * (n as f64).ln())
}

/// `c2 n`; the `O(n^{2/(2+β)})` correction is not modelled.
pub fn predicted_adjacent_pairs(n: usize, m: usize, beta: f64) -> Result<f64> {
    check_n(n)?;
    Ok(constants(m, beta)?.c2 * n as f64)
}

/// `3 c1 ln n / (c2 n)`.
pub fn predicted_clustering(n: usize, m: usize, beta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter("clustering prediction needs n >= 2".into()));
    }
    let k = constants(m, beta)?;
    Ok(3.0 * k.c1 * (n as f64).ln() / (k.c2 * n as f64))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Parameter("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Spans up to this length use the finite product instead of log-gamma.
const PRODUCT_SPAN: usize = 64;

/// Expected size at tree time `t` of a non-base block that was a singleton
/// at time `s`:
/// `Γ(t - 1/(2+β)) Γ(s - 2/(2+β)) / (Γ(t - 2/(2+β)) Γ(s - 1/(2+β)))`.
pub fn block_growth_expectation(s: usize, t: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if s == 0 || s > t {
        return Err(Error::Parameter(format!("need 1 <= s <= t, got s = {s}, t = {t}")));
    }
    let x = 1.0 / (2.0 + beta);
    if t - s <= PRODUCT_SPAN {
        let log: f64 = (s..t)
            .map(|u| ((u as f64 - x) / (u as f64 - 2.0 * x)).ln())
            .sum();
        return Ok(log.exp());
    }
    let (s, t) = (s as f64, t as f64);
    let log = ln_gamma(t - x) - ln_gamma(t - 2.0 * x) + ln_gamma(s - 2.0 * x) - ln_gamma(s - x);
    Ok(log.exp())
}
