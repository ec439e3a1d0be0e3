//! Exhaustive enumeration of process histories with exact probabilities.
//!
//! Every history of outcomes up to a small horizon is visited once, carrying
//! the product of its step probabilities. Run it over [`BigRational`] for
//! exact answers or over `f64` for speed.
//!
//! [`BigRational`]: num_rational::BigRational

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::PossibleForest;
use crate::process::{merge, MergedMultigraph, Outcome, OutcomeKind, TreeState};
use crate::scalar::Scalar;
use crate::stats::{adjacent_pair_count, compute_stats, triangle_count};

/// Largest horizon enumerated unless a caller raises it.
pub const DEFAULT_CAP: usize = 8;

/// Number of histories reaching tree size `t`: `prod_{u=2}^{t} (3u - 5)`.
pub fn history_count(t: usize) -> u64 {
    (2..=t as u64).map(|u| 3 * u - 5).product()
}

fn check_beta<S: Scalar>(beta: &S) -> Result<()> {
    if *beta > S::zero() {
        Ok(())
    } else {
        Err(Error::Parameter("beta must satisfy beta > 0".into()))
    }
}

fn check_horizon(t: usize, cap: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    if t > cap {
        return Err(Error::Capacity { requested: t, cap });
    }
    Ok(())
}

/// `(Pr(Uniform(i)), Pr(CopyHead(i)) = Pr(CopyTail(i)))` for a tree of size
/// `u`, indexed by `u`.
fn step_law<S: Scalar>(beta: &S, t: usize) -> Vec<(S, S)> {
    let two = S::from_u64(2);
    (0..t)
        .map(|u| {
            if u == 0 {
                return (S::zero(), S::zero());
            }
            let u = S::from_u64(u as u64);
            let denom = (two.clone() + beta.clone()) * u - two.clone();
            (beta.clone() / denom.clone(), S::one() / denom)
        })
        .collect()
}

/// Outcome space for a tree with `u` vertices, with each element's probability.
fn outcome_space<'a, S: Scalar>(
    u: usize,
    law: &'a (S, S),
) -> impl Iterator<Item = (OutcomeKind, &'a S)> + 'a {
    let uniform = (1..=u).map(move |i| (OutcomeKind::Uniform(i), &law.0));
    let heads = (2..=u).map(move |i| (OutcomeKind::CopyHead(i), &law.1));
    let tails = (2..=u).map(move |i| (OutcomeKind::CopyTail(i), &law.1));
    uniform.chain(heads).chain(tails)
}

/// Visits every history reaching tree size `t` as
/// `(tree, outcomes, probability)`.
pub fn fold_histories<S, F>(t: usize, beta: &S, cap: usize, mut visit: F) -> Result<()>
where
    S: Scalar,
    F: FnMut(&TreeState, &[Outcome], &S),
{
    check_beta(beta)?;
    check_horizon(t, cap)?;
    let law = step_law(beta, t);
    let mut tree = TreeState::with_capacity(t);
    let mut log = Vec::with_capacity(t);
    descend(&mut tree, &mut log, &S::one(), t, &law, &mut visit);
    Ok(())
}

fn descend<S, F>(
    tree: &mut TreeState,
    log: &mut Vec<Outcome>,
    weight: &S,
    t: usize,
    law: &[(S, S)],
    visit: &mut F,
) where
    S: Scalar,
    F: FnMut(&TreeState, &[Outcome], &S),
{
    let u = tree.vertex_count();
    if u == t {
        visit(tree, log, weight);
        return;
    }
    for (kind, p) in outcome_space(u, &law[u]) {
        let next = weight.clone() * p.clone();
        tree.step(kind).expect("enumerated outcomes are valid");
        log.push(Outcome { kind, step: u + 1 });
        descend(tree, log, &next, t, law, visit);
        log.pop();
        tree.undo_step();
    }
}

/// Fully materialised history distribution at horizon `t`.
#[derive(Debug, Clone)]
pub struct HistoryDistribution<S> {
    pub horizon: usize,
    pub entries: Vec<(Vec<Outcome>, S)>,
}

impl<S: Scalar> HistoryDistribution<S> {
    pub fn total(&self) -> S {
        self.entries
            .iter()
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }
}

pub fn enumerate_histories<S: Scalar>(
    t: usize,
    beta: &S,
    cap: usize,
) -> Result<HistoryDistribution<S>> {
    let mut entries = Vec::with_capacity(history_count(t.min(cap)) as usize);
    fold_histories(t, beta, cap, |_, log, p| entries.push((log.to_vec(), p.clone())))?;
    Ok(HistoryDistribution {
        horizon: t,
        entries,
    })
}

/// Distribution of the next target given the current tree, obtained by
/// summing the outcome probabilities that resolve to each vertex.
/// `result[i - 1]` is the probability of target `v_i`.
pub fn target_distribution<S: Scalar>(tree: &TreeState, beta: &S) -> Result<Vec<S>> {
    check_beta(beta)?;
    let u = tree.vertex_count();
    let law = step_law(beta, u + 1);
    let mut out = vec![S::zero(); u];
    for (kind, p) in outcome_space(u, &law[u]) {
        let target = tree.resolve_target(kind)?;
        out[target - 1] = out[target - 1].clone() + p.clone();
    }
    Ok(out)
}

/// `Pr(S ⊂ G^t)` by summing the probabilities of all histories whose tree
/// contains every edge of `forest` with matching labels.
pub fn exact_subgraph_probability<S: Scalar>(
    forest: &PossibleForest,
    t: usize,
    beta: &S,
    cap: usize,
) -> Result<S> {
    if t < forest.max_vertex() {
        return Err(Error::InvalidForest(format!(
            "forest reaches vertex {} beyond horizon {t}",
            forest.max_vertex()
        )));
    }
    let mut total = S::zero();
    fold_histories(t, beta, cap, |tree, _, p| {
        if forest.contained_in(tree) {
            total = total.clone() + p.clone();
        }
    })?;
    Ok(total)
}

/// Containment probability of every non-empty possible forest on
/// `1..=min(max_vertex, t)`, from a single pass over the histories.
pub fn subgraph_probability_table<S: Scalar>(
    max_vertex: usize,
    t: usize,
    beta: &S,
    cap: usize,
) -> Result<Vec<(PossibleForest, S)>> {
    let top = max_vertex.min(t);
    // Mixed-radix code: tail i contributes head * weight[i], head 0 = absent.
    let mut weight = vec![0usize; top + 1];
    let mut cells = 1usize;
    for i in 2..=top {
        weight[i] = cells;
        cells *= i;
    }
    let mut acc = vec![S::zero(); cells];
    let tails = top.saturating_sub(1);
    fold_histories(t, beta, cap, |tree, _, p| {
        let parts: Vec<usize> = (2..=top).map(|i| tree.head(i) * weight[i]).collect();
        for mask in 1usize..(1 << tails) {
            let code: usize = (0..tails)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| parts[b])
                .sum();
            acc[code] = acc[code].clone() + p.clone();
        }
    })?;
    let mut table = Vec::with_capacity(cells.saturating_sub(1));
    for forest in PossibleForest::catalog(top) {
        let code: usize = forest.edges().map(|(i, j)| j * weight[i]).sum();
        table.push((forest, acc[code].clone()));
    }
    Ok(table)
}

/// Statistics the oracle can take expectations of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Triangles,
    AdjacentPairs,
    DegeneratePairs,
    Clustering,
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangles" => Ok(Self::Triangles),
            "adjacent_pairs" | "pairs" => Ok(Self::AdjacentPairs),
            "degenerate_pairs" => Ok(Self::DegeneratePairs),
            "clustering" => Ok(Self::Clustering),
            _ => Err(Error::Parameter(format!(
                "unknown statistic '{s}' (triangles, adjacent_pairs, degenerate_pairs, clustering)"
            ))),
        }
    }
}

/// Exact expectation of a statistic that may be undefined on some graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactExpectation<S> {
    /// Expectation conditional on the statistic being defined.
    pub value: S,
    /// Probability that the statistic is undefined (e.g. `D = 0`).
    pub prob_undefined: S,
}

/// `E[f(G)]` over all histories of the merged graph with `n` vertices of
/// width `m`. `f` returns `None` where the statistic is undefined.
pub fn exact_expectation_with<S, F>(
    n: usize,
    m: usize,
    beta: &S,
    cap: usize,
    mut statistic: F,
) -> Result<ExactExpectation<S>>
where
    S: Scalar,
    F: FnMut(&MergedMultigraph) -> Option<S>,
{
    if n == 0 || m == 0 {
        return Err(Error::Parameter("n and m must be at least 1".into()));
    }
    let mut sum = S::zero();
    let mut defined = S::zero();
    let mut undefined = S::zero();
    let mut failure = None;
    fold_histories(n * m, beta, cap, |tree, _, p| match merge(tree, m) {
        Ok(g) => match statistic(&g) {
            Some(v) => {
                sum = sum.clone() + p.clone() * v;
                defined = defined.clone() + p.clone();
            }
            None => undefined = undefined.clone() + p.clone(),
        },
        Err(e) => failure = Some(e),
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let value = if defined > S::zero() {
        sum / defined
    } else {
        S::zero()
    };
    Ok(ExactExpectation {
        value,
        prob_undefined: undefined,
    })
}

pub fn exact_expectation<S: Scalar>(
    n: usize,
    m: usize,
    beta: &S,
    statistic: Statistic,
    cap: usize,
) -> Result<ExactExpectation<S>> {
    let count = |v: u128| Some(S::from_u64(v as u64));
    match statistic {
        Statistic::Triangles => exact_expectation_with(n, m, beta, cap, |g| count(triangle_count(g))),
        Statistic::AdjacentPairs => {
            exact_expectation_with(n, m, beta, cap, |g| count(adjacent_pair_count(g)))
        }
        Statistic::DegeneratePairs => {
            exact_expectation_with(n, m, beta, cap, |g| count(compute_stats(g).degenerate_pairs))
        }
        Statistic::Clustering => exact_expectation_with(n, m, beta, cap, |g| {
            let s = compute_stats(g);
            (s.adjacent_pairs > 0).then(|| {
                S::from_u64(3 * s.triangles as u64) / S::from_u64(s.adjacent_pairs as u64)
            })
        }),
    }
}

/// Probability of each complete outcome sequence at horizon `t`, keyed by
/// the sequence. Used for goodness-of-fit checks of the sampler.
pub fn history_probabilities(t: usize, beta: f64, cap: usize) -> Result<HashMap<Vec<Outcome>, f64>> {
    let mut map = HashMap::with_capacity(history_count(t.min(cap)) as usize);
    fold_histories(t, &beta, cap, |_, log, p| {
        map.insert(log.to_vec(), *p);
    })?;
    Ok(map)
}
