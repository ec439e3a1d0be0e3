//! Subcommand bodies. Each returns the complete primary output as text.

use std::fs;
use std::io::Read;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use mori_core::exact::{self, Statistic};
use mori_core::forest::PossibleForest;
use mori_core::montecarlo::{self, EnsembleReport};
use mori_core::process::{self, EdgeListHeader};
use mori_core::scalar::{parse_rational, Scalar};
use mori_core::stats::{compute_stats, GraphStats};
use mori_core::{theory, ModelParams};

use crate::args::*;
use crate::output::{csv, plot_data, to_json};
use crate::CliError;

type Out = Result<String, CliError>;

pub fn execute(command: &Command, plot: bool) -> Out {
    let supports_plot = matches!(command, Command::Sweep(_) | Command::Slope(_));
    if plot && !supports_plot {
        return Err(CliError::Usage(format!(
            "--plot-data is supported by sweep and slope, not {}",
            command.name()
        )));
    }
    match command {
        Command::Generate(a) => generate(a),
        Command::Stats(a) => stats(a),
        Command::Exact(a) => exact_query(a),
        Command::Predict(a) => predict(a),
        Command::Ensemble(a) => ensemble(a),
        Command::Sweep(a) => sweep(a, plot),
        Command::Slope(a) => slope(a, plot),
        Command::Concentration(a) => concentration(a),
        Command::Blocks(a) => blocks(a),
    }
}

fn generate(a: &GenerateArgs) -> Out {
    let m = &a.model;
    let params = ModelParams::new(m.n, m.m, m.beta)?;
    match a.format {
        GraphFormat::Edges => {
            let graph = process::generate(&params, m.seed)?;
            let header = EdgeListHeader {
                n: m.n,
                m: m.m,
                beta: m.beta,
                seed: m.seed,
            };
            Ok(process::render_edge_list(&graph, Some(&header)))
        }
        GraphFormat::Outcomes => {
            let (_, log) = process::generate_tree(params.tree_size(), m.beta, m.seed)?;
            Ok(process::render_outcome_log(&log))
        }
    }
}

fn stats_json(s: &GraphStats) -> Out {
    let mut value = serde_json::to_value(s).map_err(CliError::runtime)?;
    if s.clustering.is_none() {
        value["flags"] = json!(["undefined"]);
    }
    to_json(&value)
}

fn stats(a: &StatsArgs) -> Out {
    let s = match &a.input {
        Some(path) => {
            let text = if path.as_os_str() == "-" {
                let mut t = String::new();
                std::io::stdin()
                    .read_to_string(&mut t)
                    .map_err(|e| CliError::Runtime(format!("reading standard input: {e}")))?;
                t
            } else {
                fs::read_to_string(path).map_err(|e| CliError::io(path, e))?
            };
            let parsed = process::parse_edge_list(&text)?;
            let s = compute_stats(&parsed.graph);
            match parsed.header {
                Some(h) => s.with_provenance(h.beta, h.seed),
                None => s,
            }
        }
        None => {
            let n = a.n.expect("clap requires --n without input");
            let params = ModelParams::new(n, a.m, a.beta)?;
            compute_stats(&process::generate(&params, a.seed)?).with_provenance(a.beta, a.seed)
        }
    };
    match a.format {
        Format::Json => stats_json(&s),
        Format::Csv => Ok(csv(GraphStats::CSV_HEADER, [s.csv_row()])),
    }
}

#[derive(Serialize)]
struct Exact {
    numerator: String,
    denominator: String,
    decimal: f64,
}

fn exact_value(r: &BigRational) -> Exact {
    Exact {
        numerator: r.numer().to_string(),
        denominator: r.denom().to_string(),
        decimal: Scalar::to_f64(r),
    }
}

fn exact_query(a: &ExactArgs) -> Out {
    let beta = parse_rational(&a.beta)?;
    let beta_f = Scalar::to_f64(&beta);
    if beta <= BigRational::from_u64(0) {
        return Err(CliError::Usage(format!("beta must satisfy beta > 0, got {}", a.beta)));
    }
    if let Some(spec) = &a.forest {
        let forest: PossibleForest = spec.parse()?;
        let t = a.t.expect("clap requires --t with --forest");
        let p = exact::exact_subgraph_probability(&forest, t, &beta, a.cap)?;
        let lemma = theory::lemma1_probability_exact(&forest, t, &beta)?;
        let lemma_log = theory::lemma1_probability(&forest, t, beta_f)?;
        to_json(&json!({
            "forest": forest.to_string(),
            "t": t,
            "beta": a.beta,
            "cap": a.cap,
            "probability": exact_value(&p),
            "lemma1": exact_value(&lemma),
            "lemma1_log_space": lemma_log,
            "agree": p == lemma,
        }))
    } else {
        let name = a.statistic.as_deref().expect("clap requires --statistic without --forest");
        let statistic: Statistic = name.parse()?;
        let n = a.n.expect("clap requires --n with --statistic");
        let e = exact::exact_expectation(n, a.m, &beta, statistic, a.cap)?;
        to_json(&json!({
            "statistic": statistic,
            "n": n,
            "m": a.m,
            "beta": a.beta,
            "cap": a.cap,
            "expectation": exact_value(&e.value),
            "prob_undefined": exact_value(&e.prob_undefined),
        }))
    }
}

#[derive(Serialize)]
struct Prediction {
    n: usize,
    m: usize,
    beta: f64,
    c1: f64,
    c2: f64,
    predicted_triangles: f64,
    predicted_pairs: f64,
    predicted_clustering: f64,
}

fn predict(a: &PredictArgs) -> Out {
    ModelParams::new(a.n, a.m, a.beta)?;
    let c = theory::constants(a.m, a.beta)?;
    let p = Prediction {
        n: a.n,
        m: a.m,
        beta: a.beta,
        c1: c.c1,
        c2: c.c2,
        predicted_triangles: theory::predicted_triangles(a.n, a.m, a.beta)?,
        predicted_pairs: theory::predicted_adjacent_pairs(a.n, a.m, a.beta)?,
        predicted_clustering: theory::predicted_clustering(a.n, a.m, a.beta)?,
    };
    match a.format {
        Format::Json => to_json(&p),
        Format::Csv => Ok(csv(
            "n,m,beta,c1,c2,predicted_triangles,predicted_pairs,predicted_clustering",
            [format!(
                "{},{},{},{},{},{},{},{}",
                p.n, p.m, p.beta, p.c1, p.c2, p.predicted_triangles, p.predicted_pairs,
                p.predicted_clustering
            )],
        )),
    }
}

fn ensemble(a: &EnsembleArgs) -> Out {
    let params = ModelParams::new(a.n, a.m, a.beta)?;
    let r = montecarlo::run_ensemble(&params, a.run.reps, a.run.seed, a.epsilon)?;
    match a.run.format {
        Format::Json => to_json(&r),
        Format::Csv => Ok(csv(EnsembleReport::CSV_HEADER, r.csv_rows())),
    }
}

const SWEEP_HEADER: &str = "n,m,beta,replicates,master_seed,mean_triangles,ci_triangles,\
mean_adjacent_pairs,ci_adjacent_pairs,mean_degenerate_pairs,ci_degenerate_pairs,\
mean_clustering,ci_clustering,clustering_undefined,mean_max_degree,tail_band,tail_exceed_count";

fn sweep_row(r: &EnsembleReport) -> String {
    let p = &r.params;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        p.n,
        p.m,
        p.beta,
        r.replicates,
        r.master_seed,
        r.triangles.mean,
        r.triangles.ci_half_width,
        r.adjacent_pairs.mean,
        r.adjacent_pairs.ci_half_width,
        r.degenerate_pairs.mean,
        r.degenerate_pairs.ci_half_width,
        r.clustering.mean,
        r.clustering.ci_half_width,
        r.clustering_undefined,
        r.max_degree.mean,
        r.tail_band,
        r.tail_exceed_count
    )
}

fn sweep(a: &SweepArgs, plot: bool) -> Out {
    let mut reports = Vec::new();
    for &beta in &a.beta {
        for &m in &a.m {
            for &n in &a.n {
                let params = ModelParams::new(n, m, beta)?;
                reports.push(montecarlo::run_ensemble(&params, a.run.reps, a.run.seed, a.epsilon)?);
            }
        }
    }
    if plot {
        // mean clustering against n
        return Ok(plot_data(reports.iter().map(|r| {
            (r.params.n as f64, r.clustering.mean, r.clustering.ci_half_width)
        })));
    }
    match a.run.format {
        Format::Json => to_json(&reports),
        Format::Csv => Ok(csv(SWEEP_HEADER, reports.iter().map(sweep_row))),
    }
}

fn slope(a: &SlopeArgs, plot: bool) -> Out {
    let fit = montecarlo::fit_triangle_slope(a.m, a.beta, &a.grid, a.run.reps, a.run.seed, a.weighted)?;
    if plot {
        return Ok(plot_data(
            fit.grid
                .iter()
                .zip(fit.means.iter().zip(&fit.std_errors))
                .map(|(&n, (&y, &se))| ((n as f64).ln(), y, 1.96 * se)),
        ));
    }
    match a.run.format {
        Format::Json => to_json(&fit),
        Format::Csv => Ok(csv(
            "n,ln_n,mean_triangles,std_error,slope,intercept,slope_stderr,c1,ratio",
            fit.grid.iter().enumerate().map(|(i, &n)| {
                format!(
                    "{},{},{},{},{},{},{},{},{}",
                    n,
                    (n as f64).ln(),
                    fit.means[i],
                    fit.std_errors[i],
                    fit.slope,
                    fit.intercept,
                    fit.slope_stderr,
                    fit.c1,
                    fit.ratio
                )
            }),
        )),
    }
}

fn concentration(a: &ConcentrationArgs) -> Out {
    let params = ModelParams::new(a.n, a.m, a.beta)?;
    let c = montecarlo::concentration_experiment(&params, a.run.reps, a.run.seed, a.epsilon)?;
    match a.run.format {
        Format::Json => to_json(&c),
        Format::Csv => Ok(csv(
            "n,m,beta,replicates,master_seed,epsilon,band,mean_pairs,sd_pairs,band_over_sd,exceedances,frequency",
            [format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                a.n, a.m, a.beta, c.replicates, c.master_seed, c.epsilon, c.band, c.mean_pairs,
                c.sd_pairs, c.band_over_sd, c.exceedances, c.frequency
            )],
        )),
    }
}

fn blocks(a: &BlocksArgs) -> Out {
    let &[first, second] = a.owners.as_slice() else {
        return Err(CliError::Usage("--owners takes exactly two vertices, e.g. 3,7".into()));
    };
    let n = a.horizon.div_ceil(a.m.max(1)).max(1);
    let params = ModelParams::new(n, a.m, a.beta)?;
    let owners = (first, second);
    let r = montecarlo::block_correlation_experiment(&params, owners, a.anchor, a.horizon, a.run.reps, a.run.seed)?;
    match a.run.format {
        Format::Json => to_json(&r),
        Format::Csv => Ok(csv(
            "owner_a,owner_b,anchor,horizon,replicates,master_seed,mean_a,ci_a,mean_b,ci_b,theory_mean,z_a,z_b,covariance,covariance_ci",
            [format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                owners.0, owners.1, a.anchor, a.horizon, r.replicates, r.master_seed, r.first.mean,
                r.first.ci_half_width, r.second.mean, r.second.ci_half_width, r.theory_mean,
                r.z_first, r.z_second, r.covariance, r.covariance_ci_half_width
            )],
        )),
    }
}
