//! Text formats for edge lists and outcome logs.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};

use super::merge::MergedMultigraph;
use super::tree::{Outcome, OutcomeKind};

/// Provenance line `# mori n=<n> m=<m> beta=<beta> seed=<seed>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeListHeader {
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    pub seed: u64,
}

impl EdgeListHeader {
    pub fn render(&self) -> String {
        format!(
            "# mori n={} m={} beta={} seed={}",
            self.n, self.m, self.beta, self.seed
        )
    }

    fn parse(line: &str, line_no: usize) -> Result<Self> {
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut tokens = line.trim_start_matches('#').split_whitespace();
        if tokens.next() != Some("mori") {
            return Err(err("header must start with '# mori'".into()));
        }
        let (mut n, mut m, mut beta, mut seed) = (None, None, None, None);
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got '{tok}'")))?;
            let bad = || err(format!("bad value for {key}: '{value}'"));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "m" => m = Some(value.parse::<usize>().map_err(|_| bad())?),
                "beta" => beta = Some(value.parse::<f64>().map_err(|_| bad())?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad())?),
                _ => return Err(err(format!("unknown header key '{key}'"))),
            }
        }
        match (n, m, beta, seed) {
            (Some(n), Some(m), Some(beta), Some(seed)) => Ok(Self { n, m, beta, seed }),
            _ => Err(err("header needs n, m, beta and seed".into())),
        }
    }
}

pub fn render_edge_list(graph: &MergedMultigraph, header: Option<&EdgeListHeader>) -> String {
    let mut out = String::with_capacity(16 * graph.edge_count() + 64);
    if let Some(h) = header {
        out.push_str(&h.render());
        out.push('\n');
    }
    for (tail, head) in graph.edges() {
        writeln!(out, "{tail} {head}").unwrap();
    }
    out
}

pub fn write_edge_list<W: Write>(
    w: &mut W,
    graph: &MergedMultigraph,
    header: Option<&EdgeListHeader>,
) -> io::Result<()> {
    w.write_all(render_edge_list(graph, header).as_bytes())
}

#[derive(Debug, Clone)]
pub struct ParsedEdgeList {
    pub header: Option<EdgeListHeader>,
    pub graph: MergedMultigraph,
}

/// Parses an edge list. The header is optional; without one the vertex count
/// is the largest index seen. Blank lines and other `#` comments are skipped.
pub fn parse_edge_list(text: &str) -> Result<ParsedEdgeList> {
    let mut header = None;
    let mut edges = Vec::new();
    let mut max_vertex = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if line.trim_start_matches('#').trim_start().starts_with("mori") {
                if header.is_some() || !edges.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "header must come first and appear once".into(),
                    });
                }
                header = Some(EdgeListHeader::parse(line, line_no)?);
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let mut vertex = || -> Result<usize> {
            let tok = it.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two vertex indices".into(),
            })?;
            match tok.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(Error::Parse {
                    line: line_no,
                    message: format!("invalid vertex index '{tok}' (1-based)"),
                }),
            }
        };
        let (a, b) = (vertex()?, vertex()?);
        if it.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "trailing tokens after edge".into(),
            });
        }
        if let Some(h) = &header {
            if a > h.n || b > h.n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("vertex index exceeds header n={}", h.n),
                });
            }
        }
        max_vertex = max_vertex.max(a).max(b);
        edges.push((a, b));
    }
    let n = header.map_or(max_vertex, |h| h.n);
    let graph = MergedMultigraph::from_edges(n, header.map(|h| h.m), &edges)?;
    Ok(ParsedEdgeList { header, graph })
}

/// One `t kind i` line per step.
pub fn render_outcome_log(outcomes: &[Outcome]) -> String {
    let mut out = String::with_capacity(16 * outcomes.len());
    for o in outcomes {
        writeln!(out, "{o}").unwrap();
    }
    out
}

pub fn parse_outcome_log(text: &str) -> Result<Vec<Outcome>> {
    let mut outcomes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: idx + 1,
            message: message.to_string(),
        };
        let parts: Vec<_> = line.split_whitespace().collect();
        let [step, kind, i] = parts[..] else {
            return Err(err("expected 't kind i'"));
        };
        let step: usize = step.parse().map_err(|_| err("bad step"))?;
        let i: usize = i.parse().map_err(|_| err("bad index"))?;
        let kind = match kind {
            "uniform" => OutcomeKind::Uniform(i),
            "head" => OutcomeKind::CopyHead(i),
            "tail" => OutcomeKind::CopyTail(i),
            _ => return Err(err("kind must be uniform, head or tail")),
        };
        outcomes.push(Outcome { kind, step });
    }
    Ok(outcomes)
}
