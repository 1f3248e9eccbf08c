//! Graph sources, vertex sets, time grids and number lists from the command line.

use std::path::PathBuf;

use clap::Args;
use dggkit::curvature::{CurvatureEvidence, CurvatureKind, Dimension, SearchOptions};
use dggkit::graph::{Family, MeasureMode};
use dggkit::{load_graph, generate, MeasuredGraph, Subset};

use crate::Failure;

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Graph document (JSON with "vertices" and "edges")
    #[arg(long, conflicts_with = "generate")]
    pub graph: Option<PathBuf>,
    /// Generator spec: path:N, star:K,N, lattice:DIM,R or tree:DEG,R
    #[arg(long)]
    pub generate: Option<String>,
    /// Replace vertex measures: unit or degree (generated graphs default to unit)
    #[arg(long = "m-mode")]
    pub m_mode: Option<MeasureMode>,
}

impl GraphArgs {
    pub fn load(&self) -> Result<MeasuredGraph, Failure> {
        let g = match (&self.graph, &self.generate) {
            (Some(path), None) => {
                let bytes = std::fs::read(path)
                    .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
                load_graph(&bytes)?
            }
            (None, Some(spec)) => generate(spec.parse::<Family>()?, self.m_mode.unwrap_or_default())?,
            _ => return Err(Failure::usage("give exactly one of --graph or --generate")),
        };
        Ok(match (&self.graph, self.m_mode) {
            (Some(_), Some(mode)) => g.with_measure_mode(mode),
            _ => g,
        })
    }
}

/// Search settings shared by every command that needs curvature evidence.
#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Dimension parameter n (a positive number or inf)
    #[arg(long, default_value = "2")]
    pub n: Dimension,
    /// Multistart restarts per vertex
    #[arg(long, default_value_t = SearchOptions::default().restarts)]
    pub restarts: usize,
    /// Ratio evaluations per restart
    #[arg(long, default_value_t = SearchOptions::default().budget)]
    pub budget: usize,
    /// Seed of the multistart search
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SearchArgs {
    pub fn options(&self) -> SearchOptions {
        SearchOptions { restarts: self.restarts, budget: self.budget, seed: self.seed }
    }
}

/// Evidence read from `--evidence`, or searched for on `vertices`.
#[derive(Args, Debug, Clone)]
pub struct EvidenceArgs {
    /// Curvature evidence written by the curvature command (searched afresh if absent)
    #[arg(long)]
    pub evidence: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

impl EvidenceArgs {
    pub fn obtain(&self, g: &MeasuredGraph, vertices: &Subset) -> Result<CurvatureEvidence, Failure> {
        match &self.evidence {
            Some(path) => {
                let bytes = std::fs::read(path)
                    .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_slice(&bytes)
                    .map_err(|e| Failure::usage(format!("{} is not curvature evidence: {e}", path.display())))
            }
            None => Ok(CurvatureEvidence::collect(g, vertices, self.search.n, CurvatureKind::Cde, &self.search.options())?),
        }
    }
}

/// A comma list of items: `all`, `ball:ID:R`, an integer id range `A-B`, or
/// a literal vertex id.
pub fn parse_set(g: &MeasuredGraph, spec: &str) -> Result<Subset, Failure> {
    let mut members = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "all" {
            members.extend(0..g.len());
        } else if let Some(rest) = item.strip_prefix("ball:") {
            let (id, r) = rest
                .rsplit_once(':')
                .ok_or_else(|| Failure::usage(format!("ball item must be ball:ID:R, got `{item}`")))?;
            let r: usize = r.parse().map_err(|_| Failure::usage(format!("bad ball radius in `{item}`")))?;
            members.extend(g.ball(g.index_of(id)?, r).iter());
        } else if let Some((a, b)) = integer_range(item) {
            if a > b {
                return Err(Failure::usage(format!("empty range `{item}`")));
            }
            for i in a..=b {
                members.push(g.index_of(&i.to_string())?);
            }
        } else {
            members.push(g.index_of(item)?);
        }
    }
    if members.is_empty() {
        return Err(Failure::usage(format!("vertex set `{spec}` is empty")));
    }
    members.sort_unstable();
    members.dedup();
    Ok(Subset::new(g, members)?)
}

fn integer_range(item: &str) -> Option<(u64, u64)> {
    let (a, b) = item.split_once('-')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// `start:stop:count` (linear) or `start:stop:countL` (logarithmic, both
/// endpoints positive), or a comma list of times. At least two strictly
/// increasing nonnegative times.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::usage(format!("time grid `{spec}`: {why}"));
    let grid = match spec.split(':').collect::<Vec<_>>().as_slice() {
        [a, b, n] => {
            let a: f64 = a.parse().map_err(|_| bad("start is not a number"))?;
            let b: f64 = b.parse().map_err(|_| bad("stop is not a number"))?;
            let (count, log) = match n.strip_suffix('L') {
                Some(c) => (c, true),
                None => (*n, false),
            };
            let count: usize = count.parse().map_err(|_| bad("count is not an integer"))?;
            if count < 2 {
                return Err(bad("need at least two points"));
            }
            let step = |i: usize| i as f64 / (count - 1) as f64;
            if log {
                if !(a > 0.0 && b > 0.0) {
                    return Err(bad("logarithmic grids need positive endpoints"));
                }
                let mut g: Vec<f64> = (0..count).map(|i| (a.ln() + (b.ln() - a.ln()) * step(i)).exp()).collect();
                (g[0], g[count - 1]) = (a, b);
                g
            } else {
                let k = (count - 1) as f64;
                (0..count).map(|i| (a * (k - i as f64) + b * i as f64) / k).collect::<Vec<f64>>()
            }
        }
        [list] => parse_list(list).map_err(|_| bad("expected start:stop:count or a comma list"))?,
        _ => return Err(bad("expected start:stop:count or a comma list")),
    };
    if grid.len() < 2 {
        return Err(bad("need at least two points"));
    }
    if grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(bad("times must be finite and nonnegative"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(bad("times must be strictly increasing"));
    }
    Ok(grid)
}

pub fn parse_list(spec: &str) -> Result<Vec<f64>, Failure> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::usage(format!("`{s}` is not a number"))))
        .collect()
}

pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>, Failure> {
    spec.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Failure::usage(format!("`{s}` is not a nonnegative integer"))))
        .collect()
}
