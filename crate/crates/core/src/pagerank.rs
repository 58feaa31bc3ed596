//! Graph ingestion, Google-matrix products, and PageRank by regular or
//! multiplication-avoiding power iteration.
//!
//! The Google matrix G = alpha H + (1-alpha)/N * ones is never
//! materialized. H is column-stochastic over the out-links (entry (i,j) =
//! 1/outdeg(j) for an edge j -> i); columns of dangling nodes are repaired
//! to uniform 1/N. The MAVP product against G exploits that each row is a
//! constant teleport background plus sparse link entries: one sort of the
//! iterate gives sum_j min(c, w_j) by prefix sums, and each row then only
//! corrects its own in-edges, for O(N log N + E) per product instead of
//! O(N^2).

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::ops::OpCounter;
use crate::rng::seeded_rng;
use crate::trace::{IterationRecord, IterationTrace};

/// Directed graph in compressed sparse row form, with the external node
/// ids preserved.
#[derive(Debug, Clone)]
pub struct CsrGraph {
    n_nodes: usize,
    edge_count: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    /// dense index -> external id, ascending
    ext_ids: Vec<u64>,
    dangling: Vec<u32>,
}

impl CsrGraph {
    /// Build from an edge list of external ids. Duplicate edges collapse;
    /// self-loops are kept.
    pub fn from_edges(raw_edges: &[(u64, u64)]) -> Result<Self> {
        if raw_edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut ext_ids: Vec<u64> = raw_edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect();
        ext_ids.sort_unstable();
        ext_ids.dedup();
        let n = ext_ids.len();
        let dense = |ext: u64| -> u32 {
            ext_ids.binary_search(&ext).expect("endpoint collected above") as u32
        };

        let mut edges: Vec<(u32, u32)> = raw_edges
            .iter()
            .map(|&(a, b)| (dense(a), dense(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let edge_count = edges.len();

        let mut out_offsets = vec![0usize; n + 1];
        for &(s, _) in &edges {
            out_offsets[s as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let out_targets: Vec<u32> = edges.iter().map(|&(_, t)| t).collect();

        let mut in_offsets = vec![0usize; n + 1];
        for &(_, t) in &edges {
            in_offsets[t as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; edge_count];
        for &(s, t) in &edges {
            in_sources[cursor[t as usize]] = s;
            cursor[t as usize] += 1;
        }

        let dangling: Vec<u32> = (0..n)
            .filter(|&i| out_offsets[i] == out_offsets[i + 1])
            .map(|i| i as u32)
            .collect();

        Ok(CsrGraph {
            n_nodes: n,
            edge_count,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            ext_ids,
            dangling,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_offsets[node + 1] - self.out_offsets[node]
    }

    pub fn out_neighbors(&self, node: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    pub fn in_sources(&self, node: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    pub fn dangling_nodes(&self) -> &[u32] {
        &self.dangling
    }

    pub fn external_id(&self, dense: usize) -> u64 {
        self.ext_ids[dense]
    }

    pub fn dense_index(&self, external: u64) -> Option<usize> {
        self.ext_ids.binary_search(&external).ok()
    }
}

/// Parse the SNAP edge-list text format: '#' comment lines, then
/// whitespace-separated "FromNodeId ToNodeId" pairs.
pub fn parse_snap_edgelist(text: &str) -> Result<CsrGraph> {
    let mut edges = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let mut fields = line.split_whitespace();
        let parse = |field: Option<&str>, lineno: usize| -> Result<u64> {
            field
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: "expected two node ids".into(),
                })?
                .parse()
                .map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("invalid node id: {e}"),
                })
        };
        let from = parse(fields.next(), lineno)?;
        let to = parse(fields.next(), lineno)?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "more than two fields".into(),
            });
        }
        edges.push((from, to));
    }
    CsrGraph::from_edges(&edges)
}

pub fn load_snap_edgelist(path: &Path) -> Result<CsrGraph> {
    parse_snap_edgelist(&std::fs::read_to_string(path)?)
}

/// Iteration scheme for [`pagerank`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PageRankMethod {
    Rpi,
    MapiMin1,
    MapiMin2,
}

impl PageRankMethod {
    pub fn name(self) -> &'static str {
        match self {
            PageRankMethod::Rpi => "rpi",
            PageRankMethod::MapiMin1 => "mapi-min1",
            PageRankMethod::MapiMin2 => "mapi-min2",
        }
    }

    pub fn is_mavp(self) -> bool {
        !matches!(self, PageRankMethod::Rpi)
    }
}

impl std::fmt::Display for PageRankMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PageRankMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rpi" => Ok(PageRankMethod::Rpi),
            "mapi-min1" => Ok(PageRankMethod::MapiMin1),
            "mapi-min2" => Ok(PageRankMethod::MapiMin2),
            other => Err(Error::InvalidOperator {
                expected: "rpi|mapi-min1|mapi-min2".into(),
                found: other.into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PageRankConfig {
    /// Damping factor in (0,1).
    pub alpha: f64,
    pub iterations: usize,
    pub method: PageRankMethod,
    pub seed: u64,
    /// Relative jitter applied to the uniform start (0 keeps it exact).
    pub init_jitter: f64,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            alpha: 0.85,
            iterations: 10,
            method: PageRankMethod::MapiMin1,
            seed: 0,
            init_jitter: 0.0,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "damping factor must lie in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

/// One product G (*) w without materializing G.
///
/// For `Rpi` the product is the ordinary matrix-vector product. For the
/// MAVP methods `w` must be entrywise non-negative; every entry of G is
/// positive, so min1 and min2 coincide there.
pub fn google_matvec(
    g: &CsrGraph,
    alpha: f64,
    w: &Vector,
    method: PageRankMethod,
    counter: &mut OpCounter,
) -> Result<Vector> {
    check_alpha(alpha)?;
    let n = g.n_nodes;
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: w.len(),
        });
    }
    match method {
        PageRankMethod::Rpi => Ok(google_matvec_regular(g, alpha, w, counter)),
        PageRankMethod::MapiMin1 | PageRankMethod::MapiMin2 => {
            if let Some((i, &v)) = w.iter().enumerate().find(|(_, &v)| v < 0.0) {
                return Err(Error::NegativeEntry { value: v, index: i });
            }
            Ok(google_matvec_mavp(g, alpha, w, counter))
        }
    }
}

fn google_matvec_regular(g: &CsrGraph, alpha: f64, w: &Vector, counter: &mut OpCounter) -> Vector {
    let n = g.n_nodes;
    let ws = w.as_slice();
    let total: f64 = ws.iter().sum();
    let dang_mass: f64 = g.dangling.iter().map(|&j| ws[j as usize]).sum();
    counter.charge_additions(n + g.dangling.len());

    // per-source push gain, divisions only for linked sources
    let gains: Vec<f64> = (0..n)
        .map(|j| {
            let d = g.out_degree(j);
            if d == 0 {
                0.0
            } else {
                ws[j] / d as f64
            }
        })
        .collect();
    counter.charge_divisions(n - g.dangling.len());

    let teleport = alpha * dang_mass / n as f64 + (1.0 - alpha) * total / n as f64;
    counter.charge_multiplications(2);
    counter.charge_divisions(2);
    counter.charge_additions(2);

    counter.charge_multiplications(n);
    counter.charge_additions(g.edge_count + n);
    let out: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for &j in g.in_sources(i) {
                acc += gains[j as usize];
            }
            alpha * acc + teleport
        })
        .collect();
    Vector::new(out).expect("finite by construction")
}

fn google_matvec_mavp(g: &CsrGraph, alpha: f64, w: &Vector, counter: &mut OpCounter) -> Vector {
    let n = g.n_nodes;
    let ws = w.as_slice();
    let c = (1.0 - alpha) / n as f64;
    let g_dang = alpha / n as f64 + c;

    // sorted copy of w plus prefix sums: S(t) = sum_j min(t, w_j)
    let mut sorted = ws.to_vec();
    let mut sort_cmps = 0u64;
    sorted.sort_unstable_by(|a, b| {
        sort_cmps += 1;
        a.partial_cmp(b).expect("finite iterate")
    });
    counter.charge_comparisons(sort_cmps as usize);
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for &v in &sorted {
        acc += v;
        prefix.push(acc);
    }
    counter.charge_additions(n);

    let mut search_cmps = 0u64;
    let background_sum = |threshold: f64, cmps: &mut u64| -> f64 {
        let k = sorted.partition_point(|&v| {
            *cmps += 1;
            v < threshold
        });
        prefix[k] + threshold * (n - k) as f64
    };
    let s_c = background_sum(c, &mut search_cmps);
    counter.charge_multiplications(1);
    counter.charge_additions(1);

    // per-source min against the background and the dangling column value
    let min_c: Vec<f64> = ws.iter().map(|&v| v.min(c)).collect();
    counter.charge_comparisons(n);
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for &j in &g.dangling {
        let v = ws[j as usize];
        d0 += min_c[j as usize];
        d1 += v.min(g_dang);
    }
    counter.charge_comparisons(g.dangling.len());
    counter.charge_additions(2 * g.dangling.len());
    counter.charge_comparisons(search_cmps as usize);
    let base = s_c - d0 + d1;
    counter.charge_additions(2);

    // per-source link entry value alpha/outdeg + c
    let gvals: Vec<f64> = (0..n)
        .map(|j| {
            let d = g.out_degree(j);
            if d == 0 {
                g_dang
            } else {
                alpha / d as f64 + c
            }
        })
        .collect();
    counter.charge_divisions(n - g.dangling.len());
    counter.charge_additions(n - g.dangling.len());

    counter.charge_comparisons(g.edge_count);
    counter.charge_additions(2 * g.edge_count + n);
    let out: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = base;
            for &j in g.in_sources(i) {
                let j = j as usize;
                acc += ws[j].min(gvals[j]) - min_c[j];
            }
            acc
        })
        .collect();
    Vector::new(out).expect("finite by construction")
}

/// PageRank run output.
#[derive(Debug, Clone)]
pub struct PageRankRun {
    /// Final scores, l2-normalized once after the last iteration.
    pub scores: Vector,
    pub trace: IterationTrace,
}

/// Run `cfg.iterations` of PageRank power iteration from a positive
/// uniform start. RPI normalizes iterates by l2 norm, MAPI by l1 norm;
/// both apply one final l2 normalization for comparability.
pub fn pagerank(g: &CsrGraph, cfg: &PageRankConfig) -> Result<PageRankRun> {
    check_alpha(cfg.alpha)?;
    let n = g.n_nodes;
    let mut w: Vec<f64> = vec![1.0 / n as f64; n];
    if cfg.init_jitter > 0.0 {
        let mut rng = seeded_rng(cfg.seed);
        for v in &mut w {
            *v *= 1.0 + rand::Rng::random_range(&mut rng, 0.0..cfg.init_jitter);
        }
    }
    match cfg.method {
        PageRankMethod::Rpi => {
            let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut w {
                *v /= norm;
            }
        }
        _ => {
            let norm: f64 = w.iter().map(|v| v.abs()).sum();
            for v in &mut w {
                *v /= norm;
            }
        }
    }

    let mut w = Vector::new(w)?;
    let mut trace = IterationTrace::new();
    for t in 1..=cfg.iterations {
        let mut ops = OpCounter::new();
        let y = google_matvec(g, cfg.alpha, &w, cfg.method, &mut ops)?;
        let norm = match cfg.method {
            PageRankMethod::Rpi => {
                ops.charge_l2_norm(n);
                y.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            _ => {
                ops.charge_l1_norm(n);
                y.iter().map(|v| v.abs()).sum()
            }
        };
        if norm == 0.0 {
            return Err(Error::DegenerateIterate { iteration: t });
        }
        ops.charge_divisions(n);
        let next = Vector::new(y.iter().map(|v| v / norm).collect())?;
        let mut delta_l1 = 0.0;
        let mut delta_l2 = 0.0;
        for (a, b) in next.iter().zip(w.iter()) {
            let d = a - b;
            delta_l1 += d.abs();
            delta_l2 += d * d;
        }
        trace.push(IterationRecord {
            iteration: t,
            delta_l1,
            delta_l2: delta_l2.sqrt(),
            alignment_error: None,
            ops,
            batch_ops: None,
        });
        w = next;
    }

    let l2: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if l2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let scores = Vector::new(w.iter().map(|v| v / l2).collect())?;
    Ok(PageRankRun { scores, trace })
}

/// Size of the intersection of the first `k` entries of two rankings.
pub fn topk_overlap(a: &[usize], b: &[usize], k: usize) -> usize {
    assert!(k <= a.len() && k <= b.len(), "k exceeds ranking length");
    let front: std::collections::HashSet<usize> = a[..k].iter().copied().collect();
    b[..k].iter().filter(|i| front.contains(i)).count()
}
