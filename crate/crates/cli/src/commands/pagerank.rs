use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use mapi::pagerank::{load_snap_edgelist, pagerank, topk_overlap, PageRankConfig, PageRankMethod};
use mapi::stochastic::rank_order;
use serde::Serialize;

use crate::manifest::RunManifest;

pub struct Args {
    pub graph: PathBuf,
    pub alpha: f64,
    pub iters: usize,
    pub method: String,
    pub topk: usize,
    pub compare: bool,
    pub seed: u64,
    pub jitter: f64,
}

#[derive(Serialize)]
struct RankedNode {
    node: u64,
    score: f64,
}

#[derive(Serialize)]
struct MethodReport {
    method: PageRankMethod,
    top: Vec<RankedNode>,
    initial_delta_l1: f64,
    final_delta_l1: f64,
}

#[derive(Serialize)]
struct PageRankReport {
    manifest: RunManifest,
    graph: String,
    n_nodes: usize,
    n_edges: usize,
    n_dangling: usize,
    runs: Vec<MethodReport>,
    /// Top-k intersection size between the two methods, with --compare.
    topk_overlap: Option<usize>,
}

pub fn run(out: &Path, threads: usize, args: Args) -> Result<ExitCode> {
    let method: PageRankMethod = args.method.parse()?;
    let g = load_snap_edgelist(&args.graph)
        .with_context(|| format!("loading graph {}", args.graph.display()))?;
    println!(
        "graph {}: {} nodes, {} edges, {} dangling",
        args.graph.display(),
        g.n_nodes(),
        g.edge_count(),
        g.dangling_nodes().len()
    );

    let methods: Vec<PageRankMethod> = if args.compare {
        vec![PageRankMethod::Rpi, PageRankMethod::MapiMin1]
    } else {
        vec![method]
    };

    super::ensure_dir(out)?;
    let mut runs = Vec::new();
    let mut rankings = Vec::new();
    for m in &methods {
        let cfg = PageRankConfig {
            alpha: args.alpha,
            iterations: args.iters,
            method: *m,
            seed: args.seed,
            init_jitter: args.jitter,
        };
        let run = pagerank(&g, &cfg)?;
        let mut csv = BufWriter::new(File::create(out.join(format!("trace_{m}.csv")))?);
        run.trace.write_csv(&mut csv)?;

        let order = rank_order(&run.scores);
        let k = args.topk.min(order.len());
        let top: Vec<RankedNode> = order[..k]
            .iter()
            .map(|&i| RankedNode {
                node: g.external_id(i),
                score: run.scores[i],
            })
            .collect();
        println!(
            "{m}: top-{k} nodes {:?}",
            top.iter().map(|r| r.node).collect::<Vec<_>>()
        );
        runs.push(MethodReport {
            method: *m,
            top,
            initial_delta_l1: run.trace.records.first().map(|r| r.delta_l1).unwrap_or(0.0),
            final_delta_l1: run.trace.records.last().map(|r| r.delta_l1).unwrap_or(0.0),
        });
        rankings.push(order);
    }

    let overlap = if args.compare {
        let k = args.topk.min(rankings[0].len()).min(rankings[1].len());
        let o = topk_overlap(&rankings[0], &rankings[1], k);
        println!("top-{k} overlap between {} and {}: {o}", methods[0], methods[1]);
        Some(o)
    } else {
        None
    };

    let mut manifest = RunManifest::new(
        "pagerank",
        args.seed,
        threads,
        serde_json::json!({
            "graph": args.graph,
            "alpha": args.alpha,
            "iters": args.iters,
            "method": method,
            "topk": args.topk,
            "compare": args.compare,
            "seed": args.seed,
            "jitter": args.jitter,
        }),
    )?;
    manifest.add_input(&args.graph)?;
    super::write_json(
        &out.join("pagerank_report.json"),
        &PageRankReport {
            manifest,
            graph: args.graph.display().to_string(),
            n_nodes: g.n_nodes(),
            n_edges: g.edge_count(),
            n_dangling: g.dangling_nodes().len(),
            runs,
            topk_overlap: overlap,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}
