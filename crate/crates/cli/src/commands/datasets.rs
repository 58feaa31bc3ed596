use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use mapi::pagerank::load_snap_edgelist;

/// Known peer-to-peer snapshots used by the ranking experiments.
const KNOWN: [(&str, usize, usize); 2] = [
    ("p2p-Gnutella08", 6301, 20777),
    ("p2p-Gnutella09", 8114, 26013),
];

pub fn run(verify: Option<&Path>) -> Result<ExitCode> {
    if let Some(path) = verify {
        let g = load_snap_edgelist(path)
            .with_context(|| format!("loading {}", path.display()))?;
        println!(
            "{}: {} nodes, {} edges, {} dangling",
            path.display(),
            g.n_nodes(),
            g.edge_count(),
            g.dangling_nodes().len()
        );
        let stem = path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
        if let Some((name, nodes, edges)) = KNOWN.iter().find(|(n, _, _)| stem.contains(n)) {
            if g.n_nodes() == *nodes && g.edge_count() == *edges {
                println!("counts match the published {name} snapshot");
            } else {
                eprintln!(
                    "counts do NOT match {name} (expected {nodes} nodes / {edges} edges)"
                );
                return Ok(ExitCode::from(1));
            }
        }
        return Ok(ExitCode::SUCCESS);
    }

    println!("The ranking experiments use the SNAP Gnutella peer-to-peer snapshots:");
    for (name, nodes, edges) in KNOWN {
        println!("  {name}: {nodes} nodes, {edges} edges");
        println!("    https://snap.stanford.edu/data/{name}.txt.gz");
    }
    println!();
    println!("Fetch and unpack, e.g.:");
    println!("  mkdir -p data && cd data");
    println!("  curl -LO https://snap.stanford.edu/data/p2p-Gnutella08.txt.gz");
    println!("  gunzip p2p-Gnutella08.txt.gz");
    println!();
    println!("Then verify with: mapi datasets --verify data/p2p-Gnutella08.txt");
    println!("Tests look for the files under data/ or $MAPI_DATA_DIR.");
    Ok(ExitCode::SUCCESS)
}
