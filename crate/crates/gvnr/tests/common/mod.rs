//! Shared fixtures for integration tests.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::Rng;

use gvnr::rng::stream_rng;
use gvnr::{Bow, Dataset};

pub fn cora_paths() -> (PathBuf, PathBuf) {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/cora");
    (root.join("cora.content"), root.join("cora.cites"))
}

pub fn load_cora() -> (Dataset, gvnr::LoadReport) {
    let (content, cites) = cora_paths();
    let content = BufReader::new(File::open(&content).unwrap_or_else(|e| {
        panic!("Cora dataset missing at {}: {e}", content.display())
    }));
    let cites = BufReader::new(File::open(&cites).unwrap());
    gvnr::load_cora_format(content, cites).expect("Cora must load")
}

/// Seeded two-block planted-partition graph: dense within blocks, sparse
/// across. Labels are block ids; every node gets a one-word bag so the
/// dataset validates.
pub fn planted_partition(
    nodes_per_block: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Dataset {
    let n = 2 * nodes_per_block;
    let mut rng = stream_rng(seed, 0x5b, 0);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let same = (i < nodes_per_block) == (j < nodes_per_block);
            let p = if same { p_in } else { p_out };
            if rng.random_bool(p) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
    }
    let bows: Vec<Bow> = (0..n).map(|i| vec![((i % 2) as u32, 1.0)]).collect();
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= nodes_per_block)).collect();
    Dataset::from_parts(
        (0..n).map(|i| format!("v{i}")).collect(),
        adjacency,
        bows,
        labels,
        vec!["block0".into(), "block1".into()],
        2,
    )
    .expect("planted partition must validate")
}
