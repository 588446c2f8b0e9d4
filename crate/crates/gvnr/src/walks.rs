//! Truncated random walks over the document graph.
//!
//! Walks are the co-occurrence source: node sequences treated like sentences.
//! Each walk owns an RNG stream derived from `(seed, pass, start node)`, so
//! the output is identical whether walks are generated sequentially or in
//! parallel.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Lane index reserved for the per-pass start-order shuffle.
const SHUFFLE_LANE: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Walks started from every node, one per pass.
    pub walks_per_node: usize,
    /// Maximum walk length in nodes (walks truncate early at dead ends).
    pub walk_length: usize,
    /// Co-occurrence window: offsets 1..=window within a walk are counted.
    pub window: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 80,
            walk_length: 40,
            window: 5,
            seed: 42,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_node == 0 || self.walk_length == 0 || self.window == 0 {
            return Err(Error::Config("walk parameters must be positive".into()));
        }
        if self.window >= self.walk_length {
            return Err(Error::Config(format!(
                "window ({}) must be smaller than walk_length ({})",
                self.window, self.walk_length
            )));
        }
        Ok(())
    }
}

/// Generate `walks_per_node` truncated random walks from every node.
///
/// Start order is shuffled per pass; a walk reaching an isolated node stops
/// early. Output is reproducible from the seed alone.
pub fn generate_walks(d: &Dataset, cfg: &WalkConfig) -> Result<Vec<Vec<u32>>> {
    cfg.validate()?;
    let n = d.len();
    let mut starts: Vec<(u64, u32)> = Vec::with_capacity(cfg.walks_per_node * n);
    let mut order: Vec<u32> = (0..n as u32).collect();
    for pass in 0..cfg.walks_per_node as u64 {
        order.shuffle(&mut stream_rng(cfg.seed, pass, SHUFFLE_LANE));
        starts.extend(order.iter().map(|&v| (pass, v)));
    }
    let walks = starts
        .par_iter()
        .map(|&(pass, start)| {
            let mut rng = stream_rng(cfg.seed, pass, start as u64);
            let mut walk = Vec::with_capacity(cfg.walk_length);
            walk.push(start);
            let mut current = start as usize;
            for _ in 1..cfg.walk_length {
                let nb = d.neighbors(current);
                if nb.is_empty() {
                    break;
                }
                current = nb[rng.random_range(0..nb.len())];
                walk.push(current as u32);
            }
            walk
        })
        .collect();
    Ok(walks)
}

/// Node visit counts across a walk set; heavy-tailed on real networks.
pub fn visit_frequencies(walks: &[Vec<u32>], n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n];
    for walk in walks {
        for &v in walk {
            counts[v as usize] += 1;
        }
    }
    counts
}
