//! Citation-network datasets: a graph over documents, a bag-of-words per
//! document, and a class label per document.
//!
//! The on-disk format is the Cora/CiteSeer layout: a `.content` file with one
//! line per document (`<id> <m binary word flags> <class>`) and a `.cites`
//! file with one citation per line (`<cited_id> <citing_id>`). Fields may be
//! tab- or whitespace-separated.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse word-count vector: `(vocabulary index, count)` pairs sorted by
/// index, counts strictly positive.
pub type Bow = Vec<(u32, f64)>;

/// An immutable document network. Edges are undirected, deduplicated and
/// self-loop free; `adjacency[i]` is sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub node_ids: Vec<String>,
    pub adjacency: Vec<Vec<usize>>,
    pub bows: Vec<Bow>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub vocab_size: usize,
    pub num_classes: usize,
}

/// Counters from a load, emitted as a single JSON object on demand.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LoadReport {
    pub nodes: usize,
    pub vocab_size: usize,
    pub num_classes: usize,
    /// Undirected edges kept after symmetrization and deduplication.
    pub edges_kept: usize,
    pub cite_lines: usize,
    pub dropped_unknown_id: usize,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
    pub isolated_nodes: usize,
    pub empty_bow_nodes: usize,
}

/// Parse a Cora-format content + cites pair into a [`Dataset`].
///
/// Node ids are mapped to dense indices in first-appearance order of the
/// content file, class names likewise. Citation direction is discarded
/// (edges are symmetrized); cites lines referencing unknown ids are dropped
/// and counted in the report.
pub fn load_cora_format<C: BufRead, E: BufRead>(
    content: C,
    cites: E,
) -> Result<(Dataset, LoadReport)> {
    let mut node_ids: Vec<String> = Vec::new();
    let mut id_to_index: HashMap<String, usize> = HashMap::new();
    let mut bows: Vec<Bow> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut class_to_index: HashMap<String, usize> = HashMap::new();
    let mut vocab_size: Option<usize> = None;

    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 3 {
            return Err(Error::parse(
                lineno,
                format!("content line has {} fields, need at least 3", fields.len()),
            ));
        }
        let m = match vocab_size {
            Some(m) => {
                if fields.len() != m + 2 {
                    return Err(Error::parse(
                        lineno,
                        format!("content line has {} fields, expected {}", fields.len(), m + 2),
                    ));
                }
                m
            }
            None => {
                let m = fields.len() - 2;
                vocab_size = Some(m);
                m
            }
        };
        let id = fields[0].to_string();
        if id_to_index.contains_key(&id) {
            return Err(Error::parse(lineno, format!("duplicate node id {id:?}")));
        }
        let mut bow: Bow = Vec::new();
        for (w, flag) in fields[1..=m].iter().enumerate() {
            match *flag {
                "0" => {}
                "1" => bow.push((w as u32, 1.0)),
                other => {
                    return Err(Error::parse(
                        lineno,
                        format!("non-binary word flag {other:?} in column {}", w + 2),
                    ))
                }
            }
        }
        let class = fields[m + 1];
        let label = *class_to_index.entry(class.to_string()).or_insert_with(|| {
            class_names.push(class.to_string());
            class_names.len() - 1
        });
        id_to_index.insert(id.clone(), node_ids.len());
        node_ids.push(id);
        bows.push(bow);
        labels.push(label);
    }

    if node_ids.is_empty() {
        return Err(Error::InvalidInput("empty content file".into()));
    }
    let vocab_size = vocab_size.unwrap();
    let n = node_ids.len();

    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let mut cite_lines = 0usize;
    let mut dropped_unknown = 0usize;
    let mut dropped_self = 0usize;
    let mut dropped_dup = 0usize;
    for (lineno, line) in cites.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        cite_lines += 1;
        if fields.len() != 2 {
            return Err(Error::parse(
                lineno,
                format!("cites line has {} fields, expected 2", fields.len()),
            ));
        }
        let (a, b) = match (id_to_index.get(fields[0]), id_to_index.get(fields[1])) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                dropped_unknown += 1;
                continue;
            }
        };
        if a == b {
            dropped_self += 1;
            continue;
        }
        let key = (a.min(b), a.max(b));
        if !edges.insert(key) {
            dropped_dup += 1;
        }
    }

    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in &edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
    }

    let dataset = Dataset {
        node_ids,
        adjacency,
        bows,
        labels,
        class_names,
        vocab_size,
        num_classes: class_to_index.len(),
    };
    dataset.validate()?;

    let report = LoadReport {
        nodes: n,
        vocab_size,
        num_classes: dataset.num_classes,
        edges_kept: edges.len(),
        cite_lines,
        dropped_unknown_id: dropped_unknown,
        dropped_self_loops: dropped_self,
        dropped_duplicates: dropped_dup,
        isolated_nodes: dataset.adjacency.iter().filter(|a| a.is_empty()).count(),
        empty_bow_nodes: dataset.bows.iter().filter(|b| b.is_empty()).count(),
    };
    Ok((dataset, report))
}

impl Dataset {
    /// Build a dataset from raw parts, checking every structural invariant.
    pub fn from_parts(
        node_ids: Vec<String>,
        adjacency: Vec<Vec<usize>>,
        bows: Vec<Bow>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        vocab_size: usize,
    ) -> Result<Dataset> {
        let d = Dataset {
            node_ids,
            adjacency,
            bows,
            labels,
            num_classes: class_names.len(),
            class_names,
            vocab_size,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Undirected edges as `(i, j)` pairs with `i < j`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, nb) in self.adjacency.iter().enumerate() {
            for &j in nb {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|x| x == id)
    }

    /// Check all structural invariants: symmetry, no self-loops, sorted
    /// duplicate-free neighbor lists, label and bow-index ranges.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_ids.len();
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        if self.adjacency.len() != n || self.bows.len() != n || self.labels.len() != n {
            return fail("dataset field lengths disagree".into());
        }
        if self.vocab_size == 0 {
            return fail("vocab_size must be positive".into());
        }
        if self.num_classes == 0 || self.class_names.len() != self.num_classes {
            return fail("class metadata inconsistent".into());
        }
        for (i, nb) in self.adjacency.iter().enumerate() {
            for (k, &j) in nb.iter().enumerate() {
                if j >= n {
                    return fail(format!("neighbor index {j} out of range at node {i}"));
                }
                if j == i {
                    return fail(format!("self-loop at node {i}"));
                }
                if k > 0 && nb[k - 1] >= j {
                    return fail(format!("neighbor list of node {i} not sorted unique"));
                }
                if self.adjacency[j].binary_search(&i).is_err() {
                    return fail(format!("edge ({i},{j}) not symmetric"));
                }
            }
        }
        for (i, &label) in self.labels.iter().enumerate() {
            if label >= self.num_classes {
                return fail(format!("label {label} out of range at node {i}"));
            }
        }
        for (i, bow) in self.bows.iter().enumerate() {
            for (k, &(w, c)) in bow.iter().enumerate() {
                if w as usize >= self.vocab_size {
                    return fail(format!("bow index {w} out of range at node {i}"));
                }
                if c <= 0.0 || !c.is_finite() {
                    return fail(format!("non-positive bow count at node {i}"));
                }
                if k > 0 && bow[k - 1].0 >= w {
                    return fail(format!("bow of node {i} not sorted unique"));
                }
            }
        }
        Ok(())
    }

    /// Restrict to `keep`, dropping edges with an endpoint outside. Returns
    /// the new dataset and the old-index → new-index map.
    ///
    /// Kept nodes appear in ascending old-index order; the vocabulary and
    /// class set are carried over unchanged.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<(Dataset, Vec<Option<usize>>)> {
        if keep.is_empty() {
            return Err(Error::InvalidInput("induced_subgraph: empty keep set".into()));
        }
        let n = self.len();
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if *kept.last().unwrap() >= n {
            return Err(Error::InvalidInput(format!(
                "induced_subgraph: index {} out of range ({} nodes)",
                kept.last().unwrap(),
                n
            )));
        }

        let mut index_map: Vec<Option<usize>> = vec![None; n];
        for (new, &old) in kept.iter().enumerate() {
            index_map[old] = Some(new);
        }
        let adjacency = kept
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .filter_map(|&j| index_map[j])
                    .collect::<Vec<_>>()
            })
            .collect();
        let sub = Dataset {
            node_ids: kept.iter().map(|&i| self.node_ids[i].clone()).collect(),
            adjacency,
            bows: kept.iter().map(|&i| self.bows[i].clone()).collect(),
            labels: kept.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            vocab_size: self.vocab_size,
            num_classes: self.num_classes,
        };
        sub.validate()?;
        Ok((sub, index_map))
    }

    /// Re-emit the content file (field order normalized, counts as integers).
    pub fn write_content<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.len() {
            let mut flags = vec![0u64; self.vocab_size];
            for &(w, c) in &self.bows[i] {
                flags[w as usize] = c as u64;
            }
            write!(out, "{}", self.node_ids[i])?;
            for f in flags {
                write!(out, "\t{f}")?;
            }
            writeln!(out, "\t{}", self.class_names[self.labels[i]])?;
        }
        Ok(())
    }

    /// Re-emit the cites file, one undirected edge per line.
    pub fn write_cites<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{}\t{}", self.node_ids[i], self.node_ids[j])?;
        }
        Ok(())
    }
}
