//! Sparse symmetric co-occurrence counts over walk windows.
//!
//! `X[i][j]` counts how often nodes `i` and `j` appear within `window`
//! positions of each other across all walks. The diagonal is never stored.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest node count accepted when parsing a cached matrix.
pub const MAX_PARSE_NODES: usize = 1 << 22;

/// Symmetric sparse count matrix; both `(i,j)` and `(j,i)` are stored so row
/// iteration sees every ordered entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CoocMatrix {
    n: usize,
    rows: Vec<Vec<(u32, f64)>>,
}

impl CoocMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries of row `i`, sorted by column. All counts are positive.
    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    /// Number of distinct nodes co-occurring with `i`.
    pub fn row_distinct(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&(j as u32), |e| e.0) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => 0.0,
        }
    }

    /// Ordered stored entries `(i, j, x_ij)`, row-major.
    pub fn iter_entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, x)| (i as u32, j, x)))
    }

    /// Count of ordered stored entries (twice the distinct pair count).
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Sum over all ordered entries.
    pub fn total(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().map(|&(_, x)| x))
            .sum()
    }

    fn from_pair_counts(n: usize, pairs: HashMap<(u32, u32), f64>) -> CoocMatrix {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (&(a, b), &x) in &pairs {
            rows[a as usize].push((b, x));
            rows[b as usize].push((a, x));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|e| e.0);
        }
        CoocMatrix { n, rows }
    }

    /// Drop entries below `x_min`, recomputing per-row distinct counts.
    pub fn filter_min_count(&self, x_min: f64) -> CoocMatrix {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().copied().filter(|&(_, x)| x >= x_min).collect())
            .collect();
        CoocMatrix { n: self.n, rows }
    }

    pub fn assert_symmetric(&self) {
        for (i, j, x) in self.iter_entries() {
            assert_eq!(self.get(j as usize, i as usize), x, "asymmetry at ({i},{j})");
        }
    }

    /// Serialize as a text triple file: an `n` header, then one `i j x_ij`
    /// line per distinct pair with `i < j`.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.n)?;
        for (i, j, x) in self.iter_entries() {
            if i < j {
                writeln!(out, "{i} {j} {x}")?;
            }
        }
        Ok(())
    }

    /// Parse the text triple format written by [`CoocMatrix::write_text`].
    ///
    /// The node count is capped at [`MAX_PARSE_NODES`] so a forged header
    /// cannot drive allocation.
    pub fn parse_text<R: BufRead>(input: R) -> Result<CoocMatrix> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing n header"))??;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, format!("bad n header {header:?}")))?;
        if n > MAX_PARSE_NODES {
            return Err(Error::parse(
                1,
                format!("node count {n} exceeds the parser limit {MAX_PARSE_NODES}"),
            ));
        }
        let mut pairs: HashMap<(u32, u32), f64> = HashMap::new();
        for (lineno, line) in lines.enumerate() {
            let lineno = lineno + 2;
            let line = line?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 3 {
                return Err(Error::parse(
                    lineno,
                    format!("expected `i j x`, got {} fields", fields.len()),
                ));
            }
            let i: u32 = fields[0]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad index {:?}", fields[0])))?;
            let j: u32 = fields[1]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad index {:?}", fields[1])))?;
            let x: f64 = fields[2]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad count {:?}", fields[2])))?;
            if i >= j {
                return Err(Error::parse(lineno, format!("entries must have i < j, got {i} {j}")));
            }
            if j as usize >= n {
                return Err(Error::parse(lineno, format!("index {j} out of range (n={n})")));
            }
            if x <= 0.0 || !x.is_finite() {
                return Err(Error::parse(lineno, format!("count must be positive, got {x}")));
            }
            if pairs.insert((i, j), x).is_some() {
                return Err(Error::parse(lineno, format!("duplicate entry ({i},{j})")));
            }
        }
        Ok(CoocMatrix::from_pair_counts(n, pairs))
    }
}

/// Count windowed co-occurrences over a walk set.
///
/// For every walk position `p` and offset `1..=window`, the unordered pair
/// `(walk[p], walk[p+offset])` is counted once (stored in both directions);
/// same-node pairs are skipped.
pub fn count_cooccurrences(walks: &[Vec<u32>], n: usize, window: usize) -> Result<CoocMatrix> {
    if walks.is_empty() {
        return Err(Error::InvalidInput("empty walk set".into()));
    }
    if window == 0 {
        return Err(Error::Config("window must be positive".into()));
    }
    for walk in walks {
        if let Some(&v) = walk.iter().find(|&&v| v as usize >= n) {
            return Err(Error::InvalidInput(format!(
                "walk references node {v}, but n={n}"
            )));
        }
    }
    let chunk = walks.len().div_ceil(rayon::current_num_threads().max(1));
    let pairs = walks
        .par_chunks(chunk.max(1))
        .map(|chunk| {
            let mut local: HashMap<(u32, u32), f64> = HashMap::new();
            for walk in chunk {
                for p in 0..walk.len() {
                    for q in p + 1..(p + window + 1).min(walk.len()) {
                        let (a, b) = (walk[p], walk[q]);
                        if a != b {
                            *local.entry((a.min(b), a.max(b))).or_insert(0.0) += 1.0;
                        }
                    }
                }
            }
            local
        })
        .reduce(HashMap::new, |mut acc, local| {
            for (k, v) in local {
                *acc.entry(k).or_insert(0.0) += v;
            }
            acc
        });
    Ok(CoocMatrix::from_pair_counts(n, pairs))
}
