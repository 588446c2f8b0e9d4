//! Embedding models and their on-disk text formats.
//!
//! Two formats exist: the word2vec text format (`n d` header then one
//! `<id> f1 .. fd` line per item) for downstream consumers, and a raw
//! sidecar format that dumps every parameter exactly for resuming.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Entries drawn uniformly from `[-scale, scale]`, row-major order.
    pub fn uniform<R: Rng>(rows: usize, cols: usize, scale: f64, rng: &mut R) -> Matrix {
        let data = (0..rows * cols)
            .map(|_| rng.random_range(-scale..=scale))
            .collect();
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Which vectors feed the classifier for a plain-model node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationMode {
    UOnly,
    Sum,
    Concat,
}

impl RepresentationMode {
    pub fn dim(&self, d: usize) -> usize {
        match self {
            RepresentationMode::Concat => 2 * d,
            _ => d,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RepresentationMode::UOnly => "u_only",
            RepresentationMode::Sum => "sum",
            RepresentationMode::Concat => "concat",
        }
    }
}

impl std::str::FromStr for RepresentationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u_only" => Ok(RepresentationMode::UOnly),
            "sum" => Ok(RepresentationMode::Sum),
            "concat" => Ok(RepresentationMode::Concat),
            other => Err(Error::Config(format!("unknown representation mode {other:?}"))),
        }
    }
}

/// Node and context embeddings with per-node biases.
#[derive(Debug, Clone, PartialEq)]
pub struct GvnrModel {
    pub u: Matrix,
    pub v: Matrix,
    pub b_u: Vec<f64>,
    pub b_v: Vec<f64>,
}

impl GvnrModel {
    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn dim(&self) -> usize {
        self.u.ncols()
    }

    pub fn node_representation(&self, i: usize, mode: RepresentationMode) -> Vec<f64> {
        let u = self.u.row(i);
        let v = self.v.row(i);
        match mode {
            RepresentationMode::UOnly => u.to_vec(),
            RepresentationMode::Sum => u.iter().zip(v).map(|(a, b)| a + b).collect(),
            RepresentationMode::Concat => u.iter().chain(v).copied().collect(),
        }
    }

    /// Link score σ(u_i·v_j + b_u[i] + b_v[j]).
    pub fn dot_bias_score(&self, i: usize, j: usize) -> f64 {
        sigmoid(dot(self.u.row(i), self.v.row(j)) + self.b_u[i] + self.b_v[j])
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite()
            && self.v.is_finite()
            && self.b_u.iter().all(|x| x.is_finite())
            && self.b_v.iter().all(|x| x.is_finite())
    }
}

/// Node embeddings plus a word embedding matrix; context vectors are derived
/// from text. `empty_doc_vector` stands in for documents with no words.
#[derive(Debug, Clone, PartialEq)]
pub struct GvnrTextModel {
    pub u: Matrix,
    pub w: Matrix,
    pub b_u: Vec<f64>,
    pub b_v: Vec<f64>,
    pub empty_doc_vector: Vec<f64>,
}

impl GvnrTextModel {
    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn dim(&self) -> usize {
        self.u.ncols()
    }

    pub fn vocab_size(&self) -> usize {
        self.w.nrows()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite()
            && self.w.is_finite()
            && self.b_u.iter().all(|x| x.is_finite())
            && self.b_v.iter().all(|x| x.is_finite())
            && self.empty_doc_vector.iter().all(|x| x.is_finite())
    }
}

/// Either trained model variant, as read back from a raw dump.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Gvnr(GvnrModel),
    GvnrText(GvnrTextModel),
}

/// Write vectors in the word2vec text format.
pub fn write_word2vec<W: Write, S: AsRef<str>>(
    mut out: W,
    ids: &[S],
    vectors: &[Vec<f64>],
) -> Result<()> {
    if ids.len() != vectors.len() {
        return Err(Error::InvalidInput("ids/vectors length mismatch".into()));
    }
    let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
    writeln!(out, "{} {}", ids.len(), dim)?;
    for (id, vec) in ids.iter().zip(vectors) {
        write!(out, "{}", id.as_ref())?;
        for x in vec {
            write!(out, " {x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Read a word2vec text file back into ids and vectors.
pub fn read_word2vec<R: BufRead>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))??;
    let mut it = header.split_whitespace();
    let count: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(1, "bad count in header"))?;
    let dim: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(1, "bad dimension in header"))?;
    if it.next().is_some() {
        return Err(Error::parse(1, "header must be `count dim`"));
    }
    // capacity from the file's own claim, bounded so a forged header
    // cannot drive allocation
    let mut ids = Vec::with_capacity(count.min(65_536));
    let mut vectors = Vec::with_capacity(count.min(65_536));
    for (lineno, line) in lines.enumerate() {
        let lineno = lineno + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let id = fields.next().unwrap().to_string();
        let vec: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("bad float {f:?}")))
            })
            .collect::<Result<_>>()?;
        if vec.len() != dim {
            return Err(Error::parse(
                lineno,
                format!("expected {dim} values, got {}", vec.len()),
            ));
        }
        ids.push(id);
        vectors.push(vec);
    }
    if ids.len() != count {
        return Err(Error::InvalidInput(format!(
            "header promised {count} rows, file has {}",
            ids.len()
        )));
    }
    Ok((ids, vectors))
}

fn write_matrix<W: Write>(out: &mut W, m: &Matrix) -> Result<()> {
    for i in 0..m.nrows() {
        let row = m.row(i);
        for (k, x) in row.iter().enumerate() {
            if k > 0 {
                write!(out, " ")?;
            }
            write!(out, "{x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn write_vector<W: Write>(out: &mut W, v: &[f64]) -> Result<()> {
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            write!(out, " ")?;
        }
        write!(out, "{x}")?;
    }
    writeln!(out)?;
    Ok(())
}

impl GvnrModel {
    /// Exact parameter dump for resuming; floats round-trip bit-for-bit.
    pub fn write_raw<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "gvnr {} {}", self.n(), self.dim())?;
        writeln!(out, "U")?;
        write_matrix(&mut out, &self.u)?;
        writeln!(out, "V")?;
        write_matrix(&mut out, &self.v)?;
        writeln!(out, "b_u")?;
        write_vector(&mut out, &self.b_u)?;
        writeln!(out, "b_v")?;
        write_vector(&mut out, &self.b_v)?;
        Ok(())
    }
}

impl GvnrTextModel {
    pub fn write_raw<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "gvnr-t {} {} {}", self.n(), self.dim(), self.vocab_size())?;
        writeln!(out, "U")?;
        write_matrix(&mut out, &self.u)?;
        writeln!(out, "W")?;
        write_matrix(&mut out, &self.w)?;
        writeln!(out, "b_u")?;
        write_vector(&mut out, &self.b_u)?;
        writeln!(out, "b_v")?;
        write_vector(&mut out, &self.b_v)?;
        writeln!(out, "empty_doc")?;
        write_vector(&mut out, &self.empty_doc_vector)?;
        Ok(())
    }
}

struct RawReader<I> {
    lines: I,
    lineno: usize,
}

impl<I: Iterator<Item = std::io::Result<String>>> RawReader<I> {
    fn next_line(&mut self) -> Result<String> {
        self.lineno += 1;
        match self.lines.next() {
            Some(line) => Ok(line?),
            None => Err(Error::parse(self.lineno, "unexpected end of file")),
        }
    }

    fn expect_section(&mut self, name: &str) -> Result<()> {
        let line = self.next_line()?;
        if line.trim() != name {
            return Err(Error::parse(
                self.lineno,
                format!("expected section {name:?}, got {line:?}"),
            ));
        }
        Ok(())
    }

    fn read_floats(&mut self, count: usize) -> Result<Vec<f64>> {
        let line = self.next_line()?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(self.lineno, format!("bad float {f:?}")))
            })
            .collect::<Result<_>>()?;
        if vals.len() != count {
            return Err(Error::parse(
                self.lineno,
                format!("expected {count} values, got {}", vals.len()),
            ));
        }
        Ok(vals)
    }

    fn read_matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix> {
        let mut data = Vec::new();
        for _ in 0..rows {
            data.extend(self.read_floats(cols)?);
        }
        Ok(Matrix { rows, cols, data })
    }
}

/// Largest dimension values accepted in a raw model header.
const MAX_MODEL_ROWS: usize = 1 << 24;
const MAX_MODEL_DIM: usize = 1 << 16;

/// Parse a raw model dump (either variant).
pub fn read_raw_model<R: BufRead>(input: R) -> Result<ModelFile> {
    let mut r = RawReader {
        lines: input.lines(),
        lineno: 0,
    };
    let header = r.next_line()?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let usize_at = |fields: &[&str], k: usize, max: usize| -> Result<usize> {
        let v: usize = fields
            .get(k)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(1, format!("bad header {header:?}")))?;
        if v > max {
            return Err(Error::parse(
                1,
                format!("header dimension {v} exceeds the parser limit {max}"),
            ));
        }
        Ok(v)
    };
    match fields.first() {
        Some(&"gvnr") if fields.len() == 3 => {
            let n = usize_at(&fields, 1, MAX_MODEL_ROWS)?;
            let d = usize_at(&fields, 2, MAX_MODEL_DIM)?;
            r.expect_section("U")?;
            let u = r.read_matrix(n, d)?;
            r.expect_section("V")?;
            let v = r.read_matrix(n, d)?;
            r.expect_section("b_u")?;
            let b_u = r.read_floats(n)?;
            r.expect_section("b_v")?;
            let b_v = r.read_floats(n)?;
            Ok(ModelFile::Gvnr(GvnrModel { u, v, b_u, b_v }))
        }
        Some(&"gvnr-t") if fields.len() == 4 => {
            let n = usize_at(&fields, 1, MAX_MODEL_ROWS)?;
            let d = usize_at(&fields, 2, MAX_MODEL_DIM)?;
            let m = usize_at(&fields, 3, MAX_MODEL_ROWS)?;
            r.expect_section("U")?;
            let u = r.read_matrix(n, d)?;
            r.expect_section("W")?;
            let w = r.read_matrix(m, d)?;
            r.expect_section("b_u")?;
            let b_u = r.read_floats(n)?;
            r.expect_section("b_v")?;
            let b_v = r.read_floats(n)?;
            r.expect_section("empty_doc")?;
            let empty_doc_vector = r.read_floats(d)?;
            Ok(ModelFile::GvnrText(GvnrTextModel {
                u,
                w,
                b_u,
                b_v,
                empty_doc_vector,
            }))
        }
        _ => Err(Error::parse(1, format!("unrecognized model header {header:?}"))),
    }
}
