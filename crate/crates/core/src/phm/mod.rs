//! Strongly 3-perfect hashing matrices built from polynomial evaluation.
//!
//! Column `j` of a [`CodeMatrix`] is the evaluation vector of the `j`-th
//! polynomial of degree below `k` (canonical order, see
//! [`Polynomial::from_index`]). Rows are 0-based throughout.

mod search;
mod verify;

pub use search::{candidate_vectors, find_good_vector, VectorSearch};
pub use verify::{SeparationReport, Strong3ph, FULL_ENUMERATION_BUDGET};

use std::fmt::Write as _;

use thiserror::Error;

use crate::ff::{FieldError, Polynomial, PrimeField};
use crate::hypergraph::{Hypergraph, HypergraphError, Vertex};

/// Rows are tracked as bits of a `u64`.
pub const MAX_ROWS: usize = 64;

/// Cap on `q^k`, the number of columns built.
pub const MAX_COLUMNS: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhmError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no strongly 3-perfect hashing vector found in {tries} tries")]
    SearchExhausted { tries: usize },
    #[error("enumeration of {count} triples exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The evaluation points `(α_1, …, α_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvaluationVector {
    field: PrimeField,
    entries: Vec<u32>,
}

impl EvaluationVector {
    pub fn new(field: PrimeField, entries: &[u64]) -> Result<Self, PhmError> {
        let p = field.modulus();
        if let Some(&bad) = entries.iter().find(|&&a| a >= p) {
            return Err(PhmError::InvalidParameters(format!(
                "entry {bad} is not an element of {field}"
            )));
        }
        Ok(EvaluationVector {
            field,
            entries: entries.iter().map(|&a| a as u32).collect(),
        })
    }

    /// `(0, 1, …, r-1)`.
    pub fn identity(field: PrimeField, r: usize) -> Result<Self, PhmError> {
        Self::new(field, &(0..r as u64).collect::<Vec<_>>())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> Vec<u64> {
        self.entries.iter().map(|&a| a as u64).collect()
    }

    pub fn is_nonrepetitive(&self) -> bool {
        let mut seen = self.entries.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// `∏_{i ∈ subset} (x - α_i)` for 0-based positions.
    pub fn annihilator(&self, subset: &[usize]) -> Result<Polynomial, FieldError> {
        let points: Vec<_> = self.entries().into_iter().map(|a| self.field.elem(a)).collect();
        Polynomial::annihilator(self.field, &points, subset)
    }
}

/// An `r × m` matrix over GF(q), stored column-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeMatrix {
    r: usize,
    q: u64,
    k: usize,
    vector: EvaluationVector,
    data: Vec<u32>,
    /// Canonical polynomial index of each column, when known.
    labels: Option<Vec<u64>>,
}

impl CodeMatrix {
    /// A matrix from raw columns. Labels are unknown.
    pub fn from_columns(
        q: u64,
        k: usize,
        vector: EvaluationVector,
        columns: &[Vec<u32>],
    ) -> Result<Self, PhmError> {
        let r = vector.len();
        if vector.field().modulus() != q {
            return Err(PhmError::InvalidParameters(format!(
                "vector lives in {} but q = {q}",
                vector.field()
            )));
        }
        if r == 0 || r > MAX_ROWS {
            return Err(PhmError::InvalidParameters(format!(
                "row count {r} outside 1..={MAX_ROWS}"
            )));
        }
        let mut data = Vec::with_capacity(columns.len() * r);
        for c in columns {
            if c.len() != r || c.iter().any(|&x| x as u64 >= q) {
                return Err(PhmError::InvalidParameters(format!(
                    "column {c:?} is not an {r}-tuple over GF({q})"
                )));
            }
            data.extend_from_slice(c);
        }
        Ok(CodeMatrix {
            r,
            q,
            k,
            vector,
            data,
            labels: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.r
    }

    pub fn columns(&self) -> usize {
        self.data.len() / self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vector(&self) -> &EvaluationVector {
        &self.vector
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.data[j * self.r..(j + 1) * self.r]
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.data[col * self.r + row]
    }

    /// The polynomial whose evaluations form column `j`, if known.
    pub fn label(&self, j: usize) -> Option<Polynomial> {
        let labels = self.labels.as_ref()?;
        Some(Polynomial::from_index(self.vector.field(), self.k, labels[j]))
    }

    /// The columns at `indices`, in that order. Labels carry over.
    pub fn select_columns(&self, indices: &[usize]) -> CodeMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.r);
        for &j in indices {
            data.extend_from_slice(self.column(j));
        }
        CodeMatrix {
            r: self.r,
            q: self.q,
            k: self.k,
            vector: self.vector.clone(),
            data,
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&j| l[j]).collect()),
        }
    }

    pub fn columns_distinct(&self) -> bool {
        let mut cols: Vec<&[u32]> = (0..self.columns()).map(|j| self.column(j)).collect();
        cols.sort_unstable();
        cols.windows(2).all(|w| w[0] != w[1])
    }

    /// Rows where columns `a` and `b` agree, as a bitmask.
    pub fn agreement_mask(&self, a: usize, b: usize) -> u64 {
        let (ca, cb) = (self.column(a), self.column(b));
        ca.iter()
            .zip(cb)
            .enumerate()
            .fold(0, |m, (i, (x, y))| if x == y { m | 1 << i } else { m })
    }

    /// The `r`-partite `r`-graph with one vertex `i·q + α` per row `i` and value
    /// `α`, and one edge per column.
    pub fn to_hypergraph(&self) -> Result<Hypergraph, PhmError> {
        let q = self.q as Vertex;
        let edges = (0..self.columns()).map(|j| {
            self.column(j)
                .iter()
                .enumerate()
                .map(|(i, &a)| i as Vertex * q + a)
                .collect::<Vec<_>>()
        });
        Ok(Hypergraph::new(self.r, self.r * self.q as usize, edges)?)
    }

    /// The `.phm` text format: `r m q k`, then `r` rows, then the evaluation vector.
    pub fn to_phm_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {} {}", self.r, self.columns(), self.q, self.k).unwrap();
        let join = |vals: &mut dyn Iterator<Item = u64>| {
            vals.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        };
        for i in 0..self.r {
            let line = join(&mut (0..self.columns()).map(|j| self.entry(i, j) as u64));
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&join(&mut self.vector.entries().into_iter()));
        out.push('\n');
        out
    }

    /// Parses the `.phm` format. If the columns are exactly those of
    /// [`build_matrix`] for the stored vector, the polynomial labels are restored.
    pub fn parse_phm(text: &str) -> Result<CodeMatrix, PhmError> {
        let err = |line: usize, msg: &str| PhmError::Parse {
            line,
            msg: msg.to_string(),
        };
        let lines: Vec<&str> = text.lines().collect();
        let nums = |idx: usize| -> Result<Vec<u64>, PhmError> {
            let line = lines.get(idx).ok_or_else(|| err(idx + 1, "missing line"))?;
            line.split_ascii_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| err(idx + 1, "expected integers"))
        };
        let header = nums(0)?;
        let [r, m, q, k] = header[..] else {
            return Err(err(1, "header must be `r m q k`"));
        };
        let (r, m, k) = (r as usize, m as usize, k as usize);
        if lines.len() != r + 2 {
            return Err(err(lines.len(), "expected r rows and a vector line"));
        }
        let field = PrimeField::new(q)?;
        let mut columns = vec![Vec::with_capacity(r); m];
        for i in 0..r {
            let row = nums(i + 1)?;
            if row.len() != m {
                return Err(err(i + 2, "row length differs from m"));
            }
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(v as u32);
            }
        }
        let vector = EvaluationVector::new(field, &nums(r + 1)?)?;
        if vector.len() != r {
            return Err(err(r + 2, "vector length differs from r"));
        }
        let mut matrix = CodeMatrix::from_columns(q, k, vector, &columns)?;
        if let Ok(canonical) = build_matrix(q, k, matrix.vector()) {
            if canonical.data == matrix.data {
                matrix.labels = canonical.labels;
            }
        }
        Ok(matrix)
    }
}

/// The `q^k` columns `(f(α_1), …, f(α_r))` over all `f` of degree below `k`,
/// in canonical polynomial order.
pub fn build_matrix(q: u64, k: usize, vector: &EvaluationVector) -> Result<CodeMatrix, PhmError> {
    let r = vector.len();
    let field = vector.field();
    if field.modulus() != q {
        return Err(PhmError::InvalidParameters(format!(
            "vector lives in {field} but q = {q}"
        )));
    }
    if k == 0 || k >= r || r > MAX_ROWS {
        return Err(PhmError::InvalidParameters(format!(
            "need 1 <= k < r <= {MAX_ROWS} (r={r}, k={k})"
        )));
    }
    let m = q
        .checked_pow(k as u32)
        .filter(|&m| m <= MAX_COLUMNS)
        .ok_or_else(|| PhmError::InvalidParameters(format!("q^k = {q}^{k} columns is too many")))?;
    let points = vector.entries();
    let mut data = Vec::with_capacity(m as usize * r);
    for j in 0..m {
        let f = Polynomial::from_index(field, k, j);
        data.extend(points.iter().map(|&a| f.eval_raw(a) as u32));
    }
    Ok(CodeMatrix {
        r,
        q,
        k,
        vector: vector.clone(),
        data,
        labels: Some((0..m).collect()),
    })
}

/// Rows on which all the given columns agree.
pub fn common_rows(columns: &[&[u32]]) -> Vec<usize> {
    let Some(first) = columns.first() else {
        return Vec::new();
    };
    (0..first.len())
        .filter(|&i| columns.iter().all(|c| c[i] == first[i]))
        .collect()
}

/// Rows on which the three columns take pairwise distinct values.
pub fn separating_rows(a: &[u32], b: &[u32], c: &[u32]) -> Vec<usize> {
    (0..a.len())
        .filter(|&i| a[i] != b[i] && a[i] != c[i] && b[i] != c[i])
        .collect()
}
