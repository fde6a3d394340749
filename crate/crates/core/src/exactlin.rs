//! Exact rational linear algebra: sparse column-major matrices, rank,
//! kernels and cohomology dimensions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition d_out * d_in is not zero")]
    CompositionNotZero,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, LinError> {
    let t = s.trim();
    let bad = || LinError::Parse(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Sparse matrix stored by columns.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<BTreeMap<usize, Rational>>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix({}x{}, nnz={})", self.rows, self.cols.len(), self.nnz())
    }
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols: vec![BTreeMap::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.cols[i].insert(i, Rational::one());
        }
        m
    }

    pub fn from_columns(rows: usize, cols: Vec<BTreeMap<usize, Rational>>) -> Result<Self, LinError> {
        for c in &cols {
            if let Some((&r, _)) = c.iter().next_back() {
                if r >= rows {
                    return Err(LinError::DimensionMismatch(format!("row {r} out of {rows}")));
                }
            }
        }
        let cols = cols
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Ok(SparseMatrix { rows, cols })
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zero(nr, nc);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.ncols()]; self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (&i, v) in c {
                d[i][j] = v.clone();
            }
        }
        d
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.cols[j].get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.ncols());
        if v.is_zero() {
            self.cols[j].remove(&i);
        } else {
            self.cols[j].insert(i, v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Rational) {
        if v.is_zero() {
            return;
        }
        let e = self.cols[j].entry(i).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.cols[j].remove(&i);
        }
    }

    pub fn column(&self, j: usize) -> &BTreeMap<usize, Rational> {
        &self.cols[j]
    }

    /// `(row, col, value)` triples in column-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(&i, v)| (i, j, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.rows, self.ncols());
        }
        let cols = self.cols.iter().map(|c| c.iter().map(|(&i, v)| (i, v * s)).collect()).collect();
        SparseMatrix { rows: self.rows, cols }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinError> {
        if self.rows != other.rows || self.ncols() != other.ncols() {
            return Err(LinError::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let mut out = self.clone();
        for (i, j, v) in other.triples() {
            out.add_to(i, j, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinError> {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, LinError> {
        if self.ncols() != other.rows {
            return Err(LinError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let cols = other.cols.iter().map(|c| self.apply_sparse(c)).collect();
        Ok(SparseMatrix { rows: self.rows, cols })
    }

    pub fn apply_sparse(&self, v: &BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (&k, x) in v {
            for (&i, a) in &self.cols[k] {
                *out.entry(i).or_insert_with(Rational::zero) += a * x;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.ncols());
        let mut out = vec![Rational::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (&i, a) in &self.cols[j] {
                out[i] += a * x;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.ncols(), self.rows);
        for (i, j, v) in self.triples() {
            t.cols[i].insert(j, v.clone());
        }
        t
    }

    fn row_lists(&self) -> Vec<BTreeMap<usize, Rational>> {
        let mut rows = vec![BTreeMap::new(); self.rows];
        for (i, j, v) in self.triples() {
            rows[i].insert(j, v.clone());
        }
        rows
    }

    /// Reduced row echelon form: the nonzero rows and their pivot columns.
    pub fn rref(&self) -> (Vec<BTreeMap<usize, Rational>>, Vec<usize>) {
        let mut pending: Vec<BTreeMap<usize, Rational>> =
            self.row_lists().into_iter().filter(|r| !r.is_empty()).collect();
        let mut done: Vec<BTreeMap<usize, Rational>> = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..self.ncols() {
            // pivot: smallest numerator, then shortest row
            let mut best: Option<usize> = None;
            for (k, r) in pending.iter().enumerate() {
                if let Some(v) = r.get(&col) {
                    let better = match best {
                        None => true,
                        Some(b) => {
                            let w = &pending[b][&col];
                            let (hv, hw) = (v.numer().abs(), w.numer().abs());
                            hv < hw || (hv == hw && r.len() < pending[b].len())
                        }
                    };
                    if better {
                        best = Some(k);
                    }
                }
            }
            let Some(b) = best else { continue };
            let mut prow = pending.swap_remove(b);
            let inv = prow[&col].recip();
            for v in prow.values_mut() {
                *v *= &inv;
            }
            for r in pending.iter_mut().chain(done.iter_mut()) {
                if let Some(f) = r.get(&col).cloned() {
                    eliminate(r, &prow, &f);
                }
            }
            pending.retain(|r| !r.is_empty());
            done.push(prow);
            pivots.push(col);
        }
        (done, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the kernel, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (rows, pivots) = self.rref();
        let n = self.ncols();
        let mut is_pivot = vec![None; n];
        for (k, &p) in pivots.iter().enumerate() {
            is_pivot[p] = Some(k);
        }
        let mut basis = Vec::new();
        for free in 0..n {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (k, &p) in pivots.iter().enumerate() {
                if let Some(x) = rows[k].get(&free) {
                    v[p] = -x.clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    pub fn nullity(&self) -> usize {
        self.ncols() - self.rank()
    }
}

fn eliminate(r: &mut BTreeMap<usize, Rational>, prow: &BTreeMap<usize, Rational>, f: &Rational) {
    for (&j, v) in prow {
        let e = r.entry(j).or_insert_with(Rational::zero);
        *e -= f * v;
        if e.is_zero() {
            r.remove(&j);
        }
    }
}

/// `dim ker(d_out) - rank(d_in)` for a composable pair with `d_out * d_in = 0`.
pub fn cohomology_dim(d_out: &SparseMatrix, d_in: &SparseMatrix) -> Result<usize, LinError> {
    if d_out.ncols() != d_in.nrows() {
        return Err(LinError::DimensionMismatch(format!(
            "d_out has {} columns, d_in has {} rows",
            d_out.ncols(),
            d_in.nrows()
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(LinError::CompositionNotZero);
    }
    Ok(d_out.nullity() - d_in.rank())
}
