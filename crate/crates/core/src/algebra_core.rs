//! Finite-dimensional associative algebras, bimodules and operators given by
//! structure constants, with checks for the Nijenhuis and relative
//! Rota-Baxter relations.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not Nijenhuis ({0} violations)")]
    NotNijenhuis(usize),
    #[error("not a Nijenhuis bimodule ({0} violations)")]
    NotNijenhuisBimodule(usize),
    #[error("not associative ({0} violations)")]
    NotAssociative(usize),
    #[error("not a bimodule ({0} violations)")]
    NotBimodule(usize),
}

pub type Vector = Vec<Rational>;

pub fn zero_vec(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

fn axpy(y: &mut [Rational], a: &Rational, x: &[Rational]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

fn sub(x: &[Rational], y: &[Rational]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn add(x: &[Rational], y: &[Rational]) -> Vector {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Bilinear map `U x W -> Z` stored as `table[i][j]` = image of `(u_i, w_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bilinear {
    table: Vec<Vec<Vector>>,
    out_dim: usize,
}

impl Bilinear {
    pub fn zero(left: usize, right: usize, out: usize) -> Self {
        Bilinear { table: vec![vec![zero_vec(out); right]; left], out_dim: out }
    }

    pub fn from_table(table: Vec<Vec<Vector>>, out_dim: usize) -> Result<Self, AlgebraError> {
        let right = table.first().map_or(0, |r| r.len());
        for row in &table {
            if row.len() != right || row.iter().any(|v| v.len() != out_dim) {
                return Err(AlgebraError::DimensionMismatch("ragged bilinear table".into()));
            }
        }
        Ok(Bilinear { table, out_dim })
    }

    pub fn left_dim(&self) -> usize {
        self.table.len()
    }
    pub fn right_dim(&self) -> usize {
        self.table.first().map_or(0, |r| r.len())
    }
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn basis(&self, i: usize, j: usize) -> &Vector {
        &self.table[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        self.table[i][j][k] = v;
    }

    pub fn apply(&self, u: &[Rational], w: &[Rational]) -> Vector {
        let mut out = zero_vec(self.out_dim);
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in w.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                axpy(&mut out, &(a * b), &self.table[i][j]);
            }
        }
        out
    }

    /// Nonzero structure constants `(i, j, k, c)`.
    pub fn triples(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut v = Vec::new();
        for (i, row) in self.table.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                for (k, c) in w.iter().enumerate() {
                    if !c.is_zero() {
                        v.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        v
    }

    pub fn from_triples(
        left: usize,
        right: usize,
        out: usize,
        triples: &[(usize, usize, usize, Rational)],
    ) -> Result<Self, AlgebraError> {
        let mut b = Self::zero(left, right, out);
        for (i, j, k, c) in triples {
            if *i >= left || *j >= right || *k >= out {
                return Err(AlgebraError::DimensionMismatch(format!("index ({i},{j},{k}) out of range")));
            }
            b.table[*i][*j][*k] += c;
        }
        Ok(b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub basis: Vec<String>,
    pub mult: Bilinear,
}

impl AlgebraPresentation {
    pub fn new(basis: Vec<String>, mult: Bilinear) -> Result<Self, AlgebraError> {
        let d = basis.len();
        if mult.left_dim() != d || mult.right_dim() != d || mult.out_dim() != d {
            return Err(AlgebraError::DimensionMismatch(format!("basis has {d} elements")));
        }
        Ok(AlgebraPresentation { basis, mult })
    }

    pub fn from_triples(dim: usize, triples: &[(usize, usize, usize, Rational)]) -> Result<Self, AlgebraError> {
        let basis = (0..dim).map(|i| format!("e{i}")).collect();
        Self::new(basis, Bilinear::from_triples(dim, dim, dim, triples)?)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn product(&self, a: &[Rational], b: &[Rational]) -> Vector {
        self.mult.apply(a, b)
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &Vector {
        self.mult.basis(i, j)
    }

    /// `k[x]/(x^n)` in the basis `1, x, ..., x^{n-1}`.
    pub fn truncated_polynomial(n: usize) -> Self {
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i + j < n {
                    t.push((i, j, i + j, rat(1)));
                }
            }
        }
        Self::from_triples(n, &t).expect("in range")
    }

    /// `k^n` with componentwise product.
    pub fn diagonal(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, i, rat(1))).collect();
        Self::from_triples(n, &t).expect("in range")
    }

    pub fn zero_algebra(n: usize) -> Self {
        Self::from_triples(n, &[]).expect("in range")
    }
}

/// Square or rectangular matrix; column `c` is the image of basis vector `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOperator {
    rows: Vec<Vec<Rational>>,
    ncols: usize,
}

impl LinearOperator {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(AlgebraError::DimensionMismatch("ragged operator".into()));
        }
        Ok(LinearOperator { rows, ncols })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()).expect("rectangular")
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        LinearOperator { rows: vec![zero_vec(cols); rows], ncols: cols }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Rational::one())
    }

    pub fn scalar(n: usize, c: Rational) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.rows[i][i] = c.clone();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        &self.rows[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.rows[r][c] = v;
    }

    pub fn apply(&self, v: &[Rational]) -> Vector {
        self.rows
            .iter()
            .map(|row| {
                let mut s = Rational::zero();
                for (a, b) in row.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn column(&self, c: usize) -> Vector {
        self.rows.iter().map(|r| r[c].clone()).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearOperator) -> LinearOperator {
        let cols: Vec<Vector> = (0..other.ncols).map(|c| self.apply(&other.column(c))).collect();
        let rows = (0..self.nrows()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        LinearOperator { rows, ncols: other.ncols }
    }

    pub fn power(&self, k: usize) -> LinearOperator {
        let mut p = Self::identity(self.nrows());
        for _ in 0..k {
            p = self.compose(&p);
        }
        p
    }

    pub fn add(&self, other: &LinearOperator) -> LinearOperator {
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| add(a, b)).collect();
        LinearOperator { rows, ncols: self.ncols }
    }

    pub fn scale(&self, c: &Rational) -> LinearOperator {
        let rows = self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        LinearOperator { rows, ncols: self.ncols }
    }

    /// Block diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &LinearOperator) -> LinearOperator {
        let n = self.ncols + other.ncols;
        let mut rows = Vec::new();
        for r in &self.rows {
            let mut row = r.clone();
            row.extend(zero_vec(other.ncols));
            rows.push(row);
        }
        for r in &other.rows {
            let mut row = zero_vec(self.ncols);
            row.extend(r.iter().cloned());
            rows.push(row);
        }
        LinearOperator { rows, ncols: n }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimodulePresentation {
    /// `left[i][k]` = `e_i · x_k`
    pub left: Bilinear,
    /// `right[k][i]` = `x_k · e_i`
    pub right: Bilinear,
}

impl BimodulePresentation {
    pub fn new(algebra_dim: usize, left: Bilinear, right: Bilinear) -> Result<Self, AlgebraError> {
        let m = left.out_dim();
        if left.left_dim() != algebra_dim
            || left.right_dim() != m
            || right.left_dim() != m
            || right.right_dim() != algebra_dim
            || right.out_dim() != m
        {
            return Err(AlgebraError::DimensionMismatch("bimodule action shapes".into()));
        }
        Ok(BimodulePresentation { left, right })
    }

    pub fn regular(a: &AlgebraPresentation) -> Self {
        BimodulePresentation { left: a.mult.clone(), right: a.mult.clone() }
    }

    pub fn dim(&self) -> usize {
        self.left.out_dim()
    }

    pub fn act_left(&self, a: &[Rational], x: &[Rational]) -> Vector {
        self.left.apply(a, x)
    }

    pub fn act_right(&self, x: &[Rational], a: &[Rational]) -> Vector {
        self.right.apply(x, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisAlgebra {
    pub algebra: AlgebraPresentation,
    pub operator: LinearOperator,
}

impl NijenhuisAlgebra {
    /// Checks the Nijenhuis relation before accepting.
    pub fn new(algebra: AlgebraPresentation, operator: LinearOperator) -> Result<Self, AlgebraError> {
        if operator.nrows() != algebra.dim() || operator.ncols() != algebra.dim() {
            return Err(AlgebraError::DimensionMismatch("operator shape".into()));
        }
        let r = check_nijenhuis(&algebra, &operator);
        if !r.passed() {
            return Err(AlgebraError::NotNijenhuis(r.violations.len()));
        }
        Ok(NijenhuisAlgebra { algebra, operator })
    }

    pub fn new_unchecked(algebra: AlgebraPresentation, operator: LinearOperator) -> Self {
        NijenhuisAlgebra { algebra, operator }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisBimodule {
    pub module: BimodulePresentation,
    pub operator: LinearOperator,
}

impl NijenhuisBimodule {
    pub fn new(
        n: &NijenhuisAlgebra,
        module: BimodulePresentation,
        operator: LinearOperator,
    ) -> Result<Self, AlgebraError> {
        if module.left.left_dim() != n.dim() || operator.nrows() != module.dim() || operator.ncols() != module.dim() {
            return Err(AlgebraError::DimensionMismatch("bimodule shape".into()));
        }
        let r = check_bimodule(&n.algebra, &module);
        if !r.passed() {
            return Err(AlgebraError::NotBimodule(r.violations.len()));
        }
        let r = check_nijenhuis_bimodule(n, &module, &operator);
        if !r.passed() {
            return Err(AlgebraError::NotNijenhuisBimodule(r.violations.len()));
        }
        Ok(NijenhuisBimodule { module, operator })
    }

    pub fn regular(n: &NijenhuisAlgebra) -> Self {
        NijenhuisBimodule { module: BimodulePresentation::regular(&n.algebra), operator: n.operator.clone() }
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub relation: &'static str,
    pub indices: Vec<usize>,
    pub defect: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: &'static str,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport { name, violations: Vec::new() }
    }

    fn record(&mut self, relation: &'static str, indices: Vec<usize>, defect: Vector) {
        if !is_zero_vec(&defect) {
            self.violations.push(Violation { relation, indices, defect });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_associativity(a: &AlgebraPresentation) -> CheckReport {
    let d = a.dim();
    let mut rep = CheckReport::new("associativity");
    for i in 0..d {
        for j in 0..d {
            let ij = a.basis_product(i, j);
            for k in 0..d {
                let ek = unit_vec(d, k);
                let lhs = a.product(ij, &ek);
                let rhs = a.product(&unit_vec(d, i), a.basis_product(j, k));
                rep.record("(ab)c = a(bc)", vec![i, j, k], sub(&lhs, &rhs));
            }
        }
    }
    rep
}

pub fn check_bimodule(a: &AlgebraPresentation, m: &BimodulePresentation) -> CheckReport {
    let d = a.dim();
    let dm = m.dim();
    let mut rep = CheckReport::new("bimodule");
    for i in 0..d {
        let ei = unit_vec(d, i);
        for j in 0..d {
            let ej = unit_vec(d, j);
            for k in 0..dm {
                let xk = unit_vec(dm, k);
                let lhs = m.act_left(a.basis_product(i, j), &xk);
                let rhs = m.act_left(&ei, &m.act_left(&ej, &xk));
                rep.record("(ab)x = a(bx)", vec![i, j, k], sub(&lhs, &rhs));
                let lhs = m.act_right(&m.act_left(&ei, &xk), &ej);
                let rhs = m.act_left(&ei, &m.act_right(&xk, &ej));
                rep.record("(ax)b = a(xb)", vec![i, k, j], sub(&lhs, &rhs));
                let lhs = m.act_right(&m.act_right(&xk, &ei), &ej);
                let rhs = m.act_right(&xk, a.basis_product(i, j));
                rep.record("(xa)b = x(ab)", vec![k, i, j], sub(&lhs, &rhs));
            }
        }
    }
    rep
}

/// `P(a)b + aP(b) - P(ab)`
pub fn deformed_value(a: &AlgebraPresentation, p: &LinearOperator, x: &[Rational], y: &[Rational]) -> Vector {
    let t1 = a.product(&p.apply(x), y);
    let t2 = a.product(x, &p.apply(y));
    let t3 = p.apply(&a.product(x, y));
    sub(&add(&t1, &t2), &t3)
}

pub fn check_nijenhuis(a: &AlgebraPresentation, p: &LinearOperator) -> CheckReport {
    let d = a.dim();
    let mut rep = CheckReport::new("nijenhuis");
    for i in 0..d {
        let ei = unit_vec(d, i);
        for j in 0..d {
            let ej = unit_vec(d, j);
            let lhs = a.product(&p.apply(&ei), &p.apply(&ej));
            let rhs = p.apply(&deformed_value(a, p, &ei, &ej));
            rep.record("P(a)P(b) = P(a ._P b)", vec![i, j], sub(&lhs, &rhs));
        }
    }
    rep
}

/// Both Nijenhuis bimodule identities on basis pairs.
pub fn check_nijenhuis_bimodule(n: &NijenhuisAlgebra, m: &BimodulePresentation, pm: &LinearOperator) -> CheckReport {
    let d = n.dim();
    let dm = m.dim();
    let p = &n.operator;
    let mut rep = CheckReport::new("nijenhuis bimodule");
    for i in 0..d {
        let ei = unit_vec(d, i);
        let pa = p.apply(&ei);
        for k in 0..dm {
            let xk = unit_vec(dm, k);
            let px = pm.apply(&xk);
            let lhs = m.act_left(&pa, &px);
            let inner = sub(&add(&m.act_left(&pa, &xk), &m.act_left(&ei, &px)), &pm.apply(&m.act_left(&ei, &xk)));
            rep.record("left", vec![i, k], sub(&lhs, &pm.apply(&inner)));
            let lhs = m.act_right(&px, &pa);
            let inner =
                sub(&add(&m.act_right(&px, &ei), &m.act_right(&xk, &pa)), &pm.apply(&m.act_right(&xk, &ei)));
            rep.record("right", vec![k, i], sub(&lhs, &pm.apply(&inner)));
        }
    }
    rep
}

/// The deformed product `a ·_P b = P(a)b + aP(b) - P(ab)`.
pub fn deformed_product(n: &NijenhuisAlgebra) -> AlgebraPresentation {
    let d = n.dim();
    let mut b = Bilinear::zero(d, d, d);
    for i in 0..d {
        for j in 0..d {
            b.table[i][j] = deformed_value(&n.algebra, &n.operator, &unit_vec(d, i), &unit_vec(d, j));
        }
    }
    AlgebraPresentation { basis: n.algebra.basis.clone(), mult: b }
}

/// The bimodule `M_P` over `A_P`: `a ▷ x = P(a)x`, `x ◁ a = xP(a)`.
pub fn deformed_bimodule(n: &NijenhuisAlgebra, m: &NijenhuisBimodule) -> BimodulePresentation {
    let d = n.dim();
    let dm = m.dim();
    let mut left = Bilinear::zero(d, dm, dm);
    let mut right = Bilinear::zero(dm, d, dm);
    for i in 0..d {
        let pa = n.operator.apply(&unit_vec(d, i));
        for k in 0..dm {
            let xk = unit_vec(dm, k);
            left.table[i][k] = m.module.act_left(&pa, &xk);
            right.table[k][i] = m.module.act_right(&xk, &pa);
        }
    }
    BimodulePresentation { left, right }
}

/// `A ⋉ M` with `(a,x)(b,y) = (ab, ay + xb)`; `A`'s basis comes first.
pub fn semidirect(a: &AlgebraPresentation, m: &BimodulePresentation) -> AlgebraPresentation {
    let d = a.dim();
    let dm = m.dim();
    let n = d + dm;
    let mut b = Bilinear::zero(n, n, n);
    for i in 0..d {
        for j in 0..d {
            for (k, c) in a.basis_product(i, j).iter().enumerate() {
                b.table[i][j][k] = c.clone();
            }
        }
        for k in 0..dm {
            for (l, c) in m.left.basis(i, k).iter().enumerate() {
                b.table[i][d + k][d + l] = c.clone();
            }
            for (l, c) in m.right.basis(k, i).iter().enumerate() {
                b.table[d + k][i][d + l] = c.clone();
            }
        }
    }
    let mut basis = a.basis.clone();
    basis.extend((0..dm).map(|k| format!("x{k}")));
    AlgebraPresentation { basis, mult: b }
}

/// `(A ⋉ M, P ⊕ P_M)`.
pub fn nijenhuis_semidirect(n: &NijenhuisAlgebra, m: &NijenhuisBimodule) -> NijenhuisAlgebra {
    NijenhuisAlgebra {
        algebra: semidirect(&n.algebra, &m.module),
        operator: n.operator.direct_sum(&m.operator),
    }
}

/// `B(x)B(y) = B(B(x)y + xB(y))` for `B: M -> A`.
pub fn check_relative_rb(a: &AlgebraPresentation, m: &BimodulePresentation, b: &LinearOperator) -> CheckReport {
    let dm = m.dim();
    let mut rep = CheckReport::new("relative Rota-Baxter");
    for k in 0..dm {
        let xk = unit_vec(dm, k);
        let bx = b.apply(&xk);
        for l in 0..dm {
            let xl = unit_vec(dm, l);
            let by = b.apply(&xl);
            let lhs = a.product(&bx, &by);
            let inner = add(&m.act_right(&xk, &by), &m.act_left(&bx, &xl));
            rep.record("B(x)B(y) = B(B(x)y + xB(y))", vec![k, l], sub(&lhs, &b.apply(&inner)));
        }
    }
    rep
}

/// `N_B(a, x) = (B(x), 0)` on `A ⊕ M`.
pub fn das_lift(a: &AlgebraPresentation, m: &BimodulePresentation, b: &LinearOperator) -> LinearOperator {
    let d = a.dim();
    let dm = m.dim();
    let mut n = LinearOperator::zero(d + dm, d + dm);
    for r in 0..d {
        for c in 0..dm {
            n.rows[r][d + c] = b.rows[r][c].clone();
        }
    }
    n
}
