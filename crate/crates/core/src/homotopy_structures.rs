//! Homotopy Nijenhuis algebras on finite-dimensional graded spaces,
//! A∞[1]-algebras and bimodules, homotopy relative Rota-Baxter operators
//! and the passage from the latter to the former.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra_core::{
    check_associativity, check_nijenhuis, AlgebraPresentation, BimodulePresentation, Bilinear, LinearOperator,
    NijenhuisAlgebra,
};
use crate::brace_calculus::{
    desuspend_alg, desuspend_njo, suspend_alg, suspend_njo, BraceError, GradedMap, GradedSpace, Shift,
};
use crate::exactlin::{sign, Rational, SparseMatrix};
use crate::linf_deformation::DeformationElement;
use crate::operad_forest::compositions;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomotopyError {
    #[error(transparent)]
    Brace(#[from] BraceError),
    #[error("{name} has degree {found}, expected {expected}")]
    DegreeViolation { name: String, expected: i64, found: i64 },
    #[error("bimodule operation {0} does not have exactly one module slot")]
    SlotViolation(usize),
    #[error("induced structure depends on representatives: {0}")]
    NotWellDefined(String),
    #[error("not a homotopy relative Rota-Baxter operator (first failure at arity {0})")]
    NotHomotopyRb(usize),
    #[error("no solution for the arity {0} component")]
    NoSolution(usize),
}

/// Per-arity residuals of an identity; an arity passes when its residual is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub name: String,
    pub residuals: Vec<(usize, GradedMap)>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero())
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.residuals.iter().find(|(_, r)| !r.is_zero()).map(|(n, _)| *n)
    }

    pub fn residual(&self, n: usize) -> Option<&GradedMap> {
        self.residuals.iter().find(|(k, _)| *k == n).map(|(_, r)| r)
    }

    /// `(arity, number of nonzero coefficients)`
    pub fn norms(&self) -> Vec<(usize, usize)> {
        self.residuals.iter().map(|(n, r)| (*n, r.nnz())).collect()
    }
}

/// `{m_n}` of degree `n - 2` and `{P_n}` of degree `n - 1` on `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyNijenhuisAlgebra {
    pub space: GradedSpace,
    pub m: BTreeMap<usize, GradedMap>,
    pub p: BTreeMap<usize, GradedMap>,
}

fn expect_degree(name: String, map: &GradedMap, expected: i64) -> Result<(), HomotopyError> {
    if map.degree() != expected {
        return Err(HomotopyError::DegreeViolation { name, expected, found: map.degree() });
    }
    Ok(())
}

impl HomotopyNijenhuisAlgebra {
    pub fn new(space: &GradedSpace) -> Self {
        HomotopyNijenhuisAlgebra { space: space.clone(), m: BTreeMap::new(), p: BTreeMap::new() }
    }

    pub fn set_m(&mut self, map: GradedMap) -> Result<(), HomotopyError> {
        let n = map.arity();
        expect_degree(format!("m_{n}"), &map, n as i64 - 2)?;
        self.m.insert(n, map);
        Ok(())
    }

    pub fn set_p(&mut self, map: GradedMap) -> Result<(), HomotopyError> {
        let n = map.arity();
        expect_degree(format!("P_{n}"), &map, n as i64 - 1)?;
        self.p.insert(n, map);
        Ok(())
    }

    /// The strict structure `(m_2, P_1)` on an ungraded space.
    pub fn strict(n: &NijenhuisAlgebra) -> Self {
        let space = GradedSpace::ungraded(n.dim());
        let mut h = Self::new(&space);
        h.set_m(bilinear_map(&space, &n.algebra.mult)).expect("degree 0");
        h.set_p(operator_map(&space, &n.operator)).expect("degree 0");
        h
    }

    /// `b_n = s m_n (s^{-1})^{⊗n}` up to the fixed sign, `R_n = P_n ∘ (s^{-1})^{⊗n}`.
    pub fn to_deformation(&self) -> DeformationElement {
        let mut e = DeformationElement::new(&self.space);
        for (&n, m) in &self.m {
            e.b.insert(n, suspend_alg(m).expect("V -> V"));
        }
        for (&n, p) in &self.p {
            e.r.insert(n, suspend_njo(p).expect("V -> V"));
        }
        e
    }

    pub fn from_deformation(e: &DeformationElement) -> Result<Self, HomotopyError> {
        let mut h = Self::new(&e.space);
        for b in e.b.values() {
            h.set_m(desuspend_alg(b)?)?;
        }
        for r in e.r.values() {
            h.set_p(desuspend_njo(r)?)?;
        }
        Ok(h)
    }

    pub fn max_arity(&self) -> usize {
        self.m.keys().chain(self.p.keys()).copied().max().unwrap_or(0)
    }
}

pub fn bilinear_map(space: &GradedSpace, b: &Bilinear) -> GradedMap {
    let mut m = GradedMap::zero(space, 2, 0, Shift::V, Shift::V);
    for (i, j, k, c) in b.triples() {
        m.add_entry(&[i, j], k, c).expect("degree 0 on ungraded space");
    }
    m
}

pub fn operator_map(space: &GradedSpace, p: &LinearOperator) -> GradedMap {
    let mut m = GradedMap::zero(space, 1, 0, Shift::V, Shift::V);
    for r in 0..p.nrows() {
        for c in 0..p.ncols() {
            if !p.entry(r, c).is_zero() {
                m.add_entry(&[c], r, p.entry(r, c).clone()).expect("degree 0 on ungraded space");
            }
        }
    }
    m
}

fn slots(before: usize, g: &GradedMap, after: usize) -> Vec<Option<&GradedMap>> {
    let mut s = vec![None; before];
    s.push(Some(g));
    s.extend(std::iter::repeat_n(None, after));
    s
}

fn stasheff_residual(h: &HomotopyNijenhuisAlgebra, n: usize) -> Result<GradedMap, HomotopyError> {
    let mut acc = GradedMap::zero(&h.space, n, n as i64 - 3, Shift::V, Shift::V);
    for j in 1..=n {
        let Some(mj) = h.m.get(&j) else { continue };
        for i in 0..=n - j {
            let k = n - j - i;
            let Some(outer) = h.m.get(&(i + 1 + k)) else { continue };
            let term = outer.compose_slots(&slots(i, mj, k))?;
            acc = acc.add(&term.scale(&sign((i + j * k) as i64)))?;
        }
    }
    Ok(acc)
}

/// `Σ (-1)^{i+jk} m_{i+1+k} ∘ (id^{⊗i} ⊗ m_j ⊗ id^{⊗k})` for `n = 1..=max_n`.
pub fn check_stasheff(h: &HomotopyNijenhuisAlgebra, max_n: usize) -> Result<ResidualReport, HomotopyError> {
    let residuals = (1..=max_n).map(|n| Ok((n, stasheff_residual(h, n)?))).collect::<Result<_, HomotopyError>>()?;
    Ok(ResidualReport { name: "stasheff".into(), residuals })
}

// all vectors of `len` naturals with the given sum
fn weak_compositions(total: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in weak_compositions(total - first, len - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

// every choice of i_q in 0..r_q
fn offsets(rs: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &r in rs {
        let mut next = Vec::new();
        for v in &out {
            for i in 0..r {
                let mut w = v.clone();
                w.push(i);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn homotopy_nijenhuis_residual(h: &HomotopyNijenhuisAlgebra, n: usize) -> Result<GradedMap, HomotopyError> {
    let mut acc = GradedMap::zero(&h.space, n, n as i64 - 2, Shift::V, Shift::V);
    for rs in compositions(n) {
        let p = rs.len();
        let Some(mp) = h.m.get(&p) else { continue };
        let ps: Option<Vec<&GradedMap>> = rs.iter().map(|r| h.p.get(r)).collect();
        let Some(ps) = ps else { continue };
        for t in 0..=p {
            let tail_sum = |q: usize| -> usize { rs[q..].iter().sum() };
            for hs in weak_compositions(t, p - t + 1) {
                // m_p(id^{h_t} ⊗ P_{r_{t+1}} ⊗ id^{h_{t+1}} ⊗ ... ⊗ P_{r_p} ⊗ id^{h_p})
                let mut sl: Vec<Option<&GradedMap>> = vec![None; hs[0]];
                for (q, &pq) in ps.iter().enumerate().skip(t) {
                    sl.push(Some(pq));
                    sl.extend(std::iter::repeat_n(None, hs[q - t + 1]));
                }
                let inner = mp.compose_slots(&sl)?;
                let mut e2 = 0i64;
                for i in t + 1..=p {
                    let hsum: i64 = hs[..i - t].iter().map(|&x| x as i64).sum();
                    e2 += (hsum + i as i64 - t as i64 - p as i64) * (rs[i - 1] as i64 - 1);
                }
                for is in offsets(&rs[..t]) {
                    let mut cur = inner.clone();
                    let mut e1 = 0i64;
                    for q in (1..=t).rev() {
                        let (r, i) = (rs[q - 1], is[q - 1]);
                        let k = r - 1 - i;
                        cur = ps[q - 1].compose_slots(&slots(i, &cur, k))?;
                        e1 += (r + k + tail_sum(q) * k) as i64 - (q * k) as i64;
                    }
                    acc = acc.add(&cur.scale(&sign(e1 + e2)))?;
                }
            }
        }
    }
    Ok(acc)
}

/// The operator identities with sign `(-1)^α` for `n = 1..=max_n`.
pub fn check_homotopy_nijenhuis(h: &HomotopyNijenhuisAlgebra, max_n: usize) -> Result<ResidualReport, HomotopyError> {
    let residuals = (1..=max_n)
        .map(|n| Ok((n, homotopy_nijenhuis_residual(h, n)?)))
        .collect::<Result<_, HomotopyError>>()?;
    Ok(ResidualReport { name: "homotopy nijenhuis".into(), residuals })
}

/// Every single-entry map of the given shape and degree.
pub fn homogeneous_basis(
    space: &GradedSpace,
    arity: usize,
    degree: i64,
    domain: Shift,
    codomain: Shift,
    allow: impl Fn(&[usize], usize) -> bool,
) -> Vec<GradedMap> {
    let d = space.dim();
    let mut out = Vec::new();
    let mut inputs = vec![0usize; arity];
    if d == 0 {
        return out;
    }
    loop {
        for o in 0..d {
            if !allow(&inputs, o) {
                continue;
            }
            let mut m = GradedMap::zero(space, arity, degree, domain, codomain);
            if m.add_entry(&inputs, o, Rational::one()).is_ok() {
                out.push(m);
            }
        }
        let mut j = arity;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            inputs[j] += 1;
            if inputs[j] < d {
                break;
            }
            inputs[j] = 0;
        }
    }
}

/// Solves `f(x) = 0` for `x` in the span of `basis`, with `f` affine.
pub fn affine_solve(
    basis: &[GradedMap],
    zero: &GradedMap,
    f: impl Fn(&GradedMap) -> Result<GradedMap, HomotopyError>,
) -> Result<Option<GradedMap>, HomotopyError> {
    let c = f(zero)?;
    let mut keys: BTreeMap<(Vec<usize>, usize), usize> = BTreeMap::new();
    let mut key = |k: (Vec<usize>, usize)| {
        let n = keys.len();
        *keys.entry(k).or_insert(n)
    };
    let mut cols = Vec::new();
    for b in basis {
        let diff = f(b)?.sub(&c)?;
        cols.push(diff.entries().map(|(i, o, v)| (key((i.clone(), o)), v.clone())).collect::<BTreeMap<_, _>>());
    }
    let rhs: BTreeMap<usize, Rational> = c.entries().map(|(i, o, v)| (key((i.clone(), o)), -v.clone())).collect();
    cols.push(rhs);
    let rows = keys.len();
    let mat = SparseMatrix::from_columns(rows, cols).expect("rows in range");
    // a kernel vector with last coordinate 1 gives a solution
    let (rref, pivots) = mat.rref();
    let last = basis.len();
    if pivots.contains(&last) {
        return Ok(None);
    }
    let mut x = zero.clone();
    for (row, &pc) in rref.iter().zip(&pivots) {
        let v = row.get(&last).cloned().unwrap_or_else(Rational::zero);
        if !v.is_zero() {
            x = x.add(&basis[pc].scale(&v))?;
        }
    }
    Ok(Some(x))
}

/// Picks `P_n` making the operator identity hold at arity `n`, all other
/// components fixed.
pub fn solve_operator_component(h: &HomotopyNijenhuisAlgebra, n: usize) -> Result<Option<GradedMap>, HomotopyError> {
    let zero = GradedMap::zero(&h.space, n, n as i64 - 1, Shift::V, Shift::V);
    let basis = homogeneous_basis(&h.space, n, n as i64 - 1, Shift::V, Shift::V, |_, _| true);
    affine_solve(&basis, &zero, |x| {
        let mut g = h.clone();
        g.p.insert(n, x.clone());
        homotopy_nijenhuis_residual(&g, n)
    })
}

/// `(H(V, m_1), m_2, P_1)` on pivot-chosen representatives.
#[derive(Clone, Debug)]
pub struct HomologyStructure {
    pub algebra: NijenhuisAlgebra,
    /// representatives of the homology basis, as vectors in `V`
    pub representatives: Vec<Vec<Rational>>,
    pub degrees: Vec<i64>,
}

fn unary_matrix(space: &GradedSpace, f: Option<&GradedMap>) -> SparseMatrix {
    let d = space.dim();
    let mut cols = vec![BTreeMap::new(); d];
    if let Some(f) = f {
        for (i, o, v) in f.entries() {
            cols[i[0]].insert(o, v.clone());
        }
    }
    SparseMatrix::from_columns(d, cols).expect("square")
}

fn to_sparse(v: &[Rational]) -> BTreeMap<usize, Rational> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

fn apply_binary(m: Option<&GradedMap>, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); x.len()];
    if let Some(m) = m {
        for (inp, o, c) in m.entries() {
            let (a, b) = (&x[inp[0]], &y[inp[1]]);
            if !a.is_zero() && !b.is_zero() {
                out[o] += c * a * b;
            }
        }
    }
    out
}

struct Decomposer {
    boundaries: Vec<BTreeMap<usize, Rational>>,
    reps: Vec<BTreeMap<usize, Rational>>,
    d: SparseMatrix,
}

impl Decomposer {
    /// Coordinates of a cycle on the representatives; `None` if `v` is not a
    /// cycle or the decomposition fails.
    fn coords(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.d.apply(v).iter().all(Zero::is_zero) {
            return None;
        }
        let nb = self.boundaries.len();
        let mut cols: Vec<_> = self.boundaries.clone();
        cols.extend(self.reps.iter().cloned());
        cols.push(to_sparse(v));
        let mat = SparseMatrix::from_columns(v.len(), cols).ok()?;
        let (rref, pivots) = mat.rref();
        let last = nb + self.reps.len();
        if pivots.contains(&last) {
            return None;
        }
        let mut c = vec![Rational::zero(); self.reps.len()];
        for (row, &pc) in rref.iter().zip(&pivots) {
            if pc >= nb && pc < last {
                c[pc - nb] = row.get(&last).cloned().unwrap_or_else(Rational::zero);
            }
        }
        Some(c)
    }
}

pub fn homology_structure(h: &HomotopyNijenhuisAlgebra) -> Result<HomologyStructure, HomotopyError> {
    let d = h.space.dim();
    let m1 = unary_matrix(&h.space, h.m.get(&1));
    let p1 = unary_matrix(&h.space, h.p.get(&1));
    let boundaries: Vec<BTreeMap<usize, Rational>> =
        (0..d).map(|j| m1.column(j).clone()).filter(|c| !c.is_empty()).collect();
    let cycles: Vec<BTreeMap<usize, Rational>> = m1.kernel_basis().iter().map(|v| to_sparse(v)).collect();
    let nb = boundaries.len();
    let mut cols = boundaries.clone();
    cols.extend(cycles.iter().cloned());
    let (_, pivots) = SparseMatrix::from_columns(d, cols).expect("rows in range").rref();
    let reps: Vec<BTreeMap<usize, Rational>> = pivots.iter().filter(|&&p| p >= nb).map(|&p| cycles[p - nb].clone()).collect();
    let dense = |s: &BTreeMap<usize, Rational>| {
        let mut v = vec![Rational::zero(); d];
        for (&i, x) in s {
            v[i] = x.clone();
        }
        v
    };
    let dec = Decomposer { boundaries: boundaries.clone(), reps: reps.clone(), d: m1.clone() };
    let k = reps.len();
    let rep_vecs: Vec<Vec<Rational>> = reps.iter().map(dense).collect();
    let degrees: Vec<i64> = rep_vecs
        .iter()
        .map(|v| v.iter().position(|x| !x.is_zero()).map_or(0, |i| h.space.degree(i)))
        .collect();
    let m2 = h.m.get(&2);
    let mut mult = Bilinear::zero(k, k, k);
    for i in 0..k {
        for j in 0..k {
            let prod = apply_binary(m2, &rep_vecs[i], &rep_vecs[j]);
            let c = dec.coords(&prod).ok_or_else(|| HomotopyError::NotWellDefined(format!("m_2({i},{j}) is not a cycle")))?;
            for (o, x) in c.into_iter().enumerate() {
                if !x.is_zero() {
                    mult.set(i, j, o, x);
                }
            }
        }
    }
    let mut op = LinearOperator::zero(k, k);
    for (j, r) in rep_vecs.iter().enumerate() {
        let c = dec.coords(&p1.apply(r)).ok_or_else(|| HomotopyError::NotWellDefined(format!("P_1({j}) is not a cycle")))?;
        for (i, x) in c.into_iter().enumerate() {
            op.set(i, j, x);
        }
    }
    // changing a representative by a boundary must not change the classes
    let zero_class = |v: &[Rational]| dec.coords(v).map(|c| c.iter().all(Zero::is_zero)).unwrap_or(false);
    for b in &boundaries {
        let bv = dense(b);
        if !zero_class(&p1.apply(&bv)) {
            return Err(HomotopyError::NotWellDefined("P_1 of a boundary".into()));
        }
        for r in &rep_vecs {
            if !zero_class(&apply_binary(m2, &bv, r)) || !zero_class(&apply_binary(m2, r, &bv)) {
                return Err(HomotopyError::NotWellDefined("m_2 with a boundary".into()));
            }
        }
    }
    let algebra = AlgebraPresentation::new((0..k).map(|i| format!("h{i}")).collect(), mult)
        .map_err(|e| HomotopyError::NotWellDefined(e.to_string()))?;
    Ok(HomologyStructure { algebra: NijenhuisAlgebra::new_unchecked(algebra, op), representatives: rep_vecs, degrees })
}

impl HomologyStructure {
    pub fn passes_strict_checks(&self) -> bool {
        check_associativity(&self.algebra.algebra).passed()
            && check_nijenhuis(&self.algebra.algebra, &self.algebra.operator).passed()
    }
}

/// `(sA, {𝔪_k})`: maps `sA^{⊗k} -> sA` of degree -1, stored over `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct AInfinityOneAlgebra {
    pub base: GradedSpace,
    pub ops: BTreeMap<usize, GradedMap>,
}

impl AInfinityOneAlgebra {
    pub fn new(base: &GradedSpace) -> Self {
        AInfinityOneAlgebra { base: base.clone(), ops: BTreeMap::new() }
    }

    pub fn set(&mut self, map: GradedMap) -> Result<(), HomotopyError> {
        let k = map.arity();
        expect_degree(format!("m{k}"), &map, -1)?;
        if map.domain() != Shift::SV || map.codomain() != Shift::SV {
            return Err(BraceError::CodomainMismatch("expected sA -> sA".into()).into());
        }
        self.ops.insert(k, map);
        Ok(())
    }

    /// Suspension of a strict algebra on an ungraded space.
    pub fn from_algebra(a: &AlgebraPresentation) -> Self {
        let base = GradedSpace::ungraded(a.dim());
        let mut s = Self::new(&base);
        s.set(suspend_alg(&bilinear_map(&base, &a.mult)).expect("V -> V")).expect("degree -1");
        s
    }
}

fn residual_ainf(ops: &BTreeMap<usize, GradedMap>, space: &GradedSpace, n: usize) -> Result<GradedMap, HomotopyError> {
    let mut acc = GradedMap::zero(space, n, -2, Shift::SV, Shift::SV);
    for i in 1..=n {
        if let (Some(outer), Some(inner)) = (ops.get(&(n + 1 - i)), ops.get(&i)) {
            acc = acc.add(&outer.brace(&[inner])?)?;
        }
    }
    Ok(acc)
}

/// `Σ_{i+j=n+1} 𝔪_j{𝔪_i}` for `n = 1..=max_n`.
pub fn check_ainf1(a: &AInfinityOneAlgebra, max_n: usize) -> Result<ResidualReport, HomotopyError> {
    let residuals =
        (1..=max_n).map(|n| Ok((n, residual_ainf(&a.ops, &a.base, n)?))).collect::<Result<_, HomotopyError>>()?;
    Ok(ResidualReport { name: "A-infinity[1]".into(), residuals })
}

/// Re-index a map on `A` (or `M`) into `A ⊕ M`.
fn embed(map: &GradedMap, total: &GradedSpace, offset: usize) -> GradedMap {
    let mut out = GradedMap::zero(total, map.arity(), map.degree(), map.domain(), map.codomain());
    for (i, o, v) in map.entries() {
        let inp: Vec<usize> = i.iter().map(|x| x + offset).collect();
        out.add_entry(&inp, o + offset, v.clone()).expect("degrees preserved");
    }
    out
}

/// `ϱ_k: (sA ⊕ sM)^{⊗k} -> sM` with exactly one module slot, stored over `A ⊕ M`
/// with the `A` basis first.
#[derive(Clone, Debug, PartialEq)]
pub struct AInfinityOneBimodule {
    pub algebra: AInfinityOneAlgebra,
    pub module: GradedSpace,
    pub total: GradedSpace,
    pub ops: BTreeMap<usize, GradedMap>,
}

impl AInfinityOneBimodule {
    pub fn new(algebra: &AInfinityOneAlgebra, module: &GradedSpace) -> Self {
        AInfinityOneBimodule {
            algebra: algebra.clone(),
            module: module.clone(),
            total: algebra.base.direct_sum(module),
            ops: BTreeMap::new(),
        }
    }

    fn dim_a(&self) -> usize {
        self.algebra.base.dim()
    }

    pub fn set(&mut self, map: GradedMap) -> Result<(), HomotopyError> {
        let k = map.arity();
        expect_degree(format!("rho{k}"), &map, -1)?;
        if map.space() != &self.total || map.domain() != Shift::SV || map.codomain() != Shift::SV {
            return Err(BraceError::CodomainMismatch("expected s(A+M) -> sM".into()).into());
        }
        let da = self.dim_a();
        for (i, o, _) in map.entries() {
            if o < da || i.iter().filter(|&&x| x >= da).count() != 1 {
                return Err(HomotopyError::SlotViolation(k));
            }
        }
        self.ops.insert(k, map);
        Ok(())
    }

    /// Suspension of a strict bimodule over an ungraded algebra.
    pub fn from_bimodule(a: &AlgebraPresentation, m: &BimodulePresentation) -> Self {
        let alg = AInfinityOneAlgebra::from_algebra(a);
        let mut b = Self::new(&alg, &GradedSpace::ungraded(m.dim()));
        let da = a.dim();
        let mut act = GradedMap::zero(&b.total, 2, 0, Shift::V, Shift::V);
        for (i, k, l, c) in m.left.triples() {
            act.add_entry(&[i, da + k], da + l, c).expect("degree 0");
        }
        for (k, i, l, c) in m.right.triples() {
            act.add_entry(&[da + k, i], da + l, c).expect("degree 0");
        }
        b.set(suspend_alg(&act).expect("V -> V")).expect("one module slot");
        b
    }

    /// `𝔪_k` extended by zero to `sA ⊕ sM`.
    pub fn extended_algebra_ops(&self) -> BTreeMap<usize, GradedMap> {
        self.algebra.ops.iter().map(|(&k, m)| (k, embed(m, &self.total, 0))).collect()
    }
}

/// `Σ_{i+j=n+1} ϱ_j{𝔪_i} + ϱ_j{ϱ_i}` for `n = 1..=max_n`.
pub fn check_ainf1_bimodule(m: &AInfinityOneBimodule, max_n: usize) -> Result<ResidualReport, HomotopyError> {
    let alg = m.extended_algebra_ops();
    let mut residuals = Vec::new();
    for n in 1..=max_n {
        let mut acc = GradedMap::zero(&m.total, n, -2, Shift::SV, Shift::SV);
        for i in 1..=n {
            let Some(outer) = m.ops.get(&(n + 1 - i)) else { continue };
            for inner in [alg.get(&i), m.ops.get(&i)].into_iter().flatten() {
                acc = acc.add(&outer.brace(&[inner])?)?;
            }
        }
        residuals.push((n, acc));
    }
    Ok(ResidualReport { name: "A-infinity[1] bimodule".into(), residuals })
}

/// `𝔥_k = 𝔪_k + ϱ_k` on `sA ⊕ sM`.
pub fn semidirect_ainf1(m: &AInfinityOneBimodule) -> AInfinityOneAlgebra {
    let mut ops = m.extended_algebra_ops();
    for (&k, r) in &m.ops {
        let s = match ops.remove(&k) {
            Some(a) => a.add(r).expect("same shape"),
            None => r.clone(),
        };
        ops.insert(k, s);
    }
    AInfinityOneAlgebra { base: m.total.clone(), ops }
}

/// `B_i: sM^{⊗i} -> A` of degree -1, stored over `A ⊕ M` and zero on `sA` inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyRbOperator {
    pub ops: BTreeMap<usize, GradedMap>,
}

impl HomotopyRbOperator {
    pub fn zero() -> Self {
        HomotopyRbOperator { ops: BTreeMap::new() }
    }

    pub fn set(&mut self, m: &AInfinityOneBimodule, map: GradedMap) -> Result<(), HomotopyError> {
        let k = map.arity();
        expect_degree(format!("B{k}"), &map, -1)?;
        if map.space() != &m.total || map.domain() != Shift::SV || map.codomain() != Shift::V {
            return Err(BraceError::CodomainMismatch("expected sM -> A".into()).into());
        }
        let da = m.dim_a();
        for (i, o, _) in map.entries() {
            if o >= da || i.iter().any(|&x| x < da) {
                return Err(HomotopyError::SlotViolation(k));
            }
        }
        self.ops.insert(k, map);
        Ok(())
    }

    /// Suspension of a strict relative Rota-Baxter operator `M -> A`.
    pub fn from_strict(m: &AInfinityOneBimodule, b: &LinearOperator) -> Self {
        let da = m.dim_a();
        let mut p = GradedMap::zero(&m.total, 1, 0, Shift::V, Shift::V);
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                if !b.entry(r, c).is_zero() {
                    p.add_entry(&[da + c], r, b.entry(r, c).clone()).expect("degree 0");
                }
            }
        }
        let mut out = Self::zero();
        out.set(m, suspend_njo(&p).expect("V -> V")).expect("module inputs only");
        out
    }
}

fn rb_residual(m: &AInfinityOneBimodule, b: &HomotopyRbOperator, n: usize) -> Result<GradedMap, HomotopyError> {
    let alg = m.extended_algebra_ops();
    let sb: BTreeMap<usize, GradedMap> = b.ops.iter().map(|(&k, x)| (k, x.suspend_output())).collect();
    let mut acc = GradedMap::zero(&m.total, n, -1, Shift::SV, Shift::SV);
    for rs in compositions(n) {
        let p = rs.len();
        let args: Option<Vec<&GradedMap>> = rs.iter().map(|r| sb.get(r)).collect();
        let Some(args) = args else { continue };
        if let Some(mp) = alg.get(&p) {
            acc = acc.add(&mp.brace(&args)?)?;
        }
        if let Some(rp) = m.ops.get(&p) {
            let inner = rp.brace(&args[1..])?;
            acc = acc.sub(&args[0].brace(&[&inner])?)?;
        }
    }
    Ok(acc)
}

/// Left minus right side of the homotopy relative Rota-Baxter identity.
pub fn check_homotopy_rb(
    m: &AInfinityOneBimodule,
    b: &HomotopyRbOperator,
    max_n: usize,
) -> Result<ResidualReport, HomotopyError> {
    let residuals = (1..=max_n).map(|n| Ok((n, rb_residual(m, b, n)?))).collect::<Result<_, HomotopyError>>()?;
    Ok(ResidualReport { name: "homotopy relative Rota-Baxter".into(), residuals })
}

/// Picks `B_n` making the identity hold at arity `n`, lower components fixed.
pub fn solve_rb_component(
    m: &AInfinityOneBimodule,
    b: &HomotopyRbOperator,
    n: usize,
) -> Result<Option<GradedMap>, HomotopyError> {
    let da = m.dim_a();
    let zero = GradedMap::zero(&m.total, n, -1, Shift::SV, Shift::V);
    let basis = homogeneous_basis(&m.total, n, -1, Shift::SV, Shift::V, |i, o| o < da && i.iter().all(|&x| x >= da));
    affine_solve(&basis, &zero, |x| {
        let mut c = b.clone();
        c.ops.insert(n, x.clone());
        rb_residual(m, &c, n)
    })
}

/// The deformation element `b_n = 𝔪_n + ϱ_n`, `R_n = B_n` on `A ⊕ M`, unchecked.
pub fn rb_deformation(m: &AInfinityOneBimodule, b: &HomotopyRbOperator) -> DeformationElement {
    let semi = semidirect_ainf1(m);
    let mut e = DeformationElement::new(&m.total);
    e.b = semi.ops;
    e.r = b.ops.clone();
    e
}

/// The homotopy Nijenhuis structure on `A ⊕ M` induced by `B`.
pub fn rb_to_nijenhuis(
    m: &AInfinityOneBimodule,
    b: &HomotopyRbOperator,
    max_n: usize,
) -> Result<HomotopyNijenhuisAlgebra, HomotopyError> {
    if let Some(n) = check_homotopy_rb(m, b, max_n)?.first_failure() {
        return Err(HomotopyError::NotHomotopyRb(n));
    }
    HomotopyNijenhuisAlgebra::from_deformation(&rb_deformation(m, b))
}

/// A homotopy relative Rota-Baxter operator that is not strict.
///
/// `A = k` with unit `e`; `M` has `u` in degree 0 and `w` in degree -1,
/// `ϱ_1(su) = sw`, `e` acts by the identity, and `B_1(su) = e`. The higher
/// `B_n` are obtained by [`solve_rb_component`].
pub fn two_term_rb_instance(max_n: usize) -> Result<(AInfinityOneBimodule, HomotopyRbOperator), HomotopyError> {
    let a = AlgebraPresentation::truncated_polynomial(1);
    let alg = AInfinityOneAlgebra::from_algebra(&a);
    let module = GradedSpace::new(vec![-1, 0]);
    let mut bm = AInfinityOneBimodule::new(&alg, &module);
    let (e, w, u) = (0, 1, 2);
    let mut d = GradedMap::zero(&bm.total, 1, -1, Shift::SV, Shift::SV);
    d.add_entry(&[u], w, Rational::one())?;
    bm.set(d)?;
    let mut act = GradedMap::zero(&bm.total, 2, 0, Shift::V, Shift::V);
    for x in [u, w] {
        act.add_entry(&[e, x], x, Rational::one())?;
        act.add_entry(&[x, e], x, Rational::one())?;
    }
    bm.set(suspend_alg(&act)?)?;
    let mut b = HomotopyRbOperator::zero();
    let mut b1 = GradedMap::zero(&bm.total, 1, -1, Shift::SV, Shift::V);
    b1.add_entry(&[u], e, Rational::one())?;
    b.set(&bm, b1)?;
    for n in 2..=max_n {
        let x = solve_rb_component(&bm, &b, n)?.ok_or(HomotopyError::NoSolution(n))?;
        if !x.is_zero() {
            b.set(&bm, x)?;
        }
    }
    Ok((bm, b))
}

/// A homotopy Nijenhuis algebra with `m_1 ≠ 0` whose `P_1` fails the strict
/// relation, corrected by `P_2`.
///
/// `V_0 = ⟨e, c⟩`, `V_1 = ⟨a⟩`, `m_1(a) = c`, `e` a unit and all other
/// products zero; `P_1(e) = e + c`, `P_1(c) = P_1(a) = 0`.
pub fn two_term_nijenhuis_instance(max_n: usize) -> Result<HomotopyNijenhuisAlgebra, HomotopyError> {
    let space = GradedSpace::new(vec![0, 0, 1]);
    let (e, c, a) = (0, 1, 2);
    let mut h = HomotopyNijenhuisAlgebra::new(&space);
    let mut m1 = GradedMap::zero(&space, 1, -1, Shift::V, Shift::V);
    m1.add_entry(&[a], c, Rational::one())?;
    h.set_m(m1)?;
    let mut m2 = GradedMap::zero(&space, 2, 0, Shift::V, Shift::V);
    for x in [e, c, a] {
        m2.add_entry(&[e, x], x, Rational::one())?;
        if x != e {
            m2.add_entry(&[x, e], x, Rational::one())?;
        }
    }
    h.set_m(m2)?;
    let mut p1 = GradedMap::zero(&space, 1, 0, Shift::V, Shift::V);
    p1.add_entry(&[e], e, Rational::one())?;
    p1.add_entry(&[e], c, Rational::one())?;
    h.set_p(p1)?;
    for n in 2..=max_n {
        let x = solve_operator_component(&h, n)?.ok_or(HomotopyError::NoSolution(n))?;
        if !x.is_zero() {
            h.set_p(x)?;
        }
    }
    Ok(h)
}

/// Like [`two_term_nijenhuis_instance`] with an extra square-zero class `f`,
/// so that the homology is `k[f]/f^2` carrying `P = diag(1, 2)`.
pub fn two_term_dual_instance(max_n: usize) -> Result<HomotopyNijenhuisAlgebra, HomotopyError> {
    let space = GradedSpace::new(vec![0, 0, 0, 1]);
    let (e, f, c, a) = (0, 1, 2, 3);
    let mut h = HomotopyNijenhuisAlgebra::new(&space);
    let mut m1 = GradedMap::zero(&space, 1, -1, Shift::V, Shift::V);
    m1.add_entry(&[a], c, Rational::one())?;
    h.set_m(m1)?;
    let mut m2 = GradedMap::zero(&space, 2, 0, Shift::V, Shift::V);
    for x in [e, f, c, a] {
        m2.add_entry(&[e, x], x, Rational::one())?;
        if x != e {
            m2.add_entry(&[x, e], x, Rational::one())?;
        }
    }
    h.set_m(m2)?;
    let mut p1 = GradedMap::zero(&space, 1, 0, Shift::V, Shift::V);
    p1.add_entry(&[e], e, Rational::one())?;
    p1.add_entry(&[e], c, Rational::one())?;
    p1.add_entry(&[f], f, Rational::from_integer(2.into()))?;
    h.set_p(p1)?;
    for n in 2..=max_n {
        let x = solve_operator_component(&h, n)?.ok_or(HomotopyError::NoSolution(n))?;
        if !x.is_zero() {
            h.set_p(x)?;
        }
    }
    Ok(h)
}
