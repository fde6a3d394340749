//! The L∞-algebra `C_Alg(V) ⊕ C_NjO(V)` controlling Nijenhuis structures,
//! its Maurer-Cartan equations, twisting by Maurer-Cartan elements and
//! the graded Lie bracket on operators.
//!
//! Brackets are graded antisymmetric with `|l_n| = n - 2`; the permutation
//! sign `χ` is the Koszul sign times the sign of the permutation.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra_core::{check_associativity, check_nijenhuis, AlgebraPresentation, LinearOperator, NijenhuisAlgebra};
use crate::brace_calculus::{
    antisymmetric_koszul_sign, gerstenhaber, suspend_alg, suspend_njo, BraceError, GradedMap, GradedSpace, Shift,
};
use crate::cohomology::CochainSpace;
use crate::exactlin::{rat, sign, Rational, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinfError {
    #[error(transparent)]
    Brace(#[from] BraceError),
    #[error("twisting needs an element of degree -1, found a component of degree {0}")]
    NotDegreeMinusOne(i64),
    #[error("component has the wrong domain or codomain for its part")]
    WrongPart,
    #[error("operation of arity {arity} cannot take {args} operator arguments")]
    ArityMismatch { arity: usize, args: usize },
    #[error("not a Nijenhuis operator ({0} violations)")]
    NotNijenhuis(usize),
    #[error("multiplication is not associative ({0} violations)")]
    NotAssociative(usize),
    #[error("element is not Maurer-Cartan (first failure at arity {0})")]
    NotMc(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    /// `Hom(T(sV), sV)`
    Alg,
    /// `Hom(T(sV), V)`
    Njo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub part: Part,
    pub map: GradedMap,
}

impl Component {
    pub fn alg(map: GradedMap) -> Result<Self, LinfError> {
        if map.domain() != Shift::SV || map.codomain() != Shift::SV {
            return Err(LinfError::WrongPart);
        }
        Ok(Component { part: Part::Alg, map })
    }

    pub fn njo(map: GradedMap) -> Result<Self, LinfError> {
        if map.domain() != Shift::SV || map.codomain() != Shift::V {
            return Err(LinfError::WrongPart);
        }
        Ok(Component { part: Part::Njo, map })
    }

    pub fn degree(&self) -> i64 {
        self.map.degree()
    }

    pub fn arity(&self) -> usize {
        self.map.arity()
    }

    pub fn scale(&self, c: &Rational) -> Component {
        Component { part: self.part, map: self.map.scale(c) }
    }
}

/// Sum of homogeneous components, merged by part, arity and degree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinfElement {
    comps: BTreeMap<(Part, usize, i64), GradedMap>,
}

impl LinfElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_components(cs: impl IntoIterator<Item = Component>) -> Self {
        let mut e = Self::zero();
        for c in cs {
            e.add_component(c);
        }
        e
    }

    pub fn add_component(&mut self, c: Component) {
        if c.map.is_zero() {
            return;
        }
        let key = (c.part, c.arity(), c.degree());
        match self.comps.remove(&key) {
            Some(old) => {
                let s = old.add(&c.map).expect("same shape");
                if !s.is_zero() {
                    self.comps.insert(key, s);
                }
            }
            None => {
                self.comps.insert(key, c.map);
            }
        }
    }

    pub fn add_assign(&mut self, other: &LinfElement) {
        for c in other.components() {
            self.add_component(c);
        }
    }

    pub fn scale(&self, s: &Rational) -> LinfElement {
        LinfElement::from_components(self.components().map(|c| c.scale(s)))
    }

    pub fn components(&self) -> impl Iterator<Item = Component> + '_ {
        self.comps.iter().map(|(k, m)| Component { part: k.0, map: m.clone() })
    }

    pub fn component(&self, part: Part, arity: usize) -> Option<&GradedMap> {
        self.comps.iter().find(|(k, _)| k.0 == part && k.1 == arity).map(|(_, m)| m)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn max_alg_arity(&self) -> usize {
        self.comps.keys().filter(|k| k.0 == Part::Alg).map(|k| k.1).max().unwrap_or(0)
    }
}

/// `l_2(sf ⊗ sh) = [sf, sh]`.
pub fn l2_alg(sf: &GradedMap, sh: &GradedMap) -> Result<GradedMap, LinfError> {
    Ok(gerstenhaber(sf, sh)?)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `l_{n+1}(sh ⊗ g_1 ⊗ ... ⊗ g_n)` with `sh` of arity `n`.
pub fn l_mixed(sh: &GradedMap, gs: &[&GradedMap]) -> Result<GradedMap, LinfError> {
    let n = gs.len();
    let h1 = sh.degree();
    let degree = h1 - 1 + gs.iter().map(|g| g.degree()).sum::<i64>() + n as i64;
    let arity: usize = gs.iter().map(|g| g.arity()).sum();
    let mut out = GradedMap::zero(sh.space(), arity, degree, Shift::SV, Shift::V);
    if sh.arity() != n || n == 0 {
        return Err(LinfError::ArityMismatch { arity: sh.arity(), args: n });
    }
    let degs: Vec<i64> = gs.iter().map(|g| g.degree()).collect();
    let sgs: Vec<GradedMap> = gs.iter().map(|g| g.suspend_output()).collect();
    // equal arguments share a class so repeated arrangements are computed once
    let mut class = vec![0usize; n];
    for i in 0..n {
        class[i] = (0..i).find(|&j| gs[j] == gs[i]).map_or(i, |j| class[j]);
    }
    let mut memo: HashMap<Vec<usize>, GradedMap> = HashMap::new();
    let mut total: HashMap<Vec<usize>, Rational> = HashMap::new();
    for perm in permutations(n) {
        let chi = antisymmetric_koszul_sign(&perm, &degs);
        let mut eta = n as i64 * h1;
        let mut run = 0i64;
        for k in 0..n.saturating_sub(1) {
            run += degs[perm[k]];
            eta += run;
        }
        let key: Vec<usize> = perm.iter().map(|&p| class[p]).collect();
        *total.entry(key.clone()).or_insert_with(Rational::zero) += sign(eta) * rat(chi);
        if let std::collections::hash_map::Entry::Vacant(e) = memo.entry(key) {
            let mut acc = GradedMap::zero(sh.space(), arity, degree + 1, Shift::SV, Shift::SV);
            let arranged: Vec<&GradedMap> = perm.iter().map(|&p| &sgs[p]).collect();
            let mut prefix = 0i64;
            for k in 0..=n {
                if k > 0 {
                    prefix += degs[perm[k - 1]] + 1;
                }
                let xi = h1 * prefix + k as i64;
                let mut inner = sh.brace(&arranged[k..])?;
                for q in (0..k).rev() {
                    inner = arranged[q].brace(&[&inner])?;
                }
                acc = acc.add(&inner.scale(&sign(xi)))?;
            }
            e.insert(acc);
        }
    }
    for (key, c) in total {
        if c.is_zero() {
            continue;
        }
        out = out.add(&memo[&key].desuspend_output().scale(&c))?;
    }
    Ok(out)
}

/// `l_{n+1}(g_1 ⊗ .. ⊗ g_k ⊗ sh ⊗ g_{k+1} ⊗ .. ⊗ g_n)`.
pub fn l_mixed_positioned(pre: &[&GradedMap], sh: &GradedMap, post: &[&GradedMap]) -> Result<GradedMap, LinfError> {
    let before: i64 = pre.iter().map(|g| g.degree()).sum();
    let gs: Vec<&GradedMap> = pre.iter().chain(post.iter()).copied().collect();
    let m = l_mixed(sh, &gs)?;
    Ok(m.scale(&sign(sh.degree() * before + pre.len() as i64)))
}

/// `l_n` on homogeneous components, in any argument order. `None` for the
/// components that vanish identically.
pub fn l_n_full(args: &[&Component]) -> Result<Option<Component>, LinfError> {
    let n = args.len();
    let algs: Vec<usize> = (0..n).filter(|&i| args[i].part == Part::Alg).collect();
    if n == 2 && algs.len() == 2 {
        return Ok(Some(Component { part: Part::Alg, map: l2_alg(&args[0].map, &args[1].map)? }));
    }
    if algs.len() != 1 || n < 2 {
        return Ok(None);
    }
    let k = algs[0];
    let sh = &args[k].map;
    if sh.arity() != n - 1 {
        return Ok(None);
    }
    let pre: Vec<&GradedMap> = args[..k].iter().map(|c| &c.map).collect();
    let post: Vec<&GradedMap> = args[k + 1..].iter().map(|c| &c.map).collect();
    Ok(Some(Component { part: Part::Njo, map: l_mixed_positioned(&pre, sh, &post)? }))
}

/// Multilinear extension of [`l_n_full`] to sums of components.
pub fn bracket_elements(args: &[&LinfElement]) -> Result<LinfElement, LinfError> {
    let lists: Vec<Vec<Component>> = args.iter().map(|a| a.components().collect()).collect();
    let mut out = LinfElement::zero();
    let mut idx = vec![0usize; args.len()];
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(out);
    }
    loop {
        let picked: Vec<&Component> = idx.iter().enumerate().map(|(j, &i)| &lists[j][i]).collect();
        if let Some(c) = l_n_full(&picked)? {
            out.add_component(c);
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(out);
            }
            idx[j] += 1;
            if idx[j] < lists[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Increasing `size`-subsets of `0..n`.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..=n - left {
            cur.push(x);
            go(x + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        go(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * b)
}

fn multisets(c: usize, size: usize) -> Vec<Vec<usize>> {
    // counts per class
    if c == 0 {
        return if size == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=size {
        for mut rest in multisets(c - 1, size - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Twisted bracket `l_k^α(x_1..x_k) = Σ_i (-1)^{i(i-1)/2 + ik} / i! l_{i+k}(α^{⊗i} ⊗ x)`.
pub fn twist_bracket(alpha: &LinfElement, xs: &[&Component]) -> Result<LinfElement, LinfError> {
    let acomps: Vec<Component> = alpha.components().collect();
    for c in &acomps {
        if c.degree() != -1 {
            return Err(LinfError::NotDegreeMinusOne(c.degree()));
        }
    }
    let k = xs.len();
    let max_alg = acomps
        .iter()
        .chain(xs.iter().copied())
        .filter(|c| c.part == Part::Alg)
        .map(|c| c.arity())
        .max()
        .unwrap_or(0);
    let max_i = (max_alg + 1).max(2).saturating_sub(k).max(1);
    let mut out = LinfElement::zero();
    for i in 0..=max_i {
        let e = (i * i.saturating_sub(1) / 2 + i * k) as i64;
        for counts in multisets(acomps.len(), i) {
            let mut args: Vec<&Component> = Vec::new();
            let mut denom = BigInt::one();
            for (j, &cnt) in counts.iter().enumerate() {
                denom *= factorial(cnt);
                for _ in 0..cnt {
                    args.push(&acomps[j]);
                }
            }
            args.extend(xs.iter().copied());
            if let Some(c) = l_n_full(&args)? {
                let coef = sign(e) / Rational::from_integer(denom);
                out.add_component(c.scale(&coef));
            }
        }
    }
    Ok(out)
}

pub fn twist_l1(alpha: &LinfElement, x: &Component) -> Result<LinfElement, LinfError> {
    twist_bracket(alpha, &[x])
}

pub fn twist_l1_element(alpha: &LinfElement, x: &LinfElement) -> Result<LinfElement, LinfError> {
    let mut out = LinfElement::zero();
    for c in x.components() {
        out.add_assign(&twist_l1(alpha, &c)?);
    }
    Ok(out)
}

/// Sum of the generalized Jacobi expressions of total arity `xs.len()`,
/// with `l_1 = 0`.
pub fn jacobi_defect(xs: &[&Component]) -> Result<LinfElement, LinfError> {
    let n = xs.len();
    let degs: Vec<i64> = xs.iter().map(|c| c.degree()).collect();
    let mut out = LinfElement::zero();
    for i in 2..n {
        let j = n + 1 - i;
        for chosen in subsets(n, i) {
            let rest: Vec<usize> = (0..n).filter(|x| !chosen.contains(x)).collect();
            let perm: Vec<usize> = chosen.iter().chain(rest.iter()).copied().collect();
            let chi = antisymmetric_koszul_sign(&perm, &degs);
            let inner_args: Vec<&Component> = chosen.iter().map(|&x| xs[x]).collect();
            let Some(inner) = l_n_full(&inner_args)? else { continue };
            let mut outer_args: Vec<&Component> = vec![&inner];
            outer_args.extend(rest.iter().map(|&x| xs[x]));
            if let Some(c) = l_n_full(&outer_args)? {
                let s = rat(chi) * sign((i * (j - 1)) as i64);
                out.add_component(c.scale(&s));
            }
        }
    }
    Ok(out)
}

/// A candidate Maurer-Cartan element: `b_i: sV^{⊗i} -> sV` and
/// `R_i: sV^{⊗i} -> V`, all of degree -1.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationElement {
    pub space: GradedSpace,
    pub b: BTreeMap<usize, GradedMap>,
    pub r: BTreeMap<usize, GradedMap>,
}

impl DeformationElement {
    pub fn new(space: &GradedSpace) -> Self {
        DeformationElement { space: space.clone(), b: BTreeMap::new(), r: BTreeMap::new() }
    }

    pub fn to_linf(&self) -> LinfElement {
        let mut e = LinfElement::zero();
        for m in self.b.values() {
            e.add_component(Component { part: Part::Alg, map: m.clone() });
        }
        for m in self.r.values() {
            e.add_component(Component { part: Part::Njo, map: m.clone() });
        }
        e
    }

    pub fn max_arity(&self) -> usize {
        self.b.keys().chain(self.r.keys()).copied().max().unwrap_or(0)
    }
}

/// `α = (ν, τ)` with `ν = -s ∘ m ∘ (s^{-1})^{⊗2}` and `τ = P ∘ s^{-1}`.
pub fn from_nijenhuis(n: &NijenhuisAlgebra) -> Result<DeformationElement, LinfError> {
    let r = check_nijenhuis(&n.algebra, &n.operator);
    if !r.passed() {
        return Err(LinfError::NotNijenhuis(r.violations.len()));
    }
    Ok(from_structure(n))
}

/// [`from_nijenhuis`] without the check, for perturbed data.
pub fn from_structure(n: &NijenhuisAlgebra) -> DeformationElement {
    let d = n.dim();
    let space = GradedSpace::ungraded(d);
    let mut m = GradedMap::zero(&space, 2, 0, Shift::V, Shift::V);
    for (i, j, k, c) in n.algebra.mult.triples() {
        m.add_entry(&[i, j], k, c).expect("degree 0");
    }
    let mut p = GradedMap::zero(&space, 1, 0, Shift::V, Shift::V);
    for r in 0..d {
        for c in 0..d {
            p.add_entry(&[c], r, n.operator.entry(r, c).clone()).expect("degree 0");
        }
    }
    let mut e = DeformationElement::new(&space);
    e.b.insert(2, suspend_alg(&m).expect("V -> V"));
    e.r.insert(1, suspend_njo(&p).expect("V -> V"));
    e
}

/// Residuals of both Maurer-Cartan equations at arity `n`: the algebra part
/// `Σ b_{n-i+1}{b_i}` and the operator part, returned in `sV^{⊗n} -> sV`.
pub fn mc_residual(alpha: &DeformationElement, n: usize) -> Result<(GradedMap, GradedMap), LinfError> {
    let sp = &alpha.space;
    let mut alg = GradedMap::zero(sp, n, -2, Shift::SV, Shift::SV);
    for i in 1..=n {
        if let (Some(outer), Some(inner)) = (alpha.b.get(&(n - i + 1)), alpha.b.get(&i)) {
            alg = alg.add(&outer.brace(&[inner])?)?;
        }
    }
    let sr: BTreeMap<usize, GradedMap> = alpha.r.iter().map(|(&k, m)| (k, m.suspend_output())).collect();
    let mut njo = GradedMap::zero(sp, n, -1, Shift::SV, Shift::SV);
    for parts in crate::operad_forest::compositions(n) {
        let p = parts.len();
        let Some(bp) = alpha.b.get(&p) else { continue };
        let rs: Option<Vec<&GradedMap>> = parts.iter().map(|r| sr.get(r)).collect();
        let Some(rs) = rs else { continue };
        for t in 0..=p {
            let mut inner = bp.brace(&rs[t..])?;
            for q in (0..t).rev() {
                inner = rs[q].brace(&[&inner])?;
            }
            njo = njo.add(&inner.scale(&sign(t as i64)))?;
        }
    }
    Ok((alg, njo))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McReport {
    /// `(n, algebra residual vanishes, operator residual vanishes)`
    pub arities: Vec<(usize, bool, bool)>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.arities.iter().all(|&(_, a, b)| a && b)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.arities.iter().find(|&&(_, a, b)| !(a && b)).map(|&(n, _, _)| n)
    }
}

pub fn mc_check(alpha: &DeformationElement, max_n: usize) -> Result<McReport, LinfError> {
    let mut arities = Vec::new();
    for n in 1..=max_n {
        let (a, b) = mc_residual(alpha, n)?;
        arities.push((n, a.is_zero(), b.is_zero()));
    }
    Ok(McReport { arities })
}

/// Basis of `C_NjA(A)` for ungraded `A` in cochain degree `k`:
/// `Hom(sA^{⊗k}, sA) ⊕ Hom(sA^{⊗k-1}, A)` (the second summand absent for `k = 1`).
pub struct TwistedBasis {
    pub dim: usize,
}

impl TwistedBasis {
    pub fn alg_len(&self, k: usize) -> usize {
        CochainSpace::new(self.dim, self.dim, k).len()
    }

    pub fn njo_len(&self, k: usize) -> usize {
        if k <= 1 {
            0
        } else {
            CochainSpace::new(self.dim, self.dim, k - 1).len()
        }
    }

    pub fn len(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.alg_len(k) + self.njo_len(k)
        }
    }

    pub fn is_empty(&self, k: usize) -> bool {
        self.len(k) == 0
    }

    pub fn element(&self, space: &GradedSpace, k: usize, idx: usize) -> Component {
        let al = self.alg_len(k);
        if idx < al {
            let (o, inp) = CochainSpace::new(self.dim, self.dim, k).decode(idx);
            let mut m = GradedMap::zero(space, k, 1 - k as i64, Shift::SV, Shift::SV);
            m.add_entry(&inp, o, Rational::one()).expect("ungraded");
            Component { part: Part::Alg, map: m }
        } else {
            let (o, inp) = CochainSpace::new(self.dim, self.dim, k - 1).decode(idx - al);
            let mut m = GradedMap::zero(space, k - 1, 1 - k as i64, Shift::SV, Shift::V);
            m.add_entry(&inp, o, Rational::one()).expect("ungraded");
            Component { part: Part::Njo, map: m }
        }
    }

    pub fn coordinates(&self, k: usize, e: &LinfElement) -> BTreeMap<usize, Rational> {
        let mut col = BTreeMap::new();
        for c in e.components() {
            let (space, offset) = match c.part {
                Part::Alg => (CochainSpace::new(self.dim, self.dim, c.arity()), 0),
                Part::Njo => (CochainSpace::new(self.dim, self.dim, c.arity()), self.alg_len(k)),
            };
            let expected = if c.part == Part::Alg { k } else { k - 1 };
            assert_eq!(c.arity(), expected, "component outside cochain degree {k}");
            for (inp, o, v) in c.map.entries() {
                col.insert(offset + space.index(o, inp), v.clone());
            }
        }
        col
    }
}

/// Matrix of `l_1^α` from cochain degree `k` to `k + 1`.
pub fn twisted_differential(alpha: &DeformationElement, dim: usize, k: usize) -> Result<SparseMatrix, LinfError> {
    let basis = TwistedBasis { dim };
    let a = alpha.to_linf();
    let mut cols = Vec::with_capacity(basis.len(k));
    for idx in 0..basis.len(k) {
        let x = basis.element(&alpha.space, k, idx);
        let y = twist_l1(&a, &x)?;
        cols.push(basis.coordinates(k + 1, &y));
    }
    Ok(SparseMatrix::from_columns(basis.len(k + 1), cols).expect("rows in range"))
}

/// Cohomology of `(C_NjA(A), l_1^α)` in cochain degrees `1..=max_k`.
pub fn twisted_cohomology(alpha: &DeformationElement, dim: usize, max_k: usize) -> Result<Vec<usize>, LinfError> {
    let mut mats = Vec::new();
    for k in 1..=max_k {
        mats.push(twisted_differential(alpha, dim, k)?);
    }
    let mut out = Vec::new();
    for k in 1..=max_k {
        let d_out = &mats[k - 1];
        let d_in = if k == 1 { SparseMatrix::zero(d_out.ncols(), 0) } else { mats[k - 2].clone() };
        out.push(crate::exactlin::cohomology_dim(d_out, &d_in).expect("twisted differential squares to zero"));
    }
    Ok(out)
}

/// Twisted cohomology of a verified Nijenhuis algebra in cochain degrees
/// `1..=max_n`; degree `k` is twisted degree `1 - k`.
pub fn twisted_cohomology_dims(n: &NijenhuisAlgebra, max_n: usize) -> Result<Vec<usize>, LinfError> {
    let alpha = from_nijenhuis(n)?;
    twisted_cohomology(&alpha, n.dim(), max_n)
}

/// Largest output arity at which truncated sums over `α` are complete when
/// `α` is only known up to arity `n`.
pub fn trust_horizon(alpha: &DeformationElement, n: usize) -> usize {
    (n + 1).saturating_sub(alpha.max_arity().max(1))
}

/// `(l_1^α)^2 = 0` on every basis element of cochain degree `1..=max_k`.
pub fn twist_square_zero(alpha: &DeformationElement, dim: usize, max_k: usize) -> Result<Vec<bool>, LinfError> {
    let mut prev = twisted_differential(alpha, dim, 1)?;
    let mut out = Vec::new();
    for k in 1..=max_k {
        let next = twisted_differential(alpha, dim, k + 1)?;
        out.push(next.mul(&prev).expect("shapes agree").is_zero());
        prev = next;
    }
    Ok(out)
}

/// The graded Lie bracket `l_2^{(ν,0)}` on `C_NjO(A)` for associative `A`.
#[derive(Clone, Debug)]
pub struct NjoBracket {
    nu: GradedMap,
    alpha: LinfElement,
}

impl NjoBracket {
    pub fn new(a: &AlgebraPresentation) -> Result<Self, LinfError> {
        let r = check_associativity(a);
        if !r.passed() {
            return Err(LinfError::NotAssociative(r.violations.len()));
        }
        let n = NijenhuisAlgebra::new_unchecked(a.clone(), LinearOperator::zero(a.dim(), a.dim()));
        let nu = from_structure(&n).b[&2].clone();
        let alpha = LinfElement::from_components([Component::alg(nu.clone())?]);
        Ok(NjoBracket { nu, alpha })
    }

    pub fn nu(&self) -> &GradedMap {
        &self.nu
    }

    pub fn bracket(&self, f: &GradedMap, g: &GradedMap) -> Result<GradedMap, LinfError> {
        let cf = Component::njo(f.clone())?;
        let cg = Component::njo(g.clone())?;
        let r = twist_bracket(&self.alpha, &[&cf, &cg])?;
        let mut out = GradedMap::zero(f.space(), f.arity() + g.arity(), f.degree() + g.degree(), Shift::SV, Shift::V);
        for c in r.components() {
            out = out.add(&c.map)?;
        }
        Ok(out)
    }

    /// `τ = P ∘ s^{-1}`.
    pub fn tau(&self, p: &LinearOperator) -> GradedMap {
        let mut m = GradedMap::zero(self.nu.space(), 1, -1, Shift::SV, Shift::V);
        for r in 0..p.nrows() {
            for c in 0..p.ncols() {
                m.add_entry(&[c], r, p.entry(r, c).clone()).expect("ungraded");
            }
        }
        m
    }

    /// Maurer-Cartan equation `-1/2 l_2^α(τ, τ) = 0`.
    pub fn is_mc(&self, tau: &GradedMap) -> Result<bool, LinfError> {
        Ok(self.bracket(tau, tau)?.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::{AlgebraPresentation, LinearOperator};

    fn dual_numbers(p: &[&[i64]]) -> NijenhuisAlgebra {
        NijenhuisAlgebra::new_unchecked(AlgebraPresentation::truncated_polynomial(2), LinearOperator::from_int_rows(p))
    }

    #[test]
    fn strict_nijenhuis_gives_mc_element() {
        let n = dual_numbers(&[&[1, 0], &[1, 1]]);
        let a = from_nijenhuis(&n).unwrap();
        assert!(mc_check(&a, 4).unwrap().passed());
    }

    #[test]
    fn twisted_l1_squares_to_zero() {
        let n = dual_numbers(&[&[0, 0], &[1, 0]]);
        let a = from_nijenhuis(&n).unwrap();
        let d1 = twisted_differential(&a, 2, 1).unwrap();
        let d2 = twisted_differential(&a, 2, 2).unwrap();
        let d3 = twisted_differential(&a, 2, 3).unwrap();
        assert!(d2.mul(&d1).unwrap().is_zero());
        assert!(d3.mul(&d2).unwrap().is_zero());
    }

    #[test]
    fn mixed_bracket_is_antisymmetric_in_operator_slots() {
        let sp = GradedSpace::ungraded(2);
        let n = dual_numbers(&[&[1, 0], &[1, 1]]);
        let a = from_nijenhuis(&n).unwrap();
        let nu = a.b[&2].clone();
        let tau = a.r[&1].clone();
        let mut g = GradedMap::zero(&sp, 1, -1, Shift::SV, Shift::V);
        g.add_entry(&[1], 0, rat(1)).unwrap();
        let x = l_mixed(&nu, &[&tau, &g]).unwrap();
        let y = l_mixed(&nu, &[&g, &tau]).unwrap();
        // both arguments have degree -1: χ(swap) = +1
        assert_eq!(x, y);
    }
}
