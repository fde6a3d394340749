//! Multilinear maps on a graded space `V` or its suspension `sV`, with
//! brace operations, the Gerstenhaber bracket and the suspension
//! isomorphisms.
//!
//! Signs follow the Koszul rule with `|s| = +1`: in `f{g_1,...,g_k}` each
//! `g_j` picks up `(-1)^{|g_j| * (degrees of the inputs to its left)}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraceError {
    #[error("brace needs {needed} slots but the map has arity {arity}")]
    ArityUnderflow { needed: usize, arity: usize },
    #[error("codomain mismatch: {0}")]
    CodomainMismatch(String),
    #[error("entry violates the declared degree {declared} (found {found})")]
    DegreeViolation { declared: i64, found: i64 },
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("maps live on different spaces")]
    SpaceMismatch,
}

#[derive(Clone, PartialEq, Eq)]
pub struct GradedSpace {
    degrees: Arc<Vec<i64>>,
}

impl fmt::Debug for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedSpace{:?}", self.degrees)
    }
}

impl GradedSpace {
    pub fn new(degrees: Vec<i64>) -> Self {
        GradedSpace { degrees: Arc::new(degrees) }
    }

    pub fn ungraded(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// Basis ordered by ascending degree.
    pub fn from_counts(counts: &BTreeMap<i64, usize>) -> Self {
        let mut d = Vec::new();
        for (&deg, &c) in counts {
            d.extend(std::iter::repeat_n(deg, c));
        }
        Self::new(d)
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self::new(self.degrees.iter().map(|d| d + by).collect())
    }

    pub fn direct_sum(&self, other: &GradedSpace) -> Self {
        let mut d = self.degrees.as_ref().clone();
        d.extend(other.degrees.iter());
        Self::new(d)
    }
}

/// Whether inputs/outputs are read in `V` or in `sV`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shift {
    V,
    SV,
}

impl Shift {
    pub fn offset(self) -> i64 {
        match self {
            Shift::V => 0,
            Shift::SV => 1,
        }
    }
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

pub type Output = BTreeMap<usize, Rational>;

/// A homogeneous multilinear map `X^{⊗n} -> Y` with `X, Y ∈ {V, sV}`.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedMap {
    space: GradedSpace,
    arity: usize,
    degree: i64,
    domain: Shift,
    codomain: Shift,
    entries: BTreeMap<Vec<usize>, Output>,
}

impl fmt::Debug for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GradedMap(arity={}, degree={}, {:?}->{:?}, {} entries)",
            self.arity,
            self.degree,
            self.domain,
            self.codomain,
            self.nnz()
        )
    }
}

impl GradedMap {
    pub fn zero(space: &GradedSpace, arity: usize, degree: i64, domain: Shift, codomain: Shift) -> Self {
        GradedMap { space: space.clone(), arity, degree, domain, codomain, entries: BTreeMap::new() }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }
    pub fn arity(&self) -> usize {
        self.arity
    }
    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn domain(&self) -> Shift {
        self.domain
    }
    pub fn codomain(&self) -> Shift {
        self.codomain
    }

    pub fn in_degree(&self, i: usize) -> i64 {
        self.space.degree(i) + self.domain.offset()
    }

    pub fn out_degree(&self, i: usize) -> i64 {
        self.space.degree(i) + self.codomain.offset()
    }

    fn entry_degree(&self, inputs: &[usize], out: usize) -> i64 {
        self.out_degree(out) - inputs.iter().map(|&i| self.in_degree(i)).sum::<i64>()
    }

    /// Adds `c` to the coefficient of `out` at `inputs`, checking the degree.
    pub fn add_entry(&mut self, inputs: &[usize], out: usize, c: Rational) -> Result<(), BraceError> {
        let dim = self.space.dim();
        if inputs.len() != self.arity {
            return Err(BraceError::ArityUnderflow { needed: inputs.len(), arity: self.arity });
        }
        if let Some(&bad) = inputs.iter().chain(std::iter::once(&out)).find(|&&i| i >= dim) {
            return Err(BraceError::IndexOutOfRange(bad));
        }
        if c.is_zero() {
            return Ok(());
        }
        let found = self.entry_degree(inputs, out);
        if found != self.degree {
            return Err(BraceError::DegreeViolation { declared: self.degree, found });
        }
        self.add_unchecked(inputs.to_vec(), out, c);
        Ok(())
    }

    fn add_unchecked(&mut self, inputs: Vec<usize>, out: usize, c: Rational) {
        let o = self.entries.entry(inputs).or_default();
        let e = o.entry(out).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            o.remove(&out);
        }
    }

    fn prune(&mut self) {
        self.entries.retain(|_, o| !o.is_empty());
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, usize, &Rational)> {
        self.entries.iter().flat_map(|(k, o)| o.iter().map(move |(&out, c)| (k, out, c)))
    }

    pub fn nnz(&self) -> usize {
        self.entries.values().map(|o| o.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|o| o.is_empty())
    }

    pub fn get(&self, inputs: &[usize], out: usize) -> Rational {
        self.entries.get(inputs).and_then(|o| o.get(&out)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn evaluate(&self, inputs: &[usize]) -> Output {
        self.entries.get(inputs).cloned().unwrap_or_default()
    }

    fn same_shape(&self, other: &GradedMap) -> Result<(), BraceError> {
        if self.space != other.space {
            return Err(BraceError::SpaceMismatch);
        }
        if self.arity != other.arity
            || self.domain != other.domain
            || self.codomain != other.codomain
            || (self.degree != other.degree && !self.is_zero() && !other.is_zero())
        {
            return Err(BraceError::CodomainMismatch(format!("cannot add {self:?} and {other:?}")));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap, BraceError> {
        self.same_shape(other)?;
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        let src = if self.is_zero() { None } else { Some(other) };
        if let Some(src) = src {
            for (k, o, c) in src.entries() {
                out.add_unchecked(k.clone(), o, c.clone());
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap, BraceError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> GradedMap {
        let mut out = GradedMap::zero(&self.space, self.arity, self.degree, self.domain, self.codomain);
        if s.is_zero() {
            return out;
        }
        for (k, o) in &self.entries {
            let v: Output = o.iter().map(|(&i, c)| (i, c * s)).collect();
            out.entries.insert(k.clone(), v);
        }
        out
    }

    pub fn neg(&self) -> GradedMap {
        self.scale(&-Rational::one())
    }

    /// `s ∘ f`
    pub fn suspend_output(&self) -> GradedMap {
        assert_eq!(self.codomain, Shift::V);
        let mut g = self.clone();
        g.codomain = Shift::SV;
        g.degree += 1;
        g
    }

    /// `s^{-1} ∘ f`
    pub fn desuspend_output(&self) -> GradedMap {
        assert_eq!(self.codomain, Shift::SV);
        let mut g = self.clone();
        g.codomain = Shift::V;
        g.degree -= 1;
        g
    }

    /// `f ∘ (id ⊗ ... ⊗ g_j ⊗ ... ⊗ id)` where `slots[j]` is `None` for `id`.
    pub fn compose_slots(&self, slots: &[Option<&GradedMap>]) -> Result<GradedMap, BraceError> {
        if slots.len() != self.arity {
            return Err(BraceError::ArityUnderflow { needed: slots.len(), arity: self.arity });
        }
        let mut arity = 0;
        let mut degree = self.degree;
        for g in slots {
            match g {
                None => arity += 1,
                Some(g) => {
                    if g.space != self.space {
                        return Err(BraceError::SpaceMismatch);
                    }
                    if g.codomain != self.domain || g.domain != self.domain {
                        return Err(BraceError::CodomainMismatch(format!(
                            "inserting {g:?} into inputs of {:?}",
                            self.domain
                        )));
                    }
                    arity += g.arity;
                    degree += g.degree;
                }
            }
        }
        let mut out = GradedMap::zero(&self.space, arity, degree, self.domain, self.codomain);
        let by_output: Vec<Option<HashMap<usize, Vec<(&Vec<usize>, &Rational)>>>> = slots
            .iter()
            .map(|g| {
                g.map(|g| {
                    let mut h: HashMap<usize, Vec<(&Vec<usize>, &Rational)>> = HashMap::new();
                    for (k, o) in &g.entries {
                        for (&y, c) in o {
                            h.entry(y).or_default().push((k, c));
                        }
                    }
                    h
                })
            })
            .collect();
        let gdeg: Vec<i64> = slots.iter().map(|g| g.map_or(0, |g| g.degree)).collect();
        for (ys, outs) in &self.entries {
            let mut partial: Vec<(Vec<usize>, i64, bool, Rational)> = vec![(Vec::new(), 0, false, Rational::one())];
            for (j, &y) in ys.iter().enumerate() {
                let mut next = Vec::new();
                match &by_output[j] {
                    None => {
                        for (inp, dsum, neg, c) in partial {
                            let mut inp = inp;
                            inp.push(y);
                            let d = self.in_degree(y);
                            next.push((inp, dsum + d, neg, c));
                        }
                    }
                    Some(h) => {
                        let Some(cands) = h.get(&y) else {
                            partial = Vec::new();
                            break;
                        };
                        for (inp, dsum, neg, c) in &partial {
                            let flip = odd(gdeg[j]) && odd(*dsum);
                            for (gin, gc) in cands {
                                let mut inp2 = inp.clone();
                                inp2.extend_from_slice(gin);
                                let d: i64 = gin.iter().map(|&i| self.in_degree(i)).sum();
                                next.push((inp2, dsum + d, neg ^ flip, c * *gc));
                            }
                        }
                    }
                }
                partial = next;
            }
            for (inp, _, neg, c) in partial {
                for (&o, fc) in outs {
                    let v = if neg { -(fc * &c) } else { fc * &c };
                    out.add_unchecked(inp.clone(), o, v);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// `self ∘_i g` (1-based), i.e. a single insertion.
    pub fn compose_at(&self, i: usize, g: &GradedMap) -> Result<GradedMap, BraceError> {
        if i == 0 || i > self.arity {
            return Err(BraceError::ArityUnderflow { needed: i, arity: self.arity });
        }
        let mut slots: Vec<Option<&GradedMap>> = vec![None; self.arity];
        slots[i - 1] = Some(g);
        self.compose_slots(&slots)
    }

    /// `f{g_1, ..., g_k}`; zero when `k` exceeds the arity of `f`.
    pub fn brace(&self, gs: &[&GradedMap]) -> Result<GradedMap, BraceError> {
        let k = gs.len();
        for g in gs {
            if g.codomain != self.domain || g.domain != self.domain {
                return Err(BraceError::CodomainMismatch(format!("brace argument {g:?}")));
            }
        }
        if k == 0 {
            return Ok(self.clone());
        }
        let arity = self.arity + gs.iter().map(|g| g.arity).sum::<usize>() - k;
        let degree = self.degree + gs.iter().map(|g| g.degree).sum::<i64>();
        let mut acc = GradedMap::zero(&self.space, arity, degree, self.domain, self.codomain);
        for pos in increasing(k, self.arity) {
            let mut slots: Vec<Option<&GradedMap>> = vec![None; self.arity];
            for (j, &p) in pos.iter().enumerate() {
                slots[p] = Some(gs[j]);
            }
            let term = self.compose_slots(&slots)?;
            for (kk, o, c) in term.entries() {
                acc.add_unchecked(kk.clone(), o, c.clone());
            }
        }
        acc.prune();
        Ok(acc)
    }
}

fn increasing(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, from: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in from..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(k, v + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, 0, n, &mut Vec::new(), &mut out);
    out
}

pub fn brace(f: &GradedMap, gs: &[&GradedMap]) -> Result<GradedMap, BraceError> {
    f.brace(gs)
}

/// `[a, b] = a{b} - (-1)^{|a||b|} b{a}` on maps `sV^{⊗n} -> sV`.
pub fn gerstenhaber(a: &GradedMap, b: &GradedMap) -> Result<GradedMap, BraceError> {
    let ab = a.brace(&[b])?;
    let ba = b.brace(&[a])?;
    if odd(a.degree) && odd(b.degree) {
        ab.add(&ba)
    } else {
        ab.sub(&ba)
    }
}

/// Sign of permuting homogeneous elements: `perm[j]` is the old position of
/// the element placed at `j`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> i64 {
    let mut neg = false;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && odd(degrees[perm[a]]) && odd(degrees[perm[b]]) {
                neg = !neg;
            }
        }
    }
    if neg {
        -1
    } else {
        1
    }
}

/// Koszul sign times the sign of the permutation.
pub fn antisymmetric_koszul_sign(perm: &[usize], degrees: &[i64]) -> i64 {
    let mut inv = 0;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                inv += 1;
            }
        }
    }
    koszul_sign(perm, degrees) * if inv % 2 == 0 { 1 } else { -1 }
}

// (-1)^{Σ_i (n-i)|v_i|}: the sign of s^{⊗n} on v_1 ⊗ ... ⊗ v_n
fn tensor_suspension_negative(space: &GradedSpace, inputs: &[usize]) -> bool {
    let n = inputs.len();
    let mut e = 0;
    for (i, &v) in inputs.iter().enumerate() {
        e += (n - 1 - i) as i64 * space.degree(v);
    }
    odd(e)
}

fn reframe(f: &GradedMap, domain: Shift, codomain: Shift, degree: i64) -> GradedMap {
    let mut out = GradedMap::zero(&f.space, f.arity, degree, domain, codomain);
    for (k, o) in &f.entries {
        let neg = tensor_suspension_negative(&f.space, k);
        let v: Output = o.iter().map(|(&i, c)| (i, if neg { -c.clone() } else { c.clone() })).collect();
        out.entries.insert(k.clone(), v);
    }
    out
}

/// `b ↦ s^{-1} ∘ b ∘ s^{⊗n}`: from `sV^{⊗n} -> sV` to `V^{⊗n} -> V`.
pub fn desuspend_alg(b: &GradedMap) -> Result<GradedMap, BraceError> {
    if b.domain != Shift::SV || b.codomain != Shift::SV {
        return Err(BraceError::CodomainMismatch("expected sV -> sV".into()));
    }
    Ok(reframe(b, Shift::V, Shift::V, b.degree + b.arity as i64 - 1))
}

/// Inverse of [`desuspend_alg`].
pub fn suspend_alg(m: &GradedMap) -> Result<GradedMap, BraceError> {
    if m.domain != Shift::V || m.codomain != Shift::V {
        return Err(BraceError::CodomainMismatch("expected V -> V".into()));
    }
    Ok(reframe(m, Shift::SV, Shift::SV, m.degree - m.arity as i64 + 1))
}

/// `r ↦ r ∘ s^{⊗n}`: from `sV^{⊗n} -> V` to `V^{⊗n} -> V`.
pub fn desuspend_njo(r: &GradedMap) -> Result<GradedMap, BraceError> {
    if r.domain != Shift::SV || r.codomain != Shift::V {
        return Err(BraceError::CodomainMismatch("expected sV -> V".into()));
    }
    Ok(reframe(r, Shift::V, Shift::V, r.degree + r.arity as i64))
}

/// Inverse of [`desuspend_njo`].
pub fn suspend_njo(p: &GradedMap) -> Result<GradedMap, BraceError> {
    if p.domain != Shift::V || p.codomain != Shift::V {
        return Err(BraceError::CodomainMismatch("expected V -> V".into()));
    }
    Ok(reframe(p, Shift::SV, Shift::V, p.degree - p.arity as i64))
}
