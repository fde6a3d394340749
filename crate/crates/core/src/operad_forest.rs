//! Planar tree monomials in the free graded nonsymmetric operad on the
//! generators `m_n, P_n` (or `x_n, y_n`), the cobar differentials and the
//! path-lexicographic monomial order.
//!
//! A monomial is stored as its preorder traversal with explicit leaves.
//! Its sign reference is the product of its vertices in that order, so
//! every composition is a Koszul reordering of vertices.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error("leaf index {index} out of range for arity {arity}")]
    LeafOutOfRange { index: usize, arity: usize },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("cannot parse tree {0:?}")]
    Parse(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Family {
    M,
    P,
    X,
    Y,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator {
    pub family: Family,
    pub arity: u8,
}

impl Generator {
    pub fn new(family: Family, arity: usize) -> Result<Self, OperadError> {
        let min = match family {
            Family::M | Family::X => 2,
            Family::P | Family::Y => 1,
        };
        if arity < min || arity > 250 {
            return Err(OperadError::UnknownGenerator(format!("{family:?}{arity}")));
        }
        Ok(Generator { family, arity: arity as u8 })
    }

    pub fn m(n: usize) -> Self {
        Self::new(Family::M, n).expect("m_n needs n >= 2")
    }
    pub fn p(n: usize) -> Self {
        Self::new(Family::P, n).expect("P_n needs n >= 1")
    }
    pub fn x(n: usize) -> Self {
        Self::new(Family::X, n).expect("x_n needs n >= 2")
    }
    pub fn y(n: usize) -> Self {
        Self::new(Family::Y, n).expect("y_n needs n >= 1")
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn degree(&self) -> i64 {
        let n = self.arity as i64;
        match self.family {
            Family::M => n - 2,
            Family::P => n - 1,
            Family::X => -1,
            Family::Y => 0,
        }
    }

    /// Weight used by the path order: `m_n -> n-1`, `P_n -> 2n-1`.
    pub fn weight_phi(&self) -> usize {
        let n = self.arity as usize;
        match self.family {
            Family::M | Family::X => n - 1,
            Family::P | Family::Y => 2 * n - 1,
        }
    }

    /// Letter order `P_1 < m_2 < P_2 < m_3 < ...`.
    pub fn letter_rank(&self) -> usize {
        let n = self.arity as usize;
        match self.family {
            Family::M | Family::X => 2 * n - 2,
            Family::P | Family::Y => 2 * n - 1,
        }
    }

    pub fn parse(s: &str) -> Result<Self, OperadError> {
        let bad = || OperadError::UnknownGenerator(s.to_string());
        let mut chars = s.chars();
        let family = match chars.next().ok_or_else(bad)? {
            'm' => Family::M,
            'P' | 'p' => Family::P,
            'x' => Family::X,
            'y' => Family::Y,
            _ => return Err(bad()),
        };
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        Self::new(family, n).map_err(|_| bad())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.family {
            Family::M => 'm',
            Family::P => 'P',
            Family::X => 'x',
            Family::Y => 'y',
        };
        write!(f, "{c}{}", self.arity)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Node {
    Leaf,
    Vertex(Generator),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TreeMonomial {
    nodes: Vec<Node>,
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

impl TreeMonomial {
    pub fn corolla(g: Generator) -> Self {
        let mut nodes = Vec::with_capacity(g.arity() + 1);
        nodes.push(Node::Vertex(g));
        nodes.extend(std::iter::repeat_n(Node::Leaf, g.arity()));
        TreeMonomial { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn arity(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf)).count()
    }

    /// Vertices in planar (preorder) order.
    pub fn vertices(&self) -> impl Iterator<Item = Generator> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Vertex(g) => Some(*g),
            Node::Leaf => None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().count()
    }

    pub fn degree(&self) -> i64 {
        self.vertices().map(|g| g.degree()).sum()
    }

    fn subtree_end(&self, pos: usize) -> usize {
        let mut need = 1usize;
        let mut k = pos;
        while need > 0 {
            need -= 1;
            if let Node::Vertex(g) = self.nodes[k] {
                need += g.arity();
            }
            k += 1;
        }
        k
    }

    fn leaf_position(&self, i: usize) -> Option<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Leaf))
            .nth(i.checked_sub(1)?)
            .map(|(k, _)| k)
    }

    /// `self ∘_i s` with its Koszul sign (`true` means negative).
    pub fn compose_at(&self, i: usize, s: &TreeMonomial) -> Result<(bool, TreeMonomial), OperadError> {
        let pos = self
            .leaf_position(i)
            .ok_or(OperadError::LeafOutOfRange { index: i, arity: self.arity() })?;
        let after: i64 = self.nodes[pos + 1..]
            .iter()
            .filter_map(|n| match n {
                Node::Vertex(g) => Some(g.degree()),
                Node::Leaf => None,
            })
            .sum();
        let neg = odd(after) && odd(s.degree());
        let mut nodes = Vec::with_capacity(self.nodes.len() + s.nodes.len() - 1);
        nodes.extend_from_slice(&self.nodes[..pos]);
        nodes.extend_from_slice(&s.nodes);
        nodes.extend_from_slice(&self.nodes[pos + 1..]);
        Ok((neg, TreeMonomial { nodes }))
    }

    /// Replaces the vertex at node position `pos` by the tree `s` of the same
    /// arity; returns the reordering sign (`true` means negative).
    fn substitute(&self, pos: usize, s: &TreeMonomial) -> (bool, TreeMonomial) {
        let Node::Vertex(g) = self.nodes[pos] else { panic!("not a vertex") };
        debug_assert_eq!(g.arity(), s.arity());
        let end = self.subtree_end(pos);
        let mut children = Vec::with_capacity(g.arity());
        let mut k = pos + 1;
        while k < end {
            let e = self.subtree_end(k);
            children.push(k..e);
            k = e;
        }
        let mut nodes = Vec::with_capacity(self.nodes.len() + s.nodes.len());
        nodes.extend_from_slice(&self.nodes[..pos]);
        let mut neg = false;
        let mut child_parity = false;
        let mut leaf = 0;
        for n in &s.nodes {
            match n {
                Node::Leaf => {
                    let r = children[leaf].clone();
                    leaf += 1;
                    for c in &self.nodes[r] {
                        if let Node::Vertex(h) = c {
                            child_parity ^= odd(h.degree());
                        }
                        nodes.push(*c);
                    }
                }
                Node::Vertex(v) => {
                    neg ^= child_parity && odd(v.degree());
                    nodes.push(*n);
                }
            }
        }
        nodes.extend_from_slice(&self.nodes[end..]);
        (neg, TreeMonomial { nodes })
    }

    /// Root-to-leaf vertex words, leaves left to right.
    pub fn path_encoding(&self) -> Vec<Vec<Generator>> {
        let mut paths = Vec::new();
        // stack of (generator, remaining children)
        let mut stack: Vec<(Generator, usize)> = Vec::new();
        for n in &self.nodes {
            match n {
                Node::Vertex(g) => stack.push((*g, g.arity())),
                Node::Leaf => {
                    paths.push(stack.iter().map(|(g, _)| *g).collect());
                    while let Some(top) = stack.last_mut() {
                        top.1 -= 1;
                        if top.1 == 0 {
                            stack.pop();
                        } else {
                            break;
                        }
                    }
                }
            }
        }
        paths
    }

    pub fn parse(s: &str) -> Result<Self, OperadError> {
        let mut p = TreeParser { src: s.as_bytes(), pos: 0, next_leaf: 1, nodes: Vec::new() };
        p.term().map_err(|_| OperadError::Parse(s.to_string()))?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(OperadError::Parse(s.to_string()));
        }
        Ok(TreeMonomial { nodes: p.nodes })
    }

    fn fmt_from(&self, pos: usize, leaf: &mut usize, out: &mut String) -> usize {
        match self.nodes[pos] {
            Node::Leaf => {
                *leaf += 1;
                out.push_str(&leaf.to_string());
                pos + 1
            }
            Node::Vertex(g) => {
                out.push_str(&g.to_string());
                out.push('(');
                let mut k = pos + 1;
                for c in 0..g.arity() {
                    if c > 0 {
                        out.push(',');
                    }
                    k = self.fmt_from(k, leaf, out);
                }
                out.push(')');
                k
            }
        }
    }
}

impl fmt::Display for TreeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let mut leaf = 0;
        self.fmt_from(0, &mut leaf, &mut s);
        f.write_str(&s)
    }
}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
    next_leaf: usize,
    nodes: Vec<Node>,
}

impl TreeParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(), ()> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let tok = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| ())?;
        if tok.is_empty() {
            return Err(());
        }
        if tok.bytes().all(|b| b.is_ascii_digit()) {
            let n: usize = tok.parse().map_err(|_| ())?;
            if n != self.next_leaf {
                return Err(());
            }
            self.next_leaf += 1;
            self.nodes.push(Node::Leaf);
            return Ok(());
        }
        let g = Generator::parse(tok).map_err(|_| ())?;
        self.nodes.push(Node::Vertex(g));
        self.skip_ws();
        if self.pos < self.src.len() && self.src[self.pos] == b'(' {
            self.pos += 1;
            for c in 0..g.arity() {
                if c > 0 {
                    self.skip_ws();
                    if self.src.get(self.pos) != Some(&b',') {
                        return Err(());
                    }
                    self.pos += 1;
                }
                self.term()?;
            }
            self.skip_ws();
            if self.src.get(self.pos) != Some(&b')') {
                return Err(());
            }
            self.pos += 1;
        } else {
            for _ in 0..g.arity() {
                self.nodes.push(Node::Leaf);
                self.next_leaf += 1;
            }
        }
        Ok(())
    }
}

/// Finite linear combination of tree monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperadElement {
    terms: HashMap<TreeMonomial, Rational>,
}

impl OperadElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(t: TreeMonomial) -> Self {
        let mut e = Self::zero();
        e.add_term(t, Rational::one());
        e
    }

    pub fn generator(g: Generator) -> Self {
        Self::monomial(TreeMonomial::corolla(g))
    }

    pub fn add_term(&mut self, t: TreeMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(t) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn add_signed(&mut self, t: TreeMonomial, c: &Rational, neg: bool) {
        self.add_term(t, if neg { -c.clone() } else { c.clone() });
    }

    pub fn add_assign(&mut self, other: &OperadElement) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c.clone());
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut e = Self::zero();
        for (t, c) in &self.terms {
            e.add_term(t.clone(), c * s);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, t: &TreeMonomial) -> Rational {
        self.terms.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TreeMonomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms sorted from the largest monomial down.
    pub fn sorted_terms(&self) -> Vec<(TreeMonomial, Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(t, c)| (t.clone(), c.clone())).collect();
        v.sort_by(|a, b| compare_xi(&b.0, &a.0));
        v
    }

    pub fn compose_at(&self, i: usize, s: &OperadElement) -> Result<OperadElement, OperadError> {
        let mut out = Self::zero();
        for (t, c) in &self.terms {
            for (u, d) in &s.terms {
                let (neg, tu) = t.compose_at(i, u)?;
                out.add_signed(tu, &(c * d), neg);
            }
        }
        Ok(out)
    }

    /// Brace `f{g_1,...,g_k}`: sum over order-preserving insertions.
    pub fn brace(&self, gs: &[OperadElement]) -> Result<OperadElement, OperadError> {
        let mut out = Self::zero();
        for (t, c) in &self.terms {
            let mut partial = OperadElement::monomial(t.clone()).scale(c);
            partial = brace_rec(&partial, gs, 1, t.arity())?;
            out.add_assign(&partial);
        }
        Ok(out)
    }
}

// inserts gs[0] at any leaf >= `from` of the current partial composite, then recurses
fn brace_rec(
    acc: &OperadElement,
    gs: &[OperadElement],
    from: usize,
    remaining: usize,
) -> Result<OperadElement, OperadError> {
    let Some((g, rest)) = gs.split_first() else { return Ok(acc.clone()) };
    if remaining < gs.len() {
        return Ok(OperadElement::zero());
    }
    let mut out = OperadElement::zero();
    let g_arity = g.terms.keys().next().map(|t| t.arity());
    let Some(ga) = g_arity else { return Ok(out) };
    // leaves of the original outer operation still free: those at positions >= from
    for skip in 0..=(remaining - gs.len()) {
        let leaf = from + skip;
        let composed = acc.compose_at(leaf, g)?;
        let next_from = leaf + ga;
        let next_remaining = remaining - skip - 1;
        out.add_assign(&brace_rec(&composed, rest, next_from, next_remaining)?);
    }
    Ok(out)
}

impl fmt::Display for OperadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (t, c) in self.sorted_terms() {
            writeln!(f, "{c} * {t}")?;
        }
        Ok(())
    }
}

/// Extends a map on generators to a degree -1 derivation.
pub fn apply_derivation<F>(e: &OperadElement, mut on_gen: F) -> OperadElement
where
    F: FnMut(Generator) -> OperadElement,
{
    let mut cache: HashMap<Generator, OperadElement> = HashMap::new();
    let mut out = OperadElement::zero();
    for (t, c) in &e.terms {
        let mut before = 0i64;
        for (pos, n) in t.nodes.iter().enumerate() {
            let Node::Vertex(g) = n else { continue };
            let dg = cache.entry(*g).or_insert_with(|| on_gen(*g));
            for (s, d) in &dg.terms {
                let (neg, tt) = t.substitute(pos, s);
                out.add_signed(tt, &(c * d), neg ^ odd(before));
            }
            before += g.degree();
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Presentation {
    Mp,
    Xy,
}

/// Sign corruption used to check that the square-zero tests can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignMutation {
    #[default]
    None,
    /// Flips the sign of the fully nested terms (`t = p`) of `∂P_n`.
    FlipNested,
}

pub fn cobar_d_m(n: usize) -> OperadElement {
    let mut out = OperadElement::zero();
    for j in 2..n {
        for i in 1..=(n - j + 1) {
            let e = (i + j * (n - i)) as i64;
            let (neg, t) = TreeMonomial::corolla(Generator::m(n - j + 1))
                .compose_at(i, &TreeMonomial::corolla(Generator::m(j)))
                .expect("leaf in range");
            out.add_signed(t, &crate::exactlin::sign(e), neg);
        }
    }
    out
}

/// One summand shape of `∂P_n`: parts `r_1..r_p`, nesting depth `t`,
/// insertion leaves `i_1..i_t` and grafting slots `k_t < ... < k_{p-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionProfile {
    pub parts: Vec<usize>,
    pub t: usize,
    pub inserts: Vec<usize>,
    pub slots: Vec<usize>,
}

impl CompositionProfile {
    pub fn p(&self) -> usize {
        self.parts.len()
    }

    pub fn enumerate(n: usize) -> Vec<CompositionProfile> {
        let mut out = Vec::new();
        for parts in compositions(n) {
            let p = parts.len();
            if p < 2 {
                continue;
            }
            for t in 0..=p {
                let mut inserts_all = vec![vec![]];
                for q in 0..t {
                    inserts_all = inserts_all
                        .into_iter()
                        .flat_map(|v: Vec<usize>| {
                            (1..=parts[q]).map(move |i| {
                                let mut w = v.clone();
                                w.push(i);
                                w
                            })
                        })
                        .collect();
                }
                let slot_sets = increasing_sequences(p - t, p);
                for ins in &inserts_all {
                    for slots in &slot_sets {
                        out.push(CompositionProfile {
                            parts: parts.clone(),
                            t,
                            inserts: ins.clone(),
                            slots: slots.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn sign_exponent(&self) -> i64 {
        let p = self.p() as i64;
        let r: Vec<i64> = self.parts.iter().map(|&x| x as i64).collect();
        let mut a = 1i64;
        for q in 1..=self.t {
            let iq = self.inserts[q - 1] as i64;
            let rq = r[q - 1];
            let tail: i64 = r[q..].iter().sum();
            a += iq + tail * (rq - iq) - (q as i64) * (rq - iq);
        }
        for i in (self.t + 1)..=self.p() {
            let k = self.slots[i - 1 - self.t] as i64;
            a += (k - p) * (r[i - 1] - 1);
        }
        a
    }

    pub fn tree(&self) -> (bool, TreeMonomial) {
        let p = self.p();
        let mut neg = false;
        let mut tree = TreeMonomial::corolla(Generator::m(p));
        let mut shift = 0usize;
        for j in self.t..p {
            let k = self.slots[j - self.t];
            let r = self.parts[j];
            let (s, t2) = tree.compose_at(k + shift, &TreeMonomial::corolla(Generator::p(r))).expect("slot in range");
            neg ^= s;
            tree = t2;
            shift += r - 1;
        }
        for q in (0..self.t).rev() {
            let (s, t2) = TreeMonomial::corolla(Generator::p(self.parts[q]))
                .compose_at(self.inserts[q], &tree)
                .expect("insert in range");
            neg ^= s;
            tree = t2;
        }
        (neg, tree)
    }
}

pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn increasing_sequences(len: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(len: usize, from: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in from..=max {
            if max - v + 1 < len - cur.len() {
                break;
            }
            cur.push(v);
            rec(len, v + 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, 1, max, &mut Vec::new(), &mut out);
    out
}

pub fn cobar_d_p(n: usize, mutation: SignMutation) -> OperadElement {
    let mut out = OperadElement::zero();
    for prof in CompositionProfile::enumerate(n) {
        let mut e = prof.sign_exponent();
        if mutation == SignMutation::FlipNested && prof.t == prof.p() {
            e += 1;
        }
        let (neg, t) = prof.tree();
        out.add_signed(t, &crate::exactlin::sign(e), neg);
    }
    out
}

pub fn cobar_d_x(n: usize) -> OperadElement {
    let mut out = OperadElement::zero();
    for j in 2..n {
        let b = OperadElement::generator(Generator::x(n - j + 1))
            .brace(&[OperadElement::generator(Generator::x(j))])
            .expect("brace");
        out.add_assign(&b);
    }
    out.scale(&rat(-1))
}

pub fn cobar_d_y(n: usize) -> OperadElement {
    let mut out = OperadElement::zero();
    for parts in compositions(n) {
        let p = parts.len();
        if p < 2 {
            continue;
        }
        let ys: Vec<OperadElement> = parts.iter().map(|&r| OperadElement::generator(Generator::y(r))).collect();
        for t in 0..=p {
            let mut inner = OperadElement::generator(Generator::x(p)).brace(&ys[t..]).expect("brace");
            for q in (0..t).rev() {
                inner = ys[q].brace(&[inner]).expect("brace");
            }
            out.add_assign(&inner.scale(&crate::exactlin::sign(t as i64)));
        }
    }
    out.scale(&rat(-1))
}

pub fn generator_differential(g: Generator, mutation: SignMutation) -> OperadElement {
    match g.family {
        Family::M => cobar_d_m(g.arity()),
        Family::P => cobar_d_p(g.arity(), mutation),
        Family::X => cobar_d_x(g.arity()),
        Family::Y => cobar_d_y(g.arity()),
    }
}

pub fn differential(e: &OperadElement, mutation: SignMutation) -> OperadElement {
    apply_derivation(e, |g| generator_differential(g, mutation))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSquaredEntry {
    pub generator: Generator,
    pub terms_in_d: usize,
    pub terms_in_d2: usize,
}

#[derive(Clone, Debug)]
pub struct DSquaredReport {
    pub presentation: Presentation,
    pub max_arity: usize,
    pub entries: Vec<DSquaredEntry>,
}

impl DSquaredReport {
    pub fn all_zero(&self) -> bool {
        self.entries.iter().all(|e| e.terms_in_d2 == 0)
    }
}

pub fn presentation_generators(presentation: Presentation, max_arity: usize) -> Vec<Generator> {
    let mut gens = Vec::new();
    for n in 1..=max_arity {
        match presentation {
            Presentation::Mp => {
                if n >= 2 {
                    gens.push(Generator::m(n));
                }
                gens.push(Generator::p(n));
            }
            Presentation::Xy => {
                if n >= 2 {
                    gens.push(Generator::x(n));
                }
                gens.push(Generator::y(n));
            }
        }
    }
    gens
}

pub fn d_squared_report(max_arity: usize, presentation: Presentation, mutation: SignMutation) -> DSquaredReport {
    let gens = presentation_generators(presentation, max_arity);
    let mut diffs: HashMap<Generator, OperadElement> = HashMap::new();
    for g in presentation_generators(presentation, max_arity) {
        diffs.insert(g, generator_differential(g, mutation));
    }
    let entries = std::thread::scope(|scope| {
        let handles: Vec<_> = gens
            .iter()
            .map(|&g| {
                let diffs = &diffs;
                scope.spawn(move || {
                    let d = &diffs[&g];
                    let d2 = apply_derivation(d, |h| diffs[&h].clone());
                    DSquaredEntry { generator: g, terms_in_d: d.len(), terms_in_d2: d2.len() }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker")).collect()
    });
    DSquaredReport { presentation, max_arity, entries }
}

/// Path-lexicographic order on monomials of equal arity.
pub fn compare_xi(a: &TreeMonomial, b: &TreeMonomial) -> Ordering {
    match a.arity().cmp(&b.arity()) {
        Ordering::Equal => {}
        o => return o,
    }
    let pa = a.path_encoding();
    let pb = b.path_encoding();
    for (x, y) in pa.iter().zip(pb.iter()) {
        let wx: usize = x.iter().map(|g| g.weight_phi()).sum();
        let wy: usize = y.iter().map(|g| g.weight_phi()).sum();
        match wx.cmp(&wy) {
            Ordering::Equal => {}
            o => return o,
        }
        let ix = x.iter().flat_map(|g| std::iter::repeat_n(g.letter_rank(), g.weight_phi()));
        let iy = y.iter().flat_map(|g| std::iter::repeat_n(g.letter_rank(), g.weight_phi()));
        match ix.cmp(iy) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

pub fn leading_term(e: &OperadElement) -> Option<(TreeMonomial, Rational)> {
    e.iter()
        .max_by(|a, b| compare_xi(a.0, b.0))
        .map(|(t, c)| (t.clone(), c.clone()))
}

/// All monomials with at most `max_vertices` vertices whose generators
/// come from `gens`.
pub fn enumerate_monomials(gens: &[Generator], max_vertices: usize) -> Vec<TreeMonomial> {
    let mut by_size: Vec<Vec<TreeMonomial>> = vec![Vec::new(); max_vertices + 1];
    if max_vertices >= 1 {
        by_size[1] = gens.iter().map(|&g| TreeMonomial::corolla(g)).collect();
    }
    for size in 2..=max_vertices {
        let mut seen = std::collections::HashSet::new();
        let mut next = Vec::new();
        for t in &by_size[size - 1] {
            for i in 1..=t.arity() {
                for &g in gens {
                    let (_, u) = t.compose_at(i, &TreeMonomial::corolla(g)).expect("leaf");
                    if seen.insert(u.clone()) {
                        next.push(u);
                    }
                }
            }
        }
        by_size[size] = next;
    }
    by_size.into_iter().flatten().collect()
}
