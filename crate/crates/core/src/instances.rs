//! Seeded random Nijenhuis algebras and bimodules of small dimension.
//!
//! Algebras come from a fixed catalog moved by a random unimodular change of
//! basis; operators are drawn from families known to be Nijenhuis or sampled
//! at random and filtered. Every instance is verified before it is returned,
//! and all entries lie in `{-2, ..., 2}`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra_core::{
    check_associativity, check_nijenhuis, check_nijenhuis_bimodule, AlgebraPresentation, BimodulePresentation,
    Bilinear, LinearOperator, NijenhuisAlgebra, NijenhuisBimodule,
};
use crate::exactlin::{rat, Rational};
use num_traits::{Signed, Zero};

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub algebra: NijenhuisAlgebra,
    pub module: NijenhuisBimodule,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn alg(name: &str, dim: usize, t: &[(usize, usize, usize, i64)]) -> (String, AlgebraPresentation) {
    let t: Vec<_> = t.iter().map(|&(i, j, k, c)| (i, j, k, rat(c))).collect();
    (name.to_string(), AlgebraPresentation::from_triples(dim, &t).expect("in range"))
}

/// Associative algebras of dimension at most 3.
pub fn catalog() -> Vec<(String, AlgebraPresentation)> {
    vec![
        ("k".into(), AlgebraPresentation::truncated_polynomial(1)),
        ("k[x]/x^2".into(), AlgebraPresentation::truncated_polynomial(2)),
        ("k[x]/x^3".into(), AlgebraPresentation::truncated_polynomial(3)),
        ("k^2".into(), AlgebraPresentation::diagonal(2)),
        ("k^3".into(), AlgebraPresentation::diagonal(3)),
        ("zero2".into(), AlgebraPresentation::zero_algebra(2)),
        ("zero3".into(), AlgebraPresentation::zero_algebra(3)),
        // e idempotent, f = e f, f e = 0
        alg("left2", 2, &[(0, 0, 0, 1), (0, 1, 1, 1)]),
        // upper triangular 2x2: e11, e12, e22
        alg("T2", 3, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 2, 1, 1), (2, 2, 2, 1)]),
        // k[x]/x^2 x k
        alg("dual+k", 3, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (2, 2, 2, 1)]),
    ]
}

fn small(c: &Rational) -> bool {
    c.is_integer() && c.abs() <= rat(2)
}

/// Integer matrix with determinant ±1, as a product of elementary moves.
pub fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut g: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        return g;
    }
    for _ in 0..rng.gen_range(0..=3) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        // column i += c * column j
        for row in g.iter_mut() {
            row[i] += c * row[j];
        }
    }
    if rng.gen_bool(0.3) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        for row in g.iter_mut() {
            row.swap(a, b);
        }
    }
    g
}

fn inverse(g: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    let n = g.len();
    let m = crate::exactlin::SparseMatrix::from_dense(
        &g.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect::<Vec<_>>(),
    );
    // solve column by column through the kernel of [G | -e_k]
    let mut inv = vec![vec![Rational::zero(); n]; n];
    for k in 0..n {
        let mut cols: Vec<_> = (0..n).map(|j| m.column(j).clone()).collect();
        cols.push([(k, rat(-1))].into_iter().collect());
        let aug = crate::exactlin::SparseMatrix::from_columns(n, cols).expect("square");
        let v = aug.kernel_basis().into_iter().next().expect("invertible");
        let s = v[n].clone();
        for i in 0..n {
            inv[i][k] = &v[i] / &s;
        }
    }
    inv
}

/// New basis `e'_i = Σ_k g[k][i] e_k`.
pub fn change_basis(a: &AlgebraPresentation, g: &[Vec<i64>]) -> AlgebraPresentation {
    let n = a.dim();
    let gi = inverse(g);
    let col = |i: usize| -> Vec<Rational> { (0..n).map(|k| rat(g[k][i])).collect() };
    let mut b = Bilinear::zero(n, n, n);
    for i in 0..n {
        for j in 0..n {
            let p = a.product(&col(i), &col(j));
            for l in 0..n {
                let c: Rational = (0..n).map(|k| &gi[l][k] * &p[k]).sum();
                b.set(i, j, l, c);
            }
        }
    }
    AlgebraPresentation::new(a.basis.clone(), b).expect("same dimension")
}

fn random_element(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.gen_range(-1..=1))).collect()
}

fn multiplication_operator(a: &AlgebraPresentation, x: &[Rational], left: bool, lambda: i64) -> LinearOperator {
    let n = a.dim();
    let mut op = LinearOperator::zero(n, n);
    for c in 0..n {
        let e = crate::algebra_core::unit_vec(n, c);
        let img = if left { a.product(x, &e) } else { a.product(&e, x) };
        for (r, v) in img.into_iter().enumerate() {
            let v = if r == c { v + rat(lambda) } else { v };
            op.set(r, c, v);
        }
    }
    op
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, sparse: bool) -> LinearOperator {
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| if sparse && rng.gen_bool(0.6) { rat(0) } else { rat(rng.gen_range(-2..=2)) })
                .collect()
        })
        .collect();
    LinearOperator::from_rows(rows).expect("square")
}

fn operator_small(p: &LinearOperator) -> bool {
    (0..p.nrows()).all(|r| (0..p.ncols()).all(|c| small(p.entry(r, c))))
}

/// A Nijenhuis operator on `a`, or `None` after a bounded number of tries.
pub fn random_operator(rng: &mut ChaCha8Rng, a: &AlgebraPresentation) -> Option<LinearOperator> {
    let n = a.dim();
    for _ in 0..200 {
        let p = match rng.gen_range(0..4) {
            0 => multiplication_operator(a, &random_element(rng, n), true, rng.gen_range(-1..=1)),
            1 => multiplication_operator(a, &random_element(rng, n), false, rng.gen_range(-1..=1)),
            2 => random_matrix(rng, n, true),
            _ => random_matrix(rng, n, false),
        };
        if operator_small(&p) && check_nijenhuis(a, &p).passed() {
            return Some(p);
        }
    }
    None
}

/// Random verified instance built from the catalog.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let cat = catalog();
    loop {
        let (name, base) = cat.choose(rng).expect("nonempty").clone();
        let g = unimodular(rng, base.dim());
        let a = change_basis(&base, &g);
        if !a.mult.triples().iter().all(|t| small(&t.3)) || !check_associativity(&a).passed() {
            continue;
        }
        let Some(p) = random_operator(rng, &a) else { continue };
        let n = NijenhuisAlgebra::new(a.clone(), p.clone()).expect("checked");
        let module = if rng.gen_bool(0.5) {
            NijenhuisBimodule::regular(&n)
        } else {
            let pm = (0..50)
                .map(|_| random_matrix(rng, a.dim(), true))
                .find(|pm| NijenhuisBimodule::new(&n, BimodulePresentation::regular(&a), pm.clone()).is_ok());
            match pm {
                Some(pm) => NijenhuisBimodule::new(&n, BimodulePresentation::regular(&a), pm).expect("checked"),
                None => NijenhuisBimodule::regular(&n),
            }
        };
        debug_assert!(check_nijenhuis_bimodule(&n, &module.module, &module.operator).passed());
        return Instance { name, algebra: n, module };
    }
}

pub fn random_instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut r = rng(seed);
    (0..count).map(|_| random_instance(&mut r)).collect()
}

/// Changes one structure constant of the operator by `delta`.
pub fn perturb_operator(p: &LinearOperator, r: usize, c: usize, delta: i64) -> LinearOperator {
    let mut q = p.clone();
    q.set(r, c, p.entry(r, c) + rat(delta));
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_associative() {
        for (name, a) in catalog() {
            assert!(check_associativity(&a).passed(), "{name}");
        }
    }

    #[test]
    fn basis_change_preserves_associativity() {
        let mut r = rng(11);
        for (_, a) in catalog() {
            let g = unimodular(&mut r, a.dim());
            assert!(check_associativity(&change_basis(&a, &g)).passed());
        }
    }

    #[test]
    fn instances_are_verified_and_reproducible() {
        let xs = random_instances(5, 8);
        let ys = random_instances(5, 8);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(x.algebra, y.algebra);
            assert!(check_nijenhuis(&x.algebra.algebra, &x.algebra.operator).passed());
            assert!(check_nijenhuis_bimodule(&x.algebra, &x.module.module, &x.module.operator).passed());
        }
    }
}
