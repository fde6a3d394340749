mod common;

use common::{dense_mul, dense_rank, zeros, Dense};
use njalg::algebra_core::*;
use njalg::cohomology::*;
use njalg::exactlin::{rat, Rational};
use njalg::instances::random_instances;
use num_traits::{One, Zero};
use proptest::prelude::*;

type V = Vec<Rational>;

// structure tables read off once, everything else is done by hand
struct Tables {
    d: usize,
    dm: usize,
    mult: Vec<Vec<V>>,
    left: Vec<Vec<V>>,
    right: Vec<Vec<V>>,
}

fn tables(a: &AlgebraPresentation, m: &BimodulePresentation) -> Tables {
    let (d, dm) = (a.dim(), m.dim());
    Tables {
        d,
        dm,
        mult: (0..d).map(|i| (0..d).map(|j| a.mult.basis(i, j).clone()).collect()).collect(),
        left: (0..d).map(|i| (0..dm).map(|k| m.left.basis(i, k).clone()).collect()).collect(),
        right: (0..dm).map(|k| (0..d).map(|i| m.right.basis(k, i).clone()).collect()).collect(),
    }
}

fn mat(p: &LinearOperator) -> Dense {
    p.rows().to_vec()
}

fn mv(p: &Dense, v: &[Rational]) -> V {
    p.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn bil(t: &[Vec<V>], x: &[Rational], y: &[Rational], out: usize) -> V {
    let mut r = vec![Rational::zero(); out];
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            if xi.is_zero() || yj.is_zero() {
                continue;
            }
            for (k, c) in t[i][j].iter().enumerate() {
                r[k] += xi * yj * c;
            }
        }
    }
    r
}

fn unit(n: usize, i: usize) -> V {
    (0..n).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect()
}

fn tuples(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (0..d).map(move |j| [t.clone(), vec![j]].concat())).collect();
    }
    out
}

fn index(d: usize, out: usize, inp: &[usize]) -> usize {
    inp.iter().fold(out, |acc, &j| acc * d + j)
}

// f as a table on basis tuples, evaluated multilinearly
fn eval(t: &Tables, f: &[Rational], args: &[V]) -> V {
    let n = args.len();
    let mut r = vec![Rational::zero(); t.dm];
    for tup in tuples(t.d, n) {
        let w: Rational = tup.iter().zip(args).map(|(&j, a)| a[j].clone()).product();
        if w.is_zero() {
            continue;
        }
        for (o, ro) in r.iter_mut().enumerate() {
            *ro += &w * &f[index(t.d, o, &tup)];
        }
    }
    r
}

fn hochschild_oracle(t: &Tables, n: usize) -> Dense {
    let src = t.dm * t.d.pow(n as u32);
    let dst = t.dm * t.d.pow(n as u32 + 1);
    let mut out = zeros(dst, src);
    for c in 0..src {
        let f = unit(src, c);
        for tup in tuples(t.d, n + 1) {
            let a: Vec<V> = tup.iter().map(|&j| unit(t.d, j)).collect();
            let mut v = bil(&t.left, &a[0], &eval(t, &f, &a[1..]), t.dm);
            for i in 0..n {
                let mut args = a[..i].to_vec();
                args.push(bil(&t.mult, &a[i], &a[i + 1], t.d));
                args.extend_from_slice(&a[i + 2..]);
                let s = if i % 2 == 0 { -Rational::one() } else { Rational::one() };
                for (x, y) in v.iter_mut().zip(eval(t, &f, &args)) {
                    *x += &s * y;
                }
            }
            let s = if n.is_multiple_of(2) { -Rational::one() } else { Rational::one() };
            for (x, y) in v.iter_mut().zip(bil(&t.right, &eval(t, &f, &a[..n]), &a[n], t.dm)) {
                *x += &s * y;
            }
            for (o, x) in v.into_iter().enumerate() {
                out[index(t.d, o, &tup)][c] = x;
            }
        }
    }
    out
}

fn deformed_tables(t: &Tables, p: &Dense) -> Tables {
    let (d, dm) = (t.d, t.dm);
    let mult = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let (ei, ej) = (unit(d, i), unit(d, j));
                    let a = bil(&t.mult, &mv(p, &ei), &ej, d);
                    let b = bil(&t.mult, &ei, &mv(p, &ej), d);
                    let c = mv(p, &bil(&t.mult, &ei, &ej, d));
                    (0..d).map(|k| &a[k] + &b[k] - &c[k]).collect()
                })
                .collect()
        })
        .collect();
    let left = (0..d).map(|i| (0..dm).map(|k| bil(&t.left, &mv(p, &unit(d, i)), &unit(dm, k), dm)).collect()).collect();
    let right = (0..dm).map(|k| (0..d).map(|i| bil(&t.right, &unit(dm, k), &mv(p, &unit(d, i)), dm)).collect()).collect();
    Tables { d, dm, mult, left, right }
}

// P_M applied to the output of every cochain in C^n
fn lift(t: &Tables, pm: &Dense, n: usize) -> Dense {
    let len = t.dm * t.d.pow(n as u32);
    let mut out = zeros(len, len);
    for tup in tuples(t.d, n) {
        for o in 0..t.dm {
            for l in 0..t.dm {
                out[index(t.d, l, &tup)][index(t.d, o, &tup)] = pm[l][o].clone();
            }
        }
    }
    out
}

fn njo_oracle(t: &Tables, p: &Dense, pm: &Dense, n: usize) -> Dense {
    let delta = hochschild_oracle(t, n);
    let partial = hochschild_oracle(&deformed_tables(t, p), n);
    let l = dense_mul(&lift(t, pm, n + 1), &delta);
    partial.iter().zip(&l).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect()
}

fn pow(m: &Dense, k: usize) -> Dense {
    let n = m.len();
    (0..k).fold((0..n).map(|i| unit(n, i)).collect(), |acc, _| dense_mul(m, &acc))
}

fn phi_oracle(t: &Tables, p: &Dense, pm: &Dense, n: usize) -> Dense {
    let len = t.dm * t.d.pow(n as u32);
    let mut out = zeros(len, len);
    for c in 0..len {
        let f = unit(len, c);
        for tup in tuples(t.d, n) {
            let mut v = vec![Rational::zero(); t.dm];
            for mask in 0..(1usize << n) {
                let k = mask.count_ones() as usize;
                let args: Vec<V> = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { mv(p, &unit(t.d, tup[i])) } else { unit(t.d, tup[i]) })
                    .collect();
                let w = mv(&pow(pm, n - k), &eval(t, &f, &args));
                let s = if (n - k).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
                for (x, y) in v.iter_mut().zip(w) {
                    *x += &s * y;
                }
            }
            for (o, x) in v.into_iter().enumerate() {
                out[index(t.d, o, &tup)][c] = x;
            }
        }
    }
    out
}

fn place(out: &mut Dense, r0: usize, c0: usize, m: &Dense, s: i64) {
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            out[r0 + i][c0 + j] += x * rat(s);
        }
    }
}

// d(f, g) = (δf, -Φf - δ_NjO g)
fn cone_oracle(t: &Tables, p: &Dense, pm: &Dense, k: usize) -> Dense {
    let sp = |n: usize| t.dm * t.d.pow(n as u32);
    let dim = |n: usize| if n == 0 { sp(0) } else { sp(n) + sp(n - 1) };
    let mut out = zeros(dim(k + 1), dim(k));
    place(&mut out, 0, 0, &hochschild_oracle(t, k), 1);
    place(&mut out, sp(k + 1), 0, &phi_oracle(t, p, pm, k), -1);
    if k >= 1 {
        place(&mut out, sp(k + 1), sp(k), &njo_oracle(t, p, pm, k - 1), -1);
    }
    out
}

fn cohomology_oracle(maps: &[Dense], dims: &[usize]) -> Vec<usize> {
    let ranks: Vec<usize> = maps.iter().map(dense_rank).collect();
    (0..maps.len()).map(|n| dims[n] - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] }).collect()
}

fn setup(n: &NijenhuisAlgebra, m: &NijenhuisBimodule) -> (Tables, Dense, Dense) {
    (tables(&n.algebra, &m.module), mat(&n.operator), mat(&m.operator))
}

fn scalar_field(lambda: i64) -> (NijenhuisAlgebra, NijenhuisBimodule) {
    let n = NijenhuisAlgebra::new(AlgebraPresentation::truncated_polynomial(1), LinearOperator::scalar(1, rat(lambda)))
        .unwrap();
    let m = NijenhuisBimodule::regular(&n);
    (n, m)
}

fn projection() -> (NijenhuisAlgebra, NijenhuisBimodule) {
    let n = NijenhuisAlgebra::new(AlgebraPresentation::diagonal(2), LinearOperator::from_int_rows(&[&[1, 0], &[0, 0]]))
        .unwrap();
    let m = NijenhuisBimodule::regular(&n);
    (n, m)
}

#[test]
fn ground_field_differentials() {
    let (n, m) = scalar_field(1);
    let a = &n.algebra;
    assert!(hochschild_d(a, &m.module, 0).is_zero());
    assert_eq!(hochschild_d(a, &m.module, 1).to_dense(), vec![vec![rat(1)]]);
    assert!(hochschild_d(a, &m.module, 2).is_zero());
    let c = nja_complex(&n, &m, 3);
    assert_eq!(c.dims[..4], [1, 2, 2, 2]);
}

#[test]
fn identity_and_zero_operators() {
    for (_, a) in njalg::instances::catalog() {
        if a.dim() > 2 {
            continue;
        }
        let id = NijenhuisAlgebra::new(a.clone(), LinearOperator::identity(a.dim())).unwrap();
        let mi = NijenhuisBimodule::regular(&id);
        let zero = NijenhuisAlgebra::new(a.clone(), LinearOperator::zero(a.dim(), a.dim())).unwrap();
        let mz = NijenhuisBimodule::regular(&zero);
        for k in 0..3 {
            assert_eq!(deformed_d(&id, &mi, k), hochschild_d(&a, &mi.module, k));
            assert!(njo_d(&id, &mi, k).is_zero());
            if k >= 1 {
                assert!(phi(&id, &mi, k).is_zero());
            }
            assert!(deformed_d(&zero, &mz, k).is_zero());
            assert!(njo_d(&zero, &mz, k).is_zero());
        }
    }
}

#[test]
fn phi_in_degree_one() {
    // Φ¹(f) = f∘P - P_M∘f
    let (n, m) = projection();
    let (t, p, pm) = setup(&n, &m);
    let ph = phi(&n, &m, 1).to_dense();
    for c in 0..4 {
        let f = unit(4, c);
        for j in 0..2 {
            let want: V = {
                let a = eval(&t, &f, &[mv(&p, &unit(2, j))]);
                let b = mv(&pm, &eval(&t, &f, &[unit(2, j)]));
                a.iter().zip(&b).map(|(x, y)| x - y).collect()
            };
            for (o, w) in want.into_iter().enumerate() {
                assert_eq!(ph[index(2, o, &[j])][c], w);
            }
        }
    }
}

#[test]
fn projection_table_matches_dense_cone() {
    let (n, m) = projection();
    let (t, p, pm) = setup(&n, &m);
    let max = 3;
    let table = cohomology_table(&n, &m, max).unwrap();
    let sp = |k: usize| 2 * 2usize.pow(k as u32);
    let alg: Vec<Dense> = (0..=max).map(|k| hochschild_oracle(&t, k)).collect();
    let njo: Vec<Dense> = (0..=max).map(|k| njo_oracle(&t, &p, &pm, k)).collect();
    let cone: Vec<Dense> = (0..=max).map(|k| cone_oracle(&t, &p, &pm, k)).collect();
    let sdims: Vec<usize> = (0..=max + 1).map(sp).collect();
    let cdims: Vec<usize> = (0..=max + 1).map(|k| if k == 0 { sp(0) } else { sp(k) + sp(k - 1) }).collect();
    assert_eq!(table.alg, cohomology_oracle(&alg, &sdims));
    assert_eq!(table.njo, cohomology_oracle(&njo, &sdims));
    assert_eq!(table.nja, cohomology_oracle(&cone, &cdims));
    assert!(table.euler.consistent());
}

#[test]
fn ground_field_table() {
    let (n, m) = scalar_field(1);
    let t = cohomology_table(&n, &m, 3).unwrap();
    assert_eq!(t.alg, vec![1, 0, 0, 0]);
    // zero differential on the operator complex
    assert_eq!(t.njo, vec![1, 1, 1, 1]);
    assert!(t.euler.consistent());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn differentials_match_oracles(seed in 0u64..100_000) {
        let inst = random_instances(seed, 1).pop().unwrap();
        let (n, m) = (&inst.algebra, &inst.module);
        let (t, p, pm) = setup(n, m);
        let top = if n.dim() == 3 { 2 } else { 3 };
        for k in 0..=top {
            prop_assert_eq!(hochschild_d(&n.algebra, &m.module, k).to_dense(), hochschild_oracle(&t, k));
            prop_assert_eq!(njo_d(n, m, k).to_dense(), njo_oracle(&t, &p, &pm, k));
            prop_assert_eq!(phi(n, m, k).to_dense(), phi_oracle(&t, &p, &pm, k));
        }
        let c = nja_complex(n, m, top);
        for k in 0..=top {
            prop_assert_eq!(c.maps[k].to_dense(), cone_oracle(&t, &p, &pm, k));
        }
    }

    #[test]
    fn tables_are_consistent(seed in 0u64..100_000) {
        let inst = random_instances(seed, 1).pop().unwrap();
        let t = cohomology_table(&inst.algebra, &inst.module, 3).unwrap();
        prop_assert!(t.euler.consistent());
        prop_assert!(coefficient_embedding_check(&inst.algebra, &inst.module, 2).passed());
    }
}
