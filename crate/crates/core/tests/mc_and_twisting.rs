use njalg::algebra_core::*;
use njalg::brace_calculus::*;
use njalg::cohomology::{cohomology_table, hochschild_d, njo_d, phi, CochainSpace};
use njalg::exactlin::{rat, Rational, SparseMatrix};
use njalg::instances::{catalog, perturb_operator, random_instances};
use njalg::linf_deformation::*;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nij(a: AlgebraPresentation, rows: &[&[i64]]) -> NijenhuisAlgebra {
    NijenhuisAlgebra::new(a, LinearOperator::from_int_rows(rows)).unwrap()
}

// P(x)P(y) - P(P(x)y + xP(y) - P(xy)) on basis pairs, straight from the tables
fn defect_oracle(a: &AlgebraPresentation, p: &LinearOperator) -> Vec<((usize, usize), Vec<Rational>)> {
    let d = a.dim();
    let col = |v: usize| -> Vec<Rational> { (0..d).map(|r| p.entry(r, v).clone()).collect() };
    let pv = |x: &[Rational]| -> Vec<Rational> { (0..d).map(|r| (0..d).map(|c| p.entry(r, c) * &x[c]).sum()).collect() };
    let mul = |x: &[Rational], y: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); d];
        for i in 0..d {
            for j in 0..d {
                for (k, c) in a.mult.basis(i, j).iter().enumerate() {
                    out[k] += &x[i] * &y[j] * c;
                }
            }
        }
        out
    };
    let e = |i: usize| unit_vec(d, i);
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let lhs = mul(&col(i), &col(j));
            let inner: Vec<Rational> = {
                let (u, v, w) = (mul(&col(i), &e(j)), mul(&e(i), &col(j)), pv(&mul(&e(i), &e(j))));
                (0..d).map(|k| &u[k] + &v[k] - &w[k]).collect()
            };
            let rhs = pv(&inner);
            out.push(((i, j), (0..d).map(|k| &lhs[k] - &rhs[k]).collect()));
        }
    }
    out
}

#[test]
fn associative_product_alone_is_mc() {
    for (_, a) in catalog() {
        let n = NijenhuisAlgebra::new_unchecked(a.clone(), LinearOperator::zero(a.dim(), a.dim()));
        let mut alpha = from_structure(&n);
        alpha.r.clear();
        for k in 1..=5 {
            let (x, y) = mc_residual(&alpha, k).unwrap();
            assert!(x.is_zero() && y.is_zero());
        }
    }
    let z = NijenhuisAlgebra::new_unchecked(AlgebraPresentation::zero_algebra(2), LinearOperator::from_int_rows(&[&[1, 2], &[0, 1]]));
    assert!(mc_check(&from_structure(&z), 4).unwrap().passed());
}

#[test]
fn strict_examples_are_mc() {
    let k = nij(AlgebraPresentation::truncated_polynomial(1), &[&[1]]);
    assert!(mc_check(&from_nijenhuis(&k).unwrap(), 6).unwrap().passed());
    let proj = nij(AlgebraPresentation::diagonal(2), &[&[1, 0], &[0, 0]]);
    assert!(mc_check(&from_nijenhuis(&proj).unwrap(), 5).unwrap().passed());
    let bad = NijenhuisAlgebra::new_unchecked(AlgebraPresentation::diagonal(2), LinearOperator::from_int_rows(&[&[0, 1], &[0, 0]]));
    assert!(from_nijenhuis(&bad).is_err());
    assert_eq!(mc_check(&from_structure(&bad), 4).unwrap().first_failure(), Some(2));
}

#[test]
fn non_associative_product_fails_at_three() {
    let mut a = AlgebraPresentation::truncated_polynomial(2);
    a.mult.set(1, 0, 1, rat(2));
    let n = NijenhuisAlgebra::new_unchecked(a.clone(), LinearOperator::zero(2, 2));
    let (alg, _) = mc_residual(&from_structure(&n), 3).unwrap();
    let m = desuspend_alg(&alg).unwrap();
    let mut support: Vec<Vec<usize>> = m.entries().filter(|e| !e.2.is_zero()).map(|e| e.0.clone()).collect();
    support.dedup();
    let mut viol: Vec<Vec<usize>> = check_associativity(&a).violations.iter().map(|v| v.indices.clone()).collect();
    viol.sort();
    assert_eq!(support, viol);
    assert_eq!(mc_check(&from_structure(&n), 4).unwrap().first_failure(), Some(3));
}

#[test]
fn operator_bracket_detects_nijenhuis() {
    let a = AlgebraPresentation::diagonal(2);
    let br = NjoBracket::new(&a).unwrap();
    assert!(br.is_mc(&br.tau(&LinearOperator::identity(2))).unwrap());
    assert!(br.is_mc(&br.tau(&LinearOperator::from_int_rows(&[&[1, 0], &[0, 0]]))).unwrap());
    assert!(!br.is_mc(&br.tau(&LinearOperator::from_int_rows(&[&[0, 1], &[0, 0]]))).unwrap());
    let mut bad = AlgebraPresentation::truncated_polynomial(2);
    bad.mult.set(1, 0, 1, rat(2));
    assert!(NjoBracket::new(&bad).is_err());
}

fn sub_block(m: &SparseMatrix, r0: usize, rows: usize, c0: usize, cols: usize) -> Vec<Vec<Rational>> {
    (r0..r0 + rows).map(|r| (c0..c0 + cols).map(|c| m.get(r, c)).collect()).collect()
}

fn signed(m: &SparseMatrix, s: i64) -> Vec<Vec<Rational>> {
    m.scale(&rat(s)).to_dense()
}

#[test]
fn twisted_differential_blocks() {
    for inst in random_instances(404, 6) {
        let n = &inst.algebra;
        let reg = NijenhuisBimodule::regular(n);
        let d = n.dim();
        let alpha = from_nijenhuis(n).unwrap();
        let sp = |k: usize| CochainSpace::new(d, d, k).len();
        for k in 1..=3usize {
            let t = twisted_differential(&alpha, d, k).unwrap();
            let s = if k % 2 == 0 { 1 } else { -1 };
            let src_alg = sp(k);
            let src_njo = if k >= 2 { sp(k - 1) } else { 0 };
            let (dst_alg, dst_njo) = (sp(k + 1), sp(k));
            assert_eq!(sub_block(&t, 0, dst_alg, 0, src_alg), signed(&hochschild_d(&n.algebra, &reg.module, k), s));
            assert_eq!(sub_block(&t, dst_alg, dst_njo, 0, src_alg), phi(n, &reg, k).to_dense());
            if k >= 2 {
                assert_eq!(sub_block(&t, dst_alg, dst_njo, src_alg, src_njo), signed(&njo_d(n, &reg, k - 1), s));
                assert!(sub_block(&t, 0, dst_alg, src_alg, src_njo).iter().flatten().all(Zero::is_zero));
            }
        }
    }
}

#[test]
fn twisted_matches_cone_on_fixed_operators() {
    for (_, a) in catalog().into_iter().filter(|(_, a)| a.dim() <= 2) {
        for p in [LinearOperator::identity(a.dim()), LinearOperator::zero(a.dim(), a.dim())] {
            let n = NijenhuisAlgebra::new(a.clone(), p).unwrap();
            let tw = twisted_cohomology_dims(&n, 3).unwrap();
            let table = cohomology_table(&n, &NijenhuisBimodule::regular(&n), 3).unwrap();
            assert_eq!(tw[..], table.nja[1..=3]);
        }
    }
}

#[test]
fn trust_horizon_counts_complete_arities() {
    let n = nij(AlgebraPresentation::truncated_polynomial(2), &[&[1, 0], &[1, 1]]);
    let alpha = from_nijenhuis(&n).unwrap();
    assert_eq!(trust_horizon(&alpha, 5), 4);
    assert_eq!(trust_horizon(&alpha, 1), 0);
}

fn random_component(rng: &mut ChaCha8Rng, njo: bool) -> Component {
    let sp = GradedSpace::ungraded(2);
    let arity = rng.gen_range(1..=2);
    let cod = if njo { Shift::V } else { Shift::SV };
    let degree = cod.offset() - arity as i64;
    let mut m = GradedMap::zero(&sp, arity, degree, Shift::SV, cod);
    let tuples: Vec<Vec<usize>> = if arity == 1 { vec![vec![0], vec![1]] } else { vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]] };
    for t in tuples {
        for o in 0..2 {
            if rng.gen_bool(0.5) {
                m.add_entry(&t, o, rat(rng.gen_range(-2..=2))).unwrap();
            }
        }
    }
    if njo {
        Component::njo(m).unwrap()
    } else {
        Component::alg(m).unwrap()
    }
}

#[test]
fn brackets_that_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let a = random_component(&mut rng, false);
    let f = random_component(&mut rng, true);
    let g = random_component(&mut rng, true);
    assert!(l_n_full(&[&a, &a, &a]).unwrap().is_none());
    assert!(l_n_full(&[&f, &g]).unwrap().is_none());
    assert!(l_n_full(&[&f, &g, &f]).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbed_operator_residual_is_the_defect(seed in 0u64..100_000, r in 0usize..3, c in 0usize..3) {
        let inst = random_instances(seed, 1).pop().unwrap();
        let a = &inst.algebra.algebra;
        let d = a.dim();
        let p = perturb_operator(&inst.algebra.operator, r % d, c % d, 1);
        let n = NijenhuisAlgebra::new_unchecked(a.clone(), p.clone());
        let alpha = from_structure(&n);
        let (alg, njo) = mc_residual(&alpha, 2).unwrap();
        prop_assert!(alg.is_zero());
        let got = desuspend_alg(&njo).unwrap();
        for ((i, j), want) in defect_oracle(a, &p) {
            for (k, w) in want.iter().enumerate() {
                prop_assert_eq!(&got.get(&[i, j], k), w);
            }
        }
        prop_assert_eq!(mc_check(&alpha, 3).unwrap().passed(), check_nijenhuis(a, &p).passed());
    }

    #[test]
    fn twisted_matches_cone(seed in 0u64..100_000) {
        let inst = random_instances(seed, 1).pop().unwrap();
        let n = &inst.algebra;
        let top = if n.dim() == 3 { 2 } else { 3 };
        let tw = twisted_cohomology_dims(n, top).unwrap();
        let table = cohomology_table(n, &NijenhuisBimodule::regular(n), top).unwrap();
        prop_assert_eq!(&tw[..], &table.nja[1..=top]);
        let alpha = from_nijenhuis(n).unwrap();
        prop_assert!(twist_square_zero(&alpha, n.dim(), top).unwrap().iter().all(|&b| b));
    }

    #[test]
    fn mixed_bracket_symmetry(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = GradedSpace::ungraded(2);
        let mut sh = GradedMap::zero(&sp, 2, -1, Shift::SV, Shift::SV);
        for t in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            sh.add_entry(&t, rng.gen_range(0..2), rat(rng.gen_range(-2..=2))).unwrap();
        }
        let f = random_component(&mut rng, true).map;
        let g = random_component(&mut rng, true).map;
        let fg = l_mixed(&sh, &[&f, &g]).unwrap();
        let gf = l_mixed(&sh, &[&g, &f]).unwrap();
        let chi = antisymmetric_koszul_sign(&[1, 0], &[f.degree(), g.degree()]);
        prop_assert_eq!(gf, fg.scale(&rat(chi)));
        prop_assert_eq!(l_mixed_positioned(&[], &sh, &[&f, &g]).unwrap(), fg);
    }

    #[test]
    fn jacobi_identities(seed in 0u64..100_000, pattern in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Component> = (0..3).map(|i| random_component(&mut rng, pattern >> i & 1 == 1)).collect();
        let refs: Vec<&Component> = xs.iter().collect();
        prop_assert!(jacobi_defect(&refs).unwrap().is_zero());
    }
}
