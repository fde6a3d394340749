use njalg::algebra_core::*;
use njalg::exactlin::rat;
use njalg::instances::{catalog, perturb_operator, random_instances};
use proptest::prelude::*;

fn kxk() -> AlgebraPresentation {
    AlgebraPresentation::diagonal(2)
}

#[test]
fn altered_structure_constant_breaks_associativity_at_that_triple() {
    let mut a = AlgebraPresentation::truncated_polynomial(3);
    assert!(check_associativity(&a).passed());
    // x * 1 = 2x; rescaling x * x alone would stay associative
    a.mult.set(1, 0, 1, rat(2));
    let r = check_associativity(&a);
    assert!(!r.passed());
    assert!(r.violations.iter().any(|v| v.indices == vec![1, 0, 0]));
}

#[test]
fn scalar_operators_are_nijenhuis() {
    for (_, a) in catalog() {
        let n = a.dim();
        assert!(check_nijenhuis(&a, &LinearOperator::identity(n)).passed());
        for l in [-2, 0, 3] {
            assert!(check_nijenhuis(&a, &LinearOperator::scalar(n, rat(l))).passed());
        }
    }
}

#[test]
fn projections_on_product_algebra() {
    let a = kxk();
    let proj = LinearOperator::from_int_rows(&[&[1, 0], &[0, 0]]);
    assert!(check_nijenhuis(&a, &proj).passed());
    // (a, b) -> (b, 0)
    let swap = LinearOperator::from_int_rows(&[&[0, 1], &[0, 0]]);
    let r = check_nijenhuis(&a, &swap);
    assert!(!r.passed());
    // P(e1)P(e1) = e0 while the right side vanishes
    let v = r.violations.iter().find(|v| v.indices == vec![1, 1]).expect("violation at (1,1)");
    assert_eq!(v.defect, vec![rat(1), rat(0)]);
}

#[test]
fn deformed_product_of_projection() {
    let n = NijenhuisAlgebra::new(kxk(), LinearOperator::from_int_rows(&[&[1, 0], &[0, 0]])).unwrap();
    let d = deformed_product(&n);
    assert_eq!(d.basis_product(0, 0), &vec![rat(1), rat(0)]);
    for (i, j) in [(0, 1), (1, 0), (1, 1)] {
        assert_eq!(d.basis_product(i, j), &vec![rat(0), rat(0)]);
    }
    assert!(check_associativity(&d).passed());
}

#[test]
fn regular_bimodule_and_perturbed_operator() {
    let a = AlgebraPresentation::truncated_polynomial(2);
    let p = LinearOperator::from_int_rows(&[&[1, 0], &[1, 1]]);
    let n = NijenhuisAlgebra::new(a.clone(), p.clone()).unwrap();
    let m = NijenhuisBimodule::regular(&n);
    assert!(check_bimodule(&a, &m.module).passed());
    assert!(check_nijenhuis_bimodule(&n, &m.module, &m.operator).passed());
    let bad = perturb_operator(&p, 0, 0, 1);
    assert!(!check_nijenhuis_bimodule(&n, &m.module, &bad).passed());
    assert!(NijenhuisBimodule::new(&n, m.module.clone(), bad).is_err());
}

#[test]
fn rota_baxter_scalar_on_ground_field() {
    let a = AlgebraPresentation::truncated_polynomial(1);
    let m = BimodulePresentation::regular(&a);
    for l in -3..=3 {
        let b = LinearOperator::scalar(1, rat(l));
        // l^2 = 2 l^2 holds only for l = 0
        assert_eq!(check_relative_rb(&a, &m, &b).passed(), l == 0, "lambda = {l}");
    }
}

#[test]
fn das_lift_matches_rota_baxter_on_grid() {
    let mut seen = 0;
    for (_, a) in catalog().into_iter().filter(|(_, a)| a.dim() <= 2) {
        let m = BimodulePresentation::regular(&a);
        let d = a.dim();
        let cells = d * d;
        for code in 0..3usize.pow(cells as u32) {
            let mut b = LinearOperator::zero(d, d);
            let mut c = code;
            for k in 0..cells {
                b.set(k / d, k % d, rat((c % 3) as i64 - 1));
                c /= 3;
            }
            let rb = check_relative_rb(&a, &m, &b).passed();
            let lift = das_lift(&a, &m, &b);
            let s = semidirect(&a, &m);
            assert_eq!(rb, check_nijenhuis(&s, &lift).passed());
            seen += usize::from(rb);
        }
    }
    assert!(seen > 5);
}

#[test]
fn semidirect_layout() {
    let a = AlgebraPresentation::truncated_polynomial(2);
    let s = semidirect(&a, &BimodulePresentation::regular(&a));
    assert_eq!(s.dim(), 4);
    assert_eq!(&s.basis[2..], &["x0".to_string(), "x1".to_string()]);
    assert!(check_associativity(&s).passed());
    // module part squares to zero
    assert!(s.basis_product(2, 3).iter().all(|c| *c == rat(0)));
    // 1 * x0 = x0 on the module summand
    assert_eq!(s.basis_product(0, 2), &vec![rat(0), rat(0), rat(1), rat(0)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bimodule_check_matches_semidirect(seed in 0u64..10_000, r in 0usize..3, c in 0usize..3, delta in -1i64..=1) {
        let inst = random_instances(seed, 1).pop().unwrap();
        let n = &inst.algebra;
        let dm = inst.module.dim();
        let pm = perturb_operator(&inst.module.operator, r % dm, c % dm, delta);
        let direct = check_nijenhuis_bimodule(n, &inst.module.module, &pm).passed();
        let m = NijenhuisBimodule { module: inst.module.module.clone(), operator: pm };
        let lifted = check_nijenhuis(&nijenhuis_semidirect(n, &m).algebra, &nijenhuis_semidirect(n, &m).operator).passed();
        prop_assert_eq!(direct, lifted);
    }

    #[test]
    fn deformed_structures_are_associative(seed in 0u64..10_000) {
        let inst = random_instances(seed, 1).pop().unwrap();
        let d = deformed_product(&inst.algebra);
        prop_assert!(check_associativity(&d).passed());
        prop_assert!(check_bimodule(&d, &deformed_bimodule(&inst.algebra, &inst.module)).passed());
        // P stays Nijenhuis for the deformed product
        prop_assert!(check_nijenhuis(&d, &inst.algebra.operator).passed());
    }
}
