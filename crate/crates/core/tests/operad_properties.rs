use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use njalg::exactlin::rat;
use njalg::operad_forest::*;
use num_traits::Signed;
use proptest::prelude::*;

fn t(s: &str) -> TreeMonomial {
    TreeMonomial::parse(s).unwrap()
}

fn gens() -> Vec<Generator> {
    vec![Generator::m(2), Generator::m(3), Generator::p(1), Generator::p(2)]
}

fn d(e: &OperadElement) -> OperadElement {
    differential(e, SignMutation::None)
}

fn left_comb(outer: &str, n: usize, inner: &str) -> String {
    let rest: Vec<String> = (3..=n).map(|k| k.to_string()).collect();
    format!("{outer}({inner},{})", rest.join(","))
}

#[test]
fn path_encoding_is_injective() {
    let mut seen: HashMap<(usize, Vec<Vec<Generator>>), TreeMonomial> = HashMap::new();
    let all = enumerate_monomials(&gens(), 3);
    assert!(all.len() > 300);
    for m in all {
        if let Some(prev) = seen.insert((m.arity(), m.path_encoding()), m.clone()) {
            panic!("{prev} and {m} share a path encoding");
        }
    }
}

#[test]
fn weights() {
    assert_eq!(Generator::m(2).weight_phi(), 1);
    assert_eq!(Generator::p(1).weight_phi(), 1);
    assert_eq!(Generator::p(3).weight_phi(), 5);
    assert_eq!(Generator::m(4).weight_phi(), 3);
    let mut letters = [Generator::m(3), Generator::p(2), Generator::p(1), Generator::m(2)];
    letters.sort_by_key(|g| g.letter_rank());
    let names: Vec<String> = letters.iter().map(|g| g.to_string()).collect();
    assert_eq!(names, ["P1", "m2", "P2", "m3"]);
}

#[test]
fn compare_examples() {
    let a = t("m2(m2(1,2),3)");
    let b = t("m2(1,m2(2,3))");
    assert_eq!(compare_xi(&a, &a), Ordering::Equal);
    assert_eq!(compare_xi(&a, &b), compare_xi(&b, &a).reverse());
    assert_ne!(compare_xi(&a, &b), Ordering::Equal);
    assert_eq!(leading_term(&d(&OperadElement::generator(Generator::m(3)))).unwrap().0, a);
}

#[test]
fn leading_terms_of_generators() {
    for n in 3..=6 {
        let (lt, c) = leading_term(&d(&OperadElement::generator(Generator::m(n)))).unwrap();
        assert_eq!(lt, t(&left_comb(&format!("m{}", n - 1), n, "m2(1,2)")));
        assert_eq!(c.abs(), rat(1));
        let (lt, c) = leading_term(&d(&OperadElement::generator(Generator::p(n)))).unwrap();
        assert_eq!(lt, t(&left_comb(&format!("P{}", n - 1), n, "m2(P1(1),2)")));
        assert_eq!(c.abs(), rat(1));
    }
}

#[test]
fn order_is_total_on_each_arity() {
    let mut by_arity: HashMap<usize, Vec<TreeMonomial>> = HashMap::new();
    for m in enumerate_monomials(&gens(), 2) {
        by_arity.entry(m.arity()).or_default().push(m);
    }
    for ms in by_arity.values_mut() {
        ms.sort_by(compare_xi);
        for (i, a) in ms.iter().enumerate() {
            for b in &ms[i + 1..] {
                assert_eq!(compare_xi(a, b), Ordering::Less, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn differential_of_m4() {
    let e = d(&OperadElement::generator(Generator::m(4)));
    let got: HashSet<String> = e.iter().map(|(m, _)| m.to_string()).collect();
    let want: HashSet<String> = [
        "m2(m3(1,2,3),4)",
        "m2(1,m3(2,3,4))",
        "m3(m2(1,2),3,4)",
        "m3(1,m2(2,3),4)",
        "m3(1,2,m2(3,4))",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(got, want);
    assert!(e.iter().all(|(_, c)| c.abs() == rat(1)));
}

#[test]
fn low_arity_differentials() {
    assert!(d(&OperadElement::generator(Generator::m(2))).is_zero());
    let p1 = d(&OperadElement::generator(Generator::p(1)));
    assert!(p1.is_zero());
    assert!(d(&OperadElement::generator(Generator::x(2))).is_zero());
    assert!(d(&OperadElement::generator(Generator::y(1))).is_zero());
}

#[test]
fn differential_lowers_degree() {
    for p in [Presentation::Mp, Presentation::Xy] {
        for g in presentation_generators(p, 6) {
            let e = generator_differential(g, SignMutation::None);
            for (m, _) in e.iter() {
                assert_eq!(m.degree(), g.degree() - 1, "{g}: {m}");
                assert_eq!(m.arity(), g.arity());
            }
        }
    }
}

#[test]
fn square_zero_and_mutation() {
    assert!(d_squared_report(5, Presentation::Mp, SignMutation::None).all_zero());
    assert!(d_squared_report(5, Presentation::Xy, SignMutation::None).all_zero());
    let bad = d_squared_report(4, Presentation::Mp, SignMutation::FlipNested);
    assert!(!bad.all_zero());
    for e in &bad.entries {
        let broken = e.terms_in_d2 != 0;
        assert_eq!(broken, e.generator.family == Family::P && e.generator.arity() >= 3, "{}", e.generator);
    }
}

fn monomial() -> impl Strategy<Value = TreeMonomial> {
    let all = enumerate_monomials(&gens(), 2);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn leibniz_rule(u in monomial(), v in monomial(), leaf in 0usize..8) {
        let i = leaf % u.arity() + 1;
        let eu = OperadElement::monomial(u.clone());
        let ev = OperadElement::monomial(v.clone());
        let lhs = d(&eu.compose_at(i, &ev).unwrap());
        let mut rhs = d(&eu).compose_at(i, &ev).unwrap();
        let s = if u.degree().rem_euclid(2) == 1 { rat(-1) } else { rat(1) };
        rhs.add_assign(&eu.compose_at(i, &d(&ev)).unwrap().scale(&s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn order_is_compatible_with_composition(a in monomial(), b in monomial(), c in monomial(), leaf in 0usize..8) {
        prop_assume!(a.arity() == b.arity() && a != b);
        let i = leaf % a.arity() + 1;
        let ord = compare_xi(&a, &b);
        let (_, ac) = a.compose_at(i, &c).unwrap();
        let (_, bc) = b.compose_at(i, &c).unwrap();
        prop_assert_eq!(compare_xi(&ac, &bc), ord);
        let j = leaf % c.arity() + 1;
        let (_, ca) = c.compose_at(j, &a).unwrap();
        let (_, cb) = c.compose_at(j, &b).unwrap();
        prop_assert_eq!(compare_xi(&ca, &cb), ord);
    }
}
