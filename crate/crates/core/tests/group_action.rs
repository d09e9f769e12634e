use proptest::prelude::*;
use triprod::group::{line_to_angle, mobius, ExtReal};
use triprod::harness::random_group_elements;
use triprod::quadrature::QuadOptions;
use triprod::vector::Atom;
use triprod::{Complex64, GroupElement, ModelVector, RepnParam};

fn models() -> Vec<RepnParam> {
    vec![
        RepnParam::principal(Complex64::new(0.0, 0.0), 0),
        RepnParam::principal(Complex64::new(0.0, 5.0), 0),
        RepnParam::principal(Complex64::new(0.0, 5.0), 1),
        RepnParam::discrete_sub(2).unwrap(),
        RepnParam::discrete_quot(2).unwrap(),
        RepnParam::discrete_sub(6).unwrap(),
        RepnParam::discrete_quot(6).unwrap(),
    ]
}

fn bump(p: RepnParam) -> ModelVector {
    ModelVector::from_atom(p, Atom::bump(0.2, 0.4, 0)).unwrap()
}

// max |a - b| over a fine circle grid, relative to max |b|
fn circle_gap(a: &ModelVector, b: &ModelVector) -> f64 {
    let n = 4000;
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for i in 0..n {
        let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
        let (x, y) = (a.eval_circle(th), b.eval_circle(th));
        diff = diff.max((x - y).norm());
        scale = scale.max(y.norm());
    }
    diff / scale
}

fn homomorphism_gap(p: RepnParam, g1: &GroupElement, g2: &GroupElement) -> f64 {
    let v = bump(p);
    let lhs = v.act(&p, &(*g1 * *g2)).unwrap();
    let rhs = v.act(&p, g2).unwrap().act(&p, g1).unwrap();
    circle_gap(&lhs, &rhs)
}

#[test]
fn homomorphism_on_seeded_pairs() {
    let gs = random_group_elements(7, 40);
    for p in models() {
        for pair in gs.chunks(2) {
            let gap = homomorphism_gap(p, &pair[0], &pair[1]);
            assert!(gap <= 1e-9, "{p}: {gap:e}");
        }
    }
}

#[test]
fn unitary_principal_series_preserve_norm() {
    let gs = random_group_elements(11, 20);
    let o = QuadOptions::rel(1e-11);
    for lam in [0.0, 5.0] {
        let p = RepnParam::unitary(lam, 0);
        let v = ModelVector::alpha(p);
        let n0 = v.l2_norm(&o).unwrap();
        for g in &gs {
            let n = v.act(&p, g).unwrap().l2_norm(&o).unwrap();
            assert!((n / n0 - 1.0).abs() <= 1e-7, "lambda = {lam}i, g = {g:?}: {n} vs {n0}");
        }
    }
}

#[test]
fn identity_acts_trivially() {
    for p in models() {
        let v = bump(p);
        let w = v.act(&p, &GroupElement::identity()).unwrap();
        assert!(circle_gap(&w, &v) < 1e-14);
    }
}

#[test]
fn scalar_matrices_act_by_sign_only() {
    // the group is projective: 3·g and g are the same element
    let g = GroupElement::new(0.4, -1.1, 0.9, 0.7).unwrap();
    let h = GroupElement::new(1.2, -3.3, 2.7, 2.1).unwrap();
    for p in models() {
        let v = bump(p);
        let gap = circle_gap(&v.act(&p, &g).unwrap(), &v.act(&p, &h).unwrap());
        assert!(gap < 1e-12, "{p}: {gap:e}");
    }
}

#[test]
fn mobius_respects_composition_through_infinity() {
    let g = GroupElement::new(0.0, 1.0, -1.0, 0.0).unwrap();
    assert!(mobius(&g, ExtReal::Finite(0.0)).is_infinite());
    assert_eq!(mobius(&g, ExtReal::Infinity).finite(), Some(0.0));
    let th = line_to_angle(ExtReal::Infinity);
    assert!(th.abs() < 1e-15 || (th - 2.0 * std::f64::consts::PI).abs() < 1e-15);
}

fn group_element() -> impl Strategy<Value = GroupElement> {
    prop::array::uniform4(-2.0f64..2.0)
        .prop_filter("|det| >= 0.3", |e| (e[0] * e[3] - e[1] * e[2]).abs() >= 0.3)
        .prop_map(|e| GroupElement::new(e[0], e[1], e[2], e[3]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn action_is_a_homomorphism(g1 in group_element(), g2 in group_element(), which in 0usize..7) {
        let p = models()[which];
        prop_assert!(homomorphism_gap(p, &g1, &g2) <= 1e-9);
    }

    #[test]
    fn inverse_undoes_action(g in group_element(), which in 0usize..7) {
        let p = models()[which];
        let v = bump(p);
        let w = v.act(&p, &g).unwrap().act(&p, &g.inverse()).unwrap();
        prop_assert!(circle_gap(&w, &v) <= 1e-9);
    }

    #[test]
    fn mobius_is_compatible_with_products(g1 in group_element(), g2 in group_element(), x in -5.0f64..5.0) {
        let a = mobius(&(g1 * g2), ExtReal::Finite(x));
        let b = mobius(&g1, mobius(&g2, ExtReal::Finite(x)));
        let (ta, tb) = (line_to_angle(a), line_to_angle(b));
        let d = (ta - tb).rem_euclid(2.0 * std::f64::consts::PI);
        prop_assert!(d.min(2.0 * std::f64::consts::PI - d) < 1e-9);
    }
}
