//! Randomized invariants over the public API.

use cobord_core::divdiff::{agree, evaluation_op, newton_op, random_lambda_coefficients, Carrier, Elem};
use cobord_core::fgl::universal_fgl;
use cobord_core::hopf::{coproduct, coproduct_left_iterated, coproduct_right_iterated, multiply, pairing};
use cobord_core::lattice::{evaluate_certificate, LambdaLattice, Membership};
use cobord_core::milnor::{act, recover_phi, scalar, stable_product_eval, PhiSeries};
use cobord_core::multiindex::{basis_up_to, partitions};
use cobord_core::products::mu1;
use cobord_core::rational::q;
use cobord_core::series::vars;
use cobord_core::{Coeff, DualElement, MultiIndex, SElement, Series};
use proptest::prelude::*;

fn index(max_weight: u32) -> impl Strategy<Value = MultiIndex> {
    let basis = basis_up_to(max_weight);
    (0..basis.len()).prop_map(move |i| basis[i].clone())
}

/// A polynomial on the carrier's test monomials with coefficients in `-3..=3`.
fn poly(c: &Carrier, coeffs: &[i64]) -> Elem {
    let mut out = c.zero();
    for (m, k) in c.test_set().iter().zip(coeffs) {
        out = &out + &m.elem.scale(&q(*k));
    }
    out
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coproduct_is_coassociative_and_counital(w in index(7)) {
        prop_assert_eq!(coproduct_left_iterated(&w), coproduct_right_iterated(&w));
        let d = coproduct(&w);
        prop_assert_eq!(d.counit_left(), SElement::basis(w.clone()));
        prop_assert_eq!(d.counit_right(), SElement::basis(w));
    }

    #[test]
    fn product_is_associative(a in index(3), b in index(2), c in index(2)) {
        let (a, b, c) = (SElement::basis(a), SElement::basis(b), SElement::basis(c));
        let left = multiply(&multiply(&a, &b).unwrap(), &c).unwrap();
        let right = multiply(&a, &multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn commutator_of_singles(n in 1u32..5, m in 1u32..5) {
        let (sn, sm) = (SElement::single(n), SElement::single(m));
        let c = &multiply(&sn, &sm).unwrap() - &multiply(&sm, &sn).unwrap();
        prop_assert_eq!(c, SElement::single(n + m).scale(&q(m as i64 - n as i64)));
    }

    #[test]
    fn monomials_pair_dually_with_basis(a in index(5), b in index(5)) {
        let m = DualElement::monomial(a.clone(), q(1));
        let expect = if a == b { q(1) } else { q(0) };
        prop_assert_eq!(pairing(&m, &SElement::basis(b)), expect);
    }

    #[test]
    fn action_composes(a in index(2), b in index(2), k in -3i64..=3) {
        let v = vars(&["x"]);
        let e = &Series::monomial(&v, 10, vec![2], DualElement::generator(1))
            + &Series::monomial(&v, 10, vec![1], DualElement::constant(q(k)));
        let (sa, sb) = (SElement::basis(a), SElement::basis(b));
        prop_assert_eq!(act(&multiply(&sa, &sb).unwrap(), &e), act(&sa, &act(&sb, &e)));
    }

    #[test]
    fn lattice_combinations_are_members(seed in 0u64..1000) {
        let t = universal_fgl(3).unwrap();
        let l = LambdaLattice::from_table(&t, 3).unwrap();
        for c in random_lambda_coefficients(seed, 3).unwrap() {
            match l.membership(&c).unwrap() {
                Membership::Member { coordinates } => prop_assert_eq!(evaluate_certificate(&t, &coordinates), c),
                Membership::NotMember { .. } => prop_assert!(false, "{} left the lattice", c),
            }
        }
    }

    #[test]
    fn lattice_ranks_count_partitions(n in 0u32..6) {
        prop_assert_eq!(LambdaLattice::new(n).unwrap().rank(n), partitions(n).len());
    }

    #[test]
    fn newton_twisted_leibniz(a in coeffs(), b in coeffs()) {
        let op = newton_op(3).unwrap();
        let c = op.carrier();
        let (x, y) = (poly(c, &a), poly(c, &b));
        let (dx, dy) = (op.partial(&x).unwrap(), op.partial(&y).unwrap());
        let lhs = op.partial(&(&x * &y)).unwrap();
        let rhs = &(&(&dx * &y) + &(&x * &dy)) - &(op.alpha() * &(&dx * &dy));
        prop_assert!(agree(&lhs, &rhs));
        // π = 1 − α∂ and π² = 1
        let pi = op.pi(&x).unwrap();
        prop_assert!(agree(&pi, &(&x - &(op.alpha() * &dx))));
        prop_assert!(agree(&op.pi(&pi).unwrap(), &x));
    }

    #[test]
    fn evaluation_product_is_associative(a in coeffs(), b in coeffs(), d in coeffs()) {
        let ev = evaluation_op(4).unwrap();
        let mu = mu1(&ev, &ev).unwrap().product;
        let c = ev.carrier();
        let (x, y, z) = (poly(c, &a), poly(c, &b), poly(c, &d));
        let left = mu.apply(&mu.apply(&x, &y).unwrap(), &z).unwrap();
        let right = mu.apply(&x, &mu.apply(&y, &z).unwrap()).unwrap();
        prop_assert!(agree(&left, &right));
    }

    #[test]
    fn phi_round_trips(ks in prop::collection::vec(-2i64..=2, 16)) {
        let w = 3;
        let basis = basis_up_to(w);
        let mut phi = PhiSeries::new(w);
        let mut it = ks.iter().cycle();
        for a in &basis {
            for b in basis.iter().filter(|b| a.weight() + b.weight() <= w) {
                let c = if a.is_empty() && b.is_empty() {
                    DualElement::one_value()
                } else {
                    DualElement::constant(q(*it.next().unwrap()))
                };
                if !c.is_zero_value() {
                    phi.add_term(a.clone(), b.clone(), &c);
                }
            }
        }
        let oracle = |x: &DualElement, y: &DualElement| {
            Ok(stable_product_eval(&phi, &scalar(x, 0), &scalar(y, 0))?.constant_term())
        };
        prop_assert_eq!(recover_phi(&oracle, w).unwrap(), phi);
    }
}
