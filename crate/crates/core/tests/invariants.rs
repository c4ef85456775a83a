use proptest::prelude::*;

use vertex_smash::fock::{check_heisenberg_commutators, monomials_up_to, FockVector, HeisenbergVoa};
use vertex_smash::lattice::{cocycle_check, standard_cocycle, Lattice};
use vertex_smash::scalar::root_of_unity;
use vertex_smash::series::{series_derivative, series_mul};
use vertex_smash::suites::check_widening;
use vertex_smash::vertex::{check_skew_symmetry, check_weak_assoc, Adjoint, Rect, VertexAlgebra};
use vertex_smash::{Scalar, Series, Window};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| Scalar::from_ratio(n, d))
}

fn poly() -> impl Strategy<Value = Series<Scalar>> {
    prop::collection::vec((-4i64..=4, scalar()), 0..5).prop_map(Series::polynomial)
}

fn fock_basis(rank: usize, w: i64) -> Vec<FockVector> {
    monomials_up_to(rank, w).into_iter().map(FockVector::from_monomial).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn roots_of_unity_multiply(m in 1u64..=12, j in -20i64..20, k in -20i64..20) {
        prop_assert_eq!(&root_of_unity(m, j) * &root_of_unity(m, k), root_of_unity(m, j + k));
        prop_assert_eq!(root_of_unity(m, j).pow(m as u32), Scalar::one());
    }

    #[test]
    fn laurent_product_is_commutative_and_associative(a in poly(), b in poly(), c in poly()) {
        let ab = series_mul(&a, &b).unwrap();
        prop_assert_eq!(&ab, &series_mul(&b, &a).unwrap());
        prop_assert_eq!(series_mul(&ab, &c).unwrap(), series_mul(&a, &series_mul(&b, &c).unwrap()).unwrap());
    }

    #[test]
    fn derivative_is_a_derivation(a in poly(), b in poly()) {
        let lhs = series_derivative(&series_mul(&a, &b).unwrap(), 1);
        let rhs = series_mul(&series_derivative(&a, 1), &b).unwrap().add(&series_mul(&a, &series_derivative(&b, 1)).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_and_reflect_invert(a in poly(), k in -5i64..5) {
        prop_assert_eq!(a.shift(k).shift(-k), a.clone());
        prop_assert_eq!(a.reflect().reflect(), a);
    }

    #[test]
    fn standard_cocycle_on_even_lattices(a in 1i64..=3, b in -3i64..=3, d in 1i64..=3) {
        let l = Lattice::new(vec![vec![2 * a, b], vec![b, 2 * d]]);
        prop_assume!(l.is_ok());
        let l = l.unwrap();
        let ck = cocycle_check(&l, &standard_cocycle(&l), 2);
        prop_assert!(ck.violation.is_none(), "{:?}", ck.violation);
        prop_assert!(ck.checked > 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn m1_skew_symmetry(i in 0usize..14, j in 0usize..14) {
        let l = Lattice::builtin("a2").unwrap();
        let vs = fock_basis(2, 2);
        let voa = HeisenbergVoa::new(l);
        let c = check_skew_symmetry(&voa, &vs[i % vs.len()], &vs[j % vs.len()], Window { lo: -5, hi: 5 }).unwrap();
        prop_assert!(c.is_pass(), "{:?}", c.mismatch);
    }

    #[test]
    fn m1_widening_keeps_certified_coefficients(i in 0usize..10, j in 0usize..10, lo in -6i64..0, hi in 0i64..6) {
        let l = Lattice::a1();
        let vs = fock_basis(1, 3);
        let voa = HeisenbergVoa::new(l);
        let (u, v) = (&vs[i % vs.len()], &vs[j % vs.len()]);
        let verdict = check_widening(|w| voa.y(u, v, w), Window { lo, hi }).unwrap();
        prop_assert!(verdict.is_pass(), "{}", verdict.witness);
    }

    #[test]
    fn vacuum_is_weakly_associative_with_l_zero(i in 0usize..10, j in 0usize..10) {
        let voa = HeisenbergVoa::new(Lattice::a1());
        let vs = fock_basis(1, 2);
        let r = check_weak_assoc(&voa, &Adjoint(&voa), &voa.vacuum(), &vs[i % vs.len()], &vs[j % vs.len()], Rect::square(Window { lo: -3, hi: 3 }), 4).unwrap();
        prop_assert_eq!(r.l, Some(0));
    }
}

#[test]
fn heisenberg_commutators_on_a2() {
    let l = Lattice::builtin("a2").unwrap();
    let v = check_heisenberg_commutators(&l, &fock_basis(2, 3), -3..=3);
    assert!(v.is_pass(), "{}", v.witness);
}
