//! Randomized algebraic laws over small algebras, including general
//! Hermitian commutation matrices.

mod common;

use common::strategies::{algebra_strategy, poly_strategy, product, with_polys, word_strategy, CASES};
use proptest::prelude::*;
use qreal::{normal_order, OperatorMatrix, OperatorPolynomial, RewriteStrategy, Scalar};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn ring_laws((alg, ps) in with_polys(3)) {
        let (p, q, r) = (&ps[0], &ps[1], &ps[2]);
        prop_assert_eq!(&(p + q) + r, p + &(q + r));
        prop_assert_eq!(p + q, q + p);
        prop_assert_eq!(&(p * q) * r, p * &(q * r));
        prop_assert_eq!(p * &(q + r), &(p * q) + &(p * r));
        prop_assert_eq!(&(q + r) * p, &(q * p) + &(r * p));
        prop_assert_eq!(p * &OperatorPolynomial::one(&alg), p.clone());
        prop_assert!((p - p).is_zero());
    }

    #[test]
    fn commutator_laws((_alg, ps) in with_polys(3)) {
        let (p, q, r) = (&ps[0], &ps[1], &ps[2]);
        prop_assert_eq!(p.commutator(q), -q.commutator(p));
        let jacobi = &(&p.commutator(&q.commutator(r)) + &q.commutator(&r.commutator(p)))
            + &r.commutator(&p.commutator(q));
        prop_assert!(jacobi.is_zero());
        prop_assert_eq!(p.commutator(&(q * r)), &(&p.commutator(q) * r) + &(q * &p.commutator(r)));
    }

    #[test]
    fn generator_brackets(alg in algebra_strategy()) {
        let n = alg.modes();
        for j in 0..n {
            let a = OperatorPolynomial::annihilator(&alg, j).unwrap();
            for k in 0..n {
                let ad = OperatorPolynomial::creator(&alg, k).unwrap();
                let b = OperatorPolynomial::annihilator(&alg, k).unwrap();
                prop_assert_eq!(a.commutator(&ad), OperatorPolynomial::constant(&alg, alg.theta()[(j, k)].clone()));
                prop_assert!(a.commutator(&b).is_zero());
                prop_assert!(a.adjoint().commutator(&ad).is_zero());
            }
        }
    }

    #[test]
    fn adjoint_laws((_alg, ps) in with_polys(2)) {
        let (p, q) = (&ps[0], &ps[1]);
        prop_assert_eq!(p.adjoint().adjoint(), p.clone());
        prop_assert_eq!((p * q).adjoint(), &q.adjoint() * &p.adjoint());
        prop_assert_eq!((p + q).adjoint(), &p.adjoint() + &q.adjoint());
        prop_assert!((p * &p.adjoint()).is_self_adjoint());
    }

    #[test]
    fn rewriting_is_confluent(
        (alg, word) in algebra_strategy().prop_flat_map(|alg| { let n = alg.modes(); (Just(alg), word_strategy(n, 7)) }),
        re in -4i64..=4,
    ) {
        let c = Scalar::from_int(re);
        let left = normal_order(&alg, &word, c.clone(), RewriteStrategy::Leftmost).unwrap();
        let right = normal_order(&alg, &word, c.clone(), RewriteStrategy::Rightmost).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left, product(&alg, &word).scale(&c));
    }

    #[test]
    fn matrix_adjoint_reverses_products((alg, ps) in with_polys(12)) {
        let m = OperatorMatrix::from_entries(&alg, 2, 3, ps[..6].to_vec()).unwrap();
        let k = OperatorMatrix::from_entries(&alg, 3, 2, ps[6..].to_vec()).unwrap();
        prop_assert_eq!(m.checked_mul(&k).unwrap().adjoint(), k.adjoint().checked_mul(&m.adjoint()).unwrap());
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn gradient_matches_commutators((_alg, ps) in algebra_strategy()
        .prop_filter("theta = I", |a| a.theta_is_identity())
        .prop_flat_map(|alg| (Just(alg.clone()), prop::collection::vec(poly_strategy(alg), 1))))
    {
        let phi = &ps[0];
        let alg = phi.algebra();
        let n = alg.modes();
        let grad = phi.wirtinger_gradient();
        prop_assert_eq!(grad.len(), 2 * n);
        for j in 0..n {
            let a = OperatorPolynomial::annihilator(alg, j).unwrap();
            let ad = OperatorPolynomial::creator(alg, j).unwrap();
            prop_assert_eq!(&grad[j], &a.commutator(phi));
            prop_assert_eq!(&grad[n + j], &phi.commutator(&ad));
        }
    }
}
