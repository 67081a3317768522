//! Proptest generators for small algebras and polynomials.

use std::sync::Arc;

use proptest::prelude::*;
use qreal::{Algebra, Generator, Mode, Monomial, OperatorPolynomial, Scalar, ScalarMatrix, DEFAULT_TOL};

pub const CASES: u32 = 500;

pub fn theta_strategy(n: usize) -> impl Strategy<Value = ScalarMatrix> {
    let diag = prop::collection::vec(1i64..=3, n);
    let off = prop::collection::vec((-1i64..=1, -1i64..=1), n * n);
    (any::<bool>(), diag, off).prop_map(move |(identity, diag, off)| {
        if identity {
            return ScalarMatrix::identity(n);
        }
        let mut t = ScalarMatrix::zeros(n, n);
        for j in 0..n {
            t[(j, j)] = Scalar::from_int(diag[j]);
            for k in j + 1..n {
                let (re, im) = off[j * n + k];
                let v = Scalar::complex_ratio((re, 1), (im, 1));
                t[(k, j)] = v.conj();
                t[(j, k)] = v;
            }
        }
        t
    })
}

pub fn algebra_strategy() -> impl Strategy<Value = Arc<Algebra>> {
    (1usize..=3)
        .prop_flat_map(theta_strategy)
        .prop_map(|t| Algebra::new(t.rows(), t, Mode::Exact, DEFAULT_TOL).unwrap())
}

pub fn word_strategy(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Generator>> {
    prop::collection::vec((0..n, any::<bool>()).prop_map(|(mode, dagger)| Generator { mode, dagger }), 0..=max_len)
}

/// Sum of up to three normal-ordered monomials of degree at most 4.
pub fn poly_strategy(alg: Arc<Algebra>) -> impl Strategy<Value = OperatorPolynomial> {
    let n = alg.modes();
    let term = (word_strategy(n, 4), -3i64..=3, -3i64..=3);
    prop::collection::vec(term, 0..=3).prop_map(move |terms| {
        let mut p = OperatorPolynomial::zero(&alg);
        for (word, re, im) in terms {
            let mut creation = vec![0; n];
            let mut annihilation = vec![0; n];
            for g in word {
                if g.dagger {
                    creation[g.mode] += 1;
                } else {
                    annihilation[g.mode] += 1;
                }
            }
            p.add_term(Monomial::new(creation, annihilation), Scalar::complex_ratio((re, 1), (im, 2)));
        }
        p
    })
}

pub fn with_polys(count: usize) -> impl Strategy<Value = (Arc<Algebra>, Vec<OperatorPolynomial>)> {
    algebra_strategy()
        .prop_flat_map(move |alg| (Just(alg.clone()), prop::collection::vec(poly_strategy(alg), count)))
}

pub fn product(alg: &Arc<Algebra>, word: &[Generator]) -> OperatorPolynomial {
    word.iter().fold(OperatorPolynomial::one(alg), |acc, &g| &acc * &OperatorPolynomial::generator(alg, g).unwrap())
}

/// Ring, commutator and adjoint laws on three polynomials; each residual must
/// be exactly zero.
pub fn laws(alg: &Arc<Algebra>, p: &OperatorPolynomial, q: &OperatorPolynomial, r: &OperatorPolynomial) -> Result<(), String> {
    let zero = |label: &str, x: OperatorPolynomial| if x.is_zero() { Ok(()) } else { Err(format!("{label}: {x}")) };
    zero("associativity", &(&(p * q) * r) - &(p * &(q * r)))?;
    zero("left distributivity", &(p * &(q + r)) - &(&(p * q) + &(p * r)))?;
    zero("right distributivity", &(&(q + r) * p) - &(&(q * p) + &(r * p)))?;
    zero("unit", &(p * &OperatorPolynomial::one(alg)) - p)?;
    zero("antisymmetry", &p.commutator(q) + &q.commutator(p))?;
    zero(
        "jacobi",
        &(&p.commutator(&q.commutator(r)) + &q.commutator(&r.commutator(p))) + &r.commutator(&p.commutator(q)),
    )?;
    zero("leibniz", &p.commutator(&(q * r)) - &(&(&p.commutator(q) * r) + &(q * &p.commutator(r))))?;
    zero("involution", &p.adjoint().adjoint() - p)?;
    zero("anti-homomorphism", &(p * q).adjoint() - &(&q.adjoint() * &p.adjoint()))
}
