//! Polynomials in bosonic creation and annihilation operators.
//!
//! An [`Algebra`] fixes the number of modes `n` and the commutation data
//! `[a_j, a_k*] = Θ_jk`. Every [`OperatorPolynomial`] is stored in normal
//! order (all creators to the left of all annihilators), which is a
//! canonical form for the algebra: two polynomials are equal exactly when
//! their term maps are.
//!
//! Products are normal-ordered with the derivation rule
//! `a_j f(a*) = f(a*) a_j + Σ_l Θ_jl ∂f/∂a_l*`, which is the closed form of
//! repeatedly rewriting `a_j a_k* → a_k* a_j + Θ_jk`. The rewrite system itself
//! is available through [`normal_order`] and is used as a cross-check.
//!
//! Mode indices are zero-based in the API; they render one-based (`a1`, `a1'`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::ScalarMatrix;
use crate::scalar::{Mode, Scalar, DEFAULT_TOL};

/// Mode count, commutation matrix and coefficient settings shared by a
/// family of polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    modes: usize,
    theta: ScalarMatrix,
    theta_is_identity: bool,
    mode: Mode,
    tol: f64,
}

impl Algebra {
    /// Creates an algebra with commutation matrix `theta`.
    ///
    /// `theta` must be `n x n` and Hermitian; a non-Hermitian matrix cannot
    /// come from operators with `a_k* = (a_k)†`.
    pub fn new(modes: usize, theta: ScalarMatrix, mode: Mode, tol: f64) -> Result<Arc<Self>> {
        if theta.rows() != modes || theta.cols() != modes {
            return Err(Error::ThetaShape { modes, rows: theta.rows(), cols: theta.cols() });
        }
        let theta = theta.in_mode(mode);
        if !theta.is_hermitian(tol) {
            return Err(Error::ThetaNotHermitian);
        }
        let theta_is_identity = theta.is_identity(tol);
        Ok(Arc::new(Algebra { modes, theta, theta_is_identity, mode, tol }))
    }

    /// Canonical commutation relations (`Θ = I`) with exact coefficients.
    pub fn canonical(modes: usize) -> Arc<Self> {
        Self::new(modes, ScalarMatrix::identity(modes), Mode::Exact, DEFAULT_TOL)
            .expect("identity is a valid commutation matrix")
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn theta(&self) -> &ScalarMatrix {
        &self.theta
    }

    pub fn theta_is_identity(&self) -> bool {
        self.theta_is_identity
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn check_mode(&self, index: usize) -> Result<()> {
        if index < self.modes {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange { index, modes: self.modes })
        }
    }
}

/// A single creation (`dagger = true`) or annihilation generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub mode: usize,
    pub dagger: bool,
}

impl Generator {
    pub fn annihilator(mode: usize) -> Self {
        Generator { mode, dagger: false }
    }

    pub fn creator(mode: usize) -> Self {
        Generator { mode, dagger: true }
    }
}

/// The normal-ordered word `Π (a_i*)^{h_i} · Π (a_i)^{k_i}`, stored as its
/// creation and annihilation multidegrees.
///
/// The ordering used by `Ord` is the rendering order: higher total degree
/// first, then creation degrees in descending lexicographic order, then
/// annihilation degrees likewise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    creation: Vec<u32>,
    annihilation: Vec<u32>,
}

impl Monomial {
    pub fn identity(modes: usize) -> Self {
        Monomial { creation: vec![0; modes], annihilation: vec![0; modes] }
    }

    /// Panics if the two degree vectors differ in length.
    pub fn new(creation: Vec<u32>, annihilation: Vec<u32>) -> Self {
        assert_eq!(creation.len(), annihilation.len(), "degree vectors must have equal length");
        Monomial { creation, annihilation }
    }

    pub fn creation(&self) -> &[u32] {
        &self.creation
    }

    pub fn annihilation(&self) -> &[u32] {
        &self.annihilation
    }

    pub fn total_degree(&self) -> u32 {
        self.creation_degree() + self.annihilation_degree()
    }

    pub fn creation_degree(&self) -> u32 {
        self.creation.iter().sum()
    }

    pub fn annihilation_degree(&self) -> u32 {
        self.annihilation.iter().sum()
    }

    pub fn is_identity(&self) -> bool {
        self.total_degree() == 0
    }

    /// Modes that carry a creation operator.
    pub fn creation_support(&self) -> Vec<usize> {
        support(&self.creation)
    }

    /// Modes that carry an annihilation operator.
    pub fn annihilation_support(&self) -> Vec<usize> {
        support(&self.annihilation)
    }

    fn adjoint(&self) -> Self {
        Monomial { creation: self.annihilation.clone(), annihilation: self.creation.clone() }
    }
}

fn support(degrees: &[u32]) -> Vec<usize> {
    degrees.iter().enumerate().filter(|(_, &d)| d > 0).map(|(i, _)| i).collect()
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .total_degree()
            .cmp(&self.total_degree())
            .then_with(|| other.creation.cmp(&self.creation))
            .then_with(|| other.annihilation.cmp(&self.annihilation))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let factors = self
            .creation
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, d, "'"))
            .chain(self.annihilation.iter().enumerate().map(|(i, &d)| (i, d, "")));
        for (i, d, mark) in factors {
            if d == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "a{}{}", i + 1, mark)?;
            if d > 1 {
                write!(f, "^{d}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A finite linear combination of normal-ordered monomials.
#[derive(Clone, Debug)]
pub struct OperatorPolynomial {
    alg: Arc<Algebra>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl OperatorPolynomial {
    pub fn zero(alg: &Arc<Algebra>) -> Self {
        OperatorPolynomial { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(alg: &Arc<Algebra>) -> Self {
        Self::constant(alg, Scalar::one())
    }

    pub fn constant(alg: &Arc<Algebra>, c: Scalar) -> Self {
        Self::term(alg, Monomial::identity(alg.modes), c)
    }

    pub fn term(alg: &Arc<Algebra>, mono: Monomial, c: Scalar) -> Self {
        assert_eq!(mono.creation.len(), alg.modes, "monomial has the wrong mode count");
        let mut p = Self::zero(alg);
        p.add_term(mono, c);
        p
    }

    /// `a_j` (zero-based `j`).
    pub fn annihilator(alg: &Arc<Algebra>, j: usize) -> Result<Self> {
        Self::generator(alg, Generator::annihilator(j))
    }

    /// `a_j*` (zero-based `j`).
    pub fn creator(alg: &Arc<Algebra>, j: usize) -> Result<Self> {
        Self::generator(alg, Generator::creator(j))
    }

    pub fn generator(alg: &Arc<Algebra>, g: Generator) -> Result<Self> {
        alg.check_mode(g.mode)?;
        let mut mono = Monomial::identity(alg.modes);
        if g.dagger {
            mono.creation[g.mode] = 1;
        } else {
            mono.annihilation[g.mode] = 1;
        }
        Ok(Self::term(alg, mono, Scalar::one()))
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Scalar {
        self.terms.get(mono).cloned().unwrap_or_else(Scalar::zero)
    }

    /// The value of a constant polynomial, `None` if any non-identity term is present.
    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.iter().next().filter(|(m, _)| m.is_identity()).map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Largest creation degree of any term; the number of occupation levels a
    /// single application of this operator can climb.
    pub fn creation_depth(&self) -> u32 {
        self.terms.keys().map(Monomial::creation_degree).max().unwrap_or(0)
    }

    /// True when every coefficient is stored exactly.
    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    /// Largest coefficient magnitude; zero for the zero polynomial.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Adds `c` times `mono`, dropping the term if the result is negligible.
    pub fn add_term(&mut self, mono: Monomial, c: Scalar) {
        let c = c.in_mode(self.alg.mode);
        if c.is_exact_zero() {
            return;
        }
        let tol = self.alg.tol;
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if !c.is_negligible(tol) {
                    e.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_negligible(tol) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg
    }

    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    /// Normal-ordered product `self · other`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        let n = self.alg.modes;
        let mut out = Self::zero(&self.alg);
        for (m1, c1) in &self.terms {
            // Move the annihilators of m1 through `other`, then prepend m1's creators.
            let mut moved = other.clone();
            for j in 0..n {
                for _ in 0..m1.annihilation[j] {
                    moved = moved.apply_annihilator(j);
                }
            }
            for (m2, c2) in &moved.terms {
                let creation = (0..n).map(|i| m1.creation[i] + m2.creation[i]).collect();
                out.add_term(Monomial::new(creation, m2.annihilation.clone()), c1 * c2);
            }
        }
        Ok(out)
    }

    /// `a_j · self`, normal-ordered.
    fn apply_annihilator(&self, j: usize) -> Self {
        let theta = &self.alg.theta;
        let mut out = Self::zero(&self.alg);
        for (m, c) in &self.terms {
            let mut shifted = m.clone();
            shifted.annihilation[j] += 1;
            out.add_term(shifted, c.clone());
            for l in 0..self.alg.modes {
                let h = m.creation[l];
                let t = &theta[(j, l)];
                if h == 0 || t.is_exact_zero() {
                    continue;
                }
                let mut reduced = m.clone();
                reduced.creation[l] -= 1;
                out.add_term(reduced, &(c * t) * &Scalar::from_int(h.into()));
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero(&self.alg);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    /// Hilbert-space adjoint. Conjugating the coefficient and reversing the
    /// word `a*^h a^k` gives `a*^k a^h`, which is already normal-ordered.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.alg);
        for (m, c) in &self.terms {
            out.add_term(m.adjoint(), c.conj());
        }
        out
    }

    /// `[self, other] = self·other − other·self`.
    pub fn checked_commutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.checked_commutator(other).expect("commutator of polynomials from different algebras")
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }

    /// Formal gradient treating `a` and `a*` as independent: entry `j < n` is
    /// `∂/∂a_j*`, entry `n + j` is `∂/∂a_j`, applied termwise to the
    /// normal-ordered form.
    pub fn wirtinger_gradient(&self) -> Vec<OperatorPolynomial> {
        let n = self.alg.modes;
        let mut grad = vec![Self::zero(&self.alg); 2 * n];
        for (m, c) in &self.terms {
            for j in 0..n {
                let h = m.creation[j];
                if h > 0 {
                    let mut d = m.clone();
                    d.creation[j] -= 1;
                    grad[j].add_term(d, c * &Scalar::from_int(h.into()));
                }
                let k = m.annihilation[j];
                if k > 0 {
                    let mut d = m.clone();
                    d.annihilation[j] -= 1;
                    grad[n + j].add_term(d, c * &Scalar::from_int(k.into()));
                }
            }
        }
        grad
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(&self.alg);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }
}

impl PartialEq for OperatorPolynomial {
    /// Term-map equality: exact coefficients compare syntactically, floating
    /// ones within the algebra tolerance.
    fn eq(&self, other: &Self) -> bool {
        if !self.same_algebra(other) {
            return false;
        }
        let tol = self.alg.tol;
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((m1, c1), (m2, c2))| m1 == m2 && c1.approx_eq(c2, tol))
    }
}

impl fmt::Display for OperatorPolynomial {
    /// Canonical text form, e.g. `(0+1i)*a1'^2*a2^2 + (0-1i)*a2'^2*a1^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            if m.is_identity() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a OperatorPolynomial> for &'a OperatorPolynomial {
            type Output = OperatorPolynomial;
            /// Panics if the operands belong to different algebras.
            fn $m(self, rhs: &OperatorPolynomial) -> OperatorPolynomial {
                self.$checked(rhs).expect("operands belong to different algebras")
            }
        }
        impl $tr<OperatorPolynomial> for OperatorPolynomial {
            type Output = OperatorPolynomial;
            fn $m(self, rhs: OperatorPolynomial) -> OperatorPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn neg(self) -> OperatorPolynomial {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn neg(self) -> OperatorPolynomial {
        -&self
    }
}

/// Which redex the rewrite system contracts first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteStrategy {
    Leftmost,
    Rightmost,
}

/// Normal-orders `prefactor · word` by rewriting `a_j a_k* → a_k* a_j + Θ_jk`
/// to a fixpoint. The result does not depend on `strategy`.
pub fn normal_order(
    alg: &Arc<Algebra>,
    word: &[Generator],
    prefactor: Scalar,
    strategy: RewriteStrategy,
) -> Result<OperatorPolynomial> {
    for g in word {
        alg.check_mode(g.mode)?;
    }
    let mut out = OperatorPolynomial::zero(alg);
    let mut pending = vec![(prefactor, word.to_vec())];
    while let Some((c, w)) = pending.pop() {
        let mut redexes = w.windows(2).enumerate().filter(|(_, p)| !p[0].dagger && p[1].dagger);
        let redex = match strategy {
            RewriteStrategy::Leftmost => redexes.next(),
            RewriteStrategy::Rightmost => redexes.next_back(),
        }
        .map(|(i, _)| i);
        let Some(i) = redex else {
            let mut mono = Monomial::identity(alg.modes);
            for g in &w {
                if g.dagger {
                    mono.creation[g.mode] += 1;
                } else {
                    mono.annihilation[g.mode] += 1;
                }
            }
            out.add_term(mono, c);
            continue;
        };
        let t = &alg.theta[(w[i].mode, w[i + 1].mode)];
        if !t.is_exact_zero() {
            let mut contracted = w.clone();
            contracted.drain(i..i + 2);
            pending.push((&c * t, contracted));
        }
        let mut swapped = w;
        swapped.swap(i, i + 1);
        pending.push((c, swapped));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(alg: &Arc<Algebra>, j: usize) -> OperatorPolynomial {
        OperatorPolynomial::annihilator(alg, j).unwrap()
    }
    fn ad(alg: &Arc<Algebra>, j: usize) -> OperatorPolynomial {
        OperatorPolynomial::creator(alg, j).unwrap()
    }
    fn c(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn single_rewrite() {
        let alg = Algebra::canonical(1);
        let w = [Generator::annihilator(0), Generator::creator(0)];
        let p = normal_order(&alg, &w, Scalar::one(), RewriteStrategy::Leftmost).unwrap();
        assert_eq!(p, &(&ad(&alg, 0) * &a(&alg, 0)) + &OperatorPolynomial::one(&alg));
        assert_eq!(p.to_string(), "(1+0i)*a1'*a1 + (1+0i)");
    }

    #[test]
    fn double_number_word() {
        let alg = Algebra::canonical(1);
        let w = [
            Generator::annihilator(0),
            Generator::creator(0),
            Generator::annihilator(0),
            Generator::creator(0),
        ];
        for s in [RewriteStrategy::Leftmost, RewriteStrategy::Rightmost] {
            let p = normal_order(&alg, &w, Scalar::one(), s).unwrap();
            assert_eq!(p.to_string(), "(1+0i)*a1'^2*a1^2 + (3+0i)*a1'*a1 + (1+0i)");
        }
    }

    #[test]
    fn ordered_word_unchanged() {
        let alg = Algebra::canonical(2);
        let w = [Generator::creator(1), Generator::annihilator(0)];
        let p = normal_order(&alg, &w, Scalar::one(), RewriteStrategy::Rightmost).unwrap();
        assert_eq!(p, &ad(&alg, 1) * &a(&alg, 0));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn out_of_range_mode() {
        let alg = Algebra::canonical(2);
        assert!(matches!(
            normal_order(&alg, &[Generator::creator(2)], Scalar::one(), RewriteStrategy::Leftmost),
            Err(Error::ModeOutOfRange { index: 2, modes: 2 })
        ));
        assert!(OperatorPolynomial::annihilator(&alg, 5).is_err());
    }

    #[test]
    fn multiply_examples() {
        let alg = Algebra::canonical(2);
        let p = &ad(&alg, 0) * &a(&alg, 1).pow(2);
        assert_eq!(&OperatorPolynomial::one(&alg) * &p, p);
        let prod = &p * &ad(&alg, 1);
        let expected = &(&(&ad(&alg, 0) * &ad(&alg, 1)) * &a(&alg, 1).pow(2))
            + &(&ad(&alg, 0) * &a(&alg, 1)).scale(&c(2));
        assert_eq!(prod, expected);
        assert_eq!(prod.to_string(), "(1+0i)*a1'*a2'*a2^2 + (2+0i)*a1'*a2");
    }

    #[test]
    fn adjoint_examples() {
        let alg = Algebra::canonical(2);
        let p = &ad(&alg, 0) * &a(&alg, 1).pow(2);
        assert_eq!(p.adjoint(), &ad(&alg, 1).pow(2) * &a(&alg, 0));
        let ia = a(&alg, 0).scale(&Scalar::i());
        assert_eq!(ia.adjoint(), ad(&alg, 0).scale(&-Scalar::i()));
        let num = &ad(&alg, 0) * &a(&alg, 0);
        assert!(num.is_self_adjoint());
    }

    #[test]
    fn commutator_examples() {
        let alg = Algebra::canonical(1);
        assert_eq!(a(&alg, 0).commutator(&ad(&alg, 0)), OperatorPolynomial::one(&alg));
        let p = &ad(&alg, 0).pow(2) + &a(&alg, 0);
        assert!(p.commutator(&p).is_zero());
        assert_eq!(ad(&alg, 0).pow(2).commutator(&a(&alg, 0)), ad(&alg, 0).scale(&c(-2)));
    }

    #[test]
    fn general_theta_commutator() {
        let theta = ScalarMatrix::from_rows(vec![
            vec![c(2), Scalar::i()],
            vec![-Scalar::i(), c(3)],
        ])
        .unwrap();
        let alg = Algebra::new(2, theta, Mode::Exact, DEFAULT_TOL).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                let comm = a(&alg, j).commutator(&ad(&alg, k));
                assert_eq!(comm.constant_value().unwrap(), alg.theta()[(j, k)]);
            }
        }
    }

    #[test]
    fn non_hermitian_theta_rejected() {
        let theta = ScalarMatrix::from_rows(vec![vec![c(1), c(1)], vec![c(0), c(1)]]).unwrap();
        assert!(matches!(
            Algebra::new(2, theta, Mode::Exact, DEFAULT_TOL),
            Err(Error::ThetaNotHermitian)
        ));
    }

    #[test]
    fn gradient_examples() {
        let alg = Algebra::canonical(2);
        let phi = &(&ad(&alg, 0) * &a(&alg, 0)).scale(&c(2)) + &(&ad(&alg, 1) * &a(&alg, 1)).scale(&c(2));
        let g = phi.wirtinger_gradient();
        assert_eq!(g[0], a(&alg, 0).scale(&c(2)));
        assert_eq!(g[1], a(&alg, 1).scale(&c(2)));
        assert_eq!(g[2], ad(&alg, 0).scale(&c(2)));
        assert_eq!(g[3], ad(&alg, 1).scale(&c(2)));

        let k = OperatorPolynomial::constant(&alg, c(7));
        assert!(k.wirtinger_gradient().iter().all(OperatorPolynomial::is_zero));

        let cubic = &ad(&alg, 0).pow(2) * &a(&alg, 0);
        let g = cubic.wirtinger_gradient();
        assert_eq!(g[0], (&ad(&alg, 0) * &a(&alg, 0)).scale(&c(2)));
        assert!(g[1].is_zero());
        assert_eq!(g[2], ad(&alg, 0).pow(2));
        assert!(g[3].is_zero());
    }

    #[test]
    fn float_mode_prunes_small_terms() {
        let alg = Algebra::new(1, ScalarMatrix::identity(1), Mode::Float, 1e-9).unwrap();
        let mut p = a(&alg, 0);
        p.add_term(Monomial::new(vec![0], vec![1]), Scalar::from_f64(-1.0 + 1e-12));
        assert!(p.is_zero());
        let q = a(&alg, 0).scale(&Scalar::from_f64(1.0 + 1e-12));
        assert_eq!(q, a(&alg, 0));
    }

    #[test]
    fn mismatched_algebras() {
        let a1 = Algebra::canonical(1);
        let a2 = Algebra::canonical(2);
        assert!(matches!(a(&a1, 0).checked_mul(&a(&a2, 0)), Err(Error::AlgebraMismatch)));
    }

    #[test]
    fn rendering_order() {
        let alg = Algebra::canonical(2);
        let h = &(&ad(&alg, 0).pow(2) * &a(&alg, 1).pow(2)).scale(&Scalar::i())
            - &(&ad(&alg, 1).pow(2) * &a(&alg, 0).pow(2)).scale(&Scalar::i());
        assert_eq!(h.to_string(), "(0+1i)*a1'^2*a2^2 + (0-1i)*a2'^2*a1^2");
        assert_eq!(OperatorPolynomial::zero(&alg).to_string(), "0");
    }
}
