use crate::algebra::OperatorPolynomial;
use crate::error::{Error, Result};
use crate::linalg::ScalarMatrix;
use crate::matrix::{mixed_commutators, row_commutator, scalar_vec_commutator, BracketOrder, OperatorMatrix};
use crate::model::{annihilators, compute_nbar, max_drift_degree, structural_class_check, DoubledModel, QsdeModel};
use crate::scalar::Scalar;

use super::{CheckOptions, CheckReport, Condition, WitnessEntry};

/// Both sides of `(1/2n̄)[Ā†J⁻¹ā, ā] − (1/2n̄)[ā†J⁻¹Ā, ā] = Ā − ½B̄C̄`.
#[derive(Clone, Debug)]
pub struct DriftIdentityTerms {
    /// `Ā†J⁻¹ā`.
    pub s1: OperatorPolynomial,
    /// `ā†J⁻¹Ā`.
    pub s2: OperatorPolynomial,
    /// `(1/2n̄)[s1, ā]`.
    pub first: OperatorMatrix,
    /// `(1/2n̄)[s2, ā]`.
    pub second: OperatorMatrix,
    pub lhs: OperatorMatrix,
    pub rhs: OperatorMatrix,
}

/// `u† M v` for columns `u`, `v`.
pub(crate) fn sandwich(u: &OperatorMatrix, m: &ScalarMatrix, v: &OperatorMatrix) -> Result<OperatorPolynomial> {
    let mid = OperatorMatrix::from_scalars(u.algebra(), m);
    u.adjoint().checked_mul(&mid)?.checked_mul(v)?.into_scalar_entry()
}

/// Evaluates the drift identity with the given inverse commutation matrix.
/// With `A = 0` the bracket terms vanish and `n̄` is not needed.
pub fn drift_identity_terms(doubled: &DoubledModel, inverse: &ScalarMatrix) -> Result<DriftIdentityTerms> {
    let alg = doubled.algebra();
    let abar = doubled.abar();
    let drift = doubled.drift();
    let s1 = sandwich(drift, inverse, abar)?;
    let s2 = sandwich(abar, inverse, drift)?;
    let (first, second) = match doubled.nbar() {
        Ok(nbar) => {
            let w = Scalar::from_ratio(1, 2 * i64::from(nbar));
            (scalar_vec_commutator(&s1, abar)?.scale(&w), scalar_vec_commutator(&s2, abar)?.scale(&w))
        }
        Err(Error::ZeroDrift) => {
            let z = OperatorMatrix::zeros(alg, abar.rows(), 1);
            (z.clone(), z)
        }
        Err(e) => return Err(e),
    };
    let lhs = first.checked_sub(&second)?;
    let half_bc = doubled.diffusion().checked_mul(doubled.output())?.scale(&Scalar::from_ratio(1, 2));
    let rhs = drift.checked_sub(&half_bc)?;
    Ok(DriftIdentityTerms { s1, s2, first, second, lhs, rhs })
}

/// Class membership: `B` and `C` commute with `a`, `[A, aᵀ] = −[a, Aᵀ]`,
/// the admissible monomial shapes, and the drift identity.
pub fn check_class(model: &QsdeModel, opts: &CheckOptions) -> Result<CheckReport> {
    let mut report = CheckReport::new(model);
    let alg = model.algebra();
    let a = annihilators(alg);

    report.push(Condition::vanishing(
        "CLASS-B-commute",
        "every entry of B commutes with every a_k: [B, a^T] = 0",
        mixed_commutators(model.diffusion(), &a, BracketOrder::MatrixFirst)?,
    ));

    let c_comm = row_commutator(model.output(), &a)?;
    let zeros = OperatorMatrix::zeros(alg, c_comm.rows(), c_comm.cols());
    report.push(Condition::compare("CLASS-C-commute", "[C, a^T] = 0", &c_comm, &zeros)?);

    let a_comm = row_commutator(model.drift(), &a)?;
    let neg = row_commutator(&a, model.drift())?.scale(&Scalar::from_int(-1));
    report.push(Condition::compare("CLASS-A-symmetric", "[A, a^T] = -[a, A^T]", &a_comm, &neg)?);

    let violations = structural_class_check(model);
    let witness = violations
        .iter()
        .map(|v| WitnessEntry { entry: v.location.clone(), value: format!("{}: {}", v.monomial, v.reason) })
        .collect::<Vec<_>>();
    report.push(Condition::new(
        "CLASS-structure",
        "A terms are a_p^k (a_l*)^h for single modes p, l; C terms are pure powers a_p^k",
        witness.is_empty(),
        violations.len() as f64,
        witness,
    ));

    let doubled = model.double();
    let inverse = doubled.graded_commutation_inverse()?;
    let terms = drift_identity_terms(&doubled, inverse)?;
    let mut cond = Condition::compare(
        "CLASS-drift-identity",
        "(1/2nbar)[Abar^+ J^-1 abar, abar] - (1/2nbar)[abar^+ J^-1 Abar, abar] = Abar - Bbar Cbar / 2",
        &terms.lhs,
        &terms.rhs,
    )?;
    if model.drift().is_zero() {
        cond = cond.with_note("A = 0: bracket terms vanish and nbar is undefined");
    }
    report.push(cond);

    report.derived.nbar = compute_nbar(model).ok();
    report.derived.nbar_printed = max_drift_degree(model).ok();

    if opts.audit_literal_theta {
        match doubled.theta_bar_printed().inverse(alg.tol()) {
            Some(lit) => {
                let t = drift_identity_terms(&doubled, &lit)?;
                report.audit.push(
                    Condition::compare(
                        "AUDIT-drift-identity-ungraded",
                        "drift identity with diag(Theta, Theta*)^-1 in place of J^-1",
                        &t.lhs,
                        &t.rhs,
                    )?
                    .with_note("informational; does not affect the verdict"),
                );
            }
            None => report.notes.push("diag(Theta, Theta*) is singular; ungraded audit skipped".into()),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, ParseOptions};

    const EXAMPLE: &str = "\
modes: 2
channels: 2
param k = 2
A[1] = -k*a1 + 2*a1'*a2^2
A[2] = -k*a2 - 2*a2'*a1^2
B = [[-sqrt(2*k), 0], [0, -sqrt(2*k)]]
C[1] = sqrt(2*k)*a1
C[2] = sqrt(2*k)*a2
";

    fn model(text: &str) -> QsdeModel {
        parse_model(text, &ParseOptions::default()).unwrap()
    }

    #[test]
    fn example_is_in_class() {
        let r = check_class(&model(EXAMPLE), &CheckOptions::default()).unwrap();
        assert!(r.overall, "{:#?}", r.failing().collect::<Vec<_>>());
        assert!(r.conditions.iter().all(|c| c.residual_norm == 0.0));
        assert_eq!(r.derived.nbar, Some(4));
        assert_eq!(r.derived.nbar_printed, Some(3));
    }

    #[test]
    fn creation_in_output_fails_commute_and_structure() {
        let r = check_class(&model(&EXAMPLE.replace("C[1] = sqrt(2*k)*a1", "C[1] = a1'")), &CheckOptions::default())
            .unwrap();
        assert!(!r.condition("CLASS-C-commute").unwrap().pass);
        assert!(!r.condition("CLASS-structure").unwrap().pass);
        let w = &r.condition("CLASS-C-commute").unwrap().witness;
        assert_eq!(w[0].entry, "(1,1)");
        assert_eq!(w[0].value, "(-1+0i)");
    }

    #[test]
    fn scaled_drift_breaks_identity() {
        let text = EXAMPLE
            .replace("A[1] = -k*a1 + 2*a1'*a2^2", "A[1] = 2*(-k*a1 + 2*a1'*a2^2)")
            .replace("A[2] = -k*a2 - 2*a2'*a1^2", "A[2] = 2*(-k*a2 - 2*a2'*a1^2)");
        let r = check_class(&model(&text), &CheckOptions::default()).unwrap();
        let c = r.condition("CLASS-drift-identity").unwrap();
        assert!(!c.pass);
        assert!(c.residual_norm > 0.0);
    }

    #[test]
    fn audit_reading_is_reported_separately() {
        let opts = CheckOptions { audit_literal_theta: true, ..CheckOptions::default() };
        let r = check_class(&model(EXAMPLE), &opts).unwrap();
        assert!(r.overall);
        assert_eq!(r.audit.len(), 1);
    }

    #[test]
    fn zero_drift_identity() {
        let m = model("modes: 1\nchannels: 1\nA[1] = 0\nB = [[0]]\nC[1] = 0\n");
        let r = check_class(&m, &CheckOptions::default()).unwrap();
        assert!(r.overall);
        assert_eq!(r.derived.nbar, None);
    }
}
