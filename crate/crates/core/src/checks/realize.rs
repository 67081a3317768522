use crate::algebra::OperatorPolynomial;
use crate::error::{Error, Result};
use crate::linalg::ScalarMatrix;
use crate::matrix::{mixed_commutators, outer_commutator, scalar_vec_commutator, BracketOrder, OperatorMatrix};
use crate::model::{doubled_generators, max_drift_degree, signature_matrix, DoubledModel, QsdeModel};
use crate::scalar::Scalar;

use super::class::sandwich;
use super::{CheckOptions, CheckReport, Condition};

/// The three terms of `[Ā, ā†] + [ā, Ā†] + B̄ T B̄† = 0`.
#[derive(Clone, Debug)]
pub struct PreservationTerms {
    /// `[Ā, ā†]`, entry `(j, k) = [Ā_j, ā_k*]`.
    pub drift_adag: OperatorMatrix,
    /// `[ā, Ā†]`, entry `(j, k) = [ā_j, Ā_k*]`.
    pub a_drift_dag: OperatorMatrix,
    /// `B̄ T B̄†`.
    pub noise: OperatorMatrix,
    pub sum: OperatorMatrix,
}

pub fn preservation_terms(doubled: &DoubledModel, t: &ScalarMatrix) -> Result<PreservationTerms> {
    let alg = doubled.algebra();
    let bbar = doubled.diffusion();
    if t.rows() != bbar.cols() || t.cols() != bbar.cols() {
        return Err(Error::Shape { op: "B T B^+", left: bbar.shape(), right: (t.rows(), t.cols()) });
    }
    let drift_adag = outer_commutator(doubled.drift(), doubled.abar())?;
    let a_drift_dag = outer_commutator(doubled.abar(), doubled.drift())?;
    let noise = bbar.checked_mul(&OperatorMatrix::from_scalars(alg, t))?.checked_mul(&bbar.adjoint())?;
    let sum = drift_adag.checked_add(&a_drift_dag)?.checked_add(&noise)?;
    Ok(PreservationTerms { drift_adag, a_drift_dag, noise, sum })
}

fn push_preservation(report: &mut CheckReport, doubled: &DoubledModel, t: &ScalarMatrix, ids: [&str; 3]) -> Result<()> {
    let alg = doubled.algebra();
    let terms = preservation_terms(doubled, t)?;
    let zero = OperatorMatrix::zeros(alg, terms.sum.rows(), terms.sum.cols());
    report.push(Condition::compare(ids[0], "[Abar, abar^+] + [abar, Abar^+] + Bbar T Bbar^+ = 0", &terms.sum, &zero)?);
    let abar = doubled.abar();
    report.push(Condition::vanishing(
        ids[1],
        "[Bbar, abar^+] = 0",
        mixed_commutators(doubled.diffusion(), &abar.conj(), BracketOrder::MatrixFirst)?,
    ));
    report.push(Condition::vanishing(
        ids[2],
        "[abar, Bbar^+] = 0",
        mixed_commutators(&doubled.diffusion().adjoint(), abar, BracketOrder::VectorFirst)?,
    ));
    Ok(())
}

/// Preservation of the commutation relations under the supplied doubled
/// noise commutation matrix `T`.
pub fn check_preservation(model: &QsdeModel, t: &ScalarMatrix) -> Result<CheckReport> {
    let mut report = CheckReport::new(model);
    push_preservation(&mut report, &model.double(), t, ["PRES-drift", "PRES-B-commute-adag", "PRES-a-commute-Bdag"])?;
    Ok(report)
}

/// `[L̄†, ā]Ī` with entry `(j, k) = [L̄_k*, ā_j] Ī_kk`.
fn coupling_matrix(lbar: &OperatorMatrix) -> Result<OperatorMatrix> {
    let alg = lbar.algebra();
    if lbar.cols() != 1 || !lbar.rows().is_multiple_of(2) {
        return Err(Error::Shape { op: "[L^+, a] I", left: lbar.shape(), right: (lbar.rows() + lbar.rows() % 2, 1) });
    }
    let abar = doubled_generators(alg);
    let comm = outer_commutator(&abar, lbar)?.scale(&Scalar::from_int(-1));
    comm.checked_mul(&OperatorMatrix::from_scalars(alg, &signature_matrix(lbar.rows() / 2)))
}

/// `[C̄†, ā]Ī`, which a realizable model has as its `B̄`.
pub fn b_match_matrix(doubled: &DoubledModel) -> Result<OperatorMatrix> {
    coupling_matrix(doubled.output())
}

/// `H̄ = (i/2n̄)(ā†J⁻¹Ā − Ā†J⁻¹ā)`.
pub fn extract_hamiltonian(model: &QsdeModel) -> Result<OperatorPolynomial> {
    let doubled = model.double();
    extract_hamiltonian_with(&doubled, doubled.graded_commutation_inverse()?)
}

/// The Hamiltonian formula with an explicit inverse commutation matrix.
pub fn extract_hamiltonian_with(doubled: &DoubledModel, inverse: &ScalarMatrix) -> Result<OperatorPolynomial> {
    let nbar = doubled.nbar()?;
    let s1 = sandwich(doubled.drift(), inverse, doubled.abar())?;
    let s2 = sandwich(doubled.abar(), inverse, doubled.drift())?;
    let w = &Scalar::i() * &Scalar::from_ratio(1, 2 * i64::from(nbar));
    Ok(s2.checked_sub(&s1)?.scale(&w))
}

/// `Ā_j = ½ Σ_k ([L̄†, ā]Ī)_jk L̄_k + i[H̄, ā_j]`.
pub fn reconstruct_generator(hbar: &OperatorPolynomial, lbar: &OperatorMatrix) -> Result<OperatorMatrix> {
    let alg = hbar.algebra();
    if **lbar.algebra() != **alg {
        return Err(Error::AlgebraMismatch);
    }
    let abar = doubled_generators(alg);
    let dissipative = coupling_matrix(lbar)?.checked_mul(lbar)?.scale(&Scalar::from_ratio(1, 2));
    let hamiltonian = scalar_vec_commutator(hbar, &abar)?.scale(&Scalar::i());
    dissipative.checked_add(&hamiltonian)
}

/// Preservation with `T = Ī`, `B̄ = [C̄†, ā]Ī`, `D̄ = I`, and the extracted
/// `H̄`: self-adjoint and regenerating `Ā` together with `L̄ = C̄`.
pub fn check_physical_realizability(model: &QsdeModel, opts: &CheckOptions) -> Result<CheckReport> {
    let mut report = CheckReport::new(model);
    let doubled = model.double();
    let alg = doubled.algebra();
    push_preservation(&mut report, &doubled, doubled.signature(), ["PR-drift", "PR-B-commute", "PR-Bdag-commute"])?;

    report.push(Condition::compare(
        "PR-B-match",
        "Bbar = [Cbar^+, abar] Ibar",
        doubled.diffusion(),
        &b_match_matrix(&doubled)?,
    )?);

    let d = doubled.feedthrough();
    report.push(Condition::compare("PR-D-identity", "Dbar = I", d, &OperatorMatrix::identity(alg, d.rows()))?);

    let inverse = doubled.graded_commutation_inverse()?;
    let (hbar, zero_drift) = match extract_hamiltonian_with(&doubled, inverse) {
        Ok(h) => (h, false),
        Err(Error::ZeroDrift) => (OperatorPolynomial::zero(alg), true),
        Err(e) => return Err(e),
    };
    let h = OperatorMatrix::column(alg, vec![hbar.clone()])?;
    let h_adj = OperatorMatrix::column(alg, vec![hbar.adjoint()])?;
    let self_adjoint = Condition::compare("PR-H-selfadjoint", "Hbar^+ = Hbar", &h_adj, &h)?;
    let hbar_self_adjoint = self_adjoint.pass;
    report.push(self_adjoint);

    let rebuilt = reconstruct_generator(&hbar, doubled.output())?;
    let mut roundtrip = Condition::compare(
        "PR-generator-roundtrip",
        "Abar = [Lbar^+, abar] Ibar Lbar / 2 + i[Hbar, abar] with Lbar = Cbar",
        &rebuilt,
        doubled.drift(),
    )?;
    if zero_drift {
        roundtrip = roundtrip.with_note("A = 0: nbar undefined, Hbar taken as 0");
    } else {
        report.derived.hbar = Some(hbar.to_string());
        report.derived.hbar_self_adjoint = Some(hbar_self_adjoint);
        report.derived.nbar = doubled.nbar().ok();
        report.derived.nbar_printed = max_drift_degree(model).ok();
    }
    report.push(roundtrip);
    report.derived.lbar = doubled.output().entries().iter().map(ToString::to_string).collect();

    if opts.audit_literal_theta && !zero_drift {
        if let Some(lit) = doubled.theta_bar_printed().inverse(alg.tol()) {
            let h_lit = extract_hamiltonian_with(&doubled, &lit)?;
            let same = h_lit == hbar;
            let diff = h_lit.checked_sub(&hbar)?;
            report.audit.push(
                Condition::new(
                    "AUDIT-hamiltonian-ungraded",
                    "Hbar computed with diag(Theta, Theta*)^-1 agrees with the graded result",
                    same,
                    diff.max_abs_coefficient(),
                    vec![super::WitnessEntry { entry: "Hbar".into(), value: h_lit.to_string() }],
                )
                .with_note("informational; does not affect the verdict"),
            );
        }
    }
    Ok(report)
}
