//! The two-mode worked example with k1 = k2 = 2: every printed intermediate
//! is rebuilt from its transcription and compared entry for entry.

mod common;

use common::{column, example, matrix, poly};
use qreal::checks::{
    b_match_matrix, check_class, check_lossless, check_physical_realizability, check_storage_condition,
    drift_identity_terms, extract_hamiltonian, preservation_terms, reconstruct_generator, storage_constant,
    CheckOptions,
};
use qreal::matrix::row_commutator;
use qreal::model::{annihilators, compute_nbar, render_model, structural_class_check};
use qreal::{parse_model, OperatorMatrix, ParseOptions};

#[test]
fn doubled_blocks() {
    let m = example();
    let d = m.double();
    let abar = column(&m, &["-2*a1 + 2*a1'*a2^2", "-2*a2 - 2*a2'*a1^2", "-2*a1' + 2*a1*a2'^2", "-2*a2' - 2*a2*a1'^2"]);
    assert_eq!(d.drift(), &abar);
    let bbar = matrix(&m, &[&["-2", "0", "0", "0"], &["0", "-2", "0", "0"], &["0", "0", "-2", "0"], &["0", "0", "0", "-2"]]);
    assert_eq!(d.diffusion(), &bbar);
    assert_eq!(d.output(), &column(&m, &["2*a1", "2*a2", "2*a1'", "2*a2'"]));
    assert_eq!(d.feedthrough(), &OperatorMatrix::identity(m.algebra(), 4));
}

#[test]
fn class_membership() {
    let m = example();
    let r = check_class(&m, &CheckOptions::default()).unwrap();
    assert!(r.overall);
    assert!(structural_class_check(&m).is_empty());
    let ra = row_commutator(m.drift(), &annihilators(m.algebra())).unwrap();
    assert_eq!(ra, matrix(&m, &[&["-2*a2^2", "0"], &["0", "2*a1^2"]]));
    assert_eq!(compute_nbar(&m).unwrap(), 4);
}

#[test]
fn drift_identity_terms_match() {
    let m = example();
    let d = m.double();
    let t = drift_identity_terms(&d, d.graded_commutation_inverse().unwrap()).unwrap();
    assert_eq!(t.first, column(&m, &["a1'*a2^2", "-a2'*a1^2", "a2'^2*a1", "-a1'^2*a2"]));
    assert_eq!(t.second, column(&m, &["-a1'*a2^2", "a2'*a1^2", "-a2'^2*a1", "a1'^2*a2"]));
    let expected = column(&m, &["2*a1'*a2^2", "-2*a2'*a1^2", "2*a2'^2*a1", "-2*a1'^2*a2"]);
    assert_eq!(t.lhs, expected);
    assert_eq!(t.rhs, expected);
}

#[test]
fn preservation_matrices() {
    let m = example();
    let d = m.double();
    let p = preservation_terms(&d, d.signature()).unwrap();
    let drift_adag = matrix(
        &m,
        &[
            &["-2", "4*a1'*a2", "-2*a2^2", "0"],
            &["-4*a2'*a1", "-2", "0", "2*a1^2"],
            &["2*a2'^2", "0", "2", "-4*a1*a2'"],
            &["0", "-2*a1'^2", "4*a2*a1'", "2"],
        ],
    );
    let a_drift_dag = matrix(
        &m,
        &[
            &["-2", "-4*a1'*a2", "2*a2^2", "0"],
            &["4*a2'*a1", "-2", "0", "-2*a1^2"],
            &["-2*a2'^2", "0", "2", "4*a1*a2'"],
            &["0", "2*a1'^2", "-4*a2*a1'", "2"],
        ],
    );
    let noise = matrix(&m, &[&["4", "0", "0", "0"], &["0", "4", "0", "0"], &["0", "0", "-4", "0"], &["0", "0", "0", "-4"]]);
    assert_eq!(p.drift_adag, drift_adag);
    assert_eq!(p.a_drift_dag, a_drift_dag);
    assert_eq!(p.noise, noise);
    assert!(p.sum.is_zero());
}

#[test]
fn realizability_and_hamiltonian() {
    let m = example();
    let r = check_physical_realizability(&m, &CheckOptions::default()).unwrap();
    assert!(r.overall);
    assert!(r.conditions.iter().all(|c| c.residual_norm == 0.0));
    assert_eq!(b_match_matrix(&m.double()).unwrap(), m.double().diffusion().clone());
    let h = extract_hamiltonian(&m).unwrap();
    assert_eq!(h, poly(&m, "i*a1'^2*a2^2 - i*a2'^2*a1^2"));
    assert_eq!(h.to_string(), "(0+1i)*a1'^2*a2^2 + (0-1i)*a2'^2*a1^2");
    assert_eq!(h.adjoint(), h);
}

#[test]
fn generator_round_trip() {
    let m = example();
    let d = m.double();
    let rebuilt = reconstruct_generator(&extract_hamiltonian(&m).unwrap(), d.output()).unwrap();
    assert!(rebuilt.checked_sub(d.drift()).unwrap().is_zero());
    assert_eq!(rebuilt.at(0).to_string(), "(2+0i)*a1'*a2^2 + (-2+0i)*a1");
}

#[test]
fn lossless_and_storage() {
    let m = example();
    let phi = m.phi().unwrap();
    assert_eq!(phi.wirtinger_gradient(), vec![poly(&m, "2*a1"), poly(&m, "2*a2"), poly(&m, "2*a1'"), poly(&m, "2*a2'")]);
    let grad = OperatorMatrix::column(m.algebra(), phi.wirtinger_gradient()).unwrap();
    let energy = grad.adjoint().checked_mul(m.double().drift()).unwrap().into_scalar_entry().unwrap();
    assert_eq!(energy, poly(&m, "-4*(a1*a1' + a1'*a1) - 4*(a2*a2' + a2'*a2)"));
    assert!(check_lossless(&m, phi, &CheckOptions::default()).unwrap().overall);
    assert!(check_storage_condition(phi).overall);
    assert_eq!(
        storage_constant(m.algebra()),
        matrix(&m, &[&["0", "0", "2", "0"], &["0", "0", "0", "2"], &["-2", "0", "0", "0"], &["0", "-2", "0", "0"]])
    );
}

#[test]
fn fixture_render_fixpoint() {
    let m = example();
    let text = render_model(&m);
    let again = parse_model(&text, &ParseOptions::default()).unwrap();
    assert_eq!(render_model(&again), text);
    assert_eq!(again.drift(), m.drift());
}
