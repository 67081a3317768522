use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Algebra, Monomial, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::fock;
use crate::linalg::ScalarMatrix;
use crate::matrix::{row_commutator, OperatorMatrix};
use crate::model::{doubled_generators, QsdeModel};
use crate::scalar::Scalar;

use super::{CheckOptions, CheckReport, Condition, FockSettings, WitnessEntry};

/// `r(β, y) = y†Qy + 2y†Sβ + β†Rβ` over the doubled noise and output.
#[derive(Clone, Debug, PartialEq)]
pub struct SupplyRate {
    pub q: ScalarMatrix,
    pub s: ScalarMatrix,
    pub r: ScalarMatrix,
}

impl SupplyRate {
    pub fn new(q: ScalarMatrix, s: ScalarMatrix, r: ScalarMatrix, tol: f64) -> Option<Self> {
        let dim = q.rows();
        let square = [&q, &s, &r].iter().all(|m| m.rows() == dim && m.cols() == dim);
        (square && q.is_hermitian(tol) && r.is_hermitian(tol)).then_some(SupplyRate { q, s, r })
    }

    /// `Q = −I`, `S = 0`, `R = I` on `2m` channels.
    pub fn lossless(channels: usize) -> Self {
        let dim = 2 * channels;
        SupplyRate {
            q: ScalarMatrix::identity(dim).scale(&Scalar::from_int(-1)),
            s: ScalarMatrix::zeros(dim, dim),
            r: ScalarMatrix::identity(dim),
        }
    }

    pub fn is_lossless(&self, tol: f64) -> bool {
        let dim = self.q.rows();
        self.q.approx_eq(&ScalarMatrix::identity(dim).scale(&Scalar::from_int(-1)), tol)
            && self.s.max_abs() <= tol
            && self.r.is_identity(tol)
    }

    pub fn evaluate(&self, beta: &OperatorMatrix, y: &OperatorMatrix) -> Result<OperatorPolynomial> {
        let alg = y.algebra();
        let q = OperatorMatrix::from_scalars(alg, &self.q);
        let s = OperatorMatrix::from_scalars(alg, &self.s).scale(&Scalar::from_int(2));
        let r = OperatorMatrix::from_scalars(alg, &self.r);
        let yy = y.adjoint().checked_mul(&q)?.checked_mul(y)?;
        let yb = y.adjoint().checked_mul(&s)?.checked_mul(beta)?;
        let bb = beta.adjoint().checked_mul(&r)?.checked_mul(beta)?;
        yy.checked_add(&yb)?.checked_add(&bb)?.into_scalar_entry()
    }
}

/// How non-negativity of a storage function was decided.
#[derive(Clone, Debug, PartialEq)]
pub enum PositivityVerdict {
    /// `φ̄ = Σ P_ij a_i* a_j + c` with `P ⪰ 0` and real `c ≥ 0`.
    Structural,
    /// Smallest eigenvalue on the guarded truncated Fock space.
    Numerical { min_eigenvalue: f64, pass: bool, truncation: usize, guard: usize },
    Undecided(String),
}

impl PositivityVerdict {
    pub fn pass(&self) -> bool {
        match self {
            PositivityVerdict::Structural => true,
            PositivityVerdict::Numerical { pass, .. } => *pass,
            PositivityVerdict::Undecided(_) => false,
        }
    }
}

const AUTO_DIM_CEILING: usize = 256;

/// Splits a self-adjoint polynomial into `a* P a + c` if it has that shape.
fn quadratic_form(phi: &OperatorPolynomial) -> Option<(ScalarMatrix, Scalar)> {
    let n = phi.algebra().modes();
    let mut p = ScalarMatrix::zeros(n, n);
    let mut c = Scalar::zero();
    for (mono, coef) in phi.terms() {
        if mono.is_identity() {
            c = coef.clone();
            continue;
        }
        if mono.creation_degree() != 1 || mono.annihilation_degree() != 1 {
            return None;
        }
        let i = mono.creation_support()[0];
        let j = mono.annihilation_support()[0];
        p[(i, j)] = coef.clone();
    }
    Some((p, c))
}

pub(crate) fn positivity(phi: &OperatorPolynomial, settings: Option<FockSettings>) -> Result<PositivityVerdict> {
    let alg = phi.algebra();
    let tol = alg.tol();
    if !phi.is_self_adjoint() {
        return Ok(PositivityVerdict::Undecided("phi is not self-adjoint".into()));
    }
    if let Some((p, c)) = quadratic_form(phi) {
        let c_ok = c.as_real(tol).is_some_and(|v| v >= -tol);
        if c_ok && p.is_positive_semidefinite(tol) == Some(true) {
            return Ok(PositivityVerdict::Structural);
        }
    }
    if !alg.theta_is_identity() {
        return Ok(PositivityVerdict::Undecided("not a non-negative quadratic form and theta is not the identity".into()));
    }
    let settings = match settings {
        Some(s) => s,
        None => {
            let guard = phi.total_degree() as usize;
            let n = alg.modes() as u32;
            let mut truncation = guard + 2;
            if truncation.checked_pow(n).is_none_or(|d| d > AUTO_DIM_CEILING) {
                return Ok(PositivityVerdict::Undecided("too many modes for the numerical fallback".into()));
            }
            while (truncation + 1).checked_pow(n).is_some_and(|d| d <= AUTO_DIM_CEILING) {
                truncation += 1;
            }
            FockSettings { truncation, guard }
        }
    };
    let v = fock::psd_check(phi, settings.truncation, settings.guard)?;
    Ok(PositivityVerdict::Numerical {
        min_eigenvalue: v.min_eigenvalue,
        pass: v.pass,
        truncation: settings.truncation,
        guard: settings.guard,
    })
}

fn gradient(phi: &OperatorPolynomial) -> OperatorMatrix {
    OperatorMatrix::column(phi.algebra(), phi.wirtinger_gradient()).expect("gradient shares the algebra")
}

struct LosslessTerms {
    /// `∇φ̄†Ā` and `−C̄†C̄`.
    energy: (OperatorMatrix, OperatorMatrix),
    /// `½B̄†∇φ̄` and `−C̄`.
    output: (OperatorMatrix, OperatorMatrix),
}

fn lossless_terms(model: &QsdeModel, phi: &OperatorPolynomial) -> Result<LosslessTerms> {
    let doubled = model.double();
    let grad = gradient(phi);
    let minus = Scalar::from_int(-1);
    let cbar = doubled.output();
    let energy_lhs = grad.adjoint().checked_mul(doubled.drift())?;
    let energy_rhs = cbar.adjoint().checked_mul(cbar)?.scale(&minus);
    let output_lhs = doubled.diffusion().adjoint().checked_mul(&grad)?.scale(&Scalar::from_ratio(1, 2));
    let output_rhs = cbar.scale(&minus);
    Ok(LosslessTerms { energy: (energy_lhs, energy_rhs), output: (output_lhs, output_rhs) })
}

/// The differential lossless conditions for the supply rate with `Q = −I`,
/// `S = 0`, `R = I`.
pub fn check_lossless(model: &QsdeModel, phi: &OperatorPolynomial, opts: &CheckOptions) -> Result<CheckReport> {
    if **phi.algebra() != **model.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let mut report = CheckReport::new(model);
    let alg = model.algebra();
    let terms = lossless_terms(model, phi)?;
    report.push(Condition::compare(
        "LL-energy-balance",
        "grad(phi)^+ Abar = -Cbar^+ Cbar",
        &terms.energy.0,
        &terms.energy.1,
    )?);
    report.push(Condition::compare("LL-output-match", "Bbar^+ grad(phi) / 2 = -Cbar", &terms.output.0, &terms.output.1)?);

    let d = model.double().feedthrough().clone();
    let dd = d.adjoint().checked_mul(&d)?;
    report.push(Condition::compare("LL-D-unitary", "I - Dbar^+ Dbar = 0", &OperatorMatrix::identity(alg, d.rows()), &dd)?);

    let col = |p: OperatorPolynomial| OperatorMatrix::column(alg, vec![p]);
    report.push(Condition::compare("LL-phi-selfadjoint", "phi^+ = phi", &col(phi.adjoint())?, &col(phi.clone())?)?);

    let verdict = positivity(phi, opts.positivity)?;
    let (residual, witness, note) = match &verdict {
        PositivityVerdict::Structural => (0.0, Vec::new(), "non-negative quadratic form".to_string()),
        PositivityVerdict::Numerical { min_eigenvalue, truncation, guard, .. } => (
            (-min_eigenvalue).max(0.0),
            vec![WitnessEntry { entry: "min_eigenvalue".into(), value: format!("{min_eigenvalue}") }],
            format!("Fock truncation N = {truncation}, guard {guard}"),
        ),
        PositivityVerdict::Undecided(why) => (0.0, Vec::new(), format!("undecided: {why}")),
    };
    report.push(
        Condition::new("LL-phi-nonnegative", "phi >= 0", verdict.pass(), residual, witness).with_note(note),
    );
    report.derived.phi = Some(phi.to_string());
    Ok(report)
}

/// `[[0, 2Θ], [−2Θᵀ, 0]]`; for `Θ = I` the constant `[[0, 2I], [−2I, 0]]`.
pub fn storage_constant(alg: &Arc<Algebra>) -> OperatorMatrix {
    let n = alg.modes();
    let theta = alg.theta();
    let mut k = OperatorMatrix::zeros(alg, 2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            k.set(i, n + j, OperatorPolynomial::constant(alg, &theta[(i, j)] * &Scalar::from_int(2)));
            k.set(n + i, j, OperatorPolynomial::constant(alg, &theta[(j, i)] * &Scalar::from_int(-2)));
        }
    }
    k
}

fn storage_terms(phi: &OperatorPolynomial) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let alg = phi.algebra();
    Ok((row_commutator(&gradient(phi), &doubled_generators(alg))?, storage_constant(alg)))
}

/// `[∇φ̄, āᵀ]` against the constant block matrix.
pub fn check_storage_condition(phi: &OperatorPolynomial) -> CheckReport {
    let mut report = CheckReport::named("phi");
    let (lhs, rhs) = storage_terms(phi).expect("gradient and generators share the algebra");
    let mut cond = Condition::compare("ST-gradient-commutator", "[grad(phi), abar^T] = [[0, 2I], [-2I, 0]]", &lhs, &rhs)
        .expect("equal shapes");
    if !phi.algebra().theta_is_identity() {
        cond = cond.with_note("general theta: blocks scaled to [[0, 2Theta], [-2Theta^T, 0]] (extension)");
    }
    report.push(cond);
    report
}

/// Flattened residuals of every condition that is linear in `φ̄`.
fn linear_residuals(model: &QsdeModel, phi: &OperatorPolynomial) -> Result<Vec<OperatorPolynomial>> {
    let t = lossless_terms(model, phi)?;
    let (st_lhs, st_rhs) = storage_terms(phi)?;
    let mut out = Vec::new();
    for (l, r) in [t.energy, t.output, (st_lhs, st_rhs)] {
        out.extend(l.checked_sub(&r)?.entries().iter().cloned());
    }
    Ok(out)
}

/// Hermitian basis for `φ̄ = Σ 2P_ij a_i* a_j`: one element per real parameter.
fn quadratic_basis(alg: &Arc<Algebra>) -> Vec<OperatorPolynomial> {
    let n = alg.modes();
    let pair = |i: usize, j: usize| {
        let mut cre = vec![0; n];
        let mut ann = vec![0; n];
        cre[i] = 1;
        ann[j] = 1;
        Monomial::new(cre, ann)
    };
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        basis.push(OperatorPolynomial::term(alg, pair(i, i), Scalar::from_int(2)));
        for j in i + 1..n {
            let mut re = OperatorPolynomial::term(alg, pair(i, j), Scalar::from_int(2));
            re.add_term(pair(j, i), Scalar::from_int(2));
            basis.push(re);
            let mut im = OperatorPolynomial::term(alg, pair(i, j), Scalar::complex_ratio((0, 1), (2, 1)));
            im.add_term(pair(j, i), Scalar::complex_ratio((0, 1), (-2, 1)));
            basis.push(im);
        }
    }
    basis
}

/// Searches `φ̄ = Σ 2P_ij a_i* a_j` with `P` Hermitian. The output match,
/// energy balance and storage conditions are linear in `P` and are solved
/// together; the candidate is then put through every lossless and storage
/// condition. Returns `None` if no candidate survives.
pub fn synthesize_storage(model: &QsdeModel, opts: &CheckOptions) -> Result<Option<OperatorPolynomial>> {
    let alg = model.algebra();
    let tol = alg.tol();
    let zero = OperatorPolynomial::zero(alg);
    let base = linear_residuals(model, &zero)?;
    let basis = quadratic_basis(alg);
    let columns = basis
        .iter()
        .map(|b| {
            let r = linear_residuals(model, b)?;
            r.iter().zip(&base).map(|(x, y)| x.checked_sub(y)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // One complex equation per (residual entry, monomial), split into re/im.
    let mut keys: BTreeMap<(usize, Monomial), ()> = BTreeMap::new();
    for (e, p) in base.iter().enumerate().chain(columns.iter().flat_map(|c| c.iter().enumerate())) {
        for (m, _) in p.terms() {
            keys.insert((e, m.clone()), ());
        }
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (e, m) in keys.keys() {
        let coefs: Vec<Scalar> = columns.iter().map(|c| c[*e].coefficient(m)).collect();
        let b = -base[*e].coefficient(m);
        rows.push(coefs.iter().map(Scalar::re).collect());
        rhs.push(b.re());
        rows.push(coefs.iter().map(Scalar::im).collect());
        rhs.push(b.im());
    }
    let x = if rows.is_empty() {
        vec![Scalar::zero(); basis.len()]
    } else {
        let a = ScalarMatrix::from_rows(rows).expect("rows share the parameter count");
        match a.solve(&rhs, tol) {
            Some(x) => x,
            None => return Ok(None),
        }
    };
    let mut phi = zero;
    for (xi, b) in x.iter().zip(&basis) {
        phi = phi.checked_add(&b.scale(xi))?;
    }
    let lossless = check_lossless(model, &phi, opts)?;
    let storage = check_storage_condition(&phi);
    Ok((lossless.overall && storage.overall).then_some(phi))
}
