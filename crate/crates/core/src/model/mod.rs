//! QSDE models `da = A dt + B dW`, `dy = C dt + D dW`, their doubled-up form
//! over `ā = (a; a*)`, and the text format they are read from.

mod parse;
mod render;

use std::sync::Arc;

pub use parse::{parse_model, parse_polynomial, ParseError, ParseErrorKind, ParseOptions};
pub use render::render_model;

use crate::algebra::{Algebra, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::linalg::ScalarMatrix;
use crate::matrix::OperatorMatrix;
use crate::scalar::Scalar;

/// Ito and commutation data of the doubled noise increment.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    /// `F`: `dw̃ dw̃† = F dt`, Hermitian non-negative definite, `2m x 2m`.
    pub ito: ScalarMatrix,
    /// `T_w̄`: commutation matrix of the doubled noise, Hermitian, `2m x 2m`.
    pub commutation: ScalarMatrix,
}

impl NoiseSpec {
    /// `F = diag(I, 0)`, `T_w̄ = diag(I, −I)`.
    pub fn canonical(channels: usize) -> Self {
        NoiseSpec {
            ito: ScalarMatrix::block_diag(&ScalarMatrix::identity(channels), &ScalarMatrix::zeros(channels, channels)),
            commutation: signature_matrix(channels),
        }
    }

    pub fn validate(&self, channels: usize, tol: f64) -> std::result::Result<(), String> {
        let dim = 2 * channels;
        for (name, m) in [("F", &self.ito), ("T", &self.commutation)] {
            if m.rows() != dim || m.cols() != dim {
                return Err(format!("{name} must be {dim}x{dim}, got {}x{}", m.rows(), m.cols()));
            }
            if !m.is_hermitian(tol) {
                return Err(format!("{name} must be Hermitian"));
            }
        }
        match self.ito.is_positive_semidefinite(tol) {
            Some(true) => Ok(()),
            _ => Err("F must be non-negative definite".into()),
        }
    }
}

/// `Ī = diag(I, −I)` with `I` of size `k`.
pub fn signature_matrix(k: usize) -> ScalarMatrix {
    let mut diag = vec![Scalar::one(); k];
    diag.extend(std::iter::repeat_n(Scalar::from_int(-1), k));
    ScalarMatrix::diagonal(&diag)
}

/// The column `(a_1, …, a_n)`.
pub fn annihilators(alg: &Arc<Algebra>) -> OperatorMatrix {
    let entries = (0..alg.modes())
        .map(|j| OperatorPolynomial::annihilator(alg, j).expect("mode in range"))
        .collect();
    OperatorMatrix::column(alg, entries).expect("entries share the algebra")
}

/// The doubled column `ā = (a_1, …, a_n, a_1*, …, a_n*)`.
pub fn doubled_generators(alg: &Arc<Algebra>) -> OperatorMatrix {
    let a = annihilators(alg);
    OperatorMatrix::vstack(&a, &a.conj()).expect("same algebra")
}

/// A bound QSDE model over `n` modes and `m` channels.
#[derive(Clone, Debug)]
pub struct QsdeModel {
    pub name: Option<String>,
    alg: Arc<Algebra>,
    channels: usize,
    drift: OperatorMatrix,
    diffusion: OperatorMatrix,
    output: OperatorMatrix,
    feedthrough: OperatorMatrix,
    params: Vec<(String, Scalar)>,
    phi: Option<OperatorPolynomial>,
    noise: NoiseSpec,
}

impl QsdeModel {
    /// Assembles a model, checking that `A` is `n x 1`, `B` is `n x m`,
    /// `C` is `m x 1` and `D` is `m x m`, all over `alg`.
    pub fn new(
        alg: &Arc<Algebra>,
        drift: OperatorMatrix,
        diffusion: OperatorMatrix,
        output: OperatorMatrix,
        feedthrough: OperatorMatrix,
    ) -> Result<Self> {
        let n = alg.modes();
        let m = output.rows();
        let expect = [
            ("A", &drift, (n, 1)),
            ("B", &diffusion, (n, m)),
            ("C", &output, (m, 1)),
            ("D", &feedthrough, (m, m)),
        ];
        for (op, mat, shape) in expect {
            if mat.shape() != shape {
                return Err(Error::Shape { op, left: mat.shape(), right: shape });
            }
            if **mat.algebra() != **alg {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(QsdeModel {
            name: None,
            alg: alg.clone(),
            channels: m,
            drift,
            diffusion,
            output,
            feedthrough,
            params: Vec::new(),
            phi: None,
            noise: NoiseSpec::canonical(m),
        })
    }

    pub fn with_phi(mut self, phi: Option<OperatorPolynomial>) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_params(mut self, params: Vec<(String, Scalar)>) -> Self {
        self.params = params;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn modes(&self) -> usize {
        self.alg.modes()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `A(a, a†)`, `n x 1`.
    pub fn drift(&self) -> &OperatorMatrix {
        &self.drift
    }

    /// `B(a, a†)`, `n x m`.
    pub fn diffusion(&self) -> &OperatorMatrix {
        &self.diffusion
    }

    /// `C(a)`, `m x 1`.
    pub fn output(&self) -> &OperatorMatrix {
        &self.output
    }

    /// `D`, `m x m`.
    pub fn feedthrough(&self) -> &OperatorMatrix {
        &self.feedthrough
    }

    pub fn params(&self) -> &[(String, Scalar)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<&Scalar> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn phi(&self) -> Option<&OperatorPolynomial> {
        self.phi.as_ref()
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    /// Replaces one of the four model matrices, keeping its shape.
    pub fn map_matrices(
        &self,
        f: impl Fn(Block, &OperatorMatrix) -> OperatorMatrix,
    ) -> Result<QsdeModel> {
        let rebuilt = QsdeModel::new(
            &self.alg,
            f(Block::Drift, &self.drift),
            f(Block::Diffusion, &self.diffusion),
            f(Block::Output, &self.output),
            f(Block::Feedthrough, &self.feedthrough),
        )?;
        Ok(QsdeModel {
            name: self.name.clone(),
            params: self.params.clone(),
            phi: self.phi.clone(),
            noise: self.noise.clone(),
            ..rebuilt
        })
    }

    pub fn all_exact(&self) -> bool {
        self.drift.is_exact()
            && self.diffusion.is_exact()
            && self.output.is_exact()
            && self.feedthrough.is_exact()
            && self.phi.as_ref().is_none_or(OperatorPolynomial::is_exact)
    }

    /// Builds the doubled-up model. Doubling happens once; the result is a
    /// distinct type with no way to double again.
    pub fn double(&self) -> DoubledModel {
        let n = self.modes();
        let m = self.channels;
        let theta = self.alg.theta();
        let tol = self.alg.tol();
        let abar = doubled_generators(&self.alg);
        let drift = OperatorMatrix::vstack(&self.drift, &self.drift.conj()).expect("same algebra");
        let diffusion =
            OperatorMatrix::block_diag(&self.diffusion, &self.diffusion.conj()).expect("same algebra");
        let output = OperatorMatrix::vstack(&self.output, &self.output.conj()).expect("same algebra");
        let feedthrough =
            OperatorMatrix::block_diag(&self.feedthrough, &self.feedthrough.conj()).expect("same algebra");
        let graded = ScalarMatrix::block_diag(theta, &theta.conj().scale(&Scalar::from_int(-1)));
        let theta_bar_printed = ScalarMatrix::block_diag(theta, &theta.conj());
        let graded_inverse = graded.inverse(tol);
        let nbar = compute_nbar(self).ok();
        DoubledModel {
            alg: self.alg.clone(),
            modes: n,
            channels: m,
            abar,
            drift,
            diffusion,
            output,
            feedthrough,
            graded,
            graded_inverse,
            theta_bar_printed,
            signature: signature_matrix(m),
            nbar,
        }
    }
}

/// Names the four blocks of a model for [`QsdeModel::map_matrices`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Drift,
    Diffusion,
    Output,
    Feedthrough,
}

/// The doubled-up model over `ā = (a; a*)`.
#[derive(Clone, Debug)]
pub struct DoubledModel {
    alg: Arc<Algebra>,
    modes: usize,
    channels: usize,
    abar: OperatorMatrix,
    drift: OperatorMatrix,
    diffusion: OperatorMatrix,
    output: OperatorMatrix,
    feedthrough: OperatorMatrix,
    graded: ScalarMatrix,
    graded_inverse: Option<ScalarMatrix>,
    theta_bar_printed: ScalarMatrix,
    signature: ScalarMatrix,
    nbar: Option<u32>,
}

impl DoubledModel {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `ā`, `2n x 1`.
    pub fn abar(&self) -> &OperatorMatrix {
        &self.abar
    }

    /// `Ā = (A; A*)`.
    pub fn drift(&self) -> &OperatorMatrix {
        &self.drift
    }

    /// `B̄ = diag(B, B*)`.
    pub fn diffusion(&self) -> &OperatorMatrix {
        &self.diffusion
    }

    /// `C̄ = (C; C*)`.
    pub fn output(&self) -> &OperatorMatrix {
        &self.output
    }

    /// `D̄ = diag(D, D*)`.
    pub fn feedthrough(&self) -> &OperatorMatrix {
        &self.feedthrough
    }

    /// `J = diag(Θ, −Θ*)`, the value of `[ā, ā†]` implied by the CCR.
    pub fn graded_commutation(&self) -> &ScalarMatrix {
        &self.graded
    }

    pub fn graded_commutation_inverse(&self) -> Result<&ScalarMatrix> {
        self.graded_inverse.as_ref().ok_or(Error::SingularTheta)
    }

    /// `diag(Θ, Θ*)`, kept for comparison with the ungraded reading.
    pub fn theta_bar_printed(&self) -> &ScalarMatrix {
        &self.theta_bar_printed
    }

    /// `Ī = diag(I_m, −I_m)`.
    pub fn signature(&self) -> &ScalarMatrix {
        &self.signature
    }

    pub fn nbar(&self) -> Result<u32> {
        self.nbar.ok_or(Error::ZeroDrift)
    }
}

/// `n̄ = 1 + max(k + h)` over the monomials of all drift entries with a
/// non-zero coefficient. A drift of maximal degree `d` comes from a
/// Hamiltonian of degree `d + 1`.
pub fn compute_nbar(model: &QsdeModel) -> Result<u32> {
    max_drift_degree(model).map(|d| d + 1)
}

/// The uncorrected bound `max(k + h)` over the drift monomials.
pub fn max_drift_degree(model: &QsdeModel) -> Result<u32> {
    let drift = model.drift();
    if drift.is_zero() {
        return Err(Error::ZeroDrift);
    }
    Ok(drift.entries().iter().map(OperatorPolynomial::total_degree).max().unwrap_or(0))
}

/// A monomial that falls outside the admissible polynomial shapes for `A` or `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralViolation {
    pub location: String,
    pub monomial: String,
    pub reason: &'static str,
}

/// Each `A_i` term must be `a_p^k (a_l*)^h` for single modes `p`, `l`; each
/// `C_v` term must be a pure power `a_p^k` of one annihilator.
pub fn structural_class_check(model: &QsdeModel) -> Vec<StructuralViolation> {
    let mut out = Vec::new();
    for (i, p) in model.drift().entries().iter().enumerate() {
        for (mono, _) in p.terms() {
            if mono.annihilation_support().len() > 1 {
                out.push(StructuralViolation {
                    location: format!("A[{}]", i + 1),
                    monomial: mono.to_string(),
                    reason: "annihilators from more than one mode",
                });
            }
            if mono.creation_support().len() > 1 {
                out.push(StructuralViolation {
                    location: format!("A[{}]", i + 1),
                    monomial: mono.to_string(),
                    reason: "creators from more than one mode",
                });
            }
        }
    }
    for (v, p) in model.output().entries().iter().enumerate() {
        for (mono, _) in p.terms() {
            if mono.creation_degree() > 0 {
                out.push(StructuralViolation {
                    location: format!("C[{}]", v + 1),
                    monomial: mono.to_string(),
                    reason: "creation operator in output",
                });
            }
            if mono.annihilation_support().len() > 1 {
                out.push(StructuralViolation {
                    location: format!("C[{}]", v + 1),
                    monomial: mono.to_string(),
                    reason: "annihilators from more than one mode",
                });
            }
        }
    }
    out
}
