//! Condition checks on bound models. Every check returns a [`CheckReport`]
//! whose conditions carry the residual `LHS − RHS` and the entries where it
//! does not vanish.

mod class;
mod lossless;
mod realize;

use serde::Serialize;

pub use class::{check_class, drift_identity_terms, DriftIdentityTerms};
pub use lossless::{
    check_lossless, check_storage_condition, storage_constant, synthesize_storage, PositivityVerdict,
    SupplyRate,
};
pub use realize::{
    b_match_matrix, check_physical_realizability, check_preservation, extract_hamiltonian,
    extract_hamiltonian_with, preservation_terms, reconstruct_generator, PreservationTerms,
};

use crate::error::Result;
use crate::matrix::{NamedResidual, OperatorMatrix};
use crate::model::QsdeModel;

/// One verdict with its residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub condition_id: String,
    pub description: String,
    pub pass: bool,
    /// Largest coefficient magnitude in `LHS − RHS` over all entries.
    pub residual_norm: f64,
    pub witness: Vec<WitnessEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub entry: String,
    pub value: String,
}

impl Condition {
    pub fn new(id: &str, description: &str, pass: bool, residual_norm: f64, witness: Vec<WitnessEntry>) -> Self {
        Condition {
            condition_id: id.to_string(),
            description: description.to_string(),
            pass,
            residual_norm,
            witness,
            note: None,
        }
    }

    /// Compares two operator matrices of equal shape entry by entry.
    pub fn compare(id: &str, description: &str, lhs: &OperatorMatrix, rhs: &OperatorMatrix) -> Result<Self> {
        let diff = lhs.checked_sub(rhs)?;
        let mut witness = Vec::new();
        for r in 0..diff.rows() {
            for c in 0..diff.cols() {
                let v = diff.get(r, c);
                if !v.is_zero() {
                    witness.push(WitnessEntry { entry: format!("({},{})", r + 1, c + 1), value: v.to_string() });
                }
            }
        }
        Ok(Condition::new(id, description, diff.is_zero(), diff.max_abs_coefficient(), witness))
    }

    /// All brackets in `residuals` must vanish.
    pub fn vanishing(id: &str, description: &str, residuals: Vec<NamedResidual>) -> Self {
        let norm = residuals.iter().map(|r| r.value.max_abs_coefficient()).fold(0.0, f64::max);
        let witness = residuals
            .into_iter()
            .map(|r| WitnessEntry { entry: r.location, value: r.value.to_string() })
            .collect::<Vec<_>>();
        Condition::new(id, description, witness.is_empty(), norm, witness)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Quantities computed along the way, in canonical text form.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Derived {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar_self_adjoint: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lbar: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbar: Option<u32>,
    /// `max(k + h)` over the drift monomials, without the `+1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbar_printed: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
}

impl Derived {
    fn is_empty(&self) -> bool {
        *self == Derived::default()
    }

    fn merge(&mut self, other: Derived) {
        self.hbar = self.hbar.take().or(other.hbar);
        self.hbar_self_adjoint = self.hbar_self_adjoint.or(other.hbar_self_adjoint);
        if self.lbar.is_empty() {
            self.lbar = other.lbar;
        }
        self.nbar = self.nbar.or(other.nbar);
        self.nbar_printed = self.nbar_printed.or(other.nbar_printed);
        self.phi = self.phi.take().or(other.phi);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub model_id: String,
    pub conditions: Vec<Condition>,
    pub overall: bool,
    #[serde(skip_serializing_if = "Derived::is_empty")]
    pub derived: Derived,
    /// Side computations that never affect `overall`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub audit: Vec<Condition>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(model: &QsdeModel) -> Self {
        Self::named(model.name.as_deref().unwrap_or("model"))
    }

    pub fn named(model_id: &str) -> Self {
        CheckReport {
            model_id: model_id.to_string(),
            conditions: Vec::new(),
            overall: true,
            derived: Derived::default(),
            audit: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Condition) {
        self.overall &= c.pass;
        self.conditions.push(c);
    }

    pub fn merge(&mut self, other: CheckReport) {
        for c in other.conditions {
            self.push(c);
        }
        self.derived.merge(other.derived);
        self.audit.extend(other.audit);
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
    }

    pub fn condition(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.condition_id == id)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }
}

/// Oracle settings used when positivity of a storage function has to be
/// decided numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSettings {
    pub truncation: usize,
    pub guard: usize,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CheckOptions {
    /// Also evaluate the drift identity and the Hamiltonian with the ungraded
    /// `diag(Θ, Θ*)⁻¹`, reported under `audit`.
    pub audit_literal_theta: bool,
    /// Truncation for the numerical positivity fallback; picked from the
    /// degree of `φ̄` when absent.
    pub positivity: Option<FockSettings>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Class,
    Preserve,
    Realize,
    Lossless,
    Storage,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] =
        [CheckKind::Class, CheckKind::Preserve, CheckKind::Realize, CheckKind::Lossless, CheckKind::Storage];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Class => "class",
            CheckKind::Preserve => "preserve",
            CheckKind::Realize => "realize",
            CheckKind::Lossless => "lossless",
            CheckKind::Storage => "storage",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        CheckKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Runs the selected checks in the fixed order of [`CheckKind::ALL`]. When
/// `lossless` or `storage` is selected and the model carries no `phi`, a
/// quadratic storage function is synthesized first.
pub fn run_checks(model: &QsdeModel, kinds: &[CheckKind], opts: &CheckOptions) -> Result<CheckReport> {
    let mut report = CheckReport::new(model);
    let wants = |k| kinds.contains(&k);
    if wants(CheckKind::Class) {
        report.merge(check_class(model, opts)?);
    }
    if wants(CheckKind::Preserve) {
        report.merge(check_preservation(model, &model.noise().commutation)?);
    }
    if wants(CheckKind::Realize) {
        report.merge(check_physical_realizability(model, opts)?);
    }
    if wants(CheckKind::Lossless) || wants(CheckKind::Storage) {
        let phi = match model.phi() {
            Some(p) => Some(p.clone()),
            None => {
                let found = synthesize_storage(model, opts)?;
                if found.is_some() {
                    report.notes.push("phi not given; quadratic storage function synthesized".into());
                }
                found
            }
        };
        match phi {
            Some(phi) => {
                if wants(CheckKind::Lossless) {
                    report.merge(check_lossless(model, &phi, opts)?);
                }
                if wants(CheckKind::Storage) {
                    report.merge(check_storage_condition(&phi));
                }
                report.derived.phi = Some(phi.to_string());
            }
            None => report.push(Condition::new(
                "LL-storage-witness",
                "a quadratic storage function satisfying the lossless and storage conditions exists",
                false,
                0.0,
                Vec::new(),
            )),
        }
    }
    Ok(report)
}
