#![allow(dead_code)]

pub mod strategies;

use std::path::PathBuf;

use qreal::{parse_model, parse_polynomial, OperatorMatrix, OperatorPolynomial, ParseOptions, QsdeModel};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn model(text: &str) -> QsdeModel {
    parse_model(text, &ParseOptions::default()).unwrap()
}

pub fn example() -> QsdeModel {
    model(&fixture_text("example.qsde"))
}

pub fn poly(m: &QsdeModel, text: &str) -> OperatorPolynomial {
    parse_polynomial(m.algebra(), text).unwrap()
}

/// Builds a matrix from rows of expression strings.
pub fn matrix(m: &QsdeModel, rows: &[&[&str]]) -> OperatorMatrix {
    let entries = rows.iter().flat_map(|r| r.iter().map(|e| poly(m, e))).collect();
    OperatorMatrix::from_entries(m.algebra(), rows.len(), rows[0].len(), entries).unwrap()
}

pub fn column(m: &QsdeModel, entries: &[&str]) -> OperatorMatrix {
    OperatorMatrix::column(m.algebra(), entries.iter().map(|e| poly(m, e)).collect()).unwrap()
}

/// (description, from, to, a condition that must fail)
pub const MUTATIONS: &[(&str, &str, &str, &str)] = &[
    ("B11 sign flip", "B = [[-sqrt(2*k1)", "B = [[sqrt(2*k1)", "PR-B-match"),
    ("A1 cubic coefficient 2 -> 3", "+ 2*a1'*a2^2", "+ 3*a1'*a2^2", "PR-drift"),
    ("A1 damping doubled", "A[1] = -k1*a1", "A[1] = -2*k1*a1", "PR-drift"),
    ("C1 coefficient changed", "C[1] = sqrt(2*k1)*a1", "C[1] = 3*a1", "PR-B-match"),
    ("C1 gains a creation term", "C[1] = sqrt(2*k1)*a1", "C[1] = sqrt(2*k1)*a1 + a1'", "CLASS-C-commute"),
    ("D = 2I", "D = identity", "D = [[2, 0], [0, 2]]", "PR-D-identity"),
    ("A2 cubic sign flip", "- 2*a2'*a1^2", "+ 2*a2'*a1^2", "PR-drift"),
    ("A1 gains an a2 term", "+ 2*a1'*a2^2", "+ 2*a1'*a2^2 + a2", "PR-drift"),
    ("B22 scaled", "-sqrt(2*k2)]]", "-2*sqrt(2*k2)]]", "PR-B-match"),
    ("C2 sign flip", "C[2] = sqrt(2*k2)*a2", "C[2] = -sqrt(2*k2)*a2", "PR-B-match"),
    ("A1 detuned", "A[1] = -k1*a1", "A[1] = -(k1 + i)*a1", "PR-generator-roundtrip"),
    ("C2 gains a creation term", "C[2] = sqrt(2*k2)*a2", "C[2] = sqrt(2*k2)*a2 + a2'", "CLASS-structure"),
    ("A2 damping halved", "A[2] = -k2*a2", "A[2] = -k2/2*a2", "PR-drift"),
];

/// Realizable variants that must pass everything.
pub const POSITIVES: &[(&str, &str, &str)] = &[
    ("unequal damping", "param k1 = 2\nparam k2 = 2", "param k1 = 1/2\nparam k2 = 8"),
    ("stronger exchange", "+ 2*a1'*a2^2\nA[2] = -k2*a2 - 2*a2'*a1^2", "+ 3*a1'*a2^2\nA[2] = -k2*a2 - 3*a2'*a1^2"),
];

pub fn mutate(from: &str, to: &str) -> String {
    let text = fixture_text("example.qsde");
    assert!(text.contains(from), "fixture lacks {from:?}");
    text.replacen(from, to, 1)
}

pub fn without_phi(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("phi")).collect::<Vec<_>>().join("\n")
}
