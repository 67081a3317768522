use std::fmt::Write;

use super::{NoiseSpec, QsdeModel};

/// Writes a bound model back in the text format. Parameters are emitted for
/// reference but the matrices carry their evaluated coefficients, so the
/// output reparses to the same model.
pub fn render_model(model: &QsdeModel) -> String {
    let mut out = String::new();
    let alg = model.algebra();
    if let Some(name) = &model.name {
        writeln!(out, "name: {name}").unwrap();
    }
    writeln!(out, "modes: {}", model.modes()).unwrap();
    writeln!(out, "channels: {}", model.channels()).unwrap();
    if alg.theta_is_identity() {
        writeln!(out, "theta: identity").unwrap();
    } else {
        writeln!(out, "theta: rows {}", alg.theta()).unwrap();
    }
    for (name, value) in model.params() {
        writeln!(out, "param {name} = {value}").unwrap();
    }
    for (i, p) in model.drift().entries().iter().enumerate() {
        writeln!(out, "A[{}] = {p}", i + 1).unwrap();
    }
    writeln!(out, "B = {}", model.diffusion()).unwrap();
    for (v, p) in model.output().entries().iter().enumerate() {
        writeln!(out, "C[{}] = {p}", v + 1).unwrap();
    }
    writeln!(out, "D = {}", model.feedthrough()).unwrap();
    if let Some(phi) = model.phi() {
        writeln!(out, "phi = {phi}").unwrap();
    }
    let canonical = NoiseSpec::canonical(model.channels());
    let noise = model.noise();
    if noise.commutation != canonical.commutation {
        writeln!(out, "T = {}", noise.commutation).unwrap();
    }
    if noise.ito != canonical.ito {
        writeln!(out, "F = {}", noise.ito).unwrap();
    }
    out
}
