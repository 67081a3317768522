//! Plain-text rendering of reports.

use std::fmt::Write;

use qreal::{CheckReport, Condition};

pub fn pass_fail(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn yes_no(v: bool) -> &'static str {
    if v {
        "yes"
    } else {
        "no"
    }
}

fn condition(out: &mut String, c: &Condition) {
    let _ = write!(out, "  {}  {:<30} {}", pass_fail(c.pass), c.condition_id, c.description);
    if !c.pass {
        let _ = write!(out, " (residual {})", c.residual_norm);
    }
    out.push('\n');
    for w in &c.witness {
        let _ = writeln!(out, "        {}: {}", w.entry, w.value);
    }
    if let Some(note) = &c.note {
        let _ = writeln!(out, "        note: {note}");
    }
}

pub fn report(r: &CheckReport) -> String {
    let mut out = format!("model {}\n", r.model_id);
    for c in &r.conditions {
        condition(&mut out, c);
    }
    let d = &r.derived;
    let mut derived = Vec::new();
    if let Some(n) = d.nbar {
        match d.nbar_printed {
            Some(p) => derived.push(format!("nbar = {n} (max drift degree {p})")),
            None => derived.push(format!("nbar = {n}")),
        }
    }
    if let Some(h) = &d.hbar {
        derived.push(format!("H = {h}"));
    }
    if let Some(sa) = d.hbar_self_adjoint {
        derived.push(format!("H self-adjoint: {}", yes_no(sa)));
    }
    for (i, l) in d.lbar.iter().enumerate() {
        derived.push(format!("L[{}] = {l}", i + 1));
    }
    if let Some(phi) = &d.phi {
        derived.push(format!("phi = {phi}"));
    }
    if !derived.is_empty() {
        out.push_str("derived\n");
        for line in derived {
            let _ = writeln!(out, "  {line}");
        }
    }
    if !r.audit.is_empty() {
        out.push_str("audit (does not affect the verdict)\n");
        for c in &r.audit {
            condition(&mut out, c);
        }
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "overall {}", pass_fail(r.overall));
    out
}
