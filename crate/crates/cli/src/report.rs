//! Text and JSON renderings of the library reports.

use std::fmt::Write;

use serde_json::{json, Value};
use twospectra::admissibility::{AdmissibilityReport, Verdict};
use twospectra::direct::{Check, DirectReport};
use twospectra::Real;

use crate::decimal::Scalar;

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn checks_json(checks: &[Check]) -> Value {
    checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "residual": finite(c.residual),
                "tolerance": finite(c.tolerance),
                "passed": c.passed(),
            })
        })
        .collect()
}

pub fn checks_text(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let mark = if c.passed() { "ok" } else { "FAILED" };
        let _ = writeln!(out, "  {:<20} {:>12.3e} (tol {:.0e}) {mark}", c.name, c.residual, c.tolerance);
    }
    out
}

pub fn direct_text<T: Scalar>(report: &DirectReport<T>) -> String {
    format!(
        "status: {}\nshift: {}\ntheta: {}\nchecks:\n{}",
        report.status.name(),
        report.pair.shift().name(),
        report.theta.get().to_decimal(),
        checks_text(&report.diagnostics)
    )
}

fn verdict_name(verdict: Verdict) -> (&'static str, Option<&'static str>) {
    match verdict {
        Verdict::Admissible => ("ADMISSIBLE", None),
        Verdict::Rejected(gate) => ("REJECTED", Some(gate.name())),
    }
}

pub fn admissibility_json<T: Scalar>(report: &AdmissibilityReport<T>) -> Value {
    let (verdict, gate) = verdict_name(report.verdict);
    let condition_a = match &report.condition_a {
        Ok(shift) => json!({ "shift": shift.name() }),
        Err(e) => json!({ "error": e.name(), "message": e.to_string() }),
    };
    let condition_b = report.condition_b.as_ref().map(|s| {
        json!({
            "sum": s.sum.to_decimal(),
            "finite": s.finite,
            "tail_fraction": finite(s.tail_fraction),
            "partial_sums": s.partial_sums.iter().map(|&x| finite(x)).collect::<Vec<_>>(),
        })
    });
    let tau = report.tau.as_ref().map(|t| {
        json!({
            "theta_squared": t.theta_sq.to_decimal(),
            "weights": t.weights.iter().map(Scalar::to_decimal).collect::<Vec<_>>(),
            "sum": t.sum.to_decimal(),
            "first_nonpositive": t.first_nonpositive,
        })
    });
    let hamburger = report.hamburger.as_ref().map(|h| {
        json!({
            "max_order": h.max_order,
            "signs": h.signs,
            "log10_det": h.log10_det.iter().map(|&x| finite(x)).collect::<Vec<_>>(),
            "log10_dprime_ratio": h.log10_dprime_ratio.iter().map(|&x| finite(x)).collect::<Vec<_>>(),
            "first_failure": h.first_failure,
            "log10_min_gram_eigenvalue": h.log10_min_gram_eigenvalue.map(finite),
        })
    });
    json!({
        "verdict": verdict,
        "gate": gate,
        "condition_a": condition_a,
        "condition_b": condition_b,
        "tau": tau,
        "theta_error": report.theta_error.as_ref().map(|e| json!({ "error": e.name(), "message": e.to_string() })),
        "condition_c": report.condition_c.map(|(order, overflow)| json!({ "max_order": order, "overflow": overflow })),
        "hamburger": hamburger,
    })
}

pub fn admissibility_text<T: Scalar>(report: &AdmissibilityReport<T>) -> String {
    let mut out = String::new();
    let (verdict, gate) = verdict_name(report.verdict);
    let _ = match gate {
        Some(g) => writeln!(out, "verdict: {verdict} ({g})"),
        None => writeln!(out, "verdict: {verdict}"),
    };
    let _ = match &report.condition_a {
        Ok(shift) => writeln!(out, "condition_a: interlacing, {}", shift.name()),
        Err(e) => writeln!(out, "condition_a: {} ({e})", e.name()),
    };
    if let Some(s) = &report.condition_b {
        let _ = writeln!(
            out,
            "condition_b: sum of shifts {:.6e}, tail fraction {:.3}",
            s.sum.to_f64(),
            s.tail_fraction
        );
    }
    if let Some(e) = &report.theta_error {
        let _ = writeln!(out, "theta: {} ({e})", e.name());
    }
    if let Some(t) = &report.tau {
        let min = t.weights.iter().map(Real::to_f64).fold(f64::INFINITY, f64::min);
        let _ = writeln!(
            out,
            "weights: theta^2 {:.12}, min {:.3e}, sum {:.12}",
            t.theta_sq.to_f64(),
            min,
            t.sum.to_f64()
        );
        if let Some(k) = t.first_nonpositive {
            let _ = writeln!(out, "positivity: weight at index {k} is not positive");
        }
    }
    if let Some((order, overflow)) = report.condition_c {
        let state = if overflow { "overflowed" } else { "finite" };
        let _ = writeln!(out, "condition_c: moments through order {} {state}", 2 * order);
    }
    if let Some(h) = &report.hamburger {
        let _ = match h.first_failure {
            Some(n) => writeln!(out, "hamburger: Hankel determinant fails at order {n}"),
            None => writeln!(out, "hamburger: positive definite through order {}", h.max_order),
        };
        if let Some(v) = h.log10_min_gram_eigenvalue {
            let _ = writeln!(out, "condition_d_surrogate: log10 min Gram eigenvalue {v:.3}");
        }
    }
    out
}
