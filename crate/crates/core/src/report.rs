//! Verification reports and their JSON-lines / CSV / table encodings.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs = rhs`
    Eq,
    /// `lhs ≤ rhs`
    Le,
    /// `lhs ≥ rhs`
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub model: String,
    pub point: Option<Vec<f64>>,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tol: f64,
    pub pass: bool,
    pub runtime_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn build(identity: &str, relation: Relation, lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_error = match relation {
            Relation::Eq => (lhs - rhs).abs(),
            Relation::Le => (lhs - rhs).max(0.0),
            Relation::Ge => (rhs - lhs).max(0.0),
        };
        // kept finite so that JSON round-trips
        let rel_error = if abs_error == 0.0 {
            0.0
        } else if rhs == 0.0 {
            f64::MAX
        } else {
            abs_error / rhs.abs()
        };
        let pass = abs_error.is_finite() && (abs_error <= tol || rel_error <= tol);
        VerificationReport {
            identity: identity.to_string(),
            model: String::new(),
            point: None,
            lhs,
            rhs,
            relation,
            abs_error,
            rel_error,
            tol,
            pass,
            runtime_ms: 0.0,
            note: None,
        }
    }

    pub fn eq(identity: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(identity, Relation::Eq, lhs, rhs, tol)
    }

    pub fn le(identity: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(identity, Relation::Le, lhs, rhs, tol)
    }

    pub fn ge(identity: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(identity, Relation::Ge, lhs, rhs, tol)
    }

    /// A report that only records a failure with a diagnostic.
    pub fn diagnostic(identity: &str, message: impl Into<String>) -> Self {
        let mut r = Self::build(identity, Relation::Eq, 0.0, 0.0, 0.0);
        r.pass = false;
        r.note = Some(message.into());
        r
    }

    pub fn with_model(mut self, model: &str) -> Self {
        self.model = model.to_string();
        self
    }

    pub fn with_point(mut self, coords: &[f64]) -> Self {
        self.point = Some(coords.to_vec());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_runtime(mut self, started: Instant) -> Self {
        self.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }

    /// Marks a failure that the numbers alone do not show.
    pub fn fail_with(mut self, note: impl Into<String>) -> Self {
        self.pass = false;
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

const CSV_HEADER: [&str; 12] = [
    "identity", "model", "point", "lhs", "rhs", "relation", "abs_error", "rel_error", "tol",
    "pass", "runtime_ms", "note",
];

pub fn write_reports<W: Write>(out: W, reports: &[VerificationReport], format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => write_json(out, reports),
        Format::Csv => write_csv(out, reports),
        Format::Table => write_table(out, reports),
    }
}

fn write_json<W: Write>(mut out: W, reports: &[VerificationReport]) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}

fn fmt_point(p: &Option<Vec<f64>>) -> String {
    p.as_ref()
        .map(|v| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

fn relation_str(r: Relation) -> &'static str {
    match r {
        Relation::Eq => "eq",
        Relation::Le => "le",
        Relation::Ge => "ge",
    }
}

fn write_csv<W: Write>(out: W, reports: &[VerificationReport]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.identity.clone(),
            r.model.clone(),
            fmt_point(&r.point),
            format!("{:e}", r.lhs),
            format!("{:e}", r.rhs),
            relation_str(r.relation).to_string(),
            format!("{:e}", r.abs_error),
            format!("{:e}", r.rel_error),
            format!("{:e}", r.tol),
            r.pass.to_string(),
            format!("{}", r.runtime_ms),
            r.note.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_table<W: Write>(mut out: W, reports: &[VerificationReport]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<5} {:<28} {:<22} {:>16} {:>3} {:>16} {:>10} {:>8}",
        "", "identity", "model", "lhs", "", "rhs", "abs_err", "tol"
    )?;
    for r in reports {
        let rel = match r.relation {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        };
        writeln!(
            out,
            "{:<5} {:<28} {:<22} {:>16.10} {:>3} {:>16.10} {:>10.2e} {:>8.0e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.identity,
            r.model,
            r.lhs,
            rel,
            r.rhs,
            r.abs_error,
            r.tol
        )?;
        if let Some(n) = &r.note {
            writeln!(out, "      {n}")?;
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    writeln!(out, "{passed}/{} passed", reports.len())
}
