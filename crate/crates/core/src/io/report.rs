//! Plain-text solve diagnostics.

use std::fmt::Write as _;
use std::path::Path;

use crate::mgsolver::SolveReport;
use crate::pipeline::Diagnostics;

use super::{fmt_sig, write_text};

/// `key = value` lines, then one `residual <cycle> <value>` line per entry.
pub fn format_report(report: &SolveReport, diagnostics: Option<&Diagnostics>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "converged = {}", report.converged);
    let _ = writeln!(s, "cycles = {}", report.cycles_used);
    let _ = writeln!(s, "rate = {}", fmt_sig(report.rate));
    let _ = writeln!(s, "initial_residual = {}", fmt_sig(report.initial_residual()));
    let _ = writeln!(s, "final_residual = {}", fmt_sig(report.final_residual()));
    let dims: Vec<String> = report.level_dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "levels = {}", dims.join(" "));
    if let Some(d) = diagnostics {
        let _ = writeln!(s, "divergence_l2 = {}", fmt_sig(d.divergence.l2));
        let _ = writeln!(s, "divergence_max = {}", fmt_sig(d.divergence.max));
        let _ = writeln!(s, "initial_divergence_l2 = {}", fmt_sig(d.initial_divergence.l2));
        let _ = writeln!(s, "initial_divergence_max = {}", fmt_sig(d.initial_divergence.max));
        let _ = writeln!(s, "max_change = {}", fmt_sig(d.max_change));
    }
    for (c, r) in report.residual_history.iter().enumerate() {
        let _ = writeln!(s, "residual {c} {}", fmt_sig(*r));
    }
    s
}

pub fn write_report(path: &Path, report: &SolveReport, diagnostics: Option<&Diagnostics>) -> crate::Result<()> {
    write_text(path, &format_report(report, diagnostics))
}
