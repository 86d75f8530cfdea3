//! Scatter report for a single pattern.

use std::fmt::Write as _;

use sparsenet_core::scatter::{scatter_metric, scatter_vector};
use sparsenet_core::topology::ConnectionPattern;

use crate::error::Result;

/// Two-line CSV: header `pattern,S,<labels of S̄>`, then one row.
pub fn scatter_report(name: &str, pattern: &ConnectionPattern) -> Result<String> {
    let v = scatter_vector(pattern)?;
    let mut out = String::from("pattern,S");
    for (label, _) in v.entries() {
        write!(out, ",{label}").unwrap();
    }
    write!(out, "\n{name},{:.6}", scatter_metric(&v)).unwrap();
    for (_, value) in v.entries() {
        write!(out, ",{value:.6}").unwrap();
    }
    out.push('\n');
    Ok(out)
}
