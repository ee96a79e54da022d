//! Manifest-driven verification suites over the `superkoszul` core.

pub mod manifest;
pub mod report;
pub mod suites;

use manifest::Manifest;
use report::Report;
use suites::{Registry, UnknownSuite};

/// Run a suite (or `all`) from the standard registry and assemble its report.
pub fn run_suite(suite: &str, m: &Manifest) -> Result<Report, UnknownSuite> {
    let checks = Registry::standard().run(suite, m)?;
    Ok(Report::new(suite, &m.budgets, checks))
}
