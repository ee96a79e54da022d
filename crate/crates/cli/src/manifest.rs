//! JSON manifests: a chart over declared base generators, the structure `P`, the
//! volume `log ρ`, an optional modular potential `F` and the verification budgets.
//!
//! ```json
//! {
//!   "base": [{"name": "x1", "parity": "even"}, {"name": "x2", "parity": "even"}],
//!   "P": "x1*x2_star*x1_star",
//!   "log_rho": "0",
//!   "F": null,
//!   "budgets": {"hbar_order": 4, "momentum_order": 4, "corpus_degree": 3,
//!               "corpus_size": 50, "seed": 20240611}
//! }
//! ```
//!
//! Expressions use the polynomial text syntax of the core crate. The chart
//! carries every coordinate family: `x1_star`, `dx1`, `p_x1`, `pi_x1_star`,
//! `pi_dx1` are generated from a base generator `x1`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use superkoszul::brackets::{PStructure, VolumeData};
use superkoszul::superalg::{parse_poly, Chart, Families, Parity, Role, SuperPoly};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("manifest syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("field `{field}`: {source}")]
    Expression {
        field: &'static str,
        source: superkoszul::Error,
    },

    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ParityName {
    Even,
    Odd,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: String,
    parity: ParityName,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    base: Vec<RawGenerator>,
    #[serde(rename = "P")]
    p: String,
    #[serde(default)]
    log_rho: Option<String>,
    #[serde(rename = "F", default)]
    f: Option<String>,
    #[serde(default)]
    budgets: Budgets,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Largest hbar degree of the random operators.
    pub hbar_order: u32,
    /// Momentum truncation of thick-morphism computations.
    pub momentum_order: u32,
    /// Coefficient degree of random polynomials.
    pub corpus_degree: u32,
    /// Number of random samples per corpus-driven check.
    pub corpus_size: usize,
    pub seed: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            hbar_order: 4,
            momentum_order: 4,
            corpus_degree: 3,
            corpus_size: 50,
            seed: DEFAULT_SEED,
        }
    }
}

/// A parsed and validated manifest.
#[derive(Clone, Debug)]
pub struct Manifest {
    pub chart: Arc<Chart>,
    pub p: PStructure,
    pub vol: VolumeData,
    pub f: Option<SuperPoly>,
    pub budgets: Budgets,
}

pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Manifest, ManifestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_manifest_str(&text)
}

pub fn parse_manifest_str(text: &str) -> Result<Manifest, ManifestError> {
    let raw: RawManifest = serde_json::from_str(text).map_err(|e| ManifestError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    validate(raw)
}

// serde_json appends " at line L column C" to its messages.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn validate(raw: RawManifest) -> Result<Manifest, ManifestError> {
    if raw.base.is_empty() {
        return Err(ManifestError::Invalid(
            "the chart needs at least one base generator".into(),
        ));
    }
    for g in &raw.base {
        let ok = g.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(ManifestError::Invalid(format!(
                "`{}` is not a valid generator name",
                g.name
            )));
        }
        if g.name == "hbar" || g.name == "i" {
            return Err(ManifestError::Invalid(format!("`{}` is a reserved name", g.name)));
        }
    }
    let decl: Vec<(&str, Parity)> = raw
        .base
        .iter()
        .map(|g| {
            let parity = match g.parity {
                ParityName::Even => Parity::Even,
                ParityName::Odd => Parity::Odd,
            };
            (g.name.as_str(), parity)
        })
        .collect();
    let chart = Chart::standard(&decl, Families::all()).map_err(|e| ManifestError::Invalid(format!("chart: {e}")))?;

    let expr = |field: &'static str, src: &str| {
        parse_poly(&chart, src).map_err(|source| ManifestError::Expression { field, source })
    };
    let p_poly = expr("P", &raw.p)?;
    if !p_poly.is_zero() && p_poly.parity().map_or(true, |p| p.is_odd()) {
        return Err(ManifestError::Invalid(format!("P must be even, got `{p_poly}`")));
    }
    let p = PStructure::new(p_poly).map_err(|e| ManifestError::Invalid(format!("P: {e}")))?;

    let log_rho = expr("log_rho", raw.log_rho.as_deref().unwrap_or("0"))?;
    let vol = VolumeData::new(log_rho).map_err(|e| ManifestError::Invalid(format!("log_rho: {e}")))?;

    let f = match raw.f.as_deref() {
        None => None,
        Some(src) => {
            let f = expr("F", src)?;
            if !f.is_zero() && f.parity().map_or(true, |p| p.is_odd()) {
                return Err(ManifestError::Invalid(format!("F must be even, got `{f}`")));
            }
            let allowed: Vec<usize> = chart
                .generators()
                .iter()
                .filter(|g| matches!(g.role, Role::Base | Role::Antifiber))
                .map(|g| g.index)
                .collect();
            if !f.depends_only_on(&allowed) {
                return Err(ManifestError::Invalid(
                    "F may depend only on base and antifiber generators".into(),
                ));
            }
            Some(f)
        }
    };

    let b = &raw.budgets;
    if b.corpus_size == 0 || b.hbar_order == 0 || b.momentum_order == 0 {
        return Err(ManifestError::Invalid(
            "corpus_size, hbar_order and momentum_order must be positive".into(),
        ));
    }
    Ok(Manifest {
        chart,
        p,
        vol,
        f,
        budgets: raw.budgets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"base": [{"name": "x1", "parity": "even"}, {"name": "x2", "parity": "even"}], "P": "0"}"#;

    #[test]
    fn minimal_manifest_is_valid() {
        let m = parse_manifest_str(MINIMAL).unwrap();
        assert!(m.p.p().is_zero());
        assert_eq!(m.budgets, Budgets::default());
        assert_eq!(m.chart.base().len(), 2);
    }

    #[test]
    fn odd_p_is_rejected() {
        let src = MINIMAL.replace(r#""P": "0""#, r#""P": "x1_star""#);
        let err = parse_manifest_str(&src).unwrap_err();
        assert!(err.to_string().contains("P must be even"), "{err}");
    }

    #[test]
    fn log_rho_must_live_on_the_base() {
        let src = MINIMAL.replace(r#""P": "0""#, r#""P": "0", "log_rho": "x1_star*x2_star""#);
        let err = parse_manifest_str(&src).unwrap_err();
        assert!(err.to_string().contains("log_rho"), "{err}");
    }

    #[test]
    fn syntax_errors_report_positions() {
        let err = parse_manifest_str("{\n  \"base\": [,]\n}").unwrap_err();
        match err {
            ManifestError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 12)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn expression_errors_name_the_field() {
        let src = MINIMAL.replace(r#""P": "0""#, r#""P": "x1 + + y""#);
        let err = parse_manifest_str(&src).unwrap_err();
        assert!(matches!(err, ManifestError::Expression { field: "P", .. }), "{err}");
    }
}
