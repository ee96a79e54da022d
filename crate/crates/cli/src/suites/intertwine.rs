use superkoszul::brackets::VolumeData;
use superkoszul::report::{all_zero, Check};
use superkoszul::superalg::SuperPoly;
use superkoszul::thick::{
    check_intertwining, corrected_diagram_residuals, corrected_dual_by_rules, form_basis, QuantumAnchor,
};
use superkoszul::Result;

use super::{check_name, even_base, Suite};
use crate::manifest::Manifest;

/// Largest form degree of the basis the intertwining relation is tested on.
pub const FORM_DEGREE: u32 = 3;

/// Forms checked against the rule-based corrected dual.
const RULE_FORMS: usize = 12;

/// The dual quantum anchor intertwines `Δ_P` with `-ħ² δ_ρ`, corrected by the
/// modular potential when one is given.
pub struct Intertwine;

impl Suite for Intertwine {
    fn name(&self) -> &'static str {
        "intertwine"
    }

    fn about(&self) -> &'static str {
        "the dual quantum anchor intertwines Delta_P with -hbar^2 delta_rho"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        intertwining(m)
    }
}

/// Split a potential into its part free of `x*`, which is a base function
/// absorbed into the volume by `ρ → e^{-F₀} ρ`, and the remaining correction.
pub fn gauge_split(vol: &VolumeData, f: &SuperPoly) -> Result<(VolumeData, SuperPoly)> {
    let anti: Vec<usize> = f.chart().antifiber_pairs().iter().map(|q| q.1).collect();
    let f0 = f.restrict_zero(&anti);
    Ok((vol.gauge(&-f0.clone())?, f - &f0))
}

pub fn intertwining(m: &Manifest) -> Vec<Check> {
    let n = |c: &str| check_name("intertwine", c);
    let chart = &m.chart;
    let p = &m.p;
    let mut names = vec![n("relation")];
    if m.f.is_some() {
        names.push(n("corrected.diagram"));
        names.push(n("corrected.rules"));
    }
    let skip_all = |reason: &str| names.iter().map(|x| Check::skipped(x.clone(), reason)).collect();
    if !even_base(chart) {
        return skip_all("Berezin kernels need a purely even base");
    }
    if !p.is_pinfty() {
        return skip_all("P is not a P-infinity structure");
    }
    let (vol, f) = match &m.f {
        Some(f) => match gauge_split(&m.vol, f) {
            Ok((vol, f)) => (vol, Some(f)),
            Err(e) => {
                return names
                    .iter()
                    .map(|x| Check::fail(x.clone(), format!("error: {e}")))
                    .collect()
            }
        },
        None => (m.vol.clone(), None),
    };
    let forms = form_basis(chart, 1, FORM_DEGREE);
    let mut out = vec![check_intertwining(&names[0], p, &vol, f.as_ref(), &forms)];
    if let Some(f) = &f {
        out.push(match corrected_diagram_residuals(p, f, &forms) {
            Ok(rs) => all_zero(names[1].clone(), rs.into_iter().map(Ok), |i| {
                format!("form {}", forms[i])
            }),
            Err(e) => Check::fail(names[1].clone(), format!("error: {e}")),
        });
        out.push(match QuantumAnchor::new(p, Some(f)) {
            Ok(qa) => all_zero(
                names[2].clone(),
                forms
                    .iter()
                    .take(RULE_FORMS)
                    .map(|w| Ok(&qa.dual_apply(w)? - &corrected_dual_by_rules(p, &vol, f, w)?)),
                |i| format!("form {}", forms[i]),
            ),
            Err(e) => Check::fail(names[2].clone(), format!("error: {e}")),
        });
    }
    out
}
