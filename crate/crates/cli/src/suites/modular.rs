use superkoszul::brackets::divergence;
use superkoszul::mx::{bv_laplacian_of_square, check_modular_closed, gauge_law_residual, solve_modular_potential};
use superkoszul::report::Check;
use superkoszul::thick::potential_residual;

use super::{check_name, corpus, multivector_positions, samples, zero_on_samples, Suite};
use crate::manifest::Manifest;

/// Degree bound of the search for a modular potential.
pub const POTENTIAL_DEGREE: u32 = 3;

/// The modular cocycle `δ_ρ(P)`, its gauge behaviour and its potential.
pub struct Modular;

impl Suite for Modular {
    fn name(&self) -> &'static str {
        "modular"
    }

    fn about(&self) -> &'static str {
        "closedness of the modular cocycle, gauge law, BV Laplacian of rho^2, modular potential"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        vec![cocycle_closed(m), gauge_law(m), laplacian_of_square(m), potential(m)]
    }
}

fn name(c: &str) -> String {
    check_name("modular", c)
}

/// `d_P(δ_ρ(P)) = 0`.
pub fn cocycle_closed(m: &Manifest) -> Check {
    let name = name("cocycle_closed");
    if !m.p.is_pinfty() {
        return Check::skipped(name, "P is not a P-infinity structure");
    }
    let mut c = check_modular_closed(&m.p, &m.vol);
    c.name = name;
    c
}

/// `δ_{e^f ρ}(P) - δ_ρ(P) = d_P(f)` for random base functions `f`.
pub fn gauge_law(m: &Manifest) -> Check {
    let chart = &m.chart;
    let mut k = corpus(m, "modular.gauge");
    let base = chart.base();
    zero_on_samples(
        name("gauge_law"),
        (0..m.budgets.corpus_size).map(|_| {
            let f = k.base_function(chart, &base, m.budgets.corpus_degree);
            gauge_law_residual(&m.p, &m.vol, &f)
        }),
    )
}

/// `Δ_{ρ²} = 2δ_ρ` on random multivectors.
pub fn laplacian_of_square(m: &Manifest) -> Check {
    let chart = &m.chart;
    let mut k = corpus(m, "modular.laplacian");
    let mv = samples(
        &mut k,
        chart,
        &multivector_positions(chart),
        m.budgets.corpus_degree,
        m.budgets.corpus_size,
    );
    zero_on_samples(
        name("laplacian_of_square"),
        mv.iter()
            .map(|f| Ok(&bv_laplacian_of_square(f, &m.vol)? - &divergence(f, &m.vol)?.scale_int(2))),
    )
}

/// `δ_ρ(P) = d_P(F)` for the manifest potential; without one, a potential of
/// bounded degree is searched for.
pub fn potential(m: &Manifest) -> Check {
    let name = name("potential");
    if !m.p.is_pinfty() {
        return Check::skipped(name, "P is not a P-infinity structure");
    }
    if let Some(f) = &m.f {
        return Check::from_result(
            name.clone(),
            potential_residual(&m.p, &m.vol, Some(f)).map(|r| Check::zero_residual(name.clone(), &r)),
        );
    }
    match solve_modular_potential(&m.p, &m.vol, POTENTIAL_DEGREE) {
        Ok(Some(f)) => Check::from_result(
            name.clone(),
            potential_residual(&m.p, &m.vol, Some(&f)).map(|r| Check::zero_residual(name.clone(), &r)),
        ),
        Ok(None) => Check::skipped(
            name,
            format!("no potential of degree at most {POTENTIAL_DEGREE}: the modular class may be nonzero"),
        ),
        Err(e) => Check::fail(name, format!("error: {e}")),
    }
}
