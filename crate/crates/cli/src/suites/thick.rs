use std::collections::HashMap;

use superkoszul::brackets::{de_rham_hamiltonian, koszul_hamiltonian, lichnerowicz_hamiltonian, schouten_hamiltonian};
use superkoszul::report::Check;
use superkoszul::superalg::{Parity, SuperPoly};
use superkoszul::thick::{
    anchor_chain_residual, anchor_genfun, classical_anchor_pullback, dual_classical_limit_residual, dual_genfun,
    dual_pairing_residual, form_basis, fourier_inversion_residuals, phi_related_residual, thick_pullback, GenFunction,
    KernelChart, QuantumAnchor,
};
use superkoszul::Result;

use super::{check_name, corpus, even_base, samples_of_parity, zero_on_samples, Suite};
use crate::manifest::Manifest;

/// Cap on form pairs for the pairing law of the dual kernel.
const DUAL_PAIRS: usize = 60;

/// Thick morphisms: generating functions, the anchor and its dual, and the
/// quantum pullback through Berezin kernels.
pub struct Thick;

impl Suite for Thick {
    fn name(&self) -> &'static str {
        "thick"
    }

    fn about(&self) -> &'static str {
        "linear pullbacks, Phi-relatedness of the anchor and its dual, Fourier inversion, quantum anchor"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        let mut out = vec![linear_pullback(m)];
        out.extend(anchor(m));
        out.extend(phi_related(m));
        out.extend(kernels(m));
        out
    }
}

fn name(c: &str) -> String {
    check_name("thick", c)
}

/// On even functions, the pullback by `S = φ(x) q` is composition with `φ`, and
/// two such pullbacks compose to the pullback by the composite map.
pub fn linear_pullback(m: &Manifest) -> Check {
    let chart = &m.chart;
    let base = chart.base();
    let pairs: Vec<(usize, usize)> = base.iter().filter_map(|&x| Some((x, chart.momentum_of(x)?))).collect();
    let mut k = corpus(m, "thick.linear");
    let even: Vec<usize> = base.iter().copied().filter(|&x| chart.parity(x).is_even()).collect();
    // An image of each coordinate of the same parity.
    let draw = |k: &mut superkoszul::corpus::Corpus| -> Vec<(usize, SuperPoly)> {
        base.iter()
            .map(|&x| {
                let p = chart.parity(x);
                let img = if p.is_even() {
                    k.poly(chart, &even, 2, 2, Some(p))
                } else {
                    &k.poly(chart, &even, 1, 2, Some(Parity::Even)) * &SuperPoly::var(chart, x)
                };
                (x, img)
            })
            .collect()
    };
    let mut residuals: Vec<Result<SuperPoly>> = Vec::new();
    for _ in 0..m.budgets.corpus_size {
        let r = (|| -> Result<[SuperPoly; 2]> {
            let phi = draw(&mut k);
            let psi = draw(&mut k);
            let g = k.nonzero_poly(chart, &base, m.budgets.corpus_degree, 3, Some(Parity::Even));
            let phi_map: HashMap<usize, SuperPoly> = phi.iter().cloned().collect();
            let psi_map: HashMap<usize, SuperPoly> = psi.iter().cloned().collect();
            let s_phi = GenFunction::from_map(&phi, pairs.clone(), pairs.clone())?;
            let s_psi = GenFunction::from_map(&psi, pairs.clone(), pairs.clone())?;
            let once = &thick_pullback(&s_phi, &g)? - &g.substitute(&phi_map)?;
            // (φ∘ψ)* g = ψ*(φ* g)
            let composite: Vec<(usize, SuperPoly)> = phi
                .iter()
                .map(|(x, f)| Ok((*x, f.substitute(&psi_map)?)))
                .collect::<Result<_>>()?;
            let s_comp = GenFunction::from_map(&composite, pairs.clone(), pairs.clone())?;
            let twice = &thick_pullback(&s_psi, &thick_pullback(&s_phi, &g)?)? - &thick_pullback(&s_comp, &g)?;
            Ok([once, twice])
        })();
        match r {
            Ok(pair) => residuals.extend(pair.map(Ok)),
            Err(e) => residuals.push(Err(e)),
        }
    }
    zero_on_samples(name("linear_pullback"), residuals)
}

fn forms(m: &Manifest, tag: &str) -> Vec<SuperPoly> {
    let chart = &m.chart;
    let mut k = corpus(m, tag);
    let positions = super::form_positions(chart);
    let mut out = samples_of_parity(
        &mut k,
        chart,
        &positions,
        m.budgets.corpus_degree.min(2),
        m.budgets.corpus_size,
        Parity::Even,
    );
    out.extend(samples_of_parity(
        &mut k,
        chart,
        &positions,
        m.budgets.corpus_degree.min(2),
        m.budgets.corpus_size,
        Parity::Odd,
    ));
    out
}

/// The anchor generating function pulls back even forms like `a*`, and `a*` is
/// a chain map from `d` to `d_P`.
pub fn anchor(m: &Manifest) -> Vec<Check> {
    let p = &m.p;
    let ws = forms(m, "thick.anchor");
    let genfun = zero_on_samples(
        name("anchor.genfun_pullback"),
        match anchor_genfun(p, 1) {
            Ok(s) => ws
                .iter()
                .filter(|w| w.parity().is_ok_and(|q| q.is_even()))
                .map(|w| Ok(&thick_pullback(&s, w)? - &classical_anchor_pullback(p, w)?))
                .collect::<Vec<_>>(),
            Err(e) => vec![Err(e)],
        },
    );
    let chain = if p.is_pinfty() && p.is_bivector() {
        zero_on_samples(name("anchor.chain_map"), ws.iter().map(|w| anchor_chain_residual(p, w)))
    } else {
        Check::skipped(name("anchor.chain_map"), "needs a Poisson bivector")
    };
    vec![genfun, chain]
}

/// `(H_{d_P}, H_d)` under the anchor and `(H_Sch, H_P)` under its dual.
pub fn phi_related(m: &Manifest) -> Vec<Check> {
    let p = &m.p;
    let k = m.budgets.momentum_order;
    let chart = &m.chart;
    if !p.is_pinfty() {
        return vec![
            Check::skipped(name("phi_related.anchor"), "P is not a P-infinity structure"),
            Check::skipped(name("phi_related.dual"), "P is not a P-infinity structure"),
        ];
    }
    let anchor = zero_on_samples(
        name("phi_related.anchor"),
        [(|| {
            phi_related_residual(
                &lichnerowicz_hamiltonian(p)?,
                &de_rham_hamiltonian(chart)?,
                &anchor_genfun(p, k)?,
            )
        })()],
    );
    let dual = zero_on_samples(
        name("phi_related.dual"),
        [(|| {
            phi_related_residual(
                &schouten_hamiltonian(chart)?,
                koszul_hamiltonian(p)?.h(),
                &dual_genfun(p, k)?,
            )
        })()],
    );
    vec![anchor, dual]
}

/// Fourier inversion, the double dual, the quantum anchor against `a*`, the
/// pairing law of its dual and the classical limit of the dual phase.
pub fn kernels(m: &Manifest) -> Vec<Check> {
    let names = [
        "kernel.fourier_inversion",
        "kernel.double_dual",
        "quantum_anchor.classical_pullback",
        "quantum_anchor.pairing_law",
        "quantum_anchor.classical_limit",
    ];
    let chart = &m.chart;
    if !even_base(chart) {
        return names
            .iter()
            .map(|n| Check::skipped(name(n), "Berezin kernels need a purely even base"))
            .collect();
    }
    let p = &m.p;
    let kc = match KernelChart::over(chart) {
        Ok(kc) => kc,
        Err(e) => {
            return names
                .iter()
                .map(|n| Check::fail(name(n), format!("error: {e}")))
                .collect()
        }
    };
    let fourier = zero_on_samples(
        name(names[0]),
        match fourier_inversion_residuals(&kc, kc.dim() as u32) {
            Ok(rs) => rs.into_iter().map(Ok).collect::<Vec<_>>(),
            Err(e) => vec![Err(e)],
        },
    );
    let double = match kc.pairing_kernel() {
        Ok(k) if k.dual().dual() == k => Check::pass(name(names[1])),
        Ok(_) => Check::fail(name(names[1]), "the double dual differs from the kernel"),
        Err(e) => Check::fail(name(names[1]), format!("error: {e}")),
    };
    let qa = match QuantumAnchor::new(p, None) {
        Ok(qa) => qa,
        Err(e) => {
            let mut out = vec![fourier, double];
            out.extend(names[2..].iter().map(|n| Check::fail(name(n), format!("error: {e}"))));
            return out;
        }
    };
    let basis = form_basis(chart, 1, 2);
    let pullback = zero_on_samples(
        name(names[2]),
        basis
            .iter()
            .filter(|w| w.parity().is_ok_and(|q| q.is_even()))
            .map(|w| Ok(&qa.pullback(w)? - &classical_anchor_pullback(p, w)?)),
    );
    let pairs = basis.iter().flat_map(|f| basis.iter().map(move |g| (f, g)));
    let stride = (basis.len() * basis.len()).div_ceil(DUAL_PAIRS).max(1);
    let pairing = zero_on_samples(
        name(names[3]),
        pairs.step_by(stride).map(|(f, g)| dual_pairing_residual(&qa, f, g)),
    );
    let limit = zero_on_samples(name(names[4]), [dual_classical_limit_residual(p)]);
    vec![fourier, double, pullback, pairing, limit]
}
