use superkoszul::brackets::{higher_koszul_bracket, koszul_hamiltonian};
use superkoszul::hbarops::{build_delta_p, classical_bracket, koszul_operator};
use superkoszul::report::Check;
use superkoszul::superalg::{Scalar, SuperPoly};
use superkoszul::Result;

use super::{check_name, corpus, form_positions, samples, zero_on_samples, Suite};
use crate::manifest::Manifest;

/// The operator `Δ_P` on forms and the brackets it generates.
pub struct QuantumBrackets;

impl Suite for QuantumBrackets {
    fn name(&self) -> &'static str {
        "quantum-brackets"
    }

    fn about(&self) -> &'static str {
        "square of Delta_P, relation to Koszul's operator, symbol and classical brackets"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        vec![square(m), koszul_relation(m), symbol(m), classical_brackets(m)]
    }
}

fn name(c: &str) -> String {
    check_name("quantum-brackets", c)
}

/// `Δ_P² = 0` exactly when `⟦P,P⟧ = 0`.
pub fn square(m: &Manifest) -> Check {
    let name = name("delta_p.square_zero_iff_pinfty");
    let sq = match build_delta_p(&m.p).and_then(|d| d.compose(&d)) {
        Ok(sq) => sq,
        Err(e) => return Check::fail(name, format!("error: {e}")),
    };
    match (m.p.is_pinfty(), sq.is_zero()) {
        (true, true) | (false, false) => Check::pass(name),
        (true, false) => Check::fail(name, format!("Delta_P^2 = {sq}")),
        (false, true) => Check::fail(name, format!("Delta_P^2 = 0 although [P,P] = {}", m.p.self_bracket())),
    }
}

/// `Δ_P = -ħ² ∂_P` for a bivector.
pub fn koszul_relation(m: &Manifest) -> Check {
    let name = name("delta_p.koszul_operator");
    if !m.p.is_bivector() {
        return Check::skipped(name, "P is not a bivector");
    }
    let sum = build_delta_p(&m.p).and_then(|delta| {
        let dk = koszul_operator(&m.p)?.scale(&Scalar::hbar_power(2));
        delta.add(&dk)
    });
    match sum {
        Ok(s) if s.is_zero() => Check::pass(name),
        Ok(s) => Check::fail(name, format!("Delta_P + hbar^2 koszul_operator = {s}")),
        Err(e) => Check::fail(name, format!("error: {e}")),
    }
}

/// `symb Δ_P = H_P`, the odd Hamiltonian of the higher Koszul brackets.
pub fn symbol(m: &Manifest) -> Check {
    let name = name("delta_p.symbol");
    let r = (|| -> Result<SuperPoly> {
        let s = build_delta_p(&m.p)?.principal_symbol()?;
        Ok(&s - koszul_hamiltonian(&m.p)?.h())
    })();
    zero_on_samples(name, [r])
}

/// Classical brackets of `Δ_P` equal the higher Koszul brackets, arities 0 to 3.
pub fn classical_brackets(m: &Manifest) -> Check {
    let name = name("delta_p.classical_brackets");
    let chart = &m.chart;
    let mut k = corpus(m, "quantum.classical");
    let forms = samples(
        &mut k,
        chart,
        &form_positions(chart),
        m.budgets.corpus_degree.min(2),
        3 * m.budgets.corpus_size,
    );
    let delta = match build_delta_p(&m.p) {
        Ok(d) => d,
        Err(e) => return Check::fail(name, format!("error: {e}")),
    };
    let mut residuals = vec![(|| {
        Ok(&classical_bracket(&delta, &[])? - &higher_koszul_bracket(&m.p, &[])?)
    })()];
    for n in 1..=3 {
        for t in 0..m.budgets.corpus_size {
            let args: Vec<SuperPoly> = (0..n).map(|j| forms[(t * n + j) % forms.len()].clone()).collect();
            residuals.push((|| {
                Ok(&classical_bracket(&delta, &args)? - &higher_koszul_bracket(&m.p, &args)?)
            })());
        }
    }
    zero_on_samples(name, residuals)
}
