use superkoszul::brackets::{
    canonical_poisson, canonical_schouten, de_rham, even_bracket_axioms, higher_koszul_bracket, odd_bracket_axioms,
};
use superkoszul::linfty::{check_higher_jacobi, check_linfty_morphism, BracketFamily, MorphismData, Version};
use superkoszul::report::Check;
use superkoszul::superalg::{Parity, SuperPoly};
use superkoszul::thick::classical_anchor_pullback;

use super::{
    all_generators, check_name, corpus, form_positions, multivector_positions, samples, samples_of_parity,
    zero_on_samples, Suite,
};
use crate::manifest::Manifest;

/// Axioms of the canonical brackets and higher Jacobi identities of the bracket
/// families built from `P`.
pub struct Jacobi;

impl Suite for Jacobi {
    fn name(&self) -> &'static str {
        "jacobi"
    }

    fn about(&self) -> &'static str {
        "Poisson and Schouten axioms, higher Jacobi identities, the anchor as an L-infinity morphism"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        let mut out = bracket_axioms(m);
        out.extend(higher_jacobi(m));
        out.push(anchor_morphism(m));
        out
    }
}

/// Antisymmetry, Leibniz and Jacobi for the even canonical bracket and the
/// symmetric-version odd axioms for the Schouten bracket.
pub fn bracket_axioms(m: &Manifest) -> Vec<Check> {
    let n = |c: &str| check_name("jacobi", c);
    let chart = &m.chart;
    let size = m.budgets.corpus_size;
    let deg = m.budgets.corpus_degree;
    let mut k = corpus(m, "jacobi.axioms");
    let all = all_generators(chart);
    let mv = multivector_positions(chart);
    let labels = ["symmetry", "leibniz", "jacobi"];
    let mut out = Vec::new();

    let t: Vec<[SuperPoly; 3]> = (0..size)
        .map(|_| [0, 1, 2].map(|_| k.homogeneous(chart, &all, deg, 3)))
        .collect();
    let res: Vec<_> = t
        .iter()
        .map(|[a, b, c]| even_bracket_axioms(canonical_poisson, a, b, c))
        .collect();
    for (j, label) in labels.iter().enumerate() {
        out.push(zero_on_samples(
            n(&format!("poisson.{label}")),
            res.iter().map(|r| r.clone().map(|v| v[j].clone())),
        ));
    }

    let t: Vec<[SuperPoly; 3]> = (0..size)
        .map(|_| [0, 1, 2].map(|_| k.homogeneous(chart, &mv, deg, 3)))
        .collect();
    let res: Vec<_> = t
        .iter()
        .map(|[a, b, c]| odd_bracket_axioms(Version::Symmetric, canonical_schouten, a, b, c))
        .collect();
    for (j, label) in labels.iter().enumerate() {
        out.push(zero_on_samples(
            n(&format!("schouten.{label}")),
            res.iter().map(|r| r.clone().map(|v| v[j].clone())),
        ));
    }
    out
}

/// Largest arity at which the Jacobi sums can still be nonzero when brackets of
/// arity above `top` vanish.
fn termination(top: u32) -> usize {
    (2 * top as usize).saturating_sub(1).max(1)
}

/// Higher Jacobi identities of the derived brackets of `P` on base functions and
/// of the higher Koszul brackets on forms, for every arity up to termination.
pub fn higher_jacobi(m: &Manifest) -> Vec<Check> {
    let n = |c: &str| check_name("jacobi", c);
    let p = &m.p;
    if !p.is_pinfty() {
        let reason = format!("P is not a P-infinity structure: [P,P] = {}", p.self_bracket());
        return vec![
            Check::skipped(n("derived_brackets"), reason.clone()),
            Check::skipped(n("koszul_brackets"), reason),
        ];
    }
    let chart = &m.chart;
    let top = p.top_degree();
    let n_max = termination(top);
    let tuples = m.budgets.corpus_size;
    let mut k = corpus(m, "jacobi.higher");
    let functions = samples(&mut k, chart, &chart.base(), m.budgets.corpus_degree, tuples);
    let forms = samples(
        &mut k,
        chart,
        &form_positions(chart),
        m.budgets.corpus_degree.min(2),
        tuples,
    );

    let derived = BracketFamily::from_p(p, top as usize);
    let mut c1 = check_higher_jacobi(&derived, &functions, n_max, tuples);
    c1.name = n("derived_brackets");
    let mut c2 = match BracketFamily::koszul(p, top as usize) {
        Ok(fam) => check_higher_jacobi(&fam, &forms, n_max, tuples.div_ceil(5)),
        Err(e) => Check::fail("", format!("error: {e}")),
    };
    c2.name = n("koszul_brackets");
    vec![c1, c2]
}

/// `a*` from forms with `d` and the binary bracket derived from the Hamiltonian
/// of `P` (the negative of the Koszul bracket) to multivectors with `d_P` and the
/// Schouten bracket, relations `n = 1, 2, 3`.
pub fn anchor_morphism(m: &Manifest) -> Check {
    let name = check_name("jacobi", "anchor_morphism");
    let p = &m.p;
    if !p.is_bivector() || !p.is_pinfty() {
        return Check::skipped(name, "needs a Poisson bivector (P quadratic in x* with [P,P] = 0)");
    }
    let chart = &m.chart;
    let mut k = corpus(m, "jacobi.morphism");
    let forms = samples_of_parity(
        &mut k,
        chart,
        &form_positions(chart),
        m.budgets.corpus_degree.min(2),
        m.budgets.corpus_size,
        Parity::Even,
    );
    let source = BracketFamily::new("de_rham+derived_koszul", Version::Symmetric, chart)
        .with(1, |a| de_rham(&a[0]))
        .with(2, move |a| higher_koszul_bracket(p, a));
    let target = BracketFamily::lichnerowicz_schouten(p);
    let md = MorphismData::new("anchor", &source, &target).with(1, |a| classical_anchor_pullback(p, &a[0]));
    let mut c = check_linfty_morphism(&md, &forms, 3, m.budgets.corpus_size.div_ceil(5));
    c.name = name;
    c
}
