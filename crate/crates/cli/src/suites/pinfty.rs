use superkoszul::brackets::{
    bivector_component, canonical_schouten, higher_derived_bracket_p, poisson_functions, PStructure,
};
use superkoszul::report::Check;
use superkoszul::superalg::{laws, Chart, SuperPoly};
use superkoszul::Result;

use super::{all_generators, check_name, corpus, samples, zero_on_samples, Suite};
use crate::manifest::Manifest;

/// `⟦P,P⟧ = 0`, the graded-algebra laws on the manifest chart and the derived
/// brackets of `P` on base functions.
pub struct Pinfty;

impl Suite for Pinfty {
    fn name(&self) -> &'static str {
        "pinfty"
    }

    fn about(&self) -> &'static str {
        "self-bracket of P, graded-algebra laws, derived brackets on functions"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        let n = |c: &str| check_name("pinfty", c);
        let mut out = vec![Check::zero_residual(n("self_bracket"), m.p.self_bracket())];
        out.extend(algebra_laws(m));
        out.extend(derived_brackets(m));
        out
    }
}

/// Supercommutativity, associativity, parity of products, derivation rules and
/// the Berezin conventions on random polynomials over every generator.
pub fn algebra_laws(m: &Manifest) -> Vec<Check> {
    let n = |c: &str| check_name("pinfty", c);
    let chart = &m.chart;
    let gens = all_generators(chart);
    let size = m.budgets.corpus_size;
    let deg = m.budgets.corpus_degree;
    let mut k = corpus(m, "pinfty.algebra");
    let a = samples(&mut k, chart, &gens, deg, size);
    let b = samples(&mut k, chart, &gens, deg, size);
    let c = samples(&mut k, chart, &gens, deg, size);
    let u: Vec<usize> = (0..size).map(|_| *k.pick(&gens)).collect();
    let v: Vec<usize> = (0..size).map(|_| *k.pick(&gens)).collect();
    let odd: Vec<usize> = gens.iter().copied().filter(|&g| chart.parity(g).is_odd()).collect();

    let mut out = vec![
        zero_on_samples(
            n("algebra.supercommutativity"),
            (0..size).map(|i| Ok(laws::supercommutator(&a[i], &b[i]))),
        ),
        zero_on_samples(
            n("algebra.associativity"),
            (0..size).map(|i| Ok(laws::associator(&a[i], &b[i], &c[i]))),
        ),
        zero_on_samples(
            n("algebra.derivation_rule"),
            (0..size).map(|i| Ok(laws::derivative_leibniz(u[i], &a[i], &b[i]))),
        ),
        zero_on_samples(
            n("algebra.derivatives_supercommute"),
            (0..size).map(|i| Ok(laws::derivative_commutator(u[i], v[i], &a[i]))),
        ),
    ];
    let parity = (0..size)
        .map(|i| laws::parity_additivity(&a[i], &b[i]))
        .position(|r| !matches!(r, Ok(true)));
    out.push(match parity {
        None => Check::pass(n("algebra.parity_additivity")),
        Some(i) => Check::fail(
            n("algebra.parity_additivity"),
            format!("sample {i}: {} * {}", a[i], b[i]),
        ),
    });
    out.push(berezin_checks(m, chart, &odd, &a));
    out
}

fn berezin_checks(m: &Manifest, chart: &std::sync::Arc<Chart>, odd: &[usize], a: &[SuperPoly]) -> Check {
    let name = check_name("pinfty", "algebra.berezin");
    if odd.len() < 2 {
        return Check::skipped(name, "the chart has fewer than two odd generators");
    }
    let mut k = corpus(m, "pinfty.berezin");
    let mut residuals: Vec<Result<SuperPoly>> = Vec::new();
    // ∫ Dθ₁ Dθ₂ θ₂θ₁ = 1
    let (t1, t2) = (odd[0], odd[1]);
    let golden = &SuperPoly::var(chart, t2) * &SuperPoly::var(chart, t1);
    residuals.push(golden.berezin(&[t1, t2]).map(|v| &v - &SuperPoly::one(chart)));
    for f in a {
        let s = *k.pick(odd);
        let mut t = *k.pick(odd);
        while t == s {
            t = *k.pick(odd);
        }
        residuals.push(laws::berezin_of_derivative(s, f));
        residuals.push(laws::berezin_swap(s, t, f));
        residuals.push(laws::berezin_normalization(s, &f.restrict_zero(&[s])));
    }
    zero_on_samples(name, residuals)
}

/// Derived brackets of `P` on base functions against direct evaluation from the
/// components of `P`: `{f,g}_P = -{f,g}` and `⟦f,⟦P,g⟧⟧|_{x*=0} = (-1)^f {f,g}`.
pub fn derived_brackets(m: &Manifest) -> Vec<Check> {
    let n = |c: &str| check_name("pinfty", c);
    let chart = &m.chart;
    let p = &m.p;
    let base = chart.base();
    let anti: Vec<usize> = chart.antifiber_pairs().iter().map(|q| q.1).collect();
    let size = m.budgets.corpus_size;
    let mut k = corpus(m, "pinfty.derived");
    let f: Vec<SuperPoly> = (0..size)
        .map(|_| k.homogeneous(chart, &base, m.budgets.corpus_degree, 3))
        .collect();
    let g: Vec<SuperPoly> = (0..size)
        .map(|_| k.homogeneous(chart, &base, m.budgets.corpus_degree, 3))
        .collect();

    let binary = zero_on_samples(
        n("derived.binary_vs_function_bracket"),
        (0..size).map(|i| {
            let hd = higher_derived_bracket_p(p, &[f[i].clone(), g[i].clone()])?;
            Ok(&hd + &poisson_functions(p, &f[i], &g[i])?)
        }),
    );
    let nested = zero_on_samples(
        n("derived.nested_vs_function_bracket"),
        (0..size).map(|i| {
            let inner = canonical_schouten(p.p(), &g[i])?;
            let nested = canonical_schouten(&f[i], &inner)?.restrict_zero(&anti);
            let sign = f[i].parity()?.sign();
            Ok(&nested - &poisson_functions(p, &f[i], &g[i])?.scale_int(sign))
        }),
    );
    vec![binary, nested, generator_table(p, n("derived.generator_values"))]
}

/// `{x^a} = -P^a` and `{x^a,x^b} = -(-1)^ã P^{ab}`, with `P^a` the coefficient in
/// `P^a x*_a` and `P^{ab}` as in `½ P^{ab} x*_b x*_a`.
fn generator_table(p: &PStructure, name: String) -> Check {
    let chart = p.chart();
    let anti: Vec<usize> = chart.antifiber_pairs().iter().map(|q| q.1).collect();
    let mut residuals: Vec<Result<SuperPoly>> = Vec::new();
    for (x, xs) in chart.antifiber_pairs() {
        let xa = SuperPoly::var(chart, x);
        // P^a x*_a: the right derivative, (-1)^(ã+1) times the left one for even P.
        let pa = p
            .p()
            .derivative(xs)
            .restrict_zero(&anti)
            .scale_int(chart.parity(x).flip().sign());
        residuals.push(higher_derived_bracket_p(p, std::slice::from_ref(&xa)).map(|v| &v + &pa));
        for y in chart.base() {
            let xb = SuperPoly::var(chart, y);
            let entry = bivector_component(p, x, y).map(|e| e.restrict_zero(&anti));
            residuals.push(
                higher_derived_bracket_p(p, &[xa.clone(), xb])
                    .and_then(|v| Ok(&v + &entry?.scale_int(chart.parity(x).sign()))),
            );
        }
    }
    zero_on_samples(name, residuals)
}
