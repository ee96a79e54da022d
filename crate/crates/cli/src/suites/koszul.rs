use superkoszul::brackets::{
    bivector_component, check_bv_generates, de_rham, higher_derived_bracket_p, higher_koszul_bracket, koszul_binary,
    DivergenceOp, KoszulBracket, PStructure, SchoutenBracket,
};
use superkoszul::hbarops::{koszul_operator, OpHandle};
use superkoszul::report::Check;
use superkoszul::superalg::SuperPoly;
use superkoszul::Result;

use super::{check_name, corpus, form_positions, multivector_positions, samples, zero_on_samples, Suite};
use crate::manifest::Manifest;

/// Size of the corpus for checks that run over all ordered pairs.
const PAIR_CORPUS: usize = 8;

/// The binary Koszul bracket of forms and the BV generators of the Schouten and
/// Koszul brackets.
pub struct Koszul;

impl Suite for Koszul {
    fn name(&self) -> &'static str {
        "koszul"
    }

    fn about(&self) -> &'static str {
        "Koszul bracket tables, exact forms, BV generating operators"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        let mut out = tables(m);
        out.push(exact_forms(m));
        out.extend(bv_generators(m));
        out
    }
}

fn bivector_only(name: String, p: &PStructure) -> Option<Check> {
    (!p.is_bivector()).then(|| Check::skipped(name, "P is not a bivector"))
}

fn anti(p: &PStructure) -> Vec<usize> {
    p.chart().antifiber_pairs().iter().map(|q| q.1).collect()
}

/// Expected values of the bracket on the generators `x^a`, `dx^a`, as triples
/// `(u, v, [u, v])`.
pub fn generator_table(p: &PStructure) -> Result<Vec<(SuperPoly, SuperPoly, SuperPoly)>> {
    let chart = p.chart();
    let anti = anti(p);
    let mut out = Vec::new();
    for (a, da) in chart.tangent_pairs() {
        for (b, db) in chart.tangent_pairs() {
            let pab = bivector_component(p, a, b)?.restrict_zero(&anti);
            let (xa, xb) = (SuperPoly::var(chart, a), SuperPoly::var(chart, b));
            let (dxa, dxb) = (SuperPoly::var(chart, da), SuperPoly::var(chart, db));
            out.push((xa.clone(), xb, SuperPoly::zero(chart)));
            out.push((xa, dxb.clone(), -pab.clone()));
            out.push((dxa, dxb, de_rham(&pab)?));
        }
    }
    Ok(out)
}

/// The generator table through the bracket extended by Leibniz, and through the
/// binary bracket derived from the Hamiltonian of `P`, which is its negative.
pub fn tables(m: &Manifest) -> Vec<Check> {
    let n = |c: &str| check_name("koszul", c);
    let p = &m.p;
    if let Some(skip) = bivector_only(n("table"), p) {
        return vec![skip, Check::skipped(n("table_from_hamiltonian"), "P is not a bivector")];
    }
    let table = match generator_table(p) {
        Ok(t) => t,
        Err(e) => {
            return vec![
                Check::fail(n("table"), format!("error: {e}")),
                Check::fail(n("table_from_hamiltonian"), format!("error: {e}")),
            ]
        }
    };
    let direct = zero_on_samples(
        n("table"),
        table.iter().map(|(u, v, w)| Ok(&koszul_binary(p, u, v)? - w)),
    );
    let derived = zero_on_samples(
        n("table_from_hamiltonian"),
        table
            .iter()
            .map(|(u, v, w)| Ok(&higher_koszul_bracket(p, &[u.clone(), v.clone()])? + w)),
    );
    vec![direct, derived]
}

/// `[df, dg] = -(-1)^f d{f, g}` with `{f, g}` the binary derived bracket of `P`.
pub fn exact_forms(m: &Manifest) -> Check {
    let name = check_name("koszul", "exact_forms");
    let p = &m.p;
    if let Some(skip) = bivector_only(name.clone(), p) {
        return skip;
    }
    let chart = &m.chart;
    let mut k = corpus(m, "koszul.exact");
    let size = m.budgets.corpus_size;
    let f = samples(&mut k, chart, &chart.base(), m.budgets.corpus_degree, size);
    let g = samples(&mut k, chart, &chart.base(), m.budgets.corpus_degree, size);
    zero_on_samples(
        name,
        (0..size).map(|i| {
            let lhs = koszul_binary(p, &de_rham(&f[i])?, &de_rham(&g[i])?)?;
            let fg = higher_derived_bracket_p(p, &[f[i].clone(), g[i].clone()])?;
            let rhs = de_rham(&fg)?.scale_int(-f[i].parity()?.sign());
            Ok(&lhs - &rhs)
        }),
    )
}

/// The divergence generates the Schouten bracket on multivectors; `-∂_P`
/// generates the Koszul bracket on forms.
pub fn bv_generators(m: &Manifest) -> Vec<Check> {
    let n = |c: &str| check_name("koszul", c);
    let chart = &m.chart;
    let mut k = corpus(m, "koszul.bv");
    let deg = m.budgets.corpus_degree.min(2);
    let mv = samples(&mut k, chart, &multivector_positions(chart), deg, PAIR_CORPUS);
    let mut schouten = check_bv_generates(&DivergenceOp(m.vol.clone()), &SchoutenBracket, &mv);
    schouten.name = n("bv.divergence_generates_schouten");

    let p = &m.p;
    let koszul = if let Some(skip) = bivector_only(n("bv.koszul_operator_generates_koszul"), p) {
        skip
    } else {
        let forms = samples(&mut k, chart, &form_positions(chart), deg, PAIR_CORPUS);
        let mut c = match koszul_operator(p) {
            Ok(op) => check_bv_generates(
                &OpHandle {
                    label: "-koszul_operator".into(),
                    op: op.neg(),
                },
                &KoszulBracket(p.clone()),
                &forms,
            ),
            Err(e) => Check::fail("", format!("error: {e}")),
        };
        c.name = n("bv.koszul_operator_generates_koszul");
        c
    };
    vec![schouten, koszul]
}
