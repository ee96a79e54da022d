use std::sync::Arc;

use superkoszul::corpus::Corpus;
use superkoszul::hbarops::{
    hbar_leibniz_residual, random_operator, symbol_commutator_residual, symbol_product_residual, HbarOp,
};
use superkoszul::report::Check;
use superkoszul::superalg::{Chart, SuperPoly};

use super::{check_name, corpus, form_positions, samples, zero_on_samples, Suite};
use crate::manifest::Manifest;

/// Largest total order `deg A + deg B` of the operator pairs.
pub const SYMBOL_TRUNCATION: i32 = 6;

/// Principal symbols of products and commutators, and the hbar-modified Leibniz
/// rule of the quantum brackets.
pub struct Symbols;

impl Suite for Symbols {
    fn name(&self) -> &'static str {
        "symbols"
    }

    fn about(&self) -> &'static str {
        "symbol of products and commutators, hbar-modified Leibniz rule"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        let mut out = symbol_calculus(m);
        out.push(hbar_leibniz(m));
        out
    }
}

/// A random operator of the given degree with a single parity; the parity part
/// holding the leading term is kept.
pub fn homogeneous_operator(k: &mut Corpus, chart: &Arc<Chart>, positions: &[usize], degree: i32) -> HbarOp {
    loop {
        let terms = 1 + k.int(0, 2) as usize;
        let (even, odd) = random_operator(k, chart, positions, degree, terms).parity_split();
        let pick = if k.coin() { even } else { odd };
        if !pick.is_zero() {
            return pick;
        }
    }
}

fn max_degree(m: &Manifest) -> i32 {
    (m.budgets.hbar_order as i32).min(SYMBOL_TRUNCATION / 2)
}

/// Operator pairs `(A, B)` with `deg A + deg B ≤ 6`.
pub fn operator_pairs(m: &Manifest, tag: &str, n: usize) -> Vec<(HbarOp, HbarOp)> {
    let chart = &m.chart;
    let positions = form_positions(chart);
    let top = max_degree(m);
    let mut k = corpus(m, tag);
    (0..n)
        .map(|_| {
            let da = k.int(0, top as i64) as i32;
            let db = k.int(0, top as i64) as i32;
            (
                homogeneous_operator(&mut k, chart, &positions, da),
                homogeneous_operator(&mut k, chart, &positions, db),
            )
        })
        .collect()
}

/// `symb(AB) = symb(A) symb(B)` and `symb((-iħ)^{-1}[A,B]) = {symb A, symb B}`.
pub fn symbol_calculus(m: &Manifest) -> Vec<Check> {
    let pairs = operator_pairs(m, "symbols.pairs", m.budgets.corpus_size);
    vec![
        zero_on_samples(
            check_name("symbols", "product"),
            pairs.iter().map(|(a, b)| symbol_product_residual(a, b)),
        ),
        zero_on_samples(
            check_name("symbols", "commutator"),
            pairs.iter().map(|(a, b)| symbol_commutator_residual(a, b)),
        ),
    ]
}

/// The hbar-modified Leibniz rule of the quantum brackets `{f_1, …, f_n}_L` for
/// `n = 1, 2, 3`, with `L` a random homogeneous operator.
pub fn hbar_leibniz(m: &Manifest) -> Check {
    let chart = &m.chart;
    let positions = form_positions(chart);
    let mut k = corpus(m, "symbols.leibniz");
    let deg = m.budgets.corpus_degree.min(2);
    let top = max_degree(m).max(1);
    let per_arity = m.budgets.corpus_size.div_ceil(3);
    let mut residuals = Vec::new();
    for n in 1..=3usize {
        for _ in 0..per_arity {
            let d = k.int(1, top as i64) as i32;
            let l = homogeneous_operator(&mut k, chart, &positions, d);
            let args: Vec<SuperPoly> = samples(&mut k, chart, &positions, deg, n + 1);
            residuals.push(hbar_leibniz_residual(&l, &args[..n - 1], &args[n - 1], &args[n]));
        }
    }
    zero_on_samples(check_name("symbols", "hbar_leibniz"), residuals)
}
