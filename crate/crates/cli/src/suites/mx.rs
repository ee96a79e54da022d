use superkoszul::brackets::{de_rham_hamiltonian, schouten_hamiltonian};
use superkoszul::hbarops::{check_square_zero, de_rham_op, HbarOp};
use superkoszul::mx::{
    anti_symplectic_residual, classical_mx, delta_p_star, delta_p_star_closed_form, divergence_op,
    pairing_adjoint_residual, quantum_mx, Direction, DualPair,
};
use superkoszul::report::Check;
use superkoszul::superalg::{Parity, Scalar, SuperPoly};
use superkoszul::Result;

use super::symbols::homogeneous_operator;
use super::{check_name, corpus, even_base, form_positions, multivector_positions, samples, zero_on_samples, Suite};
use crate::manifest::Manifest;

/// Classical and quantum transformations between forms and multivectors.
pub struct Mx;

impl Suite for Mx {
    fn name(&self) -> &'static str {
        "mx"
    }

    fn about(&self) -> &'static str {
        "classical and quantum MX transformations, pairing oracle, image of Delta_P"
    }

    fn run(&self, m: &Manifest) -> Vec<Check> {
        let mut out = classical(m);
        out.extend(quantum_rules(m));
        out.extend(images(m));
        out.push(pairing_oracle(m, m.budgets.corpus_size));
        out
    }
}

fn name(c: &str) -> String {
    check_name("mx", c)
}

fn pair_of(m: &Manifest) -> Result<DualPair> {
    DualPair::new(&m.chart)
}

/// Positions and momenta of the forms side: `x, dx, p, π`.
fn forms_cotangent(m: &Manifest) -> Vec<usize> {
    let chart = &m.chart;
    let pos = form_positions(chart);
    let mut out = pos.clone();
    out.extend(pos.iter().filter_map(|&z| chart.momentum_of(z)));
    out
}

/// `H_Sch ↦ H_d`, `P(x, x*) ↦ P(x, π)` and the anti-symplectic property.
pub fn classical(m: &Manifest) -> Vec<Check> {
    let chart = &m.chart;
    let pair = match pair_of(m) {
        Ok(p) => p,
        Err(e) => return vec![Check::fail(name("classical"), format!("error: {e}"))],
    };
    let hamiltonians = zero_on_samples(
        name("classical.schouten_to_de_rham"),
        [(|| {
            let hs = schouten_hamiltonian(chart)?;
            Ok(&classical_mx(&hs, &pair, Direction::MultivectorsToForms)? - &de_rham_hamiltonian(chart)?)
        })()],
    );
    let p_image = zero_on_samples(
        name("classical.p_to_fiber_momenta"),
        [(|| {
            let mut rename = std::collections::HashMap::new();
            for &(_, dx, xs) in &pair.triples {
                let pi = chart.momentum_of(dx).expect("chart has all families");
                rename.insert(xs, SuperPoly::var(chart, pi));
            }
            let image = classical_mx(m.p.p(), &pair, Direction::MultivectorsToForms)?;
            Ok(&image - &m.p.p().substitute(&rename)?)
        })()],
    );
    let gens = forms_cotangent(m);
    let mut k = corpus(m, "mx.classical");
    let deg = m.budgets.corpus_degree.min(2);
    let anti = zero_on_samples(
        name("classical.anti_symplectic"),
        (0..m.budgets.corpus_size).map(|_| {
            let a = k.homogeneous(chart, &gens, deg, 3);
            let b = k.homogeneous(chart, &gens, deg, 3);
            anti_symplectic_residual(&a, &b, &pair, Direction::FormsToMultivectors)
        }),
    );
    vec![hamiltonians, p_image, anti]
}

/// Generator images, involution, anti-homomorphism and the principal symbol.
pub fn quantum_rules(m: &Manifest) -> Vec<Check> {
    let chart = &m.chart;
    let vol = &m.vol;
    let pair = match pair_of(m) {
        Ok(p) => p,
        Err(e) => return vec![Check::fail(name("quantum"), format!("error: {e}"))],
    };
    let fwd = |a: &HbarOp| quantum_mx(a, &pair, vol, Direction::FormsToMultivectors);
    let back = |a: &HbarOp| quantum_mx(a, &pair, vol, Direction::MultivectorsToForms);

    // (dx)★ = -iħ(-1)^(ã+1) ∂/∂x*, (-iħ ∂/∂dx)★ = x*, f(x)★ = f(x),
    // (∂/∂x)★ = -ρ⁻¹ ∘ ∂/∂x ∘ ρ.
    let mut generators: Vec<Result<bool>> = Vec::new();
    for &(x, dx, xs) in &pair.triples {
        let s = chart.parity(x).flip().sign();
        let mult = |i: usize| HbarOp::multiplication(&SuperPoly::var(chart, i));
        generators.push(fwd(&mult(dx)).map(|v| v == HbarOp::p_hat(chart, xs).scale(&Scalar::int(s))));
        generators.push(fwd(&HbarOp::p_hat(chart, dx)).map(|v| v == mult(xs)));
        generators.push(fwd(&mult(x)).map(|v| v == mult(x)));
        let expected = HbarOp::derivation(chart, x)
            .add(&HbarOp::multiplication(&vol.log_rho().derivative(x)))
            .map(|d| d.neg());
        generators.push(fwd(&HbarOp::derivation(chart, x)).and_then(|v| Ok(v == expected?)));
    }
    let generator_check = match generators.iter().position(|r| !matches!(r, Ok(true))) {
        None => Check::pass(name("quantum.generator_images")),
        Some(i) => Check::fail(
            name("quantum.generator_images"),
            format!("rule {i}: {:?}", generators[i]),
        ),
    };

    let positions = form_positions(chart);
    let top = (m.budgets.hbar_order as i32).min(3);
    let mut k = corpus(m, "mx.quantum");
    let n = m.budgets.corpus_size;
    let ops: Vec<(HbarOp, HbarOp)> = (0..n)
        .map(|_| {
            let da = k.int(0, top as i64) as i32;
            let db = k.int(0, (top - da).max(0) as i64) as i32;
            (
                homogeneous_operator(&mut k, chart, &positions, da),
                homogeneous_operator(&mut k, chart, &positions, db),
            )
        })
        .collect();
    let involution = zero_op_samples(
        name("quantum.involution"),
        ops.iter().map(|(a, _)| back(&fwd(a)?)?.sub(a)),
    );
    let anti_hom = zero_op_samples(
        name("quantum.anti_homomorphism"),
        ops.iter().map(|(a, b)| {
            let lhs = fwd(&a.compose(b)?)?;
            let s = if a.parity()?.koszul(b.parity()?) { -1 } else { 1 };
            let rhs = fwd(b)?.compose(&fwd(a)?)?.scale(&Scalar::int(s));
            lhs.sub(&rhs)
        }),
    );
    let symbol = zero_on_samples(
        name("quantum.principal_symbol"),
        ops.iter().map(|(a, _)| {
            let lhs = fwd(a)?.principal_symbol()?;
            Ok(&lhs - &classical_mx(&a.principal_symbol()?, &pair, Direction::FormsToMultivectors)?)
        }),
    );
    vec![generator_check, involution, anti_hom, symbol]
}

fn zero_op_samples(name: String, residuals: impl IntoIterator<Item = Result<HbarOp>>) -> Check {
    for (i, r) in residuals.into_iter().enumerate() {
        match r {
            Ok(op) if op.is_zero() => {}
            Ok(op) => return Check::fail(name, format!("sample {i}: residual {op}")),
            Err(e) => return Check::fail(name, format!("sample {i}: error: {e}")),
        }
    }
    Check::pass(name)
}

/// `(-iħd)★ = (-iħ)² δ_ρ`, `(Δ_P)★ = -iħ d_P - iħ δ_ρ(P)` and its square.
pub fn images(m: &Manifest) -> Vec<Check> {
    let pair = match pair_of(m) {
        Ok(p) => p,
        Err(e) => return vec![Check::fail(name("images"), format!("error: {e}"))],
    };
    let de_rham = zero_op_samples(
        name("images.de_rham_to_divergence"),
        [(|| {
            let d = de_rham_op(&m.chart)?.scale(&Scalar::minus_i_hbar(1));
            let lhs = quantum_mx(&d, &pair, &m.vol, Direction::FormsToMultivectors)?;
            lhs.sub(&divergence_op(&pair, &m.vol)?.scale(&Scalar::minus_i_hbar(2)))
        })()],
    );
    let star = delta_p_star(&m.p, &m.vol);
    let delta = zero_op_samples(
        name("images.delta_p"),
        [star
            .clone()
            .and_then(|s| s.sub(&delta_p_star_closed_form(&m.p, &m.vol)?))],
    );
    let square = if m.p.is_pinfty() {
        match star {
            Ok(s) => check_square_zero(name("images.delta_p_square"), &s),
            Err(e) => Check::fail(name("images.delta_p_square"), format!("error: {e}")),
        }
    } else {
        Check::skipped(name("images.delta_p_square"), "P is not a P-infinity structure")
    };
    vec![de_rham, delta, square]
}

/// The rule-based transformation against the pairing oracle on `n` random
/// homogeneous operators, each tested on a form and a multivector.
pub fn pairing_oracle(m: &Manifest, n: usize) -> Check {
    let name = name("quantum.pairing_oracle");
    let chart = &m.chart;
    if !even_base(chart) {
        return Check::skipped(name, "the pairing oracle needs a purely even base");
    }
    let pair = match pair_of(m) {
        Ok(p) => p,
        Err(e) => return Check::fail(name, format!("error: {e}")),
    };
    let positions = form_positions(chart);
    let mv = multivector_positions(chart);
    let mut k = corpus(m, "mx.oracle");
    let top = (m.budgets.hbar_order as i32).min(2);
    let deg = m.budgets.corpus_degree.min(2);
    let residuals: Vec<Result<SuperPoly>> = (0..n)
        .map(|_| {
            let d = k.int(0, top as i64) as i32;
            let a = homogeneous_operator(&mut k, chart, &positions, d);
            let f = samples(&mut k, chart, &positions, deg, 1).remove(0);
            let parity = if k.coin() { Parity::Even } else { Parity::Odd };
            let g = k.nonzero_poly(chart, &mv, deg, 3, Some(parity));
            let a_star = quantum_mx(&a, &pair, &m.vol, Direction::FormsToMultivectors)?;
            pairing_adjoint_residual(&a, &a_star, &pair, &m.vol, &f, &g)
        })
        .collect();
    zero_on_samples(name, residuals)
}
