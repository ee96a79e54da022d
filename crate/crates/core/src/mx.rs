//! Classical and quantum Mackenzie-Xu transformations between forms and
//! multivector fields, the pairing oracle and the modular cocycle.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::{One, Zero};

use crate::brackets::{divergence, lichnerowicz, PStructure, VolumeData};
use crate::error::{Error, Result};
use crate::hbarops::HbarOp;
use crate::report::Check;
use crate::superalg::{Chart, Coeff, Monomial, Parity, Scalar, SuperPoly, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// From `T*(ΠTM)` (forms side) to `T*(ΠT*M)` (multivector side).
    FormsToMultivectors,
    MultivectorsToForms,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::FormsToMultivectors => Direction::MultivectorsToForms,
            Direction::MultivectorsToForms => Direction::FormsToMultivectors,
        }
    }
}

/// The pair `E = ΠTM`, `E* = ΠT*M` on one chart: fiber `dx^a` paired with `x*_a`.
#[derive(Clone, Debug)]
pub struct DualPair {
    pub chart: Arc<Chart>,
    /// `(x^a, dx^a, x*_a)` for every base coordinate.
    pub triples: Vec<(usize, usize, usize)>,
}

impl DualPair {
    pub fn new(chart: &Arc<Chart>) -> Result<DualPair> {
        let mut triples = Vec::new();
        for x in chart.base() {
            let dx = chart.tangent_of(x).ok_or(Error::MissingStructure("tangent fibers"))?;
            let xs = chart
                .antifiber_of(x)
                .ok_or(Error::MissingStructure("antifiber coordinates"))?;
            triples.push((x, dx, xs));
        }
        Ok(DualPair {
            chart: chart.clone(),
            triples,
        })
    }

    fn momentum(&self, z: usize) -> Result<usize> {
        self.chart
            .momentum_of(z)
            .ok_or(Error::MissingStructure("momenta for the dual pair"))
    }

    pub fn is_even_base(&self) -> bool {
        self.triples.iter().all(|t| self.chart.parity(t.0).is_even())
    }
}

fn sign_odd_plus_one(chart: &Chart, x: usize) -> i64 {
    // (-1)^(ã+1)
    if chart.parity(x).is_odd() {
        1
    } else {
        -1
    }
}

/// The classical transformation as a coordinate substitution on the chart with
/// all momenta. Forms to multivectors: `dx ↦ (-1)^(ã+1) π^a`, `p ↦ -p`,
/// `π_a ↦ x*_a`; the reverse direction is its inverse.
pub fn classical_mx(expr: &SuperPoly, pair: &DualPair, direction: Direction) -> Result<SuperPoly> {
    let chart = &pair.chart;
    let v = |i: usize| SuperPoly::var(chart, i);
    let mut map = HashMap::new();
    for &(x, dx, xs) in &pair.triples {
        let p = pair.momentum(x)?;
        let pi_x_star = pair.momentum(xs)?;
        let pi_dx = pair.momentum(dx)?;
        let s = sign_odd_plus_one(chart, x);
        map.insert(p, -v(p));
        match direction {
            Direction::FormsToMultivectors => {
                if expr.support().iter().any(|&i| i == xs || i == pi_x_star) {
                    return Err(Error::Precondition(format!("`{expr}` is not on the forms side")));
                }
                map.insert(dx, v(pi_x_star).scale_int(s));
                map.insert(pi_dx, v(xs));
            }
            Direction::MultivectorsToForms => {
                if expr.support().iter().any(|&i| i == dx || i == pi_dx) {
                    return Err(Error::Precondition(format!("`{expr}` is not on the multivector side")));
                }
                map.insert(xs, v(pi_dx));
                map.insert(pi_x_star, v(dx).scale_int(s));
            }
        }
    }
    expr.substitute(&map)
}

/// `{A,B}★ + {A★,B★}`, zero for an anti-symplectomorphism.
pub fn anti_symplectic_residual(
    a: &SuperPoly,
    b: &SuperPoly,
    pair: &DualPair,
    direction: Direction,
) -> Result<SuperPoly> {
    use crate::brackets::canonical_poisson;
    let lhs = classical_mx(&canonical_poisson(a, b)?, pair, direction)?;
    let rhs = canonical_poisson(&classical_mx(a, pair, direction)?, &classical_mx(b, pair, direction)?)?;
    Ok(&lhs + &rhs)
}

/// Image of a single generator of the operator algebra.
fn generator_image(pair: &DualPair, vol: &VolumeData, direction: Direction, slot: Slot) -> Result<HbarOp> {
    let chart = &pair.chart;
    let mult = |i: usize| HbarOp::multiplication(&SuperPoly::var(chart, i));
    for &(x, dx, xs) in &pair.triples {
        let s = Scalar::int(sign_odd_plus_one(chart, x));
        match (slot, direction) {
            (Slot::Function(i), _) if i == x => return Ok(mult(x)),
            (Slot::Derivative(i), _) if i == x => {
                // -p̂_x + iħ ∂_a λ
                let dl = vol
                    .log_rho()
                    .derivative(x)
                    .scale(&Scalar::minus_i_hbar(1))
                    .scale_int(-1);
                return HbarOp::p_hat(chart, x).neg().add(&HbarOp::multiplication(&dl));
            }
            (Slot::Function(i), Direction::FormsToMultivectors) if i == dx => {
                return Ok(HbarOp::p_hat(chart, xs).scale(&s))
            }
            (Slot::Derivative(i), Direction::FormsToMultivectors) if i == dx => return Ok(mult(xs)),
            (Slot::Function(i), Direction::MultivectorsToForms) if i == xs => return Ok(HbarOp::p_hat(chart, dx)),
            (Slot::Derivative(i), Direction::MultivectorsToForms) if i == xs => return Ok(mult(dx).scale(&s)),
            _ => {}
        }
    }
    let (kind, i) = match slot {
        Slot::Function(i) => ("coordinate", i),
        Slot::Derivative(i) => ("derivative", i),
    };
    Err(Error::Precondition(format!(
        "{kind} `{}` is not on the source side of the transformation",
        chart.generator(i).name
    )))
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Function(usize),
    Derivative(usize),
}

/// The quantum transformation: generator images extended as an anti-isomorphism,
/// `(AB)★ = (-1)^(AB) B★A★`.
pub fn quantum_mx(a: &HbarOp, pair: &DualPair, vol: &VolumeData, direction: Direction) -> Result<HbarOp> {
    let chart = &pair.chart;
    let mut cache: HashMap<(bool, usize), HbarOp> = HashMap::new();
    let mut image = |slot: Slot| -> Result<HbarOp> {
        let key = match slot {
            Slot::Function(i) => (false, i),
            Slot::Derivative(i) => (true, i),
        };
        if let Some(op) = cache.get(&key) {
            return Ok(op.clone());
        }
        let op = generator_image(pair, vol, direction, slot)?;
        cache.insert(key, op.clone());
        Ok(op)
    };
    let mut out = HbarOp::zero(chart);
    for (m, c) in a.terms() {
        for (cm, s) in c.terms() {
            let mut factors: Vec<Slot> = Vec::new();
            for (i, &e) in cm.exponents().iter().enumerate() {
                factors.extend(std::iter::repeat_n(Slot::Function(i), e as usize));
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                factors.extend(std::iter::repeat_n(Slot::Derivative(i), e as usize));
            }
            let parities: Vec<Parity> = factors
                .iter()
                .map(|f| match *f {
                    Slot::Function(i) | Slot::Derivative(i) => chart.parity(i),
                })
                .collect();
            let mut odd_seen = 0usize;
            let mut negative = false;
            for p in &parities {
                if p.is_odd() {
                    if odd_seen % 2 == 1 {
                        negative = !negative;
                    }
                    odd_seen += 1;
                }
            }
            let mut acc = HbarOp::multiplication(&SuperPoly::constant(chart, s.clone()));
            for f in factors.iter().rev() {
                acc = acc.compose(&image(*f)?)?;
            }
            if negative {
                acc = acc.neg();
            }
            out = out.add(&acc)?;
        }
    }
    Ok(out)
}

/// `δ_ρ` as an operator: `Σ (-1)^ã (∂_a + ∂_a λ) ∘ ∂/∂x*_a`.
pub fn divergence_op(pair: &DualPair, vol: &VolumeData) -> Result<HbarOp> {
    let chart = &pair.chart;
    let mut op = HbarOp::zero(chart);
    for &(x, _, xs) in &pair.triples {
        let s = if chart.parity(x).is_odd() { -1 } else { 1 };
        let d = HbarOp::derivation(chart, x).add(&HbarOp::multiplication(&vol.log_rho().derivative(x)))?;
        op = op.add(&d.compose(&HbarOp::derivation(chart, xs))?.scale(&Scalar::int(s)))?;
    }
    Ok(op)
}

/// The quantum image of `Δ_P`, from the generator rules.
pub fn delta_p_star(p: &PStructure, vol: &VolumeData) -> Result<HbarOp> {
    let pair = DualPair::new(p.chart())?;
    let delta = crate::hbarops::build_delta_p(p)?;
    quantum_mx(&delta, &pair, vol, Direction::FormsToMultivectors)
}

/// `-iħ d_P - iħ δ_ρ(P)`.
pub fn delta_p_star_closed_form(p: &PStructure, vol: &VolumeData) -> Result<HbarOp> {
    crate::hbarops::build_d_dp_unchecked(p, &divergence(p.p(), vol)?)
}

fn binomial(n: u16, k: u16) -> i64 {
    let mut r: i64 = 1;
    for j in 0..k as i64 {
        r = r * (n as i64 - j) / (j + 1);
    }
    r
}

/// `∫ D(dx) D(x*) e^{-(i/ħ) dx^a x*_a} u v` for a form `u` and a multivector `v`.
pub fn fiber_pairing(pair: &DualPair, u: &SuperPoly, v: &SuperPoly) -> Result<SuperPoly> {
    let chart = &pair.chart;
    let mut fiber: Vec<usize> = pair.triples.iter().map(|t| t.1).collect();
    fiber.extend(pair.triples.iter().map(|t| t.2));
    let mut phase = SuperPoly::zero(chart);
    for &(_, dx, xs) in &pair.triples {
        phase = &phase + &(&SuperPoly::var(chart, dx) * &SuperPoly::var(chart, xs));
    }
    let kernel = phase
        .scale(&Scalar::minus_i_hbar(-1))
        .scale_int(-1)
        .exp_nilpotent(Truncation::NONE)?;
    (&(&kernel * u) * v).berezin(&fiber)
}

/// Residual of the pairing law `⟨A(φf), g⟩ = (-1)^(A f) ⟨φf, A★(g)⟩` for a symbolic
/// compactly supported test function `φ(x)`. Derivatives of `φ` are moved onto
/// `ρ` times the fiber integral by parts; the residual is the base polynomial
/// multiplying `φ ρ` under the base integral.
pub fn pairing_adjoint_residual(
    a: &HbarOp,
    a_star: &HbarOp,
    pair: &DualPair,
    vol: &VolumeData,
    f: &SuperPoly,
    g: &SuperPoly,
) -> Result<SuperPoly> {
    if !pair.is_even_base() {
        return Err(Error::Precondition(
            "the pairing oracle needs a purely even base".into(),
        ));
    }
    let chart = &pair.chart;
    let fiber_integral = |u: &SuperPoly, v: &SuperPoly| fiber_pairing(pair, u, v);
    let base: Vec<usize> = pair.triples.iter().map(|t| t.0).collect();

    // A(φ f) = Σ_α ∂^α φ · A_α(f)
    let mut split: BTreeMap<Vec<u16>, HbarOp> = BTreeMap::new();
    for (m, c) in a.terms() {
        let beta: Vec<u16> = base.iter().map(|&x| m.exponent(x)).collect();
        let mut alphas: Vec<Vec<u16>> = vec![Vec::new()];
        for &b in &beta {
            alphas = alphas
                .into_iter()
                .flat_map(|pre| {
                    (0..=b).map(move |k| {
                        let mut v = pre.clone();
                        v.push(k);
                        v
                    })
                })
                .collect();
        }
        for alpha in alphas {
            let mut rest = m.clone();
            let mut factor: i64 = 1;
            let mut order = 0i32;
            for (j, &x) in base.iter().enumerate() {
                factor *= binomial(beta[j], alpha[j]);
                order += alpha[j] as i32;
                rest.set(x, beta[j] - alpha[j]);
            }
            let term = HbarOp::term(c.scale(&Scalar::minus_i_hbar(order)).scale_int(factor), rest);
            let entry = split.entry(alpha).or_insert_with(|| HbarOp::zero(chart));
            *entry = entry.add(&term)?;
        }
    }
    let mut lhs = SuperPoly::zero(chart);
    for (alpha, op) in &split {
        let mut h = fiber_integral(&op.apply(f)?, g)?;
        let mut order = 0;
        for (j, &x) in base.iter().enumerate() {
            for _ in 0..alpha[j] {
                h = &h.derivative(x) + &(&vol.log_rho().derivative(x) * &h);
                order += 1;
            }
        }
        lhs = &lhs + &h.scale_int(if order % 2 == 1 { -1 } else { 1 });
    }
    let sign = if a.parity()?.koszul(f.parity()?) { -1 } else { 1 };
    let rhs = fiber_integral(f, &a_star.apply(g)?)?.scale_int(sign);
    Ok(&lhs - &rhs)
}

/// `Δ_{ρ²}(F) = div_{ρ²}(⟦F,-⟧)` on `ΠT*M` with the volume `ρ(x)² D(x,x*)`,
/// using `div X = Σ_z (-1)^(z(X+1)) ∂_z X^z + X(log ρ²)`. Equals `2δ_ρ(F)`.
pub fn bv_laplacian_of_square(f: &SuperPoly, vol: &VolumeData) -> Result<SuperPoly> {
    use crate::brackets::canonical_schouten;
    let chart = f.chart();
    let positions: Vec<usize> = chart.antifiber_pairs().iter().flat_map(|&(x, xs)| [x, xs]).collect();
    let log_vol = vol.log_rho().scale_int(2);
    let mut out = SuperPoly::zero(chart);
    for (pf, part) in f.homogeneous_parts() {
        let field_parity = pf.flip();
        for &z in &positions {
            let comp = canonical_schouten(&part, &SuperPoly::var(chart, z))?;
            let s = if chart.parity(z).koszul(field_parity.flip()) {
                -1
            } else {
                1
            };
            out = &out + &(&comp.derivative(z).scale_int(s) + &(&comp * &log_vol.derivative(z)));
        }
    }
    Ok(out)
}

/// `δ_ρ(P)`, for P∞ data only.
pub fn modular_cocycle(p: &PStructure, vol: &VolumeData) -> Result<SuperPoly> {
    if !p.is_pinfty() {
        return Err(Error::Precondition(format!("[P,P] = {} is nonzero", p.self_bracket())));
    }
    divergence(p.p(), vol)
}

/// `δ_{e^f ρ}(P) - δ_ρ(P) - d_P(f)`.
pub fn gauge_law_residual(p: &PStructure, vol: &VolumeData, f: &SuperPoly) -> Result<SuperPoly> {
    let shifted = divergence(p.p(), &vol.gauge(f)?)?;
    let plain = divergence(p.p(), vol)?;
    Ok(&(&shifted - &plain) - &lichnerowicz(p, f)?)
}

pub fn check_modular_closed(p: &PStructure, vol: &VolumeData) -> Check {
    let name = "modular_cocycle_closed";
    match modular_cocycle(p, vol).and_then(|m| lichnerowicz(p, &m)) {
        Ok(r) => Check::zero_residual(name, &r),
        Err(e) => Check::fail(name, format!("error: {e}")),
    }
}

/// Exact Gaussian elimination on sparse rows; `None` when inconsistent.
pub(crate) fn solve_linear(mut rows: Vec<(BTreeMap<usize, Coeff>, Coeff)>, unknowns: usize) -> Option<Vec<Coeff>> {
    let mut pivots: Vec<(usize, BTreeMap<usize, Coeff>, Coeff)> = Vec::new();
    while let Some((mut row, mut rhs)) = rows.pop() {
        for (col, prow, prhs) in &pivots {
            if let Some(c) = row.get(col).cloned() {
                for (k, v) in prow {
                    let e = row.entry(*k).or_insert_with(Coeff::zero);
                    *e = e.clone() - c.clone() * v.clone();
                }
                rhs -= c * prhs.clone();
                row.retain(|_, v| !v.is_zero());
            }
        }
        match row.keys().next().copied() {
            None => {
                if !rhs.is_zero() {
                    return None;
                }
            }
            Some(col) => {
                let inv = Coeff::one() / row[&col].clone();
                for v in row.values_mut() {
                    *v = v.clone() * inv.clone();
                }
                rhs *= inv;
                // Keep earlier pivots reduced against the new one.
                for (_, prow, prhs) in pivots.iter_mut() {
                    if let Some(c) = prow.get(&col).cloned() {
                        for (k, v) in &row {
                            let e = prow.entry(*k).or_insert_with(Coeff::zero);
                            *e = e.clone() - c.clone() * v.clone();
                        }
                        *prhs = prhs.clone() - c * rhs.clone();
                        prow.retain(|_, v| !v.is_zero());
                    }
                }
                pivots.push((col, row, rhs));
            }
        }
    }
    let mut x = vec![Coeff::zero(); unknowns];
    for (col, _, rhs) in pivots {
        x[col] = rhs;
    }
    Some(x)
}

/// All monomials in `gens` of total degree at most `bound` with the given parity.
pub fn monomial_basis(chart: &Chart, gens: &[usize], bound: u32, parity: Parity) -> Vec<Monomial> {
    let mut out = vec![Monomial::one(chart.len())];
    for &g in gens {
        let cap = if chart.parity(g).is_odd() { 1 } else { bound };
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..=cap).filter_map(move |e| {
                    let mut m2 = m.clone();
                    m2.set(g, e as u16);
                    (m2.degree() <= bound).then_some(m2)
                })
            })
            .collect();
    }
    out.retain(|m| m.parity(chart) == parity);
    out
}

/// An even `F` of degree at most `degree_bound` in `(x, x*)` with `δ_ρ(P) = d_P(F)`,
/// or `None` when no such polynomial exists at that bound.
pub fn solve_modular_potential(p: &PStructure, vol: &VolumeData, degree_bound: u32) -> Result<Option<SuperPoly>> {
    let target = modular_cocycle(p, vol)?;
    let chart = p.chart();
    if target.is_zero() {
        return Ok(Some(SuperPoly::zero(chart)));
    }
    let gens: Vec<usize> = chart.antifiber_pairs().iter().flat_map(|&(x, xs)| [x, xs]).collect();
    let basis = monomial_basis(chart, &gens, degree_bound, Parity::Even);
    let images: Vec<SuperPoly> = basis
        .iter()
        .map(|m| lichnerowicz(p, &SuperPoly::term(chart, m.clone(), Scalar::one())))
        .collect::<Result<_>>()?;
    let mut eqs: BTreeMap<(Monomial, i32, u32), BTreeMap<usize, Coeff>> = BTreeMap::new();
    for (j, img) in images.iter().enumerate() {
        for (m, s) in img.terms() {
            for (&(h, t), c) in s.terms() {
                eqs.entry((m.clone(), h, t)).or_default().insert(j, c.clone());
            }
        }
    }
    let mut rhs: BTreeMap<(Monomial, i32, u32), Coeff> = BTreeMap::new();
    for (m, s) in target.terms() {
        for (&(h, t), c) in s.terms() {
            rhs.insert((m.clone(), h, t), c.clone());
            eqs.entry((m.clone(), h, t)).or_default();
        }
    }
    let rows: Vec<(BTreeMap<usize, Coeff>, Coeff)> = eqs
        .into_iter()
        .map(|(k, row)| {
            let b = rhs.get(&k).cloned().unwrap_or_else(Coeff::zero);
            (row, b)
        })
        .collect();
    let Some(x) = solve_linear(rows, basis.len()) else {
        return Ok(None);
    };
    let f = SuperPoly::from_terms(
        chart,
        basis
            .into_iter()
            .zip(x)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Scalar::from_coeff(c))),
    );
    debug_assert!((&lichnerowicz(p, &f)? - &target).is_zero());
    Ok(Some(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::{de_rham_hamiltonian, schouten_hamiltonian};
    use crate::corpus::{even_chart, mixed_chart};
    use crate::superalg::parse_poly;

    #[test]
    fn schouten_hamiltonian_maps_to_de_rham() {
        for c in [even_chart(2), mixed_chart()] {
            let pair = DualPair::new(&c).unwrap();
            let hs = schouten_hamiltonian(&c).unwrap();
            let hd = de_rham_hamiltonian(&c).unwrap();
            assert_eq!(classical_mx(&hs, &pair, Direction::MultivectorsToForms).unwrap(), hd);
            assert_eq!(classical_mx(&hd, &pair, Direction::FormsToMultivectors).unwrap(), hs);
        }
    }

    #[test]
    fn generator_images() {
        let c = even_chart(2);
        let pair = DualPair::new(&c).unwrap();
        let vol = VolumeData::new(parse_poly(&c, "x1^2").unwrap()).unwrap();
        let dx1 = HbarOp::multiplication(&parse_poly(&c, "dx1").unwrap());
        let img = quantum_mx(&dx1, &pair, &vol, Direction::FormsToMultivectors).unwrap();
        let x1s = c.index_of("x1_star").unwrap();
        assert_eq!(img, HbarOp::p_hat(&c, x1s).neg());
        let back = quantum_mx(&img, &pair, &vol, Direction::MultivectorsToForms).unwrap();
        assert_eq!(back, dx1);
    }

    #[test]
    fn laplacian_of_square_is_twice_divergence() {
        use crate::corpus::Corpus;
        for c in [even_chart(2), mixed_chart()] {
            let mut k = Corpus::new(5);
            let vol = VolumeData::new(k.base_function(&c, &c.base(), 2)).unwrap();
            let pos: Vec<usize> = c.antifiber_pairs().iter().flat_map(|&(a, b)| [a, b]).collect();
            for _ in 0..6 {
                let f = k.homogeneous(&c, &pos, 3, 3);
                let lhs = bv_laplacian_of_square(&f, &vol).unwrap();
                assert_eq!(lhs, divergence(&f, &vol).unwrap().scale_int(2));
            }
        }
    }

    #[test]
    fn linear_solver() {
        use crate::superalg::coeff;
        let mut r1 = BTreeMap::new();
        r1.insert(0, coeff(1, 1));
        r1.insert(1, coeff(1, 1));
        let mut r2 = BTreeMap::new();
        r2.insert(0, coeff(1, 1));
        r2.insert(1, coeff(-1, 1));
        let x = solve_linear(vec![(r1.clone(), coeff(3, 1)), (r2, coeff(1, 1))], 2).unwrap();
        assert_eq!(x, vec![coeff(2, 1), coeff(1, 1)]);
        assert!(solve_linear(vec![(r1.clone(), coeff(1, 1)), (r1, coeff(2, 1))], 2).is_none());
    }
}
