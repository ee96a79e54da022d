//! Formal hbar-differential operators in normal form `Σ c_m(z) p̂^m` with
//! `p̂_u = -iħ ∂/∂u` and all coefficients on the left.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::brackets::{canonical_poisson, lichnerowicz, OperatorHandle, PStructure};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::report::Check;
use crate::superalg::{Chart, Monomial, Parity, Scalar, SuperPoly};

/// Default bound on the total degree (hbar exponent plus derivative order).
pub const DEFAULT_TRUNCATION: i32 = 6;

#[derive(Clone, PartialEq, Eq)]
pub struct HbarOp {
    chart: Arc<Chart>,
    /// Derivative multi-index over chart positions to the coefficient on its left.
    terms: BTreeMap<Monomial, SuperPoly>,
}

impl fmt::Debug for HbarOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HbarOp({self})")
    }
}

impl HbarOp {
    pub fn zero(chart: &Arc<Chart>) -> HbarOp {
        HbarOp {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(chart: &Arc<Chart>) -> HbarOp {
        HbarOp::multiplication(&SuperPoly::one(chart))
    }

    /// Left multiplication by `f`.
    pub fn multiplication(f: &SuperPoly) -> HbarOp {
        let mut op = HbarOp::zero(f.chart());
        op.add_term(Monomial::one(f.chart().len()), f.clone());
        op
    }

    /// `p̂_u = -iħ ∂/∂u`.
    pub fn p_hat(chart: &Arc<Chart>, u: usize) -> HbarOp {
        let mut op = HbarOp::zero(chart);
        op.add_term(Monomial::var(chart.len(), u), SuperPoly::one(chart));
        op
    }

    /// `∂/∂u = (-iħ)^{-1} p̂_u`.
    pub fn derivation(chart: &Arc<Chart>, u: usize) -> HbarOp {
        HbarOp::p_hat(chart, u).scale(&Scalar::minus_i_hbar(-1))
    }

    /// `c p̂^m` with the multi-index in chart order.
    pub fn term(coeff: SuperPoly, m: Monomial) -> HbarOp {
        let mut op = HbarOp::zero(coeff.chart());
        op.add_term(m, coeff);
        op
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &SuperPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: SuperPoly) {
        if c.is_zero() {
            return;
        }
        let odd_repeat = m
            .exponents()
            .iter()
            .enumerate()
            .any(|(i, &e)| e > 1 && self.chart.parity(i).is_odd());
        if odd_repeat {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_chart(&self, other: &HbarOp) -> Result<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn add(&self, other: &HbarOp) -> Result<HbarOp> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HbarOp) -> Result<HbarOp> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HbarOp {
        self.scale(&Scalar::int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> HbarOp {
        let mut out = HbarOp::zero(&self.chart);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale(s));
        }
        out
    }

    /// Parity of a homogeneous operator; zero is even.
    pub fn parity(&self) -> Result<Parity> {
        let mut found: Option<Parity> = None;
        for (m, c) in &self.terms {
            let p = c.parity()? + m.parity(&self.chart);
            match found {
                None => found = Some(p),
                Some(q) if q != p => return Err(Error::Inhomogeneous),
                _ => {}
            }
        }
        Ok(found.unwrap_or(Parity::Even))
    }

    pub fn parity_split(&self) -> (HbarOp, HbarOp) {
        let mut even = HbarOp::zero(&self.chart);
        let mut odd = HbarOp::zero(&self.chart);
        for (m, c) in &self.terms {
            let mp = m.parity(&self.chart);
            let (ce, co) = c.parity_split();
            let (to_even, to_odd) = match mp {
                Parity::Even => (ce, co),
                Parity::Odd => (co, ce),
            };
            even.add_term(m.clone(), to_even);
            odd.add_term(m.clone(), to_odd);
        }
        (even, odd)
    }

    fn homogeneous_parts(&self) -> Vec<(Parity, HbarOp)> {
        let (e, o) = self.parity_split();
        [(Parity::Even, e), (Parity::Odd, o)]
            .into_iter()
            .filter(|(_, op)| !op.is_zero())
            .collect()
    }

    /// `p̂_u ∘ self`, normal ordered.
    fn left_p_hat(&self, u: usize) -> HbarOp {
        let chart = &self.chart;
        let pu = chart.parity(u);
        let unit = Monomial::var(chart.len(), u);
        let mut out = HbarOp::zero(chart);
        for (m, c) in &self.terms {
            // p̂_u c = (-1)^(u c) c p̂_u + (-iħ) ∂_u c
            let dc = c.derivative(u).scale(&Scalar::minus_i_hbar(1));
            out.add_term(m.clone(), dc);
            if let Some((mm, neg)) = unit.mul(m, chart) {
                let (ce, co) = c.parity_split();
                let moved = if pu.is_odd() { &ce - &co } else { c.clone() };
                out.add_term(mm, if neg { -moved } else { moved });
            }
        }
        out
    }

    /// Normal-ordered product `self ∘ other`.
    pub fn compose(&self, other: &HbarOp) -> Result<HbarOp> {
        self.check_chart(other)?;
        let chart = &self.chart;
        let mut cache: BTreeMap<Monomial, HbarOp> = BTreeMap::new();
        let mut out = HbarOp::zero(chart);
        for (m, c) in &self.terms {
            let right = match cache.get(m) {
                Some(r) => r.clone(),
                None => {
                    let mut r = other.clone();
                    for u in (0..chart.len()).rev() {
                        for _ in 0..m.exponent(u) {
                            r = r.left_p_hat(u);
                        }
                    }
                    cache.insert(m.clone(), r.clone());
                    r
                }
            };
            for (n, d) in &right.terms {
                out.add_term(n.clone(), c * d);
            }
        }
        Ok(out)
    }

    /// Graded commutator `AB - (-1)^(AB) BA` over homogeneous components.
    pub fn commutator(&self, other: &HbarOp) -> Result<HbarOp> {
        let mut out = HbarOp::zero(&self.chart);
        for (pa, a) in self.homogeneous_parts() {
            for (pb, b) in other.homogeneous_parts() {
                let ab = a.compose(&b)?;
                let ba = b.compose(&a)?;
                let t = if pa.koszul(pb) { ab.add(&ba)? } else { ab.sub(&ba)? };
                out = out.add(&t)?;
            }
        }
        Ok(out)
    }

    /// Apply to a function: `p̂_u f = -iħ ∂_u f`.
    pub fn apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        if !(Arc::ptr_eq(&self.chart, f.chart()) || *self.chart == **f.chart()) {
            return Err(Error::ChartMismatch);
        }
        let mut out = SuperPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            let mut g = f.clone();
            for u in (0..self.chart.len()).rev() {
                for _ in 0..m.exponent(u) {
                    g = g.derivative(u).scale(&Scalar::minus_i_hbar(1));
                }
            }
            out = &out + &(c * &g);
        }
        Ok(out)
    }

    /// Total degree of each stored scalar entry is its hbar exponent plus the
    /// derivative order; entries above `max` are dropped.
    pub fn truncate(&self, max: i32) -> HbarOp {
        let mut out = HbarOp::zero(&self.chart);
        for (m, c) in &self.terms {
            let order = m.degree() as i32;
            let kept = c.map_coefficients(|s| {
                let mut r = Scalar::zero();
                for ((h, t), v) in s.terms() {
                    if h + order <= max {
                        r = r + Scalar::monomial(v.clone(), *h, *t);
                    }
                }
                r
            });
            out.add_term(m.clone(), kept);
        }
        out
    }

    /// The homogeneous component of total degree `n`.
    pub fn degree_component(&self, n: i32) -> HbarOp {
        let mut out = HbarOp::zero(&self.chart);
        for (m, c) in &self.terms {
            let order = m.degree() as i32;
            let kept = c.map_coefficients(|s| {
                let mut r = Scalar::zero();
                for ((h, t), v) in s.terms() {
                    if h + order == n {
                        r = r + Scalar::monomial(v.clone(), *h, *t);
                    }
                }
                r
            });
            out.add_term(m.clone(), kept);
        }
        out
    }

    /// The part of every coefficient with no hbar factor.
    pub fn degree_component_hbar_free(&self) -> HbarOp {
        let mut out = HbarOp::zero(&self.chart);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.hbar_zero_part());
        }
        out
    }

    /// Total degrees present.
    pub fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> = self
            .terms
            .iter()
            .flat_map(|(m, c)| {
                let order = m.degree() as i32;
                c.terms()
                    .flat_map(|(_, s)| s.terms().map(|((h, _), _)| *h).collect::<Vec<_>>())
                    .map(move |h| h + order)
                    .collect::<Vec<_>>()
            })
            .collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    pub fn min_hbar(&self) -> Option<i32> {
        self.terms.values().filter_map(SuperPoly::min_hbar).min()
    }

    /// Principal symbol: `p̂ -> p` with the hbar⁰ part of every coefficient.
    pub fn principal_symbol(&self) -> Result<SuperPoly> {
        let chart = &self.chart;
        let mut out = SuperPoly::zero(chart);
        for (m, c) in &self.terms {
            let mut mono = SuperPoly::one(chart);
            for u in 0..chart.len() {
                if m.exponent(u) == 0 {
                    continue;
                }
                let p = chart
                    .momentum_of(u)
                    .ok_or(Error::MissingStructure("a momentum for every derivative slot"))?;
                mono = &mono * &SuperPoly::var(chart, p).pow(m.exponent(u) as u32);
            }
            out = &out + &(&c.hbar_zero_part() * &mono);
        }
        Ok(out)
    }
}

impl fmt::Display for HbarOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut hats = Vec::new();
            for (u, &e) in m.exponents().iter().enumerate() {
                let name = &self.chart.generator(u).name;
                match e {
                    0 => {}
                    1 => hats.push(format!("D[{name}]")),
                    _ => hats.push(format!("D[{name}]^{e}")),
                }
            }
            if hats.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", hats.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `[…[L, f_1], …, f_n]` with multiplication operators.
pub fn nested_commutator(l: &HbarOp, args: &[SuperPoly]) -> Result<HbarOp> {
    let mut acc = l.clone();
    for f in args {
        acc = acc.commutator(&HbarOp::multiplication(f))?;
    }
    Ok(acc)
}

/// `(-iħ)^{-n} […[L,f_1],…,f_n](1)`; a negative hbar power left over is an error.
pub fn quantum_bracket(l: &HbarOp, args: &[SuperPoly]) -> Result<SuperPoly> {
    let n = args.len() as i32;
    let c = nested_commutator(l, args)?;
    let v = c.apply(&SuperPoly::one(l.chart()))?.scale(&Scalar::minus_i_hbar(-n));
    match v.min_hbar() {
        Some(h) if h < 0 => Err(Error::Divisibility {
            order: n as u32,
            exponent: h,
        }),
        _ => Ok(v),
    }
}

/// The quantum bracket reduced modulo hbar.
pub fn classical_bracket(l: &HbarOp, args: &[SuperPoly]) -> Result<SuperPoly> {
    Ok(quantum_bracket(l, args)?.hbar_zero_part())
}

/// `(-iħ)^{-1} d = Σ dx^a ∂_a` written as `(-iħ)^{-1} Σ dx^a p̂_a`.
pub fn de_rham_op(chart: &Arc<Chart>) -> Result<HbarOp> {
    let pairs = chart.tangent_pairs();
    if pairs.is_empty() {
        return Err(Error::MissingStructure("a tangent pairing"));
    }
    let mut op = HbarOp::zero(chart);
    for (x, dx) in pairs {
        op = op.add(&HbarOp::multiplication(&SuperPoly::var(chart, dx)).compose(&HbarOp::derivation(chart, x))?)?;
    }
    Ok(op)
}

/// A derivation `Σ_z X(z) ∂_z` over the listed positions.
pub fn vector_field_op(
    chart: &Arc<Chart>,
    positions: &[usize],
    image: impl Fn(usize) -> Result<SuperPoly>,
) -> Result<HbarOp> {
    let mut op = HbarOp::zero(chart);
    for &z in positions {
        op = op.add(&HbarOp::multiplication(&image(z)?).compose(&HbarOp::derivation(chart, z))?)?;
    }
    Ok(op)
}

/// Replace each `x*_a` of a multivector by `scale · p̂_{dx^a}`, where the scale
/// is applied once per replaced factor.
fn multivector_to_fiber_op(p: &PStructure, per_factor: &Scalar) -> Result<HbarOp> {
    let chart = p.chart().clone();
    let pairs = chart.antifiber_pairs();
    let anti: Vec<usize> = pairs.iter().map(|q| q.1).collect();
    let mut op = HbarOp::zero(&chart);
    for (head, rest) in p.p().split_left(&anti) {
        // head is a monomial in x*; move the x-dependent rest to the left.
        let head_parity = head.parity(&chart);
        let mut m = Monomial::one(chart.len());
        let mut k = 0u32;
        for &(x, xs) in &pairs {
            let e = head.exponent(xs);
            if e > 0 {
                let dx = chart.tangent_of(x).ok_or(Error::MissingStructure("tangent fibers"))?;
                m.set(dx, e);
                k += e as u32;
            }
        }
        let mut factor = Scalar::one();
        for _ in 0..k {
            factor = &factor * per_factor;
        }
        let (re, ro) = rest.parity_split();
        let coeff = if head_parity.is_odd() { &re - &ro } else { rest.clone() };
        op = op.add(&HbarOp::term(coeff.scale(&factor), m))?;
    }
    Ok(op)
}

/// `P̂ = P(x, -iħ ∂/∂dx)`.
pub fn p_hat(p: &PStructure) -> Result<HbarOp> {
    multivector_to_fiber_op(p, &Scalar::one())
}

/// Interior product `i(P) = P(x, ∂/∂dx)`.
pub fn interior(p: &PStructure) -> Result<HbarOp> {
    multivector_to_fiber_op(p, &Scalar::minus_i_hbar(-1))
}

/// `Δ_P = -[d, P̂]`.
pub fn build_delta_p(p: &PStructure) -> Result<HbarOp> {
    let d = de_rham_op(p.chart())?;
    Ok(d.commutator(&p_hat(p)?)?.neg())
}

/// Koszul's operator `∂_P = -[d, i(P)]`.
pub fn koszul_operator(p: &PStructure) -> Result<HbarOp> {
    let d = de_rham_op(p.chart())?;
    Ok(d.commutator(&interior(p)?)?.neg())
}

/// `-iħ d_P`, acting on functions of `(x, x*)`.
pub fn lichnerowicz_op(p: &PStructure) -> Result<HbarOp> {
    let chart = p.chart().clone();
    let positions: Vec<usize> = chart.antifiber_pairs().iter().flat_map(|&(x, xs)| [x, xs]).collect();
    let dp = vector_field_op(&chart, &positions, |z| lichnerowicz(p, &SuperPoly::var(&chart, z)))?;
    Ok(dp.scale(&Scalar::minus_i_hbar(1)))
}

/// `D_{d_P} = -iħ d_P - iħ F_0`. Fails when `d_P(F_0) ≠ 0`.
pub fn build_d_dp(p: &PStructure, f0: &SuperPoly) -> Result<HbarOp> {
    if f0.parity()? != Parity::Odd && !f0.is_zero() {
        return Err(Error::Precondition("F0 must be odd".into()));
    }
    let closed = lichnerowicz(p, f0)?;
    if !closed.is_zero() {
        return Err(Error::Precondition(format!(
            "d_P(F0) = {closed} is nonzero, so D_(d_P) does not square to zero"
        )));
    }
    build_d_dp_unchecked(p, f0)
}

/// `-iħ d_P - iħ F_0` without the closedness check.
pub fn build_d_dp_unchecked(p: &PStructure, f0: &SuperPoly) -> Result<HbarOp> {
    let free = HbarOp::multiplication(f0).scale(&Scalar::minus_i_hbar(1));
    lichnerowicz_op(p)?.add(&free)
}

/// An [`HbarOp`] as a runtime operator handle.
pub struct OpHandle {
    pub label: String,
    pub op: HbarOp,
}

impl OperatorHandle for OpHandle {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn parity(&self) -> Parity {
        self.op.parity().unwrap_or(Parity::Odd)
    }
    fn apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        self.op.apply(f)
    }
}

/// A random homogeneous-degree operator: a few terms of derivative order
/// `0..=degree` over `positions`, each coefficient carrying `(-iħ)^(degree - order)`.
pub fn random_operator(
    corpus: &mut Corpus,
    chart: &Arc<Chart>,
    positions: &[usize],
    degree: i32,
    terms: usize,
) -> HbarOp {
    let mut op = HbarOp::zero(chart);
    for t in 0..terms {
        // The first term always has full order so that the degree is attained.
        let order = if t == 0 {
            degree
        } else {
            corpus.int(0, degree as i64) as i32
        };
        let mut m = Monomial::one(chart.len());
        let mut placed = 0;
        while placed < order {
            let u = *corpus.pick(positions);
            if chart.parity(u).is_odd() && m.exponent(u) > 0 {
                if positions.iter().all(|&v| chart.parity(v).is_odd()) && m.degree() as usize >= positions.len() {
                    break;
                }
                continue;
            }
            m.set(u, m.exponent(u) + 1);
            placed += 1;
        }
        let k = m.degree() as i32;
        let coeff = corpus
            .homogeneous(chart, positions, 2, 2)
            .scale(&Scalar::minus_i_hbar(degree - k));
        op = op.add(&HbarOp::term(coeff, m)).expect("same chart");
    }
    op
}

/// `symb(AB) - symb(A) symb(B)`.
pub fn symbol_product_residual(a: &HbarOp, b: &HbarOp) -> Result<SuperPoly> {
    let ab = a.compose(b)?.principal_symbol()?;
    Ok(&ab - &(&a.principal_symbol()? * &b.principal_symbol()?))
}

/// `symb((-iħ)^{-1}[A,B]) - {symb A, symb B}` for homogeneous operators.
pub fn symbol_commutator_residual(a: &HbarOp, b: &HbarOp) -> Result<SuperPoly> {
    let c = a.commutator(b)?;
    if !c.degree_component_hbar_free().is_zero() {
        return Err(Error::Divisibility { order: 1, exponent: 0 });
    }
    let lhs = c.scale(&Scalar::minus_i_hbar(-1)).principal_symbol()?;
    let rhs = canonical_poisson(&a.principal_symbol()?, &b.principal_symbol()?)?;
    Ok(&lhs - &rhs)
}

/// Residual of the hbar-modified Leibniz rule in the last slot:
/// `{f.., gh} - {f.., g}h - (-1)^(g(L+f)) g{f.., h} - (-iħ){f.., g, h}`.
pub fn hbar_leibniz_residual(l: &HbarOp, fs: &[SuperPoly], g: &SuperPoly, h: &SuperPoly) -> Result<SuperPoly> {
    let mut shift = l.parity()?;
    for f in fs {
        shift += f.parity()?;
    }
    let with = |x: SuperPoly| {
        let mut v = fs.to_vec();
        v.push(x);
        v
    };
    let lhs = quantum_bracket(l, &with(g * h))?;
    let t1 = &quantum_bracket(l, &with(g.clone()))? * h;
    let t2 = (g * &quantum_bracket(l, &with(h.clone()))?).scale_int(if g.parity()?.koszul(shift) { -1 } else { 1 });
    let mut v = with(g.clone());
    v.push(h.clone());
    let t3 = quantum_bracket(l, &v)?.scale(&Scalar::minus_i_hbar(1));
    Ok(&(&(&lhs - &t1) - &t2) - &t3)
}

/// Residual of the plain Leibniz rule for the classical brackets (mod hbar).
pub fn classical_leibniz_residual(l: &HbarOp, fs: &[SuperPoly], g: &SuperPoly, h: &SuperPoly) -> Result<SuperPoly> {
    Ok(hbar_leibniz_residual(l, fs, g, h)?.hbar_zero_part())
}

/// Square-zero check for an odd operator.
pub fn check_square_zero(name: impl Into<String>, op: &HbarOp) -> Check {
    let name = name.into();
    match op.compose(op) {
        Ok(sq) if sq.is_zero() => Check::pass(name),
        Ok(sq) => Check::fail(name, format!("square = {sq}")),
        Err(e) => Check::fail(name, format!("error: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::{parse_poly, Families};

    fn chart() -> Arc<Chart> {
        Chart::standard(&[("x", Parity::Even), ("th", Parity::Odd)], Families::all()).unwrap()
    }

    #[test]
    fn heisenberg_relation() {
        let c = chart();
        let x = parse_poly(&c, "x").unwrap();
        let px = HbarOp::p_hat(&c, 0);
        let prod = px.compose(&HbarOp::multiplication(&x)).unwrap();
        let expected = HbarOp::multiplication(&x)
            .compose(&px)
            .unwrap()
            .add(&HbarOp::multiplication(&SuperPoly::constant(
                &c,
                Scalar::minus_i_hbar(1),
            )))
            .unwrap();
        assert_eq!(prod, expected);
        let comm = px.commutator(&HbarOp::multiplication(&x)).unwrap();
        assert_eq!(
            comm,
            HbarOp::multiplication(&SuperPoly::constant(&c, Scalar::minus_i_hbar(1)))
        );
    }

    #[test]
    fn odd_derivative_squares_to_zero() {
        let c = chart();
        let pt = HbarOp::p_hat(&c, 1);
        assert!(pt.compose(&pt).unwrap().is_zero());
    }

    #[test]
    fn symbol_of_de_rham() {
        let c = chart();
        let d = de_rham_op(&c).unwrap().scale(&Scalar::minus_i_hbar(1));
        let expected = parse_poly(&c, "dx*p_x + dth*p_th").unwrap();
        assert_eq!(d.principal_symbol().unwrap(), expected);
    }

    #[test]
    fn composition_is_associative() {
        let c = chart();
        let a = HbarOp::multiplication(&parse_poly(&c, "x^2*th").unwrap())
            .compose(&HbarOp::p_hat(&c, 0))
            .unwrap();
        let b = HbarOp::p_hat(&c, 1).compose(&HbarOp::p_hat(&c, 0)).unwrap();
        let m = HbarOp::multiplication(&parse_poly(&c, "th*x + x_star").unwrap());
        let l = a.compose(&b).unwrap().compose(&m).unwrap();
        let r = a.compose(&b.compose(&m).unwrap()).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn apply_matches_composition() {
        let c = chart();
        let f = parse_poly(&c, "x^3*th + dx").unwrap();
        let a = HbarOp::p_hat(&c, 0).compose(&HbarOp::p_hat(&c, 0)).unwrap();
        let direct = a.apply(&f).unwrap();
        let via = a
            .compose(&HbarOp::multiplication(&f))
            .unwrap()
            .apply(&SuperPoly::one(&c))
            .unwrap();
        assert_eq!(direct, via);
    }
}
