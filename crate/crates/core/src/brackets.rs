//! Canonical Poisson and Schouten brackets, derived brackets, Koszul brackets,
//! the Lichnerowicz differential and the divergence operator.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linfty::Version;
use crate::report::Check;
use crate::superalg::{Chart, Parity, Role, Scalar, SuperPoly};

fn require_momenta(chart: &Chart) -> Result<Vec<(usize, usize)>> {
    let pairs = chart.momentum_pairs();
    if pairs.is_empty() {
        return Err(Error::MissingStructure("a momentum pairing"));
    }
    Ok(pairs)
}

fn require_antifibers(chart: &Chart) -> Result<Vec<(usize, usize)>> {
    let pairs = chart.antifiber_pairs();
    if pairs.is_empty() {
        return Err(Error::MissingStructure("an antifiber pairing"));
    }
    Ok(pairs)
}

fn sign(neg: bool) -> i64 {
    if neg {
        -1
    } else {
        1
    }
}

/// Even canonical bracket over every (position, momentum) pair of the chart:
/// `{H,G} = Σ (-1)^(a(H+1)) ∂H/∂p ∂G/∂x - (-1)^(aH) ∂H/∂x ∂G/∂p`.
pub fn canonical_poisson(h: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
    if !Arc::ptr_eq(h.chart(), g.chart()) && **h.chart() != **g.chart() {
        return Err(Error::ChartMismatch);
    }
    let chart = h.chart().clone();
    let pairs = require_momenta(&chart)?;
    let mut out = SuperPoly::zero(&chart);
    for (ph, hh) in h.homogeneous_parts() {
        for &(x, p) in &pairs {
            let a = chart.parity(x);
            let s1 = sign(a.koszul(ph.flip()));
            let s2 = sign(a.koszul(ph));
            let t1 = &hh.derivative(p) * &g.derivative(x);
            let t2 = &hh.derivative(x) * &g.derivative(p);
            out = &(&out + &t1.scale_int(s1)) - &t2.scale_int(s2);
        }
    }
    Ok(out)
}

/// Odd canonical bracket over the `(x^a, x*_a)` pairs:
/// `⟦F,G⟧ = Σ (-1)^(a(F+1)) (∂F/∂x* ∂G/∂x + (-1)^F ∂F/∂x ∂G/∂x*)`.
pub fn canonical_schouten(f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
    if !Arc::ptr_eq(f.chart(), g.chart()) && **f.chart() != **g.chart() {
        return Err(Error::ChartMismatch);
    }
    let chart = f.chart().clone();
    let pairs = require_antifibers(&chart)?;
    let mut out = SuperPoly::zero(&chart);
    for (pf, ff) in f.homogeneous_parts() {
        for &(x, xs) in &pairs {
            let a = chart.parity(x);
            let s = sign(a.koszul(pf.flip()));
            let t1 = &ff.derivative(xs) * &g.derivative(x);
            let t2 = (&ff.derivative(x) * &g.derivative(xs)).scale_int(pf.sign());
            out = &out + &(&t1 + &t2).scale_int(s);
        }
    }
    Ok(out)
}

/// An even multivector `P(x, x*)` together with its self-bracket.
#[derive(Clone, Debug)]
pub struct PStructure {
    p: SuperPoly,
    self_bracket: SuperPoly,
}

impl PStructure {
    pub fn new(p: SuperPoly) -> Result<PStructure> {
        require_antifibers(p.chart())?;
        if p.parity()? != Parity::Even {
            return Err(Error::Precondition("P must be even".into()));
        }
        let chart = p.chart().clone();
        let allowed: Vec<usize> = chart
            .generators()
            .iter()
            .filter(|g| matches!(g.role, Role::Base | Role::Antifiber))
            .map(|g| g.index)
            .collect();
        if !p.depends_only_on(&allowed) {
            return Err(Error::Precondition(
                "P may depend only on base and antifiber generators".into(),
            ));
        }
        let self_bracket = canonical_schouten(&p, &p)?;
        Ok(PStructure { p, self_bracket })
    }

    pub fn p(&self) -> &SuperPoly {
        &self.p
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.p.chart()
    }

    pub fn self_bracket(&self) -> &SuperPoly {
        &self.self_bracket
    }

    pub fn is_pinfty(&self) -> bool {
        self.self_bracket.is_zero()
    }

    /// The part of `x*`-degree `k`.
    pub fn component(&self, k: u32) -> SuperPoly {
        let anti: Vec<usize> = self.chart().antifiber_pairs().iter().map(|p| p.1).collect();
        self.p.component_of_degree(&anti, k)
    }

    pub fn is_bivector(&self) -> bool {
        self.component(2) == self.p
    }

    /// Largest `x*`-degree present.
    pub fn top_degree(&self) -> u32 {
        let anti: Vec<usize> = self.chart().antifiber_pairs().iter().map(|p| p.1).collect();
        self.p.max_degree_in(&anti)
    }
}

/// An odd Hamiltonian `H(x, p)` together with its self-bracket.
#[derive(Clone, Debug)]
pub struct OddHamiltonian {
    h: SuperPoly,
    self_bracket: SuperPoly,
}

impl OddHamiltonian {
    pub fn new(h: SuperPoly) -> Result<OddHamiltonian> {
        if !h.is_zero() && h.parity()? != Parity::Odd {
            return Err(Error::Precondition("H must be odd".into()));
        }
        let self_bracket = canonical_poisson(&h, &h)?;
        Ok(OddHamiltonian { h, self_bracket })
    }

    pub fn h(&self) -> &SuperPoly {
        &self.h
    }

    pub fn self_bracket(&self) -> &SuperPoly {
        &self.self_bracket
    }

    pub fn is_sinfty(&self) -> bool {
        self.self_bracket.is_zero()
    }
}

/// A volume element stored as `λ = log ρ`.
#[derive(Clone, Debug)]
pub struct VolumeData {
    log_rho: SuperPoly,
}

impl VolumeData {
    pub fn new(log_rho: SuperPoly) -> Result<VolumeData> {
        let base = log_rho.chart().base();
        if !log_rho.depends_only_on(&base) {
            return Err(Error::Precondition("log_rho may depend only on base generators".into()));
        }
        if log_rho.parity()? != Parity::Even {
            return Err(Error::Precondition("log_rho must be even".into()));
        }
        Ok(VolumeData { log_rho })
    }

    /// `ρ = 1`.
    pub fn trivial(chart: &Arc<Chart>) -> VolumeData {
        VolumeData {
            log_rho: SuperPoly::zero(chart),
        }
    }

    pub fn log_rho(&self) -> &SuperPoly {
        &self.log_rho
    }

    /// `e^f ρ`.
    pub fn gauge(&self, f: &SuperPoly) -> Result<VolumeData> {
        VolumeData::new(self.log_rho.try_add(f)?)
    }
}

fn base_only(args: &[SuperPoly]) -> Result<()> {
    for a in args {
        if !a.depends_only_on(&a.chart().base()) {
            return Err(Error::Precondition(format!(
                "argument `{a}` depends on fiber or momentum generators"
            )));
        }
    }
    Ok(())
}

/// `⟦…⟦P,f_1⟧,…,f_k⟧` restricted to `x* = 0`.
pub fn higher_derived_bracket_p(p: &PStructure, args: &[SuperPoly]) -> Result<SuperPoly> {
    base_only(args)?;
    let mut acc = p.p().clone();
    for f in args {
        acc = canonical_schouten(&acc, f)?;
    }
    let anti: Vec<usize> = p.chart().antifiber_pairs().iter().map(|q| q.1).collect();
    Ok(acc.restrict_zero(&anti))
}

/// `{…{H,f_1},…,f_k}` restricted to `p = 0` for every momentum of the chart.
pub fn higher_derived_bracket_h(h: &OddHamiltonian, args: &[SuperPoly]) -> Result<SuperPoly> {
    let chart = h.h().chart().clone();
    let momenta: Vec<usize> = require_momenta(&chart)?.iter().map(|q| q.1).collect();
    for a in args {
        if a.support().iter().any(|i| momenta.contains(i)) {
            return Err(Error::Precondition(format!("argument `{a}` depends on momenta")));
        }
    }
    let mut acc = h.h().clone();
    for f in args {
        acc = canonical_poisson(&acc, f)?;
    }
    Ok(acc.restrict_zero(&momenta))
}

/// The odd bracket determined by its values on pairs of generators and the
/// Leibniz rule in each argument:
/// `{F,G} = Σ_{u,v} (-1)^(F v) {v,u} ∂_u F ∂_v G`, for a bracket with the symmetry
/// `{a,b} = (-1)^(ab) {b,a}`.
pub fn odd_bracket_from_table(
    gens: &[usize],
    table: impl Fn(usize, usize) -> Result<SuperPoly>,
    f: &SuperPoly,
    g: &SuperPoly,
) -> Result<SuperPoly> {
    let chart = f.chart().clone();
    let mut out = SuperPoly::zero(&chart);
    let dg: Vec<(usize, SuperPoly)> = gens
        .iter()
        .map(|&v| (v, g.derivative(v)))
        .filter(|(_, d)| !d.is_zero())
        .collect();
    for (pf, ff) in f.homogeneous_parts() {
        for &u in gens {
            let du = ff.derivative(u);
            if du.is_zero() {
                continue;
            }
            for (v, dv) in &dg {
                let entry = table(*v, u)?;
                if entry.is_zero() {
                    continue;
                }
                let s = sign(pf.koszul(chart.parity(*v)));
                out = &out + &(&(&entry * &du) * dv).scale_int(s);
            }
        }
    }
    Ok(out)
}

fn bivector_entry(p: &PStructure, a: usize, b: usize) -> Result<SuperPoly> {
    let chart = p.chart();
    let (xa, xb) = (
        chart.antifiber_of(a).ok_or(Error::MissingStructure("an antifiber"))?,
        chart.antifiber_of(b).ok_or(Error::MissingStructure("an antifiber"))?,
    );
    // P = 1/2 x*_b x*_a P^{ab}: the left derivative ∂_{x*_a} ∂_{x*_b} P reads the
    // coefficient written on the left, which differs by (-1)^(ã+b̃).
    let s = sign(chart.parity(a) != chart.parity(b));
    Ok(p.p().derivative(xb).derivative(xa).scale_int(s))
}

/// `P^{ab}` of a bivector written as `½ x*_b x*_a P^{ab}`, with the coefficient
/// on the right, as a polynomial on the same chart. For an even base this is the
/// same as `½ P^{ab} x*_b x*_a`.
pub fn bivector_component(p: &PStructure, a: usize, b: usize) -> Result<SuperPoly> {
    bivector_entry(p, a, b)
}

/// The binary bracket of base functions read off the bivector part of `P`:
/// `{f,g} = -(-1)^(a(f+1)) P^{ab} ∂_b f ∂_a g`.
pub fn poisson_functions(p: &PStructure, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
    base_only(&[f.clone(), g.clone()])?;
    let chart = p.chart().clone();
    let anti: Vec<usize> = chart.antifiber_pairs().iter().map(|q| q.1).collect();
    let base = chart.base();
    let mut out = SuperPoly::zero(&chart);
    for (pf, ff) in f.homogeneous_parts() {
        for &a in &base {
            let dg = g.derivative(a);
            if dg.is_zero() {
                continue;
            }
            let s = sign(chart.parity(a).koszul(pf.flip()));
            for &b in &base {
                let df = ff.derivative(b);
                if df.is_zero() {
                    continue;
                }
                let pab = bivector_entry(p, a, b)?.restrict_zero(&anti);
                out = &out - &(&(&pab * &df) * &dg).scale_int(s);
            }
        }
    }
    Ok(out)
}

fn homogeneous3(a: &SuperPoly, b: &SuperPoly, c: &SuperPoly) -> Result<(Parity, Parity)> {
    c.parity()?;
    Ok((a.parity()?, b.parity()?))
}

/// Residuals of antisymmetry, the Leibniz rule and the Jacobi identity for an even
/// bracket on homogeneous `a, b, c`:
/// `{a,b} + (-1)^(ab){b,a}`, `{a,bc} - {a,b}c - (-1)^(ab) b{a,c}`,
/// `{a,{b,c}} - {{a,b},c} - (-1)^(ab){b,{a,c}}`.
pub fn even_bracket_axioms(
    br: impl Fn(&SuperPoly, &SuperPoly) -> Result<SuperPoly>,
    a: &SuperPoly,
    b: &SuperPoly,
    c: &SuperPoly,
) -> Result<[SuperPoly; 3]> {
    let (pa, pb) = homogeneous3(a, b, c)?;
    let s = sign(pa.koszul(pb));
    let sym = &br(a, b)? + &br(b, a)?.scale_int(s);
    let leib = &(&br(a, &(b * c))? - &(&br(a, b)? * c)) - &(b * &br(a, c)?).scale_int(s);
    let jac = &(&br(a, &br(b, c)?)? - &br(&br(a, b)?, c)?) - &br(b, &br(a, c)?)?.scale_int(s);
    Ok([sym, leib, jac])
}

/// Residuals of the odd-bracket axioms in either version, on homogeneous
/// `a, b, c`: symmetry, the Leibniz rule
/// `⟦a,bc⟧ - ⟦a,b⟧c - (-1)^((a+1)b) b⟦a,c⟧` and the Jacobi identity.
///
/// Antisymmetric version: `⟦a,b⟧ + (-1)^((a+1)(b+1))⟦b,a⟧` and
/// `⟦a,⟦b,c⟧⟧ - ⟦⟦a,b⟧,c⟧ - (-1)^((a+1)(b+1))⟦b,⟦a,c⟧⟧`.
/// Symmetric version: `⟦a,b⟧ - (-1)^(ab)⟦b,a⟧` and
/// `⟦a,⟦b,c⟧⟧ - (-1)^(a+1)⟦⟦a,b⟧,c⟧ - (-1)^((a+1)(b+1))⟦b,⟦a,c⟧⟧`.
pub fn odd_bracket_axioms(
    version: Version,
    br: impl Fn(&SuperPoly, &SuperPoly) -> Result<SuperPoly>,
    a: &SuperPoly,
    b: &SuperPoly,
    c: &SuperPoly,
) -> Result<[SuperPoly; 3]> {
    let (pa, pb) = homogeneous3(a, b, c)?;
    let shifted = sign(pa.flip().koszul(pb.flip()));
    let sl = sign(pa.flip().koszul(pb));
    let (sym_sign, outer) = match version {
        Version::Antisymmetric => (shifted, 1),
        Version::Symmetric => (-sign(pa.koszul(pb)), pa.flip().sign()),
    };
    let sym = &br(a, b)? + &br(b, a)?.scale_int(sym_sign);
    let leib = &(&br(a, &(b * c))? - &(&br(a, b)? * c)) - &(b * &br(a, c)?).scale_int(sl);
    let jac = &(&br(a, &br(b, c)?)? - &br(&br(a, b)?, c)?.scale_int(outer)) - &br(b, &br(a, c)?)?.scale_int(shifted);
    Ok([sym, leib, jac])
}

/// The de Rham differential on the tangent chart.
pub fn de_rham(f: &SuperPoly) -> Result<SuperPoly> {
    let chart = f.chart().clone();
    let pairs = chart.tangent_pairs();
    if pairs.is_empty() {
        return Err(Error::MissingStructure("a tangent pairing"));
    }
    let mut out = SuperPoly::zero(&chart);
    for (x, dx) in pairs {
        out = &out + &(&SuperPoly::var(&chart, dx) * &f.derivative(x));
    }
    Ok(out)
}

/// The binary Koszul bracket of forms for a bivector `P`, defined on generators by
/// `[x^a,x^b] = 0`, `[x^a,dx^b] = -P^{ab}`, `[dx^a,dx^b] = dP^{ab}` and extended by
/// the Leibniz rule.
pub fn koszul_binary(p: &PStructure, alpha: &SuperPoly, beta: &SuperPoly) -> Result<SuperPoly> {
    if !p.is_bivector() {
        return Err(Error::Precondition("P must be a bivector".into()));
    }
    let chart = p.chart().clone();
    let tangent = chart.tangent_pairs();
    if tangent.is_empty() {
        return Err(Error::MissingStructure("a tangent pairing"));
    }
    let base: Vec<usize> = tangent.iter().map(|t| t.0).collect();
    let dxs: Vec<usize> = tangent.iter().map(|t| t.1).collect();
    let gens: Vec<usize> = base.iter().chain(dxs.iter()).copied().collect();
    let table = |u: usize, v: usize| -> Result<SuperPoly> {
        let ub = base.iter().position(|&b| b == u);
        let vb = base.iter().position(|&b| b == v);
        let ud = dxs.iter().position(|&d| d == u);
        let vd = dxs.iter().position(|&d| d == v);
        match (ub, ud, vb, vd) {
            (Some(_), _, Some(_), _) => Ok(SuperPoly::zero(&chart)),
            (Some(a), _, _, Some(b)) => Ok(-bivector_entry(p, base[a], base[b])?),
            (_, Some(a), Some(b), _) => {
                // [dx^a, x^b] = (-1)^((ã+1)b̃) [x^b, dx^a].
                let pa = chart.parity(base[a]);
                let pb = chart.parity(base[b]);
                let s = sign(pa.flip().koszul(pb));
                Ok((-bivector_entry(p, base[b], base[a])?).scale_int(s))
            }
            (_, Some(a), _, Some(b)) => de_rham(&bivector_entry(p, base[a], base[b])?),
            _ => Ok(SuperPoly::zero(&chart)),
        }
    };
    odd_bracket_from_table(&gens, table, alpha, beta)
}

/// `d_P(F) = ⟦P, F⟧`.
pub fn lichnerowicz(p: &PStructure, f: &SuperPoly) -> Result<SuperPoly> {
    canonical_schouten(p.p(), f)
}

/// `δ_ρ T = Σ_a (-1)^ã (∂_a + ∂_a λ) ∂T/∂x*_a`.
pub fn divergence(t: &SuperPoly, vol: &VolumeData) -> Result<SuperPoly> {
    let chart = t.chart().clone();
    let pairs = require_antifibers(&chart)?;
    let mut out = SuperPoly::zero(&chart);
    for (x, xs) in pairs {
        let dt = t.derivative(xs);
        let term = &dt.derivative(x) + &(&vol.log_rho().derivative(x) * &dt);
        out = &out + &term.scale_int(chart.parity(x).sign());
    }
    Ok(out)
}

/// `H_X = Σ X(z) p_z` for a derivation `X` given by its values on the chart
/// positions, so that `{H_X, f} = X(f)`.
pub fn derivation_hamiltonian(
    chart: &Arc<Chart>,
    positions: &[usize],
    image: impl Fn(usize) -> Result<SuperPoly>,
) -> Result<SuperPoly> {
    let mut out = SuperPoly::zero(chart);
    for &z in positions {
        let p = chart
            .momentum_of(z)
            .ok_or(Error::MissingStructure("a momentum for every position"))?;
        out = &out + &(&image(z)? * &SuperPoly::var(chart, p));
    }
    Ok(out)
}

/// `H_d = dx^a p_a`.
pub fn de_rham_hamiltonian(chart: &Arc<Chart>) -> Result<SuperPoly> {
    let positions: Vec<usize> = chart.tangent_pairs().iter().map(|t| t.0).collect();
    derivation_hamiltonian(chart, &positions, |x| {
        Ok(SuperPoly::var(chart, chart.tangent_of(x).unwrap()))
    })
}

/// Hamiltonian of the Schouten bracket, `(-1)^ã π^a p_a` with `π^a` conjugate to
/// `x*_a`; it satisfies `{{H,F},G} = ⟦F,G⟧`.
pub fn schouten_hamiltonian(chart: &Arc<Chart>) -> Result<SuperPoly> {
    let mut out = SuperPoly::zero(chart);
    for (x, xs) in require_antifibers(chart)? {
        let (px, pxs) = (
            chart.momentum_of(x).ok_or(Error::MissingStructure("base momenta"))?,
            chart
                .momentum_of(xs)
                .ok_or(Error::MissingStructure("antifiber momenta"))?,
        );
        let term = &SuperPoly::var(chart, pxs) * &SuperPoly::var(chart, px);
        out = &out + &term.scale_int(chart.parity(x).sign());
    }
    Ok(out)
}

/// `H_{d_P} = Σ_z ⟦P,z⟧ p_z` over base and antifiber positions.
pub fn lichnerowicz_hamiltonian(p: &PStructure) -> Result<SuperPoly> {
    let chart = p.chart().clone();
    let positions: Vec<usize> = chart.antifiber_pairs().iter().flat_map(|&(x, xs)| [x, xs]).collect();
    derivation_hamiltonian(&chart, &positions, |z| lichnerowicz(p, &SuperPoly::var(&chart, z)))
}

/// `P(x, π)`: the multivector with `x*_a` replaced by the momentum `π_a` conjugate
/// to `dx^a`.
pub fn p_on_tangent_momenta(p: &PStructure) -> Result<SuperPoly> {
    let chart = p.chart().clone();
    let mut map = std::collections::HashMap::new();
    for (x, xs) in chart.antifiber_pairs() {
        let dx = chart.tangent_of(x).ok_or(Error::MissingStructure("tangent fibers"))?;
        let pi = chart
            .momentum_of(dx)
            .ok_or(Error::MissingStructure("tangent-fiber momenta"))?;
        map.insert(xs, SuperPoly::var(&chart, pi));
    }
    p.p().substitute(&map)
}

/// The higher Koszul Hamiltonian `H_P = -{H_d, P(x,π)}` on the cotangent bundle of
/// the odd tangent bundle.
pub fn koszul_hamiltonian(p: &PStructure) -> Result<OddHamiltonian> {
    let hd = de_rham_hamiltonian(p.chart())?;
    let ppi = p_on_tangent_momenta(p)?;
    OddHamiltonian::new(-canonical_poisson(&hd, &ppi)?)
}

/// Higher Koszul brackets of forms: derived brackets of `H_P` at `p = π = 0`.
pub fn higher_koszul_bracket(p: &PStructure, forms: &[SuperPoly]) -> Result<SuperPoly> {
    let h = koszul_hamiltonian(p)?;
    higher_derived_bracket_h(&h, forms)
}

/// An operator acting on polynomials, selected at runtime.
pub trait OperatorHandle: Send + Sync {
    fn name(&self) -> String;
    fn parity(&self) -> Parity;
    fn apply(&self, f: &SuperPoly) -> Result<SuperPoly>;
}

/// A binary bracket, selected at runtime.
pub trait BracketHandle: Send + Sync {
    fn name(&self) -> String;
    fn bracket(&self, a: &SuperPoly, b: &SuperPoly) -> Result<SuperPoly>;
}

pub struct DivergenceOp(pub VolumeData);

impl OperatorHandle for DivergenceOp {
    fn name(&self) -> String {
        "divergence".into()
    }
    fn parity(&self) -> Parity {
        Parity::Odd
    }
    fn apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        divergence(f, &self.0)
    }
}

pub struct ZeroOp;

impl OperatorHandle for ZeroOp {
    fn name(&self) -> String {
        "zero".into()
    }
    fn parity(&self) -> Parity {
        Parity::Odd
    }
    fn apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        Ok(SuperPoly::zero(f.chart()))
    }
}

pub struct SchoutenBracket;

impl BracketHandle for SchoutenBracket {
    fn name(&self) -> String {
        "schouten".into()
    }
    fn bracket(&self, a: &SuperPoly, b: &SuperPoly) -> Result<SuperPoly> {
        canonical_schouten(a, b)
    }
}

pub struct ZeroBracket;

impl BracketHandle for ZeroBracket {
    fn name(&self) -> String {
        "zero".into()
    }
    fn bracket(&self, a: &SuperPoly, _b: &SuperPoly) -> Result<SuperPoly> {
        Ok(SuperPoly::zero(a.chart()))
    }
}

pub struct KoszulBracket(pub PStructure);

impl BracketHandle for KoszulBracket {
    fn name(&self) -> String {
        "koszul".into()
    }
    fn bracket(&self, a: &SuperPoly, b: &SuperPoly) -> Result<SuperPoly> {
        koszul_binary(&self.0, a, b)
    }
}

/// `Δ(ab) - Δ(a)b - (-1)^ã aΔ(b) - [a,b]` for homogeneous `a`.
pub fn bv_residual(op: &dyn OperatorHandle, br: &dyn BracketHandle, a: &SuperPoly, b: &SuperPoly) -> Result<SuperPoly> {
    let mut out = SuperPoly::zero(a.chart());
    for (pa, aa) in a.homogeneous_parts() {
        let lhs = op.apply(&(&aa * b))?;
        let r1 = &op.apply(&aa)? * b;
        let r2 = (&aa * &op.apply(b)?).scale_int(pa.sign());
        let r3 = br.bracket(&aa, b)?;
        out = &out + &(&(&(&lhs - &r1) - &r2) - &r3);
    }
    Ok(out)
}

/// Pass iff the BV relation holds on every ordered pair of the corpus.
pub fn check_bv_generates(op: &dyn OperatorHandle, br: &dyn BracketHandle, corpus: &[SuperPoly]) -> Check {
    let name = format!("bv_generates[{},{}]", op.name(), br.name());
    for a in corpus {
        for b in corpus {
            match bv_residual(op, br, a, b) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => return Check::fail(name, format!("a = {a}, b = {b}: residual {r}")),
                Err(e) => return Check::fail(name, format!("error: {e}")),
            }
        }
    }
    Check::pass(name)
}

/// Scalar multiple helper used by tests and suites.
pub fn scaled(p: &SuperPoly, n: i64, d: i64) -> SuperPoly {
    p.scale(&Scalar::ratio(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::{parse_poly, Families};

    fn chart_xp() -> Arc<Chart> {
        Chart::standard(
            &[("x", Parity::Even), ("y", Parity::Even), ("th", Parity::Odd)],
            Families::all(),
        )
        .unwrap()
    }

    #[test]
    fn poisson_generator_table() {
        let c = chart_xp();
        let p = parse_poly(&c, "p_x").unwrap();
        let x = parse_poly(&c, "x").unwrap();
        assert_eq!(canonical_poisson(&p, &x).unwrap(), SuperPoly::one(&c));
        let f = parse_poly(&c, "x*y").unwrap();
        let g = parse_poly(&c, "y^2*th").unwrap();
        assert!(canonical_poisson(&f, &g).unwrap().is_zero());
    }

    #[test]
    fn schouten_generator_table() {
        let c = chart_xp();
        for (b, expected) in [("x", 1), ("th", -1)] {
            let xs = parse_poly(&c, &format!("{b}_star")).unwrap();
            let xb = parse_poly(&c, b).unwrap();
            assert_eq!(canonical_schouten(&xs, &xb).unwrap(), SuperPoly::int(&c, expected));
        }
    }

    #[test]
    fn schouten_of_vector_field_is_derivation() {
        let c = chart_xp();
        let px = parse_poly(&c, "x*y*x_star + th*th_star").unwrap();
        let f = parse_poly(&c, "x^2*th").unwrap();
        // X = xy ∂_x + th ∂_th applied directly.
        let direct = parse_poly(&c, "2*x^2*y*th + x^2*th").unwrap();
        assert_eq!(canonical_schouten(&px, &f).unwrap(), direct);
    }

    #[test]
    fn divergence_of_euler_field() {
        let c = chart_xp();
        let t = parse_poly(&c, "x*x_star").unwrap();
        let vol = VolumeData::trivial(&c);
        assert_eq!(divergence(&t, &vol).unwrap(), SuperPoly::one(&c));
    }

    #[test]
    fn volume_must_be_base_only() {
        let c = chart_xp();
        assert!(VolumeData::new(parse_poly(&c, "x_star*th_star").unwrap()).is_err());
    }

    #[test]
    fn odd_p_rejected() {
        let c = chart_xp();
        assert!(PStructure::new(parse_poly(&c, "x_star").unwrap()).is_err());
    }
}
