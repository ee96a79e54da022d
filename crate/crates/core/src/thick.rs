//! Thick morphisms, the anchor of a P∞ structure and its dual, and Berezin-kernel
//! quantum pullbacks between the odd tangent and odd cotangent bundles.

use std::collections::HashMap;
use std::sync::Arc;

#[cfg(test)]
use crate::brackets::{de_rham_hamiltonian, koszul_hamiltonian, lichnerowicz_hamiltonian, schouten_hamiltonian};
use crate::brackets::{divergence, lichnerowicz, PStructure, VolumeData};
use crate::error::{Error, Result};
use crate::hbarops::{build_delta_p, HbarOp};
use crate::mx::{fiber_pairing, quantum_mx, Direction, DualPair};
use crate::report::Check;
use crate::superalg::{i_power, Chart, Families, Monomial, Parity, Role, Scalar, SuperPoly, Truncation};

/// Generating function `S(x, q)` of a thick morphism, a polynomial in the source
/// positions and the target momenta.
///
/// Source and target may share position generators when both sit over the same
/// base; `S` is then read with the target momenta as the only momenta present.
#[derive(Clone, Debug)]
pub struct GenFunction {
    s: SuperPoly,
    source: Vec<(usize, usize)>,
    target: Vec<(usize, usize)>,
    momentum_order: u32,
    parity: Parity,
}

impl GenFunction {
    /// `source` and `target` list `(position, conjugate momentum)` pairs.
    pub fn new(
        s: SuperPoly,
        source: Vec<(usize, usize)>,
        target: Vec<(usize, usize)>,
        momentum_order: u32,
    ) -> Result<GenFunction> {
        let mut allowed: Vec<usize> = source.iter().map(|t| t.0).collect();
        allowed.extend(target.iter().map(|t| t.1));
        if !s.depends_only_on(&allowed) {
            return Err(Error::Precondition(format!(
                "generating function `{s}` involves coordinates other than source positions and target momenta"
            )));
        }
        let chart = s.chart().clone();
        for &(x, p) in source.iter().chain(&target) {
            if chart.momentum_of(x) != Some(p) {
                return Err(Error::Precondition(format!(
                    "`{}` is not the momentum of `{}`",
                    chart.generator(p).name,
                    chart.generator(x).name
                )));
            }
        }
        let parity = s.parity()?;
        Ok(GenFunction {
            s,
            source,
            target,
            momentum_order,
            parity,
        })
    }

    /// The thick morphism of an ordinary map `y^i = φ^i(x)`: `S = φ^i(x) q_i`.
    pub fn from_map(
        images: &[(usize, SuperPoly)],
        source: Vec<(usize, usize)>,
        target: Vec<(usize, usize)>,
    ) -> Result<GenFunction> {
        let chart = source
            .first()
            .and_then(|_| images.first().map(|i| i.1.chart().clone()))
            .ok_or_else(|| Error::Precondition("empty map".into()))?;
        let mut s = SuperPoly::zero(&chart);
        for (y, phi) in images {
            let q = chart.momentum_of(*y).ok_or(Error::MissingStructure("target momenta"))?;
            s = &s + &(phi * &SuperPoly::var(&chart, q));
        }
        GenFunction::new(s, source, target, 1)
    }

    pub fn s(&self) -> &SuperPoly {
        &self.s
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.s.chart()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn momentum_order(&self) -> u32 {
        self.momentum_order
    }

    pub fn with_momentum_order(mut self, k: u32) -> GenFunction {
        self.momentum_order = k;
        self
    }

    pub fn source(&self) -> &[(usize, usize)] {
        &self.source
    }

    pub fn target(&self) -> &[(usize, usize)] {
        &self.target
    }

    fn target_momenta(&self) -> Vec<usize> {
        self.target.iter().map(|t| t.1).collect()
    }

    /// `y^i = (-1)^ĩ ∂S/∂q_i`, still depending on `q`.
    fn target_position_images(&self) -> Vec<(usize, SuperPoly)> {
        let chart = self.chart();
        self.target
            .iter()
            .map(|&(y, q)| (y, self.s.derivative(q).scale_int(chart.parity(y).sign())))
            .collect()
    }

    /// `p_a = ∂S/∂x^a` on the source side.
    fn source_momentum_images(&self) -> HashMap<usize, SuperPoly> {
        self.source.iter().map(|&(x, p)| (p, self.s.derivative(x))).collect()
    }

    fn truncate_momenta(&self, f: &SuperPoly) -> SuperPoly {
        let qs = self.target_momenta();
        let chart = f.chart();
        SuperPoly::from_terms(
            chart,
            f.terms()
                .filter(|(m, _)| f.degree_in(m, &qs) <= self.momentum_order)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }
}

/// `Φ*[g](x) = g(y) + S(x,q) - y^i q_i` at the joint fixed point
/// `q = ∂g/∂y(y)`, `y = (-1)^ĩ ∂S/∂q(x,q)`.
///
/// The momenta are weighted by the auxiliary parameter `t` and the fixed point
/// is solved modulo `t^(k+1)` for `k` the momentum order of `S`, then `t = 1`.
pub fn thick_pullback(s: &GenFunction, g: &SuperPoly) -> Result<SuperPoly> {
    if s.parity().is_odd() {
        return Err(Error::Precondition(
            "pullbacks are implemented for even generating functions".into(),
        ));
    }
    let chart = s.chart();
    let ys: Vec<usize> = s.target.iter().map(|t| t.0).collect();
    if !g.depends_only_on(&ys) {
        return Err(Error::Precondition(format!(
            "`{g}` is not a function of the target positions"
        )));
    }
    if !g.is_zero() && g.parity()?.is_odd() {
        return Err(Error::Precondition(format!("`{g}` is odd")));
    }
    let k = s.momentum_order;
    let trunc = Truncation::t(k);
    let t = Scalar::t_power(1);
    let y_of_q = s.target_position_images();
    let dg: Vec<SuperPoly> = ys.iter().map(|&y| g.derivative(y)).collect();

    let mut q_cur: HashMap<usize, SuperPoly> = s.target.iter().map(|&(_, q)| (q, SuperPoly::zero(chart))).collect();
    let steps = k as usize + 2;
    for _ in 0..steps {
        let mut y_cur = HashMap::new();
        for (y, img) in &y_of_q {
            y_cur.insert(*y, img.substitute_truncated(&q_cur, trunc)?);
        }
        let mut q_next = HashMap::new();
        for (&(_, q), d) in s.target.iter().zip(&dg) {
            q_next.insert(q, d.substitute_truncated(&y_cur, trunc)?.scale(&t).truncate(trunc));
        }
        if q_next == q_cur {
            let mut out = &g.substitute_truncated(&y_cur, trunc)? + &s.s.substitute_truncated(&q_cur, trunc)?;
            for &(y, q) in &s.target {
                out = &out - &y_cur[&y].mul_truncated(&q_cur[&q], trunc)?;
            }
            return Ok(out.map_coefficients(Scalar::at_t_one));
        }
        q_cur = q_next;
    }
    Err(Error::NoConvergence(steps))
}

/// `H₁(x, ∂S/∂x) - H₂((-1)^q̃ ∂S/∂q, q)`, truncated at the momentum order of `S`.
pub fn phi_related_residual(h1: &SuperPoly, h2: &SuperPoly, s: &GenFunction) -> Result<SuperPoly> {
    let lhs = h1.substitute(&s.source_momentum_images())?;
    let map: HashMap<usize, SuperPoly> = s.target_position_images().into_iter().collect();
    let rhs = h2.substitute(&map)?;
    Ok(s.truncate_momenta(&(&lhs - &rhs)))
}

pub fn check_phi_related(name: &str, h1: &SuperPoly, h2: &SuperPoly, s: &GenFunction) -> Check {
    Check::from_result(
        name,
        phi_related_residual(h1, h2, s).map(|r| Check::zero_residual(name, &r)),
    )
}

fn anchor_component(p: &PStructure, x: usize) -> Result<SuperPoly> {
    let chart = p.chart();
    let xs = chart
        .antifiber_of(x)
        .ok_or(Error::MissingStructure("antifiber coordinates"))?;
    Ok(p.p().derivative(xs).scale_int(chart.parity(x).sign()))
}

/// `a*(ω)`: the form `ω` with `dx^a ↦ (-1)^ã ∂P/∂x*_a`.
pub fn classical_anchor_pullback(p: &PStructure, omega: &SuperPoly) -> Result<SuperPoly> {
    let chart = p.chart();
    let mut map = HashMap::new();
    let mut allowed = chart.base();
    for (x, dx) in chart.tangent_pairs() {
        map.insert(dx, anchor_component(p, x)?);
        allowed.push(dx);
    }
    if !omega.depends_only_on(&allowed) {
        return Err(Error::Precondition(format!("`{omega}` is not a differential form")));
    }
    omega.substitute(&map)
}

/// `d_P(a*(ω)) - a*(dω)`.
pub fn anchor_chain_residual(p: &PStructure, omega: &SuperPoly) -> Result<SuperPoly> {
    let lhs = lichnerowicz(p, &classical_anchor_pullback(p, omega)?)?;
    let rhs = classical_anchor_pullback(p, &crate::brackets::de_rham(omega)?)?;
    Ok(&lhs - &rhs)
}

struct AnchorSlots {
    base_moms: Vec<(usize, usize)>,
    anti: Vec<(usize, usize, usize)>,
    tangent: Vec<(usize, usize)>,
}

fn anchor_slots(chart: &Chart) -> Result<AnchorSlots> {
    let missing = || Error::MissingStructure("both odd bundles with all momenta");
    let mut out = AnchorSlots {
        base_moms: Vec::new(),
        anti: Vec::new(),
        tangent: Vec::new(),
    };
    for x in chart.base() {
        let p = chart.momentum_of(x).ok_or_else(missing)?;
        let xs = chart.antifiber_of(x).ok_or_else(missing)?;
        let pxs = chart.momentum_of(xs).ok_or_else(missing)?;
        let dx = chart.tangent_of(x).ok_or_else(missing)?;
        let pdx = chart.momentum_of(dx).ok_or_else(missing)?;
        out.base_moms.push((x, p));
        out.anti.push((x, xs, pxs));
        out.tangent.push((dx, pdx));
    }
    Ok(out)
}

/// The anchor `a: ΠT*M → ΠTM` as a thick morphism,
/// `S = x^a q_a + (-1)^ã ∂P/∂x*_a(x,x*) π_a` with `π_a` conjugate to `dx^a`.
pub fn anchor_genfun(p: &PStructure, momentum_order: u32) -> Result<GenFunction> {
    let chart = p.chart().clone();
    let sl = anchor_slots(&chart)?;
    let mut s = SuperPoly::zero(&chart);
    for (&(x, q), &(_, pdx)) in sl.base_moms.iter().zip(&sl.tangent) {
        s = &s + &(&SuperPoly::var(&chart, x) * &SuperPoly::var(&chart, q));
        s = &s + &(&anchor_component(p, x)? * &SuperPoly::var(&chart, pdx));
    }
    let mut source = sl.base_moms.clone();
    source.extend(sl.anti.iter().map(|&(_, xs, pxs)| (xs, pxs)));
    let mut target = sl.base_moms;
    target.extend(sl.tangent);
    GenFunction::new(s, source, target, momentum_order)
}

/// The dual thick morphism `a^∨: ΠT*M ⇸ ΠTM`,
/// `S* = y^a p_a + (-1)^ã ∂P/∂x*_a(y, π) y*_a`.
pub fn dual_genfun(p: &PStructure, momentum_order: u32) -> Result<GenFunction> {
    let chart = p.chart().clone();
    let sl = anchor_slots(&chart)?;
    let mut to_pi = HashMap::new();
    for (&(_, xs, _), &(_, pdx)) in sl.anti.iter().zip(&sl.tangent) {
        to_pi.insert(xs, SuperPoly::var(&chart, pdx));
    }
    let mut s = SuperPoly::zero(&chart);
    for (&(x, q), &(_, xs, _)) in sl.base_moms.iter().zip(&sl.anti) {
        s = &s + &(&SuperPoly::var(&chart, x) * &SuperPoly::var(&chart, q));
        let coeff = anchor_component(p, x)?.substitute(&to_pi)?;
        s = &s + &(&coeff * &SuperPoly::var(&chart, xs));
    }
    let mut source = sl.base_moms.clone();
    source.extend(sl.anti.iter().map(|&(_, xs, pxs)| (xs, pxs)));
    let mut target = sl.base_moms;
    target.extend(sl.tangent);
    GenFunction::new(s, source, target, momentum_order)
}

/// Which odd fiber a kernel slot belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberKind {
    /// `dx`, fibers of `ΠTM`.
    Tangent,
    /// `x*`, fibers of `ΠT*M`.
    Antifiber,
}

impl FiberKind {
    pub fn dual(self) -> FiberKind {
        match self {
            FiberKind::Tangent => FiberKind::Antifiber,
            FiberKind::Antifiber => FiberKind::Tangent,
        }
    }
}

/// Berezin integral operator
/// `f(x, u₂) ↦ N ∫ Du₂ Dw₂ e^{(i/ħ)(S(x,u₁;w₂) - ⟨u₂,w₂⟩)} f(x, u₂)`
/// over odd slots.
///
/// The pairing `⟨u,w⟩` is `dx^a x*_a` with the tangent slot written first,
/// whichever of the two is integrated against the input. For `m` conjugate slots
/// `N = (iħ)^m (-1)^(m(m+1)/2)` when the input is a tangent slot, with an extra
/// `(-1)^m` when it is an antifiber slot; both are fixed by Fourier inversion.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelOperator {
    phase: SuperPoly,
    output: Vec<usize>,
    output_conjugate: Vec<usize>,
    input: Vec<usize>,
    input_conjugate: Vec<usize>,
    output_kind: FiberKind,
    input_kind: FiberKind,
}

impl KernelOperator {
    pub fn new(
        phase: SuperPoly,
        output: Vec<usize>,
        output_conjugate: Vec<usize>,
        input: Vec<usize>,
        input_conjugate: Vec<usize>,
        kinds: (FiberKind, FiberKind),
    ) -> Result<KernelOperator> {
        let chart = phase.chart().clone();
        for &i in output
            .iter()
            .chain(&output_conjugate)
            .chain(&input)
            .chain(&input_conjugate)
        {
            if chart.parity(i).is_even() {
                return Err(Error::EvenIntegration(chart.generator(i).name.clone()));
            }
        }
        if input.len() != input_conjugate.len() || output.len() != output_conjugate.len() {
            return Err(Error::Precondition("unpaired kernel slots".into()));
        }
        let mut allowed: Vec<usize> = chart
            .generators()
            .iter()
            .filter(|g| g.role == Role::Base)
            .map(|g| g.index)
            .collect();
        allowed.extend(&output);
        allowed.extend(&input_conjugate);
        if !phase.depends_only_on(&allowed) {
            return Err(Error::Precondition(format!(
                "kernel phase `{phase}` must depend on base, output and conjugate slots only"
            )));
        }
        Ok(KernelOperator {
            phase,
            output,
            output_conjugate,
            input,
            input_conjugate,
            output_kind: kinds.0,
            input_kind: kinds.1,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.phase.chart()
    }

    pub fn phase(&self) -> &SuperPoly {
        &self.phase
    }

    pub fn input(&self) -> &[usize] {
        &self.input
    }

    pub fn output(&self) -> &[usize] {
        &self.output
    }

    /// `S` with the ħ-corrections dropped.
    pub fn classical_phase(&self) -> SuperPoly {
        self.phase.hbar_zero_part()
    }

    /// Multiply the kernel by `e^{-F}` for `F` on the output slots, i.e. add
    /// `iħF` to the phase.
    pub fn corrected(&self, f: &SuperPoly) -> Result<KernelOperator> {
        let chart = self.chart();
        let mut allowed = chart.base();
        allowed.extend(&self.output);
        if !f.depends_only_on(&allowed) || !f.has_zero_body() {
            return Err(Error::Precondition(format!(
                "correction `{f}` must be a nilpotent function of base and output slots"
            )));
        }
        let mut k = self.clone();
        k.phase = &k.phase + &f.scale(&Scalar::monomial(i_power(1), 1, 0));
        Ok(k)
    }

    fn pairing(&self) -> SuperPoly {
        let chart = self.chart();
        let mut out = SuperPoly::zero(chart);
        for (&u, &w) in self.input.iter().zip(&self.input_conjugate) {
            let (a, b) = match self.input_kind {
                FiberKind::Tangent => (u, w),
                FiberKind::Antifiber => (w, u),
            };
            out = &out + &(&SuperPoly::var(chart, a) * &SuperPoly::var(chart, b));
        }
        out
    }

    fn normalization(&self) -> Scalar {
        let m = self.input_conjugate.len() as i64;
        let mut e = m * (m + 1) / 2;
        if self.input_kind == FiberKind::Antifiber {
            e += m;
        }
        let sign = if e % 2 == 1 { -1 } else { 1 };
        Scalar::monomial(i_power(m) * crate::superalg::coeff(sign, 1), m as i32, 0)
    }

    pub fn kernel(&self) -> Result<SuperPoly> {
        (&self.phase - &self.pairing())
            .scale(&Scalar::minus_i_hbar(-1))
            .exp_nilpotent(Truncation::NONE)
    }

    pub fn apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        self.apply_with_kernel(&self.kernel()?, f)
    }

    fn apply_with_kernel(&self, kernel: &SuperPoly, f: &SuperPoly) -> Result<SuperPoly> {
        let chart = self.chart();
        let mut allowed = chart.base();
        allowed.extend(&self.input);
        if !f.depends_only_on(&allowed) {
            return Err(Error::Precondition(format!(
                "`{f}` is not a function of base and input slots"
            )));
        }
        let mut slots = self.input.clone();
        slots.extend(&self.input_conjugate);
        Ok((kernel * f).berezin(&slots)?.scale(&self.normalization()))
    }

    /// The dual operator between the dual bundles: same phase, output and input
    /// slots replaced by their conjugates.
    pub fn dual(&self) -> KernelOperator {
        KernelOperator {
            phase: self.phase.clone(),
            output: self.input_conjugate.clone(),
            output_conjugate: self.input.clone(),
            input: self.output_conjugate.clone(),
            input_conjugate: self.output.clone(),
            output_kind: self.input_kind.dual(),
            input_kind: self.output_kind.dual(),
        }
    }
}

/// An even-base chart carrying `x`, `x*`, `dx` and second copies `dx_2`, `x*_2`
/// of both fibers, used as the slots of kernels between forms and multivectors.
#[derive(Clone, Debug)]
pub struct KernelChart {
    chart: Arc<Chart>,
    base: Vec<usize>,
    star: Vec<usize>,
    tangent: Vec<usize>,
    tangent2: Vec<usize>,
    star2: Vec<usize>,
}

pub fn second_copy_name(name: &str) -> String {
    format!("{name}_2")
}

impl KernelChart {
    pub fn new(base_names: &[&str]) -> Result<KernelChart> {
        let base: Vec<(&str, Parity)> = base_names.iter().map(|n| (*n, Parity::Even)).collect();
        let std = Chart::standard(
            &base,
            Families {
                antifiber: true,
                tangent: true,
                ..Default::default()
            },
        )?;
        let mut b = Chart::builder();
        for g in std.generators() {
            b = b.generator(&g.name, g.parity, g.role);
        }
        for g in std.generators().iter().filter(|g| g.role != Role::Base) {
            b = b.generator(&second_copy_name(&g.name), g.parity, Role::Auxiliary);
        }
        for x in std.base() {
            let name = &std.generator(x).name;
            b = b
                .link_antifiber(name, &std.generator(std.antifiber_of(x).unwrap()).name)
                .link_tangent(name, &std.generator(std.tangent_of(x).unwrap()).name);
        }
        let chart = b.build()?;
        let idx = |n: &str| chart.index_of(n);
        let mut kc = KernelChart {
            chart: chart.clone(),
            base: Vec::new(),
            star: Vec::new(),
            tangent: Vec::new(),
            tangent2: Vec::new(),
            star2: Vec::new(),
        };
        for x in chart.base() {
            let xs = chart.antifiber_of(x).unwrap();
            let dx = chart.tangent_of(x).unwrap();
            kc.base.push(x);
            kc.star.push(xs);
            kc.tangent.push(dx);
            kc.tangent2.push(idx(&second_copy_name(&chart.generator(dx).name))?);
            kc.star2.push(idx(&second_copy_name(&chart.generator(xs).name))?);
        }
        Ok(kc)
    }

    /// Slots over the base of `chart`, which must be purely even.
    pub fn over(chart: &Chart) -> Result<KernelChart> {
        let base = chart.base();
        if base.iter().any(|&x| chart.parity(x).is_odd()) {
            return Err(Error::Precondition("Berezin kernels need a purely even base".into()));
        }
        let names: Vec<&str> = base.iter().map(|&x| chart.generator(x).name.as_str()).collect();
        KernelChart::new(&names)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// `f(x, dx) ↦ f(x, dx) · N ∫ D(dx_2) D(x*_2) e^{(i/ħ)(dx·x*_2 - dx_2·x*_2)} f(x, dx_2)`,
    /// the kernel of the identity on forms.
    pub fn pairing_kernel(&self) -> Result<KernelOperator> {
        let c = &self.chart;
        let mut phase = SuperPoly::zero(c);
        for (&dx, &ys) in self.tangent.iter().zip(&self.star2) {
            phase = &phase + &(&SuperPoly::var(c, dx) * &SuperPoly::var(c, ys));
        }
        KernelOperator::new(
            phase,
            self.tangent.clone(),
            self.star.clone(),
            self.tangent2.clone(),
            self.star2.clone(),
            (FiberKind::Tangent, FiberKind::Tangent),
        )
    }

    /// Rename `dx` to its second copy.
    pub fn to_second_tangent(&self, f: &SuperPoly) -> Result<SuperPoly> {
        let names: HashMap<String, String> = self
            .tangent
            .iter()
            .map(|&dx| {
                let n = self.chart.generator(dx).name.clone();
                (n.clone(), second_copy_name(&n))
            })
            .collect();
        f.transport(&self.chart, |n| names.get(n).cloned())
    }

    /// Rename the second copy `x*_2` back to `x*`.
    pub fn from_second_star(&self, f: &SuperPoly) -> Result<SuperPoly> {
        let names: HashMap<String, String> = self
            .star
            .iter()
            .map(|&xs| {
                let n = self.chart.generator(xs).name.clone();
                (second_copy_name(&n), n)
            })
            .collect();
        f.transport(&self.chart, |n| names.get(n).cloned())
    }

    pub fn import(&self, f: &SuperPoly) -> Result<SuperPoly> {
        f.transport(&self.chart, |_| None)
    }
}

/// The anchor pullback `a*` and its optional `e^{-F}` correction as a Berezin
/// kernel from forms (`dx_2`) to multivectors (`x*`), and its dual from forms
/// (`dx`) to multivectors (`x*_2`).
#[derive(Clone, Debug)]
pub struct QuantumAnchor {
    source: Arc<Chart>,
    slots: KernelChart,
    kernel: KernelOperator,
    dual: KernelOperator,
    dual_kernel: SuperPoly,
}

impl QuantumAnchor {
    pub fn new(p: &PStructure, correction: Option<&SuperPoly>) -> Result<QuantumAnchor> {
        let source = p.chart().clone();
        let slots = KernelChart::over(&source)?;
        let c = slots.chart.clone();
        let mut phase = SuperPoly::zero(&c);
        for (i, x) in source.base().into_iter().enumerate() {
            let comp = slots.import(&anchor_component(p, x)?)?;
            phase = &phase + &(&comp * &SuperPoly::var(&c, slots.star2[i]));
        }
        let mut kernel = KernelOperator::new(
            phase,
            slots.star.clone(),
            slots.tangent.clone(),
            slots.tangent2.clone(),
            slots.star2.clone(),
            (FiberKind::Antifiber, FiberKind::Tangent),
        )?;
        if let Some(f) = correction {
            kernel = kernel.corrected(&slots.import(f)?)?;
        }
        let dual = kernel.dual();
        let dual_kernel = dual.kernel()?;
        Ok(QuantumAnchor {
            source,
            slots,
            kernel,
            dual,
            dual_kernel,
        })
    }

    pub fn kernel(&self) -> &KernelOperator {
        &self.kernel
    }

    pub fn dual(&self) -> &KernelOperator {
        &self.dual
    }

    pub fn slots(&self) -> &KernelChart {
        &self.slots
    }

    /// `(e^{-F}) a*(ω)` through the kernel.
    pub fn pullback(&self, omega: &SuperPoly) -> Result<SuperPoly> {
        let f = self.slots.to_second_tangent(&self.slots.import(omega)?)?;
        self.kernel.apply(&f)?.transport(&self.source, |_| None)
    }

    /// The dual operator `(e^{-F} a*)★` from forms to multivectors.
    pub fn dual_apply(&self, omega: &SuperPoly) -> Result<SuperPoly> {
        let f = self.slots.import(omega)?;
        let out = self.dual.apply_with_kernel(&self.dual_kernel, &f)?;
        self.slots.from_second_star(&out)?.transport(&self.source, |_| None)
    }
}

/// `(-1)^(f g) ⟨g, L f⟩ - ⟨f, L★ g⟩` for forms `f`, `g`, with `L` the kernel
/// pullback and `L★` its dual.
pub fn dual_pairing_residual(qa: &QuantumAnchor, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
    let pair = DualPair::new(&qa.source)?;
    let sign = if f.parity()?.koszul(g.parity()?) { -1 } else { 1 };
    let lhs = fiber_pairing(&pair, g, &qa.pullback(f)?)?.scale_int(sign);
    let rhs = fiber_pairing(&pair, f, &qa.dual_apply(g)?)?;
    Ok(&lhs - &rhs)
}

/// The classical phase of the dual anchor kernel, read with `x* → π` and
/// `x*_2 → y*`, minus the fiber part of `S*`.
pub fn dual_classical_limit_residual(p: &PStructure) -> Result<SuperPoly> {
    let chart = p.chart().clone();
    let qa = QuantumAnchor::new(p, None)?;
    let kc = &qa.slots;
    let mut rename = HashMap::new();
    for (i, x) in chart.base().into_iter().enumerate() {
        let dx = chart.tangent_of(x).ok_or(Error::MissingStructure("tangent fibers"))?;
        let pi = chart
            .momentum_of(dx)
            .ok_or(Error::MissingStructure("tangent-fiber momenta"))?;
        let xs = chart
            .antifiber_of(x)
            .ok_or(Error::MissingStructure("antifiber coordinates"))?;
        rename.insert(
            kc.chart.generator(kc.star[i]).name.clone(),
            chart.generator(pi).name.clone(),
        );
        rename.insert(
            kc.chart.generator(kc.star2[i]).name.clone(),
            chart.generator(xs).name.clone(),
        );
    }
    let phase = qa
        .dual
        .classical_phase()
        .transport(&chart, |n| rename.get(n).cloned())?;
    let s = dual_genfun(p, 1)?;
    let moms: Vec<usize> = chart.base().iter().filter_map(|&x| chart.momentum_of(x)).collect();
    let fiber_part = &s.s - &s.s.component_of_degree(&moms, 1);
    Ok(&phase - &fiber_part)
}

/// `(a*)★(Δ_P ω) + ħ² δ_ρ((a*)★ ω)` for each form, with `(a*)★` corrected by
/// `e^{-F}` when `F` is given.
pub fn intertwining_residuals(
    p: &PStructure,
    vol: &VolumeData,
    f: Option<&SuperPoly>,
    forms: &[SuperPoly],
) -> Result<Vec<SuperPoly>> {
    let qa = QuantumAnchor::new(p, f)?;
    let delta = build_delta_p(p)?;
    let hbar2 = Scalar::hbar_power(2);
    forms
        .iter()
        .map(|w| {
            let lhs = qa.dual_apply(&delta.apply(w)?)?;
            let rhs = divergence(&qa.dual_apply(w)?, vol)?.scale(&hbar2).scale_int(-1);
            Ok(&lhs - &rhs)
        })
        .collect()
}

/// `δ_ρ(P) - d_P(F)` (or `δ_ρ(P)` without a potential).
pub fn potential_residual(p: &PStructure, vol: &VolumeData, f: Option<&SuperPoly>) -> Result<SuperPoly> {
    let delta = divergence(p.p(), vol)?;
    match f {
        None => Ok(delta),
        Some(f) => Ok(&delta - &lichnerowicz(p, f)?),
    }
}

pub fn check_intertwining(
    name: &str,
    p: &PStructure,
    vol: &VolumeData,
    f: Option<&SuperPoly>,
    forms: &[SuperPoly],
) -> Check {
    if !p.is_pinfty() {
        return Check::fail(name, format!("[P,P] = {} is nonzero", p.self_bracket()));
    }
    let residual = match potential_residual(p, vol, f) {
        Ok(r) => r,
        Err(e) => return Check::fail(name, format!("error: {e}")),
    };
    if !residual.is_zero() {
        return match f {
            None => Check::skipped(
                name,
                format!("modular obstruction: δ_ρ(P) = {residual} is nonzero and no potential F was supplied"),
            ),
            Some(_) => Check::fail(name, format!("δ_ρ(P) - d_P(F) = {residual} is nonzero")),
        };
    }
    match intertwining_residuals(p, vol, f, forms) {
        Ok(rs) => crate::report::all_zero(name, rs.into_iter().map(Ok), |i| format!("form {}", forms[i])),
        Err(e) => Check::fail(name, format!("error: {e}")),
    }
}

/// `(-iħ d_P - iħ d_P(F))(e^{-F} a*ω) - e^{-F} a*(-iħ dω)` for each form.
pub fn corrected_diagram_residuals(p: &PStructure, f: &SuperPoly, forms: &[SuperPoly]) -> Result<Vec<SuperPoly>> {
    let e = f.scale_int(-1).exp_nilpotent(Truncation::NONE)?;
    let dpf = lichnerowicz(p, f)?;
    let mih = Scalar::minus_i_hbar(1);
    forms
        .iter()
        .map(|w| {
            let a = &e * &classical_anchor_pullback(p, w)?;
            let top = &lichnerowicz(p, &a)? + &(&dpf * &a);
            let lhs = top.scale(&mih);
            let rhs = (&e * &classical_anchor_pullback(p, &crate::brackets::de_rham(w)?)?).scale(&mih);
            Ok(&lhs - &rhs)
        })
        .collect()
}

/// `(e^{-F} a*)★` assembled as `(a*)★ ∘ (e^{-F})★` from the generator rules.
pub fn corrected_dual_by_rules(
    p: &PStructure,
    vol: &VolumeData,
    f: &SuperPoly,
    omega: &SuperPoly,
) -> Result<SuperPoly> {
    let pair = DualPair::new(p.chart())?;
    let e = f.scale_int(-1).exp_nilpotent(Truncation::NONE)?;
    let star = quantum_mx(&HbarOp::multiplication(&e), &pair, vol, Direction::MultivectorsToForms)?;
    QuantumAnchor::new(p, None)?.dual_apply(&star.apply(omega)?)
}

/// Forms `x^α dx^I` with `|α| ≤ base_degree` and `|I| ≤ form_degree`.
pub fn form_basis(chart: &Arc<Chart>, base_degree: u32, form_degree: u32) -> Vec<SuperPoly> {
    let base = chart.base();
    let tangent: Vec<usize> = chart.tangent_pairs().iter().map(|t| t.1).collect();
    let mut out = Vec::new();
    for m in crate::mx::monomial_basis(chart, &base, base_degree, Parity::Even) {
        for k in 0..=form_degree {
            for mut dm in monomials_of_degree(chart, &tangent, k) {
                for &b in &base {
                    dm.set(b, m.exponent(b));
                }
                out.push(SuperPoly::term(chart, dm, Scalar::one()));
            }
        }
    }
    out
}

/// Residuals of Fourier inversion on the kernel slots: `K(f₂) - f` for the
/// pairing kernel `K` on forms `x^α dx^I` (`|α| ≤ 1`, `|I| ≤ form_degree`), with
/// `f₂` the form moved to the second tangent copy, then `K★(g) - g₂` on the
/// multivector monomials of degree at most 2, with `g₂` moved to `x*_2`.
pub fn fourier_inversion_residuals(kc: &KernelChart, form_degree: u32) -> Result<Vec<SuperPoly>> {
    let k = kc.pairing_kernel()?;
    let d = k.dual();
    let c = kc.chart();
    let mut forms_gens = c.base();
    forms_gens.extend(kc.tangent.iter().copied());
    let mut out = Vec::new();
    for w in form_basis(c, 1, form_degree) {
        if w.depends_only_on(&forms_gens) {
            out.push(&k.apply(&kc.to_second_tangent(&w)?)? - &w);
        }
    }
    let mut mv_gens = c.base();
    mv_gens.extend(kc.star.iter().copied());
    let rename: HashMap<usize, SuperPoly> = kc
        .star
        .iter()
        .zip(&kc.star2)
        .map(|(&s, &s2)| (s, SuperPoly::var(c, s2)))
        .collect();
    for parity in [Parity::Even, Parity::Odd] {
        for m in crate::mx::monomial_basis(c, &mv_gens, 2, parity) {
            let g = SuperPoly::term(c, m, Scalar::one());
            out.push(&d.apply(&g)? - &g.substitute(&rename)?);
        }
    }
    Ok(out)
}

fn monomials_of_degree(chart: &Chart, gens: &[usize], k: u32) -> Vec<Monomial> {
    let mut out = vec![(Monomial::one(chart.len()), 0usize, 0u32)];
    let mut done = Vec::new();
    while let Some((m, from, d)) = out.pop() {
        if d == k {
            done.push(m);
            continue;
        }
        for (j, &g) in gens.iter().enumerate().skip(from) {
            let mut n = m.clone();
            n.set(g, n.exponent(g) + 1);
            let next = if chart.parity(g).is_odd() { j + 1 } else { j };
            out.push((n, next, d + 1));
        }
    }
    done.sort();
    done
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::even_chart;
    use crate::superalg::parse_poly;

    #[test]
    fn linear_genfun_composes() {
        let c = even_chart(2);
        let x1 = c.index_of("x1").unwrap();
        let x2 = c.index_of("x2").unwrap();
        let p1 = c.momentum_of(x1).unwrap();
        let p2 = c.momentum_of(x2).unwrap();
        let phi = [
            (x1, parse_poly(&c, "x1*x2 + 1").unwrap()),
            (x2, parse_poly(&c, "x2^2").unwrap()),
        ];
        let pairs = vec![(x1, p1), (x2, p2)];
        let s = GenFunction::from_map(&phi, pairs.clone(), pairs).unwrap();
        let g = parse_poly(&c, "x1^2 - 3*x1*x2").unwrap();
        let expected = g.substitute(&phi.iter().cloned().collect::<HashMap<_, _>>()).unwrap();
        assert_eq!(thick_pullback(&s, &g).unwrap(), expected);
    }

    #[test]
    fn constant_genfun_evaluates_at_zero() {
        let c = even_chart(1);
        let x1 = c.index_of("x1").unwrap();
        let pairs = vec![(x1, c.momentum_of(x1).unwrap())];
        let s0 = parse_poly(&c, "x1^3").unwrap();
        let s = GenFunction::new(s0.clone(), pairs.clone(), pairs, 3).unwrap();
        let g = parse_poly(&c, "2 + x1 + x1^2").unwrap();
        assert_eq!(thick_pullback(&s, &g).unwrap(), &s0 + &SuperPoly::int(&c, 2));
    }

    #[test]
    fn pairing_kernel_is_identity() {
        let kc = KernelChart::new(&["x1", "x2"]).unwrap();
        let k = kc.pairing_kernel().unwrap();
        let f = parse_poly(kc.chart(), "x1 + dx1_2*dx2_2 + x2*dx2_2").unwrap();
        let back = parse_poly(kc.chart(), "x1 + dx1*dx2 + x2*dx2").unwrap();
        assert_eq!(k.apply(&f).unwrap(), back);
        assert_eq!(k.dual().dual(), k);
    }

    #[test]
    fn bivector_anchor_raises_indices() {
        let c = even_chart(2);
        let p = PStructure::new(parse_poly(&c, "x1*x2_star*x1_star").unwrap()).unwrap();
        let w = parse_poly(&c, "dx1").unwrap();
        // P^{12} = x1, so dx1 ↦ -P^{12} x2*.
        assert_eq!(
            classical_anchor_pullback(&p, &w).unwrap(),
            parse_poly(&c, "-x1*x2_star").unwrap()
        );
        let f = parse_poly(&c, "x1^2").unwrap();
        assert_eq!(classical_anchor_pullback(&p, &f).unwrap(), f);
    }

    fn case_two() -> (PStructure, VolumeData, SuperPoly) {
        let c = even_chart(3);
        let p = PStructure::new(parse_poly(&c, "x3 + (1 + x3^2)*x2_star*x1_star").unwrap()).unwrap();
        let vol = VolumeData::new(parse_poly(&c, "x1").unwrap()).unwrap();
        let f = parse_poly(&c, "x2_star*x3_star + x3^2*x2_star*x3_star").unwrap();
        assert!(potential_residual(&p, &vol, Some(&f)).unwrap().is_zero());
        (p, vol, f)
    }

    #[test]
    fn anchor_and_dual_are_phi_related() {
        let mut rng = crate::corpus::Corpus::new(11);
        for dim in [2, 3] {
            let c = even_chart(dim);
            for _ in 0..3 {
                let p = rng.pinfty(&c, 2);
                let s = anchor_genfun(&p, 4).unwrap();
                let hdp = lichnerowicz_hamiltonian(&p).unwrap();
                let hd = de_rham_hamiltonian(&c).unwrap();
                assert!(phi_related_residual(&hdp, &hd, &s).unwrap().is_zero(), "{}", p.p());
                let sd = dual_genfun(&p, 4).unwrap();
                let hsch = schouten_hamiltonian(&c).unwrap();
                let hp = koszul_hamiltonian(&p).unwrap().h().clone();
                assert!(phi_related_residual(&hsch, &hp, &sd).unwrap().is_zero(), "{}", p.p());
                assert!(!phi_related_residual(&hsch, &hp.scale_int(-1), &sd).unwrap().is_zero() || hp.is_zero());
            }
        }
    }

    #[test]
    fn anchor_genfun_pulls_back_like_the_anchor() {
        let mut rng = crate::corpus::Corpus::new(5);
        let c = even_chart(3);
        let p = rng.pinfty(&c, 2);
        let s = anchor_genfun(&p, 1).unwrap();
        let qa = QuantumAnchor::new(&p, None).unwrap();
        for w in form_basis(&c, 1, 2)
            .into_iter()
            .filter(|w| w.parity().unwrap().is_even())
        {
            let classical = classical_anchor_pullback(&p, &w).unwrap();
            assert_eq!(thick_pullback(&s, &w).unwrap(), classical);
            assert_eq!(qa.pullback(&w).unwrap(), classical);
            assert!(anchor_chain_residual(&p, &w).unwrap().is_zero());
        }
    }

    #[test]
    fn fourier_inversion_in_low_dimensions() {
        for n in 1..=3 {
            let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let kc = KernelChart::new(&refs).unwrap();
            let rs = fourier_inversion_residuals(&kc, n as u32).unwrap();
            assert!(rs.len() > 4 * n);
            assert!(rs.iter().all(SuperPoly::is_zero));
            let k = kc.pairing_kernel().unwrap();
            assert_eq!(k.dual().dual(), k);
        }
    }

    #[test]
    fn dual_obeys_the_pairing_law() {
        let c = even_chart(2);
        let p = PStructure::new(parse_poly(&c, "(1 + x1)*x2_star*x1_star").unwrap()).unwrap();
        let qa = QuantumAnchor::new(&p, None).unwrap();
        let basis = form_basis(&c, 1, 2);
        let mut nonzero = 0;
        for f in &basis {
            for g in &basis {
                assert!(dual_pairing_residual(&qa, f, g).unwrap().is_zero(), "{f} {g}");
                let pair = DualPair::new(&c).unwrap();
                if !fiber_pairing(&pair, g, &qa.pullback(f).unwrap()).unwrap().is_zero() {
                    nonzero += 1;
                }
            }
        }
        assert!(nonzero > 10);
    }

    #[test]
    fn dual_phase_classical_limit_is_the_dual_genfun() {
        let mut rng = crate::corpus::Corpus::new(3);
        for dim in [2, 3] {
            let p = rng.pinfty(&even_chart(dim), 2);
            assert!(dual_classical_limit_residual(&p).unwrap().is_zero());
        }
    }

    #[test]
    fn intertwines_unimodular_structures() {
        let c = even_chart(3);
        let p = PStructure::new(crate::corpus::so3_lie_poisson(&c)).unwrap();
        let vol = VolumeData::trivial(&c);
        let forms = form_basis(&c, 1, 3);
        let check = check_intertwining("so3", &p, &vol, None, &forms);
        assert!(check.passed(), "{check:?}");
    }

    #[test]
    fn corrected_dual_intertwines_with_potential() {
        let (p, vol, f) = case_two();
        let forms = form_basis(p.chart(), 1, 2);
        let check = check_intertwining("case two", &p, &vol, Some(&f), &forms);
        assert!(check.passed(), "{f}: {check:?}");
        let uncorrected = QuantumAnchor::new(&p, None).unwrap();
        let delta = build_delta_p(&p).unwrap();
        let broken = forms.iter().any(|w| {
            let lhs = uncorrected.dual_apply(&delta.apply(w).unwrap()).unwrap();
            let rhs = divergence(&uncorrected.dual_apply(w).unwrap(), &vol).unwrap();
            !(&lhs + &rhs.scale(&Scalar::hbar_power(2))).is_zero()
        });
        assert!(broken);
        let skipped = check_intertwining("case two", &p, &vol, None, &forms);
        assert!(!skipped.passed() && !skipped.status.is_fail());
        for r in corrected_diagram_residuals(&p, &f, &forms).unwrap() {
            assert!(r.is_zero());
        }
        let qa = QuantumAnchor::new(&p, Some(&f)).unwrap();
        for w in forms.iter().take(12) {
            assert_eq!(
                qa.dual_apply(w).unwrap(),
                corrected_dual_by_rules(&p, &vol, &f, w).unwrap()
            );
        }
    }
}
