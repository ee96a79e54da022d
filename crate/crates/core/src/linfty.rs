//! Shuffles, Koszul signs, higher Jacobi identities in both L∞ versions, the
//! bracket/Q-field correspondence and L∞-morphism relations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::brackets::{
    canonical_schouten, de_rham, higher_derived_bracket_h, higher_derived_bracket_p, koszul_binary, koszul_hamiltonian,
    lichnerowicz, OddHamiltonian, PStructure,
};
use crate::error::{Error, Result};
use crate::report::Check;
use crate::superalg::{Chart, Parity, Scalar, SuperPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Version {
    /// All brackets odd and graded-symmetric.
    Symmetric,
    /// The k-bracket has parity k mod 2 and is graded-antisymmetric.
    Antisymmetric,
}

/// All `(k,l)`-shuffles of `0..k+l`, in lexicographic order of the first block.
pub fn shuffles(k: usize, l: usize) -> Vec<Vec<usize>> {
    let n = k + l;
    let mut out = Vec::new();
    let mut first = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, first: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if first.len() == k {
            let mut perm = first.clone();
            perm.extend((0..n).filter(|i| !first.contains(i)));
            out.push(perm);
            return;
        }
        for i in start..n {
            first.push(i);
            rec(i + 1, n, k, first, out);
            first.pop();
        }
    }
    rec(0, n, k, &mut first, &mut out);
    out
}

/// Sign of a permutation given as the list of images.
pub fn permutation_sign(perm: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

/// Koszul sign of reordering `a_0..a_{n-1}` into `a_perm[0]..a_perm[n-1]`.
pub fn koszul_sign(perm: &[usize], parities: &[Parity]) -> i64 {
    assert_eq!(perm.len(), parities.len(), "permutation and parity lengths differ");
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && parities[perm[i]].is_odd() && parities[perm[j]].is_odd() {
                s = -s;
            }
        }
    }
    s
}

pub type Bracket<'a> = Box<dyn Fn(&[SuperPoly]) -> Result<SuperPoly> + Send + Sync + 'a>;

/// A finite family of multilinear brackets; missing arities are zero.
pub struct BracketFamily<'a> {
    pub name: String,
    pub version: Version,
    pub chart: Arc<Chart>,
    /// When set, Koszul signs use the parity of the shifted element.
    pub shifted: bool,
    brackets: BTreeMap<usize, Bracket<'a>>,
}

impl<'a> BracketFamily<'a> {
    pub fn new(name: impl Into<String>, version: Version, chart: &Arc<Chart>) -> BracketFamily<'a> {
        BracketFamily {
            name: name.into(),
            version,
            chart: chart.clone(),
            shifted: false,
            brackets: BTreeMap::new(),
        }
    }

    pub fn with(mut self, arity: usize, f: impl Fn(&[SuperPoly]) -> Result<SuperPoly> + Send + Sync + 'a) -> Self {
        self.brackets.insert(arity, Box::new(f));
        self
    }

    pub fn shifted(mut self) -> Self {
        self.shifted = true;
        self
    }

    pub fn arities(&self) -> Vec<usize> {
        self.brackets.keys().copied().collect()
    }

    pub fn bracket(&self, args: &[SuperPoly]) -> Result<SuperPoly> {
        match self.brackets.get(&args.len()) {
            Some(f) => f(args),
            None => Ok(SuperPoly::zero(&self.chart)),
        }
    }

    pub fn degree(&self, a: &SuperPoly) -> Result<Parity> {
        let p = a.parity()?;
        Ok(if self.shifted { p.flip() } else { p })
    }

    /// Derived brackets of an even multivector on base functions, arities `0..=max`.
    /// They form the antisymmetric version with native parities.
    pub fn from_p(p: &'a PStructure, max: usize) -> BracketFamily<'a> {
        let mut fam = BracketFamily::new("derived[P]", Version::Antisymmetric, p.chart());
        for k in 0..=max {
            fam = fam.with(k, move |args| higher_derived_bracket_p(p, args));
        }
        fam
    }

    /// Derived brackets of an odd Hamiltonian, arities `0..=max`.
    pub fn from_hamiltonian(h: OddHamiltonian, max: usize) -> BracketFamily<'a> {
        let chart = h.h().chart().clone();
        let h = Arc::new(h);
        let mut fam = BracketFamily::new("derived[H]", Version::Symmetric, &chart);
        for k in 0..=max {
            let h = h.clone();
            fam = fam.with(k, move |args| higher_derived_bracket_h(&h, args));
        }
        fam
    }

    /// Higher Koszul brackets on forms.
    pub fn koszul(p: &PStructure, max: usize) -> Result<BracketFamily<'a>> {
        let mut fam = BracketFamily::from_hamiltonian(koszul_hamiltonian(p)?, max);
        fam.name = "koszul".into();
        Ok(fam)
    }

    /// Forms with `d` and the binary Koszul bracket.
    pub fn de_rham_koszul(p: &'a PStructure) -> BracketFamily<'a> {
        BracketFamily::new("de_rham+koszul", Version::Symmetric, p.chart())
            .with(1, |a| de_rham(&a[0]))
            .with(2, move |a| koszul_binary(p, &a[0], &a[1]))
    }

    /// Multivectors with `d_P` and the Schouten bracket.
    pub fn lichnerowicz_schouten(p: &'a PStructure) -> BracketFamily<'a> {
        BracketFamily::new("lichnerowicz+schouten", Version::Symmetric, p.chart())
            .with(1, move |a| lichnerowicz(p, &a[0]))
            .with(2, |a| canonical_schouten(&a[0], &a[1]))
    }
}

/// The left side of the n-th higher Jacobi identity.
pub fn jacobi_sum(fam: &BracketFamily, args: &[SuperPoly]) -> Result<SuperPoly> {
    let n = args.len();
    let parities = args.iter().map(|a| fam.degree(a)).collect::<Result<Vec<_>>>()?;
    let mut total = SuperPoly::zero(&fam.chart);
    for k in 0..=n {
        let l = n - k;
        for sigma in shuffles(k, l) {
            let mut sign = koszul_sign(&sigma, &parities);
            if fam.version == Version::Antisymmetric {
                sign *= permutation_sign(&sigma);
                if (k * l) % 2 == 1 {
                    sign = -sign;
                }
            }
            let inner_args: Vec<SuperPoly> = sigma[..k].iter().map(|&i| args[i].clone()).collect();
            let inner = fam.bracket(&inner_args)?;
            if inner.is_zero() {
                continue;
            }
            let mut outer_args = vec![inner];
            outer_args.extend(sigma[k..].iter().map(|&i| args[i].clone()));
            let term = fam.bracket(&outer_args)?;
            total = &total + &term.scale_int(sign);
        }
    }
    Ok(total)
}

/// Higher Jacobi identities for arities `0..=n_max` on tuples drawn cyclically from
/// a corpus of homogeneous elements.
pub fn check_higher_jacobi(fam: &BracketFamily, corpus: &[SuperPoly], n_max: usize, tuples: usize) -> Check {
    let name = format!("higher_jacobi[{}]", fam.name);
    for n in 0..=n_max {
        let count = if n == 0 { 1 } else { tuples.max(1) };
        for t in 0..count {
            let args: Vec<SuperPoly> = (0..n)
                .map(|j| corpus[(t * n + j) % corpus.len().max(1)].clone())
                .collect();
            match jacobi_sum(fam, &args) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => {
                    let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                    return Check::fail(name, format!("n = {n}, args [{}]: residual {r}", shown.join("; ")));
                }
                Err(e) => return Check::fail(name, format!("n = {n}: error: {e}")),
            }
        }
    }
    Check::pass(name)
}

/// An odd vector field `Σ Q^i(ξ) ∂/∂ξ^i` on a linear supermanifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub chart: Arc<Chart>,
    /// One component per chart generator.
    pub components: Vec<SuperPoly>,
}

impl VectorField {
    pub fn zero(chart: &Arc<Chart>) -> VectorField {
        VectorField {
            chart: chart.clone(),
            components: vec![SuperPoly::zero(chart); chart.len()],
        }
    }

    /// A constant vector from its coordinates.
    pub fn constant(chart: &Arc<Chart>, coords: &[i64]) -> VectorField {
        VectorField {
            chart: chart.clone(),
            components: coords.iter().map(|&c| SuperPoly::int(chart, c)).collect(),
        }
    }

    pub fn basis(chart: &Arc<Chart>, i: usize) -> VectorField {
        let mut v = VectorField::zero(chart);
        v.components[i] = SuperPoly::one(chart);
        v
    }

    pub fn is_constant(&self) -> bool {
        self.components.iter().all(|c| c.as_constant().is_some() || c.is_zero())
    }

    pub fn parity(&self) -> Result<Parity> {
        let mut found: Option<Parity> = None;
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = c.parity()? + self.chart.parity(i);
            match found {
                None => found = Some(p),
                Some(q) if q != p => return Err(Error::Inhomogeneous),
                _ => {}
            }
        }
        Ok(found.unwrap_or(Parity::Even))
    }

    /// `X(f) = Σ X^i ∂_i f`.
    pub fn apply(&self, f: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.chart);
        for (i, c) in self.components.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &f.derivative(i));
            }
        }
        out
    }

    /// Graded commutator `[X,Y]^i = X(Y^i) - (-1)^(XY) Y(X^i)`.
    pub fn commutator(&self, other: &VectorField) -> Result<VectorField> {
        let s = if self.parity()?.koszul(other.parity()?) { -1 } else { 1 };
        let components = (0..self.chart.len())
            .map(|i| &self.apply(&other.components[i]) - &other.apply(&self.components[i]).scale_int(s))
            .collect();
        Ok(VectorField {
            chart: self.chart.clone(),
            components,
        })
    }

    pub fn at_zero(&self) -> VectorField {
        let all: Vec<usize> = (0..self.chart.len()).collect();
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|c| c.restrict_zero(&all)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SuperPoly::is_zero)
    }
}

/// `l_k(u_1,…,u_k) = […[Q,u_1],…,u_k](0)` for constant vectors `u_i`.
pub fn brackets_from_q(q: &VectorField, args: &[VectorField]) -> Result<VectorField> {
    let mut acc = q.clone();
    for u in args {
        if !u.is_constant() {
            return Err(Error::Precondition("bracket arguments must be constant vectors".into()));
        }
        acc = acc.commutator(u)?;
    }
    Ok(acc.at_zero())
}

/// Antisymmetric-version brackets through `ι(x) = (-1)^x̃ x^i ∂/∂ξ^i`; the
/// arguments carry their parity in the antisymmetric picture.
pub fn antisymmetric_brackets_from_q(q: &VectorField, args: &[(VectorField, Parity)]) -> Result<VectorField> {
    let mut eps = 0usize;
    let k = args.len();
    let mut iota = Vec::with_capacity(k);
    for (i, (x, p)) in args.iter().enumerate() {
        if p.is_odd() {
            eps += k - 1 - i;
            iota.push(VectorField {
                chart: x.chart.clone(),
                components: x.components.iter().map(|c| -c.clone()).collect(),
            });
        } else {
            iota.push(x.clone());
        }
    }
    let v = brackets_from_q(q, &iota)?;
    Ok(if eps % 2 == 1 {
        VectorField {
            chart: v.chart.clone(),
            components: v.components.iter().map(|c| -c.clone()).collect(),
        }
    } else {
        v
    })
}

/// `ξ^{i_1}…ξ^{i_k}` times the sign of pulling the coordinates out of the slots
/// of a multilinear map of the given parity.
fn coordinate_factor(chart: &Arc<Chart>, idx: &[usize], map_parity: Parity) -> SuperPoly {
    let mut sign = 1i64;
    let mut passed = map_parity;
    let mut mono = SuperPoly::one(chart);
    for &i in idx {
        let p = chart.parity(i);
        if p.koszul(passed) {
            sign = -sign;
        }
        passed += p;
        mono = &mono * &SuperPoly::var(chart, i);
    }
    mono.scale_int(sign)
}

fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

fn inverse_factorial(k: usize) -> Scalar {
    let f: i64 = (1..=k as i64).product();
    Scalar::ratio(1, f)
}

/// `Q(ξ) = Σ_k l_k(ξ,…,ξ)/k!` from brackets given on basis vectors.
pub fn q_from_brackets(
    chart: &Arc<Chart>,
    max_arity: usize,
    on_basis: impl Fn(&[usize]) -> Result<VectorField>,
) -> Result<VectorField> {
    let mut q = VectorField::zero(chart);
    for k in 0..=max_arity {
        for idx in index_tuples(chart.len(), k) {
            if idx
                .iter()
                .enumerate()
                .any(|(a, &i)| chart.parity(i).is_odd() && idx[..a].contains(&i))
            {
                continue;
            }
            let v = on_basis(&idx)?;
            let coeff = coordinate_factor(chart, &idx, Parity::Odd).scale(&inverse_factorial(k));
            for j in 0..chart.len() {
                if !v.components[j].is_zero() {
                    q.components[j] = &q.components[j] + &(&coeff * &v.components[j]);
                }
            }
        }
    }
    Ok(q)
}

/// A symmetric k-linear map on constant vectors built from the k-th Taylor
/// coefficient of a fiberwise map `f` (one component per target generator).
/// On the diagonal it equals k! times the degree-k part of `f`.
pub fn polarize<'a>(
    f: &'a [SuperPoly],
    fiber: &'a [usize],
    k: usize,
) -> impl Fn(&[VectorField]) -> Result<Vec<SuperPoly>> + 'a {
    move |args: &[VectorField]| {
        if args.len() != k {
            return Err(Error::Precondition(format!(
                "expected {k} arguments, got {}",
                args.len()
            )));
        }
        let mut out = Vec::with_capacity(f.len());
        for comp in f {
            let mut g = comp.component_of_degree(fiber, k as u32);
            for u in args.iter().rev() {
                g = u.apply(&g);
            }
            out.push(g.restrict_zero(fiber));
        }
        Ok(out)
    }
}

/// The degree-k Taylor part rebuilt from a polarized map.
pub fn depolarize(
    chart: &Arc<Chart>,
    fiber: &[usize],
    k: usize,
    map: impl Fn(&[VectorField]) -> Result<Vec<SuperPoly>>,
) -> Result<Vec<SuperPoly>> {
    let mut out: Option<Vec<SuperPoly>> = None;
    for idx in index_tuples(fiber.len(), k) {
        let gens: Vec<usize> = idx.iter().map(|&i| fiber[i]).collect();
        if gens
            .iter()
            .enumerate()
            .any(|(a, &g)| chart.parity(g).is_odd() && gens[..a].contains(&g))
        {
            continue;
        }
        let args: Vec<VectorField> = gens.iter().map(|&g| VectorField::basis(chart, g)).collect();
        let vals = map(&args)?;
        let coeff = coordinate_factor(chart, &gens, Parity::Even).scale(&inverse_factorial(k));
        let acc = out.get_or_insert_with(|| vec![SuperPoly::zero(chart); vals.len()]);
        for (a, v) in acc.iter_mut().zip(vals) {
            *a = &*a + &(&coeff * &v);
        }
    }
    Ok(out.unwrap_or_default())
}

pub type TaylorMap<'a> = Box<dyn Fn(&[SuperPoly]) -> Result<SuperPoly> + Send + Sync + 'a>;

/// The components `φ_1, φ_2, φ_3` of an L∞-morphism between two families.
pub struct MorphismData<'a> {
    pub name: String,
    pub source: &'a BracketFamily<'a>,
    pub target: &'a BracketFamily<'a>,
    taylor: BTreeMap<usize, TaylorMap<'a>>,
}

impl<'a> MorphismData<'a> {
    pub fn new(name: impl Into<String>, source: &'a BracketFamily<'a>, target: &'a BracketFamily<'a>) -> Self {
        MorphismData {
            name: name.into(),
            source,
            target,
            taylor: BTreeMap::new(),
        }
    }

    pub fn with(mut self, k: usize, f: impl Fn(&[SuperPoly]) -> Result<SuperPoly> + Send + Sync + 'a) -> Self {
        self.taylor.insert(k, Box::new(f));
        self
    }

    pub fn phi(&self, args: &[SuperPoly]) -> Result<SuperPoly> {
        match self.taylor.get(&args.len()) {
            Some(f) => f(args),
            None => Ok(SuperPoly::zero(&self.target.chart)),
        }
    }
}

/// Residual of the n-th morphism relation (n ≤ 3) on even elements.
pub fn morphism_residual(md: &MorphismData, u: &[SuperPoly]) -> Result<SuperPoly> {
    let l = |a: &[SuperPoly]| md.source.bracket(a);
    let lt = |a: &[SuperPoly]| md.target.bracket(a);
    let phi = |a: &[SuperPoly]| md.phi(a);
    let c = |x: &SuperPoly| x.clone();
    let (lhs, rhs) = match u {
        [u1] => (phi(&[l(&[c(u1)])?])?, lt(&[phi(&[c(u1)])?])?),
        [u1, u2] => {
            let lhs = &(&phi(&[l(&[c(u1), c(u2)])?])? + &phi(&[l(&[c(u1)])?, c(u2)])?) + &phi(&[l(&[c(u2)])?, c(u1)])?;
            let rhs = &lt(&[phi(&[c(u1), c(u2)])?])? + &lt(&[phi(&[c(u1)])?, phi(&[c(u2)])?])?;
            (lhs, rhs)
        }
        [u1, u2, u3] => {
            let mut lhs = phi(&[l(&[c(u1), c(u2), c(u3)])?])?;
            for (a, b, r) in [(u1, u2, u3), (u1, u3, u2), (u2, u3, u1)] {
                lhs = &lhs + &phi(&[l(&[c(a), c(b)])?, c(r)])?;
            }
            for (a, r1, r2) in [(u1, u2, u3), (u2, u1, u3), (u3, u1, u2)] {
                lhs = &lhs + &phi(&[l(&[c(a)])?, c(r1), c(r2)])?;
            }
            let mut rhs = lt(&[phi(&[c(u1), c(u2), c(u3)])?])?;
            for (a, b, r) in [(u1, u2, u3), (u2, u1, u3), (u3, u1, u2)] {
                rhs = &rhs + &lt(&[phi(&[c(a)])?, phi(&[c(b), c(r)])?])?;
            }
            rhs = &rhs + &lt(&[phi(&[c(u1)])?, phi(&[c(u2)])?, phi(&[c(u3)])?])?;
            (lhs, rhs)
        }
        _ => {
            return Err(Error::Precondition(
                "morphism relations are implemented for n = 1, 2, 3".into(),
            ))
        }
    };
    Ok(&lhs - &rhs)
}

/// Relations `n = 1..=n_max` on tuples of even corpus elements.
pub fn check_linfty_morphism(md: &MorphismData, corpus: &[SuperPoly], n_max: usize, tuples: usize) -> Check {
    let name = format!("linfty_morphism[{}]", md.name);
    if n_max > 3 {
        return Check::skipped(name, "relations beyond n = 3 are not implemented");
    }
    for fam in [md.source, md.target] {
        match fam.bracket(&[]) {
            Ok(z) if z.is_zero() => {}
            Ok(z) => return Check::fail(name, format!("{} has a nonzero 0-ary bracket {z}", fam.name)),
            Err(e) => return Check::fail(name, format!("error: {e}")),
        }
    }
    let even: Vec<&SuperPoly> = corpus
        .iter()
        .filter(|a| a.parity().is_ok_and(|p| p.is_even()))
        .collect();
    if even.is_empty() {
        return Check::skipped(name, "corpus has no even elements");
    }
    for n in 1..=n_max {
        for t in 0..tuples.max(1) {
            let u: Vec<SuperPoly> = (0..n).map(|j| even[(t * n + j) % even.len()].clone()).collect();
            match morphism_residual(md, &u) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => return Check::fail(name, format!("n = {n}: residual {r}")),
                Err(e) => return Check::fail(name, format!("n = {n}: error: {e}")),
            }
        }
    }
    Check::pass(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::{ChartBuilder, Role};

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(1, 1), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(shuffles(2, 0), vec![vec![0, 1]]);
        assert_eq!(shuffles(2, 2).len(), 6);
        assert_eq!(shuffles(0, 3).len(), 1);
    }

    #[test]
    fn koszul_signs() {
        use Parity::*;
        assert_eq!(koszul_sign(&[0, 1], &[Odd, Odd]), 1);
        assert_eq!(koszul_sign(&[1, 0], &[Odd, Odd]), -1);
        assert_eq!(koszul_sign(&[1, 0], &[Odd, Even]), 1);
        assert_eq!(permutation_sign(&[2, 0, 1]), 1);
    }

    #[test]
    fn linear_q_gives_matrix() {
        let chart = ChartBuilder::default()
            .generator("a", Parity::Even, Role::Base)
            .generator("b", Parity::Odd, Role::Base)
            .build()
            .unwrap();
        // Q = b ∂/∂a, odd.
        let mut q = VectorField::zero(&chart);
        q.components[0] = SuperPoly::var(&chart, 1);
        let l1 = brackets_from_q(&q, &[VectorField::basis(&chart, 1)]).unwrap();
        assert_eq!(l1.components[0], SuperPoly::int(&chart, 1));
        assert!(l1.components[1].is_zero());
    }
}
