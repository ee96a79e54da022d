use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use super::scalar::{fmt_coeff, Scalar, Truncation};
use super::{Chart, Parity};
use crate::error::{Error, Result};

/// Exponent vector in chart order. Odd generators carry exponent 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[u16; 16]>);

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, n))
    }

    pub fn var(n: usize, index: usize) -> Monomial {
        let mut m = Monomial::one(n);
        m.0[index] = 1;
        m
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> u16 {
        self.0[index]
    }

    pub fn set(&mut self, index: usize, e: u16) {
        self.0[index] = e;
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn parity(&self, chart: &Chart) -> Parity {
        let odd: u32 = self
            .0
            .iter()
            .enumerate()
            .filter(|(i, _)| chart.parity(*i).is_odd())
            .map(|(_, &e)| e as u32)
            .sum();
        Parity::from_bit(odd)
    }

    /// Number of odd generators strictly before `index` that occur in the monomial.
    fn odd_before(&self, chart: &Chart, index: usize) -> u32 {
        (0..index)
            .filter(|&i| self.0[i] > 0 && chart.parity(i).is_odd())
            .count() as u32
    }

    /// Canonical product `self * other`, with `true` meaning a minus sign, or `None`
    /// when an odd generator would be squared.
    pub fn mul(&self, other: &Monomial, chart: &Chart) -> Option<(Monomial, bool)> {
        let mut out = self.clone();
        let mut swaps = 0u32;
        // Odd generators of `self` seen so far, scanning from the right.
        let mut odd_after = 0u32;
        for i in (0..self.0.len()).rev() {
            let odd = chart.parity(i).is_odd();
            if odd && other.0[i] > 0 {
                if self.0[i] > 0 {
                    return None;
                }
                swaps += odd_after;
            }
            if odd && self.0[i] > 0 {
                odd_after += 1;
            }
            out.0[i] += other.0[i];
        }
        Some((out, swaps % 2 == 1))
    }
}

/// A polynomial in the graded generators of a chart with [`Scalar`] coefficients,
/// kept in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperPoly {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl fmt::Debug for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperPoly({self})")
    }
}

fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SuperPoly {
    pub fn zero(chart: &Arc<Chart>) -> SuperPoly {
        SuperPoly {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: &Arc<Chart>, c: Scalar) -> SuperPoly {
        let mut p = SuperPoly::zero(chart);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(chart.len()), c);
        }
        p
    }

    pub fn one(chart: &Arc<Chart>) -> SuperPoly {
        SuperPoly::constant(chart, Scalar::one())
    }

    pub fn int(chart: &Arc<Chart>, n: i64) -> SuperPoly {
        SuperPoly::constant(chart, Scalar::int(n))
    }

    pub fn var(chart: &Arc<Chart>, index: usize) -> SuperPoly {
        SuperPoly::term(chart, Monomial::var(chart.len(), index), Scalar::one())
    }

    pub fn var_named(chart: &Arc<Chart>, name: &str) -> Result<SuperPoly> {
        Ok(SuperPoly::var(chart, chart.index_of(name)?))
    }

    pub fn term(chart: &Arc<Chart>, m: Monomial, c: Scalar) -> SuperPoly {
        let mut p = SuperPoly::zero(chart);
        p.add_term(m, c);
        p
    }

    /// Build from raw terms. Monomials with squared odd generators are dropped.
    pub fn from_terms(chart: &Arc<Chart>, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> SuperPoly {
        let mut p = SuperPoly::zero(chart);
        for (m, c) in terms {
            let squared = m
                .exponents()
                .iter()
                .enumerate()
                .any(|(i, &e)| e > 1 && chart.parity(i).is_odd());
            if !squared {
                p.add_term(m, c);
            }
        }
        p
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    /// Number of terms; [`SuperPoly::is_zero`] tests for no terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The constant term as a scalar.
    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.chart.len()))
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_chart(&self, other: &SuperPoly) -> Result<()> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn try_add(&self, other: &SuperPoly) -> Result<SuperPoly> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &SuperPoly) -> Result<SuperPoly> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &SuperPoly) -> Result<SuperPoly> {
        self.mul_truncated(other, Truncation::NONE)
    }

    pub fn mul_truncated(&self, other: &SuperPoly, trunc: Truncation) -> Result<SuperPoly> {
        self.check_chart(other)?;
        let mut out = SuperPoly::zero(&self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(mb, &self.chart) {
                    let c = ca.mul_truncated(cb, trunc);
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.chart);
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> SuperPoly {
        self.scale(&Scalar::int(n))
    }

    pub fn pow(&self, k: u32) -> SuperPoly {
        let mut out = SuperPoly::one(&self.chart);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Parity of a homogeneous element; zero is even.
    pub fn parity(&self) -> Result<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.chart));
        let first = it.next().unwrap_or(Parity::Even);
        if it.all(|p| p == first) {
            Ok(first)
        } else {
            Err(Error::Inhomogeneous)
        }
    }

    /// Split into (even part, odd part).
    pub fn parity_split(&self) -> (SuperPoly, SuperPoly) {
        let mut even = SuperPoly::zero(&self.chart);
        let mut odd = SuperPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            match m.parity(&self.chart) {
                Parity::Even => even.terms.insert(m.clone(), c.clone()),
                Parity::Odd => odd.terms.insert(m.clone(), c.clone()),
            };
        }
        (even, odd)
    }

    /// Homogeneous components paired with their parity, zero parts omitted.
    pub fn homogeneous_parts(&self) -> Vec<(Parity, SuperPoly)> {
        let (e, o) = self.parity_split();
        [(Parity::Even, e), (Parity::Odd, o)]
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .collect()
    }

    /// Left derivative with respect to the generator at `index`.
    pub fn derivative(&self, index: usize) -> SuperPoly {
        let chart = &self.chart;
        let odd = chart.parity(index).is_odd();
        let mut out = SuperPoly::zero(chart);
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.set(index, e - 1);
            let coeff = if odd {
                if m.odd_before(chart, index) % 2 == 1 {
                    -c
                } else {
                    c.clone()
                }
            } else {
                c * &Scalar::int(e as i64)
            };
            out.add_term(dm, coeff);
        }
        out
    }

    pub fn derivative_named(&self, name: &str) -> Result<SuperPoly> {
        Ok(self.derivative(self.chart.index_of(name)?))
    }

    /// Algebra homomorphism fixing every generator not in `map`. Each image must
    /// have the parity of the generator it replaces.
    pub fn substitute(&self, map: &HashMap<usize, SuperPoly>) -> Result<SuperPoly> {
        self.substitute_truncated(map, Truncation::NONE)
    }

    pub fn substitute_truncated(&self, map: &HashMap<usize, SuperPoly>, trunc: Truncation) -> Result<SuperPoly> {
        let target = match map.values().next() {
            Some(v) => v.chart.clone(),
            None => return Ok(self.truncate(trunc)),
        };
        for (&i, v) in map {
            if !same_chart(&v.chart, &target) {
                return Err(Error::ChartMismatch);
            }
            let expected = self.chart.parity(i);
            let found = v.parity()?;
            if !v.is_zero() && found != expected {
                return Err(Error::ParityMismatch {
                    name: self.chart.generator(i).name.clone(),
                    expected,
                    found,
                });
            }
        }
        let same = same_chart(&self.chart, &target);
        if !same && map.len() < self.chart.len() {
            // Every generator must be mapped when changing charts.
            for i in 0..self.chart.len() {
                if !map.contains_key(&i) && self.terms.keys().any(|m| m.exponent(i) > 0) {
                    return Err(Error::ChartMismatch);
                }
            }
        }
        let mut power_cache: HashMap<(usize, u16), SuperPoly> = HashMap::new();
        let mut out = SuperPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut acc = SuperPoly::constant(&target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = match map.get(&i) {
                    Some(v) => power_cache
                        .entry((i, e))
                        .or_insert_with(|| {
                            let mut p = SuperPoly::one(&target);
                            for _ in 0..e {
                                p = p.mul_truncated(v, trunc).expect("same chart");
                            }
                            p
                        })
                        .clone(),
                    None => SuperPoly::term(
                        &target,
                        {
                            let mut mm = Monomial::one(target.len());
                            mm.set(i, e);
                            mm
                        },
                        Scalar::one(),
                    ),
                };
                acc = acc.mul_truncated(&factor, trunc)?;
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    pub fn substitute_named(&self, map: &[(&str, SuperPoly)]) -> Result<SuperPoly> {
        let mut m = HashMap::new();
        for (name, v) in map {
            m.insert(self.chart.index_of(name)?, v.clone());
        }
        self.substitute(&m)
    }

    /// Set the listed generators to zero.
    pub fn restrict_zero(&self, indices: &[usize]) -> SuperPoly {
        SuperPoly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| indices.iter().all(|&i| m.exponent(i) == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Iterated Berezin integral `∫ Dθ_1 ... Dθ_n f`, innermost (last listed) first,
    /// with `∫ Dθ θ = 1`.
    pub fn berezin(&self, gens: &[usize]) -> Result<SuperPoly> {
        for &g in gens {
            if self.chart.parity(g).is_even() {
                return Err(Error::EvenIntegration(self.chart.generator(g).name.clone()));
            }
        }
        let mut out = self.clone();
        for &g in gens.iter().rev() {
            out = out.derivative(g);
        }
        Ok(out)
    }

    /// True when every monomial contains an odd generator.
    pub fn has_zero_body(&self) -> bool {
        self.terms.keys().all(|m| m.parity_free_odd_count(&self.chart) > 0)
    }

    /// `Σ f^k / k!`, terminating by nilpotence of the odd generators or by the
    /// truncation of the formal parameters.
    pub fn exp_nilpotent(&self, trunc: Truncation) -> Result<SuperPoly> {
        let chart = &self.chart;
        let nilpotent_by_trunc = self.terms.iter().all(|(m, c)| {
            m.parity_free_odd_count(chart) > 0
                || c.terms()
                    .all(|((h, t), _)| (trunc.hbar.is_some() && *h > 0) || (trunc.t.is_some() && *t > 0))
        });
        if !nilpotent_by_trunc {
            return Err(Error::NonNilpotent);
        }
        let bound =
            chart.odd_count() + trunc.hbar.map_or(0, |h| h.max(0) as usize) + trunc.t.map_or(0, |t| t as usize) + 1;
        let mut out = SuperPoly::one(chart);
        let mut power = SuperPoly::one(chart);
        for k in 1..=bound {
            power = power.mul_truncated(self, trunc)?.scale(&Scalar::ratio(1, k as i64));
            if power.is_zero() {
                return Ok(out.truncate(trunc));
            }
            out = &out + &power;
        }
        if power.is_zero() {
            Ok(out.truncate(trunc))
        } else {
            Err(Error::NonNilpotent)
        }
    }

    pub fn truncate(&self, trunc: Truncation) -> SuperPoly {
        self.map_coefficients(|c| c.truncate(trunc))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Scalar) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn hbar_zero_part(&self) -> SuperPoly {
        self.map_coefficients(Scalar::hbar_zero_part)
    }

    pub fn shift_hbar(&self, k: i32) -> SuperPoly {
        self.map_coefficients(|c| c.shift_hbar(k))
    }

    pub fn min_hbar(&self) -> Option<i32> {
        self.terms.values().filter_map(Scalar::min_hbar).min()
    }

    /// Total degree in the generators of `indices`.
    pub fn degree_in(&self, m: &Monomial, indices: &[usize]) -> u32 {
        indices.iter().map(|&i| m.exponent(i) as u32).sum()
    }

    /// The part of exact degree `k` in the generators of `indices`.
    pub fn component_of_degree(&self, indices: &[usize], k: u32) -> SuperPoly {
        SuperPoly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.degree_in(m, indices) == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_degree_in(&self, indices: &[usize]) -> u32 {
        self.terms.keys().map(|m| self.degree_in(m, indices)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// True if no monomial involves a generator outside `allowed`.
    pub fn depends_only_on(&self, allowed: &[usize]) -> bool {
        self.terms.keys().all(|m| {
            m.exponents()
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || allowed.contains(&i))
        })
    }

    /// Generators that occur in some monomial.
    pub fn support(&self) -> Vec<usize> {
        (0..self.chart.len())
            .filter(|&i| self.terms.keys().any(|m| m.exponent(i) > 0))
            .collect()
    }

    /// Move to another chart by generator name; `rename` maps names of this chart
    /// to names of the target, identity when it returns `None`.
    pub fn transport(&self, target: &Arc<Chart>, rename: impl Fn(&str) -> Option<String>) -> Result<SuperPoly> {
        let mut index_map = vec![None; self.chart.len()];
        for i in self.support() {
            let g = self.chart.generator(i);
            let name = rename(&g.name).unwrap_or_else(|| g.name.clone());
            let j = target.index_of(&name)?;
            if target.parity(j) != g.parity {
                return Err(Error::ParityMismatch {
                    name,
                    expected: g.parity,
                    found: target.parity(j),
                });
            }
            index_map[i] = Some(j);
        }
        // Generators are placed one at a time so reorderings pick up Koszul signs.
        let mut out = SuperPoly::zero(target);
        for (m, c) in &self.terms {
            let mut acc = SuperPoly::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    acc = &acc * &SuperPoly::var(target, index_map[i].unwrap());
                }
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Decompose as `Σ_m x^m · rest_m` with `x^m` a monomial in the generators of
    /// `indices` placed on the left.
    pub fn split_left(&self, indices: &[usize]) -> BTreeMap<Monomial, SuperPoly> {
        let chart = &self.chart;
        let mut out: BTreeMap<Monomial, SuperPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut head = Monomial::one(chart.len());
            let mut rest = m.clone();
            for &i in indices {
                head.set(i, m.exponent(i));
                rest.set(i, 0);
            }
            let (prod, neg) = head.mul(&rest, chart).expect("disjoint factors");
            debug_assert_eq!(&prod, m);
            let c = if neg { -c } else { c.clone() };
            out.entry(head)
                .or_insert_with(|| SuperPoly::zero(chart))
                .add_term(rest, c);
        }
        out
    }
}

impl Monomial {
    fn parity_free_odd_count(&self, chart: &Chart) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, &e)| e > 0 && chart.parity(*i).is_odd())
            .count() as u32
    }
}

impl Add for &SuperPoly {
    type Output = SuperPoly;
    fn add(self, rhs: &SuperPoly) -> SuperPoly {
        self.try_add(rhs).expect("chart mismatch in addition")
    }
}

impl Sub for &SuperPoly {
    type Output = SuperPoly;
    fn sub(self, rhs: &SuperPoly) -> SuperPoly {
        self.try_sub(rhs).expect("chart mismatch in subtraction")
    }
}

impl Mul for &SuperPoly {
    type Output = SuperPoly;
    fn mul(self, rhs: &SuperPoly) -> SuperPoly {
        self.try_mul(rhs).expect("chart mismatch in multiplication")
    }
}

impl Neg for &SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        SuperPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for SuperPoly {
    type Output = SuperPoly;
    fn add(self, rhs: SuperPoly) -> SuperPoly {
        &self + &rhs
    }
}

impl Sub for SuperPoly {
    type Output = SuperPoly;
    fn sub(self, rhs: SuperPoly) -> SuperPoly {
        &self - &rhs
    }
}

impl Mul for SuperPoly {
    type Output = SuperPoly;
    fn mul(self, rhs: SuperPoly) -> SuperPoly {
        &self * &rhs
    }
}

impl Neg for SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        -&self
    }
}

fn fmt_monomial(m: &Monomial, chart: &Chart) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(chart.generator(i).name.clone()),
            _ => parts.push(format!("{}^{}", chart.generator(i).name, e)),
        }
    }
    parts.join("*")
}

fn fmt_scalar_factor(c: &Scalar) -> String {
    if c.terms().count() == 1 {
        let ((h, t), v) = c.terms().next().unwrap();
        if *h == 0 && *t == 0 {
            return fmt_coeff(v);
        }
    }
    format!("({c})")
}

impl fmt::Display for SuperPoly {
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
            let mono = fmt_monomial(m, &self.chart);
            let coeff = fmt_scalar_factor(c);
            match (mono.is_empty(), coeff.as_str()) {
                (true, _) => write!(f, "{coeff}")?,
                (false, "1") => write!(f, "{mono}")?,
                (false, "-1") => write!(f, "-{mono}")?,
                (false, _) => write!(f, "{coeff}*{mono}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalg::{Families, Parity};

    fn chart() -> Arc<Chart> {
        Chart::standard(
            &[("x", Parity::Even), ("t1", Parity::Odd), ("t2", Parity::Odd)],
            Families::default(),
        )
        .unwrap()
    }

    #[test]
    fn odd_square_vanishes() {
        let c = chart();
        let t = SuperPoly::var(&c, 1);
        assert!((&t * &t).is_zero());
    }

    #[test]
    fn odd_generators_anticommute() {
        let c = chart();
        let (a, b) = (SuperPoly::var(&c, 1), SuperPoly::var(&c, 2));
        assert_eq!(&a * &b, -(&b * &a));
        let x = SuperPoly::var(&c, 0);
        assert_eq!(&x * &a, &a * &x);
    }

    #[test]
    fn left_derivative_signs() {
        let c = chart();
        let (a, b) = (SuperPoly::var(&c, 1), SuperPoly::var(&c, 2));
        let ab = &a * &b;
        assert_eq!(ab.derivative(1), b);
        assert_eq!(ab.derivative(2), -&a);
        let x = SuperPoly::var(&c, 0);
        let f = &(&x * &x) * &a;
        assert_eq!(f.derivative(0), (&x * &a).scale_int(2));
    }

    #[test]
    fn berezin_order_convention() {
        let c = chart();
        let (a, b) = (SuperPoly::var(&c, 1), SuperPoly::var(&c, 2));
        assert_eq!((&b * &a).berezin(&[1, 2]).unwrap(), SuperPoly::one(&c));
        assert_eq!(a.berezin(&[1]).unwrap(), SuperPoly::one(&c));
        assert!(SuperPoly::int(&c, 5).berezin(&[1]).unwrap().is_zero());
        assert!(matches!(a.berezin(&[0]), Err(Error::EvenIntegration(_))));
    }

    #[test]
    fn exp_of_nilpotent_terminates() {
        let c = chart();
        let f = &SuperPoly::var(&c, 1) * &SuperPoly::var(&c, 2);
        let e = f.exp_nilpotent(Truncation::NONE).unwrap();
        assert_eq!(e, &SuperPoly::one(&c) + &f);
        let x = SuperPoly::var(&c, 0);
        assert_eq!(x.exp_nilpotent(Truncation::NONE), Err(Error::NonNilpotent));
    }

    #[test]
    fn substitution_checks_parity() {
        let c = chart();
        let x = SuperPoly::var(&c, 0);
        let mut map = HashMap::new();
        map.insert(1, x.clone());
        assert!(matches!(
            SuperPoly::var(&c, 1).substitute(&map),
            Err(Error::ParityMismatch { .. })
        ));
    }

    #[test]
    fn split_left_reassembles() {
        let c = chart();
        let (x, a, b) = (SuperPoly::var(&c, 0), SuperPoly::var(&c, 1), SuperPoly::var(&c, 2));
        let f = &(&(&x * &a) * &b) + &b;
        let parts = f.split_left(&[2]);
        let mut back = SuperPoly::zero(&c);
        for (m, rest) in parts {
            back = &back + &(&SuperPoly::term(&c, m, Scalar::one()) * &rest);
        }
        assert_eq!(back, f);
    }
}
