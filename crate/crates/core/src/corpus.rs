//! Seeded random polynomials and structure instances.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::brackets::PStructure;
use crate::superalg::{Chart, Families, Monomial, Parity, Scalar, SuperPoly};

pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Corpus {
        Corpus {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn nonzero_int(&mut self, bound: i64) -> i64 {
        loop {
            let v = self.int(-bound, bound);
            if v != 0 {
                return v;
            }
        }
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    /// A random monomial in `gens` of total degree at most `max_degree`.
    pub fn monomial(&mut self, chart: &Chart, gens: &[usize], max_degree: u32) -> Monomial {
        let mut m = Monomial::one(chart.len());
        if gens.is_empty() {
            return m;
        }
        let deg = self.rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            let g = *self.pick(gens);
            if chart.parity(g).is_odd() && m.exponent(g) > 0 {
                continue;
            }
            m.set(g, m.exponent(g) + 1);
        }
        m
    }

    /// A random polynomial with up to `terms` terms and small integer coefficients.
    /// With `parity` set, only monomials of that parity are kept.
    pub fn poly(
        &mut self,
        chart: &Arc<Chart>,
        gens: &[usize],
        max_degree: u32,
        terms: usize,
        parity: Option<Parity>,
    ) -> SuperPoly {
        let mut out = SuperPoly::zero(chart);
        for _ in 0..terms {
            let m = self.monomial(chart, gens, max_degree);
            if parity.is_some_and(|p| m.parity(chart) != p) {
                continue;
            }
            let c = self.nonzero_int(3);
            out = &out + &SuperPoly::term(chart, m, Scalar::int(c));
        }
        out
    }

    /// Like [`Corpus::poly`] but retries until the result is nonzero.
    pub fn nonzero_poly(
        &mut self,
        chart: &Arc<Chart>,
        gens: &[usize],
        max_degree: u32,
        terms: usize,
        parity: Option<Parity>,
    ) -> SuperPoly {
        for _ in 0..64 {
            let p = self.poly(chart, gens, max_degree, terms.max(1), parity);
            if !p.is_zero() {
                return p;
            }
        }
        let g = gens
            .iter()
            .copied()
            .find(|&g| parity.is_none_or(|p| chart.parity(g) == p));
        match g {
            Some(g) => SuperPoly::var(chart, g),
            None => SuperPoly::one(chart),
        }
    }

    /// Homogeneous element of random parity.
    pub fn homogeneous(&mut self, chart: &Arc<Chart>, gens: &[usize], max_degree: u32, terms: usize) -> SuperPoly {
        let parity = if self.coin() { Parity::Even } else { Parity::Odd };
        self.nonzero_poly(chart, gens, max_degree, terms, Some(parity))
    }

    /// A polynomial in the listed base generators only.
    pub fn base_function(&mut self, chart: &Arc<Chart>, base: &[usize], max_degree: u32) -> SuperPoly {
        self.poly(chart, base, max_degree, 3, Some(Parity::Even))
    }

    /// A random P∞ instance drawn from families whose self-bracket vanishes for
    /// structural reasons. On an even base of dimension ≤ 3 an even multivector
    /// has only components of degree 0 and 2; charts with an odd base coordinate
    /// also get genuinely higher components.
    pub fn pinfty(&mut self, chart: &Arc<Chart>, max_degree: u32) -> PStructure {
        let base = chart.base();
        let even: Vec<usize> = base.iter().copied().filter(|&b| chart.parity(b).is_even()).collect();
        let odd: Vec<usize> = base.iter().copied().filter(|&b| chart.parity(b).is_odd()).collect();
        let star = |i: usize| SuperPoly::var(chart, chart.antifiber_of(i).unwrap());
        let dim = even.len();
        let kind = self.int(0, if dim >= 3 { 3 } else { 1 });
        let mut p = match kind {
            // Constant-coefficient bivector.
            0 => {
                let mut p = SuperPoly::zero(chart);
                for a in 0..dim {
                    for b in a + 1..dim {
                        let c = self.int(-3, 3);
                        p = &p + &(&star(even[b]) * &star(even[a])).scale_int(c);
                    }
                }
                p
            }
            // φ(x1) x*_2 x*_1, curved by a function of the remaining coordinate.
            1 => {
                if dim < 2 {
                    SuperPoly::int(chart, self.int(-2, 2))
                } else {
                    let phi = self.base_function(chart, &even[..1], max_degree);
                    let curv = if dim >= 3 {
                        self.base_function(chart, &even[2..3], max_degree)
                    } else {
                        SuperPoly::int(chart, self.int(-2, 2))
                    };
                    &(&phi * &(&star(even[1]) * &star(even[0]))) + &curv
                }
            }
            // Scaled so(3) Lie-Poisson structure curved by a multiple of its Casimir.
            2 => {
                let c = self.nonzero_int(2);
                let lp = so3_lie_poisson_on(chart, &even[..3]);
                let cas = so3_casimir_on(chart, &even[..3]).scale_int(self.int(-1, 1));
                &lp.scale_int(c) + &cas
            }
            // φ(x1) x*_2 x*_1 plus a constant bivector in the (2,3) plane.
            _ => {
                let phi = self.base_function(chart, &even[..1], max_degree);
                let c = self.nonzero_int(2);
                &(&phi * &(&star(even[1]) * &star(even[0]))) + &(&star(even[2]) * &star(even[1])).scale_int(c)
            }
        };
        if let (Some(&th), true) = (odd.first(), dim >= 2) {
            // ψ(x1,x2) x*_2 x*_1 θ* and a polynomial in θ* with constant coefficients.
            let psi = self.base_function(chart, &even[..2], max_degree.min(2));
            let tri = &psi * &(&(&star(even[1]) * &star(even[0])) * &star(th));
            let mut g = SuperPoly::zero(chart);
            for k in 1..=3 {
                g = &g + &star(th).pow(k).scale_int(self.int(-2, 2));
            }
            p = &(&p + &tri) + &g;
        }
        PStructure::new(p).expect("even multivector")
    }

    /// A quadratic multivector with polynomial coefficients whose Schouten square
    /// is nonzero. `None` when the chart admits no such instance within a few
    /// draws (for example a purely even base of dimension below 3).
    pub fn broken_bivector(&mut self, chart: &Arc<Chart>) -> Option<PStructure> {
        let base = chart.base();
        let xs: Vec<usize> = base.iter().map(|&b| chart.antifiber_of(b).unwrap()).collect();
        for _ in 0..32 {
            let mut p = SuperPoly::zero(chart);
            for a in 0..base.len() {
                for b in a..base.len() {
                    let pair = &SuperPoly::var(chart, xs[b]) * &SuperPoly::var(chart, xs[a]);
                    if pair.is_zero() {
                        continue;
                    }
                    let parity = chart.parity(xs[a]) + chart.parity(xs[b]);
                    let f = self.poly(chart, &base, 2, 2, Some(parity));
                    p = &p + &(&f * &pair);
                }
            }
            let ps = PStructure::new(p).expect("even");
            if !ps.is_pinfty() {
                return Some(ps);
            }
        }
        None
    }
}

/// Chart with all coordinate families over even `x1, x2` and an odd `th`.
pub fn mixed_chart() -> Arc<Chart> {
    Chart::standard(
        &[("x1", Parity::Even), ("x2", Parity::Even), ("th", Parity::Odd)],
        Families::all(),
    )
    .expect("valid chart")
}

/// Chart with all coordinate families over `dim` even base coordinates `x1..xn`.
pub fn even_chart(dim: usize) -> Arc<Chart> {
    let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let base: Vec<(&str, Parity)> = names.iter().map(|n| (n.as_str(), Parity::Even)).collect();
    Chart::standard(&base, Families::all()).expect("valid chart")
}

/// `x1 x*_3 x*_2 + x2 x*_1 x*_3 + x3 x*_2 x*_1`.
pub fn so3_lie_poisson(chart: &Arc<Chart>) -> SuperPoly {
    so3_lie_poisson_on(chart, &chart.base())
}

pub fn so3_lie_poisson_on(chart: &Arc<Chart>, base: &[usize]) -> SuperPoly {
    let xs: Vec<usize> = base.iter().map(|&b| chart.antifiber_of(b).unwrap()).collect();
    let v = |i: usize| SuperPoly::var(chart, i);
    let mut p = SuperPoly::zero(chart);
    #[allow(clippy::needless_range_loop)]
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        p = &p + &(&v(base[k]) * &(&v(xs[j]) * &v(xs[i])));
    }
    p
}

pub fn so3_casimir(chart: &Arc<Chart>) -> SuperPoly {
    so3_casimir_on(chart, &chart.base())
}

pub fn so3_casimir_on(chart: &Arc<Chart>, base: &[usize]) -> SuperPoly {
    let mut c = SuperPoly::zero(chart);
    for &b in base {
        let x = SuperPoly::var(chart, b);
        c = &c + &(&x * &x);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_corpus_is_reproducible() {
        let c = even_chart(2);
        let gens: Vec<usize> = (0..c.len()).collect();
        let a = Corpus::new(7).poly(&c, &gens, 3, 4, None);
        let b = Corpus::new(7).poly(&c, &gens, 3, 4, None);
        assert_eq!(a, b);
    }

    #[test]
    fn generated_instances_are_pinfty() {
        for dim in 1..=3 {
            let c = even_chart(dim);
            let mut corpus = Corpus::new(dim as u64);
            for _ in 0..20 {
                let p = corpus.pinfty(&c, 2);
                assert!(p.is_pinfty(), "{}", p.p());
            }
        }
        let c = mixed_chart();
        let mut corpus = Corpus::new(11);
        for _ in 0..20 {
            let p = corpus.pinfty(&c, 2);
            assert!(p.is_pinfty(), "{}", p.p());
        }
    }

    #[test]
    fn broken_bivector_is_not_pinfty() {
        let c = even_chart(3);
        assert!(!Corpus::new(1).broken_bivector(&c).unwrap().is_pinfty());
        assert!(Corpus::new(1).broken_bivector(&even_chart(2)).is_none());
        assert!(Corpus::new(1).broken_bivector(&mixed_chart()).is_some());
    }
}
