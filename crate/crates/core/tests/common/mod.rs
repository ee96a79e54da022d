#![allow(dead_code)]

use std::sync::Arc;

use superkoszul::brackets::PStructure;
use superkoszul::corpus::Corpus;
use superkoszul::superalg::{Chart, SuperPoly};

/// A bivector `Σ_{a≤b} f_ab(x) x*_b x*_a` with random coefficients of the
/// matching parity, so that coefficients may depend on odd base coordinates.
pub fn random_bivector(k: &mut Corpus, chart: &Arc<Chart>) -> PStructure {
    let base = chart.base();
    let mut p = SuperPoly::zero(chart);
    for (i, &a) in base.iter().enumerate() {
        for &b in &base[i..] {
            let (xa, xb) = (chart.antifiber_of(a).unwrap(), chart.antifiber_of(b).unwrap());
            let pair = &SuperPoly::var(chart, xb) * &SuperPoly::var(chart, xa);
            if pair.is_zero() {
                continue;
            }
            let parity = chart.parity(a) + chart.parity(b);
            let f = k.poly(chart, &base, 2, 2, Some(parity));
            p = &p + &(&f * &pair);
        }
    }
    PStructure::new(p).expect("even bivector")
}

pub fn positions(chart: &Chart) -> Vec<usize> {
    chart.tangent_pairs().iter().flat_map(|&(x, dx)| [x, dx]).collect()
}

pub fn multivector_positions(chart: &Chart) -> Vec<usize> {
    chart.antifiber_pairs().iter().flat_map(|&(x, xs)| [x, xs]).collect()
}
