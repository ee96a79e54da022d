//! Residuals of the basic laws of the graded algebra. Each is zero exactly when
//! the law holds on the given arguments.

use super::{Parity, SuperPoly};
use crate::error::{Error, Result};

fn sign(neg: bool) -> i64 {
    if neg {
        -1
    } else {
        1
    }
}

/// `ab - (-1)^(ab) ba`.
pub fn supercommutator(a: &SuperPoly, b: &SuperPoly) -> SuperPoly {
    let mut out = SuperPoly::zero(a.chart());
    for (pa, aa) in a.homogeneous_parts() {
        for (pb, bb) in b.homogeneous_parts() {
            out = &out + &(&(&aa * &bb) - &(&bb * &aa).scale_int(sign(pa.koszul(pb))));
        }
    }
    out
}

/// `(ab)c - a(bc)`.
pub fn associator(a: &SuperPoly, b: &SuperPoly, c: &SuperPoly) -> SuperPoly {
    &(&(a * b) * c) - &(a * &(b * c))
}

/// `∂_u(ab) - (∂_u a) b - (-1)^(u a) a ∂_u b`.
pub fn derivative_leibniz(u: usize, a: &SuperPoly, b: &SuperPoly) -> SuperPoly {
    let pu = a.chart().parity(u);
    let mut out = (a * b).derivative(u);
    for (pa, aa) in a.homogeneous_parts() {
        out = &out - &(&aa.derivative(u) * b);
        out = &out - &(&aa * &b.derivative(u)).scale_int(sign(pu.koszul(pa)));
    }
    out
}

/// `∂_u ∂_v a - (-1)^(u v) ∂_v ∂_u a`.
pub fn derivative_commutator(u: usize, v: usize, a: &SuperPoly) -> SuperPoly {
    let chart = a.chart();
    let s = sign(chart.parity(u).koszul(chart.parity(v)));
    &a.derivative(v).derivative(u) - &a.derivative(u).derivative(v).scale_int(s)
}

/// `∫ Dθ ∂_θ f`, which vanishes for every `f`.
pub fn berezin_of_derivative(theta: usize, f: &SuperPoly) -> Result<SuperPoly> {
    f.derivative(theta).berezin(&[theta])
}

/// `∫ Dθ_1 Dθ_2 f + ∫ Dθ_2 Dθ_1 f`: odd measures anticommute.
pub fn berezin_swap(t1: usize, t2: usize, f: &SuperPoly) -> Result<SuperPoly> {
    Ok(&f.berezin(&[t1, t2])? + &f.berezin(&[t2, t1])?)
}

/// `∫ Dθ θ g - g` for `g` free of `θ`.
pub fn berezin_normalization(theta: usize, g: &SuperPoly) -> Result<SuperPoly> {
    if g.support().contains(&theta) {
        return Err(Error::Precondition(format!(
            "`{g}` depends on the integration variable"
        )));
    }
    let t = SuperPoly::var(g.chart(), theta);
    Ok(&(&t * g).berezin(&[theta])? - g)
}

/// `ab` has parity `a + b` for homogeneous factors; zero residual means the
/// product is homogeneous of the expected parity (or zero).
pub fn parity_additivity(a: &SuperPoly, b: &SuperPoly) -> Result<bool> {
    let ab = a * b;
    if ab.is_zero() {
        return Ok(true);
    }
    let expected: Parity = a.parity()? + b.parity()?;
    Ok(ab.parity()? == expected)
}
