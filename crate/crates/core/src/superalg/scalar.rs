use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::{BigInt, BigRational, Complex, One, Signed, Zero};

/// Exact Gaussian rational `a + b i`.
pub type Coeff = Complex<BigRational>;

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn coeff(n: i64, d: i64) -> Coeff {
    Complex::new(rational(n, d), BigRational::zero())
}

pub fn imaginary_unit() -> Coeff {
    Complex::new(BigRational::zero(), BigRational::one())
}

/// `i^k` for any integer `k`.
pub fn i_power(k: i64) -> Coeff {
    match k.rem_euclid(4) {
        0 => coeff(1, 1),
        1 => imaginary_unit(),
        2 => coeff(-1, 1),
        _ => -imaginary_unit(),
    }
}

/// Retention bounds for the two formal parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Truncation {
    pub hbar: Option<i32>,
    pub t: Option<u32>,
}

impl Truncation {
    pub const NONE: Truncation = Truncation { hbar: None, t: None };

    pub fn hbar(max: i32) -> Truncation {
        Truncation {
            hbar: Some(max),
            t: None,
        }
    }

    pub fn t(max: u32) -> Truncation {
        Truncation {
            hbar: None,
            t: Some(max),
        }
    }

    pub fn keeps(&self, key: (i32, u32)) -> bool {
        self.hbar.is_none_or(|h| key.0 <= h) && self.t.is_none_or(|t| key.1 <= t)
    }
}

/// A finite Laurent polynomial in `hbar` (bounded below) and polynomial in the
/// auxiliary parameter `t`, with Gaussian rational coefficients.
///
/// Keys are `(hbar exponent, t exponent)`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<(i32, u32), Coeff>,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::default()
    }

    pub fn one() -> Scalar {
        Scalar::from_coeff(coeff(1, 1))
    }

    pub fn from_coeff(c: Coeff) -> Scalar {
        Scalar::monomial(c, 0, 0)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::from_coeff(coeff(n, 1))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::from_coeff(coeff(n, d))
    }

    pub fn from_rational(q: BigRational) -> Scalar {
        Scalar::from_coeff(Complex::new(q, BigRational::zero()))
    }

    pub fn i() -> Scalar {
        Scalar::from_coeff(imaginary_unit())
    }

    /// `c * hbar^h * t^t`.
    pub fn monomial(c: Coeff, hbar: i32, t: u32) -> Scalar {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((hbar, t), c);
        }
        Scalar { terms }
    }

    pub fn hbar_power(k: i32) -> Scalar {
        Scalar::monomial(coeff(1, 1), k, 0)
    }

    pub fn t_power(k: u32) -> Scalar {
        Scalar::monomial(coeff(1, 1), 0, k)
    }

    /// `(-i hbar)^k` for any integer `k`.
    pub fn minus_i_hbar(k: i32) -> Scalar {
        // (-i)^k = i^(-k)
        Scalar::monomial(i_power(-(k as i64)), k, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, u32), &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, hbar: i32, t: u32) -> Coeff {
        self.terms.get(&(hbar, t)).cloned().unwrap_or_else(Coeff::zero)
    }

    /// The constant `hbar^0 t^0` coefficient if this scalar is exactly a constant.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn min_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn max_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn max_t(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn min_t(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).min()
    }

    fn insert_add(&mut self, key: (i32, u32), c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Coeff) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn mul_truncated(&self, other: &Scalar, trunc: Truncation) -> Scalar {
        let mut out = Scalar::zero();
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                let key = (ka.0 + kb.0, ka.1 + kb.1);
                if trunc.keeps(key) {
                    out.insert_add(key, a * b);
                }
            }
        }
        out
    }

    pub fn truncate(&self, trunc: Truncation) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| trunc.keeps(**k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Multiply by `hbar^k`.
    pub fn shift_hbar(&self, k: i32) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|((h, t), v)| ((h + k, *t), v.clone())).collect(),
        }
    }

    /// Keep only the `hbar^0` part (reduction mod hbar of a series with no negative
    /// powers).
    pub fn hbar_zero_part(&self) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.0 == 0)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Keep only the `t^k` part, returned with `t^0`.
    pub fn t_part(&self, k: u32) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .filter(|(key, _)| key.1 == k)
                .map(|((h, _), v)| ((*h, 0), v.clone()))
                .collect(),
        }
    }

    /// Substitute `t = 1`.
    pub fn at_t_one(&self) -> Scalar {
        let mut out = Scalar::zero();
        for ((h, _), v) in &self.terms {
            out.insert_add((*h, 0), v.clone());
        }
        out
    }

    /// Complex conjugation `i -> -i`.
    pub fn conj(&self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (k, v) in &rhs.terms {
            self.insert_add(*k, v.clone());
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_truncated(rhs, Truncation::NONE)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders `a + b i` as a standalone factor: `3/2`, `-i`, `2*i`, `(1 + 2*i)`.
pub(crate) fn fmt_coeff(c: &Coeff) -> String {
    let re = &c.re;
    let im = &c.im;
    let im_part = |q: &BigRational| -> String {
        if q.is_one() {
            "i".to_string()
        } else if (-q).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", fmt_rational(q))
        }
    };
    match (re.is_zero(), im.is_zero()) {
        (_, true) => fmt_rational(re),
        (true, false) => im_part(im),
        (false, false) => {
            let sign = if im.is_negative() { "-" } else { "+" };
            format!("({} {} {})", fmt_rational(re), sign, im_part(&im.abs()))
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((h, t), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            let cs = fmt_coeff(c);
            let trivial = *h == 0 && *t == 0;
            if cs != "1" || trivial {
                factors.push(cs);
            }
            if *h != 0 {
                factors.push(if *h == 1 {
                    "hbar".to_string()
                } else {
                    format!("hbar^{h}")
                });
            }
            if *t != 0 {
                factors.push(if *t == 1 { "t".to_string() } else { format!("t^{t}") });
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rational_addition() {
        let a = Scalar::ratio(1, 3) + Scalar::ratio(1, 6);
        assert_eq!(a, Scalar::ratio(1, 2));
        let z = Scalar::ratio(2, 7) - Scalar::ratio(2, 7);
        assert!(z.is_zero());
    }

    #[test]
    fn imaginary_unit_has_order_four() {
        let i = Scalar::i();
        let i2 = &i * &i;
        assert_eq!(i2, Scalar::int(-1));
        assert_eq!(&i2 * &i2, Scalar::one());
        assert_eq!(i_power(5), imaginary_unit());
        assert_eq!(i_power(-1), -imaginary_unit());
    }

    #[test]
    fn minus_i_hbar_powers_compose() {
        let a = Scalar::minus_i_hbar(3);
        let b = Scalar::minus_i_hbar(-2);
        assert_eq!(&a * &b, Scalar::minus_i_hbar(1));
        assert_eq!(Scalar::minus_i_hbar(2), -Scalar::hbar_power(2));
    }

    #[test]
    fn truncation_only_drops_high_exponents() {
        let s = Scalar::hbar_power(1) + Scalar::hbar_power(3) + Scalar::t_power(2);
        let tr = s.truncate(Truncation {
            hbar: Some(2),
            t: Some(1),
        });
        assert_eq!(tr, Scalar::hbar_power(1));
        let prod = Scalar::hbar_power(2).mul_truncated(&Scalar::hbar_power(1), Truncation::hbar(2));
        assert!(prod.is_zero());
    }

    #[test]
    fn display_is_stable() {
        let s = Scalar::ratio(3, 2) + Scalar::minus_i_hbar(1);
        assert_eq!(s.to_string(), "3/2 + -i*hbar");
        let c = Scalar::from_coeff(coeff(1, 2) + imaginary_unit());
        assert_eq!(c.to_string(), "(1/2 + i)");
    }
}
