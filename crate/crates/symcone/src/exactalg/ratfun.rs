//! Rational functions in the equivariant parameters.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use super::poly::AlphaPoly;
use super::rat::{rat_one, Rat};
use super::ExactError;

/// num/den over `AlphaPoly`, kept in a normal form rather than fully reduced:
/// common monomial content is cancelled, the denominator has leading
/// coefficient 1 under graded-lex, exact divisibility is cancelled when it
/// happens to hold. Equality is decided by cross-multiplication so the
/// partial reduction is never load-bearing.
#[derive(Debug, Clone, PartialOrd, Ord, Eq)]
pub struct AlphaRat {
    num: AlphaPoly,
    den: AlphaPoly,
}

impl AlphaRat {
    pub fn new(num: AlphaPoly, den: AlphaPoly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivByZero);
        }
        let mut r = AlphaRat { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: AlphaPoly) -> Self {
        let n = p.nvars();
        AlphaRat {
            num: p,
            den: AlphaPoly::one(n),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        AlphaRat::from_poly(AlphaPoly::constant(nvars, c))
    }

    pub fn zero(nvars: usize) -> Self {
        AlphaRat::constant(nvars, Rat::zero())
    }

    pub fn one(nvars: usize) -> Self {
        AlphaRat::constant(nvars, rat_one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        AlphaRat::from_poly(AlphaPoly::var(nvars, i))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &AlphaPoly {
        &self.num
    }

    pub fn denominator(&self) -> &AlphaPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Some(c) when the value is the constant rational c.
    pub fn as_constant(&self) -> Option<Rat> {
        let dc = self.den.as_constant()?;
        let nc = self.num.as_constant()?;
        Some(nc / dc)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = AlphaPoly::one(self.num.nvars());
            return;
        }
        // Cancel shared monomial content.
        let cn = self.num.monomial_content();
        let cd = self.den.monomial_content();
        let shared: Vec<u32> = cn.0.iter().zip(&cd.0).map(|(a, b)| *a.min(b)).collect();
        let shared = super::poly::Monomial(shared);
        if !shared.is_constant() {
            self.num = self.num.div_monomial(&shared);
            self.den = self.den.div_monomial(&shared);
        }
        if let Some(dc) = self.den.as_constant() {
            self.num = self.num.scale(&(rat_one() / dc));
            self.den = AlphaPoly::one(self.num.nvars());
            return;
        }
        if let Some(q) = self.num.exact_div(&self.den) {
            self.num = q;
            self.den = AlphaPoly::one(self.num.nvars());
            return;
        }
        if let Some(q) = self.den.exact_div(&self.num) {
            // num/den = 1/q.
            self.num = AlphaPoly::one(self.num.nvars());
            self.den = q;
        }
        let lc = self
            .den
            .leading()
            .map(|(_, c)| c.clone())
            .expect("nonzero denominator");
        if !lc.is_one() {
            let inv = rat_one() / lc;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn add(&self, other: &AlphaRat) -> AlphaRat {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        AlphaRat::new(num, den).expect("nonzero denominators")
    }

    pub fn neg(&self) -> AlphaRat {
        AlphaRat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &AlphaRat) -> AlphaRat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AlphaRat) -> AlphaRat {
        AlphaRat::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn div(&self, other: &AlphaRat) -> Result<AlphaRat, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivByZero);
        }
        AlphaRat::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inverse(&self) -> Result<AlphaRat, ExactError> {
        AlphaRat::one(self.nvars()).div(self)
    }

    pub fn scale(&self, c: &Rat) -> AlphaRat {
        AlphaRat {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i64) -> Result<AlphaRat, ExactError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = AlphaRat::one(self.nvars());
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Exact evaluation; Err(SpecializationFailed) when the denominator
    /// vanishes at the point.
    pub fn eval(&self, point: &[Rat]) -> Result<Rat, ExactError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ExactError::SpecializationFailed);
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn partial(&self, i: usize) -> AlphaRat {
        // (n/d)' = (n'd - nd')/d^2
        let num = self
            .num
            .partial(i)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(i)));
        let den = self.den.mul(&self.den);
        AlphaRat::new(num, den).expect("nonzero denominator")
    }
}

impl PartialEq for AlphaRat {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl fmt::Display for AlphaRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Serialize for AlphaRat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AlphaRat", 2)?;
        st.serialize_field("num", &self.num.to_string())?;
        st.serialize_field("den", &self.den.to_string())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::rat_i;

    fn a(i: usize) -> AlphaRat {
        AlphaRat::var(2, i)
    }

    #[test]
    fn factor_cancellation() {
        // (a0^2 - a1^2)/(a0 - a1) == a0 + a1
        let num = AlphaPoly::var(2, 0).pow(2).sub(&AlphaPoly::var(2, 1).pow(2));
        let den = AlphaPoly::var(2, 0).sub(&AlphaPoly::var(2, 1));
        let r = AlphaRat::new(num, den).unwrap();
        assert_eq!(r, a(0).add(&a(1)));
    }

    #[test]
    fn cross_multiplied_equality() {
        // a0/a1 in an unreduced disguise: (a0^2 - a0 a1)/(a0 a1 - a1^2)
        let num = AlphaPoly::var(2, 0)
            .pow(2)
            .sub(&AlphaPoly::var(2, 0).mul(&AlphaPoly::var(2, 1)));
        let den = AlphaPoly::var(2, 0)
            .mul(&AlphaPoly::var(2, 1))
            .sub(&AlphaPoly::var(2, 1).pow(2));
        let r = AlphaRat::new(num, den).unwrap();
        let direct = a(0).div(&a(1)).unwrap();
        assert_eq!(r, direct);
    }

    #[test]
    fn div_by_zero_is_an_error() {
        assert!(matches!(
            a(0).div(&AlphaRat::zero(2)),
            Err(ExactError::DivByZero)
        ));
    }

    #[test]
    fn eval_avoids_zero_denominator() {
        let r = a(0).div(&a(0).sub(&a(1))).unwrap();
        assert!(r.eval(&[rat_i(1), rat_i(1)]).is_err());
        assert_eq!(r.eval(&[rat_i(2), rat_i(1)]).unwrap(), rat_i(2));
    }

    #[test]
    fn pow_negative_inverts() {
        let r = a(0).pow(-2).unwrap();
        assert_eq!(r, AlphaRat::one(2).div(&a(0).mul(&a(0))).unwrap());
    }
}
