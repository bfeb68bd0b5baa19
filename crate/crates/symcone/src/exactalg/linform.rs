//! Linear forms in the equivariant parameters, used as pole locations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::AlphaPoly;
use super::rat::Rat;
use super::ratfun::AlphaRat;

/// A nonzero form `scale * (sum_i direction_i * a_i)`.
///
/// The direction is canonically scaled (integer coefficients with content 1,
/// first nonzero coefficient positive) and the original scale is kept
/// separately. Two forms are the same pole location only when direction and
/// scale both agree: distinct poles may share a direction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinearForm {
    direction: Vec<BigInt>,
    scale: Rat,
}

impl LinearForm {
    /// None when all coefficients vanish.
    pub fn from_coeffs(coeffs: &[Rat]) -> Option<Self> {
        if coeffs.iter().all(Rat::is_zero) {
            return None;
        }
        // Clear denominators, then divide by the gcd of the numerators.
        let mut den_lcm = BigInt::one();
        for c in coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        let first = ints.iter().find(|v| !v.is_zero()).unwrap();
        let sign = if first.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let g = g * &sign;
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
        // coeffs = (g / den_lcm) * direction
        let scale = Rat::new(g, den_lcm);
        Some(LinearForm {
            direction: ints,
            scale,
        })
    }

    /// The form `c * (a_{i} - a_{j})`.
    pub fn coordinate_difference(nvars: usize, i: usize, j: usize, c: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); nvars];
        coeffs[i] = c.clone();
        coeffs[j] = -c;
        LinearForm::from_coeffs(&coeffs).expect("i != j and c != 0")
    }

    pub fn nvars(&self) -> usize {
        self.direction.len()
    }

    pub fn scale(&self) -> &Rat {
        &self.scale
    }

    pub fn direction(&self) -> &[BigInt] {
        &self.direction
    }

    pub fn coeff(&self, i: usize) -> Rat {
        Rat::from_integer(self.direction[i].clone()) * self.scale.clone()
    }

    pub fn rescaled(&self, c: &Rat) -> Self {
        assert!(!c.is_zero());
        LinearForm {
            direction: self.direction.clone(),
            scale: self.scale.clone() * c.clone(),
        }
    }

    pub fn negated(&self) -> Self {
        self.rescaled(&-Rat::one())
    }

    /// True when the two forms span the same line.
    pub fn same_direction(&self, other: &LinearForm) -> bool {
        self.direction == other.direction
    }

    pub fn to_poly(&self) -> AlphaPoly {
        let coeffs: Vec<Rat> = (0..self.nvars()).map(|i| self.coeff(i)).collect();
        AlphaPoly::linear(self.nvars(), &coeffs)
    }

    pub fn to_rat(&self) -> AlphaRat {
        AlphaRat::from_poly(self.to_poly())
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        self.to_poly().eval(point)
    }

    /// Recognize an `AlphaRat` that is a homogeneous linear polynomial.
    pub fn try_from_rat(r: &AlphaRat) -> Option<Self> {
        let dc = r.denominator().as_constant()?;
        let num = r.numerator();
        let mut coeffs = vec![Rat::zero(); r.nvars()];
        for (m, c) in num.terms() {
            if m.total_degree() != 1 {
                return None;
            }
            let i = m.0.iter().position(|&e| e == 1).unwrap();
            coeffs[i] = c / &dc;
        }
        LinearForm::from_coeffs(&coeffs)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

impl Serialize for LinearForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::{rat_i, ratio};

    #[test]
    fn canonical_direction_first_nonzero_positive() {
        let w = LinearForm::from_coeffs(&[rat_i(0), rat_i(-2), rat_i(2)]).unwrap();
        assert_eq!(w.direction(), &[BigInt::from(0), BigInt::from(1), BigInt::from(-1)]);
        assert_eq!(w.scale(), &rat_i(-2));
    }

    #[test]
    fn scale_distinguishes_poles_on_one_line() {
        let w1 = LinearForm::coordinate_difference(2, 0, 1, rat_i(1));
        let w2 = LinearForm::coordinate_difference(2, 0, 1, rat_i(2));
        assert!(w1.same_direction(&w2));
        assert_ne!(w1, w2);
    }

    #[test]
    fn reconstruction_from_rat() {
        let w = LinearForm::coordinate_difference(3, 2, 0, ratio(3, 4));
        let r = w.to_rat();
        assert_eq!(LinearForm::try_from_rat(&r).unwrap(), w);
    }

    #[test]
    fn zero_form_rejected() {
        assert!(LinearForm::from_coeffs(&[rat_i(0), rat_i(0)]).is_none());
    }
}
