//! Dense polynomials in z with rational-function coefficients.

use std::fmt;

use super::rat::{rat_u, Rat};
use super::ratfun::AlphaRat;

/// coeffs[j] is the coefficient of z^j; trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPoly {
    nvars: usize,
    coeffs: Vec<AlphaRat>,
}

impl ZPoly {
    pub fn zero(nvars: usize) -> Self {
        ZPoly {
            nvars,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: AlphaRat) -> Self {
        let nvars = c.nvars();
        let mut p = ZPoly {
            nvars,
            coeffs: vec![c],
        };
        p.trim();
        p
    }

    pub fn one(nvars: usize) -> Self {
        ZPoly::constant(AlphaRat::one(nvars))
    }

    pub fn z(nvars: usize) -> Self {
        ZPoly {
            nvars,
            coeffs: vec![AlphaRat::zero(nvars), AlphaRat::one(nvars)],
        }
    }

    pub fn from_coeffs(nvars: usize, coeffs: Vec<AlphaRat>) -> Self {
        let mut p = ZPoly { nvars, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(AlphaRat::is_zero).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in z, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, j: usize) -> AlphaRat {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| AlphaRat::zero(self.nvars))
    }

    pub fn leading_coeff(&self) -> Option<&AlphaRat> {
        self.coeffs.last()
    }

    /// Order of vanishing at z = 0 (index of first nonzero coefficient).
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.coeff(j).add(&other.coeff(j)));
        }
        ZPoly::from_coeffs(self.nvars, out)
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(AlphaRat::neg).collect(),
        }
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero(self.nvars);
        }
        let mut out = vec![AlphaRat::zero(self.nvars); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        ZPoly::from_coeffs(self.nvars, out)
    }

    pub fn scale(&self, c: &AlphaRat) -> ZPoly {
        ZPoly::from_coeffs(
            self.nvars,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    /// Evaluate at a rational-function value of z.
    pub fn eval_z(&self, z: &AlphaRat) -> AlphaRat {
        let mut acc = AlphaRat::zero(self.nvars);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    /// Substitute z = w - u and return the coefficients as a polynomial in u.
    pub fn subst_w_minus_u(&self, w: &AlphaRat) -> ZPoly {
        // sum_j c_j (w - u)^j expanded by binomials.
        let mut out = vec![AlphaRat::zero(self.nvars); self.coeffs.len().max(1)];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // (w - u)^j = sum_k C(j,k) w^(j-k) (-1)^k u^k
            let mut wpow = AlphaRat::one(self.nvars);
            let mut wpows = vec![wpow.clone()];
            for _ in 0..j {
                wpow = wpow.mul(w);
                wpows.push(wpow.clone());
            }
            for k in 0..=j {
                let mut term = c.mul(&wpows[j - k]);
                let mut b = rat_u(super::rat::binomial(j as u64, k as u64));
                if k % 2 == 1 {
                    b = -b;
                }
                term = term.scale(&b);
                out[k] = out[k].add(&term);
            }
        }
        ZPoly::from_coeffs(self.nvars, out)
    }

    /// Quotient of division by the monic linear factor (z + c), when exact.
    pub fn div_monic_linear(&self, c: &AlphaRat) -> Option<ZPoly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // Synthetic division: remainder is self(-c).
        let minus_c = c.neg();
        let mut quot = vec![AlphaRat::zero(self.nvars); self.coeffs.len() - 1];
        let mut carry = AlphaRat::zero(self.nvars);
        for j in (1..self.coeffs.len()).rev() {
            carry = self.coeff(j).add(&carry.mul(&minus_c));
            quot[j - 1] = carry.clone();
        }
        let rem = self.coeff(0).add(&carry.mul(&minus_c));
        if rem.is_zero() {
            Some(ZPoly::from_coeffs(self.nvars, quot))
        } else {
            None
        }
    }

    pub fn partial_alpha(&self, i: usize) -> ZPoly {
        ZPoly::from_coeffs(
            self.nvars,
            self.coeffs.iter().map(|c| c.partial(i)).collect(),
        )
    }

    pub fn partial_z(&self) -> ZPoly {
        if self.coeffs.len() <= 1 {
            return ZPoly::zero(self.nvars);
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (j, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c.scale(&rat_u(j as u64)));
        }
        ZPoly::from_coeffs(self.nvars, out)
    }

    /// Evaluate every alpha variable, leaving a univariate polynomial in z
    /// with rational coefficients.
    pub fn eval_alpha(&self, point: &[Rat]) -> Result<Vec<Rat>, super::ExactError> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.eval(point)?);
        }
        while out.last().map(num_traits::Zero::is_zero).unwrap_or(false) {
            out.pop();
        }
        Ok(out)
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*z")?;
                if j > 1 {
                    write!(f, "^{j}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::rat_i;

    #[test]
    fn subst_of_z_is_w_minus_u() {
        let w = AlphaRat::var(2, 0);
        let p = ZPoly::z(2);
        let q = p.subst_w_minus_u(&w);
        assert_eq!(q.coeff(0), w);
        assert_eq!(q.coeff(1), AlphaRat::constant(2, rat_i(-1)));
    }

    #[test]
    fn synthetic_division_exact_and_inexact() {
        // (z + a0)(z + 1)
        let c = AlphaRat::var(2, 0);
        let one = AlphaRat::one(2);
        let p = ZPoly::from_coeffs(
            2,
            vec![c.clone(), c.add(&one), one.clone()],
        );
        let q = p.div_monic_linear(&c).unwrap();
        assert_eq!(q, ZPoly::from_coeffs(2, vec![one.clone(), one.clone()]));
        assert!(p.div_monic_linear(&AlphaRat::var(2, 1)).is_none());
    }

    #[test]
    fn partial_z_of_cubic() {
        let one = AlphaRat::one(1);
        let p = ZPoly::from_coeffs(1, vec![one.clone(), one.clone(), one.clone(), one.clone()]);
        let d = p.partial_z();
        assert_eq!(d.coeff(1), AlphaRat::constant(1, rat_i(2)));
        assert_eq!(d.coeff(2), AlphaRat::constant(1, rat_i(3)));
    }
}
