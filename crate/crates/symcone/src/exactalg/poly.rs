//! Sparse multivariate polynomials in the equivariant parameters.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rat::{rat_one, Rat};

/// Exponent vector under graded-lexicographic order.
///
/// Total degree is compared first, then exponents left to right. This
/// fixes one global monomial order so canonical forms are reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise quotient, or None if any exponent would go negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Sparse polynomial in variables a0..a(nvars-1) over exact rationals.
///
/// Invariant: no zero coefficient is stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AlphaPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl AlphaPoly {
    pub fn zero(nvars: usize) -> Self {
        AlphaPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = AlphaPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        AlphaPoly::constant(nvars, rat_one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = AlphaPoly::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), rat_one());
        p
    }

    /// c_i1 * a_{i1} - c_i2 * a_{i2} style combinations come up constantly;
    /// build a linear polynomial from per-variable coefficients.
    pub fn linear(nvars: usize, coeffs: &[Rat]) -> Self {
        assert_eq!(coeffs.len(), nvars);
        let mut p = AlphaPoly::zero(nvars);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(Monomial::var(nvars, i), c.clone());
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Some(c) when the polynomial is the constant c (including 0).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_constant() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    fn insert_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &AlphaPoly) -> AlphaPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> AlphaPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &AlphaPoly) -> AlphaPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AlphaPoly) -> AlphaPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = AlphaPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> AlphaPoly {
        if c.is_zero() {
            return AlphaPoly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c.clone();
        }
        out
    }

    pub fn pow(&self, e: u32) -> AlphaPoly {
        let mut out = AlphaPoly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Leading (monomial, coefficient) under graded-lex, if nonzero.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exact multivariate division. Returns None unless `other` divides
    /// `self` exactly; leading-term elimination under graded-lex.
    pub fn exact_div(&self, other: &AlphaPoly) -> Option<AlphaPoly> {
        assert_eq!(self.nvars, other.nvars);
        assert!(!other.is_zero(), "division by zero polynomial");
        let (lt_m, lt_c) = other.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = AlphaPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(lt_m)?;
            let qc = rc / lt_c;
            let mut t = AlphaPoly::zero(self.nvars);
            t.terms.insert(qm, qc);
            rem = rem.sub(&t.mul(other));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Componentwise minimum exponent vector over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut min = match self.terms.keys().next() {
            Some(m) => m.0.clone(),
            None => return Monomial::constant(self.nvars),
        };
        for m in self.terms.keys() {
            for (acc, e) in min.iter_mut().zip(&m.0) {
                if e < acc {
                    *acc = *e;
                }
            }
        }
        Monomial(min)
    }

    pub fn div_monomial(&self, m: &Monomial) -> AlphaPoly {
        let mut out = AlphaPoly::zero(self.nvars);
        for (t, c) in &self.terms {
            out.terms.insert(t.div(m).expect("monomial does not divide"), c.clone());
        }
        out
    }

    pub fn partial(&self, i: usize) -> AlphaPoly {
        let mut out = AlphaPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut me = m.0.clone();
            me[i] -= 1;
            out.insert_term(Monomial(me), c * Rat::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= point[i].clone();
                }
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Display for AlphaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Descending graded-lex for a stable, readable rendering.
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote = false;
            if !mag.is_one() || m.is_constant() {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "a{i}")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::rat_i;

    fn a(i: usize) -> AlphaPoly {
        AlphaPoly::var(2, i)
    }

    #[test]
    fn linear_combination_cancels() {
        let p = a(0).sub(&a(1));
        let q = a(1).sub(&a(0));
        assert!(p.add(&q).is_zero());
    }

    #[test]
    fn difference_of_squares_divides() {
        let p = a(0).mul(&a(0)).sub(&a(1).mul(&a(1)));
        let d = a(0).sub(&a(1));
        let q = p.exact_div(&d).unwrap();
        assert_eq!(q, a(0).add(&a(1)));
    }

    #[test]
    fn non_divisor_returns_none() {
        let p = a(0).mul(&a(0)).sub(&a(1));
        let d = a(0).sub(&a(1));
        assert!(p.exact_div(&d).is_none());
    }

    #[test]
    fn eval_linear() {
        let p = a(0).sub(&a(1));
        assert_eq!(p.eval(&[rat_i(0), rat_i(1)]), rat_i(-1));
    }

    #[test]
    fn graded_lex_orders_by_degree_first() {
        let m1 = Monomial(vec![0, 2]);
        let m2 = Monomial(vec![1, 0]);
        assert!(m1 > m2);
    }

    #[test]
    fn display_is_deterministic() {
        let p = a(0).mul(&a(0)).sub(&a(1)).add(&AlphaPoly::constant(2, rat_i(3)));
        assert_eq!(p.to_string(), "a0^2 - a1 + 3");
    }
}
