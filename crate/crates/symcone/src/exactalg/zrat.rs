//! Rational functions of z over the equivariant coefficient field, with
//! exact Laurent-coefficient extraction at movable poles.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::linform::LinearForm;
use super::rat::{DetRng, Rat};
use super::ratfun::AlphaRat;
use super::zpoly::ZPoly;
use super::ExactError;

/// Monic linear factorization of a denominator: `prod (z + c)^mult`.
///
/// Kept as a cache alongside the expanded denominator whenever the value was
/// built from factored products, so pole scans are a syntactic read-off.
/// Generic arithmetic that cannot preserve it drops the cache; `pole_support`
/// then reconstructs it (and fails loudly when a factor is not z-linear).
type FactorMap = BTreeMap<AlphaRat, u32>;

#[derive(Debug, Clone)]
pub struct ZRat {
    num: ZPoly,
    den: ZPoly,
    factors: Option<FactorMap>,
}

/// One movable pole: location as a scaled linear form, with its order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pole {
    pub location: LinearForm,
    pub order: u32,
}

/// Complete pole data of a `ZRat`.
#[derive(Debug, Clone, Serialize)]
pub struct PoleSupport {
    pub poles: Vec<Pole>,
    pub order_at_zero: u32,
    /// deg(num) - deg(den); positive means polynomial growth at infinity.
    pub degree_at_infinity: i64,
}

impl ZRat {
    pub fn zero(nvars: usize) -> Self {
        ZRat {
            num: ZPoly::zero(nvars),
            den: ZPoly::one(nvars),
            factors: Some(BTreeMap::new()),
        }
    }

    pub fn one(nvars: usize) -> Self {
        ZRat::from_zpoly(ZPoly::one(nvars))
    }

    pub fn from_zpoly(num: ZPoly) -> Self {
        let nvars = num.nvars();
        ZRat {
            num,
            den: ZPoly::one(nvars),
            factors: Some(BTreeMap::new()),
        }
    }

    pub fn from_alpharat(c: AlphaRat) -> Self {
        ZRat::from_zpoly(ZPoly::constant(c))
    }

    pub fn z(nvars: usize) -> Self {
        ZRat::from_zpoly(ZPoly::z(nvars))
    }

    /// num / (scalar * prod_j (a_j + b_j z)^m_j), with every factor linear in
    /// z (b_j != 0). Factors are normalized to monic form z + a_j/b_j and the
    /// scalars move into the numerator.
    pub fn from_factored(
        num: ZPoly,
        scalar: AlphaRat,
        linear_factors: &[(AlphaRat, AlphaRat, u32)],
    ) -> Result<Self, ExactError> {
        let nvars = num.nvars();
        if scalar.is_zero() {
            return Err(ExactError::DivByZero);
        }
        let mut lead = scalar;
        let mut factors: FactorMap = BTreeMap::new();
        for (a, b, mult) in linear_factors {
            if *mult == 0 {
                continue;
            }
            if b.is_zero() {
                return Err(ExactError::DivByZero);
            }
            let c = a.div(b)?;
            lead = lead.mul(&b.pow(*mult as i64)?);
            *factors.entry(c).or_insert(0) += mult;
        }
        let num = num.scale(&lead.inverse()?);
        let mut out = ZRat {
            num,
            den: expand_factors(nvars, &factors),
            factors: Some(factors),
        };
        out.cancel_cached_factors();
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &ZPoly {
        &self.num
    }

    pub fn denominator(&self) -> &ZPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn has_factored_denominator(&self) -> bool {
        self.factors.is_some()
    }

    fn cancel_cached_factors(&mut self) {
        let Some(factors) = &mut self.factors else {
            return;
        };
        if self.num.is_zero() {
            factors.clear();
            self.den = ZPoly::one(self.num.nvars());
            return;
        }
        let mut changed = false;
        let roots: Vec<AlphaRat> = factors.keys().cloned().collect();
        for c in roots {
            while *factors.get(&c).unwrap_or(&0) > 0 {
                match self.num.div_monic_linear(&c) {
                    Some(q) => {
                        self.num = q;
                        let m = factors.get_mut(&c).unwrap();
                        *m -= 1;
                        if *m == 0 {
                            factors.remove(&c);
                        }
                        changed = true;
                    }
                    None => break,
                }
            }
        }
        if changed {
            self.den = expand_factors(self.num.nvars(), factors);
        }
    }

    pub fn add(&self, other: &ZRat) -> ZRat {
        match (&self.factors, &other.factors) {
            (Some(fa), Some(fb)) => {
                // Factored lcm: per-root maximum multiplicity.
                let mut lcm: FactorMap = fa.clone();
                for (c, m) in fb {
                    let e = lcm.entry(c.clone()).or_insert(0);
                    *e = (*e).max(*m);
                }
                let comp_a = complement(self.nvars(), &lcm, fa);
                let comp_b = complement(self.nvars(), &lcm, fb);
                let num = self.num.mul(&comp_a).add(&other.num.mul(&comp_b));
                let mut out = ZRat {
                    num,
                    den: expand_factors(self.nvars(), &lcm),
                    factors: Some(lcm),
                };
                out.cancel_cached_factors();
                out
            }
            _ => ZRat {
                num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                den: self.den.mul(&other.den),
                factors: None,
            },
        }
    }

    pub fn neg(&self) -> ZRat {
        ZRat {
            num: self.num.neg(),
            den: self.den.clone(),
            factors: self.factors.clone(),
        }
    }

    pub fn sub(&self, other: &ZRat) -> ZRat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ZRat) -> ZRat {
        match (&self.factors, &other.factors) {
            (Some(fa), Some(fb)) => {
                let mut factors = fa.clone();
                for (c, m) in fb {
                    *factors.entry(c.clone()).or_insert(0) += m;
                }
                let mut out = ZRat {
                    num: self.num.mul(&other.num),
                    den: expand_factors(self.nvars(), &factors),
                    factors: Some(factors),
                };
                out.cancel_cached_factors();
                out
            }
            _ => ZRat {
                num: self.num.mul(&other.num),
                den: self.den.mul(&other.den),
                factors: None,
            },
        }
    }

    pub fn scale(&self, c: &AlphaRat) -> ZRat {
        let mut out = ZRat {
            num: self.num.scale(c),
            den: self.den.clone(),
            factors: self.factors.clone(),
        };
        if c.is_zero() {
            out = ZRat::zero(self.nvars());
        }
        out
    }

    pub fn div(&self, other: &ZRat) -> Result<ZRat, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivByZero);
        }
        // The reciprocal's denominator is the divisor's numerator, for which
        // no factorization is known in general.
        Ok(ZRat {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
            factors: None,
        })
    }

    /// Coefficient of u^k in the Laurent expansion of f(z = w - u) at u = 0,
    /// i.e. the coefficient of (w - z)^k at the pole z = w. Exact
    /// substitution and series division throughout.
    pub fn laurent_at(&self, w: &LinearForm, k: i64) -> Result<AlphaRat, ExactError> {
        self.laurent_at_value(&w.to_rat(), k)
    }

    pub fn laurent_at_value(&self, w: &AlphaRat, k: i64) -> Result<AlphaRat, ExactError> {
        let nvars = self.nvars();
        if self.num.is_zero() {
            return Ok(AlphaRat::zero(nvars));
        }
        let nu = self.num.subst_w_minus_u(w);
        let de = self.den.subst_w_minus_u(w);
        if de.is_zero() {
            return Err(ExactError::DegeneratePole);
        }
        let n0 = match nu.order_at_zero() {
            Some(n) => n as i64,
            None => return Ok(AlphaRat::zero(nvars)),
        };
        let m0 = de.order_at_zero().expect("nonzero denominator") as i64;
        // f = u^(n0 - m0) * (unit numerator / unit denominator)
        let t = k - n0 + m0;
        if t < 0 {
            return Ok(AlphaRat::zero(nvars));
        }
        let t = t as usize;
        let nhat = |j: usize| nu.coeff(j + n0 as usize);
        let dhat = |j: usize| de.coeff(j + m0 as usize);
        // Series division (nhat / dhat) up to order t.
        let d0inv = dhat(0).inverse()?;
        let mut series: Vec<AlphaRat> = Vec::with_capacity(t + 1);
        for m in 0..=t {
            let mut acc = nhat(m);
            for j in 1..=m {
                acc = acc.sub(&dhat(j).mul(&series[m - j]));
            }
            series.push(acc.mul(&d0inv));
        }
        Ok(series[t].clone())
    }

    /// Complete pole data: every movable pole as a canonical linear form
    /// with its order, plus the order at z = 0 and degree at infinity.
    ///
    /// Denominators built by the series assembly carry their factorization;
    /// otherwise the factors are reconstructed by gcd square-free splitting
    /// and verified root extraction. A denominator factor that is not linear
    /// in z is reported as `NonLinearPole`.
    pub fn pole_support(&self) -> Result<PoleSupport, ExactError> {
        if self.den.is_zero() {
            return Err(ExactError::DivByZero);
        }
        let factors = match &self.factors {
            Some(f) => f.clone(),
            None => reconstruct_linear_factors(&self.den)?,
        };
        let mut poles = Vec::new();
        let mut order_at_zero = 0u32;
        for (c, mult) in &factors {
            // Reduce by the numerator's order of vanishing at the root.
            let mut effective = *mult;
            let mut num = self.num.clone();
            while effective > 0 {
                match num.div_monic_linear(c) {
                    Some(q) => {
                        num = q;
                        effective -= 1;
                    }
                    None => break,
                }
            }
            if effective == 0 {
                continue;
            }
            if c.is_zero() {
                order_at_zero = effective;
                continue;
            }
            // Root of (z + c) is z = -c.
            let root = c.neg();
            match LinearForm::try_from_rat(&root) {
                Some(loc) => poles.push(Pole {
                    location: loc,
                    order: effective,
                }),
                None => {
                    return Err(ExactError::NonLinearPole(format!(
                        "pole at z = {root} is not a homogeneous linear form"
                    )))
                }
            }
        }
        poles.sort_by(|a, b| a.location.cmp(&b.location));
        let deg_num = self.num.degree().map(|d| d as i64).unwrap_or(i64::MIN);
        let deg_den = self.den.degree().expect("nonzero denominator") as i64;
        Ok(PoleSupport {
            poles,
            order_at_zero,
            degree_at_infinity: if self.num.is_zero() {
                i64::MIN
            } else {
                deg_num - deg_den
            },
        })
    }

    /// Exact value at a rational alpha assignment and rational z.
    pub fn eval(&self, point: &[Rat], z: &Rat) -> Result<Rat, ExactError> {
        let zr = AlphaRat::constant(self.nvars(), z.clone());
        let d = self.den.eval_z(&zr).eval(point)?;
        if d.is_zero() {
            return Err(ExactError::SpecializationFailed);
        }
        let n = self.num.eval_z(&zr).eval(point)?;
        Ok(n / d)
    }

    /// Derivative in z by the quotient rule; drops the factor cache.
    pub fn partial_z(&self) -> ZRat {
        ZRat {
            num: self
                .num
                .partial_z()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.partial_z())),
            den: self.den.mul(&self.den),
            factors: None,
        }
    }
}

impl PartialEq for ZRat {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for ZRat {}

impl fmt::Display for ZRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == ZPoly::one(self.nvars()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

impl Serialize for ZRat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ZRat", 2)?;
        st.serialize_field("num", &self.num.to_string())?;
        st.serialize_field("den", &self.den.to_string())?;
        st.end()
    }
}

fn expand_factors(nvars: usize, factors: &FactorMap) -> ZPoly {
    let mut den = ZPoly::one(nvars);
    for (c, mult) in factors {
        let lin = ZPoly::from_coeffs(nvars, vec![c.clone(), AlphaRat::one(nvars)]);
        for _ in 0..*mult {
            den = den.mul(&lin);
        }
    }
    den
}

/// prod of (lcm / own) factors, used for factored addition.
fn complement(nvars: usize, lcm: &FactorMap, own: &FactorMap) -> ZPoly {
    let mut out = ZPoly::one(nvars);
    for (c, m) in lcm {
        let have = own.get(c).copied().unwrap_or(0);
        let lin = ZPoly::from_coeffs(nvars, vec![c.clone(), AlphaRat::one(nvars)]);
        for _ in 0..(m - have) {
            out = out.mul(&lin);
        }
    }
    out
}

/// Factor a denominator into monic z-linear factors, or fail with
/// `NonLinearPole`.
///
/// Square-free splitting by gcd in Q(alpha)[z], then per square-free part:
/// evaluate at a random rational alpha point, read off the rational roots,
/// lift each simple root rho to a candidate linear form via implicit
/// differentiation (root'_i = -S_alpha_i / S_z at (rho, point)), and verify
/// the candidates by exact synthetic division.
fn reconstruct_linear_factors(den: &ZPoly) -> Result<FactorMap, ExactError> {
    let mut factors: FactorMap = BTreeMap::new();
    let mut rest = monic(den)?;
    // Radical peeling: gcd(rest, rest') drops every multiplicity by one, so
    // each pass adds one count for the roots still present.
    let mut passes = 0u32;
    while rest.degree().unwrap_or(0) > 0 {
        let d = rest.partial_z();
        let g = zpoly_gcd(&rest, &d)?;
        let radical = zpoly_exact_div(&rest, &g)?;
        if radical.degree().unwrap_or(0) > 0 {
            let roots = split_squarefree(&radical)?;
            for c in roots {
                *factors.entry(c).or_insert(0) += 1;
            }
        }
        rest = g;
        passes += 1;
        if passes > 64 {
            return Err(ExactError::NonLinearPole(
                "denominator multiplicity out of range".into(),
            ));
        }
    }
    Ok(factors)
}

fn monic(p: &ZPoly) -> Result<ZPoly, ExactError> {
    let lc = p.leading_coeff().ok_or(ExactError::DivByZero)?;
    Ok(p.scale(&lc.inverse()?))
}

fn zpoly_exact_div(a: &ZPoly, b: &ZPoly) -> Result<ZPoly, ExactError> {
    // Long division; remainder must vanish.
    let nvars = a.nvars();
    let db = b.degree().ok_or(ExactError::DivByZero)?;
    let lb = b.leading_coeff().unwrap().clone();
    let mut rem = a.clone();
    let mut quot = vec![AlphaRat::zero(nvars); a.degree().unwrap_or(0).saturating_sub(db) + 1];
    while let Some(dr) = rem.degree() {
        if dr < db {
            break;
        }
        let q = rem.leading_coeff().unwrap().div(&lb)?;
        let shift = dr - db;
        quot[shift] = quot[shift].add(&q);
        let mut sub_coeffs = vec![AlphaRat::zero(nvars); shift + db + 1];
        for j in 0..=db {
            sub_coeffs[shift + j] = b.coeff(j).mul(&q);
        }
        rem = rem.sub(&ZPoly::from_coeffs(nvars, sub_coeffs));
    }
    if !rem.is_zero() {
        return Err(ExactError::NonLinearPole(
            "inexact division during denominator factoring".into(),
        ));
    }
    Ok(ZPoly::from_coeffs(nvars, quot))
}

fn zpoly_rem(a: &ZPoly, b: &ZPoly) -> Result<ZPoly, ExactError> {
    let nvars = a.nvars();
    let db = b.degree().ok_or(ExactError::DivByZero)?;
    let lb = b.leading_coeff().unwrap().clone();
    let mut rem = a.clone();
    while let Some(dr) = rem.degree() {
        if dr < db {
            break;
        }
        let q = rem.leading_coeff().unwrap().div(&lb)?;
        let shift = dr - db;
        let mut sub_coeffs = vec![AlphaRat::zero(nvars); shift + db + 1];
        for j in 0..=db {
            sub_coeffs[shift + j] = b.coeff(j).mul(&q);
        }
        rem = rem.sub(&ZPoly::from_coeffs(nvars, sub_coeffs));
    }
    Ok(rem)
}

fn zpoly_gcd(a: &ZPoly, b: &ZPoly) -> Result<ZPoly, ExactError> {
    // Remainders are renormalized to monic at every step; over a rational
    // function field this is what keeps the coefficient sizes in check.
    let mut x = monic(a)?;
    let mut y = monic(b)?;
    while !y.is_zero() {
        let r = zpoly_rem(&x, &y)?;
        x = y;
        y = if r.is_zero() { r } else { monic(&r)? };
    }
    monic(&x)
}

fn split_squarefree(p: &ZPoly) -> Result<Vec<AlphaRat>, ExactError> {
    let nvars = p.nvars();
    let deg = p.degree().unwrap_or(0);
    let mut rng = DetRng::new(0x5eedf00d);
    'attempt: for _ in 0..8 {
        let point: Vec<Rat> = (0..nvars).map(|_| rng.small_rat(50, 8)).collect();
        let Ok(uni) = p.eval_alpha(&point) else {
            continue;
        };
        if uni.len() != deg + 1 {
            continue; // leading coefficient vanished at this point
        }
        let Some(rhos) = rational_roots(&uni) else {
            // A z-linear factor evaluates to a rational root at every
            // rational point, so failure to split certifies nonlinearity.
            return Err(ExactError::NonLinearPole(
                "denominator factor without rational root at a random point".into(),
            ));
        };
        if rhos.len() != deg {
            return Err(ExactError::NonLinearPole(
                "denominator factor does not split into linear factors".into(),
            ));
        }
        let dz = p.partial_z();
        let mut out = Vec::with_capacity(deg);
        let mut remaining = p.clone();
        for rho in &rhos {
            let zval = AlphaRat::constant(nvars, rho.clone());
            let Ok(slope) = dz.eval_z(&zval).eval(&point) else {
                continue 'attempt;
            };
            if slope.is_zero() {
                continue 'attempt; // roots collided at this point; retry
            }
            // Implicit differentiation of S(z, alpha) = 0 along the root.
            let mut coeffs = Vec::with_capacity(nvars);
            for i in 0..nvars {
                let Ok(si) = p.partial_alpha(i).eval_z(&zval).eval(&point) else {
                    continue 'attempt;
                };
                coeffs.push(-si / slope.clone());
            }
            let root_poly = super::poly::AlphaPoly::linear(nvars, &coeffs);
            let c = AlphaRat::from_poly(root_poly.neg()); // factor z + c with c = -root
            match remaining.div_monic_linear(&c) {
                Some(q) => {
                    remaining = q;
                    out.push(c);
                }
                None => continue 'attempt,
            }
        }
        if remaining.degree().unwrap_or(0) == 0 {
            return Ok(out);
        }
    }
    Err(ExactError::NonLinearPole(
        "could not verify a linear factorization of the denominator".into(),
    ))
}

/// All rational roots (with multiplicity) of a rational-coefficient
/// polynomial, or None when it does not split over Q.
fn rational_roots(coeffs: &[Rat]) -> Option<Vec<Rat>> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed};
    let deg = coeffs.len().checked_sub(1)?;
    if deg == 0 {
        return Some(Vec::new());
    }
    // Clear denominators to integer coefficients.
    let mut den_lcm = BigInt::one();
    for c in coeffs {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den_lcm / c.denom())).collect();
    let mut poly = ints;
    let mut roots = Vec::new();
    loop {
        while poly.last().map(|c| c.is_zero()).unwrap_or(false) {
            poly.pop();
        }
        if poly.len() <= 1 {
            break;
        }
        // Strip roots at zero.
        if poly[0].is_zero() {
            roots.push(Rat::zero());
            poly.remove(0);
            continue;
        }
        let a0 = poly[0].abs();
        let an = poly.last().unwrap().abs();
        let mut found = None;
        'search: for p in divisors(&a0) {
            for q in divisors(&an) {
                for sign in [1i32, -1] {
                    let cand = Rat::new(&p * BigInt::from(sign), q.clone());
                    if eval_int_poly(&poly, &cand).is_zero() {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
        }
        let root = found?;
        roots.push(root.clone());
        poly = deflate(&poly, &root);
    }
    Some(roots)
}

fn divisors(n: &num_bigint::BigInt) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    use num_traits::{Signed, ToPrimitive};
    // Roots here come from small exact data; denominators stay tiny.
    let n = n.abs().to_u128().unwrap_or(u128::MAX);
    let mut out = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d != n / d {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
        if d > 1_000_000 {
            break;
        }
    }
    out.sort();
    out
}

fn eval_int_poly(poly: &[num_bigint::BigInt], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in poly.iter().rev() {
        acc = acc * x.clone() + Rat::from_integer(c.clone());
    }
    acc
}

fn deflate(poly: &[num_bigint::BigInt], root: &Rat) -> Vec<num_bigint::BigInt> {
    // Divide by (x - root) over Q, then clear denominators again.
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::One;
    let rats: Vec<Rat> = poly.iter().map(|c| Rat::from_integer(c.clone())).collect();
    let mut quot = vec![Rat::zero(); rats.len() - 1];
    let mut carry = Rat::zero();
    for j in (1..rats.len()).rev() {
        carry = rats[j].clone() + carry * root.clone();
        quot[j - 1] = carry.clone();
    }
    let mut den_lcm = BigInt::one();
    for c in &quot {
        den_lcm = den_lcm.lcm(c.denom());
    }
    quot.iter().map(|c| c.numer() * (&den_lcm / c.denom())).collect()
}
