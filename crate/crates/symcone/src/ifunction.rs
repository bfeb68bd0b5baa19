//! Fixed-sector restrictions of the extended I-function as exact truncated
//! series with rational-function-of-z coefficients.
//!
//! The series is stored with the sign convention already applied: the
//! object under verification is the restriction of I(Q, t, x, -z), so pole
//! and recursion checks consume the stored coefficients directly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::combinat::{
    enumerate_labelings, LabelConvention, Labeling, Partition,
};
use crate::exactalg::rat::{factorial, rat_i, rat_u, Rat};
use crate::exactalg::{AlphaRat, ZPoly, ZRat};
use crate::sectors::FixedSector;
use crate::symgroup::{ClassList, PermTable, SymgroupError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IfunError {
    #[error(transparent)]
    Symgroup(#[from] SymgroupError),
    #[error(transparent)]
    Combinat(#[from] crate::combinat::CombinatError),
    #[error("labeling does not match the sector monodromy")]
    ShapeMismatch,
}

/// Multi-index of one series coefficient: curve degree, insertion
/// exponents per partition, and divisor-variable exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SeriesIndex {
    pub beta: u32,
    #[serde(serialize_with = "serialize_x_as_pairs")]
    pub x: BTreeMap<Partition, u32>,
    pub t: Vec<u32>,
}

fn serialize_x_as_pairs<S: serde::Serializer>(
    x: &BTreeMap<Partition, u32>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(x.len()))?;
    for (p, k) in x {
        seq.serialize_element(&(p, k))?;
    }
    seq.end()
}

impl SeriesIndex {
    pub fn base(num_coords: usize) -> Self {
        SeriesIndex {
            beta: 0,
            x: BTreeMap::new(),
            t: vec![0; num_coords],
        }
    }

    pub fn x_total(&self) -> u32 {
        self.x.values().sum()
    }

    pub fn t_total(&self) -> u32 {
        self.t.iter().sum()
    }

    pub fn with_beta(&self, beta: u32) -> Self {
        let mut out = self.clone();
        out.beta = beta;
        out
    }
}

impl fmt::Display for SeriesIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q^{}", self.beta)?;
        for (p, k) in &self.x {
            write!(f, " x{p}^{k}")?;
        }
        for (i, &m) in self.t.iter().enumerate() {
            if m > 0 {
                write!(f, " t{i}^{m}")?;
            }
        }
        Ok(())
    }
}

/// Truncation caps for the series assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub beta: u32,
    pub x_total: u32,
    pub t_total: u32,
}

/// Assembly options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IOpts {
    pub convention: LabelConvention,
    /// Multiply by the truncated divisor exponential when t caps allow it.
    pub include_exp_factor: bool,
}

impl Default for IOpts {
    fn default() -> Self {
        IOpts {
            convention: LabelConvention::NonNeg,
            include_exp_factor: false,
        }
    }
}

/// A fixed-sector restriction: finitely many nonzero coefficients within
/// the caps, each an exact rational function of z.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictedSeries {
    pub sector: FixedSector,
    pub caps: Caps,
    pub opts: IOpts,
    pub coeffs: BTreeMap<SeriesIndex, ZRat>,
}

impl RestrictedSeries {
    pub fn coeff(&self, idx: &SeriesIndex) -> ZRat {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| ZRat::zero(self.sector.num_coords()))
    }
}

/// All x-exponent maps over partitions of d with total at most cap.
pub fn enumerate_x_indices(d: u32, cap: u32) -> Vec<BTreeMap<Partition, u32>> {
    let parts = Partition::all_of(d);
    let mut out = vec![BTreeMap::new()];
    for p in parts {
        let mut next = Vec::new();
        for base in &out {
            let used: u32 = base.values().sum();
            for k in 0..=(cap - used) {
                let mut m = base.clone();
                if k > 0 {
                    m.insert(p.clone(), k);
                }
                next.push(m);
            }
        }
        out = next;
    }
    out.sort();
    out.dedup();
    out
}

/// All t-exponent vectors of length n with total at most cap.
pub fn enumerate_t_indices(n: usize, cap: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n]];
    if cap == 0 || n == 0 {
        return out;
    }
    let mut stack = vec![(vec![], 0u32)];
    out.clear();
    while let Some((prefix, used)) = stack.pop() {
        if prefix.len() == n {
            out.push(prefix);
            continue;
        }
        for v in 0..=(cap - used) {
            let mut p = prefix.clone();
            p.push(v);
            stack.push((p, used + v));
        }
    }
    out.sort();
    out
}

/// One representative per labeling class: labelings are multisets of
/// (part, label) pairs per coordinate, so occurrence assignments that
/// permute equal parts coincide. The |S_sigma|/|S_sigma,L| factor counts
/// exactly the occurrence assignments in each class.
pub fn enumerate_labeling_classes(
    sigma: &crate::combinat::Multipartition,
    total: u32,
    convention: LabelConvention,
) -> Vec<Labeling> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for l in enumerate_labelings(sigma, total, convention) {
        let mut key: Vec<Vec<(u32, u32)>> = Vec::with_capacity(sigma.num_coords());
        for (coord, component) in sigma.components().iter().enumerate() {
            let mut pairs: Vec<(u32, u32)> = component
                .parts()
                .iter()
                .enumerate()
                .map(|(idx, &p)| (p, l.label(coord, idx)))
                .collect();
            pairs.sort_unstable();
            key.push(pairs);
        }
        if seen.insert(key) {
            out.push(l);
        }
    }
    out
}

/// The class list whose factorization count weights the x-monomial:
/// the sector's underlying partition followed by each inserted partition
/// with its multiplicity.
fn hurwitz_list(sector: &FixedSector, x: &BTreeMap<Partition, u32>) -> ClassList {
    let d = sector.degree();
    let mut classes = vec![sector.sigma.underlying()];
    for (p, &k) in x {
        for _ in 0..k {
            classes.push(p.clone());
        }
    }
    ClassList::new(d, classes).expect("all classes are partitions of d")
}

/// The pole group of a labeling relative to an edge weight: parts at the
/// source coordinate whose label covers a full q-cycle, i.e.
/// i(eta) = from_coord, q*eta integral, and L_eta >= q*eta.
pub fn pole_group(
    sector: &FixedSector,
    labeling: &Labeling,
    q: &Rat,
    from_coord: usize,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (coord, component) in sector.sigma.components().iter().enumerate() {
        if coord != from_coord {
            continue;
        }
        for (idx, &eta) in component.parts().iter().enumerate() {
            let qeta = q.clone() * rat_u(eta as u64);
            if !qeta.is_integer() {
                continue;
            }
            let qeta = u64::try_from(&qeta.to_integer()).expect("positive");
            if labeling.label(coord, idx) as u64 >= qeta {
                out.push((coord, idx));
            }
        }
    }
    out
}

/// The full term of one (labeling, x-index) pair:
/// (-z) * x^k H / (k! (-z)^{|k|}) * |S_sigma|/|S_sigma,L| / all
/// gamma-products. Zero when the factorization count vanishes.
fn full_term(
    sector: &FixedSector,
    table: &PermTable,
    x: &BTreeMap<Partition, u32>,
    labeling: &Labeling,
) -> Result<ZRat, IfunError> {
    let n = sector.num_coords();
    let h = table.factorization_count(&hurwitz_list(sector, x))?;
    if h == 0 {
        return Ok(ZRat::zero(n));
    }
    let k_total: u32 = x.values().sum();
    let mut k_factorial = Rat::one();
    for &k in x.values() {
        k_factorial *= factorial(k as u64);
    }
    let aut_ratio = Rat::new(
        sector.sigma.aut_order().into(),
        labeling.labeled_aut_order(&sector.sigma)?.into(),
    );
    let sign = if k_total.is_multiple_of(2) { rat_i(1) } else { rat_i(-1) };
    let scalar = sign * rat_u(h) * aut_ratio / k_factorial;
    let mut factors = vec![(AlphaRat::zero(n), AlphaRat::one(n), k_total)];
    for (coord, component) in sector.sigma.components().iter().enumerate() {
        for (idx, &eta) in component.parts().iter().enumerate() {
            factors.extend(part_gamma_factors(sector, coord, eta, labeling.label(coord, idx)));
        }
    }
    let num = ZPoly::z(n).neg().scale(&AlphaRat::constant(n, scalar));
    Ok(ZRat::from_factored(num, AlphaRat::one(n), &factors).expect("nonzero factors"))
}

/// The gamma-product of one part occurrence: prod over gamma = 1..=L and
/// all coordinates i of (r_sigma (a_{i(eta)} - a_i) - (gamma/eta) z),
/// returned as factored linear data (constant, z-coefficient, 1).
fn part_gamma_factors(
    sector: &FixedSector,
    coord: usize,
    eta: u32,
    label: u32,
) -> Vec<(AlphaRat, AlphaRat, u32)> {
    let n = sector.num_coords();
    let rs = rat_u(sector.monodromy_order());
    let mut out = Vec::new();
    for gamma in 1..=label {
        for i in 0..n {
            let constant = if i == coord {
                AlphaRat::zero(n)
            } else {
                AlphaRat::var(n, coord)
                    .sub(&AlphaRat::var(n, i))
                    .scale(&rs)
            };
            let zcoef = AlphaRat::constant(n, -Rat::new(gamma.into(), eta.into()));
            out.push((constant, zcoef, 1));
        }
    }
    out
}

/// The term of the restriction attached to one labeling and one x-index,
/// with the pole-group parts' gamma-products alone in the denominator:
/// (|S_sigma| / |S_{sigma,L}|) / prod over pole-group parts.
pub fn pole_part_term(
    sector: &FixedSector,
    labeling: &Labeling,
    q: &Rat,
    from_coord: usize,
) -> Result<ZRat, IfunError> {
    if !labeling.matches_shape(&sector.sigma) {
        return Err(IfunError::ShapeMismatch);
    }
    let n = sector.num_coords();
    let group = pole_group(sector, labeling, q, from_coord);
    let mut factors = Vec::new();
    for &(coord, idx) in &group {
        let eta = sector.sigma.component(coord).parts()[idx];
        factors.extend(part_gamma_factors(sector, coord, eta, labeling.label(coord, idx)));
    }
    let aut_ratio = Rat::new(
        sector.sigma.aut_order().into(),
        labeling.labeled_aut_order(&sector.sigma)?.into(),
    );
    let num = ZPoly::constant(AlphaRat::constant(n, aut_ratio));
    Ok(ZRat::from_factored(num, AlphaRat::one(n), &factors).expect("nonzero factors"))
}

/// The complementary factor: -z times the x-insertion weight, divided by
/// the gamma-products of every part outside the pole group.
pub fn regular_prefactor(
    sector: &FixedSector,
    table: &PermTable,
    x: &BTreeMap<Partition, u32>,
    labeling: &Labeling,
    q: &Rat,
    from_coord: usize,
) -> Result<ZRat, IfunError> {
    if !labeling.matches_shape(&sector.sigma) {
        return Err(IfunError::ShapeMismatch);
    }
    let n = sector.num_coords();
    let group = pole_group(sector, labeling, q, from_coord);
    let h = table.factorization_count(&hurwitz_list(sector, x))?;
    if h == 0 {
        return Ok(ZRat::zero(n));
    }
    let k_total: u32 = x.values().sum();
    let mut k_factorial = Rat::one();
    for &k in x.values() {
        k_factorial *= factorial(k as u64);
    }
    // -z * H / (k! (-z)^{k_total}): merge signs and put z^{k_total} in the
    // denominator as a factor at zero.
    let sign = if k_total.is_multiple_of(2) { rat_i(1) } else { rat_i(-1) };
    let mut factors = vec![(
        AlphaRat::zero(n),
        AlphaRat::one(n),
        k_total,
    )];
    for (coord, component) in sector.sigma.components().iter().enumerate() {
        for (idx, &eta) in component.parts().iter().enumerate() {
            if group.contains(&(coord, idx)) {
                continue;
            }
            factors.extend(part_gamma_factors(sector, coord, eta, labeling.label(coord, idx)));
        }
    }
    let scalar = sign * rat_u(h) / k_factorial;
    let num = ZPoly::z(n).neg().scale(&AlphaRat::constant(n, scalar));
    Ok(ZRat::from_factored(num, AlphaRat::one(n), &factors).expect("nonzero factors"))
}

/// The divisor part of the exponent: beta + sum over parts of
/// r_sigma (a_{i(eta)} - a_i) / (-z), one value per coordinate i.
fn divisor_values(sector: &FixedSector, beta: u32) -> Vec<ZRat> {
    let n = sector.num_coords();
    let rs = rat_u(sector.monodromy_order());
    (0..n)
        .map(|i| {
            let mut linear = AlphaRat::zero(n);
            for (coord, _eta) in sector.sigma.labeled_parts() {
                linear = linear.add(
                    &AlphaRat::var(n, coord)
                        .sub(&AlphaRat::var(n, i))
                        .scale(&rs),
                );
            }
            // beta + linear/(-z)
            let inv_minus_z = ZRat::from_factored(
                ZPoly::constant(AlphaRat::constant(n, rat_i(-1))),
                AlphaRat::one(n),
                &[(AlphaRat::zero(n), AlphaRat::one(n), 1)],
            )
            .expect("z is a valid factor");
            ZRat::from_alpharat(AlphaRat::constant(n, rat_u(beta as u64)))
                .add(&inv_minus_z.scale(&linear))
        })
        .collect()
}

/// Assemble the fixed-sector restriction of the I-function within caps.
pub fn i_restricted(
    sector: &FixedSector,
    table: &PermTable,
    caps: Caps,
    opts: IOpts,
) -> Result<RestrictedSeries, IfunError> {
    let n = sector.num_coords();
    let d = sector.degree();
    let x_indices = enumerate_x_indices(d, caps.x_total);
    let t_indices = if opts.include_exp_factor {
        enumerate_t_indices(n, caps.t_total)
    } else {
        vec![vec![0; n]]
    };
    let mut coeffs: BTreeMap<SeriesIndex, ZRat> = BTreeMap::new();
    for beta in 0..=caps.beta {
        let divisors = if opts.include_exp_factor && caps.t_total > 0 {
            divisor_values(sector, beta)
        } else {
            Vec::new()
        };
        for labeling in enumerate_labeling_classes(&sector.sigma, beta, opts.convention) {
            for x in &x_indices {
                let term = full_term(sector, table, x, &labeling)?;
                if term.is_zero() {
                    continue;
                }
                for t in &t_indices {
                    let t_total: u32 = t.iter().sum();
                    if t_total > caps.t_total {
                        continue;
                    }
                    let mut full = term.clone();
                    if t_total > 0 {
                        // coefficient of prod t_i^{m_i} in exp(sum t_i D_i)
                        let mut fact = Rat::one();
                        for (i, &m) in t.iter().enumerate() {
                            for _ in 0..m {
                                full = full.mul(&divisors[i]);
                            }
                            fact *= factorial(m as u64);
                        }
                        full = full.scale(&AlphaRat::constant(n, Rat::one() / fact));
                    }
                    if full.is_zero() {
                        continue;
                    }
                    let idx = SeriesIndex {
                        beta,
                        x: x.clone(),
                        t: t.clone(),
                    };
                    let entry = coeffs
                        .remove(&idx)
                        .unwrap_or_else(|| ZRat::zero(n))
                        .add(&full);
                    if !entry.is_zero() {
                        coeffs.insert(idx, entry);
                    }
                }
            }
        }
    }
    Ok(RestrictedSeries {
        sector: sector.clone(),
        caps,
        opts,
        coeffs,
    })
}

/// Independent direct formula for the degree-one reduction: on the sector
/// with the single point at coordinate j, the coefficient of Q^beta at
/// x = t = 0 is -z / prod_{gamma=1..beta} prod_i (a_j - a_i - gamma z).
pub fn classical_projective_restriction(num_coords: usize, j: usize, beta: u32) -> ZRat {
    let n = num_coords;
    let mut factors = Vec::new();
    for gamma in 1..=beta {
        for i in 0..n {
            let constant = if i == j {
                AlphaRat::zero(n)
            } else {
                AlphaRat::var(n, j).sub(&AlphaRat::var(n, i))
            };
            factors.push((constant, AlphaRat::constant(n, rat_i(-(gamma as i64))), 1));
        }
    }
    ZRat::from_factored(ZPoly::z(n).neg(), AlphaRat::one(n), &factors).expect("nonzero factors")
}
