//! Torus-fixed sectors of the inertia stack and the one-edge decorated
//! trees based at them, with their weights and recursion coefficients.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::combinat::{Multipartition, OrderedZeroPartition, Partition};
use crate::exactalg::rat::{binomial, rat_i, rat_u, Rat};
use crate::exactalg::{AlphaPoly, AlphaRat, LinearForm};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SectorError {
    #[error("Laurent order {0} out of range 1..={1}")]
    BadExponent(i64, u32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// A torus-fixed point of the inertia stack: a point distribution mu
/// refined by a monodromy multipartition sigma.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FixedSector {
    pub mu: OrderedZeroPartition,
    pub sigma: Multipartition,
}

impl FixedSector {
    pub fn new(mu: OrderedZeroPartition, sigma: Multipartition) -> Result<Self, SectorError> {
        if sigma.num_coords() != mu.len() {
            return Err(SectorError::ShapeMismatch(
                "sigma must have one component per coordinate".into(),
            ));
        }
        for (i, c) in sigma.components().iter().enumerate() {
            if c.sum() != mu.entries()[i] {
                return Err(SectorError::ShapeMismatch(format!(
                    "component {i} sums to {} but mu_{i} = {}",
                    c.sum(),
                    mu.entries()[i]
                )));
            }
        }
        Ok(FixedSector { mu, sigma })
    }

    pub fn degree(&self) -> u32 {
        self.mu.total()
    }

    pub fn num_coords(&self) -> usize {
        self.mu.len()
    }

    /// Order of the isotropy at the sector: lcm of all parts of sigma.
    pub fn monodromy_order(&self) -> u64 {
        self.sigma.lcm()
    }

    pub fn is_ones(&self) -> bool {
        self.sigma.is_ones()
    }

    /// Equivariant Euler class of the sector tangent space:
    /// prod over parts eta of prod_{i != i(eta)} (a_{i(eta)} - a_i).
    pub fn euler_class(&self) -> AlphaPoly {
        let n = self.num_coords();
        let mut acc = AlphaPoly::one(n);
        for (coord, _part) in self.sigma.labeled_parts() {
            for i in 0..n {
                if i == coord {
                    continue;
                }
                acc = acc.mul(&AlphaPoly::var(n, coord).sub(&AlphaPoly::var(n, i)));
            }
        }
        acc
    }

    /// All fixed sectors for degree d on r+1 coordinates, deterministic
    /// order.
    pub fn enumerate(d: u32, r: u32) -> Vec<FixedSector> {
        let mut out = Vec::new();
        for mu in OrderedZeroPartition::enumerate(d, r) {
            for sigma in Multipartition::enumerate(&mu) {
                out.push(FixedSector { mu: mu.clone(), sigma });
            }
        }
        out
    }
}

impl fmt::Display for FixedSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.mu, self.sigma)
    }
}

/// A one-edge decorated tree based at a fixed sector: moving parts `moving`
/// leave coordinate `from_coord` for `to_coord` with degree ratio q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeClass {
    pub base: FixedSector,
    pub from_coord: usize,
    pub to_coord: usize,
    pub moving: Partition,
    #[serde(serialize_with = "crate::exactalg::rat::serialize_rat_string")]
    pub q: Rat,
}

/// Which form of the recursion coefficient to use: `rsigma_power` multiplies
/// every linear factor in its denominator by that power of the sector's
/// monodromy order. Power 0 is the coefficient as printed; the verifier's
/// normalization probe determines empirically which power satisfies the
/// recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RcVariant {
    pub rsigma_power: i64,
}

impl RcVariant {
    pub const PRINTED: RcVariant = RcVariant { rsigma_power: 0 };

    pub fn rescaled(power: i64) -> RcVariant {
        RcVariant { rsigma_power: power }
    }
}

impl EdgeClass {
    /// Degrees carried by the moving parts: beta_eta = q * eta, integral by
    /// construction.
    pub fn part_degrees(&self) -> Vec<u64> {
        self.moving
            .parts()
            .iter()
            .map(|&eta| {
                let b = self.q.clone() * rat_u(eta as u64);
                debug_assert!(b.is_integer());
                u64::try_from(&b.to_integer()).expect("positive degree")
            })
            .collect()
    }

    /// Total curve degree of the edge.
    pub fn beta(&self) -> u64 {
        self.part_degrees().iter().sum()
    }

    pub fn mov_count(&self) -> u32 {
        self.moving.len() as u32
    }

    /// Stationary parts: the base monodromy with the moving parts removed
    /// at the source coordinate.
    pub fn stationary(&self) -> Multipartition {
        let stripped = self
            .base
            .sigma
            .component(self.from_coord)
            .difference(&self.moving)
            .expect("moving parts are a submultiset");
        self.base.sigma.with_component(self.from_coord, stripped)
    }

    /// w = (a_{from} - a_{to}) / q.
    pub fn weight(&self) -> LinearForm {
        LinearForm::coordinate_difference(
            self.base.num_coords(),
            self.from_coord,
            self.to_coord,
            Rat::one() / self.q.clone(),
        )
    }

    /// wbar = r_sigma * w, the weight seen on coarse cotangent classes.
    pub fn scaled_weight(&self) -> LinearForm {
        let r = rat_u(self.base.monodromy_order());
        self.weight().rescaled(&r)
    }

    /// The sector at the far vertex of the edge.
    pub fn target(&self) -> FixedSector {
        let moved: u32 = self.moving.sum();
        let mut mu = self.base.mu.entries().to_vec();
        mu[self.from_coord] -= moved;
        mu[self.to_coord] += moved;
        let stripped = self
            .base
            .sigma
            .component(self.from_coord)
            .difference(&self.moving)
            .expect("moving parts are a submultiset");
        let grown = self.base.sigma.component(self.to_coord).union(&self.moving);
        let sigma = self
            .base
            .sigma
            .with_component(self.from_coord, stripped)
            .with_component(self.to_coord, grown);
        FixedSector::new(OrderedZeroPartition::new(mu), sigma).expect("target shape is consistent")
    }

    /// The linear factors of the edge's recursion-coefficient denominator:
    /// for each moving part with degree b, all
    /// ((b - B)/b) a_from + (B/b) a_to - a_i over 1 <= B <= b, 0 <= i <= r,
    /// excluding (B, i) = (b, to_coord).
    fn denominator_factors(&self) -> Vec<AlphaPoly> {
        let n = self.base.num_coords();
        let mut out = Vec::new();
        for b in self.part_degrees() {
            for big_b in 1..=b {
                for i in 0..n {
                    if big_b == b && i == self.to_coord {
                        continue;
                    }
                    let mut coeffs = vec![Rat::zero(); n];
                    coeffs[self.from_coord] += Rat::new((b - big_b).into(), b.into());
                    coeffs[self.to_coord] += Rat::new(big_b.into(), b.into());
                    coeffs[i] -= Rat::one();
                    out.push(AlphaPoly::linear(n, &coeffs));
                }
            }
        }
        out
    }

    /// RC of the edge at Laurent order a.
    pub fn recursion_coefficient(
        &self,
        a: u32,
        variant: RcVariant,
    ) -> Result<AlphaRat, SectorError> {
        let mov = self.mov_count();
        if a == 0 || a > mov {
            return Err(SectorError::BadExponent(a as i64, mov));
        }
        let n = self.base.num_coords();
        let sign = if (mov - a).is_multiple_of(2) { 1 } else { -1 };
        let choose_sub = self
            .base
            .sigma
            .component(self.from_coord)
            .multiset_binomial(&self.moving);
        let pre = rat_i(sign)
            * self.q.pow(-(mov as i32))
            * rat_u(choose_sub)
            * rat_u(binomial((mov - 1) as u64, (a - 1) as u64));
        let rs = rat_u(self.base.monodromy_order());
        let mut den = AlphaPoly::one(n);
        for f in self.denominator_factors() {
            let f = if variant.rsigma_power == 0 {
                f
            } else {
                f.scale(&pow_rat(&rs, variant.rsigma_power))
            };
            den = den.mul(&f);
        }
        AlphaRat::new(AlphaPoly::constant(n, pre), den)
            .map_err(|_| SectorError::ShapeMismatch("degenerate edge denominator".into()))
    }

    /// The full product of moving-weight factors, computed by its unreduced
    /// two-sided form: smoothing weights over A + B = b with both zero
    /// weights excluded, divided by the moving parts' sector Euler factors.
    /// Equals the recursion-coefficient denominator after cancellation.
    pub fn moving_weight_product(&self) -> AlphaRat {
        let n = self.base.num_coords();
        let mut num = AlphaPoly::one(n);
        for b in self.part_degrees() {
            for big_a in 0..=b {
                let big_b = b - big_a;
                for i in 0..n {
                    if big_a == 0 && i == self.to_coord {
                        continue;
                    }
                    if big_b == 0 && i == self.from_coord {
                        continue;
                    }
                    let mut coeffs = vec![Rat::zero(); n];
                    coeffs[self.from_coord] += Rat::new(big_a.into(), b.into());
                    coeffs[self.to_coord] += Rat::new(big_b.into(), b.into());
                    coeffs[i] -= Rat::one();
                    num = num.mul(&AlphaPoly::linear(n, &coeffs));
                }
            }
        }
        let mut den = AlphaPoly::one(n);
        for _eta in self.moving.parts() {
            for i in 0..n {
                if i == self.from_coord {
                    continue;
                }
                den = den.mul(
                    &AlphaPoly::var(n, self.from_coord).sub(&AlphaPoly::var(n, i)),
                );
            }
        }
        AlphaRat::new(num, den).expect("distinct coordinates give nonzero factors")
    }
}

fn pow_rat(r: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    let base = if e < 0 {
        Rat::one() / r.clone()
    } else {
        r.clone()
    };
    for _ in 0..e.unsigned_abs() {
        acc *= base.clone();
    }
    acc
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} -> {} moving {} q={}",
            self.base, self.from_coord, self.to_coord, self.moving, self.q
        )
    }
}

/// All one-edge decorated trees based at the sector with total degree at
/// most `beta_cap`, deterministic order.
pub fn enumerate_edges(sector: &FixedSector, beta_cap: &Rat) -> Vec<EdgeClass> {
    let n = sector.num_coords();
    let mut out = Vec::new();
    if beta_cap.is_negative() || beta_cap.is_zero() {
        return out;
    }
    for from_coord in 0..n {
        let component = sector.sigma.component(from_coord);
        if component.is_empty() {
            continue;
        }
        for to_coord in 0..n {
            if to_coord == from_coord {
                continue;
            }
            for moving in component.submultisets_nonempty() {
                // q ranges over the positive multiples of 1/gcd(moving),
                // since q*eta must be integral for every moving part.
                let g = moving.gcd();
                let total = moving.sum() as u64;
                // j/g * total <= cap  =>  j <= cap * g / total
                let jmax_rat = beta_cap.clone() * rat_u(g) / rat_u(total);
                let jmax = jmax_rat.floor().to_integer();
                let jmax = u64::try_from(&jmax).unwrap_or(0);
                for j in 1..=jmax {
                    out.push(EdgeClass {
                        base: sector.clone(),
                        from_coord,
                        to_coord,
                        moving: moving.clone(),
                        q: Rat::new(j.into(), g.into()),
                    });
                }
            }
        }
    }
    out
}
