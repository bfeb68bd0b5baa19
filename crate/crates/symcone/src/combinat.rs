//! Partitions, multipartitions, labelings, and their automorphism counts.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::rat::binomial;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CombinatError {
    #[error("partition parts must be positive")]
    InvalidPart,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// A multiset of positive integers, stored sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Canonicalize an arbitrary list of positive entries; the empty
    /// partition (sum 0) is permitted.
    pub fn new(raw: &[u32]) -> Result<Self, CombinatError> {
        if raw.contains(&0) {
            return Err(CombinatError::InvalidPart);
        }
        let mut parts = raw.to_vec();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn ones(d: u32) -> Self {
        Partition {
            parts: vec![1; d as usize],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn sum(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_ones(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    pub fn multiplicity(&self, value: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == value).count() as u32
    }

    /// Distinct part values with multiplicities, descending.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, m)) if *v == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// |S_sigma|: product over distinct values of multiplicity!.
    pub fn aut_order(&self) -> u64 {
        self.multiplicities()
            .iter()
            .map(|&(_, m)| factorial_u64(m))
            .product()
    }

    /// lcm of the parts; 1 for the empty partition.
    pub fn lcm(&self) -> u64 {
        self.parts.iter().fold(1u64, |acc, &p| acc.lcm(&(p as u64)))
    }

    pub fn gcd(&self) -> u64 {
        self.parts.iter().fold(0u64, |acc, &p| acc.gcd(&(p as u64)))
    }

    /// Number of ways of choosing `sub` as a subpartition with specified
    /// parts: product of binomials of multiplicities. Zero when `sub` is not
    /// a submultiset.
    pub fn multiset_binomial(&self, sub: &Partition) -> u64 {
        let mut acc = 1u64;
        for (v, m) in sub.multiplicities() {
            let have = self.multiplicity(v);
            if m > have {
                return 0;
            }
            acc *= binomial(have as u64, m as u64);
        }
        acc
    }

    /// Multiset difference self \ other; None when other is not contained.
    pub fn difference(&self, other: &Partition) -> Option<Partition> {
        let mut counts: BTreeMap<u32, i64> = BTreeMap::new();
        for &p in &self.parts {
            *counts.entry(p).or_insert(0) += 1;
        }
        for &p in &other.parts {
            let c = counts.entry(p).or_insert(0);
            *c -= 1;
            if *c < 0 {
                return None;
            }
        }
        let mut parts = Vec::new();
        for (v, c) in counts.into_iter().rev() {
            for _ in 0..c {
                parts.push(v);
            }
        }
        Some(Partition { parts })
    }

    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// All nonempty submultisets, each one once as a multiset. Deterministic
    /// order.
    pub fn submultisets_nonempty(&self) -> Vec<Partition> {
        let mults = self.multiplicities();
        let mut out = Vec::new();
        let mut choice = vec![0u32; mults.len()];
        loop {
            // advance odometer
            let mut i = 0;
            loop {
                if i == mults.len() {
                    return out;
                }
                if choice[i] < mults[i].1 {
                    choice[i] += 1;
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            let mut parts = Vec::new();
            for (j, &(v, _)) in mults.iter().enumerate() {
                for _ in 0..choice[j] {
                    parts.push(v);
                }
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            out.push(Partition { parts });
        }
    }

    /// All partitions of n, deterministic order.
    pub fn all_of(n: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(n: u32, max: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition {
                    parts: current.clone(),
                });
                return;
            }
            let mut p = max.min(n);
            while p >= 1 {
                current.push(p);
                rec(n - p, p, current, out);
                current.pop();
                p -= 1;
            }
        }
        rec(n, n.max(1), &mut current, &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<u32>::deserialize(d)?;
        Partition::new(&raw).map_err(serde::de::Error::custom)
    }
}

fn factorial_u64(n: u32) -> u64 {
    (2..=n as u64).product::<u64>().max(1)
}

/// An (r+1)-tuple of nonnegative integers summing to d: a torus-fixed point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderedZeroPartition {
    tuple: Vec<u32>,
}

impl OrderedZeroPartition {
    pub fn new(tuple: Vec<u32>) -> Self {
        OrderedZeroPartition { tuple }
    }

    pub fn entries(&self) -> &[u32] {
        &self.tuple
    }

    pub fn len(&self) -> usize {
        self.tuple.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuple.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.tuple.iter().sum()
    }

    /// All (r+1)-tuples of nonnegatives summing to d, lexicographic order.
    pub fn enumerate(d: u32, r: u32) -> Vec<OrderedZeroPartition> {
        let len = (r + 1) as usize;
        let mut out = Vec::new();
        let mut current = vec![0u32; len];
        fn rec(pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<OrderedZeroPartition>) {
            if pos == current.len() - 1 {
                current[pos] = left;
                out.push(OrderedZeroPartition {
                    tuple: current.clone(),
                });
                return;
            }
            for v in 0..=left {
                current[pos] = v;
                rec(pos + 1, left - v, current, out);
            }
        }
        rec(0, d, &mut current, &mut out);
        out
    }
}

impl fmt::Display for OrderedZeroPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.tuple.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// An ordered list of r+1 partitions; component i is a partition of mu_i,
/// and each part carries its coordinate label by position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Multipartition {
    components: Vec<Partition>,
}

impl Multipartition {
    pub fn new(components: Vec<Partition>) -> Self {
        Multipartition { components }
    }

    /// Single-coordinate wrapper for operations defined on partitions.
    pub fn single(p: Partition) -> Self {
        Multipartition {
            components: vec![p],
        }
    }

    pub fn ones(mu: &OrderedZeroPartition) -> Self {
        Multipartition {
            components: mu.entries().iter().map(|&m| Partition::ones(m)).collect(),
        }
    }

    pub fn components(&self) -> &[Partition] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Partition {
        &self.components[i]
    }

    pub fn num_coords(&self) -> usize {
        self.components.len()
    }

    /// The point distribution this multipartition refines.
    pub fn evaluation(&self) -> OrderedZeroPartition {
        OrderedZeroPartition::new(self.components.iter().map(Partition::sum).collect())
    }

    /// Underlying partition of d: union over coordinates.
    pub fn underlying(&self) -> Partition {
        let mut acc = Partition::empty();
        for c in &self.components {
            acc = acc.union(c);
        }
        acc
    }

    pub fn total(&self) -> u32 {
        self.components.iter().map(Partition::sum).sum()
    }

    pub fn num_parts(&self) -> usize {
        self.components.iter().map(Partition::len).sum()
    }

    pub fn is_ones(&self) -> bool {
        self.components.iter().all(Partition::is_ones)
    }

    /// Parts with their coordinate labels, in canonical order.
    pub fn labeled_parts(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.parts().iter().map(move |&p| (i, p)))
    }

    /// lcm over all parts of all coordinates; 1 when there are none.
    pub fn lcm(&self) -> u64 {
        self.components
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&c.lcm()))
    }

    /// |S_sigma| = product over coordinates of |S_{sigma_i}|.
    pub fn aut_order(&self) -> u64 {
        self.components.iter().map(Partition::aut_order).product()
    }

    /// Replace coordinate i's partition.
    pub fn with_component(&self, i: usize, p: Partition) -> Multipartition {
        let mut components = self.components.clone();
        components[i] = p;
        Multipartition { components }
    }

    /// All multipartitions refining mu, deterministic order.
    pub fn enumerate(mu: &OrderedZeroPartition) -> Vec<Multipartition> {
        let per_coord: Vec<Vec<Partition>> = mu
            .entries()
            .iter()
            .map(|&m| Partition::all_of(m))
            .collect();
        let mut out = vec![Multipartition {
            components: Vec::new(),
        }];
        for choices in &per_coord {
            let mut next = Vec::with_capacity(out.len() * choices.len());
            for base in &out {
                for c in choices {
                    let mut components = base.components.clone();
                    components.push(c.clone());
                    next.push(Multipartition { components });
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for Multipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl<'de> Deserialize<'de> for Multipartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<Partition>::deserialize(d)?;
        Ok(Multipartition::new(raw))
    }
}

/// Label convention for the degree labels on parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelConvention {
    /// Labels are >= 0. Required for the degree-zero base term.
    NonNeg,
    /// Labels are >= 1.
    Pos,
}

impl fmt::Display for LabelConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelConvention::NonNeg => write!(f, "nonneg"),
            LabelConvention::Pos => write!(f, "pos"),
        }
    }
}

/// One nonnegative integer per part occurrence, shaped like its
/// multipartition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Labeling {
    labels: Vec<Vec<u32>>,
}

impl Labeling {
    pub fn new(labels: Vec<Vec<u32>>) -> Self {
        Labeling { labels }
    }

    pub fn matches_shape(&self, sigma: &Multipartition) -> bool {
        self.labels.len() == sigma.num_coords()
            && self
                .labels
                .iter()
                .zip(sigma.components())
                .all(|(l, c)| l.len() == c.len())
    }

    pub fn total(&self) -> u32 {
        self.labels.iter().flatten().sum()
    }

    pub fn label(&self, coord: usize, part_idx: usize) -> u32 {
        self.labels[coord][part_idx]
    }

    pub fn labels(&self) -> &[Vec<u32>] {
        &self.labels
    }

    /// |S_{sigma,L}|: automorphisms preserving both value and label.
    pub fn labeled_aut_order(&self, sigma: &Multipartition) -> Result<u64, CombinatError> {
        if !self.matches_shape(sigma) {
            return Err(CombinatError::ShapeMismatch(
                "labeling does not match multipartition shape".into(),
            ));
        }
        let mut acc = 1u64;
        for (coord, component) in sigma.components().iter().enumerate() {
            let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
            for (idx, &p) in component.parts().iter().enumerate() {
                *counts.entry((p, self.labels[coord][idx])).or_insert(0) += 1;
            }
            for m in counts.values() {
                acc *= factorial_u64(*m);
            }
        }
        Ok(acc)
    }
}

/// All labelings of sigma's part occurrences with the given total.
///
/// Occurrence slots are filled lexicographically, so equal parts receive
/// all orderings; the |S_sigma|/|S_{sigma,L}| factor downstream accounts
/// for the resulting multiplicity.
pub fn enumerate_labelings(
    sigma: &Multipartition,
    total: u32,
    convention: LabelConvention,
) -> Vec<Labeling> {
    let nparts = sigma.num_parts();
    let min = match convention {
        LabelConvention::NonNeg => 0u32,
        LabelConvention::Pos => 1u32,
    };
    let mut out = Vec::new();
    if nparts == 0 {
        if total == 0 {
            out.push(shape_labels(sigma, &[]));
        }
        return out;
    }
    if min * nparts as u32 > total {
        return out;
    }
    let mut flat = vec![0u32; nparts];
    fn rec(
        pos: usize,
        left: u32,
        min: u32,
        flat: &mut Vec<u32>,
        sigma: &Multipartition,
        out: &mut Vec<Labeling>,
    ) {
        let slots_after = (flat.len() - pos - 1) as u32;
        if pos == flat.len() - 1 {
            flat[pos] = left;
            out.push(shape_labels(sigma, flat));
            return;
        }
        let mut v = min;
        while left >= v + min * slots_after {
            flat[pos] = v;
            rec(pos + 1, left - v, min, flat, sigma, out);
            v += 1;
        }
    }
    if min <= total || nparts == 0 {
        rec(0, total, min, &mut flat, sigma, &mut out);
    }
    out
}

fn shape_labels(sigma: &Multipartition, flat: &[u32]) -> Labeling {
    let mut labels = Vec::with_capacity(sigma.num_coords());
    let mut k = 0;
    for c in sigma.components() {
        let mut row = Vec::with_capacity(c.len());
        for _ in 0..c.len() {
            row.push(flat[k]);
            k += 1;
        }
        labels.push(row);
    }
    Labeling { labels }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_sorts_descending() {
        let p = Partition::new(&[1, 2, 1]).unwrap();
        assert_eq!(p.parts(), &[2, 1, 1]);
        assert_eq!(p.sum(), 4);
    }

    #[test]
    fn canonicalize_empty_and_singleton() {
        assert_eq!(Partition::new(&[]).unwrap().sum(), 0);
        assert_eq!(Partition::new(&[3]).unwrap().parts(), &[3]);
    }

    #[test]
    fn canonicalize_rejects_zero() {
        assert_eq!(Partition::new(&[1, 0]), Err(CombinatError::InvalidPart));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let p = Partition::new(&[3, 1, 4, 1, 5]).unwrap();
        let q = Partition::new(p.parts()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn aut_order_examples() {
        // S_(1,1,1,2,2) = S_3 x S_2
        assert_eq!(Partition::new(&[1, 1, 1, 2, 2]).unwrap().aut_order(), 12);
        assert_eq!(Partition::ones(4).aut_order(), 24);
        assert_eq!(Partition::new(&[3]).unwrap().aut_order(), 1);
    }

    #[test]
    fn labeled_aut_order_examples() {
        let sigma = Multipartition::single(Partition::new(&[1, 1]).unwrap());
        let same = Labeling::new(vec![vec![1, 1]]);
        let diff = Labeling::new(vec![vec![1, 2]]);
        assert_eq!(same.labeled_aut_order(&sigma).unwrap(), 2);
        assert_eq!(diff.labeled_aut_order(&sigma).unwrap(), 1);
        let single = Multipartition::single(Partition::new(&[2]).unwrap());
        let l = Labeling::new(vec![vec![7]]);
        assert_eq!(l.labeled_aut_order(&single).unwrap(), 1);
    }

    #[test]
    fn labeled_aut_order_shape_mismatch() {
        let sigma = Multipartition::single(Partition::new(&[1, 1]).unwrap());
        let bad = Labeling::new(vec![vec![1]]);
        assert!(bad.labeled_aut_order(&sigma).is_err());
    }

    #[test]
    fn multiset_binomial_examples() {
        let whole = Partition::new(&[2, 2, 1]).unwrap();
        let sub = Partition::new(&[2, 1]).unwrap();
        assert_eq!(whole.multiset_binomial(&sub), 2);
        assert_eq!(whole.multiset_binomial(&whole), 1);
        let w2 = Partition::new(&[2, 2]).unwrap();
        assert_eq!(w2.multiset_binomial(&Partition::new(&[1]).unwrap()), 0);
    }

    #[test]
    fn multiset_binomial_matches_brute_force() {
        // Count submultisets equal to sub by enumerating subsets of
        // occurrences.
        for whole_raw in [[2u32, 2, 1, 1].as_slice(), &[3, 2, 2, 2, 1], &[1, 1, 1]] {
            let whole = Partition::new(whole_raw).unwrap();
            for sub in whole.submultisets_nonempty() {
                let n = whole.len();
                let mut count = 0u64;
                for mask in 0u32..(1 << n) {
                    let chosen: Vec<u32> = (0..n)
                        .filter(|&i| mask & (1 << i) != 0)
                        .map(|i| whole.parts()[i])
                        .collect();
                    if Partition::new(&chosen).unwrap() == sub {
                        count += 1;
                    }
                }
                assert_eq!(whole.multiset_binomial(&sub), count, "sub {sub}");
            }
        }
    }

    #[test]
    fn labelings_examples() {
        let single = Multipartition::single(Partition::new(&[1]).unwrap());
        let ls = enumerate_labelings(&single, 3, LabelConvention::NonNeg);
        assert_eq!(ls.len(), 1);
        assert_eq!(ls[0].labels(), &[vec![3]]);

        let pair = Multipartition::single(Partition::new(&[1, 1]).unwrap());
        let ls = enumerate_labelings(&pair, 1, LabelConvention::NonNeg);
        assert_eq!(ls.len(), 2);
        let ls = enumerate_labelings(&pair, 1, LabelConvention::Pos);
        assert!(ls.is_empty());
    }

    #[test]
    fn labelings_count_is_compositions() {
        for (parts, total) in [(3usize, 4u32), (2, 5), (4, 3)] {
            let sigma = Multipartition::single(Partition::ones(parts as u32));
            let got = enumerate_labelings(&sigma, total, LabelConvention::NonNeg).len() as u64;
            assert_eq!(got, binomial((total + parts as u32 - 1) as u64, (parts - 1) as u64));
        }
    }

    #[test]
    fn zpart_examples() {
        let z = OrderedZeroPartition::enumerate(1, 1);
        assert_eq!(
            z,
            vec![
                OrderedZeroPartition::new(vec![0, 1]),
                OrderedZeroPartition::new(vec![1, 0]),
            ]
        );
        assert_eq!(OrderedZeroPartition::enumerate(2, 1).len(), 3);
        assert_eq!(
            OrderedZeroPartition::enumerate(2, 0),
            vec![OrderedZeroPartition::new(vec![2])]
        );
    }

    #[test]
    fn json_shapes() {
        let p = Partition::new(&[2, 1]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,1]");
        let m = Multipartition::new(vec![p, Partition::empty()]);
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[2,1],[]]");
        let back: Multipartition = serde_json::from_str("[[1,2],[]]").unwrap();
        assert_eq!(back.component(0).parts(), &[2, 1]);
    }
}
