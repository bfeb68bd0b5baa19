//! Symmetric-group conjugacy-class arithmetic and factorization counting,
//! backed by a brute-force table of S_d.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinat::{Multipartition, OrderedZeroPartition, Partition};

/// Largest d for which S_d is materialized.
pub const BRUTE_FORCE_CAP: u32 = 6;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SymgroupError {
    #[error("class does not sum to the degree")]
    ShapeMismatch,
    #[error("degree {0} exceeds the brute-force cap {1}")]
    CapExceeded(u32, u32),
}

/// An ordered list of conjugacy classes of S_d (partitions of d).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassList {
    pub d: u32,
    pub classes: Vec<Partition>,
}

impl ClassList {
    pub fn new(d: u32, classes: Vec<Partition>) -> Result<Self, SymgroupError> {
        if classes.iter().any(|c| c.sum() != d) {
            return Err(SymgroupError::ShapeMismatch);
        }
        Ok(ClassList { d, classes })
    }
}

/// |C(sigma)| = |S_sigma| * prod of parts, the centralizer order of a
/// permutation of cycle type sigma in S_d.
pub fn centralizer_order(d: u32, sigma: &Partition) -> Result<u64, SymgroupError> {
    if sigma.sum() != d {
        return Err(SymgroupError::ShapeMismatch);
    }
    Ok(sigma.aut_order() * sigma.parts().iter().map(|&p| p as u64).product::<u64>())
}

pub fn class_size(d: u32, sigma: &Partition) -> Result<u64, SymgroupError> {
    let z = centralizer_order(d, sigma)?;
    Ok(factorial(d) / z)
}

/// Product over coordinates of the per-coordinate centralizer orders.
pub fn sector_centralizer_order(
    mu: &OrderedZeroPartition,
    sigma: &Multipartition,
) -> Result<u64, SymgroupError> {
    if sigma.num_coords() != mu.len() {
        return Err(SymgroupError::ShapeMismatch);
    }
    let mut acc = 1u64;
    for (i, c) in sigma.components().iter().enumerate() {
        acc *= centralizer_order(mu.entries()[i], c)?;
    }
    Ok(acc)
}

fn factorial(n: u32) -> u64 {
    (2..=n as u64).product::<u64>().max(1)
}

/// All of S_d with class tags, materialized once per degree.
#[derive(Debug, Clone)]
pub struct PermTable {
    d: u32,
    perms: Vec<Vec<u8>>,
    /// Indices into `perms`, grouped by cycle type.
    by_class: Vec<(Partition, Vec<usize>)>,
}

impl PermTable {
    pub fn new(d: u32) -> Result<Self, SymgroupError> {
        Self::with_cap(d, BRUTE_FORCE_CAP)
    }

    pub fn with_cap(d: u32, cap: u32) -> Result<Self, SymgroupError> {
        if d > cap {
            return Err(SymgroupError::CapExceeded(d, cap));
        }
        let mut perms = vec![vec![]];
        for n in 0..d as u8 {
            let mut next = Vec::with_capacity(perms.len() * (n as usize + 1));
            for p in &perms {
                for pos in 0..=n as usize {
                    let mut q = p.clone();
                    q.insert(pos, n);
                    next.push(q);
                }
            }
            perms = next;
        }
        perms.sort();
        let classes = Partition::all_of(d);
        let mut by_class: Vec<(Partition, Vec<usize>)> =
            classes.into_iter().map(|c| (c, Vec::new())).collect();
        for (i, p) in perms.iter().enumerate() {
            let ct = cycle_type(p);
            let slot = by_class
                .iter_mut()
                .find(|(c, _)| *c == ct)
                .expect("every cycle type is a partition of d");
            slot.1.push(i);
        }
        Ok(PermTable { d, perms, by_class })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn order(&self) -> u64 {
        self.perms.len() as u64
    }

    pub fn class_members(&self, class: &Partition) -> Option<&[usize]> {
        self.by_class
            .iter()
            .find(|(c, _)| c == class)
            .map(|(_, v)| v.as_slice())
    }

    fn compose(&self, a: usize, b: usize) -> Vec<u8> {
        // (a then b) as functions: (b . a)(x) = b[a[x]]
        let pa = &self.perms[a];
        let pb = &self.perms[b];
        pa.iter().map(|&x| pb[x as usize]).collect()
    }

    /// Brute-force centralizer size of any member of the class.
    pub fn brute_centralizer_order(&self, class: &Partition) -> Option<u64> {
        let members = self.class_members(class)?;
        let &rep = members.first()?;
        let mut count = 0u64;
        for g in 0..self.perms.len() {
            if self.compose(rep, g) == self.compose(g, rep) {
                count += 1;
            }
        }
        Some(count)
    }

    /// Number of tuples (a_1, ..., a_m), a_j in the j-th class, with
    /// a_1 ... a_m = identity. Enumerates the first m-1 factors and checks
    /// the class of the forced last one.
    pub fn factorization_count(&self, list: &ClassList) -> Result<u64, SymgroupError> {
        if list.d != self.d {
            return Err(SymgroupError::ShapeMismatch);
        }
        let m = list.classes.len();
        if m == 0 {
            return Ok(1);
        }
        let member_lists: Vec<&[usize]> = list
            .classes
            .iter()
            .map(|c| self.class_members(c).ok_or(SymgroupError::ShapeMismatch))
            .collect::<Result<_, _>>()?;
        let last_class = &list.classes[m - 1];
        let identity: Vec<u8> = (0..self.d as u8).collect();
        let mut count = 0u64;
        let mut stack: Vec<usize> = vec![0; m - 1];
        let mut products: Vec<Vec<u8>> = vec![identity.clone(); m];
        let mut pos = 0usize;
        loop {
            if pos == m - 1 {
                // a_m is forced to be the inverse of the partial product;
                // its cycle type equals that of the product itself.
                if cycle_type(&products[pos]) == *last_class {
                    count += 1;
                }
                // backtrack
                loop {
                    if pos == 0 {
                        return Ok(count);
                    }
                    pos -= 1;
                    stack[pos] += 1;
                    if stack[pos] < member_lists[pos].len() {
                        break;
                    }
                    stack[pos] = 0;
                }
            }
            let g = member_lists[pos][stack[pos]];
            let prod: Vec<u8> = products[pos]
                .iter()
                .map(|&x| self.perms[g][x as usize])
                .collect();
            products[pos + 1] = prod;
            pos += 1;
        }
    }
}

fn cycle_type(p: &[u8]) -> Partition {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u32;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        cycles.push(len);
    }
    Partition::new(&cycles).expect("cycle lengths are positive")
}

/// Convenience wrapper: count factorizations for a class list, building the
/// table on demand.
pub fn hurwitz_count(list: &ClassList) -> Result<u64, SymgroupError> {
    let table = PermTable::new(list.d)?;
    table.factorization_count(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(raw: &[u32]) -> Partition {
        Partition::new(raw).unwrap()
    }

    #[test]
    fn centralizer_examples() {
        assert_eq!(centralizer_order(4, &part(&[2, 1, 1])).unwrap(), 4);
        assert_eq!(centralizer_order(4, &Partition::ones(4)).unwrap(), 24);
        assert_eq!(centralizer_order(3, &part(&[3])).unwrap(), 3);
        assert!(centralizer_order(3, &part(&[2])).is_err());
    }

    #[test]
    fn centralizer_matches_brute_force() {
        for d in 1..=5u32 {
            let table = PermTable::new(d).unwrap();
            for sigma in Partition::all_of(d) {
                assert_eq!(
                    centralizer_order(d, &sigma).unwrap(),
                    table.brute_centralizer_order(&sigma).unwrap(),
                    "d={d} sigma={sigma}"
                );
            }
        }
    }

    #[test]
    fn class_size_examples() {
        assert_eq!(class_size(3, &part(&[3])).unwrap(), 2);
        assert_eq!(class_size(5, &Partition::ones(5)).unwrap(), 1);
        assert_eq!(class_size(4, &part(&[2, 1, 1])).unwrap(), 6);
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        for d in 1..=7u32 {
            let total: u64 = Partition::all_of(d)
                .iter()
                .map(|c| class_size(d, c).unwrap())
                .sum();
            assert_eq!(total, factorial(d));
        }
    }

    #[test]
    fn hurwitz_examples() {
        let l = ClassList::new(2, vec![part(&[2]), part(&[2])]).unwrap();
        assert_eq!(hurwitz_count(&l).unwrap(), 1);
        let l = ClassList::new(3, vec![Partition::ones(3)]).unwrap();
        assert_eq!(hurwitz_count(&l).unwrap(), 1);
        let l = ClassList::new(3, vec![part(&[3]), part(&[3])]).unwrap();
        assert_eq!(hurwitz_count(&l).unwrap(), 2);
    }

    #[test]
    fn hurwitz_single_class_is_identity_indicator() {
        for d in 1..=6u32 {
            for sigma in Partition::all_of(d) {
                let l = ClassList::new(d, vec![sigma.clone()]).unwrap();
                let expect = if sigma.is_ones() { 1 } else { 0 };
                assert_eq!(hurwitz_count(&l).unwrap(), expect, "d={d} sigma={sigma}");
            }
        }
    }

    #[test]
    fn sector_centralizer_examples() {
        let mu = OrderedZeroPartition::new(vec![2, 0]);
        let sigma = Multipartition::new(vec![part(&[2]), Partition::empty()]);
        assert_eq!(sector_centralizer_order(&mu, &sigma).unwrap(), 2);

        let mu = OrderedZeroPartition::new(vec![1, 1]);
        let sigma = Multipartition::ones(&mu);
        assert_eq!(sector_centralizer_order(&mu, &sigma).unwrap(), 1);

        let mu = OrderedZeroPartition::new(vec![2, 2]);
        let sigma = Multipartition::new(vec![Partition::ones(2), part(&[2])]);
        assert_eq!(sector_centralizer_order(&mu, &sigma).unwrap(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            PermTable::new(BRUTE_FORCE_CAP + 1),
            Err(SymgroupError::CapExceeded(_, _))
        ));
    }
}
