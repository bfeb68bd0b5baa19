//! Decorated trees and the edge-combining calculus: validation,
//! combinability, combining with order-independence, and minimal forms.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinat::{Multipartition, OrderedZeroPartition, Partition};
use crate::exactalg::rat::{rat_u, DetRng, Rat};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("edge index {0} out of range")]
    BadEdge(usize),
    #[error("edges {0} and {1} are not combinable")]
    NotCombinable(usize, usize),
    #[error("invalid decorated tree: {0}")]
    Invalid(String),
}

/// One edge with its flag monodromies at both endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub v1: usize,
    pub v2: usize,
    #[serde(with = "rat_serde")]
    pub q: Rat,
    pub mon1: Multipartition,
    pub mon2: Multipartition,
}

mod rat_serde {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let raw = String::deserialize(d)?;
        crate::exactalg::rat::parse_rat_string(&raw).map_err(serde::de::Error::custom)
    }
}

/// An n-marked genus-zero decorated tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedTree {
    /// Point distribution at each vertex.
    pub veval: Vec<OrderedZeroPartition>,
    pub edges: Vec<TreeEdge>,
    /// Vertex carrying each marked point.
    pub marks: Vec<usize>,
    /// Monodromy at each marked point.
    pub mark_mon: Vec<Multipartition>,
}

/// Per-condition outcome of validation.
#[derive(Debug, Clone, Serialize)]
pub struct TreeVerdict {
    pub shape_ok: bool,
    pub is_tree: bool,
    /// Conditions: two moved coordinates, monodromy compatibility, bare
    /// leaves carry ones, marked leaves match their mark, bare two-valent
    /// vertices have equal flags.
    pub conditions: [bool; 5],
    pub failures: Vec<String>,
}

impl TreeVerdict {
    pub fn pass(&self) -> bool {
        self.shape_ok && self.is_tree && self.conditions.iter().all(|&c| c)
    }
}

impl DecoratedTree {
    pub fn num_vertices(&self) -> usize {
        self.veval.len()
    }

    pub fn degree(&self) -> u32 {
        self.veval.first().map(|v| v.total()).unwrap_or(0)
    }

    fn incident_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.v1 == v || e.v2 == v)
            .map(|(i, _)| i)
            .collect()
    }

    fn marks_at(&self, v: usize) -> Vec<usize> {
        self.marks
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// The two coordinates changed along an edge: (at the v1 side, at the
    /// v2 side), where each side names the coordinate its own vertex has
    /// extra mass at. None unless exactly two coordinates differ.
    pub fn moving_coords(&self, e: usize) -> Option<(usize, usize)> {
        let edge = self.edges.get(e)?;
        let a = self.veval.get(edge.v1)?.entries();
        let b = self.veval.get(edge.v2)?.entries();
        if a.len() != b.len() {
            return None;
        }
        let diffs: Vec<usize> = (0..a.len()).filter(|&k| a[k] != b[k]).collect();
        if diffs.len() != 2 {
            return None;
        }
        let (x, y) = (diffs[0], diffs[1]);
        if a[x] > b[x] && b[y] > a[y] {
            Some((x, y))
        } else if a[y] > b[y] && b[x] > a[x] {
            Some((y, x))
        } else {
            None
        }
    }

    /// Moving parts of an edge, read from the v1-side flag.
    pub fn moving_parts(&self, e: usize) -> Option<Partition> {
        let (i1, _) = self.moving_coords(e)?;
        let edge = &self.edges[e];
        edge.mon1.component(i1).difference(edge.mon2.component(i1))
    }

    /// Total degree of an edge: sum of q * eta over its moving parts.
    pub fn edge_degree(&self, e: usize) -> Option<Rat> {
        let mov = self.moving_parts(e)?;
        let q = &self.edges[e].q;
        Some(
            mov.parts()
                .iter()
                .fold(Rat::zero(), |acc, &eta| acc + q.clone() * rat_u(eta as u64)),
        )
    }

    pub fn total_degree(&self) -> Option<Rat> {
        let mut acc = Rat::zero();
        for e in 0..self.edges.len() {
            acc += self.edge_degree(e)?;
        }
        Some(acc)
    }

    /// Check tree-ness, shape compatibility, and the five decorated-tree
    /// conditions, with per-condition diagnostics.
    pub fn validate(&self) -> TreeVerdict {
        let mut failures = Vec::new();
        let nv = self.num_vertices();
        let mut shape_ok = nv > 0;
        if nv == 0 {
            failures.push("no vertices".into());
        }
        let ncoords = self.veval.first().map(|v| v.len()).unwrap_or(0);
        let d = self.degree();
        for (i, v) in self.veval.iter().enumerate() {
            if v.len() != ncoords || v.total() != d {
                shape_ok = false;
                failures.push(format!("vertex {i} evaluation has wrong shape"));
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.v1 >= nv || e.v2 >= nv || e.v1 == e.v2 {
                shape_ok = false;
                failures.push(format!("edge {k} endpoints invalid"));
                continue;
            }
            if e.mon1.evaluation() != self.veval[e.v1] {
                shape_ok = false;
                failures.push(format!("edge {k} monodromy at v1 does not refine the vertex"));
            }
            if e.mon2.evaluation() != self.veval[e.v2] {
                shape_ok = false;
                failures.push(format!("edge {k} monodromy at v2 does not refine the vertex"));
            }
            if e.q <= Rat::zero() {
                shape_ok = false;
                failures.push(format!("edge {k} has nonpositive degree ratio"));
            }
        }
        if self.marks.len() != self.mark_mon.len() {
            shape_ok = false;
            failures.push("marks and mark monodromies differ in length".into());
        }
        for (i, &v) in self.marks.iter().enumerate() {
            if v >= nv {
                shape_ok = false;
                failures.push(format!("mark {i} on missing vertex"));
            } else if self
                .mark_mon
                .get(i)
                .map(|m| m.evaluation() != self.veval[v])
                .unwrap_or(true)
            {
                shape_ok = false;
                failures.push(format!("mark {i} monodromy does not refine its vertex"));
            }
        }
        // Tree-ness: connected with |E| = |V| - 1.
        let mut is_tree = self.edges.len() + 1 == nv;
        if is_tree && nv > 1 {
            let mut seen = vec![false; nv];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &ei in &self.incident_edges(v) {
                    let e = &self.edges[ei];
                    let w = if e.v1 == v { e.v2 } else { e.v1 };
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            is_tree = seen.iter().all(|&s| s);
        }
        if !is_tree {
            failures.push("underlying graph is not a tree".into());
        }

        let mut conditions = [true; 5];
        if !shape_ok {
            return TreeVerdict {
                shape_ok,
                is_tree,
                conditions: [false; 5],
                failures,
            };
        }
        for (k, e) in self.edges.iter().enumerate() {
            match self.moving_coords(k) {
                None => {
                    conditions[0] = false;
                    failures.push(format!("edge {k}: not exactly two moved coordinates"));
                }
                Some((i1, i2)) => {
                    for i in 0..ncoords {
                        if i == i1 || i == i2 {
                            continue;
                        }
                        if e.mon1.component(i) != e.mon2.component(i) {
                            conditions[1] = false;
                            failures
                                .push(format!("edge {k}: stationary coordinate {i} disagrees"));
                        }
                    }
                    let from_v1 = e.mon1.component(i1).difference(e.mon2.component(i1));
                    let from_v2 = e.mon2.component(i2).difference(e.mon1.component(i2));
                    match (from_v1, from_v2) {
                        (Some(a), Some(b)) if a == b && !a.is_empty() => {
                            // q * eta must be a positive integer for each
                            // moving part.
                            for &eta in a.parts() {
                                if !(e.q.clone() * rat_u(eta as u64)).is_integer() {
                                    conditions[0] = false;
                                    failures.push(format!(
                                        "edge {k}: part {eta} has non-integral degree"
                                    ));
                                }
                            }
                        }
                        _ => {
                            conditions[1] = false;
                            failures.push(format!(
                                "edge {k}: moving parts disagree between the two flags"
                            ));
                        }
                    }
                }
            }
        }
        for v in 0..nv {
            let inc = self.incident_edges(v);
            let marks = self.marks_at(v);
            let flag_mon = |ei: usize| -> &Multipartition {
                let e = &self.edges[ei];
                if e.v1 == v {
                    &e.mon1
                } else {
                    &e.mon2
                }
            };
            match (inc.len(), marks.len()) {
                (1, 0) => {
                    if !flag_mon(inc[0]).is_ones() {
                        conditions[2] = false;
                        failures.push(format!("bare leaf {v} does not carry ones monodromy"));
                    }
                }
                (1, 1) => {
                    if *flag_mon(inc[0]) != self.mark_mon[marks[0]] {
                        conditions[3] = false;
                        failures.push(format!(
                            "marked leaf {v} flag monodromy differs from its mark"
                        ));
                    }
                }
                (2, 0)
                    if flag_mon(inc[0]) != flag_mon(inc[1]) => {
                        conditions[4] = false;
                        failures.push(format!("bare two-valent vertex {v} has unequal flags"));
                    }
                _ => {}
            }
        }
        TreeVerdict {
            shape_ok,
            is_tree,
            conditions,
            failures,
        }
    }

    /// Combinable test: the two edges share a bare two-valent vertex, have
    /// equal degree ratios, and their moving coordinates criss-cross.
    pub fn combinable(&self, e1: usize, e2: usize) -> Result<bool, TreeError> {
        if e1 >= self.edges.len() {
            return Err(TreeError::BadEdge(e1));
        }
        if e2 >= self.edges.len() {
            return Err(TreeError::BadEdge(e2));
        }
        if e1 == e2 {
            return Ok(false);
        }
        let (a, b) = (&self.edges[e1], &self.edges[e2]);
        let shared: Vec<usize> = [a.v1, a.v2]
            .into_iter()
            .filter(|v| *v == b.v1 || *v == b.v2)
            .collect();
        if shared.len() != 1 {
            return Ok(false);
        }
        let v = shared[0];
        if self.incident_edges(v).len() != 2 || !self.marks_at(v).is_empty() {
            return Ok(false);
        }
        if a.q != b.q {
            return Ok(false);
        }
        let Some((m1a, m1b)) = self.oriented_moving_coords(e1, v) else {
            return Ok(false);
        };
        let Some((m2a, m2b)) = self.oriented_moving_coords(e2, v) else {
            return Ok(false);
        };
        // m1a: at the far end of e1; m1b: at v for e1; likewise for e2.
        Ok(m1a == m2b && m1b == m2a)
    }

    /// Moving coordinates of an edge oriented so the first entry is at the
    /// endpoint away from `v` and the second at `v`.
    fn oriented_moving_coords(&self, e: usize, v: usize) -> Option<(usize, usize)> {
        let (at_v1, at_v2) = self.moving_coords(e)?;
        if self.edges[e].v2 == v {
            Some((at_v1, at_v2))
        } else {
            Some((at_v2, at_v1))
        }
    }

    /// All combinable pairs, each as (min, max) edge indices.
    pub fn combinable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for e1 in 0..self.edges.len() {
            for e2 in (e1 + 1)..self.edges.len() {
                if self.combinable(e1, e2).unwrap_or(false) {
                    out.push((e1, e2));
                }
            }
        }
        out
    }

    /// Combine two combinable edges, deleting their shared vertex. Returns
    /// the new tree and the total map from old edge indices to new ones.
    pub fn combine(&self, e1: usize, e2: usize) -> Result<(DecoratedTree, Vec<usize>), TreeError> {
        if !self.combinable(e1, e2)? {
            return Err(TreeError::NotCombinable(e1, e2));
        }
        let a = &self.edges[e1];
        let b = &self.edges[e2];
        let v = if a.v1 == b.v1 || a.v1 == b.v2 {
            a.v1
        } else {
            a.v2
        };
        let (far1, mon_far1) = if a.v1 == v {
            (a.v2, a.mon2.clone())
        } else {
            (a.v1, a.mon1.clone())
        };
        let (far2, mon_far2) = if b.v1 == v {
            (b.v2, b.mon2.clone())
        } else {
            (b.v1, b.mon1.clone())
        };
        let reindex = |w: usize| if w > v { w - 1 } else { w };
        let mut veval = self.veval.clone();
        veval.remove(v);
        let mut edges = Vec::with_capacity(self.edges.len() - 1);
        let mut edge_map = vec![usize::MAX; self.edges.len()];
        for (k, e) in self.edges.iter().enumerate() {
            if k == e1 || k == e2 {
                continue;
            }
            edge_map[k] = edges.len();
            edges.push(TreeEdge {
                v1: reindex(e.v1),
                v2: reindex(e.v2),
                q: e.q.clone(),
                mon1: e.mon1.clone(),
                mon2: e.mon2.clone(),
            });
        }
        let merged = TreeEdge {
            v1: reindex(far1),
            v2: reindex(far2),
            q: a.q.clone(),
            mon1: mon_far1,
            mon2: mon_far2,
        };
        edge_map[e1] = edges.len();
        edge_map[e2] = edges.len();
        edges.push(merged);
        let marks = self.marks.iter().map(|&m| reindex(m)).collect();
        Ok((
            DecoratedTree {
                veval,
                edges,
                marks,
                mark_mon: self.mark_mon.clone(),
            },
            edge_map,
        ))
    }

    /// Combine a set of pairs (in the order given; the result is
    /// order-independent). Pairs are tracked through the intermediate edge
    /// maps. Returns the final tree and the composed edge map.
    pub fn combine_set(
        &self,
        pairs: &[(usize, usize)],
    ) -> Result<(DecoratedTree, Vec<usize>), TreeError> {
        let allowed = self.combinable_pairs();
        for p in pairs {
            let norm = (p.0.min(p.1), p.0.max(p.1));
            if !allowed.contains(&norm) {
                return Err(TreeError::NotCombinable(p.0, p.1));
            }
        }
        let mut tree = self.clone();
        let mut total_map: Vec<usize> = (0..self.edges.len()).collect();
        for p in pairs {
            let a = total_map[p.0];
            let b = total_map[p.1];
            if a == b {
                // already merged through an overlapping earlier pair
                continue;
            }
            let (next, step) = tree.combine(a, b)?;
            tree = next;
            for slot in total_map.iter_mut() {
                *slot = step[*slot];
            }
        }
        Ok((tree, total_map))
    }

    /// Combine until no pair remains.
    pub fn minimal_form(&self) -> Result<DecoratedTree, TreeError> {
        if !self.validate().pass() {
            return Err(TreeError::Invalid(
                self.validate().failures.join("; "),
            ));
        }
        let mut tree = self.clone();
        loop {
            let pairs = tree.combinable_pairs();
            if pairs.is_empty() {
                return Ok(tree);
            }
            let (next, _) = tree.combine_set(&pairs)?;
            tree = next;
        }
    }

    /// Canonical encoding, invariant under vertex and edge reindexing.
    /// Rooted at the vertex of the first mark when marks exist, otherwise
    /// at the vertex minimizing the encoding.
    pub fn canonical_form(&self) -> String {
        if let Some(&root) = self.marks.first() {
            self.encode_from(root, None)
        } else {
            (0..self.num_vertices())
                .map(|v| self.encode_from(v, None))
                .min()
                .unwrap_or_default()
        }
    }

    fn encode_from(&self, v: usize, parent_edge: Option<usize>) -> String {
        let mut marks: Vec<String> = self
            .marks_at(v)
            .into_iter()
            .map(|i| format!("b{}:{}", i, self.mark_mon[i]))
            .collect();
        marks.sort();
        let mut children: Vec<String> = self
            .incident_edges(v)
            .into_iter()
            .filter(|&e| Some(e) != parent_edge)
            .map(|e| {
                let edge = &self.edges[e];
                let (child, mon_here, mon_there) = if edge.v1 == v {
                    (edge.v2, &edge.mon1, &edge.mon2)
                } else {
                    (edge.v1, &edge.mon2, &edge.mon1)
                };
                format!(
                    "e[q={};{};{}]{}",
                    edge.q,
                    mon_here,
                    mon_there,
                    self.encode_from(child, Some(e))
                )
            })
            .collect();
        children.sort();
        format!(
            "v[{};{};{}]",
            self.veval[v],
            marks.join(","),
            children.join(",")
        )
    }
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_form())
    }
}

/// A chain fixture: marked endpoints, ones monodromy throughout, steps
/// moving one unit between the two coordinates of a degree-2 target.
/// Direction reversals and degree-ratio changes drawn from the seed control
/// which interior vertices admit combining.
pub fn chain_fixture(num_edges: usize, seed: u64) -> DecoratedTree {
    assert!(num_edges >= 1);
    let mut rng = DetRng::new(seed);
    let d = 2u32;
    let mut at0 = 2u32; // mass at coordinate 0
    let mut veval = vec![OrderedZeroPartition::new(vec![at0, d - at0])];
    let mut edges = Vec::new();
    let q_choices = [rat_u(1), rat_u(2)];
    let mut prev_vertex = 0usize;
    for _ in 0..num_edges {
        // move one unit in a random feasible direction
        let dir_down = if at0 == 0 {
            false
        } else if at0 == d {
            true
        } else {
            rng.next_u64().is_multiple_of(2)
        };
        let next_at0 = if dir_down { at0 - 1 } else { at0 + 1 };
        let q = q_choices[(rng.next_u64() % 2) as usize].clone();
        let v_new = veval.len();
        let from = OrderedZeroPartition::new(vec![at0, d - at0]);
        let to = OrderedZeroPartition::new(vec![next_at0, d - next_at0]);
        edges.push(TreeEdge {
            v1: prev_vertex,
            v2: v_new,
            q,
            mon1: Multipartition::ones(&from),
            mon2: Multipartition::ones(&to),
        });
        veval.push(to);
        at0 = next_at0;
        prev_vertex = v_new;
    }
    let last = veval.len() - 1;
    let mark_mon = vec![
        Multipartition::ones(&veval[0]),
        Multipartition::ones(&veval[last]),
    ];
    DecoratedTree {
        veval,
        edges,
        marks: vec![0, last],
        mark_mon,
    }
}

/// A straight chain of `num_edges` same-direction unit steps at degree
/// `num_edges`, all with the same ratio: every adjacent pair combines, so
/// the minimal form is a single edge.
pub fn straight_chain(num_edges: usize) -> DecoratedTree {
    assert!(num_edges >= 1);
    let d = num_edges as u32;
    let mut veval = Vec::new();
    let mut edges = Vec::new();
    for k in 0..=num_edges {
        veval.push(OrderedZeroPartition::new(vec![d - k as u32, k as u32]));
    }
    for k in 0..num_edges {
        edges.push(TreeEdge {
            v1: k,
            v2: k + 1,
            q: Rat::from_integer(1.into()),
            mon1: Multipartition::ones(&veval[k]),
            mon2: Multipartition::ones(&veval[k + 1]),
        });
    }
    let mark_mon = vec![
        Multipartition::ones(&veval[0]),
        Multipartition::ones(&veval[num_edges]),
    ];
    DecoratedTree {
        veval,
        edges,
        marks: vec![0, num_edges],
        mark_mon,
    }
}

/// Brute-force enumeration of decorated trees with at most one edge, used
/// as a validation fixture source. Total degree at most 1 forces the edge
/// to carry a single moving part with a full cycle.
pub fn enumerate_small(d: u32, r: u32, n: usize) -> Vec<DecoratedTree> {
    let mut out = Vec::new();
    // Zero-edge trees: one vertex, any evaluation, any mark monodromies.
    for mu in OrderedZeroPartition::enumerate(d, r) {
        let mons = Multipartition::enumerate(&mu);
        let mut assignments: Vec<Vec<Multipartition>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for base in &assignments {
                for m in &mons {
                    let mut row = base.clone();
                    row.push(m.clone());
                    next.push(row);
                }
            }
            assignments = next;
        }
        for mark_mon in assignments {
            out.push(DecoratedTree {
                veval: vec![mu.clone()],
                edges: Vec::new(),
                marks: vec![0; n],
                mark_mon,
            });
        }
    }
    // One-edge trees of degree one: a single part moves with q = 1/eta.
    for mu1 in OrderedZeroPartition::enumerate(d, r) {
        for sigma1 in Multipartition::enumerate(&mu1) {
            for (i1, eta) in sigma1.labeled_parts().collect::<Vec<_>>() {
                for i2 in 0..mu1.len() {
                    if i2 == i1 {
                        continue;
                    }
                    let moving = Partition::new(&[eta]).unwrap();
                    let stripped = sigma1
                        .component(i1)
                        .difference(&moving)
                        .expect("part is present");
                    let grown = sigma1.component(i2).union(&moving);
                    let sigma2 = sigma1
                        .with_component(i1, stripped)
                        .with_component(i2, grown);
                    let mut mu2 = mu1.entries().to_vec();
                    mu2[i1] -= eta;
                    mu2[i2] += eta;
                    let mu2 = OrderedZeroPartition::new(mu2);
                    let q = Rat::new(1.into(), (eta as i64).into());
                    // Mark placements over two vertices; flag monodromies
                    // are forced at leaves by the mark (or ones when bare).
                    for mask in 0u32..(1 << n) {
                        let marks: Vec<usize> =
                            (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
                        // A bare leaf needs ones monodromy; a single-marked
                        // leaf copies its mark; more marks leave it free.
                        let ok1 = match marks.iter().filter(|&&m| m == 0).count() {
                            0 => sigma1.is_ones(),
                            _ => true,
                        };
                        let ok2 = match marks.iter().filter(|&&m| m == 1).count() {
                            0 => sigma2.is_ones(),
                            _ => true,
                        };
                        if !ok1 || !ok2 {
                            continue;
                        }
                        let mark_mon: Vec<Multipartition> = marks
                            .iter()
                            .map(|&m| if m == 0 { sigma1.clone() } else { sigma2.clone() })
                            .collect();
                        out.push(DecoratedTree {
                            veval: vec![mu1.clone(), mu2.clone()],
                            edges: vec![TreeEdge {
                                v1: 0,
                                v2: 1,
                                q: q.clone(),
                                mon1: sigma1.clone(),
                                mon2: sigma2.clone(),
                            }],
                            marks,
                            mark_mon,
                        });
                    }
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|t| seen.insert(t.canonical_form()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat::{rat_i, ratio};

    #[test]
    fn straight_chain_validates_and_minimizes_to_one_edge() {
        for k in 1..=4usize {
            let t = straight_chain(k);
            assert!(t.validate().pass(), "chain {k}: {:?}", t.validate().failures);
            let min = t.minimal_form().unwrap();
            assert_eq!(min.edges.len(), 1);
            assert_eq!(min.num_vertices(), 2);
        }
    }

    #[test]
    fn figure_pair_is_combinable() {
        // (2,0) -> (1,1) -> (0,2) with matching q: the interior vertex is
        // bare two-valent and the moving coordinates criss-cross.
        let t = straight_chain(2);
        assert!(t.combinable(0, 1).unwrap());
        let (merged, map) = t.combine(0, 1).unwrap();
        assert!(merged.validate().pass());
        assert_eq!(map, vec![0, 0]);
        assert_eq!(merged.edges.len(), 1);
        // Degree bookkeeping: beta is preserved.
        assert_eq!(t.total_degree().unwrap(), merged.total_degree().unwrap());
        // The merged edge moves both unit parts together.
        assert_eq!(merged.moving_parts(0).unwrap(), Partition::ones(2));
    }

    #[test]
    fn mismatched_q_blocks_combining() {
        let mut t = straight_chain(2);
        t.edges[1].q = rat_i(2);
        assert!(!t.combinable(0, 1).unwrap());
    }

    #[test]
    fn disjoint_edges_are_not_combinable() {
        let t = straight_chain(4);
        assert!(!t.combinable(0, 2).unwrap());
        assert!(t.combinable(9, 1).is_err());
    }

    #[test]
    fn reversal_blocks_combining() {
        // (2,0) -> (1,1) -> (2,0): same q but the moving coordinates do not
        // criss-cross.
        let base = straight_chain(1);
        let mut t = base.clone();
        t.veval.push(t.veval[0].clone());
        t.edges.push(TreeEdge {
            v1: 1,
            v2: 2,
            q: rat_i(1),
            mon1: t.edges[0].mon2.clone(),
            mon2: t.edges[0].mon1.clone(),
        });
        t.marks = vec![0, 2];
        t.mark_mon = vec![
            Multipartition::ones(&t.veval[0]),
            Multipartition::ones(&t.veval[2]),
        ];
        assert!(t.validate().pass());
        assert!(!t.combinable(0, 1).unwrap());
    }

    #[test]
    fn condition_violations_are_reported() {
        // Three coordinates changed: break condition 1.
        let mut t = straight_chain(1);
        t.veval = vec![
            OrderedZeroPartition::new(vec![2, 0, 0]),
            OrderedZeroPartition::new(vec![0, 1, 1]),
        ];
        t.edges[0].mon1 = Multipartition::ones(&t.veval[0]);
        t.edges[0].mon2 = Multipartition::ones(&t.veval[1]);
        t.mark_mon = vec![t.edges[0].mon1.clone(), t.edges[0].mon2.clone()];
        let v = t.validate();
        assert!(!v.pass());
        assert!(!v.conditions[0]);

        // Unequal flags at a bare two-valent vertex: break condition 5.
        // The middle vertex carries all mass at one coordinate, so its two
        // flags can disagree as (1,1) versus (2).
        let mut t = DecoratedTree {
            veval: vec![
                OrderedZeroPartition::new(vec![2, 0]),
                OrderedZeroPartition::new(vec![0, 2]),
                OrderedZeroPartition::new(vec![2, 0]),
            ],
            edges: vec![
                TreeEdge {
                    v1: 0,
                    v2: 1,
                    q: rat_i(1),
                    mon1: Multipartition::ones(&OrderedZeroPartition::new(vec![2, 0])),
                    mon2: Multipartition::ones(&OrderedZeroPartition::new(vec![0, 2])),
                },
                TreeEdge {
                    v1: 1,
                    v2: 2,
                    q: ratio(1, 2),
                    mon1: Multipartition::new(vec![
                        Partition::empty(),
                        Partition::new(&[2]).unwrap(),
                    ]),
                    mon2: Multipartition::new(vec![
                        Partition::new(&[2]).unwrap(),
                        Partition::empty(),
                    ]),
                },
            ],
            marks: vec![0, 2],
            mark_mon: vec![
                Multipartition::ones(&OrderedZeroPartition::new(vec![2, 0])),
                Multipartition::new(vec![Partition::new(&[2]).unwrap(), Partition::empty()]),
            ],
        };
        t.mark_mon[0] = t.edges[0].mon1.clone();
        let v = t.validate();
        assert!(!v.pass());
        assert!(!v.conditions[4], "failures: {:?}", v.failures);
    }

    #[test]
    fn one_edge_enumeration_validates() {
        for (d, r, n) in [(1u32, 1u32, 1usize), (2, 1, 1), (2, 1, 2)] {
            let trees = enumerate_small(d, r, n);
            assert!(!trees.is_empty());
            for t in &trees {
                assert!(t.validate().pass(), "{t}: {:?}", t.validate().failures);
            }
        }
    }

    #[test]
    fn combine_set_is_order_independent() {
        let t = straight_chain(4);
        let pairs = t.combinable_pairs();
        assert_eq!(pairs.len(), 3);
        let (fwd, map_fwd) = t.combine_set(&pairs).unwrap();
        let rev: Vec<(usize, usize)> = pairs.iter().rev().cloned().collect();
        let (bwd, map_bwd) = t.combine_set(&rev).unwrap();
        assert_eq!(fwd.canonical_form(), bwd.canonical_form());
        // The induced identifications of old edges must agree.
        for i in 0..map_fwd.len() {
            for j in 0..map_fwd.len() {
                assert_eq!(
                    map_fwd[i] == map_fwd[j],
                    map_bwd[i] == map_bwd[j]
                );
            }
        }
        assert_eq!(fwd.edges.len(), 1);
    }

    #[test]
    fn overlapping_pairs_collapse_three_edges() {
        let t = straight_chain(3);
        let pairs = t.combinable_pairs();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
        let (merged, map) = t.combine_set(&pairs).unwrap();
        assert_eq!(merged.edges.len(), 1);
        assert_eq!(map, vec![0, 0, 0]);
        let (merged2, _) = t
            .combine_set(&[(1, 2), (0, 1)])
            .unwrap();
        assert_eq!(merged.canonical_form(), merged2.canonical_form());
    }

    #[test]
    fn minimal_form_is_idempotent_on_fixtures() {
        for seed in 0..20u64 {
            let t = chain_fixture(4, seed);
            assert!(t.validate().pass());
            let m1 = t.minimal_form().unwrap();
            let m2 = m1.minimal_form().unwrap();
            assert_eq!(m1.canonical_form(), m2.canonical_form());
            assert!(m1.combinable_pairs().is_empty());
        }
    }

    #[test]
    fn combine_set_empty_is_identity() {
        let t = chain_fixture(3, 5);
        let (same, map) = t.combine_set(&[]).unwrap();
        assert_eq!(same.canonical_form(), t.canonical_form());
        assert_eq!(map, vec![0, 1, 2]);
    }

    #[test]
    fn json_round_trip() {
        let t = chain_fixture(2, 9);
        let s = serde_json::to_string(&t).unwrap();
        let back: DecoratedTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
