//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Everything is exact rational arithmetic; there are no tolerances.

use std::collections::BTreeSet;

use symcone::combinat::{LabelConvention, Multipartition, OrderedZeroPartition, Partition};
use symcone::coneverify::{
    check_condition_i, check_identity_signsum, check_psi_binomial, check_ratio_identity,
    compute_all_series, run_verify, VerifyConfig,
};
use symcone::exactalg::rat::{binomial, rat_i, rat_u, DetRng, Rat};
use symcone::exactalg::{AlphaRat, ZRat};
use symcone::ifunction::{
    classical_projective_restriction, i_restricted, Caps, IOpts, SeriesIndex,
};
use symcone::sectors::{enumerate_edges, FixedSector, RcVariant};
use symcone::symgroup::{hurwitz_count, ClassList, PermTable};
use symcone::trees::{chain_fixture, straight_chain};

fn report(name: &str, pass: bool) {
    println!("{name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name} failed");
}

/// A1: the degree-zero, insertion-free coefficient is exactly -z on every
/// ones sector and absent elsewhere, for d <= 4, r <= 2.
#[test]
fn a1_base_term() {
    let caps = Caps {
        beta: 0,
        x_total: 0,
        t_total: 0,
    };
    let mut pass = true;
    for d in 1..=4u32 {
        let table = PermTable::new(d).unwrap();
        for r in 0..=2u32 {
            for sector in FixedSector::enumerate(d, r) {
                let series = i_restricted(&sector, &table, caps, IOpts::default()).unwrap();
                let idx = SeriesIndex::base(sector.num_coords());
                let got = series.coeff(&idx);
                let ok = if sector.is_ones() {
                    got == ZRat::z(sector.num_coords()).neg()
                } else {
                    got.is_zero()
                };
                if !ok {
                    eprintln!("base term wrong on {sector}");
                    pass = false;
                }
            }
        }
    }
    report("A1 base-term", pass);
}

/// A2: for d = 1 the restriction matches the independently coded classical
/// projective-space formula, r <= 2, beta <= 3.
#[test]
fn a2_degree_one_reduction() {
    let table = PermTable::new(1).unwrap();
    let caps = Caps {
        beta: 3,
        x_total: 0,
        t_total: 0,
    };
    let mut pass = true;
    for r in 0..=2u32 {
        let n = (r + 1) as usize;
        for j in 0..n {
            let mut mu = vec![0u32; n];
            mu[j] = 1;
            let mut comps = vec![Partition::empty(); n];
            comps[j] = Partition::ones(1);
            let sector = FixedSector::new(
                OrderedZeroPartition::new(mu),
                Multipartition::new(comps),
            )
            .unwrap();
            let series = i_restricted(&sector, &table, caps, IOpts::default()).unwrap();
            for beta in 0..=3u32 {
                let idx = SeriesIndex::base(n).with_beta(beta);
                if series.coeff(&idx) != classical_projective_restriction(n, j, beta) {
                    eprintln!("classical mismatch at r={r} j={j} beta={beta}");
                    pass = false;
                }
            }
        }
    }
    report("A2 d=1-classical-reduction", pass);
}

/// A3: condition (I) pole containment on four desk-scale configurations
/// under the nonnegative label convention.
#[test]
fn a3_condition_i() {
    let mut pass = true;
    for (d, r, beta_cap, x_cap) in [(1u32, 1u32, 3u32, 0u32), (2, 1, 2, 2), (3, 1, 2, 1), (2, 2, 2, 1)] {
        let config = VerifyConfig::new(d, r, beta_cap, x_cap);
        let all = compute_all_series(&config).unwrap();
        for (sector, series) in &all {
            let edges = enumerate_edges(sector, &rat_u(beta_cap as u64));
            for rep in check_condition_i(series, &edges) {
                if !rep.pass {
                    eprintln!(
                        "stray pole at (d={d},r={r}) {sector} {}: {:?} {:?}",
                        rep.index, rep.stray, rep.diagnostics
                    );
                    pass = false;
                }
            }
        }
    }
    report("A3 condition-I", pass);
}

/// A4: condition (II) at d = 1 with the recursion coefficient exactly as
/// printed: identically zero diff for every pole and order, r <= 2,
/// beta <= 3. Includes the A11 specialization cross-check.
#[test]
fn a4_condition_ii_degree_one() {
    let mut pass = true;
    for r in 0..=2u32 {
        let mut config = VerifyConfig::new(1, r, 3, 0);
        config.probe = true;
        let run = run_verify(&config).unwrap();
        if !run.condition_ii_pass {
            eprintln!("printed-coefficient recursion failed at d=1 r={r}");
            pass = false;
        }
        if !run.specialization_pass {
            eprintln!("specialization cross-check failed at d=1 r={r}");
            pass = false;
        }
    }
    report("A4 condition-II-d1 (printed RC, specialized x5)", pass);
}

/// A4': condition (II) at d = 2: each diff is identically zero or the
/// normalization probe resolves every failure by one global monomial in
/// the sector monodromy order, confirmed by a full rescaled rerun. The
/// label-convention experiment is reported alongside: the nonnegative
/// convention satisfies the recursion, the strictly-positive one does not.
#[test]
fn a4p_condition_ii_degree_two() {
    let mut config = VerifyConfig::new(2, 1, 2, 1);
    config.probe = true;
    let run = run_verify(&config).unwrap();
    let mut pass = true;
    if !(run.condition_ii_pass || run.fitted_factor_power.is_some()) {
        eprintln!("scattered diff: no global monomial explains the failures");
        pass = false;
    }
    if !run.specialization_pass {
        eprintln!("specialization cross-check failed");
        pass = false;
    }
    match run.fitted_factor_power {
        Some(s) => println!(
            "A4' finding: printed coefficients fail exactly by the global monomial \
             r_sigma^{s} per denominator factor (r_sigma^{{{s}*(mov-(r+1)beta)}} per edge); \
             rescaled rerun is identically zero"
        ),
        None => println!("A4' finding: printed coefficients satisfy the recursion as-is"),
    }

    // Convention experiment: which label convention satisfies the
    // recursion is an empirical outcome, not an assumption.
    let mut pos_config = VerifyConfig::new(2, 1, 2, 1);
    pos_config.convention = LabelConvention::Pos;
    pos_config.probe = true;
    let pos_run = run_verify(&pos_config).unwrap();
    println!(
        "A4' convention experiment: nonneg satisfies condition (II): {}; pos satisfies: {}",
        run.condition_ii_pass || run.fitted_factor_power.is_some(),
        pos_run.condition_ii_pass || pos_run.fitted_factor_power.is_some()
    );
    if pos_run.condition_ii_pass || pos_run.fitted_factor_power.is_some() {
        eprintln!("strictly-positive labels unexpectedly satisfy the recursion");
        pass = false;
    }
    report("A4' condition-II-d2 (probe + convention experiment)", pass);
}

/// A5: exhaustive sign-sum identity over all shapes with at most 4
/// occurrences, all orders, and all force-in/force-out patterns arising
/// from tuples of the complementary size.
#[test]
fn a5_sign_sum_identity() {
    let mut pass = true;
    let mut checked = 0u64;
    for shape in all_partitions_up_to_len(4) {
        let len = shape.len();
        for a in 1..=len as u32 {
            // Patterns: disjoint (in, out) with |in| + |out| <= len - a,
            // the sizes realizable by (len - a)-tuples of factors.
            let budget = len - a as usize;
            for in_mask in 0u32..(1 << len) {
                for out_mask in 0u32..(1 << len) {
                    if in_mask & out_mask != 0 {
                        continue;
                    }
                    if (in_mask.count_ones() + out_mask.count_ones()) as usize > budget {
                        continue;
                    }
                    let forced_in: BTreeSet<usize> =
                        (0..len).filter(|i| in_mask & (1 << i) != 0).collect();
                    let forced_out: BTreeSet<usize> =
                        (0..len).filter(|i| out_mask & (1 << i) != 0).collect();
                    let rep = check_identity_signsum(&shape, &forced_in, &forced_out, a);
                    checked += 1;
                    if !rep.pass {
                        eprintln!(
                            "sign-sum mismatch: shape={shape} a={a} in={forced_in:?} \
                             out={forced_out:?} got={} expect={}",
                            rep.got, rep.expect
                        );
                        pass = false;
                    }
                }
            }
        }
    }
    println!("A5 checked {checked} patterns");
    report("A5 sign-sum-identity", pass);
}

fn all_partitions_up_to_len(max_len: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for n in 1..=(4 * max_len as u32) {
        for p in Partition::all_of(n) {
            if p.len() <= max_len && p.parts().iter().all(|&v| v <= 4) {
                out.push(p);
            }
        }
    }
    out
}

/// A6: the cotangent-integral binomial identity for 1 <= k <= 8.
#[test]
fn a6_psi_binomial() {
    let mut pass = true;
    for k in 1..=8u32 {
        if !check_psi_binomial(k) {
            eprintln!("psi binomial identity failed at k={k}");
            pass = false;
        }
    }
    report("A6 psi-binomial-identity", pass);
}

/// A7: factorization counts are rotation- and reversal-invariant for
/// d <= 5 and lists of length <= 3, and a single class factors the
/// identity exactly when it is the ones class, for d <= 6.
#[test]
fn a7_hurwitz_oracle() {
    let mut pass = true;
    for d in 1..=5u32 {
        let table = PermTable::new(d).unwrap();
        let classes = Partition::all_of(d);
        let mut lists: Vec<Vec<Partition>> = Vec::new();
        for c1 in &classes {
            lists.push(vec![c1.clone()]);
            for c2 in &classes {
                lists.push(vec![c1.clone(), c2.clone()]);
                for c3 in &classes {
                    lists.push(vec![c1.clone(), c2.clone(), c3.clone()]);
                }
            }
        }
        for list in lists {
            let count = |cs: &[Partition]| {
                table
                    .factorization_count(&ClassList::new(d, cs.to_vec()).unwrap())
                    .unwrap()
            };
            let base = count(&list);
            let mut rotated = list.clone();
            for _ in 1..list.len() {
                rotated.rotate_left(1);
                if count(&rotated) != base {
                    eprintln!("rotation changed count for d={d} {list:?}");
                    pass = false;
                }
            }
            let reversed: Vec<Partition> = list.iter().rev().cloned().collect();
            if count(&reversed) != base {
                eprintln!("reversal changed count for d={d} {list:?}");
                pass = false;
            }
        }
    }
    for d in 1..=6u32 {
        for sigma in Partition::all_of(d) {
            let got = hurwitz_count(&ClassList::new(d, vec![sigma.clone()]).unwrap()).unwrap();
            let expect = if sigma.is_ones() { 1 } else { 0 };
            if got != expect {
                eprintln!("single-class count wrong for d={d} sigma={sigma}");
                pass = false;
            }
        }
    }
    report("A7 hurwitz-oracle", pass);
}

/// A8: order-independence of combining and the subset <-> tree bijection
/// on chain fixtures, 1000 randomized orders.
#[test]
fn a8_combining_calculus() {
    let mut pass = true;
    let mut rng = DetRng::new(0xa8);
    let mut orders_run = 0u32;
    let mut fixtures: Vec<_> = (0..30u64).map(|seed| chain_fixture(4, seed)).collect();
    fixtures.push(straight_chain(2));
    fixtures.push(straight_chain(3));
    fixtures.push(straight_chain(4));
    for t in &fixtures {
        if !t.validate().pass() {
            eprintln!("fixture failed validation");
            pass = false;
            continue;
        }
        let pairs = t.combinable_pairs();
        // Subset <-> tree bijection: distinct subsets, distinct trees;
        // and combining the remainder of a subset reaches the superset's
        // tree (order reversal).
        let mut forms = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let subset: Vec<(usize, usize)> = (0..pairs.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| pairs[i])
                .collect();
            let (tree, map) = t.combine_set(&subset).unwrap();
            forms.push((mask, tree.canonical_form(), map));
        }
        for i in 0..forms.len() {
            for j in (i + 1)..forms.len() {
                if forms[i].1 == forms[j].1 {
                    eprintln!("distinct subsets produced identical trees");
                    pass = false;
                }
                let (small, large) = (forms[i].0, forms[j].0);
                if small & large == small {
                    // large extends small: combining the mapped remainder
                    // of small's tree must reach large's tree.
                    let (small_tree, small_map) = t
                        .combine_set(
                            &(0..pairs.len())
                                .filter(|k| small & (1 << k) != 0)
                                .map(|k| pairs[k])
                                .collect::<Vec<_>>(),
                        )
                        .unwrap();
                    let rest: Vec<(usize, usize)> = (0..pairs.len())
                        .filter(|k| (large & !small) & (1 << k) != 0)
                        .map(|k| (small_map[pairs[k].0], small_map[pairs[k].1]))
                        .collect();
                    match small_tree.combine_set(&rest) {
                        Ok((reached, _)) => {
                            if reached.canonical_form() != forms[j].1 {
                                eprintln!("order reversal failed");
                                pass = false;
                            }
                        }
                        Err(e) => {
                            eprintln!("mapped remainder not combinable: {e}");
                            pass = false;
                        }
                    }
                }
            }
        }
    }
    // Randomized application orders of each fixture's full pair set,
    // round-robin until the budget is spent.
    let mut cursor = 0usize;
    while orders_run < 1000 {
        let t = &fixtures[cursor % fixtures.len()];
        cursor += 1;
        let pairs = t.combinable_pairs();
        if pairs.is_empty() {
            continue;
        }
        let mut order = pairs.clone();
        // Fisher-Yates from the deterministic stream.
        for i in (1..order.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        let (tree, _) = t.combine_set(&order).unwrap();
        let (base_tree, _) = t.combine_set(&pairs).unwrap();
        if tree.canonical_form() != base_tree.canonical_form() {
            eprintln!("randomized order changed the result");
            pass = false;
        }
        orders_run += 1;
    }
    println!("A8 ran {orders_run} randomized orders");
    report("A8 combining-calculus", pass);
}

/// A9: the centralizer ratio identity on every edge with d <= 6 at
/// degree cap 2.
#[test]
fn a9_ratio_identity() {
    let mut pass = true;
    let mut checked = 0u64;
    for d in 1..=6u32 {
        for sector in FixedSector::enumerate(d, 1) {
            for edge in enumerate_edges(&sector, &rat_i(2)) {
                checked += 1;
                if !check_ratio_identity(&edge) {
                    eprintln!("ratio identity failed on {edge}");
                    pass = false;
                }
            }
        }
    }
    println!("A9 checked {checked} edges");
    report("A9 ratio-identity", pass);
}

/// A10: RC(kappa, a) * W(kappa) equals the closed combinatorial prefactor
/// for all edges with d <= 3 at cap 2 and every order, with W computed by
/// its independent two-sided product form.
#[test]
fn a10_weight_product_vs_recursion_coefficient() {
    let mut pass = true;
    let mut checked = 0u64;
    for d in 1..=3u32 {
        for sector in FixedSector::enumerate(d, 1) {
            let n = sector.num_coords();
            for edge in enumerate_edges(&sector, &rat_i(2)) {
                let w = edge.moving_weight_product();
                for a in 1..=edge.mov_count() {
                    let rc = edge.recursion_coefficient(a, RcVariant::PRINTED).unwrap();
                    let mov = edge.mov_count();
                    let sign = if (mov - a) % 2 == 0 { 1i64 } else { -1 };
                    let mut expect = rat_i(sign)
                        * rat_u(
                            sector
                                .sigma
                                .component(edge.from_coord)
                                .multiset_binomial(&edge.moving),
                        )
                        * rat_u(binomial((mov - 1) as u64, (a - 1) as u64));
                    for _ in 0..mov {
                        expect /= edge.q.clone();
                    }
                    checked += 1;
                    if rc.mul(&w) != AlphaRat::constant(n, expect) {
                        eprintln!("RC*W mismatch on {edge} at a={a}");
                        pass = false;
                    }
                }
            }
        }
    }
    println!("A10 checked {checked} (edge, order) pairs");
    report("A10 weight-product-vs-RC", pass);
}

/// A11: the specialization cross-check is bundled into A4/A4' (five random
/// exact assignments per passing report); this entry asserts the wiring by
/// rerunning d=1 with a different seed.
#[test]
fn a11_specialization_cross_check() {
    let mut config = VerifyConfig::new(1, 1, 3, 0);
    config.seed = 0xfeed;
    config.specialization_checks = 5;
    let run = run_verify(&config).unwrap();
    report(
        "A11 specialization-cross-check",
        run.condition_ii_pass && run.specialization_pass,
    );
}

/// Seed determinism of the whole verify pipeline: two runs with one seed
/// agree; Rat draws differ across seeds.
#[test]
fn verify_runs_are_deterministic() {
    let config = VerifyConfig::new(2, 1, 1, 1);
    let a = serde_json::to_string(&run_verify(&config).unwrap()).unwrap();
    let b = serde_json::to_string(&run_verify(&config).unwrap()).unwrap();
    assert_eq!(a, b);
    let mut r1 = DetRng::new(1);
    let mut r2 = DetRng::new(2);
    assert_ne!(
        (0..8).map(|_| r1.small_rat(40, 6)).collect::<Vec<Rat>>(),
        (0..8).map(|_| r2.small_rat(40, 6)).collect::<Vec<Rat>>()
    );
}
