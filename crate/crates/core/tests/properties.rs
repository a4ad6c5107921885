mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use common::*;
use nestkit::cyclic::{novak_select, verify_disjoint_selection, CyclicBibd};
use nestkit::designs::{
    alpha_beta, apply_nesting, is_perfect_nesting, levi_graph, nesting_to_coloring, verify_bibd,
    verify_exact, verify_harmonious, verify_packing, Design, NestingCertificate,
};
use nestkit::diff_families::{delta_counts, develop, verify_df, DifferenceFamily};
use nestkit::groups::{
    bad_translation_bound, bad_translations, blocking_translations, AbelianGroup, GroupSubset,
};
use nestkit::hypergraph::{find_nesting, BipartiteHypergraph, EdgePayload, HyperEdge};
use nestkit::matching::{brute_force_matching, solve, verify_matching, SolverConfig, SolverMode};

fn group_orders() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=9, 1..=3)
}

fn design_strategy() -> impl Strategy<Value = (usize, usize, Vec<Vec<usize>>)> {
    (4usize..=9, 2usize..=4).prop_flat_map(|(v, k)| {
        let k = k.min(v - 1);
        let block = prop::sample::subsequence((0..v).collect::<Vec<_>>(), k);
        (Just(v), Just(k), prop::collection::vec(block, 1..=14))
    })
}

fn fano() -> Design {
    let blocks = (0..7).map(|g| vec![g, (g + 1) % 7, (g + 3) % 7]).collect();
    Design::new(7, 3, 1, blocks).unwrap()
}

fn sts13() -> Design {
    nestkit::cli::parse_cyclic(&read_fixture("sts13.cyclic"))
        .unwrap()
        .develop()
}

fn corpus_cached() -> &'static [CorpusEntry] {
    static CORPUS: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    CORPUS.get_or_init(corpus)
}

fn nestings() -> &'static [NestingCertificate; 2] {
    static FOUND: OnceLock<[NestingCertificate; 2]> = OnceLock::new();
    FOUND.get_or_init(|| {
        [sts13(), fano()].map(|d| {
            let found = find_nesting(&d, &SolverConfig::default()).unwrap();
            found.certificate.expect("nesting exists")
        })
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn verifiers_agree_with_pair_counts((v, k, blocks) in design_strategy(), lambda in 1usize..=3) {
        let d = Design::new(v, k, lambda, blocks.clone()).unwrap();
        let bibd = verify_bibd(&d).ok;
        let packing = verify_packing(&d).ok;
        prop_assert_eq!(bibd, oracle_is_bibd(v, lambda, &blocks));
        prop_assert_eq!(packing, oracle_is_packing(lambda, &blocks));
        prop_assert!(!bibd || packing);
    }

    #[test]
    fn valid_nestings_color_harmoniously(anchors in prop::collection::vec(0usize..13, 26), use_fano in any::<bool>()) {
        let d = if use_fano { fano() } else { sts13() };
        let anchors = &anchors[..d.block_count()];
        let anchors: Vec<usize> = anchors.iter().map(|a| a % d.v()).collect();
        if let Ok(cert) = apply_nesting(&d, &anchors) {
            let nested: Vec<Vec<usize>> = d
                .blocks()
                .iter()
                .zip(&anchors)
                .map(|(b, &a)| b.iter().copied().chain([a]).collect())
                .collect();
            prop_assert!(oracle_is_packing(2 * d.lambda(), &nested));
            let g = levi_graph(&d);
            let col = nesting_to_coloring(&cert);
            prop_assert!(verify_harmonious(&g, &col));
            prop_assert_eq!(verify_exact(&g, &col), is_perfect_nesting(&cert));
            prop_assert_eq!(oracle_harmonious(d.v(), d.blocks(), col.colors()).is_some(), true);
        } else {
            let colors: Vec<usize> = (0..d.v()).chain(anchors.iter().copied()).collect();
            prop_assert!(oracle_harmonious(d.v(), d.blocks(), &colors).is_none());
        }
    }

    #[test]
    fn relabelled_nestings_stay_perfect(perm in Just((0..13).collect::<Vec<usize>>()).prop_shuffle(), use_fano in any::<bool>()) {
        let cert = &nestings()[usize::from(use_fano)];
        let d = cert.base();
        let perm: Vec<usize> = perm.into_iter().filter(|&p| p < d.v()).collect();
        let blocks = d.blocks().iter().map(|b| b.iter().map(|&x| perm[x]).collect()).collect();
        let relabelled = Design::new(d.v(), d.k(), d.lambda(), blocks).unwrap();
        let anchors: Vec<usize> = cert.anchors().iter().map(|&a| perm[a]).collect();
        let moved = apply_nesting(&relabelled, &anchors).unwrap();
        prop_assert!(is_perfect_nesting(&moved));
        let col = nesting_to_coloring(&moved);
        prop_assert!(verify_exact(&levi_graph(&relabelled), &col));
        prop_assert_eq!(oracle_harmonious(d.v(), relabelled.blocks(), col.colors()), Some(d.v() * (d.v() - 1) / 2));
    }

    #[test]
    fn group_arithmetic_matches_mixed_radix(orders in group_orders(), x in 0usize..1000, y in 0usize..1000) {
        let g = AbelianGroup::new(orders.clone()).unwrap();
        let n = order(&orders);
        let (x, y) = (x % n, y % n);
        let element = g.element_at(x);
        let expected = residues(&orders, x);
        prop_assert_eq!(element.residues(), expected.as_slice());
        prop_assert_eq!(g.index_of(&g.element_at(x)), x);
        prop_assert_eq!(g.add_idx(x, y), add(&orders, x, y));
        prop_assert_eq!(g.neg_idx(x), neg(&orders, x));
        prop_assert_eq!(g.neg_idx(g.neg_idx(x)), x);
        prop_assert_eq!(g.sub_idx(g.add_idx(x, y), y), x);
    }

    #[test]
    fn translation_round_trip(orders in group_orders(), raw in prop::collection::btree_set(0usize..1000, 1..6), a in 0usize..1000) {
        let g = AbelianGroup::new(orders.clone()).unwrap();
        let n = order(&orders);
        let block = GroupSubset::from_indices(&g, raw.iter().map(|x| x % n));
        let a = g.element_at(a % n);
        let back = block.translate(&a).unwrap().translate(&g.neg(&a).unwrap()).unwrap();
        prop_assert_eq!(back.indices(), block.indices());
        prop_assert_eq!(block.negate().negate().indices(), block.indices());
    }

    #[test]
    fn translation_counting_bounds(orders in group_orders(), raw in prop::collection::btree_set(0usize..1000, 1..6), xs in prop::collection::btree_set(0usize..1000, 0..6)) {
        let g = AbelianGroup::new(orders.clone()).unwrap();
        let n = order(&orders);
        let block = GroupSubset::from_indices(&g, raw.iter().map(|x| x % n));
        let x = GroupSubset::from_indices(&g, xs.iter().map(|x| x % n));
        let k = block.len();
        let order2 = (1..n).filter(|&e| add(&orders, e, e) == 0).count();
        let bad = bad_translations(&block);
        prop_assert!(bad.len() as u128 <= bad_translation_bound(&g, k));
        prop_assert!(bad.len() as u128 <= (1u128 << order2) * (k * k) as u128);
        let blocking = blocking_translations(&block, &x).unwrap();
        prop_assert!(blocking.len() <= k * x.len());
        if x.len() == 1 {
            prop_assert_eq!(blocking.len(), k);
        }
    }

    #[test]
    fn family_properties_survive_translation(pick in 0usize..16, shifts in prop::collection::vec(0usize..1000, 4)) {
        let families: Vec<&DifferenceFamily> = corpus_cached().iter().filter_map(|e| e.family.as_ref()).collect();
        let f = families[pick % families.len()];
        let g = f.group();
        let shifts: Vec<_> = f
            .base_blocks()
            .iter()
            .zip(shifts.iter().cycle())
            .map(|(_, &s)| g.element_at(s % g.order()))
            .collect();
        let t = f.translated(&shifts).unwrap();
        prop_assert!(verify_df(&t).ok);
        prop_assert_eq!(delta_counts(&t), delta_counts(f));
        let counts = delta_counts(&t);
        prop_assert_eq!(counts[0], 0);
        prop_assert!(counts[1..].iter().all(|&c| c == t.lambda()));
        let d = develop(&t).unwrap();
        prop_assert!(oracle_is_bibd(d.v(), d.lambda(), d.blocks()));
    }

    #[test]
    fn solver_is_sound_and_deterministic(
        left in 1usize..=6,
        rank in 1usize..=3,
        extra in 0usize..=4,
        raw in prop::collection::vec((0usize..6, prop::collection::btree_set(0usize..30, 3)), 0..20),
        seed in any::<u64>(),
    ) {
        let right = left * rank + extra;
        let edges: Vec<HyperEdge> = raw
            .iter()
            .filter_map(|(l, set)| {
                let r: BTreeSet<usize> = set.iter().map(|x| x % right).collect();
                (r.len() >= rank).then(|| HyperEdge {
                    left: l % left,
                    right: r.into_iter().take(rank).collect(),
                    payload: EdgePayload { block: l % left, shift: 0 },
                })
            })
            .collect();
        let h = BipartiteHypergraph::new(left, right, rank, edges).unwrap();
        let exact = SolverConfig { mode: SolverMode::Exact, ..SolverConfig::default() };
        let a = solve(&h, &exact).unwrap();
        let b = solve(&h, &exact).unwrap();
        prop_assert_eq!(&a.outcome, &b.outcome);
        prop_assert_eq!(a.outcome.matching().is_some(), brute_force_matching(&h).unwrap().is_some());
        if let Some(m) = a.outcome.matching() {
            prop_assert!(verify_matching(&h, m).ok);
        }
        let heuristic = SolverConfig { mode: SolverMode::Heuristic, seed, restart_budget: 50, ..SolverConfig::default() };
        let c = solve(&h, &heuristic).unwrap();
        prop_assert_eq!(&c.outcome, &solve(&h, &heuristic).unwrap().outcome);
        if let Some(m) = c.outcome.matching() {
            prop_assert!(verify_matching(&h, m).ok);
        }
    }

    #[test]
    fn alpha_beta_capture_divisibility(k1 in 2u64..=8, k2 in 2u64..=8, t in 1u64..=6, v in 2u64..400) {
        prop_assume!(k1 < k2);
        let (a, b) = (k1 * (k1 - 1), k2 * (k2 - 1));
        let g = gcd(a as usize, b as usize) as u64;
        let (l1, l2) = (t * a / g, t * b / g);
        let ab = alpha_beta(k1, l1, k2, l2).unwrap();
        let local = (l1 * (v - 1)) % (k1 - 1) == 0 && (l2 * (v - 1)) % (k2 - 1) == 0;
        let global = (l1 * v * (v - 1)) % (k1 * (k1 - 1)) == 0;
        prop_assert_eq!((v - 1) % ab.alpha == 0, local);
        prop_assert_eq!((v * (v - 1)) % ab.beta == 0, global);
    }

    #[test]
    fn orbit_selections_verify(pick in 0usize..4, unit in 1usize..40, shifts in prop::collection::vec(0usize..40, 4)) {
        let name = ["sts13.cyclic", "sts15.cyclic", "sts19.cyclic", "sts21.cyclic"][pick];
        let c = nestkit::cli::parse_cyclic(&read_fixture(name)).unwrap();
        let v = c.v();
        prop_assume!(gcd(unit % v, v) == 1);
        let bases = c
            .bases()
            .iter()
            .zip(&shifts)
            .map(|(b, s)| b.iter().map(|x| (x * unit + s) % v).collect())
            .collect();
        let image = CyclicBibd::new(v, c.k(), c.lambda(), bases).unwrap();
        let report = novak_select(&image, &SolverConfig::default()).unwrap();
        if let Some(sel) = report.selection() {
            prop_assert!(verify_disjoint_selection(&image, &sel.blocks).ok);
            let points: Vec<usize> = sel.blocks.iter().flatten().copied().collect();
            let distinct: BTreeSet<usize> = points.iter().copied().collect();
            prop_assert_eq!(points.len(), distinct.len());
        }
    }
}
