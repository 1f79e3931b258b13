//! Randomized structural properties of the combinatorial core.

use std::sync::OnceLock;

use proptest::prelude::*;

use motzkinlab::combinatorics::{
    binomial, class_rank, class_size, class_unrank, classify, dyck_rank, dyck_unrank, mirror,
    DyckWord, Letter, LocalMove, SectorLabel, SpinString,
};
use motzkinlab::dyckwalk::differ_by_one_pair;
use motzkinlab::numerics::linear_fit;
use motzkinlab::supertree::{build_supertree, canonical_path, ParentRule, Supertree};
use motzkinlab::unbalanced::{build_hopping, hopping_walk, mark_unmatched, Mark};

fn letter_strategy() -> impl Strategy<Value = Letter> {
    prop_oneof![
        Just(Letter::Zero),
        Just(Letter::Left),
        Just(Letter::Right)
    ]
}

fn string_strategy(max_len: usize) -> impl Strategy<Value = SpinString> {
    proptest::collection::vec(letter_strategy(), 1..=max_len).prop_map(SpinString::new)
}

/// Random bracket word grown by inserting pairs at random gaps.
fn dyck_strategy(max_pairs: usize) -> impl Strategy<Value = DyckWord> {
    proptest::collection::vec(proptest::num::u8::ANY, 0..=max_pairs).prop_map(|gaps| {
        let mut w = DyckWord::empty();
        for g in gaps {
            let gap = (g as usize) % (w.len() + 1);
            w = w.insert_pair(gap).expect("gap in range");
        }
        w
    })
}

fn shared_tree() -> &'static Supertree {
    static TREE: OnceLock<Supertree> = OnceLock::new();
    TREE.get_or_init(|| build_supertree(5).expect("small tree builds"))
}

proptest! {
    #[test]
    fn rank_and_unrank_are_inverse(s in string_strategy(12)) {
        let label = classify(&s);
        let rank = class_rank(&s).unwrap();
        let back = class_unrank(s.len(), label, rank).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn rank_respects_lexicographic_order(a in string_strategy(9), pick in proptest::num::u128::ANY) {
        let label = classify(&a);
        let size = u128::try_from(class_size(a.len(), label.excess())).unwrap();
        let b = class_unrank(a.len(), label, pick % size).unwrap();
        let ra = class_rank(&a).unwrap();
        let rb = class_rank(&b).unwrap();
        prop_assert_eq!(ra.cmp(&rb), a.cmp(&b));
    }

    #[test]
    fn bracket_rank_roundtrips(w in dyck_strategy(8)) {
        let rank = dyck_rank(&w).unwrap();
        let back = dyck_unrank(w.semilength(), rank).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn mirror_is_an_involution_and_swaps_the_label(s in string_strategy(12)) {
        let m = mirror(&s);
        prop_assert_eq!(mirror(&m), s.clone());
        let there = classify(&s);
        let here = classify(&m);
        prop_assert_eq!(here, SectorLabel::new(there.q, there.p));
    }

    #[test]
    fn local_moves_preserve_the_sector(
        s in string_strategy(12),
        which in 0usize..3,
        pos in 0usize..12,
    ) {
        let mv = LocalMove::ALL[which];
        if let Some(out) = mv.apply(&s, pos % s.len().max(1)) {
            prop_assert_eq!(classify(&out), classify(&s));
            prop_assert_eq!(out.len(), s.len());
        }
    }

    #[test]
    fn marking_is_reversible_and_ordered(s in string_strategy(12)) {
        let label = classify(&s);
        prop_assume!(label.q == 0 && label.p >= 1);
        let marks = mark_unmatched(&s).unwrap();
        prop_assert_eq!(marks.len(), s.len());
        let first_x = marks.iter().position(|&m| m == Mark::X);
        prop_assert!(first_x.is_some());
        let n_markers = marks
            .iter()
            .filter(|&&m| m == Mark::X || m == Mark::Y)
            .count();
        prop_assert_eq!(n_markers, label.p);
        for (i, &m) in marks.iter().enumerate() {
            if m == Mark::Y {
                prop_assert!(i > first_x.unwrap());
            }
        }
    }

    #[test]
    fn hopping_chain_is_exact_at_any_size(n in 2usize..=120) {
        let chain = build_hopping(n).unwrap();
        prop_assert!(chain.amplitudes_in_bounds());
        let walk = hopping_walk(n).unwrap();
        prop_assert!(walk.rows_sum_to_one());
        prop_assert!(walk.detailed_balance_holds());
    }

    #[test]
    fn tree_paths_connect_and_stay_short(
        a in dyck_strategy(5),
        b in dyck_strategy(5),
    ) {
        let tree = shared_tree();
        let path = canonical_path(tree, ParentRule::Matching, &a, &b).unwrap();
        prop_assert_eq!(path.first().unwrap(), &a);
        prop_assert_eq!(path.last().unwrap(), &b);
        prop_assert!(path.len() <= a.semilength() + b.semilength() + 1);
        for step in path.windows(2) {
            prop_assert!(differ_by_one_pair(&step[0], &step[1]));
        }
    }

    #[test]
    fn pascal_recurrence_holds(n in 1usize..=40, k in 1usize..=40) {
        prop_assume!(k <= n);
        let lhs = binomial(n, k);
        let rhs = binomial(n - 1, k - 1) + binomial(n - 1, k);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exact_lines_are_recovered(
        slope in -5.0f64..5.0,
        intercept in -5.0f64..5.0,
        count in 3usize..=9,
    ) {
        let xs: Vec<f64> = (0..count).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.intercept - intercept).abs() < 1e-9);
        prop_assert!(fit.rms_residual < 1e-9);
    }
}
