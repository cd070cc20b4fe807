use descriptive_proximity::algebra::{classify, BinaryOp, CheckOptions, Level};
use descriptive_proximity::approx::{lower_approximation, upper_approximation};
use descriptive_proximity::audit::random_space;
use descriptive_proximity::space::{PointId, Region};
use proptest::prelude::*;

fn space_and_mask() -> impl Strategy<Value = (usize, usize, u32, u64, u64)> {
    (1usize..=3, 1usize..=3, 1u32..=4, any::<u64>(), 1u64..512)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn approximations_match_vector_comparison((r, c, k, seed, mask) in space_and_mask()) {
        let s = random_space(r, c, k, seed).unwrap();
        let mask = mask & ((1 << s.len()) - 1);
        prop_assume!(mask != 0);
        let a = Region::from_mask(&s, mask);
        let members: Vec<PointId> = a.iter().collect();
        let vec_of = |p: PointId| s.describe(p).unwrap().clone();
        let upper: Vec<PointId> = s
            .points()
            .filter(|&p| members.iter().any(|&q| vec_of(q) == vec_of(p)))
            .collect();
        let lower: Vec<PointId> = members
            .iter()
            .copied()
            .filter(|&p| s.points().all(|q| vec_of(q) != vec_of(p) || members.contains(&q)))
            .collect();
        prop_assert_eq!(upper_approximation(&a).iter().collect::<Vec<_>>(), upper);
        prop_assert_eq!(lower_approximation(&a).iter().collect::<Vec<_>>(), lower);
    }

    #[test]
    fn classification_ignores_insertion_order((r, c, k, seed, mask) in space_and_mask()) {
        let s = random_space(r, c, k, seed).unwrap();
        let mask = mask & ((1 << s.len()) - 1);
        prop_assume!(mask != 0);
        let forward: Vec<PointId> = Region::from_mask(&s, mask).iter().collect();
        let mut backward = forward.clone();
        backward.reverse();
        let a = Region::new(&s, forward).unwrap();
        let b = Region::new(&s, backward).unwrap();
        let op = BinaryOp::MinIndex;
        let ra = classify(&s, &op, &a, CheckOptions::default()).unwrap();
        let rb = classify(&s, &op, &b, CheckOptions::default()).unwrap();
        prop_assert_eq!(ra.level, rb.level);
        prop_assert_eq!(ra.summary(), rb.summary());
        prop_assert_eq!(&ra.witnesses, &rb.witnesses);
    }

    #[test]
    fn witnesses_replay_and_levels_are_consistent((r, c, k, seed, mask) in space_and_mask(), n in 2usize..=3) {
        let s = random_space(r, c, k, seed).unwrap();
        let mask = mask & ((1 << s.len()) - 1);
        prop_assume!(mask != 0);
        let a = Region::from_mask(&s, mask);
        let op = BinaryOp::ModAdd(n);
        let Ok(rep) = classify(&s, &op, &a, CheckOptions::default()) else {
            return Ok(());
        };
        for w in &rep.witnesses {
            prop_assert!(w.replay(&s, &op, &a).unwrap(), "witness {} does not replay", w);
        }
        prop_assert_eq!(rep.level >= Level::Groupoid, rep.closed);
        prop_assert_eq!(rep.level >= Level::Semigroup, rep.closed && rep.associative);
        prop_assert_eq!(rep.level >= Level::Monoid, rep.level >= Level::Semigroup && rep.identity.is_some());
        if rep.level == Level::Group {
            prop_assert_eq!(rep.inverse_map.len(), a.len());
        }
    }
}
