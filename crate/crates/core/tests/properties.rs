//! Randomised invariants of the model, strategies, checker, efficiency,
//! decomposition and auction modules.

use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vcglab::auctions::{
    enumerate_allocations, is_monotone, is_quasi_field, valuation_from_bundles, Bundle, BundleFamily, BundleTable,
    GoodsSet,
};
use vcglab::efficiency::{compatibility_degree, efficiency_ratio};
use vcglab::equilibrium::is_expost_equilibrium;
use vcglab::grids::gen_near_truth;
use vcglab::parallelogram::{
    build_compatible_pair, check_mve, decompose, endpoints_consistent, identity_off_segments, random_decomposition,
    refining_grid, segments_disjoint, small_argument_witness,
};
use vcglab::rational::{int, rat};
use vcglab::strategy::{FloorRule, OffsetRule};
use vcglab::{
    choose, utility, welfare_maximizers, Alt, AlternativeSet, Announcement, GameInstance, HSpec, Player,
    PriorityOrder, Rational, StrategyProfile, Valuation, ValueTable,
};

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn arb_non_negative() -> impl Strategy<Value = Rational> {
    (0i64..=8, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn arb_values(m: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(arb_rational(), m)
}

fn arb_profile(players: usize, m: usize) -> impl Strategy<Value = Vec<Announcement>> {
    prop::collection::vec(arb_values(m).prop_map(Announcement::new), players)
}

fn arb_order(m: usize) -> impl Strategy<Value = Vec<Alt>> {
    Just((0..m).map(Alt).collect::<Vec<_>>()).prop_shuffle()
}

fn alternatives(m: usize) -> AlternativeSet {
    AlternativeSet::numbered(m).unwrap()
}

fn arb_h(players: usize) -> impl Strategy<Value = HSpec> {
    prop_oneof![
        Just(HSpec::Zero),
        Just(HSpec::Clarke),
        (0usize..4).prop_map(|a| HSpec::OpponentsAt(Alt(a))),
        prop::collection::vec(arb_rational(), players).prop_map(HSpec::Constant),
    ]
}

/// Strategies whose verdict on a grid is not known in advance.
fn arb_strategy(m: usize) -> impl Strategy<Value = vcglab::Strategy> {
    prop_oneof![
        Just(vcglab::Strategy::Truth),
        (1i64..=3).prop_map(|k| vcglab::Strategy::Scaling(int(k))),
        arb_values(m).prop_map(|skew| vcglab::Strategy::ShiftedTruth {
            offset: OffsetRule::zero(),
            skew,
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximizers_ignore_constant_shift_of_one_player(
        profile in arb_profile(3, 4),
        who in 0usize..3,
        c in arb_rational(),
    ) {
        let alts = alternatives(4);
        let before = welfare_maximizers(&alts, &profile);
        let mut shifted = profile.clone();
        shifted[who] = Announcement::new(profile[who].values().iter().map(|x| x + &c).collect());
        prop_assert_eq!(before, welfare_maximizers(&alts, &shifted));
    }

    #[test]
    fn chosen_alternative_maximizes_welfare(profile in arb_profile(3, 4), order in arb_order(4)) {
        let alts = alternatives(4);
        let order = PriorityOrder::new(&alts, order).unwrap();
        let chosen = choose(&alts, &order, &profile);
        prop_assert!(welfare_maximizers(&alts, &profile).contains(&chosen));
    }

    #[test]
    fn utility_differences_do_not_depend_on_h(
        truth in arb_values(4),
        opponents in arb_profile(2, 4),
        first in arb_values(4),
        second in arb_values(4),
        h in arb_h(3),
        order in arb_order(4),
    ) {
        let alts = alternatives(4);
        let order = PriorityOrder::new(&alts, order).unwrap();
        let v = Valuation::new(truth);
        let gain = |own: &Announcement, h: &HSpec| {
            let mut all: Vec<(Player, &Announcement)> = vec![(Player(0), own)];
            all.extend(opponents.iter().enumerate().map(|(j, b)| (Player(j + 1), b)));
            utility(&alts, Player(0), &v, &all, h, &order)
        };
        let (a, b) = (Announcement::new(first), Announcement::new(second));
        prop_assert_eq!(gain(&a, &HSpec::Zero) - gain(&b, &HSpec::Zero), gain(&a, &h) - gain(&b, &h));
    }

    #[test]
    fn nearly_truth_offset_constant_on_subset_and_floor_below(
        values in arb_values(5),
        mask in 1u8..32,
        c in arb_rational(),
    ) {
        let alts = alternatives(5);
        let subset: Vec<Alt> = (0..5).filter(|k| mask & (1 << k) != 0).map(Alt).collect();
        let s = vcglab::Strategy::nearly_truth(&alts, subset.clone(), OffsetRule::Constant(c.clone()), FloorRule::MinOverSubset).unwrap();
        let v = Valuation::new(values);
        let b = s.apply(&v).unwrap();
        let min = subset.iter().map(|&a| b.at(a).clone()).min().unwrap();
        for a in alts.iter() {
            if subset.contains(&a) {
                prop_assert_eq!(b.at(a) - v.at(a), c.clone());
            } else {
                prop_assert!(*b.at(a) <= min);
            }
        }
    }

    #[test]
    fn scaling_by_one_is_truth(values in arb_values(5)) {
        let v = Valuation::new(values);
        prop_assert_eq!(
            vcglab::Strategy::Scaling(int(1)).apply(&v).unwrap(),
            vcglab::Strategy::Truth.apply(&v).unwrap()
        );
    }

    #[test]
    fn truth_ratio_is_at_least_one(
        profile in prop::collection::vec(prop::collection::vec(arb_non_negative(), 4), 3),
        eq in arb_strategy(4),
    ) {
        let alts = alternatives(4);
        let vals: Vec<Valuation> = profile.into_iter().map(Valuation::new).collect();
        let families = vals.iter().map(|v| vec![v.clone()]).collect();
        let instance = GameInstance::new(alts, GameInstance::default_players(3), families, HSpec::Zero, None).unwrap();
        if let Ok(outcome) = efficiency_ratio(&instance, &StrategyProfile::truth(3), &StrategyProfile::uniform(eq, 3), &vals) {
            prop_assert!(outcome.ratio >= int(1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn passing_verdicts_survive_grid_restriction(
        grids in prop::collection::vec(prop::collection::vec(prop::collection::vec(0i64..=2, 3), 1..4), 2),
        strategy in arb_strategy(3),
        keep_mask in 1u8..8,
    ) {
        let families: Vec<Vec<Valuation>> = grids
            .iter()
            .map(|g| g.iter().map(|v| Valuation::new(v.iter().map(|&x| int(x)).collect())).collect())
            .collect();
        let instance = GameInstance::new(alternatives(3), GameInstance::default_players(2), families, HSpec::Zero, None).unwrap();
        let profile = StrategyProfile::uniform(strategy, 2);
        let keep: Vec<Vec<usize>> = instance
            .families()
            .iter()
            .map(|g| {
                let kept: Vec<usize> = (0..g.len()).filter(|k| keep_mask & (1 << k) != 0).collect();
                if kept.is_empty() { vec![0] } else { kept }
            })
            .collect();
        let small = instance.restrict(&keep).unwrap();
        let full_pass = is_expost_equilibrium(&instance, &profile).unwrap().is_pass();
        let small_pass = is_expost_equilibrium(&small, &profile).unwrap().is_pass();
        prop_assert!(!full_pass || small_pass);
    }

    #[test]
    fn near_truth_restrictions_pass(seed in 0u64..1000, keep_mask in 1u8..8) {
        let g = gen_near_truth(3, 4, 3, 3, seed).unwrap();
        let keep: Vec<Vec<usize>> = g
            .instance
            .families()
            .iter()
            .map(|grid| (0..grid.len()).filter(|k| keep_mask & (1 << k) != 0).collect::<Vec<_>>())
            .map(|k| if k.is_empty() { vec![0] } else { k })
            .collect();
        let small = g.instance.restrict(&keep).unwrap();
        prop_assert!(is_expost_equilibrium(&small, &g.profile).unwrap().is_pass());
    }

    #[test]
    fn decompositions_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_decomposition(&mut rng, 6);
        let (h1, h2) = build_compatible_pair(&d);
        let grid = refining_grid(&[&h1, &h2], &d.endpoints());
        prop_assert!(check_mve(&h1, &h2, &grid).is_pass());
        let back = decompose(&h1, &h2).unwrap();
        prop_assert!(segments_disjoint(&back));
        prop_assert!(endpoints_consistent(&back, &h1, &h2));
        prop_assert!(identity_off_segments(&back, &h1, &h2, &grid));
        prop_assert_eq!(back, d);
    }

    #[test]
    fn small_arguments_map_to_small_values(seed in any::<u64>(), eps_num in 1i64..=240) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_decomposition(&mut rng, 6);
        let (h1, h2) = build_compatible_pair(&d);
        let eps = rat(eps_num, 12);
        let first = d.endpoints().into_iter().next().unwrap_or_else(|| eps.clone());
        let probe = eps.clone().min(first) / int(2);
        let grid = refining_grid(&[&h1, &h2], &[probe]);
        prop_assert!(small_argument_witness(&h1, &h2, &eps, &grid).is_some());
    }

    #[test]
    fn monotone_tables_peak_at_the_grand_bundle(raw in prop::collection::vec(0i64..=4, 8), player in 0usize..2) {
        let goods = GoodsSet::letters(3).unwrap();
        // monotone closure: each bundle worth the most of any sub-bundle
        let values: Vec<Rational> = (0..8u32)
            .map(|b| (0..8u32).filter(|s| s & b == *s).map(|s| raw[s as usize]).max().unwrap())
            .map(int)
            .collect();
        let table = BundleTable::new(&goods, values).unwrap();
        prop_assert!(is_monotone(&table));
        let set = enumerate_allocations(&goods, 2, 64).unwrap();
        let v = valuation_from_bundles(&set, player, &table).unwrap();
        prop_assert!(v.is_maximum(set.grand(player)));
    }

    #[test]
    fn partition_families_are_quasi_fields(labels in prop::collection::vec(0usize..6, 1..=6)) {
        let goods = GoodsSet::letters(labels.len()).unwrap();
        let mut parts: Vec<Bundle> = vec![0; 6];
        for (good, &block) in labels.iter().enumerate() {
            parts[block] |= 1 << good;
        }
        parts.retain(|p| *p != 0);
        prop_assert!(is_quasi_field(&BundleFamily::from_partition(&parts), &goods).is_ok());
    }

    #[test]
    fn compatibility_degree_at_most_goods(tables in prop::collection::vec(prop::collection::vec(0i64..=3, 3), 3)) {
        let goods = GoodsSet::letters(2).unwrap();
        let set = enumerate_allocations(&goods, 3, 64).unwrap();
        let families = tables
            .iter()
            .enumerate()
            .map(|(p, t)| {
                // the empty bundle is worth nothing
                let values = std::iter::once(int(0)).chain(t.iter().map(|&x| int(x))).collect();
                let table = BundleTable::new(&goods, values).unwrap();
                vec![valuation_from_bundles(&set, p, &table).unwrap()]
            })
            .collect();
        let instance = GameInstance::new(set.alternatives().clone(), GameInstance::default_players(3), families, HSpec::Zero, None).unwrap();
        prop_assert!(compatibility_degree(&instance) <= goods.len());
    }
}
