mod common;

use common::*;
use nearcover::exact::{exact_opt, exact_opt_in_interval, RewardInterval};
use nearcover::generators::{reduction_delta, reduction_instance, GenerationSpec, PartitionInput};
use nearcover::greedy::{greedy, Order};
use nearcover::model::{check_partition, read_instance, read_packing, write_instance, write_packing};
use nearcover::rational::{int, ratio};
use nearcover::{evaluate, Instance, Packing, Rational};
use proptest::prelude::*;

fn delta_strategy() -> impl Strategy<Value = Rational> {
    prop::sample::select(DELTAS.to_vec()).prop_map(|(n, d)| ratio(n, d))
}

fn instance_strategy(max_n: usize) -> impl Strategy<Value = Instance> {
    (delta_strategy(), prop::collection::vec(1i64..=60, 0..=max_n))
        .prop_map(|(delta, ks)| Instance::new(delta, ks.into_iter().map(|k| ratio(k, 60)).collect()).unwrap())
}

/// An instance with a random packing of it, as bin labels per item.
fn packed_strategy(max_n: usize) -> impl Strategy<Value = (Instance, Packing)> {
    instance_strategy(max_n).prop_flat_map(|inst| {
        let n = inst.len();
        (Just(inst), prop::collection::vec(0..n.max(1), n))
    })
    .prop_map(|(inst, labels)| {
        let mut bins = vec![Vec::new(); inst.len()];
        for (j, &b) in labels.iter().enumerate() {
            bins[b].push(j);
        }
        bins.retain(|b| !b.is_empty());
        let p = Packing::new(&inst, bins).unwrap();
        (inst, p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluate_ignores_bin_and_item_order((inst, p) in packed_strategy(12), rot in 0usize..12) {
        let before = evaluate(&inst, &p).unwrap();
        let mut bins = p.bins().to_vec();
        if !bins.is_empty() {
            let r = rot % bins.len();
            bins.rotate_left(r);
        }
        for b in &mut bins {
            b.reverse();
        }
        let q = Packing::new(&inst, bins).unwrap();
        prop_assert_eq!(evaluate(&inst, &q).unwrap(), before);
        prop_assert_eq!(p.covers(), before);
    }

    #[test]
    fn repair_moves_never_lose_covers((inst, p) in packed_strategy(12)) {
        let before = evaluate(&inst, &p).unwrap();
        let upper = inst.upper();
        let mut bins = p.bins().to_vec();
        let mut moved = Vec::new();
        for b in &mut bins {
            let total = inst.total(b);
            if total >= upper && b.len() > 1 {
                moved.push(vec![b.pop().unwrap()]);
            } else if !inst.is_covered_total(&total) && b.len() > 1 {
                let j = b[0];
                if !inst.is_covered_total(inst.size(j)) {
                    moved.push(vec![b.remove(0)]);
                }
            }
        }
        bins.extend(moved);
        let q = Packing::new(&inst, bins).unwrap();
        prop_assert!(evaluate(&inst, &q).unwrap() >= before);
    }

    #[test]
    fn file_formats_round_trip((inst, p) in packed_strategy(10)) {
        let text = write_instance(&inst);
        let back = read_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        let q = read_packing(&write_packing(&p), &inst).unwrap();
        prop_assert_eq!(q.bins(), p.bins());
    }

    #[test]
    fn greedy_emits_partitions(inst in instance_strategy(20)) {
        for order in [Order::Input, Order::Descending, Order::Ascending] {
            let p = greedy(&inst, order);
            prop_assert!(check_partition(inst.len(), p.bins()).is_ok());
            prop_assert_eq!(evaluate(&inst, &p).unwrap(), p.covers());
        }
    }

    #[test]
    fn exact_matches_set_partition_enumeration(inst in instance_strategy(8)) {
        let (opt, witness) = exact_opt(&inst, 20).unwrap();
        let naive = naive_partition_opt(inst.sizes(), &int(1), &inst.upper());
        prop_assert_eq!(opt, naive);
        prop_assert_eq!(evaluate(&inst, &witness).unwrap(), opt);
    }

    #[test]
    fn exact_dominates_greedy(inst in instance_strategy(12)) {
        let (opt, _) = exact_opt(&inst, 20).unwrap();
        for order in [Order::Input, Order::Descending, Order::Ascending] {
            prop_assert!(greedy(&inst, order).covers() <= opt);
        }
    }

    #[test]
    fn shifted_interval_matches_multiset_oracle(ks in prop::collection::vec(1i64..=12, 1..=9), lo in 8i64..=14) {
        let sizes: Vec<Rational> = ks.iter().map(|&k| ratio(k, 12)).collect();
        let interval = RewardInterval { lo: ratio(lo, 12), hi: ratio(lo + 4, 12) };
        let (opt, _) = exact_opt_in_interval(&sizes, &interval, 20).unwrap();
        let mut distinct: Vec<Rational> = sizes.clone();
        distinct.sort();
        distinct.dedup();
        let counts: Vec<u64> = distinct.iter().map(|d| sizes.iter().filter(|s| *s == d).count() as u64).collect();
        prop_assert_eq!(opt, multiset_opt(&distinct, &counts, &interval.lo, &interval.hi));
    }
}

#[test]
fn partition_check_rejects_duplicates_and_gaps() {
    assert!(check_partition(3, &[vec![0, 1], vec![2]]).is_ok());
    assert!(check_partition(3, &[vec![0, 1], vec![1, 2]]).is_err());
    assert!(check_partition(3, &[vec![0], vec![2]]).is_err());
    assert!(check_partition(2, &[vec![0, 1, 2]]).is_err());
}

#[test]
fn exact_refuses_large_instances() {
    let inst = Instance::new(int(1), vec![ratio(1, 3); 21]).unwrap();
    assert!(exact_opt(&inst, 20).is_err());
}

#[test]
fn reduction_has_one_big_item_per_generation() {
    for a in [vec![1, 1], vec![3, 1, 2, 4], vec![2, 2, 2], vec![4, 4, 2, 2]] {
        for t in 1..=3 {
            let spec = GenerationSpec { partition: PartitionInput::new(a.clone()).unwrap(), generations: t };
            let inst = reduction_instance(&spec, reduction_delta(&spec)).unwrap();
            let big = inst.sizes().iter().filter(|s| **s > ratio(1, 2)).count();
            assert_eq!(big, t as usize);
        }
    }
}

#[test]
fn reduction_optimum_tracks_partition_answer() {
    for (a, yes) in [(vec![1, 1], true), (vec![1, 3], false), (vec![3, 1, 2, 4], true), (vec![2, 4], false)] {
        let partition = PartitionInput::new(a).unwrap();
        assert_eq!(partition.is_yes(), yes);
        for t in 1..=2 {
            let spec = GenerationSpec { partition: partition.clone(), generations: t };
            let inst = reduction_instance(&spec, reduction_delta(&spec)).unwrap();
            let (opt, _) = exact_opt(&inst, 20).unwrap();
            assert_eq!(opt, if yes { t as usize } else { 0 });
        }
    }
}

#[test]
fn greedy_within_factor_two_at_unit_delta() {
    for seed in 0..60 {
        let inst = suite_instance(2 + (seed % 11) as usize, int(1), 300 + seed);
        let (opt, _) = exact_opt(&inst, 14).unwrap();
        assert!(opt <= 2 * greedy(&inst, Order::Input).covers() + 1, "seed {seed}");
    }
}
