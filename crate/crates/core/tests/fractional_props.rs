mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{random_instance, random_sequence, SMALL};
use nfvplace::fractional::{full_fractional_allocation, iterative_allocation, r4_with_rates};
use nfvplace::rng::SplitMix64;
use nfvplace::{NodeSequence, NodeSet, EPS_FEAS};

const TOL: f64 = 1e-6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn sequential_assignment_is_feasible(seed in any::<u64>()) {
        let inst = random_instance(seed, SMALL);
        let mut rng = SplitMix64::new(seed);
        let n = inst.num_nodes();
        let len = 1 + rng.below(n as u64) as usize;
        let seq = random_sequence(&mut rng, n, len);
        let alloc = iterative_allocation(&inst, &NodeSequence::new(seq.iter().copied())).unwrap();
        let x = &alloc.assignment;
        let placed: BTreeSet<usize> = seq.iter().copied().collect();
        for (f, v, val) in x.entries() {
            prop_assert!(val >= -EPS_FEAS);
            prop_assert!(placed.contains(&v) && inst.path(f).unwrap().contains(&v));
        }
        for f in 0..inst.num_flows() {
            prop_assert!(x.flow_total(f) <= inst.rate(f) * (1.0 + EPS_FEAS) + EPS_FEAS);
        }
        for (i, &v) in seq.iter().enumerate() {
            let column: f64 = x.entries().filter(|e| e.1 == v).map(|e| e.2).sum();
            prop_assert!((column - alloc.node_totals[i]).abs() <= 1e-12 * column.abs().max(1.0));
            for r in 0..inst.num_resources() {
                let load: f64 = x.entries().filter(|e| e.1 == v).map(|e| inst.demand(e.0)[r] * e.2).sum();
                let cap = inst.capacity(v)[r];
                prop_assert!(load <= cap + EPS_FEAS * cap.max(1.0));
            }
        }
        let total: f64 = alloc.node_totals.iter().sum();
        prop_assert!((total - alloc.value).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn sequential_value_is_sandwiched_by_joint_value(seed in any::<u64>()) {
        let inst = random_instance(seed, SMALL);
        let mut rng = SplitMix64::new(seed);
        let n = inst.num_nodes();
        let len = 1 + rng.below(n as u64) as usize;
        let seq = random_sequence(&mut rng, n, len);
        let r4 = iterative_allocation(&inst, &NodeSequence::new(seq.iter().copied())).unwrap().value;
        let r3 = full_fractional_allocation(&inst, &NodeSet::new(seq.iter().copied())).unwrap().0;
        prop_assert!(r4 <= r3 + TOL && r4 >= 0.5 * r3 - TOL, "r4 {} r3 {}", r4, r3);
    }

    #[test]
    fn singleton_value_is_monotone_in_rates(seed in any::<u64>()) {
        let inst = random_instance(seed, SMALL);
        let mut rng = SplitMix64::new(seed);
        let u = rng.below(inst.num_nodes() as u64) as usize;
        let low: Vec<f64> = inst.rates().iter().map(|r| r * rng.next_f64()).collect();
        let high: Vec<f64> = low.iter().zip(inst.rates()).map(|(l, r)| l + (r - l) * rng.next_f64()).collect();
        let single = NodeSequence::new([u]);
        let a = r4_with_rates(&inst, &single, &low).unwrap();
        let b = r4_with_rates(&inst, &single, &high).unwrap();
        prop_assert!(a <= b + TOL);
    }

    #[test]
    fn shared_prefix_gets_identical_totals(seed in any::<u64>()) {
        let inst = random_instance(seed, SMALL);
        let mut rng = SplitMix64::new(seed);
        let n = inst.num_nodes();
        let all = random_sequence(&mut rng, n, n);
        let p = rng.below(n as u64) as usize;
        let a = iterative_allocation(&inst, &NodeSequence::new(all.iter().copied())).unwrap();
        let b = iterative_allocation(&inst, &NodeSequence::new(all[..p].iter().copied())).unwrap();
        for j in 0..p {
            prop_assert_eq!(a.node_totals[j].to_bits(), b.node_totals[j].to_bits());
        }
    }
}
