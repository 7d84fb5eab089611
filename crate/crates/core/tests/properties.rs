//! Property tests over small exact (rational) instances.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lbcluster::genbench::{random_single_solution, random_two_weak_solution, random_weak_solution};
use lbcluster::nesting::{is_hierarchically_compatible, retains_clusters};
use lbcluster::oracle::brute_force_enumerate;
use lbcluster::*;

type Q = Rational64;

fn q(v: i64) -> Q {
    Q::from_integer(v)
}

/// Line or squared-Euclidean instance with small integer coordinates.
fn instance() -> impl Strategy<Value = InstanceQ> {
    (
        prop::collection::vec((0i64..40, 0i64..40), 3..=9),
        any::<bool>(),
        1usize..=4,
        prop::collection::vec(1usize..=3, 9),
        any::<bool>(),
    )
        .prop_map(|(coords, squared, k, bs, uniform)| {
            let n = coords.len();
            let k = k.min(n);
            let bounds = if uniform {
                LowerBounds::Uniform(bs[0].min(n))
            } else {
                LowerBounds::NonUniform((0..n).map(|c| (c, bs[c].min(n))).collect())
            };
            if squared {
                let pts = coords.iter().map(|&(x, y)| vec![q(x), q(y)]).collect();
                Instance::sq_euclidean(pts, k, bounds).unwrap()
            } else {
                Instance::line(coords.iter().map(|&(x, _)| q(x)).collect(), k, bounds).unwrap()
            }
        })
}

fn pair_cost(inst: &InstanceQ, sets: &[Vec<usize>]) -> Q {
    sets.iter()
        .enumerate()
        .flat_map(|(p, s)| s.iter().map(move |&c| inst.d(p, c)))
        .fold(q(0), |a, b| a + b)
}

fn loads(sets: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for s in sets {
        for &c in s {
            *out.entry(c).or_insert(0) += 1;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduce_to_two_bounds(inst in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = random_weak_solution(&inst, &mut rng);
        let (out, trace) = reduce_to_two(&inst, &input).unwrap();
        let sets = out.assignment.sets();
        prop_assert!(sets.iter().all(|s| (1..=2).contains(&s.len())));
        for (c, l) in loads(sets) {
            prop_assert!(l >= inst.bound(c));
        }
        let a = inst.alpha();
        prop_assert!(pair_cost(&inst, sets) <= a * (a + q(1)) * pair_cost(&inst, input.assignment.sets()));
        prop_assert!(trace.passed(), "{:?}", trace.charging);
    }

    #[test]
    fn reduce_to_two_keeps_two_weak_input(inst in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(input) = random_two_weak_solution(&inst, &mut rng) {
            let (out, trace) = reduce_to_two(&inst, &input).unwrap();
            prop_assert_eq!(out.assignment, input.assignment);
            prop_assert!(trace.created.is_empty());
        }
    }

    #[test]
    fn reduce_eps_amounts(inst in instance(), seed in any::<u64>(), den in 2i64..=5) {
        let eps = Q::new(1, den);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = random_weak_solution(&inst, &mut rng);
        let (out, trace) = reduce_to_one_plus_eps(&inst, &input, eps).unwrap();
        prop_assert!(trace.invariant_violations.is_empty(), "{:?}", trace.invariant_violations);
        let mut load: BTreeMap<usize, Q> = BTreeMap::new();
        let mut cost = q(0);
        for (p, list) in out.assignment.amounts().iter().enumerate() {
            let units = list.iter().filter(|&&(_, a)| a == q(1)).count();
            let eps_parts = list.iter().filter(|&&(_, a)| a == eps).count();
            prop_assert_eq!(units, 1);
            prop_assert!(eps_parts <= 1 && units + eps_parts == list.len());
            for &(c, a) in list {
                *load.entry(c).or_insert(q(0)) += a;
                cost += a * inst.d(p, c);
            }
        }
        for (c, l) in load {
            prop_assert!(l >= q(inst.bound(c) as i64));
        }
        let a = inst.alpha();
        let factor = q(den) * a * (a + q(1)) + q(1);
        prop_assert!(cost <= factor * pair_cost(&inst, input.assignment.sets()));
    }

    #[test]
    fn bicriteria_bounds(inst in instance(), seed in any::<u64>(), three_quarters in any::<bool>()) {
        let beta = if three_quarters { Q::new(3, 4) } else { Q::new(1, 2) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(input) = random_two_weak_solution(&inst, &mut rng) {
            let out = to_bicriteria(&inst, &input, beta).unwrap();
            let sets = out.solution.assignment.sets();
            prop_assert!(sets.iter().all(|s| s.len() == 1));
            for (c, l) in loads(sets) {
                prop_assert!(q(l as i64) >= beta * q(inst.bound(c) as i64));
            }
            let a = inst.alpha();
            let r = beta / (q(1) - beta);
            let factor = std::cmp::max(a * r + q(1), a * a * r);
            prop_assert!(pair_cost(&inst, sets) <= factor * pair_cost(&inst, input.assignment.sets()));
            for w in &out.witnesses {
                prop_assert!(w.orphan_cost <= w.charge_bound);
            }
        }
    }

    #[test]
    fn augmentation_never_exceeds_center_cost_objective(inst in instance(), seed in any::<u64>()) {
        let f = compute_center_costs(&inst).unwrap();
        let sub = local_search_center_costs(&inst, &f, seed);
        let aug = augment_to_weak(&inst, &sub).unwrap();
        prop_assert!(check_feasibility(&inst, &aug).is_feasible());
        prop_assert!(cost_multi(&inst, &aug).unwrap() <= cost_with_center_costs(&inst, &sub, &f).unwrap());
        // Every original connection survives.
        for (p, s) in sub.assignment.sets().iter().enumerate() {
            prop_assert!(aug.assignment.contains(p, s[0]));
        }
    }

    #[test]
    fn nesting_is_compatible(inst in instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = inst.n();
        let s1 = random_single_solution(&inst, n.min(4), 0.3, &mut rng);
        let s2 = random_single_solution(&inst, 1 + (seed as usize) % 2, 0.3, &mut rng);
        prop_assume!(s1.centers.len() > s2.centers.len());
        let t1 = s1.assignment.as_single().unwrap();
        for out in [nest_into_c2(&inst, &s1, &s2).unwrap(), nest_into_c1(&inst, &s1, &s2).unwrap()] {
            let t = out.assignment.as_single().unwrap();
            prop_assert!(is_hierarchically_compatible(&t1, &t));
            prop_assert!(out.centers.len() <= s2.centers.len());
        }
        let t = nest_into_c1(&inst, &s1, &s2).unwrap().assignment.as_single().unwrap();
        prop_assert!(retains_clusters(&t1, &t));
    }

    #[test]
    fn oracle_chain_and_cross_check(inst in instance()) {
        prop_assume!(inst.n() <= 6 && inst.k() <= 3);
        let limits = OracleLimits::default();
        let mut values = Vec::new();
        for mode in [OracleMode::Unconstrained, OracleMode::WeakLB, OracleMode::BWeak(2), OracleMode::StandardLB] {
            let a = brute_force_opt(&inst, &mode, &limits).map(|r| r.cost);
            let b = brute_force_enumerate(&inst, &mode).map(|r| r.cost);
            prop_assert_eq!(&a, &b, "mode {}", mode.name());
            values.push(a.unwrap());
        }
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]), "{:?}", values);
    }

    #[test]
    fn instance_json_round_trip(inst in instance()) {
        let text = lbcluster::io::instance_to_json(&inst).to_string();
        let back: InstanceQ = lbcluster::io::parse_instance(&text).unwrap();
        prop_assert_eq!(back.metric(), inst.metric());
        prop_assert_eq!(back.bounds(), inst.bounds());
        prop_assert_eq!(back.k(), inst.k());
    }
}
