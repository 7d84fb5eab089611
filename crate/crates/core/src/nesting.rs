//! Combining a lower-bound-feasible clustering with too many centers and an
//! unconstrained k-median solution into a solution with at most `k` centers
//! whose clusters are unions of the feasible clusters.

use std::collections::{BTreeMap, BTreeSet};

use crate::cost::{check_feasibility, cost_multi, MultiAssignment, Solution, SolutionKind};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::{sum, Scalar};
use crate::subsolver::{local_search_kmedian, nearest};

fn single_targets<T: Scalar>(sol: &Solution<T>, name: &str) -> Result<Vec<usize>> {
    sol.assignment
        .as_single()
        .ok_or_else(|| Error::NotSingleAssignment(format!("{name} must assign every point once")))
}

fn check_sizes<T: Scalar>(s1: &Solution<T>, s2: &Solution<T>) -> Result<()> {
    if s1.centers.len() <= s2.centers.len() || s2.centers.is_empty() {
        return Err(Error::SizePreconditionViolated {
            c1: s1.centers.len(),
            c2: s2.centers.len(),
        });
    }
    Ok(())
}

/// Maps every center of `s1` to its nearest center of `s2` (ties to the
/// smallest id).
fn nearest_in_c2<T: Scalar>(
    inst: &Instance<T>,
    s1: &Solution<T>,
    s2: &Solution<T>,
) -> BTreeMap<usize, usize> {
    s1.centers
        .iter()
        .map(|&c| (c, nearest(inst, c, &s2.centers)))
        .collect()
}

fn finish<T: Scalar>(
    inst: &Instance<T>,
    s1: &Solution<T>,
    s2: &Solution<T>,
    targets: &[usize],
    w1: T,
    w2: T,
    name: &'static str,
) -> Result<Solution<T>> {
    let out = Solution::new(targets.to_vec(), MultiAssignment::single(targets), s1.kind);
    let bound = w1 * cost_multi(inst, s1)? + w2 * cost_multi(inst, s2)?;
    let cost = cost_multi(inst, &out)?;
    if !cost.approx_le(bound) {
        return Err(Error::GuaranteeViolated {
            guarantee: name,
            observed: cost.to_f64(),
            bound: bound.to_f64(),
        });
    }
    let s1_targets = single_targets(s1, "s1")?;
    if !is_hierarchically_compatible(&s1_targets, targets) {
        return Err(Error::GuaranteeViolated {
            guarantee: "nested clusters are unions of s1 clusters",
            observed: 1.0,
            bound: 0.0,
        });
    }
    Ok(out)
}

/// Moves every cluster of `s1` wholesale to the `s2` center nearest to its
/// `s1` center. Cost at most `(α+α²) cost(s1) + α² cost(s2)`.
pub fn nest_into_c2<T: Scalar>(
    inst: &Instance<T>,
    s1: &Solution<T>,
    s2: &Solution<T>,
) -> Result<Solution<T>> {
    check_sizes(s1, s2)?;
    let t1 = single_targets(s1, "s1")?;
    single_targets(s2, "s2")?;
    let to_c2 = nearest_in_c2(inst, s1, s2);
    let targets: Vec<usize> = t1.iter().map(|c| to_c2[c]).collect();
    let a = inst.alpha();
    finish(
        inst,
        s1,
        s2,
        &targets,
        a + a * a,
        a * a,
        "nesting into s2 centers",
    )
}

/// Like [`nest_into_c2`], but each group of `s1` centers sharing a nearest
/// `s2` center `o` is merged onto the member closest to `o`. The chosen `s1`
/// centers keep all of their original points. Cost at most
/// `(α³+2α²) cost(s1) + (α³+α²) cost(s2)`.
pub fn nest_into_c1<T: Scalar>(
    inst: &Instance<T>,
    s1: &Solution<T>,
    s2: &Solution<T>,
) -> Result<Solution<T>> {
    check_sizes(s1, s2)?;
    let t1 = single_targets(s1, "s1")?;
    single_targets(s2, "s2")?;
    let to_c2 = nearest_in_c2(inst, s1, s2);
    let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
    for (&c, &o) in &to_c2 {
        match rep.get(&o) {
            Some(&r) if inst.d(o, r) <= inst.d(o, c) => {}
            _ => {
                rep.insert(o, c);
            }
        }
    }
    let targets: Vec<usize> = t1.iter().map(|c| rep[&to_c2[c]]).collect();
    let a = inst.alpha();
    let a2 = a * a;
    let a3 = a2 * a;
    let out = finish(
        inst,
        s1,
        s2,
        &targets,
        a3 + a2 + a2,
        a3 + a2,
        "nesting into s1 centers",
    )?;
    if !retains_clusters(&t1, &targets) {
        return Err(Error::GuaranteeViolated {
            guarantee: "chosen s1 centers keep their clusters",
            observed: 1.0,
            bound: 0.0,
        });
    }
    Ok(out)
}

/// Every `s1` cluster lies inside a single output cluster.
pub fn is_hierarchically_compatible(s1_targets: &[usize], out_targets: &[usize]) -> bool {
    let mut image: BTreeMap<usize, usize> = BTreeMap::new();
    s1_targets
        .iter()
        .zip(out_targets)
        .all(|(&c1, &c)| *image.entry(c1).or_insert(c) == c)
}

/// For every output center `c` that was an `s1` center, all points `s1`
/// assigned to `c` are still assigned to `c`.
pub fn retains_clusters(s1_targets: &[usize], out_targets: &[usize]) -> bool {
    let chosen: BTreeSet<usize> = out_targets.iter().copied().collect();
    s1_targets
        .iter()
        .zip(out_targets)
        .all(|(&c1, &c)| !chosen.contains(&c1) || c == c1)
}

/// Greedy lower-bound-feasible partition with no limit on the number of
/// clusters: repeatedly open the candidate whose `B(c)` nearest unclustered
/// points are cheapest, claim them, and finally attach leftovers to their
/// nearest open center.
pub fn greedy_lb_partition<T: Scalar>(inst: &Instance<T>) -> Result<Solution<T>> {
    let n = inst.n();
    let mut target: Vec<Option<usize>> = vec![None; n];
    let mut remaining = n;
    let mut opened: Vec<usize> = Vec::new();
    loop {
        let mut best: Option<(T, usize, Vec<usize>)> = None;
        for &c in inst.centers() {
            if opened.contains(&c) || (c < n && target[c].is_some()) {
                continue;
            }
            let b = inst.bound(c);
            if b > remaining {
                continue;
            }
            let claim: Vec<usize> = inst
                .points_by_distance(c)
                .into_iter()
                .filter(|&p| target[p].is_none())
                .take(b)
                .collect();
            let cost = sum(claim.iter().map(|&p| inst.d(p, c)));
            if best.as_ref().is_none_or(|(v, _, _)| cost < *v) {
                best = Some((cost, c, claim));
            }
        }
        let Some((_, c, claim)) = best else { break };
        for p in claim {
            target[p] = Some(c);
        }
        remaining -= inst.bound(c);
        opened.push(c);
        if remaining == 0 {
            break;
        }
    }
    if opened.is_empty() {
        return Err(Error::InfeasibleBounds(
            "no center can reach its lower bound".into(),
        ));
    }
    opened.sort_unstable();
    let targets: Vec<usize> = (0..n)
        .map(|p| target[p].unwrap_or_else(|| nearest(inst, p, &opened)))
        .collect();
    let out = Solution::new(
        opened,
        MultiAssignment::single(&targets),
        SolutionKind::StandardLB,
    );
    if !check_feasibility(inst, &out).is_feasible_ignoring_budget() {
        return Err(Error::InfeasibleBounds(
            "greedy partition missed a lower bound".into(),
        ));
    }
    Ok(out)
}

/// Lower-bounded k-median: a greedy feasible partition nested with a k-median
/// local-search solution. Uniform bounds nest into the k-median centers;
/// non-uniform bounds nest into the partition's own centers.
pub fn solve_lb_via_nesting<T: Scalar>(inst: &Instance<T>, seed: u64) -> Result<Solution<T>> {
    let s1 = greedy_lb_partition(inst)?;
    if s1.centers.len() <= inst.k() {
        return Ok(s1);
    }
    let s2 = local_search_kmedian(inst, seed);
    let out = if inst.bounds().is_uniform() {
        nest_into_c2(inst, &s1, &s2)?
    } else {
        nest_into_c1(inst, &s1, &s2)?
    };
    let out = out.with_kind(SolutionKind::StandardLB);
    let report = check_feasibility(inst, &out);
    if !report.is_feasible() {
        return Err(Error::GuaranteeViolated {
            guarantee: "nested solution meets lower bounds",
            observed: report.violations.len() as f64,
            bound: 0.0,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::LowerBounds;
    use num_rational::Rational64;

    fn q(v: i64) -> Rational64 {
        Rational64::from_integer(v)
    }

    fn line5() -> Instance<Rational64> {
        Instance::line(
            [0, 1, 2, 10, 11].map(q).to_vec(),
            2,
            LowerBounds::Uniform(1),
        )
        .unwrap()
    }

    fn plain(targets: &[usize]) -> Solution<Rational64> {
        Solution::from_targets(targets, SolutionKind::Unconstrained)
    }

    #[test]
    fn identical_positions_cost_nothing_extra() {
        let inst = line5();
        let s1 = plain(&[0, 1, 1, 3, 3]);
        let s2 = plain(&[1, 1, 1, 3, 3]);
        let out = nest_into_c2(&inst, &s1, &s2).unwrap();
        assert_eq!(out.assignment.as_single().unwrap(), vec![1, 1, 1, 3, 3]);
        assert_eq!(cost_multi(&inst, &out).unwrap(), q(3));
    }

    #[test]
    fn three_into_two() {
        let inst = line5();
        let s1 = plain(&[0, 0, 2, 3, 3]);
        let s2 = plain(&[1, 1, 1, 4, 4]);
        let out = nest_into_c2(&inst, &s1, &s2).unwrap();
        assert_eq!(out.assignment.as_single().unwrap(), vec![1, 1, 1, 4, 4]);
        assert!(out.centers.len() <= 2);
        let s1_cost = cost_multi(&inst, &s1).unwrap();
        let s2_cost = cost_multi(&inst, &s2).unwrap();
        assert!(cost_multi(&inst, &out).unwrap() <= q(2) * s1_cost + s2_cost);
    }

    #[test]
    fn single_s2_center_merges_onto_closest_s1_center() {
        let inst = line5();
        let s1 = plain(&[0, 0, 2, 3, 3]);
        let s2 = plain(&[2, 2, 2, 2, 2]);
        let out = nest_into_c1(&inst, &s1, &s2).unwrap();
        assert_eq!(out.centers, vec![2]);
        assert!(retains_clusters(
            &[0, 0, 2, 3, 3],
            &out.assignment.as_single().unwrap()
        ));
    }

    #[test]
    fn size_precondition() {
        let inst = line5();
        let s = plain(&[0, 0, 0, 3, 3]);
        assert!(matches!(
            nest_into_c2(&inst, &s, &s),
            Err(Error::SizePreconditionViolated { c1: 2, c2: 2 })
        ));
    }

    #[test]
    fn compatibility_and_retention_predicates() {
        assert!(is_hierarchically_compatible(&[0, 0, 2, 3], &[1, 1, 1, 3]));
        assert!(!is_hierarchically_compatible(&[0, 0, 2], &[0, 1, 2]));
        assert!(retains_clusters(&[0, 0, 2, 3], &[0, 0, 0, 3]));
        assert!(retains_clusters(&[0, 0, 2, 3], &[2, 2, 2, 3]));
        assert!(!retains_clusters(&[0, 2, 2], &[2, 0, 0]));
    }

    #[test]
    fn unit_bound_gives_singletons() {
        let inst = line5();
        let s = greedy_lb_partition(&inst).unwrap();
        assert_eq!(s.centers, vec![0, 1, 2, 3, 4]);
        assert_eq!(cost_multi(&inst, &s).unwrap(), q(0));
    }

    #[test]
    fn two_locations_collapse_to_one_cluster() {
        let inst = Instance::line(
            [0, 0, 0, 0, 1, 1, 1, 1].map(q).to_vec(),
            2,
            LowerBounds::Uniform(5),
        )
        .unwrap();
        let s = greedy_lb_partition(&inst).unwrap();
        assert!(check_feasibility(&inst, &s).is_feasible());
        let out = solve_lb_via_nesting(&inst, 0).unwrap();
        assert_eq!(out.centers.len(), 1);
        assert_eq!(cost_multi(&inst, &out).unwrap(), q(4));
    }

    #[test]
    fn nesting_path_when_greedy_overshoots() {
        let inst = Instance::line(
            [0, 1, 2, 10, 11].map(q).to_vec(),
            2,
            LowerBounds::Uniform(1),
        )
        .unwrap();
        let out = solve_lb_via_nesting(&inst, 3).unwrap();
        assert!(out.centers.len() <= 2);
        assert!(check_feasibility(&inst, &out).is_feasible());
    }

    #[test]
    fn merging_feasible_clusters_stays_feasible() {
        let inst =
            Instance::line([0, 1, 2, 3].map(q).to_vec(), 2, LowerBounds::Uniform(2)).unwrap();
        let split = Solution::from_targets(&[0, 0, 3, 3], SolutionKind::StandardLB);
        assert!(check_feasibility(&inst, &split).is_feasible());
        let merged = Solution::from_targets(&[0, 0, 0, 0], SolutionKind::StandardLB);
        assert!(check_feasibility(&inst, &merged).is_feasible());
    }
}
