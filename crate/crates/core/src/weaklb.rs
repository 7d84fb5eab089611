//! Weak lower bounds through center costs: price each center by the distance
//! to its `B(c)` nearest points, solve k-median with those opening costs, then
//! top up every underfull cluster from that nearest set.

use crate::cost::{
    check_feasibility, cost_multi, cost_with_center_costs, MultiAssignment, Solution, SolutionKind,
};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::{sum, Scalar};
use crate::subsolver::{local_search, CenterCosts, LocalSearchConfig};

/// `D_c`: the `B(c)` points nearest to `c`, ties broken by smaller id.
pub fn nearest_set<T: Scalar>(inst: &Instance<T>, c: usize) -> Result<Vec<usize>> {
    let b = inst.bound(c);
    if b > inst.n() {
        return Err(Error::BoundExceedsN {
            center: c,
            bound: b,
            n: inst.n(),
        });
    }
    let mut pts = inst.points_by_distance(c);
    pts.truncate(b);
    Ok(pts)
}

/// `f(c) = Σ_{p ∈ D_c} d(p, c)` for every candidate center.
pub fn compute_center_costs<T: Scalar>(inst: &Instance<T>) -> Result<CenterCosts<T>> {
    let mut f = std::collections::BTreeMap::new();
    for &c in inst.centers() {
        let dc = nearest_set(inst, c)?;
        f.insert(c, sum(dc.iter().map(|&p| inst.d(p, c))));
    }
    Ok(CenterCosts::from_map(f))
}

/// Adds `max(0, B(c) - n_c)` points of `D_c` to every open center `c`, nearest
/// first, skipping points already assigned to `c`.
///
/// Fails with [`Error::GuaranteeViolated`] if the result costs more than
/// `cost^f` of the input.
pub fn augment_to_weak<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> Result<Solution<T>> {
    let targets = sol.assignment.as_single().ok_or_else(|| {
        Error::NotSingleAssignment("augmentation expects one center per point".into())
    })?;
    if sol.centers.is_empty() {
        return Err(Error::InfeasibleInput("no open centers".into()));
    }
    let f = compute_center_costs(inst)?;
    let before = cost_with_center_costs(inst, sol, &f)?;

    let mut sets: Vec<Vec<usize>> = targets.iter().map(|&c| vec![c]).collect();
    let loads = sol.assignment.loads();
    for &c in &sol.centers {
        let load = loads.get(&c).copied().unwrap_or(0);
        let missing = inst.bound(c).saturating_sub(load);
        if missing == 0 {
            continue;
        }
        let pool: Vec<usize> = nearest_set(inst, c)?
            .into_iter()
            .filter(|&p| targets[p] != c)
            .take(missing)
            .collect();
        if pool.len() < missing {
            return Err(Error::InfeasibleBounds(format!(
                "center {c} cannot reach its lower bound"
            )));
        }
        for p in pool {
            sets[p].push(c);
        }
    }
    let out = Solution::new(
        sol.centers.clone(),
        MultiAssignment::new(sets)?,
        SolutionKind::WeakLB,
    );
    let after = cost_multi(inst, &out)?;
    if !after.approx_le(before) {
        return Err(Error::GuaranteeViolated {
            guarantee: "augmentation cost at most cost^f",
            observed: after.to_f64(),
            bound: before.to_f64(),
        });
    }
    let report = check_feasibility(inst, &out);
    if !report.is_feasible_ignoring_budget() {
        return Err(Error::GuaranteeViolated {
            guarantee: "augmented solution meets weak lower bounds",
            observed: report.violations.len() as f64,
            bound: 0.0,
        });
    }
    Ok(out)
}

/// Every intermediate of the weak pipeline.
#[derive(Debug, Clone)]
pub struct WeakPipeline<T> {
    pub center_costs: CenterCosts<T>,
    /// The center-cost subsolver's single-assignment solution.
    pub subsolution: Solution<T>,
    /// `cost^f` of `subsolution`.
    pub subsolution_cost: T,
    pub solution: Solution<T>,
    pub cost: T,
}

pub fn run_weak_pipeline<T: Scalar>(
    inst: &Instance<T>,
    config: &LocalSearchConfig,
) -> Result<WeakPipeline<T>> {
    let f = compute_center_costs(inst)?;
    let sub = local_search(inst, Some(&f), config);
    let sub_cost = cost_with_center_costs(inst, &sub, &f)?;
    let solution = augment_to_weak(inst, &sub)?;
    let cost = cost_multi(inst, &solution)?;
    Ok(WeakPipeline {
        center_costs: f,
        subsolution: sub,
        subsolution_cost: sub_cost,
        solution,
        cost,
    })
}

/// Weak-lower-bound solution with at most `k` centers.
pub fn solve_weak_lb<T: Scalar>(inst: &Instance<T>, seed: u64) -> Result<Solution<T>> {
    Ok(run_weak_pipeline(inst, &LocalSearchConfig::with_seed(seed))?.solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::LowerBounds;
    use num_rational::Rational64;

    fn q(v: i64) -> Rational64 {
        Rational64::from_integer(v)
    }

    fn two_locations() -> Instance<Rational64> {
        Instance::line(
            [0, 0, 0, 0, 1, 1, 1, 1].map(q).to_vec(),
            2,
            LowerBounds::Uniform(5),
        )
        .unwrap()
    }

    #[test]
    fn unit_bound_costs_nothing_at_points() {
        let inst = Instance::line([0, 1, 3].map(q).to_vec(), 1, LowerBounds::Uniform(1)).unwrap();
        let f = compute_center_costs(&inst).unwrap();
        assert!(inst.centers().iter().all(|&c| f.get(c) == q(0)));
    }

    #[test]
    fn line_costs_for_bound_two() {
        let inst = Instance::line([0, 1, 3].map(q).to_vec(), 1, LowerBounds::Uniform(2)).unwrap();
        let f = compute_center_costs(&inst).unwrap();
        assert_eq!([f.get(0), f.get(1), f.get(2)], [q(1), q(1), q(2)]);
    }

    #[test]
    fn two_location_center_costs() {
        let inst = two_locations();
        let f = compute_center_costs(&inst).unwrap();
        assert!(inst.centers().iter().all(|&c| f.get(c) == q(1)));
    }

    #[test]
    fn full_clusters_unchanged() {
        let inst =
            Instance::line([0, 1, 10, 11].map(q).to_vec(), 2, LowerBounds::Uniform(2)).unwrap();
        let sol = Solution::from_targets(&[0, 0, 2, 2], SolutionKind::CenterCosts);
        let out = augment_to_weak(&inst, &sol).unwrap();
        assert_eq!(out.assignment, sol.assignment);
        assert_eq!(out.kind, SolutionKind::WeakLB);
    }

    #[test]
    fn two_locations_gain_one_cross_point_each() {
        let inst = two_locations();
        let sol = Solution::from_targets(&[0, 0, 0, 0, 4, 4, 4, 4], SolutionKind::CenterCosts);
        let out = augment_to_weak(&inst, &sol).unwrap();
        assert_eq!(cost_multi(&inst, &out).unwrap(), q(2));
        // D_0 = {0,1,2,3,4} and D_4 = {4,5,6,7,0}.
        assert_eq!(out.assignment.of(0), &[0, 4]);
        assert_eq!(out.assignment.of(4), &[0, 4]);
        assert_eq!(out.assignment.of(3), &[0]);
        assert_eq!(out.assignment.of(7), &[4]);
    }

    #[test]
    fn pipeline_on_two_locations() {
        let inst = two_locations();
        let sol = solve_weak_lb(&inst, 0).unwrap();
        assert_eq!(sol.centers.len(), 2);
        assert_eq!(cost_multi(&inst, &sol).unwrap(), q(2));
        assert!(check_feasibility(&inst, &sol).is_feasible());
    }

    #[test]
    fn augmentation_rejects_multi_assignment() {
        let inst = two_locations();
        let sol = Solution::new(
            vec![0, 4],
            MultiAssignment::new(vec![vec![0, 4]; 8]).unwrap(),
            SolutionKind::WeakLB,
        );
        assert!(matches!(
            augment_to_weak(&inst, &sol),
            Err(Error::NotSingleAssignment(_))
        ));
    }
}
