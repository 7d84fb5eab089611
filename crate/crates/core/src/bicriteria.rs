//! From a 2-weak solution to a single assignment whose open centers serve at
//! least `ceil(beta B(c))` points each.

use std::collections::BTreeMap;

use crate::cost::{
    bicriteria_threshold, check_feasibility, cost_multi, MultiAssignment, Solution, SolutionKind,
};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::{max_of, sum, Scalar};
use crate::subsolver::nearest;

/// Fractional redistribution of the orphans of one closed center over the
/// open centers, with `β/(1−β)` capacity per original connection.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub closed: usize,
    pub orphans: Vec<usize>,
    pub capacity: BTreeMap<usize, T>,
    /// `(point, center, amount)` triples; each orphan's amounts sum to one.
    pub amounts: Vec<(usize, usize, T)>,
    /// Cost of sending every orphan to its nearest open center.
    pub orphan_cost: T,
    /// Right-hand side of the per-closure charging inequality.
    pub charge_bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicriteriaOutcome<T> {
    pub solution: Solution<T>,
    pub closed: Vec<usize>,
    pub witnesses: Vec<Witness<T>>,
}

/// `max{αβ/(1−β)+1, α²β/(1−β)}`.
pub fn bicriteria_factor<T: Scalar>(alpha: T, beta: T) -> T {
    let r = beta / (T::one() - beta);
    max_of(alpha * r + T::one(), alpha * alpha * r)
}

fn build_witness<T: Scalar>(
    inst: &Instance<T>,
    input: &MultiAssignment,
    ci: usize,
    cluster: &[usize],
    orphans: &[usize],
    open: &[usize],
    beta: T,
) -> Result<Witness<T>> {
    let ratio = beta / (T::one() - beta);
    let mut capacity = BTreeMap::new();
    for &f in open {
        let count = cluster.iter().filter(|&&p| input.contains(p, f)).count();
        capacity.insert(f, ratio * T::from_usize(count));
    }
    let mut remaining = capacity.clone();
    let mut amounts = Vec::new();
    for &p in orphans {
        let mut need = T::one();
        for &f in open {
            if need <= T::zero() {
                break;
            }
            let left = remaining[&f];
            if left <= T::zero() {
                continue;
            }
            let take = if left < need { left } else { need };
            amounts.push((p, f, take));
            remaining.insert(f, left - take);
            need = need - take;
        }
        if !need.approx_le(T::zero()) {
            return Err(Error::GuaranteeViolated {
                guarantee: "fractional witness for closed center",
                observed: (T::from_usize(orphans.len())).to_f64(),
                bound: sum(capacity.values().copied()).to_f64(),
            });
        }
    }

    let alpha = inst.alpha();
    let orphan_cost = sum(orphans.iter().map(|&p| inst.d(p, nearest(inst, p, open))));
    let via_open = sum(open.iter().flat_map(|&f| {
        cluster
            .iter()
            .filter(move |&&x| input.contains(x, f))
            .map(move |&x| inst.d(x, f))
    }));
    let to_closed = sum(cluster.iter().map(|&x| inst.d(x, ci)));
    let charge_bound = alpha * ratio * via_open + alpha * alpha * ratio * to_closed;
    if !orphan_cost.approx_le(charge_bound) {
        return Err(Error::GuaranteeViolated {
            guarantee: "orphan cost charged to the closed cluster",
            observed: orphan_cost.to_f64(),
            bound: charge_bound.to_f64(),
        });
    }
    Ok(Witness {
        closed: ci,
        orphans: orphans.to_vec(),
        capacity,
        amounts,
        orphan_cost,
        charge_bound,
    })
}

/// Processes centers in ascending id, opening those that still have
/// `ceil(beta B(c))` unassigned points and sending the orphans of closed
/// centers to their nearest open center.
pub fn to_bicriteria<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
    beta: T,
) -> Result<BicriteriaOutcome<T>> {
    if !(beta >= T::from_ratio(1, 2) && beta < T::one()) {
        return Err(Error::BetaOutOfRange(beta.to_f64()));
    }
    let report = check_feasibility(inst, &sol.clone().with_kind(SolutionKind::BWeak(2)));
    if !report.is_feasible() {
        return Err(Error::InfeasibleInput(format!("{:?}", report.violations)));
    }
    let input = &sol.assignment;
    let input_cost = cost_multi(inst, sol)?;

    let mut target: Vec<Option<usize>> = vec![None; inst.n()];
    let mut open: Vec<usize> = Vec::new();
    let mut closed = Vec::new();
    let mut witnesses = Vec::new();

    for &ci in &sol.centers {
        let cluster = input.cluster(ci);
        let free: Vec<usize> = cluster
            .iter()
            .copied()
            .filter(|&p| target[p].is_none())
            .collect();
        if free.len() >= bicriteria_threshold(inst.bound(ci), beta) {
            for p in free {
                target[p] = Some(ci);
            }
            open.push(ci);
            continue;
        }
        closed.push(ci);
        let orphans: Vec<usize> = free
            .into_iter()
            .filter(|&p| input.of(p).iter().all(|&c| c <= ci))
            .collect();
        if orphans.is_empty() {
            continue;
        }
        if open.is_empty() {
            return Err(Error::NoOpenCenterForOrphan(orphans[0]));
        }
        witnesses.push(build_witness(
            inst, input, ci, &cluster, &orphans, &open, beta,
        )?);
        for p in orphans {
            target[p] = Some(nearest(inst, p, &open));
        }
    }

    let targets: Vec<usize> = target
        .iter()
        .enumerate()
        .map(|(p, t)| {
            t.ok_or(Error::GuaranteeViolated {
                guarantee: "every point assigned",
                observed: p as f64,
                bound: 0.0,
            })
        })
        .collect::<Result<_>>()?;
    let out = Solution::new(
        open,
        MultiAssignment::single(&targets),
        SolutionKind::Bicriteria(beta),
    );

    let report = check_feasibility(inst, &out);
    if !report.is_feasible() {
        return Err(Error::GuaranteeViolated {
            guarantee: "bicriteria feasibility",
            observed: report.violations.len() as f64,
            bound: 0.0,
        });
    }
    let bound = bicriteria_factor(inst.alpha(), beta) * input_cost;
    let output_cost = cost_multi(inst, &out)?;
    if !output_cost.approx_le(bound) {
        return Err(Error::GuaranteeViolated {
            guarantee: "bicriteria cost factor",
            observed: output_cost.to_f64(),
            bound: bound.to_f64(),
        });
    }
    Ok(BicriteriaOutcome {
        solution: out,
        closed,
        witnesses,
    })
}
