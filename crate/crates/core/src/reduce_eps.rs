//! Turns a weak-lower-bound solution into a fractional one in which every
//! point carries a total amount in `[1, 1+eps]`: one unit at one center and
//! possibly `eps` at a second. Cost factor `ceil(1/eps) α(α+1) + 1`.
//!
//! The structure mirrors the 2-weak reduction, except that a freed point is
//! replaced by `ceil(1/eps)` points each joining at amount `eps`.

use std::collections::{BTreeMap, BTreeSet};

use crate::charging::{classify, NewConnection, TraceEvent, TraceLog};
use crate::cost::{
    check_feasibility, check_fractional_feasibility, cost_fractional, cost_multi,
    FractionalAssignment, FractionalSolution, MultiAssignment, Solution, SolutionKind,
};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Amount {
    Unit,
    Eps,
}

struct State<'a> {
    original: &'a MultiAssignment,
    sets: Vec<BTreeMap<usize, Amount>>,
    members: BTreeMap<usize, BTreeSet<usize>>,
    open: BTreeSet<usize>,
    initial_members: BTreeMap<usize, BTreeSet<usize>>,
    deleted: BTreeSet<(usize, usize)>,
    added: Vec<(usize, usize)>,
    trace: TraceLog,
}

impl<'a> State<'a> {
    fn new(centers: &[usize], original: &'a MultiAssignment) -> Self {
        let sets: Vec<BTreeMap<usize, Amount>> = original
            .sets()
            .iter()
            .map(|s| s.iter().map(|&c| (c, Amount::Unit)).collect())
            .collect();
        let mut members: BTreeMap<usize, BTreeSet<usize>> =
            centers.iter().map(|&c| (c, BTreeSet::new())).collect();
        for (p, c) in original.pairs() {
            members.entry(c).or_default().insert(p);
        }
        State {
            original,
            sets,
            initial_members: members.clone(),
            members,
            open: centers.iter().copied().collect(),
            deleted: BTreeSet::new(),
            added: Vec::new(),
            trace: TraceLog::default(),
        }
    }

    fn units(&self, q: usize) -> usize {
        self.sets[q]
            .values()
            .filter(|&&a| a == Amount::Unit)
            .count()
    }

    fn set(&mut self, p: usize, c: usize, amount: Amount) {
        if self.units(p) > 1 {
            self.trace.violation(format!(
                "connection ({p},{c}) set while the point holds {} units",
                self.units(p)
            ));
        }
        if !self.sets[p].contains_key(&c) {
            self.added.push((p, c));
        }
        self.sets[p].insert(c, amount);
        self.members.entry(c).or_default().insert(p);
    }

    fn remove(&mut self, p: usize, c: usize) {
        self.sets[p].remove(&c);
        if let Some(m) = self.members.get_mut(&c) {
            m.remove(&p);
        }
    }

    fn members_of(&self, c: usize) -> Vec<usize> {
        self.members
            .get(&c)
            .into_iter()
            .flatten()
            .copied()
            .collect()
    }

    /// `P_c^2`: a unit at `c` and at least two units in total.
    fn multi(&self, c: usize) -> Vec<usize> {
        self.members_of(c)
            .into_iter()
            .filter(|&q| self.sets[q].get(&c) == Some(&Amount::Unit) && self.units(q) >= 2)
            .collect()
    }

    /// `P_c^1`: assigned to `c` alone, by a unit.
    fn exclusive(&self, c: usize) -> Vec<usize> {
        self.members_of(c)
            .into_iter()
            .filter(|&q| self.sets[q].len() == 1 && self.sets[q].get(&c) == Some(&Amount::Unit))
            .collect()
    }

    /// `Q_c^eps`: a unit at `c` plus `eps` elsewhere.
    fn unit_with_eps(&self, c: usize) -> Vec<usize> {
        self.members_of(c)
            .into_iter()
            .filter(|&q| {
                self.sets[q].len() == 2
                    && self.sets[q].get(&c) == Some(&Amount::Unit)
                    && self.sets[q].values().any(|&a| a == Amount::Eps)
            })
            .collect()
    }

    fn check_untouched(&mut self, c: usize, when: &str) {
        if self.members.get(&c) != self.initial_members.get(&c) {
            self.trace.violation(format!(
                "cluster of center {c} changed before it was {when}"
            ));
        }
        let partial: Vec<usize> = self
            .members_of(c)
            .into_iter()
            .filter(|&q| self.sets[q].get(&c) != Some(&Amount::Unit))
            .collect();
        if !partial.is_empty() {
            self.trace.violation(format!(
                "center {c} holds partial amounts before it was {when}: {partial:?}"
            ));
        }
    }

    fn check_structure(&mut self) {
        for q in 0..self.sets.len() {
            let eps = self.sets[q].values().filter(|&&a| a == Amount::Eps).count();
            let units = self.units(q);
            let ok = units >= 1 && (eps == 0 || (eps == 1 && units == 1));
            if !ok {
                self.trace
                    .violation(format!("point {q} has {units} units and {eps} eps amounts"));
            }
        }
        for &(x, c) in &self.deleted {
            if self.sets[x].get(&c) == Some(&Amount::Unit) && self.units(x) >= 2 {
                self.trace.violation(format!(
                    "point {x} re-entered the multiple set of center {c} after losing it"
                ));
            }
        }
    }
}

/// `ceil(1/eps) α(α+1) + 1`.
pub fn eps_factor<T: Scalar>(alpha: T, eps: T) -> T {
    T::from_usize((T::one() / eps).ceil_usize()) * alpha * (alpha + T::one()) + T::one()
}

/// Reduces the solution to a fractional `(1+eps)`-weak one.
///
/// Returns the solution and a trace with invariant and charging audits.
/// Fails with [`Error::GuaranteeViolated`] if a postcondition does not hold.
pub fn reduce_to_one_plus_eps<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
    eps: T,
) -> Result<(FractionalSolution<T>, TraceLog)> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::EpsOutOfRange(eps.to_f64()));
    }
    let report = check_feasibility(inst, &sol.clone().with_kind(SolutionKind::WeakLB));
    if !report.is_feasible() {
        return Err(Error::InfeasibleInput(format!("{:?}", report.violations)));
    }
    let input_cost = cost_multi(inst, sol)?;
    let batch = (T::one() / eps).ceil_usize();
    let mut st = State::new(&sol.centers, &sol.assignment);

    for &c in &sol.centers {
        if !st.open.contains(&c) {
            continue;
        }
        st.check_untouched(c, "processed");
        st.trace.events.push(TraceEvent::BeginCenter { center: c });
        loop {
            let p2 = st.multi(c);
            if p2.is_empty() {
                break;
            }
            let d = p2
                .iter()
                .flat_map(|&q| st.sets[q].keys().copied())
                .filter(|&e| e != c)
                .min()
                .expect("a multiply assigned point has other centers");
            if d <= c {
                st.trace.violation(format!(
                    "center {d} chosen while processing larger center {c}"
                ));
            }
            let x = p2
                .iter()
                .copied()
                .find(|&q| st.sets[q].contains_key(&d))
                .expect("d is used by some multiply assigned point");
            let pd1 = st.exclusive(d);
            let (bar, free): (Vec<usize>, Vec<usize>) = pd1.iter().partition(|&&q| {
                let orig = st.original.of(q);
                orig.len() >= 2 && orig.iter().any(|&e| e < c && st.open.contains(&e))
            });

            if free.len() < batch {
                st.trace.closures += 1;
                st.check_untouched(d, "closed");
                st.trace.events.push(TraceEvent::Close {
                    center: d,
                    processing: c,
                    free_points: free.len(),
                });
                let raised = st.unit_with_eps(d);
                st.open.remove(&d);
                for q in st.members_of(d) {
                    st.remove(q, d);
                }
                for &q in &bar {
                    let e = st
                        .original
                        .of(q)
                        .iter()
                        .copied()
                        .find(|e| st.open.contains(e))
                        .expect("point keeps an open original center");
                    st.set(q, e, Amount::Unit);
                    st.trace.events.push(TraceEvent::Reconnect {
                        point: q,
                        center: e,
                    });
                }
                for q in raised {
                    let partner = st.sets[q]
                        .iter()
                        .find(|(_, &a)| a == Amount::Eps)
                        .map(|(&e, _)| e);
                    match partner {
                        Some(e) if st.open.contains(&e) => {
                            st.sets[q].insert(e, Amount::Unit);
                            st.trace.events.push(TraceEvent::Raise {
                                point: q,
                                center: e,
                            });
                        }
                        _ => st
                            .trace
                            .violation(format!("point {q} lost its unit without an open partner")),
                    }
                }
                if !free.is_empty() {
                    let released = st.units(x) >= 3;
                    if released {
                        st.remove(x, c);
                        st.deleted.insert((x, c));
                    }
                    for &y in &free {
                        st.set(y, c, Amount::Unit);
                        st.trace.created.push(NewConnection { y, c, d, x });
                    }
                    st.trace.events.push(TraceEvent::Absorb {
                        center: c,
                        d,
                        x,
                        points: free.clone(),
                        released_x: released,
                    });
                }
            } else {
                let chosen: Vec<usize> = free.iter().copied().take(batch).collect();
                st.remove(x, c);
                st.deleted.insert((x, c));
                for &y in &chosen {
                    st.set(y, c, Amount::Eps);
                    st.trace.created.push(NewConnection { y, c, d, x });
                }
                st.trace.events.push(TraceEvent::Swap {
                    center: c,
                    d,
                    x,
                    added: chosen,
                    amount: eps.to_f64(),
                });
            }
            st.check_structure();
        }
    }

    for &(p, c) in &st.added.clone() {
        if !st.sets[p].contains_key(&c) {
            st.trace.violation(format!(
                "connection ({p},{c}) created by the run was later removed"
            ));
        }
    }

    let amounts: Vec<Vec<(usize, T)>> = st
        .sets
        .iter()
        .map(|m| {
            m.iter()
                .map(|(&c, &a)| (c, if a == Amount::Unit { T::one() } else { eps }))
                .collect()
        })
        .collect();
    let out = FractionalSolution {
        centers: st.open.iter().copied().collect(),
        assignment: FractionalAssignment::new(amounts)?,
        eps,
    };
    let final_pairs: Vec<(usize, usize)> = st
        .sets
        .iter()
        .enumerate()
        .flat_map(|(p, m)| m.keys().map(move |&c| (p, c)))
        .collect();
    st.trace.charging = classify(
        &sol.assignment,
        final_pairs,
        &st.trace.created,
        batch,
        false,
    );

    let report = check_fractional_feasibility(inst, &out);
    if !report.is_feasible() {
        return Err(Error::GuaranteeViolated {
            guarantee: "(1+eps)-weak feasibility after reduction",
            observed: report.violations.len() as f64,
            bound: 0.0,
        });
    }
    let alpha = inst.alpha();
    let factor = eps_factor(alpha, eps);
    let bound = factor * input_cost;
    let output_cost = cost_fractional(inst, &out)?;
    if !output_cost.approx_le(bound) {
        return Err(Error::GuaranteeViolated {
            guarantee: "(1+eps)-weak reduction cost factor",
            observed: output_cost.to_f64(),
            bound: bound.to_f64(),
        });
    }
    Ok((out, st.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::LowerBounds;
    use num_rational::Rational64;

    fn q(v: i64) -> Rational64 {
        Rational64::from_integer(v)
    }

    fn weak(centers: Vec<usize>, sets: Vec<Vec<usize>>) -> Solution<Rational64> {
        Solution::new(
            centers,
            MultiAssignment::new(sets).unwrap(),
            SolutionKind::WeakLB,
        )
    }

    #[test]
    fn single_assignment_passes_through() {
        let inst =
            Instance::line([0, 1, 10, 11].map(q).to_vec(), 2, LowerBounds::Uniform(2)).unwrap();
        let sol = weak(vec![0, 2], vec![vec![0], vec![0], vec![2], vec![2]]);
        let (out, trace) = reduce_to_one_plus_eps(&inst, &sol, Rational64::new(1, 4)).unwrap();
        assert_eq!(
            out,
            FractionalSolution::from_integral(&sol, Rational64::new(1, 4))
        );
        assert!(trace.passed());
        assert_eq!(
            cost_fractional(&inst, &out).unwrap(),
            cost_multi(&inst, &sol).unwrap()
        );
    }

    #[test]
    fn half_swap_preserves_load() {
        // Center 0 shares point 0 with center 3; center 3 has two exclusive points.
        let coords = [0, 0, 1, 1, 2, 2].map(q).to_vec();
        let inst = Instance::line(coords, 2, LowerBounds::Uniform(2)).unwrap();
        let sol = weak(
            vec![0, 3],
            vec![vec![0, 3], vec![0], vec![0], vec![3], vec![3], vec![3]],
        );
        let half = Rational64::new(1, 2);
        let (out, trace) = reduce_to_one_plus_eps(&inst, &sol, half).unwrap();
        assert!(trace.passed(), "{trace:?}");
        assert_eq!(trace.created.len(), 2);
        // x = 0 leaves center 0; points 3 and 4 join it at 1/2 each.
        assert_eq!(out.assignment.of(0), &[(3, q(1))]);
        assert_eq!(out.assignment.of(3), &[(0, half), (3, q(1))]);
        assert_eq!(out.assignment.of(4), &[(0, half), (3, q(1))]);
        let loads = out.assignment.loads();
        assert_eq!(loads[&0], q(3));
        assert!(check_fractional_feasibility(&inst, &out).is_feasible());
    }

    #[test]
    fn closing_branch_absorbs_exclusive_points() {
        // eps = 1/5 needs five free points at center 1; only one exists.
        let coords = [0, 1, 0, 1].map(q).to_vec();
        let inst = Instance::line(coords, 2, LowerBounds::Uniform(2)).unwrap();
        let sol = weak(vec![0, 1], vec![vec![0, 1], vec![1], vec![0], vec![0, 1]]);
        let (out, trace) = reduce_to_one_plus_eps(&inst, &sol, Rational64::new(1, 5)).unwrap();
        assert_eq!(trace.closures, 1);
        assert!(trace.passed(), "{trace:?}");
        assert_eq!(out.centers, vec![0]);
        assert!(check_fractional_feasibility(&inst, &out).is_feasible());
    }

    #[test]
    fn freed_point_returns_as_replacement() {
        // Point 0 is freed from center 0 by the first swap and, now exclusive
        // to 4, is picked as a replacement by the second swap. The pair
        // (0, 4) is charged twice as (x, d) and once as (y, d).
        let inst = Instance::line(
            [0, 0, 0, 0, 1, 1, 1, 1].map(q).to_vec(),
            2,
            LowerBounds::Uniform(5),
        )
        .unwrap();
        let sol = weak(
            vec![0, 4],
            vec![
                vec![0, 4],
                vec![0],
                vec![0],
                vec![0],
                vec![0, 4],
                vec![4],
                vec![4],
                vec![4],
            ],
        );
        let (out, trace) = reduce_to_one_plus_eps(&inst, &sol, Rational64::new(1, 2)).unwrap();
        assert!(trace.invariant_violations.is_empty());
        assert_eq!(trace.charging.max_type2, 3);
        assert_eq!(trace.charging.over_limit, vec![(0, 4)]);
        assert_eq!(cost_fractional(&inst, &out).unwrap(), Rational64::new(5, 2));
    }

    #[test]
    fn eps_must_be_inside_unit_interval() {
        let inst = Instance::line([0, 1].map(q).to_vec(), 1, LowerBounds::Uniform(1)).unwrap();
        let sol = weak(vec![0], vec![vec![0], vec![0]]);
        assert!(matches!(
            reduce_to_one_plus_eps(&inst, &sol, q(1)),
            Err(Error::EpsOutOfRange(_))
        ));
        assert!(matches!(
            reduce_to_one_plus_eps(&inst, &sol, q(0)),
            Err(Error::EpsOutOfRange(_))
        ));
    }
}
