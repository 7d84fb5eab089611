//! Turns a weak-lower-bound solution into one where every point is assigned
//! to at most two centers, at cost factor `α(α+1)`.
//!
//! Centers are processed in ascending id. While the current center `c` has
//! points assigned three or more times, let `d` be the smallest other center
//! such a point uses. Either a point `y` that only `d` serves replaces one of
//! them at `c`, or, if no eligible `y` exists, `d` is closed and its exclusive
//! points fall back to their smallest open original center.

use std::collections::{BTreeMap, BTreeSet};

use crate::charging::{classify, NewConnection, TraceEvent, TraceLog};
use crate::cost::{check_feasibility, cost_multi, MultiAssignment, Solution, SolutionKind};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;

struct State<'a> {
    original: &'a MultiAssignment,
    sets: Vec<BTreeSet<usize>>,
    members: BTreeMap<usize, BTreeSet<usize>>,
    open: BTreeSet<usize>,
    initial_members: BTreeMap<usize, BTreeSet<usize>>,
    deleted: BTreeSet<(usize, usize)>,
    added: Vec<(usize, usize)>,
    trace: TraceLog,
}

impl<'a> State<'a> {
    fn new(sol: &Solution<impl Scalar>, original: &'a MultiAssignment) -> Self {
        let sets: Vec<BTreeSet<usize>> = original
            .sets()
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        let mut members: BTreeMap<usize, BTreeSet<usize>> =
            sol.centers.iter().map(|&c| (c, BTreeSet::new())).collect();
        for (p, c) in original.pairs() {
            members.entry(c).or_default().insert(p);
        }
        State {
            original,
            sets,
            initial_members: members.clone(),
            members,
            open: sol.centers.iter().copied().collect(),
            deleted: BTreeSet::new(),
            added: Vec::new(),
            trace: TraceLog::default(),
        }
    }

    fn connect(&mut self, p: usize, c: usize) {
        if self.sets[p].len() > 1 {
            self.trace.violation(format!(
                "connection ({p},{c}) added while the point has {} centers",
                self.sets[p].len()
            ));
        }
        self.sets[p].insert(c);
        self.members.entry(c).or_default().insert(p);
        self.added.push((p, c));
    }

    fn disconnect(&mut self, p: usize, c: usize) {
        self.sets[p].remove(&c);
        if let Some(m) = self.members.get_mut(&c) {
            m.remove(&p);
        }
    }

    fn triple(&self, c: usize) -> Vec<usize> {
        self.members
            .get(&c)
            .map(|m| {
                m.iter()
                    .copied()
                    .filter(|&q| self.sets[q].len() >= 3)
                    .collect()
            })
            .unwrap_or_default()
    }

    fn exclusive(&self, c: usize) -> Vec<usize> {
        self.members
            .get(&c)
            .map(|m| {
                m.iter()
                    .copied()
                    .filter(|&q| self.sets[q].len() == 1)
                    .collect()
            })
            .unwrap_or_default()
    }

    fn check_untouched(&mut self, c: usize, when: &str) {
        if self.members.get(&c) != self.initial_members.get(&c) {
            self.trace.violation(format!(
                "cluster of center {c} changed before it was {when}"
            ));
        }
    }

    fn check_structure(&mut self) {
        for &(x, c) in &self.deleted {
            if self.sets[x].contains(&c) && self.sets[x].len() >= 3 {
                self.trace.violation(format!(
                    "point {x} re-entered the triple set of center {c} after losing it"
                ));
            }
        }
        if cfg!(debug_assertions) {
            let mut fresh: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for (p, set) in self.sets.iter().enumerate() {
                for &c in set {
                    fresh.entry(c).or_default().insert(p);
                }
            }
            let tracked: BTreeMap<usize, BTreeSet<usize>> = self
                .members
                .iter()
                .filter(|(_, m)| !m.is_empty())
                .map(|(&c, m)| (c, m.clone()))
                .collect();
            assert_eq!(fresh, tracked, "incremental clusters diverged");
        }
    }
}

/// Reduces every point's multiplicity to at most two.
///
/// Returns the 2-weak solution and a trace with the invariant and charging
/// audits. Fails with [`Error::GuaranteeViolated`] if the output is not
/// 2-weak feasible or costs more than `α(α+1)` times the input.
pub fn reduce_to_two<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
) -> Result<(Solution<T>, TraceLog)> {
    let report = check_feasibility(inst, &sol.clone().with_kind(SolutionKind::WeakLB));
    if !report.is_feasible() {
        return Err(Error::InfeasibleInput(format!("{:?}", report.violations)));
    }
    let input_cost = cost_multi(inst, sol)?;
    let mut st = State::new(sol, &sol.assignment);
    let order = sol.centers.clone();

    for &c in &order {
        if !st.open.contains(&c) {
            continue;
        }
        st.check_untouched(c, "processed");
        st.trace.events.push(TraceEvent::BeginCenter { center: c });
        loop {
            let p3 = st.triple(c);
            if p3.is_empty() {
                break;
            }
            let d = p3
                .iter()
                .flat_map(|&q| st.sets[q].iter().copied())
                .filter(|&e| e != c)
                .min()
                .expect("a triple point has other centers");
            if d <= c {
                st.trace.violation(format!(
                    "center {d} chosen while processing larger center {c}"
                ));
            }
            let pd1 = st.exclusive(d);
            let (bar, free): (Vec<usize>, Vec<usize>) = pd1.iter().partition(|&&q| {
                let orig = st.original.of(q);
                orig.len() >= 3 && orig.iter().any(|&e| e < c && st.open.contains(&e))
            });

            if free.is_empty() {
                st.trace.closures += 1;
                st.check_untouched(d, "closed");
                st.trace.events.push(TraceEvent::Close {
                    center: d,
                    processing: c,
                    free_points: 0,
                });
                for &q in &bar {
                    let e = st
                        .original
                        .of(q)
                        .iter()
                        .copied()
                        .find(|e| st.open.contains(e))
                        .expect("point keeps an open original center");
                    st.disconnect(q, d);
                    st.connect(q, e);
                    st.trace.events.push(TraceEvent::Reconnect {
                        point: q,
                        center: e,
                    });
                }
                st.open.remove(&d);
                let rest: Vec<usize> = st.members.get(&d).into_iter().flatten().copied().collect();
                for q in rest {
                    st.disconnect(q, d);
                }
            } else {
                let x = p3
                    .iter()
                    .copied()
                    .find(|&q| st.sets[q].contains(&d))
                    .expect("d is used by some triple point");
                let y = free[0];
                st.disconnect(x, c);
                st.deleted.insert((x, c));
                st.connect(y, c);
                st.trace.created.push(NewConnection { y, c, d, x });
                st.trace.events.push(TraceEvent::Swap {
                    center: c,
                    d,
                    x,
                    added: vec![y],
                    amount: 1.0,
                });
            }
            st.check_structure();
        }
    }

    for &(p, c) in &st.added.clone() {
        if !st.sets[p].contains(&c) {
            st.trace.violation(format!(
                "connection ({p},{c}) created by the run was later removed"
            ));
        }
    }

    let sets: Vec<Vec<usize>> = st
        .sets
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    let centers: Vec<usize> = st.open.iter().copied().collect();
    let out = Solution::new(centers, MultiAssignment::new(sets)?, SolutionKind::BWeak(2));

    let final_pairs: Vec<(usize, usize)> = out.assignment.pairs().collect();
    st.trace.charging = classify(&sol.assignment, final_pairs, &st.trace.created, 1, true);

    let report = check_feasibility(inst, &out);
    if !report.is_feasible() {
        return Err(Error::GuaranteeViolated {
            guarantee: "2-weak feasibility after reduction",
            observed: report.violations.len() as f64,
            bound: 0.0,
        });
    }
    let alpha = inst.alpha();
    let bound = alpha * (alpha + T::one()) * input_cost;
    let output_cost = cost_multi(inst, &out)?;
    if !output_cost.approx_le(bound) {
        return Err(Error::GuaranteeViolated {
            guarantee: "2-weak reduction cost factor alpha(alpha+1)",
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
    fn two_weak_input_is_untouched() {
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
        let (out, trace) = reduce_to_two(&inst, &sol).unwrap();
        assert_eq!(out.assignment, sol.assignment);
        assert!(trace.created.is_empty());
        assert_eq!(trace.closures, 0);
        assert!(trace.passed());
    }

    #[test]
    fn triple_assignments_are_swapped_out() {
        // Three centers at 0, 1, 2 share points 0..2; extra singletons near each.
        let coords = [0, 1, 2, 0, 0, 1, 1, 2, 2].map(q).to_vec();
        let inst = Instance::line(coords, 3, LowerBounds::Uniform(3)).unwrap();
        let sol = weak(
            vec![0, 1, 2],
            vec![
                vec![0, 1, 2],
                vec![0, 1, 2],
                vec![0, 1, 2],
                vec![0],
                vec![0],
                vec![1],
                vec![1],
                vec![2],
                vec![2],
            ],
        );
        let before = cost_multi(&inst, &sol).unwrap();
        let (out, trace) = reduce_to_two(&inst, &sol).unwrap();
        assert!(out.assignment.max_multiplicity() <= 2);
        assert!(check_feasibility(&inst, &out).is_feasible());
        assert!(cost_multi(&inst, &out).unwrap() <= q(2) * before);
        assert!(trace.passed(), "{trace:?}");
        assert!(!trace.created.is_empty());
    }

    #[test]
    fn closure_branch_reconnects_to_smallest_original() {
        // Center 2 is only reachable through triple points, so it must close.
        let coords = [0, 1, 2, 0, 1].map(q).to_vec();
        let inst = Instance::line(coords, 3, LowerBounds::Uniform(2)).unwrap();
        let sol = weak(
            vec![0, 1, 2],
            vec![vec![0, 1, 2], vec![0, 1, 2], vec![2], vec![0], vec![1]],
        );
        let (out, trace) = reduce_to_two(&inst, &sol).unwrap();
        assert!(out.assignment.max_multiplicity() <= 2);
        assert!(check_feasibility(&inst, &out).is_feasible());
        assert!(trace.passed(), "{trace:?}");
    }

    #[test]
    fn rejects_infeasible_input() {
        let inst = Instance::line([0, 1, 2].map(q).to_vec(), 1, LowerBounds::Uniform(2)).unwrap();
        let sol = weak(vec![0], vec![vec![0], vec![], vec![]]);
        assert!(matches!(
            reduce_to_two(&inst, &sol),
            Err(Error::InfeasibleInput(_))
        ));
    }
}
