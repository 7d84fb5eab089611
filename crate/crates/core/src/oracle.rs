//! Exact optima for tiny instances.
//!
//! Center sets of size at most `k` are enumerated. For a fixed set the best
//! assignment is the nearest center (plain and center-cost objectives) or a
//! min-cost flow in which penalty edges of cost `-M` force every point to be
//! covered and every center to reach its bound. `M` exceeds the total of all
//! distances, so a flow saturating every penalty edge exists iff the set is
//! feasible.

use rayon::prelude::*;

use crate::cost::{check_feasibility, cost_multi, MultiAssignment, Solution, SolutionKind};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::instance::Instance;
use crate::scalar::{sum, Scalar};
use crate::subsolver::{nearest, CenterCosts};

#[derive(Debug, Clone, PartialEq)]
pub enum OracleMode<T> {
    Unconstrained,
    CenterCosts(CenterCosts<T>),
    WeakLB,
    BWeak(usize),
    StandardLB,
}

impl<T: Scalar> OracleMode<T> {
    pub fn name(&self) -> &'static str {
        match self {
            OracleMode::Unconstrained => "plain",
            OracleMode::CenterCosts(_) => "fcost",
            OracleMode::WeakLB => "weak",
            OracleMode::BWeak(_) => "b-weak",
            OracleMode::StandardLB => "lb",
        }
    }

    fn kind(&self) -> SolutionKind<T> {
        match self {
            OracleMode::Unconstrained => SolutionKind::Unconstrained,
            OracleMode::CenterCosts(_) => SolutionKind::CenterCosts,
            OracleMode::WeakLB => SolutionKind::WeakLB,
            OracleMode::BWeak(b) => SolutionKind::BWeak(*b),
            OracleMode::StandardLB => SolutionKind::StandardLB,
        }
    }

    /// Per-point multiplicity cap for a center set of the given size.
    fn cap(&self, centers: usize) -> usize {
        match self {
            OracleMode::WeakLB => centers,
            OracleMode::BWeak(b) => (*b).min(centers),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_n: usize,
    pub max_k: usize,
    pub max_centers: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_n: 10,
            max_k: 3,
            max_centers: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub solution: Solution<T>,
    /// Optimal objective; `cost^f` in center-cost mode.
    pub cost: T,
}

fn check_limits<T: Scalar>(inst: &Instance<T>, limits: &OracleLimits) -> Result<()> {
    if inst.n() > limits.max_n {
        return Err(Error::TooLarge(format!(
            "n = {} > {}",
            inst.n(),
            limits.max_n
        )));
    }
    if inst.k() > limits.max_k {
        return Err(Error::TooLarge(format!(
            "k = {} > {}",
            inst.k(),
            limits.max_k
        )));
    }
    if inst.centers().len() > limits.max_centers {
        return Err(Error::TooLarge(format!(
            "|F| = {} > {}",
            inst.centers().len(),
            limits.max_centers
        )));
    }
    Ok(())
}

/// Nonempty subsets of `items` with at most `k` elements, in lexicographic order.
pub fn subsets_up_to(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(
        items: &[usize],
        start: usize,
        k: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for i in start..items.len() {
            cur.push(items[i]);
            out.push(cur.clone());
            if cur.len() < k {
                rec(items, i + 1, k, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, 0, k, &mut Vec::new(), &mut out);
    out
}

fn nearest_assignment<T: Scalar>(inst: &Instance<T>, centers: &[usize]) -> (Vec<Vec<usize>>, T) {
    let sets: Vec<Vec<usize>> = inst
        .points()
        .map(|p| vec![nearest(inst, p, centers)])
        .collect();
    let cost = sum(sets.iter().enumerate().map(|(p, s)| inst.d(p, s[0])));
    (sets, cost)
}

/// Cheapest assignment of the points to `centers` meeting every bound, with
/// each point using between 1 and `cap` distinct centers. `None` if infeasible.
pub fn flow_assignment<T: Scalar>(
    inst: &Instance<T>,
    centers: &[usize],
    cap: usize,
) -> Option<(Vec<Vec<usize>>, T)> {
    let n = inst.n();
    let m = centers.len();
    let demand: usize = centers.iter().map(|&c| inst.bound(c)).sum();
    if demand > n * cap.max(1) {
        return None;
    }
    let big = T::one()
        + sum(inst
            .points()
            .flat_map(|p| centers.iter().map(move |&c| inst.d(p, c))));
    let (s, t) = (0, n + m + 1);
    let mut g = FlowNetwork::new(n + m + 2);
    let mut penalties = Vec::new();
    for p in 0..n {
        penalties.push(g.add_edge(s, 1 + p, 1, -big));
        if cap > 1 {
            g.add_edge(s, 1 + p, cap as i64 - 1, T::zero());
        }
    }
    let mut links = Vec::new();
    for p in 0..n {
        for (j, &c) in centers.iter().enumerate() {
            links.push((p, c, g.add_edge(1 + p, 1 + n + j, 1, inst.d(p, c))));
        }
    }
    for (j, &c) in centers.iter().enumerate() {
        penalties.push(g.add_edge(1 + n + j, t, inst.bound(c) as i64, -big));
        g.add_edge(1 + n + j, t, n as i64, T::zero());
    }
    g.min_cost_flow(s, t);
    let saturated = penalties.iter().enumerate().all(|(i, &e)| {
        let need = if i < n {
            1
        } else {
            inst.bound(centers[i - n]) as i64
        };
        g.flow(e) == need
    });
    if !saturated {
        return None;
    }
    let mut sets = vec![Vec::new(); n];
    let mut cost = T::zero();
    for &(p, c, e) in &links {
        if g.flow(e) > 0 {
            sets[p].push(c);
            cost = cost + inst.d(p, c);
        }
    }
    Some((sets, cost))
}

fn evaluate<T: Scalar>(
    inst: &Instance<T>,
    mode: &OracleMode<T>,
    centers: &[usize],
) -> Option<(Vec<Vec<usize>>, T)> {
    match mode {
        OracleMode::Unconstrained => Some(nearest_assignment(inst, centers)),
        OracleMode::CenterCosts(f) => {
            let (sets, cost) = nearest_assignment(inst, centers);
            Some((sets, cost + sum(centers.iter().map(|&c| f.get(c)))))
        }
        _ => flow_assignment(inst, centers, mode.cap(centers.len())),
    }
}

fn best_of<T: Scalar>(
    candidates: impl ParallelIterator<Item = (usize, Vec<usize>, Vec<Vec<usize>>, T)>,
) -> Option<(usize, Vec<usize>, Vec<Vec<usize>>, T)> {
    candidates.reduce_with(|a, b| {
        if b.3 < a.3 || (b.3 == a.3 && b.0 < a.0) {
            b
        } else {
            a
        }
    })
}

fn package<T: Scalar>(
    inst: &Instance<T>,
    mode: &OracleMode<T>,
    best: Option<(usize, Vec<usize>, Vec<Vec<usize>>, T)>,
) -> Result<OracleResult<T>> {
    let (_, centers, sets, cost) =
        best.ok_or_else(|| Error::NoFeasibleSolution(mode.name().to_string()))?;
    let solution = Solution::new(centers, MultiAssignment::new(sets)?, mode.kind());
    if !matches!(mode, OracleMode::CenterCosts(_)) {
        debug_assert!(cost_multi(inst, &solution).is_ok_and(|c| c.approx_eq(cost)));
    }
    Ok(OracleResult { solution, cost })
}

/// Exact optimum by center-set enumeration, with min-cost flow for the
/// lower-bounded modes. Ties go to the lexicographically smallest center set.
pub fn brute_force_opt<T: Scalar>(
    inst: &Instance<T>,
    mode: &OracleMode<T>,
    limits: &OracleLimits,
) -> Result<OracleResult<T>> {
    check_limits(inst, limits)?;
    let subsets = subsets_up_to(inst.centers(), inst.k());
    let best = best_of(
        subsets
            .into_par_iter()
            .enumerate()
            .filter_map(|(i, centers)| {
                evaluate(inst, mode, &centers).map(|(sets, cost)| (i, centers, sets, cost))
            }),
    );
    package(inst, mode, best)
}

/// Instances this small are also solved by [`brute_force_enumerate`].
pub const ENUMERATION_MAX_N: usize = 6;

/// Exact optimum by enumerating every per-point center subset. Independent of
/// the flow code; meant as a cross-check for `n <= 6`.
pub fn brute_force_enumerate<T: Scalar>(
    inst: &Instance<T>,
    mode: &OracleMode<T>,
) -> Result<OracleResult<T>> {
    if inst.n() > ENUMERATION_MAX_N {
        return Err(Error::TooLarge(format!(
            "n = {} > {ENUMERATION_MAX_N}",
            inst.n()
        )));
    }
    check_limits(inst, &OracleLimits::default())?;
    let subsets = subsets_up_to(inst.centers(), inst.k());
    let best = best_of(
        subsets
            .into_par_iter()
            .enumerate()
            .filter_map(|(i, centers)| {
                enumerate_assignments(inst, mode, &centers)
                    .map(|(sets, cost)| (i, centers, sets, cost))
            }),
    );
    package(inst, mode, best)
}

fn enumerate_assignments<T: Scalar>(
    inst: &Instance<T>,
    mode: &OracleMode<T>,
    centers: &[usize],
) -> Option<(Vec<Vec<usize>>, T)> {
    let m = centers.len();
    let cap = mode.cap(m);
    let options: Vec<u32> = (1u32..(1 << m))
        .filter(|mask| mask.count_ones() as usize <= cap)
        .collect();
    let bounded = !matches!(mode, OracleMode::Unconstrained | OracleMode::CenterCosts(_));
    let need: Vec<usize> = centers
        .iter()
        .map(|&c| if bounded { inst.bound(c) } else { 0 })
        .collect();
    let extra = match mode {
        OracleMode::CenterCosts(f) => sum(centers.iter().map(|&c| f.get(c))),
        _ => T::zero(),
    };

    struct Search<'a, T> {
        inst: &'a Instance<T>,
        centers: &'a [usize],
        options: &'a [u32],
        need: &'a [usize],
        loads: Vec<usize>,
        chosen: Vec<u32>,
        best: Option<(Vec<u32>, T)>,
    }

    impl<T: Scalar> Search<'_, T> {
        fn go(&mut self, p: usize, cost: T) {
            if let Some((_, b)) = &self.best {
                if cost >= *b {
                    return;
                }
            }
            let left = self.inst.n() - p;
            let missing: usize = self
                .loads
                .iter()
                .zip(self.need)
                .map(|(&l, &r)| r.saturating_sub(l))
                .max()
                .unwrap_or(0);
            if missing > left {
                return;
            }
            if p == self.inst.n() {
                self.best = Some((self.chosen.clone(), cost));
                return;
            }
            for &mask in self.options {
                let mut add = T::zero();
                for j in 0..self.centers.len() {
                    if mask & (1 << j) != 0 {
                        add = add + self.inst.d(p, self.centers[j]);
                        self.loads[j] += 1;
                    }
                }
                self.chosen.push(mask);
                self.go(p + 1, cost + add);
                self.chosen.pop();
                for j in 0..self.centers.len() {
                    if mask & (1 << j) != 0 {
                        self.loads[j] -= 1;
                    }
                }
            }
        }
    }

    let mut search = Search {
        inst,
        centers,
        options: &options,
        need: &need,
        loads: vec![0; m],
        chosen: Vec::new(),
        best: None,
    };
    search.go(0, T::zero());
    let (masks, cost) = search.best?;
    let sets = masks
        .iter()
        .map(|&mask| {
            (0..m)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| centers[j])
                .collect()
        })
        .collect();
    Some((sets, cost + extra))
}

/// Optimal value and feasibility check in one call; used by tests.
pub fn verified_opt<T: Scalar>(
    inst: &Instance<T>,
    mode: &OracleMode<T>,
    limits: &OracleLimits,
) -> Result<OracleResult<T>> {
    let out = brute_force_opt(inst, mode, limits)?;
    if !matches!(mode, OracleMode::CenterCosts(_))
        && !check_feasibility(inst, &out.solution).is_feasible()
    {
        return Err(Error::GuaranteeViolated {
            guarantee: "oracle output feasible",
            observed: 1.0,
            bound: 0.0,
        });
    }
    Ok(out)
}
