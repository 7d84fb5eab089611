//! Solutions, cost functions and feasibility predicates.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::{sum, Scalar};
use crate::subsolver::CenterCosts;

/// Per point, the sorted set of distinct centers it is assigned to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiAssignment {
    sets: Vec<Vec<usize>>,
}

impl MultiAssignment {
    /// Sorts each point's centers; rejects duplicates.
    pub fn new(mut sets: Vec<Vec<usize>>) -> Result<Self> {
        for (p, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateCenter(p, w[0]));
            }
        }
        Ok(MultiAssignment { sets })
    }

    /// One center per point.
    pub fn single(targets: &[usize]) -> Self {
        MultiAssignment {
            sets: targets.iter().map(|&c| vec![c]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn of(&self, p: usize) -> &[usize] {
        &self.sets[p]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn contains(&self, p: usize, c: usize) -> bool {
        self.sets[p].binary_search(&c).is_ok()
    }

    pub fn multiplicity(&self, p: usize) -> usize {
        self.sets[p].len()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Some(targets)` when every point has exactly one center.
    pub fn as_single(&self) -> Option<Vec<usize>> {
        self.sets
            .iter()
            .map(|s| (s.len() == 1).then(|| s[0]))
            .collect()
    }

    /// Number of points assigned to each center.
    pub fn loads(&self) -> BTreeMap<usize, usize> {
        let mut loads = BTreeMap::new();
        for set in &self.sets {
            for &c in set {
                *loads.entry(c).or_insert(0) += 1;
            }
        }
        loads
    }

    /// Points assigned to `c`, ascending.
    pub fn cluster(&self, c: usize) -> Vec<usize> {
        (0..self.sets.len())
            .filter(|&p| self.contains(p, c))
            .collect()
    }

    /// All `(point, center)` connections.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sets
            .iter()
            .enumerate()
            .flat_map(|(p, s)| s.iter().map(move |&c| (p, c)))
    }
}

/// Per point, `(center, amount)` pairs with distinct centers and amounts in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalAssignment<T> {
    amounts: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> FractionalAssignment<T> {
    pub fn new(mut amounts: Vec<Vec<(usize, T)>>) -> Result<Self> {
        for (p, list) in amounts.iter_mut().enumerate() {
            list.sort_by_key(|&(c, _)| c);
            if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicateCenter(p, w[0].0));
            }
            if let Some(&(_, a)) = list.iter().find(|&&(_, a)| a <= T::zero() || a > T::one()) {
                return Err(Error::AmountOutOfRange {
                    point: p,
                    amount: a.to_f64(),
                });
            }
        }
        Ok(FractionalAssignment { amounts })
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn of(&self, p: usize) -> &[(usize, T)] {
        &self.amounts[p]
    }

    pub fn amounts(&self) -> &[Vec<(usize, T)>] {
        &self.amounts
    }

    /// Total amount `ã_x` for point `p`.
    pub fn total(&self, p: usize) -> T {
        sum(self.amounts[p].iter().map(|&(_, a)| a))
    }

    /// Fractional load `Σ_p ã_p^c` per center.
    pub fn loads(&self) -> BTreeMap<usize, T> {
        let mut loads = BTreeMap::new();
        for list in &self.amounts {
            for &(c, a) in list {
                let e = loads.entry(c).or_insert_with(T::zero);
                *e = *e + a;
            }
        }
        loads
    }
}

/// Which constraint family a solution claims to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionKind<T> {
    /// Points may be assigned to several distinct centers; loads meet `B(c)`.
    WeakLB,
    /// Weak lower bounds with at most `b` centers per point.
    BWeak(usize),
    /// Every point assigned exactly once; loads meet `B(c)`.
    StandardLB,
    /// Every point assigned exactly once; loads meet `ceil(beta * B(c))`.
    Bicriteria(T),
    Unconstrained,
    CenterCosts,
}

impl<T: Scalar> SolutionKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            SolutionKind::WeakLB => "weak",
            SolutionKind::BWeak(_) => "b-weak",
            SolutionKind::StandardLB => "lb",
            SolutionKind::Bicriteria(_) => "bicriteria",
            SolutionKind::Unconstrained => "plain",
            SolutionKind::CenterCosts => "center-costs",
        }
    }
}

/// An integral solution: open centers plus a multi-assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub centers: Vec<usize>,
    pub assignment: MultiAssignment,
    pub kind: SolutionKind<T>,
}

impl<T: Scalar> Solution<T> {
    /// Builds a solution; `centers` is sorted and deduplicated.
    pub fn new(
        mut centers: Vec<usize>,
        assignment: MultiAssignment,
        kind: SolutionKind<T>,
    ) -> Self {
        centers.sort_unstable();
        centers.dedup();
        Solution {
            centers,
            assignment,
            kind,
        }
    }

    /// Single assignment; the open centers are exactly those used.
    pub fn from_targets(targets: &[usize], kind: SolutionKind<T>) -> Self {
        let centers = targets.to_vec();
        Solution::new(centers, MultiAssignment::single(targets), kind)
    }

    pub fn is_open(&self, c: usize) -> bool {
        self.centers.binary_search(&c).is_ok()
    }

    pub fn with_kind(mut self, kind: SolutionKind<T>) -> Self {
        self.kind = kind;
        self
    }

    /// Drops open centers with no assigned point.
    pub fn prune_unused(mut self) -> Self {
        let loads = self.assignment.loads();
        self.centers.retain(|c| loads.contains_key(c));
        self
    }
}

/// A fractional `(1+eps)`-weak solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution<T> {
    pub centers: Vec<usize>,
    pub assignment: FractionalAssignment<T>,
    pub eps: T,
}

impl<T: Scalar> FractionalSolution<T> {
    /// All amounts one; the natural embedding of a multi-assignment.
    pub fn from_integral(sol: &Solution<T>, eps: T) -> Self {
        let amounts = sol
            .assignment
            .sets()
            .iter()
            .map(|s| s.iter().map(|&c| (c, T::one())).collect())
            .collect();
        FractionalSolution {
            centers: sol.centers.clone(),
            assignment: FractionalAssignment { amounts },
            eps,
        }
    }
}

fn check_length(inst_n: usize, got: usize) -> Result<()> {
    if inst_n != got {
        return Err(Error::AssignmentLength {
            expected: inst_n,
            got,
        });
    }
    Ok(())
}

/// `Σ_x Σ_{c ∈ a(x)} d(x, c)`. Every extra assignment is paid.
pub fn cost_multi<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> Result<T> {
    check_length(inst.n(), sol.assignment.len())?;
    let mut total = T::zero();
    for (p, c) in sol.assignment.pairs() {
        if !sol.is_open(c) {
            return Err(Error::DanglingCenter(c));
        }
        if c >= inst.metric_size() {
            return Err(Error::IndexOutOfRange(c));
        }
        total = total + inst.d(p, c);
    }
    Ok(total)
}

/// `Σ_c Σ_x ã_x^c d(x, c)`.
pub fn cost_fractional<T: Scalar>(inst: &Instance<T>, sol: &FractionalSolution<T>) -> Result<T> {
    check_length(inst.n(), sol.assignment.len())?;
    let mut total = T::zero();
    for (p, list) in sol.assignment.amounts().iter().enumerate() {
        for &(c, a) in list {
            if a <= T::zero() || a > T::one() {
                return Err(Error::AmountOutOfRange {
                    point: p,
                    amount: a.to_f64(),
                });
            }
            if sol.centers.binary_search(&c).is_err() {
                return Err(Error::DanglingCenter(c));
            }
            total = total + a * inst.d(p, c);
        }
    }
    Ok(total)
}

/// `Σ_x d(x, a(x)) + Σ_{c ∈ C} f(c)`; requires a single assignment.
pub fn cost_with_center_costs<T: Scalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
    f: &CenterCosts<T>,
) -> Result<T> {
    check_length(inst.n(), sol.assignment.len())?;
    if let Some(p) = (0..sol.assignment.len()).find(|&p| sol.assignment.multiplicity(p) != 1) {
        return Err(Error::MultiplyAssignedPoint(p));
    }
    let assignment = cost_multi(inst, sol)?;
    Ok(assignment + sum(sol.centers.iter().map(|&c| f.get(c))))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Uncovered {
        point: usize,
    },
    DanglingCenter {
        point: usize,
        center: usize,
    },
    NotCandidate {
        center: usize,
    },
    TooManyCenters {
        open: usize,
        k: usize,
    },
    LoadBelowBound {
        center: usize,
        load: f64,
        required: f64,
    },
    Multiplicity {
        point: usize,
        multiplicity: usize,
        max: usize,
    },
    AmountOutOfRange {
        point: usize,
        total: f64,
    },
}

/// Per-center loads, per-point multiplicities and every violated constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub loads: BTreeMap<usize, f64>,
    pub multiplicity: Vec<usize>,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    /// Feasible except possibly for the `|C| <= k` budget.
    pub fn is_feasible_ignoring_budget(&self) -> bool {
        self.violations
            .iter()
            .all(|v| matches!(v, Violation::TooManyCenters { .. }))
    }
}

fn common_checks<T: Scalar>(
    inst: &Instance<T>,
    centers: &[usize],
    violations: &mut Vec<Violation>,
) {
    if centers.len() > inst.k() {
        violations.push(Violation::TooManyCenters {
            open: centers.len(),
            k: inst.k(),
        });
    }
    for &c in centers {
        if !inst.is_candidate(c) {
            violations.push(Violation::NotCandidate { center: c });
        }
    }
}

/// Checks the constraints implied by `sol.kind`.
pub fn check_feasibility<T: Scalar>(inst: &Instance<T>, sol: &Solution<T>) -> FeasibilityReport {
    let mut violations = Vec::new();
    common_checks(inst, &sol.centers, &mut violations);

    let n = inst.n();
    let mut multiplicity = vec![0; n];
    let mut load = BTreeMap::new();
    for &c in &sol.centers {
        load.insert(c, 0usize);
    }
    for (p, c) in sol.assignment.pairs().filter(|&(p, _)| p < n) {
        multiplicity[p] += 1;
        match load.get_mut(&c) {
            Some(l) => *l += 1,
            None => violations.push(Violation::DanglingCenter {
                point: p,
                center: c,
            }),
        }
    }
    if sol.assignment.len() != n {
        violations.push(Violation::Uncovered {
            point: sol.assignment.len().min(n),
        });
    }
    for (p, &m) in multiplicity.iter().enumerate() {
        if m == 0 {
            violations.push(Violation::Uncovered { point: p });
        }
    }

    let max_mult = match sol.kind {
        SolutionKind::WeakLB => None,
        SolutionKind::BWeak(b) => Some(b),
        _ => Some(1),
    };
    if let Some(max) = max_mult {
        for (p, &m) in multiplicity.iter().enumerate() {
            if m > max {
                violations.push(Violation::Multiplicity {
                    point: p,
                    multiplicity: m,
                    max,
                });
            }
        }
    }

    for (&c, &l) in &load {
        let required = match sol.kind {
            SolutionKind::WeakLB | SolutionKind::BWeak(_) | SolutionKind::StandardLB => {
                Some(inst.bound(c))
            }
            SolutionKind::Bicriteria(beta) => Some(bicriteria_threshold(inst.bound(c), beta)),
            SolutionKind::Unconstrained | SolutionKind::CenterCosts => None,
        };
        if let Some(r) = required {
            if l < r {
                violations.push(Violation::LoadBelowBound {
                    center: c,
                    load: l as f64,
                    required: r as f64,
                });
            }
        }
    }

    FeasibilityReport {
        loads: load.into_iter().map(|(c, l)| (c, l as f64)).collect(),
        multiplicity,
        violations,
    }
}

/// `ceil(beta * B)`, computed in the scalar type.
pub fn bicriteria_threshold<T: Scalar>(bound: usize, beta: T) -> usize {
    (beta * T::from_usize(bound)).ceil_usize()
}

/// Checks `ã_x ∈ [1, 1+eps]` for every point and fractional loads `>= B(c)`.
pub fn check_fractional_feasibility<T: Scalar>(
    inst: &Instance<T>,
    sol: &FractionalSolution<T>,
) -> FeasibilityReport {
    let mut violations = Vec::new();
    common_checks(inst, &sol.centers, &mut violations);
    let n = inst.n();
    let mut multiplicity = vec![0; n];
    let mut load: BTreeMap<usize, T> = sol.centers.iter().map(|&c| (c, T::zero())).collect();
    for (p, list) in sol.assignment.amounts().iter().enumerate().take(n) {
        multiplicity[p] = list.len();
        let mut total = T::zero();
        for &(c, a) in list {
            total = total + a;
            match load.get_mut(&c) {
                Some(l) => *l = *l + a,
                None => violations.push(Violation::DanglingCenter {
                    point: p,
                    center: c,
                }),
            }
        }
        if list.is_empty() {
            violations.push(Violation::Uncovered { point: p });
        } else if !(T::one().approx_le(total) && total.approx_le(T::one() + sol.eps)) {
            violations.push(Violation::AmountOutOfRange {
                point: p,
                total: total.to_f64(),
            });
        }
    }
    if sol.assignment.len() != n {
        violations.push(Violation::Uncovered {
            point: sol.assignment.len().min(n),
        });
    }
    for (&c, &l) in &load {
        let required = T::from_usize(inst.bound(c));
        if !required.approx_le(l) {
            violations.push(Violation::LoadBelowBound {
                center: c,
                load: l.to_f64(),
                required: required.to_f64(),
            });
        }
    }
    FeasibilityReport {
        loads: load.into_iter().map(|(c, l)| (c, l.to_f64())).collect(),
        multiplicity,
        violations,
    }
}

/// Result of snapping external centers to their nearest input points.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapOutcome<T> {
    pub assignment: MultiAssignment,
    pub original_cost: T,
    pub snapped_cost: T,
}

/// Replaces each `a(x)` by the point of `P` nearest to it (ties to the smallest
/// id) and checks the snapped cost is at most `2 alpha` times the original.
pub fn snap_centers_to_points<T: Scalar>(
    inst: &Instance<T>,
    mapping: &[usize],
) -> Result<SnapOutcome<T>> {
    check_length(inst.n(), mapping.len())?;
    if let Some(&c) = mapping.iter().find(|&&c| c >= inst.metric_size()) {
        return Err(Error::IndexOutOfRange(c));
    }
    let mut snapped_of = BTreeMap::new();
    let targets: Vec<usize> = mapping
        .iter()
        .map(|&c| {
            *snapped_of.entry(c).or_insert_with(|| {
                inst.points()
                    .fold(None::<usize>, |best, y| match best {
                        Some(b) if inst.d(b, c) <= inst.d(y, c) => Some(b),
                        _ => Some(y),
                    })
                    .expect("instance has at least one point")
            })
        })
        .collect();
    let original_cost = sum(mapping.iter().enumerate().map(|(x, &c)| inst.d(x, c)));
    let snapped_cost = sum(targets.iter().enumerate().map(|(x, &c)| inst.d(x, c)));
    let bound = T::from_usize(2) * inst.alpha() * original_cost;
    if !snapped_cost.approx_le(bound) {
        return Err(Error::GuaranteeViolated {
            guarantee: "center snapping 2*alpha bound",
            observed: snapped_cost.to_f64(),
            bound: bound.to_f64(),
        });
    }
    Ok(SnapOutcome {
        assignment: MultiAssignment::single(&targets),
        original_cost,
        snapped_cost,
    })
}
