//! Local search for k-median, optionally with center opening costs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{MultiAssignment, Solution, SolutionKind};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::{max_of, Scalar};

/// Opening cost per candidate center.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterCosts<T> {
    f: BTreeMap<usize, T>,
}

impl<T: Scalar> CenterCosts<T> {
    pub fn from_map(f: BTreeMap<usize, T>) -> Self {
        CenterCosts { f }
    }

    /// Checks nonnegativity and that every candidate center has a cost.
    pub fn validated(inst: &Instance<T>, f: BTreeMap<usize, T>) -> Result<Self> {
        for &c in inst.centers() {
            match f.get(&c) {
                None => return Err(Error::BadParams(format!("no cost for center {c}"))),
                Some(v) if *v < T::zero() => {
                    return Err(Error::BadParams(format!("negative cost for center {c}")))
                }
                _ => {}
            }
        }
        Ok(CenterCosts { f })
    }

    pub fn zero(inst: &Instance<T>) -> Self {
        CenterCosts {
            f: inst.centers().iter().map(|&c| (c, T::zero())).collect(),
        }
    }

    /// Cost of opening `c`; zero for centers without an entry.
    pub fn get(&self, c: usize) -> T {
        self.f.get(&c).copied().unwrap_or_else(T::zero)
    }

    pub fn as_map(&self) -> &BTreeMap<usize, T> {
        &self.f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Improvement steps per restart; `None` means `10 * n * k`.
    pub max_iters: Option<usize>,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig {
            restarts: 5,
            seed: 0,
            max_iters: None,
        }
    }
}

impl LocalSearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        LocalSearchConfig {
            seed,
            ..Self::default()
        }
    }
}

/// Nearest center in `centers` (sorted) for point `p`; ties go to the smallest id.
pub fn nearest<T: Scalar>(inst: &Instance<T>, p: usize, centers: &[usize]) -> usize {
    let mut best = centers[0];
    for &c in &centers[1..] {
        if inst.d(p, c) < inst.d(p, best) {
            best = c;
        }
    }
    best
}

/// `Σ_x min_c d(x, c) + Σ_c f(c)` for a sorted, nonempty center set.
pub fn objective<T: Scalar>(
    inst: &Instance<T>,
    f: Option<&CenterCosts<T>>,
    centers: &[usize],
) -> T {
    let mut total = T::zero();
    for p in inst.points() {
        total = total + inst.d(p, nearest(inst, p, centers));
    }
    if let Some(f) = f {
        for &c in centers {
            total = total + f.get(c);
        }
    }
    total
}

fn improves<T: Scalar>(new: T, current: T) -> bool {
    new < current && current - new > T::plateau_tolerance() * max_of(current.abs(), T::one())
}

/// Best strictly improving move (open, close or swap) from `centers`, if any.
fn best_move<T: Scalar>(
    inst: &Instance<T>,
    f: Option<&CenterCosts<T>>,
    centers: &[usize],
    current: T,
) -> Option<(Vec<usize>, T)> {
    let mut best: Option<(Vec<usize>, T)> = None;
    let mut consider = |cand: Vec<usize>| {
        let value = objective(inst, f, &cand);
        let threshold = best.as_ref().map_or(current, |b| b.1);
        if improves(value, current) && value < threshold {
            best = Some((cand, value));
        }
    };
    let closed: Vec<usize> = inst
        .centers()
        .iter()
        .copied()
        .filter(|c| centers.binary_search(c).is_err())
        .collect();

    if centers.len() < inst.k() {
        for &o in &closed {
            let mut cand = centers.to_vec();
            cand.push(o);
            cand.sort_unstable();
            consider(cand);
        }
    }
    if centers.len() > 1 {
        for i in 0..centers.len() {
            let mut cand = centers.to_vec();
            cand.remove(i);
            consider(cand);
        }
    }
    for i in 0..centers.len() {
        for &o in &closed {
            let mut cand = centers.to_vec();
            cand[i] = o;
            cand.sort_unstable();
            consider(cand);
        }
    }
    best
}

/// `true` when no open, close or swap move improves the objective.
pub fn is_local_optimum<T: Scalar>(
    inst: &Instance<T>,
    f: Option<&CenterCosts<T>>,
    centers: &[usize],
) -> bool {
    let current = objective(inst, f, centers);
    best_move(inst, f, centers, current).is_none()
}

/// Farthest-first seeding over the candidate centers, starting at `start`.
fn farthest_first<T: Scalar>(inst: &Instance<T>, start: usize) -> Vec<usize> {
    let mut chosen = vec![start];
    let mut gap: Vec<T> = inst.centers().iter().map(|&c| inst.d(c, start)).collect();
    while chosen.len() < inst.k() {
        let mut pick = None;
        for (i, &c) in inst.centers().iter().enumerate() {
            if chosen.contains(&c) {
                continue;
            }
            match pick {
                Some(j) if gap[j] >= gap[i] => {}
                _ => pick = Some(i),
            }
        }
        let Some(i) = pick else { break };
        let c = inst.centers()[i];
        chosen.push(c);
        for (j, &o) in inst.centers().iter().enumerate() {
            if inst.d(o, c) < gap[j] {
                gap[j] = inst.d(o, c);
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

fn descend<T: Scalar>(
    inst: &Instance<T>,
    f: Option<&CenterCosts<T>>,
    mut centers: Vec<usize>,
    max_iters: usize,
) -> (Vec<usize>, T) {
    let mut current = objective(inst, f, &centers);
    for _ in 0..max_iters {
        match best_move(inst, f, &centers, current) {
            Some((next, value)) => {
                centers = next;
                current = value;
            }
            None => break,
        }
    }
    (centers, current)
}

/// Multi-restart local search. With `f = None` this is plain k-median.
pub fn local_search<T: Scalar>(
    inst: &Instance<T>,
    f: Option<&CenterCosts<T>>,
    config: &LocalSearchConfig,
) -> Solution<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let max_iters = config.max_iters.unwrap_or(10 * inst.n() * inst.k()).max(1);
    let mut best: Option<(Vec<usize>, T)> = None;
    for _ in 0..config.restarts.max(1) {
        let start = inst.centers()[rng.gen_range(0..inst.centers().len())];
        let (centers, value) = descend(inst, f, farthest_first(inst, start), max_iters);
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((centers, value));
        }
    }
    let (centers, _) = best.expect("at least one restart");
    let targets: Vec<usize> = inst.points().map(|p| nearest(inst, p, &centers)).collect();
    let kind = if f.is_some() {
        SolutionKind::CenterCosts
    } else {
        SolutionKind::Unconstrained
    };
    Solution::new(centers, MultiAssignment::single(&targets), kind).prune_unused()
}

/// Plain k-median local search with the default restart count.
pub fn local_search_kmedian<T: Scalar>(inst: &Instance<T>, seed: u64) -> Solution<T> {
    local_search(inst, None, &LocalSearchConfig::with_seed(seed))
}

/// Local search for `cost^f`, the k-median objective plus opening costs.
pub fn local_search_center_costs<T: Scalar>(
    inst: &Instance<T>,
    f: &CenterCosts<T>,
    seed: u64,
) -> Solution<T> {
    local_search(inst, Some(f), &LocalSearchConfig::with_seed(seed))
}
