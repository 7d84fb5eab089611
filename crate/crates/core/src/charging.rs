//! Trace logs of the reassignment algorithms and the charging audit that
//! classifies every connection they pay for.
//!
//! A connection `(y, c)` created by a swap is bounded through the freed point
//! `x_y` and the center `d_y` it shared with `y`:
//! `d(y,c) <= α²(d(y,d_y) + d(d_y,x_y)) + α d(x_y,c)`.
//! Type 0 tuples are final connections not created that way, Type 1 tuples are
//! `(x_y, c)` and Type 2 tuples are `(y, d_y)` and `(x_y, d_y)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cost::MultiAssignment;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    BeginCenter {
        center: usize,
    },
    /// `x` leaves `center`; every point of `added` joins it (also keeping `d`).
    Swap {
        center: usize,
        d: usize,
        x: usize,
        added: Vec<usize>,
        amount: f64,
    },
    /// `center` is closed while `processing` is the current center.
    /// `free_points` is the size of the replacement pool that was too small.
    Close {
        center: usize,
        processing: usize,
        free_points: usize,
    },
    Reconnect {
        point: usize,
        center: usize,
    },
    /// An `eps` amount raised to one after the point's unit center closed.
    Raise {
        point: usize,
        center: usize,
    },
    /// Points of a closed center moved wholesale to the current center.
    Absorb {
        center: usize,
        d: usize,
        x: usize,
        points: Vec<usize>,
        released_x: bool,
    },
}

/// One connection `(y, c)` created by a swap, with the `x_y` and `d_y` it is
/// charged to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NewConnection {
    pub y: usize,
    pub c: usize,
    pub d: usize,
    pub x: usize,
}

/// Outcome of classifying every charged tuple.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ChargingAudit {
    /// Per-type occurrence limit that was checked.
    pub limit: usize,
    pub type0: usize,
    pub type1: usize,
    pub type2: usize,
    pub max_type1: usize,
    pub max_type2: usize,
    /// Tuples exceeding `limit` occurrences as Type 1 or Type 2.
    pub over_limit: Vec<(usize, usize)>,
    /// Tuples that are Type 0, 1 and 2 at once (checked only when requested).
    pub in_all_types: Vec<(usize, usize)>,
    /// Charged tuples that were not connections of the original assignment.
    pub not_original: Vec<(usize, usize)>,
}

impl ChargingAudit {
    pub fn passed(&self) -> bool {
        self.over_limit.is_empty() && self.in_all_types.is_empty() && self.not_original.is_empty()
    }
}

/// Classifies the tuples of the final assignment and the created connections.
pub fn classify(
    original: &MultiAssignment,
    final_pairs: impl IntoIterator<Item = (usize, usize)>,
    created: &[NewConnection],
    limit: usize,
    require_disjoint: bool,
) -> ChargingAudit {
    let new_pairs: BTreeSet<(usize, usize)> = created.iter().map(|n| (n.y, n.c)).collect();
    let t0: BTreeSet<(usize, usize)> = final_pairs
        .into_iter()
        .filter(|p| !new_pairs.contains(p))
        .collect();
    let mut t1: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut t2: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for n in created {
        *t1.entry((n.x, n.c)).or_insert(0) += 1;
        *t2.entry((n.y, n.d)).or_insert(0) += 1;
        *t2.entry((n.x, n.d)).or_insert(0) += 1;
    }

    let mut audit = ChargingAudit {
        limit,
        type0: t0.len(),
        type1: t1.len(),
        type2: t2.len(),
        max_type1: t1.values().copied().max().unwrap_or(0),
        max_type2: t2.values().copied().max().unwrap_or(0),
        ..ChargingAudit::default()
    };
    let over: BTreeSet<(usize, usize)> = t1
        .iter()
        .chain(t2.iter())
        .filter(|(_, &count)| count > limit)
        .map(|(&t, _)| t)
        .collect();
    audit.over_limit = over.into_iter().collect();
    if require_disjoint {
        audit.in_all_types = t0
            .iter()
            .filter(|t| t1.contains_key(t) && t2.contains_key(t))
            .copied()
            .collect();
    }
    let charged: BTreeSet<(usize, usize)> = t0
        .iter()
        .copied()
        .chain(t1.keys().copied())
        .chain(t2.keys().copied())
        .collect();
    audit.not_original = charged
        .into_iter()
        .filter(|&(z, f)| z >= original.len() || !original.contains(z, f))
        .collect();
    audit
}

/// Everything a reassignment run reports besides its solution.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TraceLog {
    pub events: Vec<TraceEvent>,
    pub created: Vec<NewConnection>,
    /// Number of times the closing branch fired.
    pub closures: usize,
    pub charging: ChargingAudit,
    /// Invariant checks that failed during the run; empty on a clean run.
    pub invariant_violations: Vec<String>,
}

impl TraceLog {
    pub fn passed(&self) -> bool {
        self.invariant_violations.is_empty() && self.charging.passed()
    }

    pub(crate) fn violation(&mut self, msg: String) {
        self.invariant_violations.push(msg);
    }
}
