//! Clustering instances: a finite metric over `P ∪ F`, the candidate centers,
//! the center budget `k` and the lower bounds.
//!
//! Points always occupy metric indices `0..n`. Candidate centers are an
//! arbitrary subset of the metric's index range and default to the points.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Triple checks are exhaustive up to this many metric locations.
pub const EXHAUSTIVE_TRIPLE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind<T> {
    /// Symmetric nonnegative matrix over all locations.
    ExplicitMatrix(Vec<Vec<T>>),
    /// Points on the real line, `d(x, y) = |x - y|`.
    LineAbsolute(Vec<T>),
    /// Points in `R^d`, `d(x, y) = ||x - y||^2`.
    EuclideanSquared(Vec<Vec<T>>),
}

impl<T> MetricKind<T> {
    pub fn len(&self) -> usize {
        match self {
            MetricKind::ExplicitMatrix(m) => m.len(),
            MetricKind::LineAbsolute(c) => c.len(),
            MetricKind::EuclideanSquared(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::ExplicitMatrix(_) => "matrix",
            MetricKind::LineAbsolute(_) => "line",
            MetricKind::EuclideanSquared(_) => "sqeuclidean",
        }
    }
}

/// A distance function together with its relaxation constant `alpha`:
/// `d(x, y) <= alpha * (d(x, z) + d(z, y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricDescriptor<T> {
    pub kind: MetricKind<T>,
    pub alpha: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerBounds {
    Uniform(usize),
    NonUniform(BTreeMap<usize, usize>),
}

impl LowerBounds {
    pub fn is_uniform(&self) -> bool {
        matches!(self, LowerBounds::Uniform(_))
    }
}

/// A validated clustering instance. Immutable once built.
#[derive(Debug, Clone)]
pub struct Instance<T> {
    n: usize,
    centers: Vec<usize>,
    metric: MetricDescriptor<T>,
    k: usize,
    bounds: LowerBounds,
    // Row-major distance table over all metric locations.
    table: Vec<T>,
    size: usize,
}

/// Collects the pieces of an [`Instance`] and validates them in [`InstanceBuilder::build`].
#[derive(Debug, Clone)]
pub struct InstanceBuilder<T> {
    kind: MetricKind<T>,
    k: usize,
    bounds: LowerBounds,
    alpha: Option<T>,
    num_points: Option<usize>,
    centers: Option<Vec<usize>>,
}

impl<T: Scalar> InstanceBuilder<T> {
    pub fn new(kind: MetricKind<T>, k: usize, bounds: LowerBounds) -> Self {
        InstanceBuilder {
            kind,
            k,
            bounds,
            alpha: None,
            num_points: None,
            centers: None,
        }
    }

    /// Overrides the relaxation constant. Only meaningful for explicit matrices;
    /// the validator then checks the relaxed triangle inequality.
    pub fn alpha(mut self, alpha: T) -> Self {
        self.alpha = Some(alpha);
        self
    }

    /// Only the first `n` metric locations are points; the rest are extra
    /// center locations.
    pub fn num_points(mut self, n: usize) -> Self {
        self.num_points = Some(n);
        self
    }

    pub fn centers(mut self, centers: Vec<usize>) -> Self {
        self.centers = Some(centers);
        self
    }

    pub fn build(self) -> Result<Instance<T>> {
        let size = self.kind.len();
        if size == 0 {
            return Err(Error::EmptyInstance);
        }
        let n = self.num_points.unwrap_or(size);
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        if n > size {
            return Err(Error::DimensionMismatch(format!(
                "{n} points requested but the metric has {size} locations"
            )));
        }
        let table = distance_table(&self.kind)?;

        let default_alpha = match self.kind {
            MetricKind::EuclideanSquared(_) => T::from_usize(2),
            _ => T::one(),
        };
        let alpha = match (&self.kind, self.alpha) {
            (MetricKind::ExplicitMatrix(_), Some(a)) => a,
            (_, Some(a)) if a >= default_alpha => a,
            (_, Some(a)) => return Err(Error::InvalidAlpha(a.to_f64())),
            (_, None) => default_alpha,
        };
        if alpha < T::one() {
            return Err(Error::InvalidAlpha(alpha.to_f64()));
        }

        let mut centers = self.centers.unwrap_or_else(|| (0..n).collect());
        centers.sort_unstable();
        centers.dedup();
        if centers.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if let Some(&c) = centers.iter().find(|&&c| c >= size) {
            return Err(Error::IndexOutOfRange(c));
        }
        if self.k == 0 || self.k > centers.len() {
            return Err(Error::KOutOfRange {
                k: self.k,
                max: centers.len(),
            });
        }
        validate_bounds(&self.bounds, &centers, n)?;

        let inst = Instance {
            n,
            centers,
            metric: MetricDescriptor {
                kind: self.kind,
                alpha,
            },
            k: self.k,
            bounds: self.bounds,
            table,
            size,
        };
        if matches!(inst.metric.kind, MetricKind::ExplicitMatrix(_)) {
            inst.check_relaxed_triangle(0x5eed)?;
        }
        Ok(inst)
    }
}

fn validate_bounds(bounds: &LowerBounds, centers: &[usize], n: usize) -> Result<()> {
    match bounds {
        LowerBounds::Uniform(b) => {
            if *b == 0 {
                return Err(Error::ZeroBound(centers[0]));
            }
            if *b > n {
                return Err(Error::BoundExceedsN {
                    center: centers[0],
                    bound: *b,
                    n,
                });
            }
        }
        LowerBounds::NonUniform(map) => {
            for &c in centers {
                let b = *map.get(&c).ok_or(Error::MissingBound(c))?;
                if b == 0 {
                    return Err(Error::ZeroBound(c));
                }
                if b > n {
                    return Err(Error::BoundExceedsN {
                        center: c,
                        bound: b,
                        n,
                    });
                }
            }
            if let Some(&c) = map.keys().find(|c| centers.binary_search(c).is_err()) {
                return Err(Error::IndexOutOfRange(c));
            }
        }
    }
    Ok(())
}

fn distance_table<T: Scalar>(kind: &MetricKind<T>) -> Result<Vec<T>> {
    let size = kind.len();
    let mut table = vec![T::zero(); size * size];
    match kind {
        MetricKind::ExplicitMatrix(m) => {
            for (i, row) in m.iter().enumerate() {
                if row.len() != size {
                    return Err(Error::DimensionMismatch(format!(
                        "row {i} has {} entries, expected {size}",
                        row.len()
                    )));
                }
            }
            for i in 0..size {
                if m[i][i] != T::zero() {
                    return Err(Error::NonzeroDiagonal(i));
                }
                for j in 0..size {
                    if m[i][j] < T::zero() {
                        return Err(Error::NegativeDistance(i, j));
                    }
                    if m[i][j] != m[j][i] {
                        return Err(Error::NonSymmetricMatrix(i, j));
                    }
                    table[i * size + j] = m[i][j];
                }
            }
        }
        MetricKind::LineAbsolute(coords) => {
            for i in 0..size {
                for j in 0..size {
                    table[i * size + j] = (coords[i] - coords[j]).abs();
                }
            }
        }
        MetricKind::EuclideanSquared(pts) => {
            let dim = pts[0].len();
            if let Some((i, p)) = pts.iter().enumerate().find(|(_, p)| p.len() != dim) {
                return Err(Error::DimensionMismatch(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            for i in 0..size {
                for j in 0..size {
                    table[i * size + j] = pts[i]
                        .iter()
                        .zip(&pts[j])
                        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
                }
            }
        }
    }
    Ok(table)
}

impl<T: Scalar> Instance<T> {
    /// Points on a line, every point a candidate center.
    pub fn line(coords: Vec<T>, k: usize, bounds: LowerBounds) -> Result<Self> {
        InstanceBuilder::new(MetricKind::LineAbsolute(coords), k, bounds).build()
    }

    /// Points in `R^d` under squared Euclidean distance (`alpha = 2`).
    pub fn sq_euclidean(points: Vec<Vec<T>>, k: usize, bounds: LowerBounds) -> Result<Self> {
        InstanceBuilder::new(MetricKind::EuclideanSquared(points), k, bounds).build()
    }

    pub fn matrix(matrix: Vec<Vec<T>>, k: usize, bounds: LowerBounds) -> Result<Self> {
        InstanceBuilder::new(MetricKind::ExplicitMatrix(matrix), k, bounds).build()
    }

    /// Number of points `|P|`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    /// Candidate centers `F`, sorted ascending.
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> T {
        self.metric.alpha
    }

    pub fn metric(&self) -> &MetricDescriptor<T> {
        &self.metric
    }

    pub fn bounds(&self) -> &LowerBounds {
        &self.bounds
    }

    /// Number of metric locations (`|P ∪ F|` as indexed).
    pub fn metric_size(&self) -> usize {
        self.size
    }

    pub fn is_candidate(&self, c: usize) -> bool {
        self.centers.binary_search(&c).is_ok()
    }

    /// Lower bound `B(c)`. Centers outside `F` report the uniform bound, or
    /// `usize::MAX` for non-uniform bounds so they can never be feasibly opened.
    pub fn bound(&self, c: usize) -> usize {
        match &self.bounds {
            LowerBounds::Uniform(b) => *b,
            LowerBounds::NonUniform(map) => map.get(&c).copied().unwrap_or(usize::MAX),
        }
    }

    /// Checked distance between two metric locations.
    pub fn distance(&self, x: usize, y: usize) -> Result<T> {
        if x >= self.size {
            return Err(Error::IndexOutOfRange(x));
        }
        if y >= self.size {
            return Err(Error::IndexOutOfRange(y));
        }
        Ok(self.d(x, y))
    }

    /// Unchecked distance; indices must be below [`Instance::metric_size`].
    #[inline]
    pub fn d(&self, x: usize, y: usize) -> T {
        self.table[x * self.size + y]
    }

    /// Verifies `d(x,y) <= alpha (d(x,z) + d(z,y))`, exhaustively for small
    /// metrics and on `10 * size^2` seeded random triples otherwise.
    pub fn check_relaxed_triangle(&self, seed: u64) -> Result<()> {
        let size = self.size;
        let alpha = self.metric.alpha;
        let check = |x: usize, y: usize, z: usize| -> Result<()> {
            let rhs = alpha * (self.d(x, z) + self.d(z, y));
            if self.d(x, y).approx_le(rhs) {
                Ok(())
            } else {
                Err(Error::RelaxedTriangleViolated {
                    x,
                    y,
                    z,
                    alpha: alpha.to_f64(),
                })
            }
        };
        if size <= EXHAUSTIVE_TRIPLE_LIMIT {
            for x in 0..size {
                for y in x + 1..size {
                    for z in 0..size {
                        check(x, y, z)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..10 * size * size {
                let (x, y, z) = (
                    rng.gen_range(0..size),
                    rng.gen_range(0..size),
                    rng.gen_range(0..size),
                );
                check(x, y, z)?;
            }
        }
        Ok(())
    }

    /// Points sorted by `(d(p, c), p)`.
    pub fn points_by_distance(&self, c: usize) -> Vec<usize> {
        let mut pts: Vec<usize> = self.points().collect();
        pts.sort_by(|&a, &b| {
            self.d(a, c)
                .partial_cmp(&self.d(b, c))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        pts
    }

    /// Same instance with a different center budget.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.centers.len() {
            return Err(Error::KOutOfRange {
                k,
                max: self.centers.len(),
            });
        }
        let mut out = self.clone();
        out.k = k;
        Ok(out)
    }
}
