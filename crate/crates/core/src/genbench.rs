//! Seeded instance and solution generators, and the benchmark harness.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bicriteria::{bicriteria_factor, to_bicriteria};
use crate::cost::{cost_fractional, cost_multi, MultiAssignment, Solution, SolutionKind};
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceBuilder, LowerBounds, MetricKind};
use crate::io::InstanceFile;
use crate::nesting::solve_lb_via_nesting;
use crate::oracle::{brute_force_opt, OracleLimits, OracleMode};
use crate::reduce2::reduce_to_two;
use crate::reduce_eps::{eps_factor, reduce_to_one_plus_eps};
use crate::scalar::Scalar;
use crate::subsolver::{nearest, LocalSearchConfig};
use crate::weaklb::run_weak_pipeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Integer coordinates in `[0, 100 n]`.
    Line,
    /// Points in `[0, 1]^d` on a grid of step 1/1000, squared distances.
    SqEuclidean(usize),
    /// Shortest-path closure of a random connected graph with integer weights.
    RandomMetric,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Line => "line",
            Family::SqEuclidean(_) => "sqeuclidean",
            Family::RandomMetric => "random-metric",
        }
    }

    pub fn parse(name: &str, dim: usize) -> Result<Self> {
        match name {
            "line" => Ok(Family::Line),
            "sqeuclidean" => Ok(Family::SqEuclidean(dim)),
            "random-metric" | "matrix" => Ok(Family::RandomMetric),
            other => Err(Error::BadParams(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsSpec {
    Uniform(usize),
    /// Each candidate center draws its bound uniformly from `lo..=hi`.
    Range(usize, usize),
}

const MAX_EDGE_WEIGHT: u64 = 20;

fn random_metric<T: Scalar>(
    family: Family,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<MetricKind<T>> {
    Ok(match family {
        Family::Line => {
            let hi = 100 * size;
            MetricKind::LineAbsolute(
                (0..size)
                    .map(|_| T::from_usize(rng.gen_range(0..=hi)))
                    .collect(),
            )
        }
        Family::SqEuclidean(dim) => {
            if dim == 0 {
                return Err(Error::BadParams("dimension must be positive".into()));
            }
            MetricKind::EuclideanSquared(
                (0..size)
                    .map(|_| {
                        (0..dim)
                            .map(|_| T::from_ratio(rng.gen_range(0..=1000), 1000))
                            .collect()
                    })
                    .collect(),
            )
        }
        Family::RandomMetric => {
            let inf = u64::MAX / 4;
            let mut d = vec![vec![inf; size]; size];
            for (i, row) in d.iter_mut().enumerate() {
                row[i] = 0;
            }
            let connect = |d: &mut Vec<Vec<u64>>, a: usize, b: usize, w: u64| {
                if a != b && w < d[a][b] {
                    d[a][b] = w;
                    d[b][a] = w;
                }
            };
            for i in 1..size {
                let j = rng.gen_range(0..i);
                let w = rng.gen_range(1..=MAX_EDGE_WEIGHT);
                connect(&mut d, i, j, w);
            }
            for _ in 0..size {
                let (a, b) = (rng.gen_range(0..size), rng.gen_range(0..size));
                let w = rng.gen_range(1..=MAX_EDGE_WEIGHT);
                connect(&mut d, a, b, w);
            }
            for m in 0..size {
                for i in 0..size {
                    for j in 0..size {
                        let via = d[i][m] + d[m][j];
                        if via < d[i][j] {
                            d[i][j] = via;
                        }
                    }
                }
            }
            MetricKind::ExplicitMatrix(
                d.into_iter()
                    .map(|row| row.into_iter().map(|v| T::from_usize(v as usize)).collect())
                    .collect(),
            )
        }
    })
}

fn random_bounds(
    spec: BoundsSpec,
    centers: &[usize],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<LowerBounds> {
    match spec {
        BoundsSpec::Uniform(b) if b >= 1 && b <= n => Ok(LowerBounds::Uniform(b)),
        BoundsSpec::Range(lo, hi) if lo >= 1 && lo <= hi && hi <= n => Ok(LowerBounds::NonUniform(
            centers
                .iter()
                .map(|&c| (c, rng.gen_range(lo..=hi)))
                .collect(),
        )),
        other => Err(Error::BadParams(format!(
            "bounds {other:?} invalid for n = {n}"
        ))),
    }
}

fn check_sizes(n: usize, k: usize, centers: usize) -> Result<()> {
    if n == 0 || k == 0 || k > centers {
        return Err(Error::BadParams(format!(
            "n = {n}, k = {k} with {centers} candidate centers"
        )));
    }
    Ok(())
}

/// Instance whose points are also its candidate centers.
pub fn generate_instance<T: Scalar>(
    family: Family,
    n: usize,
    k: usize,
    bounds: BoundsSpec,
    seed: u64,
) -> Result<Instance<T>> {
    check_sizes(n, k, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = random_metric(family, n, &mut rng)?;
    let centers: Vec<usize> = (0..n).collect();
    let bounds = random_bounds(bounds, &centers, n, &mut rng)?;
    InstanceBuilder::new(kind, k, bounds).build()
}

/// Instance with `n` points and `extra` further locations that are the only
/// candidate centers.
pub fn generate_with_external_centers<T: Scalar>(
    family: Family,
    n: usize,
    extra: usize,
    k: usize,
    bounds: BoundsSpec,
    seed: u64,
) -> Result<Instance<T>> {
    check_sizes(n, k, extra)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = random_metric(family, n + extra, &mut rng)?;
    let centers: Vec<usize> = (n..n + extra).collect();
    let bounds = random_bounds(bounds, &centers, n, &mut rng)?;
    InstanceBuilder::new(kind, k, bounds)
        .num_points(n)
        .centers(centers)
        .build()
}

fn pick_centers<T: Scalar>(inst: &Instance<T>, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut c = inst.centers().to_vec();
    c.shuffle(rng);
    c.truncate(count.clamp(1, inst.centers().len()));
    c.sort_unstable();
    c
}

/// Points ordered either by distance to `c` or at random.
fn candidate_order<T: Scalar>(inst: &Instance<T>, c: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if rng.gen_bool(0.5) {
        inst.points_by_distance(c)
    } else {
        let mut pts: Vec<usize> = inst.points().collect();
        pts.shuffle(rng);
        pts
    }
}

/// A weak-lower-bound feasible solution with between 1 and `k` centers,
/// random overlaps and some points connected to three or more centers.
pub fn random_weak_solution<T: Scalar>(inst: &Instance<T>, rng: &mut ChaCha8Rng) -> Solution<T> {
    let m = rng.gen_range(inst.k().div_ceil(2)..=inst.k());
    let centers = pick_centers(inst, m, rng);
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); inst.n()];
    for &c in &centers {
        let order = candidate_order(inst, c, rng);
        for &p in order.iter().take(inst.bound(c)) {
            sets[p].push(c);
        }
    }
    let extra_rate = rng.gen_range(0.0..0.7);
    for set in sets.iter_mut() {
        if set.is_empty() {
            set.push(*centers.choose(rng).expect("centers nonempty"));
        }
        if rng.gen_bool(extra_rate) {
            for _ in 0..rng.gen_range(1..=2) {
                let c = *centers.choose(rng).expect("centers nonempty");
                if !set.contains(&c) {
                    set.push(c);
                }
            }
        }
    }
    Solution::new(
        centers,
        MultiAssignment::new(sets).expect("distinct centers per point"),
        SolutionKind::WeakLB,
    )
}

/// A 2-weak feasible solution, or `None` when the drawn centers' bounds
/// cannot be met with multiplicity two.
pub fn random_two_weak_solution<T: Scalar>(
    inst: &Instance<T>,
    rng: &mut ChaCha8Rng,
) -> Option<Solution<T>> {
    let m = rng.gen_range(1..=inst.k());
    let centers = pick_centers(inst, m, rng);
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); inst.n()];
    let cover_first = rng.gen_bool(0.5);
    for &c in &centers {
        let mut order = candidate_order(inst, c, rng);
        if cover_first {
            order.sort_by_key(|&p| sets[p].len());
        }
        let chosen: Vec<usize> = order
            .into_iter()
            .filter(|&p| sets[p].len() < 2)
            .take(inst.bound(c))
            .collect();
        if chosen.len() < inst.bound(c) {
            return None;
        }
        for p in chosen {
            sets[p].push(c);
        }
    }
    for set in sets.iter_mut().filter(|s| s.is_empty()) {
        set.push(*centers.choose(rng).expect("centers nonempty"));
    }
    Some(Solution::new(
        centers,
        MultiAssignment::new(sets).expect("distinct centers per point"),
        SolutionKind::BWeak(2),
    ))
}

/// Single assignment over `count` random centers; each point goes to its
/// nearest center or, with probability `noise`, to a random one. Centers
/// that end up empty are dropped.
pub fn random_single_solution<T: Scalar>(
    inst: &Instance<T>,
    count: usize,
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> Solution<T> {
    let centers = pick_centers(inst, count, rng);
    let targets: Vec<usize> = inst
        .points()
        .map(|p| {
            if rng.gen_bool(noise) {
                *centers.choose(rng).expect("centers nonempty")
            } else {
                nearest(inst, p, &centers)
            }
        })
        .collect();
    Solution::from_targets(&targets, SolutionKind::Unconstrained)
}

// ---------------------------------------------------------------------------
// Benchmark harness

fn default_restarts() -> usize {
    5
}
fn default_eps() -> Vec<f64> {
    vec![0.25, 0.5]
}
fn default_beta() -> Vec<f64> {
    vec![0.5, 0.75]
}
fn default_true() -> bool {
    true
}
fn default_dim() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub family: String,
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub n: usize,
    pub k: usize,
    pub bounds: BoundsSpec,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedInstance {
    pub name: String,
    pub instance: InstanceFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: Vec<f64>,
    /// Compute exact optima for instances inside the oracle guardrails.
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default)]
    pub corpora: Vec<CorpusSpec>,
    #[serde(default)]
    pub instances: Vec<NamedInstance>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violated,
    Error,
}

/// One instance × algorithm line of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub schema: u32,
    pub instance: String,
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub algorithm: String,
    pub param: Option<f64>,
    pub cost: Option<f64>,
    /// Cost the ratio is taken against.
    pub reference: Option<f64>,
    pub ratio: Option<f64>,
    /// Asserted upper bound on `ratio`, if any.
    pub bound: Option<f64>,
    /// Outcome of the charging audit, for the reassignment algorithms.
    pub audit: Option<bool>,
    pub status: Status,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn violations(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status != Status::Ok)
            .count()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Per algorithm and parameter: count, max and mean ratio, the bound and
    /// the number of failing records.
    pub fn summary_table(&self) -> String {
        #[derive(Default)]
        struct Row {
            count: usize,
            ratios: Vec<f64>,
            bound: Option<f64>,
            failed: usize,
            audit_failed: usize,
        }
        let mut rows: BTreeMap<(String, String), Row> = BTreeMap::new();
        for r in &self.records {
            let key = (
                r.algorithm.clone(),
                r.param.map_or("-".into(), |p| format!("{p}")),
            );
            let row = rows.entry(key).or_default();
            row.count += 1;
            row.ratios.extend(r.ratio);
            row.bound = match (row.bound, r.bound) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            row.failed += usize::from(r.status != Status::Ok);
            row.audit_failed += usize::from(r.audit == Some(false));
        }
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:>6} {:>6} {:>10} {:>10} {:>10} {:>7} {:>7}",
            "algorithm", "param", "count", "max", "mean", "bound", "failed", "audit"
        );
        for ((alg, param), row) in rows {
            let max = row.ratios.iter().copied().reduce(f64::max);
            let mean = (!row.ratios.is_empty())
                .then(|| row.ratios.iter().sum::<f64>() / row.ratios.len() as f64);
            let _ = writeln!(
                out,
                "{:<16} {:>6} {:>6} {:>10} {:>10} {:>10} {:>7} {:>7}",
                alg,
                param,
                row.count,
                fmt(max),
                fmt(mean),
                fmt(row.bound),
                row.failed,
                row.audit_failed
            );
        }
        out
    }
}

/// Seed of instance `index` in corpus `corpus` of a benchmark run.
pub fn derive_seed(base: u64, corpus: usize, index: usize) -> u64 {
    let mut z = base ^ ((corpus as u64) << 32) ^ index as u64;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Job {
    name: String,
    family: String,
    seed: u64,
    instance: Result<Instance<f64>>,
}

fn ratio(cost: f64, reference: f64) -> Option<f64> {
    if reference > 0.0 {
        Some(cost / reference)
    } else if cost.approx_le(0.0) {
        Some(1.0)
    } else {
        None
    }
}

struct Recorder<'a> {
    job: &'a Job,
    n: usize,
    k: usize,
    records: Vec<Record>,
}

impl Recorder<'_> {
    fn push(
        &mut self,
        algorithm: &str,
        param: Option<f64>,
        cost: Option<f64>,
        reference: Option<f64>,
        bound: Option<f64>,
        extra_ok: bool,
        audit: Option<bool>,
    ) {
        let ratio = match (cost, reference) {
            (Some(c), Some(r)) => ratio(c, r),
            _ => None,
        };
        let within = match (cost, reference, bound) {
            (Some(c), Some(r), Some(b)) => c.approx_le(b * r),
            _ => true,
        };
        self.records.push(Record {
            schema: 1,
            instance: self.job.name.clone(),
            family: self.job.family.clone(),
            n: self.n,
            k: self.k,
            algorithm: algorithm.into(),
            param,
            cost,
            reference,
            ratio,
            bound,
            audit,
            status: if within && extra_ok {
                Status::Ok
            } else {
                Status::Violated
            },
            error: None,
        });
    }

    fn error(&mut self, algorithm: &str, param: Option<f64>, err: &Error) {
        let status = match err {
            Error::GuaranteeViolated { .. } => Status::Violated,
            _ => Status::Error,
        };
        self.records.push(Record {
            schema: 1,
            instance: self.job.name.clone(),
            family: self.job.family.clone(),
            n: self.n,
            k: self.k,
            algorithm: algorithm.into(),
            param,
            cost: None,
            reference: None,
            ratio: None,
            bound: None,
            audit: None,
            status,
            error: Some(err.to_string()),
        });
    }
}

fn run_job(job: &Job, config: &BenchConfig) -> Vec<Record> {
    let inst = match &job.instance {
        Ok(inst) => inst,
        Err(e) => {
            let mut rec = Recorder {
                job,
                n: 0,
                k: 0,
                records: Vec::new(),
            };
            rec.error("generate", None, e);
            return rec.records;
        }
    };
    let mut rec = Recorder {
        job,
        n: inst.n(),
        k: inst.k(),
        records: Vec::new(),
    };
    let alpha = inst.alpha();
    let ls = LocalSearchConfig {
        restarts: config.restarts,
        seed: job.seed,
        max_iters: None,
    };

    let opt = |mode: OracleMode<f64>| -> Option<f64> {
        if !config.oracle {
            return None;
        }
        brute_force_opt(inst, &mode, &OracleLimits::default())
            .ok()
            .map(|r| r.cost)
    };
    let opt_plain = opt(OracleMode::Unconstrained);
    let opt_weak = opt(OracleMode::WeakLB);
    let opt_two = opt(OracleMode::BWeak(2));
    let opt_lb = opt(OracleMode::StandardLB);
    for (name, value) in [
        ("opt-plain", opt_plain),
        ("opt-weak", opt_weak),
        ("opt-2weak", opt_two),
        ("opt-lb", opt_lb),
    ] {
        if value.is_some() {
            rec.push(name, None, value, None, None, true, None);
        }
    }

    let weak = match run_weak_pipeline(inst, &ls) {
        Ok(w) => w,
        Err(e) => {
            rec.error("weak", None, &e);
            return rec.records;
        }
    };
    rec.push(
        "weak",
        None,
        Some(weak.cost),
        Some(weak.subsolution_cost),
        Some(1.0),
        true,
        None,
    );
    if let Some(o) = opt_weak {
        rec.push(
            "weak-vs-opt",
            None,
            Some(weak.cost),
            Some(o),
            None,
            true,
            None,
        );
    }

    let two = match reduce_to_two(inst, &weak.solution) {
        Ok((sol, trace)) => {
            let cost = cost_multi(inst, &sol).unwrap_or(f64::NAN);
            rec.push(
                "reduce2",
                None,
                Some(cost),
                Some(weak.cost),
                Some(alpha * (alpha + 1.0)),
                trace.passed(),
                Some(trace.charging.passed()),
            );
            Some((sol, cost))
        }
        Err(e) => {
            rec.error("reduce2", None, &e);
            None
        }
    };

    for &eps in &config.eps {
        match reduce_to_one_plus_eps(inst, &weak.solution, eps) {
            Ok((sol, trace)) => {
                let cost = cost_fractional(inst, &sol).unwrap_or(f64::NAN);
                rec.push(
                    "reduce-eps",
                    Some(eps),
                    Some(cost),
                    Some(weak.cost),
                    Some(eps_factor(alpha, eps)),
                    trace.invariant_violations.is_empty(),
                    Some(trace.charging.passed()),
                );
            }
            Err(e) => rec.error("reduce-eps", Some(eps), &e),
        }
    }

    if let Some((two_sol, two_cost)) = &two {
        for &beta in &config.beta {
            match to_bicriteria(inst, two_sol, beta) {
                Ok(out) => {
                    let cost = cost_multi(inst, &out.solution).unwrap_or(f64::NAN);
                    rec.push(
                        "bicriteria",
                        Some(beta),
                        Some(cost),
                        Some(*two_cost),
                        Some(bicriteria_factor(alpha, beta)),
                        true,
                        None,
                    );
                }
                Err(e) => rec.error("bicriteria", Some(beta), &e),
            }
        }
    }

    match solve_lb_via_nesting(inst, job.seed) {
        Ok(sol) => {
            let cost = cost_multi(inst, &sol).unwrap_or(f64::NAN);
            rec.push("nesting", None, Some(cost), opt_lb, None, true, None);
        }
        Err(e) => rec.error("nesting", None, &e),
    }
    rec.records
}

/// Runs every configured instance through the full pipeline. Instances are
/// processed in parallel; record order follows the config.
pub fn run_benchmark(config: &BenchConfig) -> Result<Report> {
    let mut jobs = Vec::new();
    for (i, named) in config.instances.iter().enumerate() {
        jobs.push(Job {
            name: named.name.clone(),
            family: named.instance.metric.clone(),
            seed: derive_seed(config.seed, usize::MAX >> 32, i),
            instance: named.instance.build(),
        });
    }
    for (ci, corpus) in config.corpora.iter().enumerate() {
        let family = Family::parse(&corpus.family, corpus.dim)?;
        for i in 0..corpus.count {
            let seed = derive_seed(config.seed, ci, i);
            jobs.push(Job {
                name: format!("{}-{ci}-{i}", family.name()),
                family: family.name().into(),
                seed,
                instance: generate_instance(family, corpus.n, corpus.k, corpus.bounds, seed),
            });
        }
    }
    for &eps in &config.eps {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::EpsOutOfRange(eps));
        }
    }
    for &beta in &config.beta {
        if !(0.5..1.0).contains(&beta) {
            return Err(Error::BetaOutOfRange(beta));
        }
    }
    let per_job: Vec<Vec<Record>> = jobs.par_iter().map(|job| run_job(job, config)).collect();
    Ok(Report {
        records: per_job.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::check_feasibility;

    #[test]
    fn generation_is_deterministic() {
        for family in [Family::Line, Family::SqEuclidean(3), Family::RandomMetric] {
            let a: Instance<f64> =
                generate_instance(family, 9, 2, BoundsSpec::Range(1, 4), 7).unwrap();
            let b: Instance<f64> =
                generate_instance(family, 9, 2, BoundsSpec::Range(1, 4), 7).unwrap();
            assert_eq!(a.metric(), b.metric());
            assert_eq!(a.bounds(), b.bounds());
        }
    }

    #[test]
    fn random_metric_is_a_metric() {
        for seed in 0..20 {
            let inst: Instance<f64> =
                generate_instance(Family::RandomMetric, 20, 3, BoundsSpec::Uniform(2), seed)
                    .unwrap();
            assert_eq!(inst.alpha(), 1.0);
            inst.check_relaxed_triangle(seed).unwrap();
        }
    }

    #[test]
    fn sq_euclidean_relaxed_triangle() {
        let inst: Instance<f64> =
            generate_instance(Family::SqEuclidean(2), 30, 3, BoundsSpec::Uniform(2), 3).unwrap();
        assert_eq!(inst.alpha(), 2.0);
        inst.check_relaxed_triangle(11).unwrap();
    }

    #[test]
    fn line_coordinates_in_range() {
        let inst: Instance<f64> =
            generate_instance(Family::Line, 10, 2, BoundsSpec::Uniform(1), 5).unwrap();
        match &inst.metric().kind {
            MetricKind::LineAbsolute(c) => {
                assert!(c
                    .iter()
                    .all(|&x| (0.0..=1000.0).contains(&x) && x.fract() == 0.0))
            }
            _ => panic!("expected a line"),
        }
    }

    #[test]
    fn bad_params() {
        let bad = [
            generate_instance::<f64>(Family::Line, 0, 1, BoundsSpec::Uniform(1), 0),
            generate_instance::<f64>(Family::Line, 4, 5, BoundsSpec::Uniform(1), 0),
            generate_instance::<f64>(Family::Line, 4, 1, BoundsSpec::Uniform(5), 0),
            generate_instance::<f64>(Family::Line, 4, 1, BoundsSpec::Range(3, 2), 0),
            generate_instance::<f64>(Family::SqEuclidean(0), 4, 1, BoundsSpec::Uniform(1), 0),
        ];
        for r in bad {
            assert!(matches!(r, Err(Error::BadParams(_))), "{r:?}");
        }
    }

    #[test]
    fn random_solutions_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..30 {
            let inst: Instance<f64> =
                generate_instance(Family::Line, 8, 3, BoundsSpec::Range(1, 4), seed).unwrap();
            let weak = random_weak_solution(&inst, &mut rng);
            assert!(check_feasibility(&inst, &weak).is_feasible());
            if let Some(two) = random_two_weak_solution(&inst, &mut rng) {
                assert!(check_feasibility(&inst, &two).is_feasible());
                assert!(two.assignment.max_multiplicity() <= 2);
            }
        }
    }

    #[test]
    fn external_centers() {
        let inst: Instance<f64> = generate_with_external_centers(
            Family::SqEuclidean(2),
            6,
            4,
            2,
            BoundsSpec::Uniform(2),
            9,
        )
        .unwrap();
        assert_eq!(inst.n(), 6);
        assert_eq!(inst.centers(), &[6, 7, 8, 9]);
    }

    #[test]
    fn empty_config_empty_report() {
        let report = run_benchmark(&BenchConfig::default()).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.violations(), 0);
    }

    #[test]
    fn small_corpus_is_reproducible() {
        let config: BenchConfig = serde_json::from_str(
            r#"{"seed": 3, "corpora": [{"family": "line", "n": 7, "k": 2, "bounds": {"uniform": 2}, "count": 3}]}"#,
        )
        .unwrap();
        let a = run_benchmark(&config).unwrap();
        let b = run_benchmark(&config).unwrap();
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(a.violations(), 0, "{}", a.to_jsonl());
        assert!(a.summary_table().contains("reduce2"));
    }

    #[test]
    fn two_location_gap_in_report() {
        let config: BenchConfig = serde_json::from_str(
            r#"{"instances": [{"name": "two-locations", "instance":
                {"metric": "line", "points": [0,0,0,0,1,1,1,1], "k": 2, "bounds": {"uniform": 5}}}]}"#,
        )
        .unwrap();
        let report = run_benchmark(&config).unwrap();
        let cost = |alg: &str| {
            report
                .records
                .iter()
                .find(|r| r.algorithm == alg)
                .and_then(|r| r.cost)
                .unwrap()
        };
        assert_eq!(cost("opt-lb"), 4.0);
        assert_eq!(cost("opt-weak"), 2.0);
        assert_eq!(report.violations(), 0, "{}", report.to_jsonl());
    }
}
