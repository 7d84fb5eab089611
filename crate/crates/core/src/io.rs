//! JSON instance and solution files.
//!
//! Instance file:
//! `{"metric": "line"|"sqeuclidean"|"matrix", "points": [...], "matrix": [[...]],
//!   "k": 2, "bounds": {"uniform": 3} | {"per_center": {"0": 2, ...}}, "alpha": 1,
//!   "centers": [...], "num_points": n}`.
//! `centers` and `num_points` are optional; without them every location is a
//! point and a candidate center.
//!
//! Solution file:
//! `{"centers": [...], "assignment": [[c, ...], ...] | [[{"c": id, "amt": x}, ...], ...],
//!   "kind": "weak"|"b-weak"|"lb"|"bicriteria"|"plain"|"center-costs"|"fractional",
//!   "params": {"b": 2, "beta": 0.5, "eps": 0.25}, "cost": x}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cost::{
    FractionalAssignment, FractionalSolution, MultiAssignment, Solution, SolutionKind,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceBuilder, LowerBounds, MetricKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsFile {
    Line(Vec<f64>),
    Vectors(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BoundsFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_center: Option<BTreeMap<String, usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PointsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub k: usize,
    pub bounds: BoundsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_points: Option<usize>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

fn convert<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::from_f64(x)).collect()
}

impl InstanceFile {
    pub fn build<T: Scalar>(&self) -> Result<Instance<T>> {
        let kind = match (self.metric.as_str(), &self.points, &self.matrix) {
            ("line", Some(PointsFile::Line(c)), _) => MetricKind::LineAbsolute(convert(c)),
            ("sqeuclidean", Some(PointsFile::Vectors(p)), _) => {
                MetricKind::EuclideanSquared(p.iter().map(|v| convert(v)).collect())
            }
            ("sqeuclidean", Some(PointsFile::Line(c)), _) => {
                MetricKind::EuclideanSquared(c.iter().map(|&x| vec![T::from_f64(x)]).collect())
            }
            ("matrix", _, Some(m)) => {
                MetricKind::ExplicitMatrix(m.iter().map(|r| convert(r)).collect())
            }
            (other, _, _) => {
                return Err(Error::Parse(format!(
                    "metric {other:?} needs matching \"points\" or \"matrix\""
                )))
            }
        };
        let bounds = match (&self.bounds.uniform, &self.bounds.per_center) {
            (Some(b), None) => LowerBounds::Uniform(*b),
            (None, Some(map)) => LowerBounds::NonUniform(
                map.iter()
                    .map(|(c, &b)| c.parse::<usize>().map(|c| (c, b)).map_err(parse_err))
                    .collect::<Result<_>>()?,
            ),
            _ => {
                return Err(Error::Parse(
                    "bounds need exactly one of uniform, per_center".into(),
                ))
            }
        };
        let mut builder = InstanceBuilder::new(kind, self.k, bounds);
        if let Some(a) = self.alpha {
            builder = builder.alpha(T::from_f64(a));
        }
        if let Some(n) = self.num_points {
            builder = builder.num_points(n);
        }
        if let Some(c) = &self.centers {
            builder = builder.centers(c.clone());
        }
        builder.build()
    }

    pub fn from_instance<T: Scalar>(inst: &Instance<T>) -> Self {
        let f = |v: &[T]| v.iter().map(|x| x.to_f64()).collect::<Vec<f64>>();
        let (metric, points, matrix) = match &inst.metric().kind {
            MetricKind::LineAbsolute(c) => ("line", Some(PointsFile::Line(f(c))), None),
            MetricKind::EuclideanSquared(p) => (
                "sqeuclidean",
                Some(PointsFile::Vectors(p.iter().map(|v| f(v)).collect())),
                None,
            ),
            MetricKind::ExplicitMatrix(m) => {
                ("matrix", None, Some(m.iter().map(|r| f(r)).collect()))
            }
        };
        let bounds = match inst.bounds() {
            LowerBounds::Uniform(b) => BoundsFile {
                uniform: Some(*b),
                per_center: None,
            },
            LowerBounds::NonUniform(map) => BoundsFile {
                uniform: None,
                per_center: Some(map.iter().map(|(c, b)| (c.to_string(), *b)).collect()),
            },
        };
        let all_points = inst.n() == inst.metric_size();
        let default_centers = all_points && inst.centers().len() == inst.n();
        InstanceFile {
            metric: metric.into(),
            points,
            matrix,
            k: inst.k(),
            bounds,
            alpha: Some(inst.alpha().to_f64()),
            centers: (!default_centers).then(|| inst.centers().to_vec()),
            num_points: (!all_points).then(|| inst.n()),
        }
    }
}

pub fn parse_instance<T: Scalar>(text: &str) -> Result<Instance<T>> {
    let file: InstanceFile = serde_json::from_str(text).map_err(parse_err)?;
    file.build()
}

pub fn instance_to_json<T: Scalar>(inst: &Instance<T>) -> Value {
    serde_json::to_value(InstanceFile::from_instance(inst)).expect("instance serializes")
}

/// Either kind of solution a file may hold.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySolution<T> {
    Integral(Solution<T>),
    Fractional(FractionalSolution<T>),
}

fn param(params: &Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse(format!("missing numeric params.{key}")))
}

pub fn parse_solution<T: Scalar>(text: &str) -> Result<AnySolution<T>> {
    let v: Value = serde_json::from_str(text).map_err(parse_err)?;
    let centers: Vec<usize> =
        serde_json::from_value(v.get("centers").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("centers: {e}")))?;
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("weak");
    let params = v.get("params").cloned().unwrap_or_else(|| json!({}));
    let rows = v
        .get("assignment")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("assignment must be an array".into()))?;

    if kind == "fractional" {
        let eps = T::from_f64(param(&params, "eps")?);
        let mut amounts = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse("assignment rows must be arrays".into()))?;
            let mut list = Vec::new();
            for entry in row {
                let c = entry
                    .get("c")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::Parse("fractional entries need \"c\"".into()))?;
                let amt = entry.get("amt").and_then(Value::as_f64).unwrap_or(1.0);
                list.push((c as usize, T::from_f64(amt)));
            }
            amounts.push(list);
        }
        let mut centers = centers;
        centers.sort_unstable();
        centers.dedup();
        return Ok(AnySolution::Fractional(FractionalSolution {
            centers,
            assignment: FractionalAssignment::new(amounts)?,
            eps,
        }));
    }

    let sets: Vec<Vec<usize>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("assignment rows must be arrays".into()))?
                .iter()
                .map(|e| {
                    e.as_u64()
                        .or_else(|| e.get("c").and_then(Value::as_u64))
                        .map(|c| c as usize)
                        .ok_or_else(|| Error::Parse(format!("bad assignment entry {e}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let kind = match kind {
        "weak" => SolutionKind::WeakLB,
        "b-weak" => SolutionKind::BWeak(param(&params, "b").unwrap_or(2.0) as usize),
        "lb" => SolutionKind::StandardLB,
        "bicriteria" => SolutionKind::Bicriteria(T::from_f64(param(&params, "beta")?)),
        "plain" => SolutionKind::Unconstrained,
        "center-costs" => SolutionKind::CenterCosts,
        other => return Err(Error::Parse(format!("unknown solution kind {other:?}"))),
    };
    Ok(AnySolution::Integral(Solution::new(
        centers,
        MultiAssignment::new(sets)?,
        kind,
    )))
}

pub fn solution_to_json<T: Scalar>(sol: &Solution<T>, cost: Option<T>) -> Value {
    let params = match sol.kind {
        SolutionKind::BWeak(b) => json!({ "b": b }),
        SolutionKind::Bicriteria(beta) => json!({ "beta": beta.to_f64() }),
        _ => json!({}),
    };
    let mut v = json!({
        "centers": sol.centers,
        "assignment": sol.assignment.sets(),
        "kind": sol.kind.name(),
        "params": params,
    });
    if let Some(c) = cost {
        v["cost"] = json!(c.to_f64());
    }
    v
}

pub fn fractional_to_json<T: Scalar>(sol: &FractionalSolution<T>, cost: Option<T>) -> Value {
    let rows: Vec<Value> = sol
        .assignment
        .amounts()
        .iter()
        .map(|list| {
            Value::Array(
                list.iter()
                    .map(|&(c, a)| json!({ "c": c, "amt": a.to_f64() }))
                    .collect(),
            )
        })
        .collect();
    let mut v = json!({
        "centers": sol.centers,
        "assignment": rows,
        "kind": "fractional",
        "params": { "eps": sol.eps.to_f64() },
    });
    if let Some(c) = cost {
        v["cost"] = json!(c.to_f64());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn line_instance_round_trip() {
        let text = r#"{"metric":"line","points":[0,0,0,0,1,1,1,1],"k":2,"bounds":{"uniform":5}}"#;
        let inst: Instance<Rational64> = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 8);
        let again: Instance<Rational64> =
            parse_instance(&instance_to_json(&inst).to_string()).unwrap();
        assert_eq!(again.metric(), inst.metric());
        assert_eq!(again.bounds(), inst.bounds());
    }

    #[test]
    fn matrix_with_per_center_bounds() {
        let text = r#"{"metric":"matrix","matrix":[[0,1,2],[1,0,1],[2,1,0]],"k":1,
            "bounds":{"per_center":{"0":1,"1":2,"2":3}}}"#;
        let inst: Instance<f64> = parse_instance(text).unwrap();
        assert_eq!(inst.bound(2), 3);
        assert_eq!(inst.d(0, 2), 2.0);
    }

    #[test]
    fn rejects_mismatched_metric() {
        let text = r#"{"metric":"matrix","points":[1,2],"k":1,"bounds":{"uniform":1}}"#;
        assert!(matches!(parse_instance::<f64>(text), Err(Error::Parse(_))));
    }

    #[test]
    fn solution_round_trips() {
        let sol: Solution<f64> = Solution::new(
            vec![0, 4],
            MultiAssignment::new(vec![vec![0, 4], vec![0], vec![4]]).unwrap(),
            SolutionKind::BWeak(2),
        );
        let text = solution_to_json(&sol, Some(2.0)).to_string();
        assert_eq!(
            parse_solution::<f64>(&text).unwrap(),
            AnySolution::Integral(sol)
        );
    }

    #[test]
    fn fractional_round_trips() {
        let sol = FractionalSolution {
            centers: vec![0, 1],
            assignment: FractionalAssignment::new(vec![vec![(0, 1.0), (1, 0.25)], vec![(1, 1.0)]])
                .unwrap(),
            eps: 0.25,
        };
        let text = fractional_to_json(&sol, None).to_string();
        assert_eq!(
            parse_solution::<f64>(&text).unwrap(),
            AnySolution::Fractional(sol)
        );
    }
}
