//! End-to-end runs through the public API.

use lbcluster::genbench::{generate_instance, run_benchmark, BenchConfig, BoundsSpec, Family};
use lbcluster::io::{fractional_to_json, parse_solution, solution_to_json, AnySolution};
use lbcluster::*;

#[test]
fn weak_to_two_to_bicriteria_on_each_family() {
    for (i, family) in [Family::Line, Family::RandomMetric, Family::SqEuclidean(2)]
        .into_iter()
        .enumerate()
    {
        let inst: Instance64 =
            generate_instance(family, 24, 4, BoundsSpec::Range(2, 5), i as u64).unwrap();
        let weak = solve_weak_lb(&inst, 1).unwrap();
        assert!(check_feasibility(&inst, &weak).is_feasible());
        let (two, trace) = reduce_to_two(&inst, &weak).unwrap();
        assert!(trace.passed());
        let out = to_bicriteria(&inst, &two, 0.5).unwrap();
        assert!(check_feasibility(&inst, &out.solution).is_feasible());
        let lb = solve_lb_via_nesting(&inst, 1).unwrap();
        assert!(check_feasibility(&inst, &lb).is_feasible());
    }
}

#[test]
fn solutions_survive_json() {
    let inst: Instance64 =
        generate_instance(Family::Line, 12, 3, BoundsSpec::Uniform(3), 4).unwrap();
    let weak = solve_weak_lb(&inst, 0).unwrap();
    let text = solution_to_json(&weak, cost_multi(&inst, &weak).ok()).to_string();
    assert_eq!(
        parse_solution::<f64>(&text).unwrap(),
        AnySolution::Integral(weak.clone())
    );

    let (frac, _) = reduce_to_one_plus_eps(&inst, &weak, 0.25).unwrap();
    let text = fractional_to_json(&frac, None).to_string();
    let AnySolution::Fractional(back) = parse_solution::<f64>(&text).unwrap() else {
        panic!("expected a fractional solution");
    };
    assert!(check_fractional_feasibility(&inst, &back).is_feasible());
    assert_eq!(
        cost_fractional(&inst, &back).unwrap(),
        cost_fractional(&inst, &frac).unwrap()
    );
}

#[test]
fn same_inputs_same_outputs() {
    let inst: InstanceQ =
        generate_instance(Family::SqEuclidean(3), 15, 3, BoundsSpec::Range(1, 4), 9).unwrap();
    let a = solve_weak_lb(&inst, 5).unwrap();
    let b = solve_weak_lb(&inst, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        reduce_to_two(&inst, &a).unwrap(),
        reduce_to_two(&inst, &b).unwrap()
    );
}

#[test]
fn benchmark_report_is_stable_and_clean() {
    let config: BenchConfig = serde_json::from_str(
        r#"{"seed": 11, "corpora": [
            {"family": "random-metric", "n": 8, "k": 3, "bounds": {"range": [1, 3]}, "count": 4},
            {"family": "sqeuclidean", "dim": 2, "n": 8, "k": 2, "bounds": {"uniform": 2}, "count": 4}
        ]}"#,
    )
    .unwrap();
    let a = run_benchmark(&config).unwrap();
    let b = run_benchmark(&config).unwrap();
    assert_eq!(a.to_jsonl(), b.to_jsonl());
    assert_eq!(a.violations(), 0, "{}", a.to_jsonl());
    for line in a.to_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema"], 1);
    }
}
