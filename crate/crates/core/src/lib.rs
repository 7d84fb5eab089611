//! Approximation algorithms for k-median and k-means with lower bounds on
//! cluster sizes, plus exhaustive oracles for small instances.
//!
//! Everything is generic over a [`Scalar`] type. Use the `Q` aliases for exact
//! rational arithmetic and the `64` aliases for `f64`.

pub mod bicriteria;
pub mod charging;
pub mod cost;
pub mod error;
pub mod flow;
pub mod genbench;
pub mod instance;
pub mod io;
pub mod nesting;
pub mod oracle;
pub mod reduce2;
pub mod reduce_eps;
pub mod scalar;
pub mod subsolver;
pub mod weaklb;

pub use num_rational::Rational64;

pub use bicriteria::{to_bicriteria, BicriteriaOutcome};
pub use charging::{ChargingAudit, TraceEvent, TraceLog};
pub use cost::{
    check_feasibility, check_fractional_feasibility, cost_fractional, cost_multi,
    cost_with_center_costs, snap_centers_to_points, FeasibilityReport, FractionalAssignment,
    FractionalSolution, MultiAssignment, Solution, SolutionKind, Violation,
};
pub use error::{Error, Result};
pub use instance::{Instance, InstanceBuilder, LowerBounds, MetricDescriptor, MetricKind};
pub use nesting::{greedy_lb_partition, nest_into_c1, nest_into_c2, solve_lb_via_nesting};
pub use oracle::{brute_force_opt, OracleLimits, OracleMode, OracleResult};
pub use reduce2::reduce_to_two;
pub use reduce_eps::reduce_to_one_plus_eps;
pub use scalar::Scalar;
pub use subsolver::{
    local_search_center_costs, local_search_kmedian, CenterCosts, LocalSearchConfig,
};
pub use weaklb::{augment_to_weak, compute_center_costs, solve_weak_lb};

pub type Instance64 = Instance<f64>;
pub type InstanceQ = Instance<Rational64>;
pub type Solution64 = Solution<f64>;
pub type SolutionQ = Solution<Rational64>;
pub type FractionalSolution64 = FractionalSolution<f64>;
pub type FractionalSolutionQ = FractionalSolution<Rational64>;
pub type CenterCosts64 = CenterCosts<f64>;
pub type CenterCostsQ = CenterCosts<Rational64>;
