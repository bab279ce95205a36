//! Makespan scheduling of precedence-constrained tasks on hybrid platforms
//! with `m` CPUs and `k` GPUs.
//!
//! The main entry point is [`schedule::hlp_b`], which solves the allocation
//! LP relaxation, rounds it with the threshold rule, and list-schedules the
//! result. [`bounds`] provides lower bounds and an exact oracle for tiny
//! instances, and [`genlab`] builds benchmark and hardness-reduction
//! instances.

pub mod allocate;
pub mod bounds;
pub mod error;
pub mod genlab;
pub mod instance;
pub mod lp;
pub mod schedule;

pub use allocate::{optimal_b, round_half, round_hlpb, round_side, RoundingParams};
pub use bounds::{bounds_report, exact_makespan, theoretical_ratio, BoundsReport, OracleCaps};
pub use error::{Error, Result};
pub use instance::{
    load_instance, validate_schedule, Allocation, ExtTime, Instance, Schedule, Side,
};
pub use lp::{build_allocation_lp, solve_relaxation, FractionalSolution, LpProblem, LpStatus};
pub use schedule::{gantt_csv, hlp_b, list_schedule, Diagnostics};
