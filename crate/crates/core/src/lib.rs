//! Exact envy-free rent division with per-room rent bounds and per-agent,
//! per-room budgets.
//!
//! Every solver path works on exact rationals. The entry point is
//! [`combined_solve`], which picks a welfare-maximizing assignment, builds
//! envy-free rents, repairs them into the bounds and budget caps, and then
//! optimizes the requested fairness objective. The [`oracle`] module answers
//! the same questions by linear programming and exists to cross-check the
//! combinatorial algorithms.

pub mod bounds;
pub mod budgets;
pub mod dynamics;
pub mod ef_base;
pub mod envy;
pub mod error;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod trace;

pub use bounds::{ef_rents_with_bounds, leximin_rents, maximin_rents, minspread_rents, validate_certificate};
pub use budgets::{budget_aware_ef, combined_solve, component_max_rents, scc_max_rent, ComponentSubproblem, MaxRent};
pub use dynamics::{advance, next_event, BoundSide, Event, EventKind, RatePlan, Watch};
pub use ef_base::{initial_ef_allocation, shift_rents};
pub use envy::{build_budget_graph, build_envy_graph, EdgeStrength, EnvyGraph, GraphFlavor, RoomSet};
pub use error::SolveError;
pub use matching::{all_max_welfare_assignments, max_welfare_assignment};
pub use model::{
    check_constraints, check_envy_free, utilities, validate_instance, Allocation, Assignment, Bound, CertificateKind,
    CertificateSnapshot, ConstraintReport, ConstraintViolation, EnvyViolation, InfeasibilityCertificate, Instance,
    Objective, ObjectiveValue, RawInstance, RoomBounds, SolveOutcome, SolveStatus, UtilityVector, ValidationError,
};
pub use oracle::{oracle_solve, OracleObjective, OracleOutcome};
pub use rational::{format_decimal, format_exact, parse_rational, Rational};
pub use trace::{Phase, PhaseRun, StepKind, Trace, TraceStep};
