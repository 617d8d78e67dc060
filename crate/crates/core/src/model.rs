//! Core domain types: instances, assignments, allocations, and the
//! envy-freeness / constraint checks every solver output must pass.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::{format_exact, Rational};
use crate::trace::Trace;

/// A rent bound or budget. `NegInf` is only meaningful as a lower bound and
/// `PosInf` only as an upper bound or budget.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(value) => Some(value),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    /// Compares the bound against a concrete value.
    pub fn cmp_value(&self, value: &Rational) -> Ordering {
        match self {
            Bound::NegInf => Ordering::Less,
            Bound::PosInf => Ordering::Greater,
            Bound::Finite(b) => b.cmp(value),
        }
    }

    pub fn min(a: &Bound, b: &Bound) -> Bound {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        use Bound::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl From<Rational> for Bound {
    fn from(value: Rational) -> Self {
        Bound::Finite(value)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::PosInf => f.write_str("inf"),
            Bound::Finite(v) => f.write_str(&format_exact(v)),
        }
    }
}

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("instance has no agents")]
    Empty,
    #[error("{what} has shape {rows}x{cols}, expected {n}x{n}")]
    Shape { what: &'static str, rows: usize, cols: usize, n: usize },
    #[error("{what} has length {len}, expected {n}")]
    Length { what: &'static str, len: usize, n: usize },
    #[error("valuation of agent {} for room {} is negative", agent + 1, room + 1)]
    NegativeValuation { agent: usize, room: usize },
    #[error("{what} for room {} uses an infinity on the wrong side", room + 1)]
    BadSentinel { what: &'static str, room: usize },
    #[error("room {}: lower bound {lower} exceeds upper bound {upper}", room + 1)]
    BoundOrder { room: usize, lower: Box<Bound>, upper: Box<Bound> },
    #[error("{}", certificate.explanation)]
    BoundSum { certificate: Box<InfeasibilityCertificate> },
}

/// Unvalidated problem statement; absent constraints are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub valuations: Vec<Vec<Rational>>,
    pub total_rent: Rational,
    pub lower_bounds: Option<Vec<Bound>>,
    pub upper_bounds: Option<Vec<Bound>>,
    pub budgets: Option<Vec<Vec<Bound>>>,
}

impl RawInstance {
    pub fn new(valuations: Vec<Vec<Rational>>, total_rent: Rational) -> Self {
        RawInstance { valuations, total_rent, lower_bounds: None, upper_bounds: None, budgets: None }
    }

    pub fn lower_bounds(mut self, lower: Vec<Bound>) -> Self {
        self.lower_bounds = Some(lower);
        self
    }

    pub fn upper_bounds(mut self, upper: Vec<Bound>) -> Self {
        self.upper_bounds = Some(upper);
        self
    }

    pub fn budgets(mut self, budgets: Vec<Vec<Bound>>) -> Self {
        self.budgets = Some(budgets);
        self
    }

    pub fn validate(self) -> Result<Instance, ValidationError> {
        validate_instance(self)
    }
}

/// A validated rent-division instance. Absent bounds are stored as
/// `(NegInf, PosInf)` and absent budgets as `PosInf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    valuations: Vec<Vec<Rational>>,
    total_rent: Rational,
    lower: Vec<Bound>,
    upper: Vec<Bound>,
    budgets: Vec<Vec<Bound>>,
}

pub fn validate_instance(raw: RawInstance) -> Result<Instance, ValidationError> {
    let n = raw.valuations.len();
    if n == 0 {
        return Err(ValidationError::Empty);
    }
    for row in &raw.valuations {
        if row.len() != n {
            return Err(ValidationError::Shape { what: "valuation matrix", rows: n, cols: row.len(), n });
        }
    }
    for (agent, row) in raw.valuations.iter().enumerate() {
        if let Some(room) = row.iter().position(|v| v < &Rational::zero()) {
            return Err(ValidationError::NegativeValuation { agent, room });
        }
    }

    let lower = raw.lower_bounds.unwrap_or_else(|| vec![Bound::NegInf; n]);
    let upper = raw.upper_bounds.unwrap_or_else(|| vec![Bound::PosInf; n]);
    if lower.len() != n {
        return Err(ValidationError::Length { what: "lower bounds", len: lower.len(), n });
    }
    if upper.len() != n {
        return Err(ValidationError::Length { what: "upper bounds", len: upper.len(), n });
    }
    if let Some(room) = lower.iter().position(|b| *b == Bound::PosInf) {
        return Err(ValidationError::BadSentinel { what: "lower bound", room });
    }
    if let Some(room) = upper.iter().position(|b| *b == Bound::NegInf) {
        return Err(ValidationError::BadSentinel { what: "upper bound", room });
    }

    let budgets = raw.budgets.unwrap_or_else(|| vec![vec![Bound::PosInf; n]; n]);
    if budgets.len() != n || budgets.iter().any(|row| row.len() != n) {
        let cols = budgets.iter().map(Vec::len).find(|&c| c != n).unwrap_or(n);
        return Err(ValidationError::Shape { what: "budget matrix", rows: budgets.len(), cols, n });
    }
    for row in &budgets {
        if let Some(room) = row.iter().position(|b| *b == Bound::NegInf) {
            return Err(ValidationError::BadSentinel { what: "budget", room });
        }
    }

    for room in 0..n {
        if lower[room] > upper[room] {
            return Err(ValidationError::BoundOrder {
                room,
                lower: Box::new(lower[room].clone()),
                upper: Box::new(upper[room].clone()),
            });
        }
    }

    let total = raw.total_rent;
    let sum_lower = sum_bounds(&lower);
    let sum_upper = sum_bounds(&upper);
    let violation = if sum_lower.cmp_value(&total) == Ordering::Greater {
        Some(format!("sum of lower bounds {sum_lower} exceeds total rent {}", format_exact(&total)))
    } else if sum_upper.cmp_value(&total) == Ordering::Less {
        Some(format!("sum of upper bounds {sum_upper} is below total rent {}", format_exact(&total)))
    } else {
        None
    };
    if let Some(explanation) = violation {
        return Err(ValidationError::BoundSum {
            certificate: Box::new(InfeasibilityCertificate {
                kind: CertificateKind::BoundSumViolation,
                witness_path: None,
                witness_rooms: Some((0..n).collect()),
                explanation,
                snapshot: None,
            }),
        });
    }

    Ok(Instance { valuations: raw.valuations, total_rent: total, lower, upper, budgets })
}

fn sum_bounds(bounds: &[Bound]) -> Bound {
    let mut acc = Rational::zero();
    for b in bounds {
        match b {
            Bound::Finite(v) => acc += v,
            other => return other.clone(),
        }
    }
    Bound::Finite(acc)
}

impl Instance {
    pub fn n(&self) -> usize {
        self.valuations.len()
    }

    pub fn valuations(&self) -> &[Vec<Rational>] {
        &self.valuations
    }

    pub fn value(&self, agent: usize, room: usize) -> &Rational {
        &self.valuations[agent][room]
    }

    pub fn total_rent(&self) -> &Rational {
        &self.total_rent
    }

    pub fn lower(&self) -> &[Bound] {
        &self.lower
    }

    pub fn upper(&self) -> &[Bound] {
        &self.upper
    }

    pub fn budgets(&self) -> &[Vec<Bound>] {
        &self.budgets
    }

    pub fn budget(&self, agent: usize, room: usize) -> &Bound {
        &self.budgets[agent][room]
    }

    pub fn has_bounds(&self) -> bool {
        self.lower.iter().chain(&self.upper).any(Bound::is_finite)
    }

    pub fn has_budgets(&self) -> bool {
        self.budgets.iter().flatten().any(Bound::is_finite)
    }

    pub fn room_bounds(&self) -> RoomBounds {
        RoomBounds { lower: self.lower.clone(), upper: self.upper.clone() }
    }

    /// Same valuations and total, no bounds or budgets.
    pub fn unconstrained(&self) -> Instance {
        let n = self.n();
        Instance {
            valuations: self.valuations.clone(),
            total_rent: self.total_rent.clone(),
            lower: vec![Bound::NegInf; n],
            upper: vec![Bound::PosInf; n],
            budgets: vec![vec![Bound::PosInf; n]; n],
        }
    }

    /// Same instance with bounds removed but budgets kept.
    pub fn without_bounds(&self) -> Instance {
        let n = self.n();
        Instance { lower: vec![Bound::NegInf; n], upper: vec![Bound::PosInf; n], ..self.clone() }
    }

    /// Same instance with a different total rent. Bounds are dropped, since
    /// the bound-sum precheck is tied to the original total.
    pub fn with_total_rent(&self, total: Rational) -> Instance {
        Instance { total_rent: total, ..self.without_bounds() }
    }

    pub fn welfare(&self, assignment: &Assignment) -> Rational {
        assignment
            .room_of_agent()
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (agent, &room)| acc + &self.valuations[agent][room])
    }
}

/// Effective per-room rent bounds used by the bound-aware algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomBounds {
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
}

impl RoomBounds {
    pub fn unbounded(n: usize) -> Self {
        RoomBounds { lower: vec![Bound::NegInf; n], upper: vec![Bound::PosInf; n] }
    }

    pub fn contains(&self, room: usize, rent: &Rational) -> bool {
        self.lower[room].cmp_value(rent) != Ordering::Greater && self.upper[room].cmp_value(rent) != Ordering::Less
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("room_of_agent is not a permutation of 0..{0}")]
pub struct NotAPermutation(pub usize);

/// A bijection agents → rooms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    room_of_agent: Vec<usize>,
}

impl Assignment {
    pub fn new(room_of_agent: Vec<usize>) -> Result<Self, NotAPermutation> {
        let n = room_of_agent.len();
        let mut seen = vec![false; n];
        for &room in &room_of_agent {
            if room >= n || std::mem::replace(&mut seen[room], true) {
                return Err(NotAPermutation(n));
            }
        }
        Ok(Assignment { room_of_agent })
    }

    pub fn identity(n: usize) -> Self {
        Assignment { room_of_agent: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.room_of_agent.len()
    }

    pub fn room_of_agent(&self) -> &[usize] {
        &self.room_of_agent
    }

    pub fn room(&self, agent: usize) -> usize {
        self.room_of_agent[agent]
    }

    pub fn agent_of_room(&self) -> Vec<usize> {
        let mut inverse = vec![0; self.n()];
        for (agent, &room) in self.room_of_agent.iter().enumerate() {
            inverse[room] = agent;
        }
        inverse
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub assignment: Assignment,
    pub rents: Vec<Rational>,
}

impl Allocation {
    pub fn new(assignment: Assignment, rents: Vec<Rational>) -> Self {
        assert_eq!(assignment.n(), rents.len(), "assignment and rent vector disagree on n");
        Allocation { assignment, rents }
    }

    pub fn total(&self) -> Rational {
        self.rents.iter().fold(Rational::zero(), |acc, r| acc + r)
    }
}

/// Per-agent utilities `v[i][σ(i)] - r[σ(i)]`, indexed by agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityVector(pub Vec<Rational>);

impl UtilityVector {
    pub fn min(&self) -> &Rational {
        self.0.iter().min().expect("non-empty utility vector")
    }

    pub fn max(&self) -> &Rational {
        self.0.iter().max().expect("non-empty utility vector")
    }

    pub fn spread(&self) -> Rational {
        self.max() - self.min()
    }

    /// `max / min`, defined only when every utility is strictly positive.
    pub fn relative_spread(&self) -> Option<Rational> {
        let min = self.min();
        (min > &Rational::zero()).then(|| self.max() / min)
    }

    pub fn sorted(&self) -> Vec<Rational> {
        let mut values = self.0.clone();
        values.sort();
        values
    }
}

pub fn utilities(inst: &Instance, alloc: &Allocation) -> UtilityVector {
    UtilityVector(
        alloc
            .assignment
            .room_of_agent()
            .iter()
            .enumerate()
            .map(|(agent, &room)| inst.value(agent, room) - &alloc.rents[room])
            .collect(),
    )
}

/// Agent `agent` strictly prefers `room` at its rent, by `gap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyViolation {
    pub agent: usize,
    pub room: usize,
    pub gap: Rational,
}

impl fmt::Display for EnvyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent {} envies room {} by {}", self.agent + 1, self.room + 1, format_exact(&self.gap))
    }
}

pub fn check_envy_free(inst: &Instance, alloc: &Allocation) -> Vec<EnvyViolation> {
    check_envy_free_raw(inst.valuations(), alloc)
}

pub(crate) fn check_envy_free_raw(valuations: &[Vec<Rational>], alloc: &Allocation) -> Vec<EnvyViolation> {
    let mut violations = Vec::new();
    for (agent, &own) in alloc.assignment.room_of_agent().iter().enumerate() {
        let own_utility = &valuations[agent][own] - &alloc.rents[own];
        for room in 0..alloc.rents.len() {
            let other = &valuations[agent][room] - &alloc.rents[room];
            if other > own_utility {
                violations.push(EnvyViolation { agent, room, gap: other - &own_utility });
            }
        }
    }
    violations
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintViolation {
    BelowLower { room: usize, rent: Rational, bound: Bound },
    AboveUpper { room: usize, rent: Rational, bound: Bound },
    OverBudget { agent: usize, room: usize, rent: Rational, budget: Bound },
    TotalMismatch { expected: Rational, actual: Rational },
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintViolation::BelowLower { room, rent, bound } => {
                write!(f, "room {} rent {} below lower bound {bound}", room + 1, format_exact(rent))
            }
            ConstraintViolation::AboveUpper { room, rent, bound } => {
                write!(f, "room {} rent {} above upper bound {bound}", room + 1, format_exact(rent))
            }
            ConstraintViolation::OverBudget { agent, room, rent, budget } => {
                write!(f, "agent {} pays {} for room {} over budget {budget}", agent + 1, format_exact(rent), room + 1)
            }
            ConstraintViolation::TotalMismatch { expected, actual } => {
                write!(f, "rents sum to {} but total rent is {}", format_exact(actual), format_exact(expected))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintReport {
    pub bounds_ok: bool,
    pub budgets_ok: bool,
    pub total_ok: bool,
    pub violations: Vec<ConstraintViolation>,
}

impl ConstraintReport {
    pub fn all_ok(&self) -> bool {
        self.bounds_ok && self.budgets_ok && self.total_ok
    }
}

pub fn check_constraints(inst: &Instance, alloc: &Allocation) -> ConstraintReport {
    let mut violations = Vec::new();
    for (room, rent) in alloc.rents.iter().enumerate() {
        if inst.lower[room].cmp_value(rent) == Ordering::Greater {
            violations.push(ConstraintViolation::BelowLower {
                room,
                rent: rent.clone(),
                bound: inst.lower[room].clone(),
            });
        }
        if inst.upper[room].cmp_value(rent) == Ordering::Less {
            violations.push(ConstraintViolation::AboveUpper {
                room,
                rent: rent.clone(),
                bound: inst.upper[room].clone(),
            });
        }
    }
    let bounds_ok = violations.is_empty();

    for (agent, &room) in alloc.assignment.room_of_agent().iter().enumerate() {
        let budget = inst.budget(agent, room);
        if budget.cmp_value(&alloc.rents[room]) == Ordering::Less {
            violations.push(ConstraintViolation::OverBudget {
                agent,
                room,
                rent: alloc.rents[room].clone(),
                budget: budget.clone(),
            });
        }
    }
    let budgets_ok = !violations.iter().any(|v| matches!(v, ConstraintViolation::OverBudget { .. }));

    let actual = alloc.total();
    let total_ok = actual == inst.total_rent;
    if !total_ok {
        violations.push(ConstraintViolation::TotalMismatch { expected: inst.total_rent.clone(), actual });
    }
    ConstraintReport { bounds_ok, budgets_ok, total_ok, violations }
}

/// Fairness objective requested from a solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Any,
    Maximin,
    Leximin,
    MinSpread,
    MaxTotalRent,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Any => "any",
            Objective::Maximin => "maximin",
            Objective::Leximin => "leximin",
            Objective::MinSpread => "minspread",
            Objective::MaxTotalRent => "maxtotalrent",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "any" => Ok(Objective::Any),
            "maximin" => Ok(Objective::Maximin),
            "leximin" => Ok(Objective::Leximin),
            "minspread" | "min-spread" => Ok(Objective::MinSpread),
            "maxtotalrent" | "max-total-rent" => Ok(Objective::MaxTotalRent),
            other => Err(format!("unknown objective {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    BoundSumViolation,
    EnvyPathViolation,
    BudgetCapViolation,
}

impl CertificateKind {
    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::BoundSumViolation => "BoundSumViolation",
            CertificateKind::EnvyPathViolation => "EnvyPathViolation",
            CertificateKind::BudgetCapViolation => "BudgetCapViolation",
        }
    }
}

/// Rents and effective bounds at the moment infeasibility was detected, so a
/// witness can be re-checked without re-running the solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateSnapshot {
    pub assignment: Assignment,
    pub rents: Vec<Rational>,
    pub bounds: RoomBounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub kind: CertificateKind,
    /// Envy-graph path from a room that cannot get cheaper to a room that
    /// must get cheaper (or the reverse orientation).
    pub witness_path: Option<Vec<usize>>,
    /// Seed rooms whose forward (or backward) closure covers every room.
    pub witness_rooms: Option<Vec<usize>>,
    pub explanation: String,
    pub snapshot: Option<CertificateSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveValue {
    None,
    Scalar(Rational),
    Vector(Vec<Rational>),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Objective,
    pub allocation: Option<Allocation>,
    pub utilities: Option<UtilityVector>,
    pub objective_value: ObjectiveValue,
    pub certificate: Option<InfeasibilityCertificate>,
    pub trace: Trace,
}

impl SolveOutcome {
    pub fn solved(inst: &Instance, objective: Objective, allocation: Allocation, trace: Trace) -> Self {
        let utilities = utilities(inst, &allocation);
        let objective_value = objective_value_of(objective, &allocation, &utilities);
        SolveOutcome {
            status: SolveStatus::Solved,
            objective,
            allocation: Some(allocation),
            utilities: Some(utilities),
            objective_value,
            certificate: None,
            trace,
        }
    }

    pub fn infeasible(objective: Objective, certificate: InfeasibilityCertificate, trace: Trace) -> Self {
        SolveOutcome {
            status: SolveStatus::Infeasible,
            objective,
            allocation: None,
            utilities: None,
            objective_value: ObjectiveValue::None,
            certificate: Some(certificate),
            trace,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

pub(crate) fn objective_value_of(
    objective: Objective,
    alloc: &Allocation,
    utilities: &UtilityVector,
) -> ObjectiveValue {
    match objective {
        Objective::Any => ObjectiveValue::None,
        Objective::Maximin => ObjectiveValue::Scalar(utilities.min().clone()),
        Objective::Leximin => ObjectiveValue::Vector(utilities.sorted()),
        Objective::MinSpread => ObjectiveValue::Scalar(utilities.spread()),
        Objective::MaxTotalRent => ObjectiveValue::Scalar(alloc.total()),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::rational::int;

    pub fn matrix(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|row| row.iter().map(|&v| int(v)).collect()).collect()
    }

    pub fn bounds(values: &[i64]) -> Vec<Bound> {
        values.iter().map(|&v| Bound::Finite(int(v))).collect()
    }

    pub fn rents(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| int(v)).collect()
    }

    pub fn fix_a() -> RawInstance {
        RawInstance::new(matrix(&[&[10, 2], &[4, 6]]), int(8))
    }

    pub fn fix_ex() -> RawInstance {
        RawInstance::new(matrix(&[&[20, 0, 20, 0], &[0, 19, 0, 0], &[5, 0, 5, 0], &[0, 0, 0, 2]]), int(4))
            .lower_bounds(bounds(&[0, 0, 0, 2]))
            .upper_bounds(bounds(&[2, 2, 2, 2]))
    }

    pub fn fix_tie() -> RawInstance {
        RawInstance::new(matrix(&[&[5, 5], &[5, 5]]), int(6))
    }
}
