//! Independent ground truth for small instances: every maximum-welfare
//! assignment is enumerated and each objective is solved as an exact linear
//! program over that assignment's envy-free rents.

pub mod lp;

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::SolveError;
use crate::matching::{all_max_welfare_assignments, ENUMERATION_LIMIT};
use crate::model::{Allocation, Assignment, Instance, Objective, ObjectiveValue, SolveStatus};
use crate::rational::Rational;
use lp::{LinearProgram, LpResult, Relation, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleObjective {
    Any,
    Maximin,
    Leximin,
    MinSpread,
    /// Smallest max/min utility ratio; needs a positive maximin.
    MinRelSpread,
    /// Largest total rent, dropping the fixed-total constraint.
    MaxTotalRent,
}

impl OracleObjective {
    pub fn name(self) -> &'static str {
        match self {
            OracleObjective::Any => "any",
            OracleObjective::Maximin => "maximin",
            OracleObjective::Leximin => "leximin",
            OracleObjective::MinSpread => "minspread",
            OracleObjective::MinRelSpread => "minrelspread",
            OracleObjective::MaxTotalRent => "maxtotalrent",
        }
    }
}

impl From<Objective> for OracleObjective {
    fn from(objective: Objective) -> Self {
        match objective {
            Objective::Any => OracleObjective::Any,
            Objective::Maximin => OracleObjective::Maximin,
            Objective::Leximin => OracleObjective::Leximin,
            Objective::MinSpread => OracleObjective::MinSpread,
            Objective::MaxTotalRent => OracleObjective::MaxTotalRent,
        }
    }
}

impl std::str::FromStr for OracleObjective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minrelspread" => Ok(OracleObjective::MinRelSpread),
            other => other.parse::<Objective>().map(OracleObjective::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub status: SolveStatus,
    pub value: ObjectiveValue,
    /// An optimal allocation; absent when infeasible or unbounded.
    pub allocation: Option<Allocation>,
}

impl OracleOutcome {
    fn infeasible() -> Self {
        OracleOutcome { status: SolveStatus::Infeasible, value: ObjectiveValue::None, allocation: None }
    }
}

/// Rent variables `r_1..r_n` with the fixed total, the envy-freeness rows of
/// `sigma`, finite bound rows, and finite budget rows on assigned rooms.
pub fn ef_polytope(inst: &Instance, sigma: &Assignment) -> LinearProgram {
    let mut lp = polytope_without_total(inst, sigma);
    let all: Vec<(usize, Rational)> = (0..inst.n()).map(|j| (j, Rational::one())).collect();
    lp.constraints.insert(0, lp::Constraint { coeffs: all, relation: Relation::Eq, rhs: inst.total_rent().clone() });
    lp
}

fn polytope_without_total(inst: &Instance, sigma: &Assignment) -> LinearProgram {
    let n = inst.n();
    let mut lp = LinearProgram::new();
    for j in 0..n {
        lp.var(format!("r{}", j + 1));
    }
    for i in 0..n {
        let own = sigma.room(i);
        for j in (0..n).filter(|&j| j != own) {
            let rhs = inst.value(i, own) - inst.value(i, j);
            lp.constrain(vec![(own, Rational::one()), (j, -Rational::one())], Relation::Le, rhs);
        }
    }
    for j in 0..n {
        if let Some(l) = inst.lower()[j].finite() {
            lp.constrain(vec![(j, Rational::one())], Relation::Ge, l.clone());
        }
        if let Some(u) = inst.upper()[j].finite() {
            lp.constrain(vec![(j, Rational::one())], Relation::Le, u.clone());
        }
    }
    for i in 0..n {
        let own = sigma.room(i);
        if let Some(b) = inst.budget(i, own).finite() {
            lp.constrain(vec![(own, Rational::one())], Relation::Le, b.clone());
        }
    }
    lp
}

/// Solves `objective` by exact linear programming over every
/// maximum-welfare assignment and keeps the best.
pub fn oracle_solve(inst: &Instance, objective: OracleObjective) -> Result<OracleOutcome, SolveError> {
    let sigmas = all_max_welfare_assignments(inst.valuations(), usize::MAX)?;
    debug_assert!(inst.n() <= ENUMERATION_LIMIT);
    let mut best: Option<(ObjectiveValue, Allocation)> = None;
    let mut any_feasible = false;
    for sigma in &sigmas {
        let found = match objective {
            OracleObjective::Any => feasible(inst, sigma).map(|a| (ObjectiveValue::None, a)),
            OracleObjective::Maximin => maximin(inst, sigma)?.map(|(t, a)| (ObjectiveValue::Scalar(t), a)),
            OracleObjective::Leximin => leximin(inst, sigma)?.map(|(v, a)| (ObjectiveValue::Vector(v), a)),
            OracleObjective::MinSpread => min_spread(inst, sigma)?.map(|(s, a)| (ObjectiveValue::Scalar(s), a)),
            OracleObjective::MinRelSpread => match maximin(inst, sigma)? {
                None => None,
                Some((t, _)) => {
                    any_feasible = true;
                    if t.is_positive() {
                        min_rel_spread(inst, sigma)?.map(|(s, a)| (ObjectiveValue::Scalar(s), a))
                    } else {
                        None
                    }
                }
            },
            OracleObjective::MaxTotalRent => match max_total_rent(inst, sigma) {
                Total::Infeasible => None,
                Total::Unbounded => {
                    return Ok(OracleOutcome {
                        status: SolveStatus::Solved,
                        value: ObjectiveValue::Unbounded,
                        allocation: None,
                    })
                }
                Total::Finite(value, alloc) => Some((ObjectiveValue::Scalar(value), alloc)),
            },
        };
        let Some((value, alloc)) = found else { continue };
        if objective == OracleObjective::Any {
            return Ok(OracleOutcome { status: SolveStatus::Solved, value, allocation: Some(alloc) });
        }
        let better = match &best {
            None => true,
            Some((incumbent, _)) => improves(objective, &value, incumbent),
        };
        if better {
            best = Some((value, alloc));
        }
    }
    match best {
        Some((value, alloc)) => Ok(OracleOutcome { status: SolveStatus::Solved, value, allocation: Some(alloc) }),
        None if any_feasible => {
            Err(SolveError::Precondition("relative spread needs a positive minimum utility".into()))
        }
        None => Ok(OracleOutcome::infeasible()),
    }
}

fn improves(objective: OracleObjective, candidate: &ObjectiveValue, incumbent: &ObjectiveValue) -> bool {
    let order = match (candidate, incumbent) {
        (ObjectiveValue::Scalar(a), ObjectiveValue::Scalar(b)) => a.cmp(b),
        (ObjectiveValue::Vector(a), ObjectiveValue::Vector(b)) => a.cmp(b),
        _ => Ordering::Equal,
    };
    match objective {
        OracleObjective::MinSpread | OracleObjective::MinRelSpread => order == Ordering::Less,
        _ => order == Ordering::Greater,
    }
}

fn allocation(sigma: &Assignment, point: &[Rational], n: usize) -> Allocation {
    Allocation::new(sigma.clone(), point[..n].to_vec())
}

fn optimum(lp: &LinearProgram) -> Result<Option<(Rational, Vec<Rational>)>, SolveError> {
    match lp.solve() {
        LpResult::Optimal { value, point } => Ok(Some((value, point))),
        LpResult::Infeasible => Ok(None),
        LpResult::Unbounded => Err(SolveError::Invariant("bounded oracle program reported unbounded".into())),
    }
}

fn feasible(inst: &Instance, sigma: &Assignment) -> Option<Allocation> {
    ef_polytope(inst, sigma).solve().point().map(|p| allocation(sigma, p, inst.n()))
}

/// `u_i ≥ t`, written as `t + r_σ(i) ≤ v_iσ(i)`.
fn utility_at_least(lp: &mut LinearProgram, inst: &Instance, sigma: &Assignment, agent: usize, level: Level<'_>) {
    let own = sigma.room(agent);
    let v = inst.value(agent, own).clone();
    match level {
        Level::Var(t) => lp.constrain(vec![(t, Rational::one()), (own, Rational::one())], Relation::Le, v),
        Level::Const(c) => lp.constrain(vec![(own, Rational::one())], Relation::Le, v - c),
    }
}

#[derive(Clone, Copy)]
enum Level<'a> {
    Var(usize),
    Const(&'a Rational),
}

fn maximin(inst: &Instance, sigma: &Assignment) -> Result<Option<(Rational, Allocation)>, SolveError> {
    let mut lp = ef_polytope(inst, sigma);
    let t = lp.var("t");
    for i in 0..inst.n() {
        utility_at_least(&mut lp, inst, sigma, i, Level::Var(t));
    }
    lp.set_objective(vec![(t, Rational::one())], Sense::Maximize);
    Ok(optimum(&lp)?.map(|(value, point)| (value, allocation(sigma, &point, inst.n()))))
}

fn agent_utilities(inst: &Instance, sigma: &Assignment, point: &[Rational]) -> Vec<Rational> {
    (0..inst.n()).map(|i| inst.value(i, sigma.room(i)) - &point[sigma.room(i)]).collect()
}

/// Iterative leximin: raise the common floor of the unsettled agents, then
/// settle those that cannot rise above it.
fn leximin(inst: &Instance, sigma: &Assignment) -> Result<Option<(Vec<Rational>, Allocation)>, SolveError> {
    let n = inst.n();
    let mut level: Vec<Option<Rational>> = vec![None; n];
    let mut last_point = None;
    while level.iter().any(Option::is_none) {
        let mut lp = ef_polytope(inst, sigma);
        for (i, l) in level.iter().enumerate() {
            if let Some(l) = l {
                utility_at_least(&mut lp, inst, sigma, i, Level::Const(l));
            }
        }
        let mut floor_lp = lp.clone();
        let t = floor_lp.var("t");
        for i in (0..n).filter(|&i| level[i].is_none()) {
            utility_at_least(&mut floor_lp, inst, sigma, i, Level::Var(t));
        }
        floor_lp.set_objective(vec![(t, Rational::one())], Sense::Maximize);
        let Some((floor, point)) = optimum(&floor_lp)? else { return Ok(None) };

        let mut rises = vec![false; n];
        let mark = |rises: &mut Vec<bool>, point: &[Rational]| {
            for (i, u) in agent_utilities(inst, sigma, point).iter().enumerate() {
                if *u > floor {
                    rises[i] = true;
                }
            }
        };
        mark(&mut rises, &point);
        last_point = Some(point);
        for i in (0..n).filter(|&i| level[i].is_none()) {
            utility_at_least(&mut lp, inst, sigma, i, Level::Const(&floor));
        }
        let mut settled = Vec::new();
        for i in 0..n {
            if level[i].is_some() || rises[i] {
                continue;
            }
            let own = sigma.room(i);
            let mut probe = lp.clone();
            probe.set_objective(vec![(own, Rational::one())], Sense::Minimize);
            let Some((_, point)) = optimum(&probe)? else {
                return Err(SolveError::Invariant("leximin probe lost feasibility".into()));
            };
            mark(&mut rises, &point);
            if !rises[i] {
                settled.push(i);
            }
            last_point = Some(point);
        }
        if settled.is_empty() {
            return Err(SolveError::Invariant("leximin round settled no agent".into()));
        }
        for i in settled {
            level[i] = Some(floor.clone());
        }
    }
    let point = last_point.expect("at least one round");
    let alloc = allocation(sigma, &point, n);
    let mut sorted: Vec<Rational> = level.into_iter().map(|l| l.expect("settled")).collect();
    sorted.sort();
    let mut achieved = agent_utilities(inst, sigma, &point);
    achieved.sort();
    if achieved != sorted {
        return Err(SolveError::Invariant("leximin levels differ from the final point".into()));
    }
    Ok(Some((sorted, alloc)))
}

fn min_spread(inst: &Instance, sigma: &Assignment) -> Result<Option<(Rational, Allocation)>, SolveError> {
    let mut lp = ef_polytope(inst, sigma);
    let t = lp.var("t");
    let s = lp.var("s");
    for i in 0..inst.n() {
        utility_at_least(&mut lp, inst, sigma, i, Level::Var(t));
        // u_i ≤ s
        let own = sigma.room(i);
        lp.constrain(vec![(s, -Rational::one()), (own, -Rational::one())], Relation::Le, -inst.value(i, own));
    }
    lp.set_objective(vec![(s, Rational::one()), (t, -Rational::one())], Sense::Minimize);
    Ok(optimum(&lp)?.map(|(value, point)| (value, allocation(sigma, &point, inst.n()))))
}

/// Charnes-Cooper: with `λ = 1/min u`, scaled rents `y = λ r` and scaled
/// maximum `s`, minimize `s` subject to `λ·u_i ≥ 1` and `λ·u_i ≤ s`.
fn min_rel_spread(inst: &Instance, sigma: &Assignment) -> Result<Option<(Rational, Allocation)>, SolveError> {
    let n = inst.n();
    let base = ef_polytope(inst, sigma);
    let mut lp = LinearProgram::new();
    for name in &base.names {
        lp.var(format!("{name}'"));
    }
    let lambda = lp.nonneg_var("lambda");
    let s = lp.var("s");
    for row in &base.constraints {
        let mut coeffs = row.coeffs.clone();
        coeffs.push((lambda, -row.rhs.clone()));
        lp.constrain(coeffs, row.relation, Rational::zero());
    }
    for i in 0..n {
        let own = sigma.room(i);
        let v = inst.value(i, own).clone();
        lp.constrain(vec![(lambda, v.clone()), (own, -Rational::one())], Relation::Ge, Rational::one());
        lp.constrain(vec![(lambda, v), (own, -Rational::one()), (s, -Rational::one())], Relation::Le, Rational::zero());
    }
    lp.set_objective(vec![(s, Rational::one())], Sense::Minimize);
    let Some((value, point)) = optimum(&lp)? else { return Ok(None) };
    let scale = &point[lambda];
    if !scale.is_positive() {
        return Err(SolveError::Invariant("relative spread program returned a zero scale".into()));
    }
    let rents: Vec<Rational> = point[..n].iter().map(|y| y / scale).collect();
    Ok(Some((value, allocation(sigma, &rents, n))))
}

enum Total {
    Infeasible,
    Unbounded,
    Finite(Rational, Allocation),
}

fn max_total_rent(inst: &Instance, sigma: &Assignment) -> Total {
    let mut lp = polytope_without_total(inst, sigma);
    lp.set_objective((0..inst.n()).map(|j| (j, Rational::one())).collect(), Sense::Maximize);
    match lp.solve() {
        LpResult::Optimal { value, point } => Total::Finite(value, allocation(sigma, &point, inst.n())),
        LpResult::Infeasible => Total::Infeasible,
        LpResult::Unbounded => Total::Unbounded,
    }
}
