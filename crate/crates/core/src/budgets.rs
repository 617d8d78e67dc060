//! Budget-aware envy-free allocation: per-component maximum rents, global
//! assembly, and the combined solver with rent bounds and objectives.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::bounds::{leximin_in, maximin_in, minspread_in, repair_into_bounds, Repair};
use crate::ef_base::initial_ef_traced;
use crate::envy::EnvyGraph;
use crate::error::SolveError;
use crate::model::{
    check_constraints, check_envy_free, Allocation, Assignment, Bound, CertificateKind, InfeasibilityCertificate,
    Instance, Objective, RawInstance, RoomBounds, SolveOutcome,
};
use crate::rational::Rational;
use crate::trace::{Phase, PhaseRun, StepKind, Trace, TraceStep};

/// One strongly connected component of the envy graph as a stand-alone
/// instance. Local agent `k` starts in local room `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSubproblem {
    /// Global room ids, ascending.
    pub rooms: Vec<usize>,
    /// Global agent ids; `agents[k]` occupies `rooms[k]` at the start.
    pub agents: Vec<usize>,
    pub valuations: Vec<Vec<Rational>>,
    pub budgets: Vec<Vec<Bound>>,
    /// Envy-free start rents, local room order.
    pub start_rents: Vec<Rational>,
}

impl ComponentSubproblem {
    pub fn new(inst: &Instance, alloc: &Allocation, rooms: &[usize]) -> Self {
        let agent_of_room = alloc.assignment.agent_of_room();
        let agents: Vec<usize> = rooms.iter().map(|&j| agent_of_room[j]).collect();
        let valuations = agents.iter().map(|&i| rooms.iter().map(|&j| inst.value(i, j).clone()).collect()).collect();
        let budgets = agents.iter().map(|&i| rooms.iter().map(|&j| inst.budget(i, j).clone()).collect()).collect();
        let start_rents = rooms.iter().map(|&j| alloc.rents[j].clone()).collect();
        ComponentSubproblem { rooms: rooms.to_vec(), agents, valuations, budgets, start_rents }
    }

    pub fn n(&self) -> usize {
        self.rooms.len()
    }

    pub fn start(&self) -> Allocation {
        Allocation::new(Assignment::identity(self.n()), self.start_rents.clone())
    }

    /// The component as an instance with its budgets and start total.
    pub fn to_instance(&self) -> Instance {
        let total = self.start_rents.iter().sum();
        RawInstance::new(self.valuations.clone(), total)
            .budgets(self.budgets.clone())
            .validate()
            .expect("component of a valid instance is valid")
    }
}

/// Largest component total with a budget-feasible envy-free allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxRent {
    /// `PosInf` when the final occupants have no finite budget for their
    /// rooms.
    pub delta: Bound,
    /// Local allocation attaining `delta` (finite case), or the final
    /// assignment with unshifted rents (unbounded case).
    pub allocation: Allocation,
}

/// Maximum total rent of one strongly connected component such that every
/// occupant stays within budget.
pub fn scc_max_rent(sub: &ComponentSubproblem) -> Result<MaxRent, SolveError> {
    scc_max_rent_traced(sub, &mut Trace::default())
}

fn tight_slack(sub: &ComponentSubproblem, alloc: &Allocation) -> Vec<Option<Rational>> {
    alloc
        .assignment
        .room_of_agent()
        .iter()
        .enumerate()
        .map(|(agent, &room)| sub.budgets[agent][room].finite().map(|b| b - &alloc.rents[room]))
        .collect()
}

fn shifted(alloc: &Allocation, delta: &Rational) -> Allocation {
    Allocation::new(alloc.assignment.clone(), alloc.rents.iter().map(|r| r + delta).collect())
}

pub(crate) fn scc_max_rent_traced(sub: &ComponentSubproblem, trace: &mut Trace) -> Result<MaxRent, SolveError> {
    let n = sub.n();
    let mut alloc = sub.start();
    if !crate::model::check_envy_free_raw(&sub.valuations, &alloc).is_empty() {
        return Err(SolveError::Precondition("component start rents are not envy-free".into()));
    }
    if EnvyGraph::from_parts(&sub.valuations, None, &alloc).scc_partition().len() != 1 {
        return Err(SolveError::Precondition("component rooms do not form one strongly connected component".into()));
    }
    let mut run = PhaseRun::new(
        Phase::MaxRent,
        sub.rooms.clone(),
        alloc.assignment.clone(),
        RoomBounds::unbounded(n),
        alloc.rents.clone(),
    );
    run.agents = sub.agents.clone();

    let slack = tight_slack(sub, &alloc);
    let Some(excess) = slack.iter().flatten().map(|s| -s).max() else {
        trace.push(run);
        return Ok(MaxRent { delta: Bound::PosInf, allocation: alloc });
    };
    alloc = shifted(&alloc, &-excess.clone());
    run.steps.push(step(StepKind::Shift(-excess), &alloc, true));

    let mut streak = 0;
    loop {
        let slack = tight_slack(sub, &alloc);
        let tight: Vec<usize> = (0..n).filter(|&a| slack[a].as_ref().is_some_and(Zero::is_zero)).collect();
        if tight.is_empty() {
            let Some(raise) = slack.iter().flatten().min().cloned() else {
                trace.push(run);
                return Ok(MaxRent { delta: Bound::PosInf, allocation: alloc });
            };
            alloc = shifted(&alloc, &raise);
            run.iterations += 1;
            streak = 0;
            run.steps.push(step(StepKind::Shift(raise), &alloc, false));
            if run.iterations > n * n {
                return Err(SolveError::Invariant(format!("maximum-rent search exceeded {} raises", n * n)));
            }
            continue;
        }
        let g = EnvyGraph::from_parts(&sub.valuations, Some(&sub.budgets), &alloc);
        let mut rooms: Vec<usize> = tight.iter().map(|&a| alloc.assignment.room(a)).collect();
        rooms.sort_unstable();
        let mut cycles = Vec::with_capacity(rooms.len());
        for &room in &rooms {
            match g.find_cycle_through(room) {
                Some(c) => cycles.push(c),
                None => {
                    trace.push(run);
                    return Ok(MaxRent { delta: Bound::Finite(alloc.total()), allocation: alloc });
                }
            }
        }
        let cycle = cycles.swap_remove(0);
        let mut room_of_agent = alloc.assignment.room_of_agent().to_vec();
        let agent_of_room = alloc.assignment.agent_of_room();
        for k in 0..cycle.len() {
            room_of_agent[agent_of_room[cycle[k]]] = cycle[(k + 1) % cycle.len()];
        }
        alloc = Allocation::new(Assignment::new(room_of_agent).expect("rotation is a permutation"), alloc.rents);
        streak += 1;
        run.max_rotation_streak = run.max_rotation_streak.max(streak);
        run.steps.push(step(StepKind::Rotate(cycle), &alloc, true));
        if streak > n {
            return Err(SolveError::Invariant(format!("maximum-rent search rotated {streak} times in a row")));
        }
    }
}

fn step(kind: StepKind, alloc: &Allocation, with_assignment: bool) -> TraceStep {
    TraceStep {
        time: Rational::zero(),
        kinds: vec![kind],
        assignment: with_assignment.then(|| alloc.assignment.clone()),
        rents: alloc.rents.clone(),
        frozen: Vec::new(),
        increasing: 0,
        decreasing: 0,
    }
}

/// Assignment whose occupants tolerate the largest rents in every
/// component, assembled from the per-component maximum-rent searches.
pub(crate) fn budget_assignment(
    inst: &Instance,
    start: &Allocation,
    trace: &mut Trace,
) -> Result<Assignment, SolveError> {
    if !inst.has_budgets() {
        return Ok(start.assignment.clone());
    }
    let g = EnvyGraph::from_parts(inst.valuations(), None, start);
    let mut room_of_agent = start.assignment.room_of_agent().to_vec();
    for component in g.scc_partition() {
        let sub = ComponentSubproblem::new(inst, start, &component);
        let best = scc_max_rent_traced(&sub, trace)?;
        for (local_agent, &local_room) in best.allocation.assignment.room_of_agent().iter().enumerate() {
            room_of_agent[sub.agents[local_agent]] = sub.rooms[local_room];
        }
    }
    Ok(Assignment::new(room_of_agent).expect("components partition the rooms"))
}

/// Per-component maximum rents for the instance's envy-graph components,
/// in the component order of [`EnvyGraph::scc_partition`].
pub fn component_max_rents(inst: &Instance) -> Result<Vec<(ComponentSubproblem, MaxRent)>, SolveError> {
    let start = crate::ef_base::initial_ef_allocation(&inst.unconstrained())?;
    let g = EnvyGraph::from_parts(inst.valuations(), None, &start);
    g.scc_partition()
        .iter()
        .map(|component| {
            let sub = ComponentSubproblem::new(inst, &start, component);
            scc_max_rent(&sub).map(|best| (sub, best))
        })
        .collect()
}

/// Envy-free, budget-feasible allocation with no room bounds.
pub fn budget_aware_ef(inst: &Instance, objective: Objective) -> Result<SolveOutcome, SolveError> {
    if inst.has_bounds() {
        return Err(SolveError::Precondition("budget_aware_ef takes no rent bounds; use combined_solve".into()));
    }
    solve(inst, objective, true)
}

/// Envy-free allocation within rent bounds and budgets, optimizing
/// `objective` among all such allocations.
pub fn combined_solve(inst: &Instance, objective: Objective) -> Result<SolveOutcome, SolveError> {
    solve(inst, objective, false)
}

fn solve(inst: &Instance, objective: Objective, budget_only: bool) -> Result<SolveOutcome, SolveError> {
    if objective == Objective::MaxTotalRent {
        return Err(SolveError::Precondition("the total rent is fixed; use scc_max_rent for maximum rents".into()));
    }
    let mut trace = Trace::default();
    let start = initial_ef_traced(&inst.unconstrained(), &mut trace)?;
    let mu = budget_assignment(inst, &start, &mut trace)?;
    let agent_of_room = mu.agent_of_room();
    let caps: Vec<Bound> =
        (0..inst.n()).map(|j| Bound::min(&inst.upper()[j], inst.budget(agent_of_room[j], j))).collect();
    let bounds = RoomBounds { lower: inst.lower().to_vec(), upper: caps };
    let start = Allocation::new(mu, start.rents);

    let feasible = match repair_into_bounds(inst.valuations(), &start, &bounds, &mut trace)? {
        Repair::Feasible(alloc) => alloc,
        Repair::Infeasible(mut cert) => {
            if budget_only || budget_caused(inst, &cert, &bounds) {
                cert.kind = CertificateKind::BudgetCapViolation;
            }
            return Ok(SolveOutcome::infeasible(objective, cert, trace));
        }
    };
    let vals = inst.valuations();
    let alloc = match objective {
        Objective::Any => feasible,
        Objective::Maximin => maximin_in(vals, &feasible, &bounds, Phase::Maximin, &mut trace)?,
        Objective::Leximin => leximin_in(vals, &feasible, &bounds, &mut trace)?,
        Objective::MinSpread => minspread_in(vals, &feasible, &bounds, &mut trace)?,
        Objective::MaxTotalRent => unreachable!("rejected above"),
    };
    if !check_envy_free(inst, &alloc).is_empty() || !check_constraints(inst, &alloc).all_ok() {
        return Err(SolveError::Invariant("solver produced an allocation that fails its own checks".into()));
    }
    Ok(SolveOutcome::solved(inst, objective, alloc, trace))
}

/// Whether the upper side of the witness involves a budget cap tighter than
/// the room's own upper bound.
fn budget_caused(inst: &Instance, cert: &InfeasibilityCertificate, bounds: &RoomBounds) -> bool {
    let capped = |room: usize| bounds.upper[room].cmp(&inst.upper()[room]) == Ordering::Less;
    let Some(snap) = &cert.snapshot else { return false };
    let upper_side = |room: usize| snap.bounds.upper[room].cmp_value(&snap.rents[room]) != Ordering::Greater;
    if let Some(path) = &cert.witness_path {
        return path.last().is_some_and(|&room| capped(room));
    }
    if let Some(rooms) = &cert.witness_rooms {
        return rooms.iter().all(|&r| upper_side(r)) && rooms.iter().any(|&r| capped(r));
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::validate_certificate;
    use crate::model::fixtures::*;
    use crate::model::ObjectiveValue;
    use crate::rational::int;

    fn sub_of(raw: RawInstance, start: &[i64]) -> ComponentSubproblem {
        let inst = raw.validate().unwrap();
        let alloc = Allocation::new(Assignment::identity(inst.n()), rents(start));
        ComponentSubproblem::new(&inst, &alloc, &(0..inst.n()).collect::<Vec<_>>())
    }

    #[test]
    fn singleton_component_rises_to_budget() {
        let sub = sub_of(RawInstance::new(matrix(&[&[9]]), int(1)).budgets(vec![bounds(&[6])]), &[1]);
        let best = scc_max_rent(&sub).unwrap();
        assert_eq!(best.delta, Bound::Finite(int(6)));
        assert_eq!(best.allocation.rents, rents(&[6]));
    }

    #[test]
    fn tie_component_rotates_then_rises() {
        let sub = sub_of(fix_tie().budgets(vec![bounds(&[3, 4]), bounds(&[4, 3])]), &[3, 3]);
        let mut trace = Trace::default();
        let best = scc_max_rent_traced(&sub, &mut trace).unwrap();
        assert_eq!(best.delta, Bound::Finite(int(8)));
        assert_eq!(best.allocation.rents, rents(&[4, 4]));
        assert_eq!(best.allocation.assignment, Assignment::new(vec![1, 0]).unwrap());
        let run = &trace.runs[0];
        assert_eq!(run.max_rotation_streak, 1);
    }

    #[test]
    fn tie_component_without_slack_stops() {
        let sub = sub_of(fix_tie().budgets(vec![bounds(&[3, 3]), bounds(&[3, 3])]), &[3, 3]);
        let best = scc_max_rent(&sub).unwrap();
        assert_eq!(best.delta, Bound::Finite(int(6)));
        assert_eq!(best.allocation.rents, rents(&[3, 3]));
    }

    #[test]
    fn unbounded_component() {
        let sub = sub_of(fix_tie(), &[3, 3]);
        assert_eq!(scc_max_rent(&sub).unwrap().delta, Bound::PosInf);
    }

    #[test]
    fn rejects_split_components() {
        let sub = sub_of(fix_a().budgets(vec![bounds(&[6, 5]), bounds(&[5, 3])]), &[6, 2]);
        assert!(matches!(scc_max_rent(&sub), Err(SolveError::Precondition(_))));
    }

    #[test]
    fn budget_aware_examples() {
        let inst = fix_a().budgets(vec![bounds(&[6, 5]), bounds(&[5, 3])]).validate().unwrap();
        let out = budget_aware_ef(&inst, Objective::Any).unwrap();
        let a = out.allocation.unwrap();
        assert!(a.rents[0] >= int(5) && a.rents[0] <= int(6));
        assert!(check_constraints(&inst, &a).all_ok());

        let mut raw = fix_a().budgets(vec![bounds(&[6, 5]), bounds(&[5, 3])]);
        raw.total_rent = int(10);
        let inst = raw.validate().unwrap();
        let out = budget_aware_ef(&inst, Objective::Any).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::BudgetCapViolation);
        assert_eq!(validate_certificate(&inst, &cert), Ok(()));

        let plain = fix_a().validate().unwrap();
        let out = budget_aware_ef(&plain, Objective::Any).unwrap();
        assert_eq!(out.allocation.unwrap().rents, rents(&[4, 4]));
    }

    #[test]
    fn combined_examples() {
        let ex = fix_ex().validate().unwrap();
        let out = combined_solve(&ex, Objective::Leximin).unwrap();
        assert_eq!(out.allocation.unwrap().rents, rents(&[0, 2, 0, 2]));

        let inst =
            fix_a().upper_bounds(bounds(&[5, 5])).budgets(vec![bounds(&[6, 5]), bounds(&[5, 3])]).validate().unwrap();
        let out = combined_solve(&inst, Objective::Maximin).unwrap();
        assert_eq!(out.allocation.unwrap().rents, rents(&[5, 3]));
        assert_eq!(out.objective_value, ObjectiveValue::Scalar(int(3)));

        let inst = fix_a()
            .lower_bounds(bounds(&[0, 3]))
            .upper_bounds(bounds(&[0, 8]))
            .budgets(vec![bounds(&[100, 100]), bounds(&[100, 100])])
            .validate()
            .unwrap();
        let out = combined_solve(&inst, Objective::Any).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::EnvyPathViolation);
        assert_eq!(validate_certificate(&inst, &cert), Ok(()));
    }

    #[test]
    fn combined_without_constraints_matches_bounds_pipeline() {
        let a = fix_a().validate().unwrap();
        for objective in [Objective::Maximin, Objective::Leximin, Objective::MinSpread] {
            let combined = combined_solve(&a, objective).unwrap();
            let direct = match objective {
                Objective::Maximin => crate::bounds::maximin_rents(&a, None),
                Objective::Leximin => crate::bounds::leximin_rents(&a, None),
                _ => crate::bounds::minspread_rents(&a, None),
            }
            .unwrap();
            assert_eq!(combined.allocation, direct.allocation);
        }
    }
}
