//! Unconstrained envy-free rents by strong-edge elimination.

use num_traits::Zero;

use crate::dynamics::{apply, next_event_raw, Event, RatePlan, Watch};
use crate::envy::{EdgeStrength, EnvyGraph, RoomSet};
use crate::error::SolveError;
use crate::matching::max_welfare_assignment;
use crate::model::{Allocation, Instance, RoomBounds};
use crate::rational::Rational;
use crate::trace::{Phase, PhaseRun, StepKind, Trace, TraceStep};

/// Envy-free allocation for the instance's total rent, ignoring bounds and
/// budgets. The assignment is [`max_welfare_assignment`].
pub fn initial_ef_allocation(inst: &Instance) -> Result<Allocation, SolveError> {
    initial_ef_traced(inst, &mut Trace::default())
}

pub(crate) fn initial_ef_traced(inst: &Instance, trace: &mut Trace) -> Result<Allocation, SolveError> {
    let n = inst.n();
    let sigma = max_welfare_assignment(inst.valuations());
    let share = inst.total_rent() / Rational::from_integer(n.into());
    let mut alloc = Allocation::new(sigma.clone(), vec![share; n]);
    let mut run = PhaseRun::new(Phase::Initial, (0..n).collect(), sigma, RoomBounds::unbounded(n), alloc.rents.clone());
    let cap = n * n * n;

    loop {
        let graph = EnvyGraph::from_parts(inst.valuations(), None, &alloc);
        let Some(edge) = graph.strong_edges().next().copied() else { break };
        let agent = alloc.assignment.agent_of_room()[edge.from];
        // one phase: keep working on this edge until it turns weak
        loop {
            let graph = EnvyGraph::from_parts(inst.valuations(), None, &alloc);
            if !graph
                .edges()
                .iter()
                .any(|e| e.from == edge.from && e.to == edge.to && e.strength == EdgeStrength::Strong)
            {
                break;
            }
            let dec = graph.co_reachable(&RoomSet::from_rooms(n, [edge.from]));
            let inc = graph.reachable(&RoomSet::from_rooms(n, [edge.to]));
            if dec.intersects(&inc) {
                return Err(SolveError::Invariant(format!(
                    "strong edge {}->{} lies on a cycle under a welfare-maximizing assignment",
                    edge.from + 1,
                    edge.to + 1
                )));
            }
            let plan = RatePlan::drain(&dec, &inc);
            let watch = Watch { gap: Some((agent, edge.to)), ..Watch::default() };
            let Event::At { time, kinds } = next_event_raw(inst.valuations(), &alloc, &plan, &watch) else {
                return Err(SolveError::Invariant("strong-edge elimination found no event".into()));
            };
            alloc = apply(&alloc, &plan, &time);
            run.iterations += 1;
            run.steps.push(TraceStep {
                time,
                kinds: kinds.into_iter().map(StepKind::Event).collect(),
                assignment: None,
                rents: alloc.rents.clone(),
                frozen: Vec::new(),
                increasing: inc.len(),
                decreasing: dec.len(),
            });
            if run.iterations > cap {
                return Err(SolveError::Invariant(format!("strong-edge elimination exceeded {cap} events")));
            }
        }
    }
    trace.push(run);
    debug_assert!(crate::model::check_envy_free(inst, &alloc).is_empty());
    Ok(alloc)
}

/// Adds `delta_total / n` to every rent.
pub fn shift_rents(alloc: &Allocation, delta_total: &Rational) -> Allocation {
    if delta_total.is_zero() {
        return alloc.clone();
    }
    let step = delta_total / Rational::from_integer(alloc.rents.len().into());
    Allocation::new(alloc.assignment.clone(), alloc.rents.iter().map(|r| r + &step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envy::build_envy_graph;
    use crate::model::fixtures::*;
    use crate::model::{check_envy_free, Assignment, RawInstance};
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn fixtures() {
        let a = fix_a().validate().unwrap();
        let alloc = initial_ef_allocation(&a).unwrap();
        assert_eq!(alloc.assignment, Assignment::identity(2));
        assert_eq!(alloc.rents, rents(&[4, 4]));

        let tie = fix_tie().validate().unwrap();
        assert_eq!(initial_ef_allocation(&tie).unwrap().rents, rents(&[3, 3]));

        let one = RawInstance::new(matrix(&[&[0]]), int(5)).validate().unwrap();
        assert_eq!(initial_ef_allocation(&one).unwrap().rents, rents(&[5]));
    }

    #[test]
    fn removes_strong_envy() {
        // uniform rents 4/4 leave agent 2 strongly preferring room 1
        let inst = RawInstance::new(matrix(&[&[10, 0], &[9, 0]]), int(8)).validate().unwrap();
        let alloc = initial_ef_allocation(&inst).unwrap();
        assert!(check_envy_free(&inst, &alloc).is_empty());
        assert_eq!(alloc.total(), int(8));
        assert_eq!(alloc.rents, vec![ratio(17, 2), ratio(-1, 2)]);
    }

    #[test]
    fn shift_examples() {
        let tie = Allocation::new(Assignment::identity(2), rents(&[3, 3]));
        assert_eq!(shift_rents(&tie, &int(4)).rents, rents(&[5, 5]));
        assert_eq!(shift_rents(&tie, &int(0)), tie);
        let one = Allocation::new(Assignment::identity(1), rents(&[5]));
        assert_eq!(shift_rents(&one, &int(-5)).rents, rents(&[0]));
    }

    proptest! {
        #[test]
        fn output_is_envy_free(
            n in 1usize..=6,
            vals in proptest::collection::vec(0i64..40, 36),
            total in -50i64..200,
        ) {
            let v: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| int(vals[i * 6 + j])).collect()).collect();
            let inst = RawInstance::new(v, int(total)).validate().unwrap();
            let mut trace = Trace::default();
            let alloc = initial_ef_traced(&inst, &mut trace).unwrap();
            prop_assert!(check_envy_free(&inst, &alloc).is_empty());
            prop_assert_eq!(alloc.total(), int(total));
            prop_assert_eq!(&alloc.assignment, &max_welfare_assignment(inst.valuations()));
            for step in &trace.runs[0].steps {
                let sum = step.rents.iter().fold(Rational::zero(), |a, r| a + r);
                prop_assert_eq!(sum, int(total));
            }

            let shifted = shift_rents(&alloc, &int(7));
            prop_assert_eq!(build_envy_graph(&inst, &shifted), build_envy_graph(&inst, &alloc));
        }
    }
}
