//! Envy-free rents under per-room rent bounds, and the maximin, leximin and
//! minimum-spread refinements.
//!
//! All four procedures keep the assignment fixed and move rents along the
//! envy graph: raising a room's rent forces every room it reaches to rise at
//! least as much, and lowering it forces every room that reaches it to fall
//! at least as much.

use std::cmp::Ordering;

use crate::dynamics::{apply, next_event_raw, Event, RatePlan, Watch};
use crate::ef_base::initial_ef_traced;
use crate::envy::{EnvyGraph, RoomSet};
use crate::error::SolveError;
use crate::model::{
    check_envy_free, check_envy_free_raw, Allocation, Bound, CertificateKind, CertificateSnapshot,
    InfeasibilityCertificate, Instance, Objective, RoomBounds, SolveOutcome,
};
use crate::rational::Rational;
use crate::trace::{Phase, PhaseRun, StepKind, Trace, TraceStep};

/// Outcome of pushing rents into their bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Repair {
    Feasible(Allocation),
    Infeasible(InfeasibilityCertificate),
}

/// Room classification against the effective bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomClasses {
    /// Strictly below the lower bound.
    pub below: RoomSet,
    /// Strictly above the upper bound.
    pub above: RoomSet,
    pub at_lower: RoomSet,
    pub at_upper: RoomSet,
}

pub fn classify(rents: &[Rational], bounds: &RoomBounds) -> RoomClasses {
    let n = rents.len();
    let mut c = RoomClasses {
        below: RoomSet::empty(n),
        above: RoomSet::empty(n),
        at_lower: RoomSet::empty(n),
        at_upper: RoomSet::empty(n),
    };
    for (room, r) in rents.iter().enumerate() {
        match bounds.lower[room].cmp_value(r) {
            Ordering::Greater => c.below.insert(room),
            Ordering::Equal => c.at_lower.insert(room),
            Ordering::Less => false,
        };
        match bounds.upper[room].cmp_value(r) {
            Ordering::Less => c.above.insert(room),
            Ordering::Equal => c.at_upper.insert(room),
            Ordering::Greater => false,
        };
    }
    c
}

fn utility_by_room(valuations: &[Vec<Rational>], alloc: &Allocation) -> Vec<Rational> {
    alloc
        .assignment
        .agent_of_room()
        .iter()
        .enumerate()
        .map(|(room, &agent)| &valuations[agent][room] - &alloc.rents[room])
        .collect()
}

fn level_set(utility: &[Rational], eligible: &RoomSet, pick: Ordering) -> RoomSet {
    let n = utility.len();
    let target = eligible.iter().map(|j| &utility[j]).reduce(|a, b| if b.cmp(a) == pick { b } else { a });
    match target {
        None => RoomSet::empty(n),
        Some(t) => RoomSet::from_rooms(n, eligible.iter().filter(|&j| &utility[j] == t)),
    }
}

/// Shared state of one rent-moving run.
struct Mover<'a> {
    valuations: &'a [Vec<Rational>],
    alloc: Allocation,
    bounds: RoomBounds,
    run: PhaseRun,
    cap: usize,
}

impl<'a> Mover<'a> {
    fn new(phase: Phase, valuations: &'a [Vec<Rational>], alloc: Allocation, bounds: RoomBounds) -> Self {
        let n = alloc.rents.len();
        let run = PhaseRun::new(phase, (0..n).collect(), alloc.assignment.clone(), bounds.clone(), alloc.rents.clone());
        // generous safety net; the acceptance suite checks the tight bounds
        let cap = 8 * (n + 1) * (n + 1) * (n + 1);
        Mover { valuations, alloc, bounds, run, cap }
    }

    fn n(&self) -> usize {
        self.alloc.rents.len()
    }

    fn graph(&self) -> EnvyGraph {
        EnvyGraph::from_parts(self.valuations, None, &self.alloc)
    }

    fn classes(&self) -> RoomClasses {
        classify(&self.alloc.rents, &self.bounds)
    }

    fn utility(&self) -> Vec<Rational> {
        utility_by_room(self.valuations, &self.alloc)
    }

    fn step(
        &mut self,
        inc: &RoomSet,
        dec: &RoomSet,
        classes: Vec<RoomSet>,
        frozen: &RoomSet,
    ) -> Result<(), SolveError> {
        let plan = RatePlan::transfer(inc, dec);
        let watch = Watch { bounds: Some(&self.bounds), classes, gap: None };
        let Event::At { time, kinds } = next_event_raw(self.valuations, &self.alloc, &plan, &watch) else {
            return Err(SolveError::Invariant(format!("{} motion never stops", self.run.phase.name())));
        };
        self.alloc = apply(&self.alloc, &plan, &time);
        self.run.iterations += 1;
        self.run.steps.push(TraceStep {
            time,
            kinds: kinds.into_iter().map(StepKind::Event).collect(),
            assignment: None,
            rents: self.alloc.rents.clone(),
            frozen: frozen.to_vec(),
            increasing: inc.len(),
            decreasing: dec.len(),
        });
        if self.run.iterations > self.cap {
            return Err(SolveError::Invariant(format!("{} exceeded {} events", self.run.phase.name(), self.cap)));
        }
        Ok(())
    }

    fn record_freeze(&mut self, rooms: &RoomSet, frozen: &RoomSet) {
        self.run.steps.push(TraceStep {
            time: Rational::from_integer(0.into()),
            kinds: vec![StepKind::Freeze(rooms.to_vec())],
            assignment: None,
            rents: self.alloc.rents.clone(),
            frozen: frozen.to_vec(),
            increasing: 0,
            decreasing: 0,
        });
    }

    fn finish(self, trace: &mut Trace) -> Allocation {
        trace.push(self.run);
        self.alloc
    }
}

/// Multi-source breadth-first path from `from` to `to`, ascending neighbours.
fn witness_path(graph: &EnvyGraph, from: &RoomSet, to: &RoomSet) -> Option<Vec<usize>> {
    let n = graph.n();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = from.clone();
    let mut queue: std::collections::VecDeque<usize> = from.iter().collect();
    while let Some(x) = queue.pop_front() {
        if to.contains(x) {
            let mut path = vec![x];
            let mut cur = x;
            while let Some(p) = parent[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &y in graph.successors(x) {
            if seen.insert(y) {
                parent[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    None
}

fn one_based(rooms: &[usize], separator: &str) -> String {
    rooms.iter().map(|r| (r + 1).to_string()).collect::<Vec<_>>().join(separator)
}

fn snapshot(alloc: &Allocation, bounds: &RoomBounds) -> Option<CertificateSnapshot> {
    Some(CertificateSnapshot {
        assignment: alloc.assignment.clone(),
        rents: alloc.rents.clone(),
        bounds: bounds.clone(),
    })
}

/// Moves EF rents `start` into `bounds` while keeping them envy-free and
/// the total fixed, or proves that no envy-free rents within the bounds
/// exist for this assignment.
pub(crate) fn repair_into_bounds(
    valuations: &[Vec<Rational>],
    start: &Allocation,
    bounds: &RoomBounds,
    trace: &mut Trace,
) -> Result<Repair, SolveError> {
    let mut mover = Mover::new(Phase::BoundsRepair, valuations, start.clone(), bounds.clone());
    let n = mover.n();
    let all = RoomSet::full(n);
    let none = RoomSet::empty(n);
    loop {
        let c = mover.classes();
        if c.below.is_empty() && c.above.is_empty() {
            return Ok(Repair::Feasible(mover.finish(trace)));
        }
        let g = mover.graph();
        let reach_below = g.reachable(&c.below);
        let reach_low = reach_below.union(&g.reachable(&c.at_lower));
        let coreach_above = g.co_reachable(&c.above);
        let coreach_high = coreach_above.union(&g.co_reachable(&c.at_upper));

        let infeasible = |mover: Mover,
                          path: Option<Vec<usize>>,
                          rooms: Option<Vec<usize>>,
                          explanation: String,
                          trace: &mut Trace| {
            let snap = snapshot(&mover.alloc, &mover.bounds);
            mover.finish(trace);
            Ok(Repair::Infeasible(InfeasibilityCertificate {
                kind: CertificateKind::EnvyPathViolation,
                witness_path: path,
                witness_rooms: rooms,
                explanation,
                snapshot: snap,
            }))
        };

        if reach_low.intersects(&c.above) {
            let path = witness_path(&g, &c.below.union(&c.at_lower), &c.above).expect("reachable");
            let text = format!(
                "envy path {} runs from a room that cannot get cheaper to a room that must get cheaper",
                one_based(&path, " -> ")
            );
            return infeasible(mover, Some(path), None, text, trace);
        }
        if coreach_high.intersects(&c.below) {
            let path = witness_path(&g, &c.below, &c.above.union(&c.at_upper)).expect("co-reachable");
            let text = format!(
                "envy path {} runs from a room that must get dearer to a room that cannot get dearer",
                one_based(&path, " -> ")
            );
            return infeasible(mover, Some(path), None, text, trace);
        }

        let inc = if !c.below.is_empty() { reach_below.clone() } else { all.difference(&coreach_high) };
        let dec = if !c.above.is_empty() { coreach_above.clone() } else { all.difference(&reach_low) };
        if dec.is_empty() {
            let seeds = c.below.union(&c.at_lower).to_vec();
            let text = format!(
                "every room is envied along a path from rooms {} that cannot get cheaper, so no room can fall to offset the rise",
                one_based(&seeds, ", ")
            );
            return infeasible(mover, None, Some(seeds), text, trace);
        }
        if inc.is_empty() {
            let seeds = c.above.union(&c.at_upper).to_vec();
            let text = format!(
                "every room envies along a path into rooms {} that cannot get dearer, so no room can rise to offset the fall",
                one_based(&seeds, ", ")
            );
            return infeasible(mover, None, Some(seeds), text, trace);
        }
        mover.step(&inc, &dec, Vec::new(), &none)?;
    }
}

/// Raises the minimum utility as far as the bounds allow.
pub(crate) fn maximin_in(
    valuations: &[Vec<Rational>],
    start: &Allocation,
    bounds: &RoomBounds,
    phase: Phase,
    trace: &mut Trace,
) -> Result<Allocation, SolveError> {
    let mut mover = Mover::new(phase, valuations, start.clone(), bounds.clone());
    let n = mover.n();
    let all = RoomSet::full(n);
    let none = RoomSet::empty(n);
    loop {
        let utility = mover.utility();
        let min_set = level_set(&utility, &all, Ordering::Less);
        let c = mover.classes();
        let g = mover.graph();
        let coreach_min = g.co_reachable(&min_set);
        let blocked = coreach_min.union(&g.co_reachable(&c.at_upper));
        if blocked.is_full() || g.reachable(&c.at_lower).intersects(&min_set) {
            break;
        }
        let inc = all.difference(&blocked);
        mover.step(&inc, &coreach_min, vec![min_set], &none)?;
    }
    Ok(mover.finish(trace))
}

pub(crate) fn leximin_in(
    valuations: &[Vec<Rational>],
    start: &Allocation,
    bounds: &RoomBounds,
    trace: &mut Trace,
) -> Result<Allocation, SolveError> {
    let mut mover = Mover::new(Phase::Leximin, valuations, start.clone(), bounds.clone());
    let n = mover.n();
    let all = RoomSet::full(n);
    let mut frozen = RoomSet::empty(n);
    loop {
        if frozen.is_full() {
            break;
        }
        let utility = mover.utility();
        let min_set = level_set(&utility, &frozen.complement(), Ordering::Less);
        let c = mover.classes();
        let at_lower = c.at_lower.union(&frozen);
        let at_upper = c.at_upper.union(&frozen);
        let g = mover.graph();
        let coreach_min = g.co_reachable(&min_set);
        let blocked = coreach_min.union(&g.co_reachable(&at_upper));
        if blocked.is_full() {
            break;
        }
        let stuck = g.reachable(&at_lower).intersection(&min_set);
        if !stuck.is_empty() {
            frozen = frozen.union(&stuck);
            for room in stuck.iter() {
                let r = Bound::Finite(mover.alloc.rents[room].clone());
                mover.bounds.lower[room] = r.clone();
                mover.bounds.upper[room] = r;
            }
            mover.record_freeze(&stuck, &frozen);
            continue;
        }
        let inc = all.difference(&blocked);
        mover.step(&inc, &coreach_min, vec![min_set], &frozen)?;
    }
    Ok(mover.finish(trace))
}

/// Lowers the maximum utility while no utility drops below the current
/// minimum. Rooms at the minimum may get cheaper but not dearer.
pub(crate) fn minimax_in(
    valuations: &[Vec<Rational>],
    start: &Allocation,
    bounds: &RoomBounds,
    trace: &mut Trace,
) -> Result<Allocation, SolveError> {
    let mut mover = Mover::new(Phase::SpreadMinimax, valuations, start.clone(), bounds.clone());
    let n = mover.n();
    let all = RoomSet::full(n);
    let none = RoomSet::empty(n);
    loop {
        let utility = mover.utility();
        let max_set = level_set(&utility, &all, Ordering::Greater);
        let min_set = level_set(&utility, &all, Ordering::Less);
        let c = mover.classes();
        let at_upper = c.at_upper.union(&min_set);
        let g = mover.graph();
        let reach_max = g.reachable(&max_set);
        let pinned = reach_max.union(&g.reachable(&c.at_lower));
        if pinned.is_full() || g.co_reachable(&at_upper).intersects(&max_set) {
            break;
        }
        let dec = all.difference(&pinned);
        mover.step(&reach_max, &dec, vec![max_set, min_set], &none)?;
    }
    Ok(mover.finish(trace))
}

pub(crate) fn minspread_in(
    valuations: &[Vec<Rational>],
    start: &Allocation,
    bounds: &RoomBounds,
    trace: &mut Trace,
) -> Result<Allocation, SolveError> {
    let raised = maximin_in(valuations, start, bounds, Phase::SpreadMaximin, trace)?;
    minimax_in(valuations, &raised, bounds, trace)
}

fn check_start(inst: &Instance, start: &Allocation, require_bounds: bool) -> Result<(), SolveError> {
    if start.rents.len() != inst.n() {
        return Err(SolveError::Precondition("start allocation has the wrong size".into()));
    }
    if !check_envy_free(inst, start).is_empty() {
        return Err(SolveError::Precondition("start allocation is not envy-free".into()));
    }
    if &start.total() != inst.total_rent() {
        return Err(SolveError::Precondition("start rents do not sum to the total rent".into()));
    }
    if require_bounds {
        let c = classify(&start.rents, &inst.room_bounds());
        if !c.below.is_empty() || !c.above.is_empty() {
            return Err(SolveError::Precondition("start rents violate the rent bounds".into()));
        }
    }
    Ok(())
}

/// Envy-free rents within the instance's rent bounds, starting from the
/// envy-free allocation `start`.
pub fn ef_rents_with_bounds(inst: &Instance, start: &Allocation) -> Result<SolveOutcome, SolveError> {
    check_start(inst, start, false)?;
    let mut trace = Trace::default();
    match repair_into_bounds(inst.valuations(), start, &inst.room_bounds(), &mut trace)? {
        Repair::Feasible(alloc) => Ok(SolveOutcome::solved(inst, Objective::Any, alloc, trace)),
        Repair::Infeasible(cert) => Ok(SolveOutcome::infeasible(Objective::Any, cert, trace)),
    }
}

fn refine(
    inst: &Instance,
    start: Option<&Allocation>,
    objective: Objective,
    run: impl FnOnce(&[Vec<Rational>], &Allocation, &RoomBounds, &mut Trace) -> Result<Allocation, SolveError>,
) -> Result<SolveOutcome, SolveError> {
    let mut trace = Trace::default();
    let bounds = inst.room_bounds();
    let start = match start {
        Some(s) => {
            check_start(inst, s, true)?;
            s.clone()
        }
        None => {
            let ef = initial_ef_traced(&inst.unconstrained(), &mut trace)?;
            match repair_into_bounds(inst.valuations(), &ef, &bounds, &mut trace)? {
                Repair::Feasible(alloc) => alloc,
                Repair::Infeasible(cert) => return Ok(SolveOutcome::infeasible(objective, cert, trace)),
            }
        }
    };
    let alloc = run(inst.valuations(), &start, &bounds, &mut trace)?;
    Ok(SolveOutcome::solved(inst, objective, alloc, trace))
}

/// Envy-free rents within bounds maximizing the minimum utility. `start`
/// must be envy-free and within bounds; `None` computes one first.
pub fn maximin_rents(inst: &Instance, start: Option<&Allocation>) -> Result<SolveOutcome, SolveError> {
    refine(inst, start, Objective::Maximin, |v, s, b, t| maximin_in(v, s, b, Phase::Maximin, t))
}

pub fn leximin_rents(inst: &Instance, start: Option<&Allocation>) -> Result<SolveOutcome, SolveError> {
    refine(inst, start, Objective::Leximin, leximin_in)
}

pub fn minspread_rents(inst: &Instance, start: Option<&Allocation>) -> Result<SolveOutcome, SolveError> {
    refine(inst, start, Objective::MinSpread, minspread_in)
}

/// Re-checks an infeasibility certificate against the instance alone.
pub fn validate_certificate(inst: &Instance, cert: &InfeasibilityCertificate) -> Result<(), String> {
    if cert.kind == CertificateKind::BoundSumViolation {
        let sum = |bounds: &[Bound]| {
            bounds.iter().try_fold(Rational::from_integer(0.into()), |acc, b| b.finite().map(|v| acc + v))
        };
        let total = inst.total_rent();
        let low = sum(inst.lower()).is_some_and(|s| &s > total);
        let high = sum(inst.upper()).is_some_and(|s| &s < total);
        return if low || high { Ok(()) } else { Err("bound sums bracket the total rent".into()) };
    }

    let snap = cert.snapshot.as_ref().ok_or("certificate carries no snapshot")?;
    let n = inst.n();
    if snap.rents.len() != n || snap.assignment.n() != n {
        return Err("snapshot has the wrong size".into());
    }
    if inst.welfare(&snap.assignment) != inst.welfare(&crate::matching::max_welfare_assignment(inst.valuations())) {
        return Err("snapshot assignment is not welfare-maximizing".into());
    }
    let alloc = Allocation::new(snap.assignment.clone(), snap.rents.clone());
    if !check_envy_free_raw(inst.valuations(), &alloc).is_empty() {
        return Err("snapshot rents are not envy-free".into());
    }
    if &alloc.total() != inst.total_rent() {
        return Err("snapshot rents do not sum to the total rent".into());
    }
    let agent_of_room = snap.assignment.agent_of_room();
    for room in 0..n {
        let cap = Bound::min(&inst.upper()[room], inst.budget(agent_of_room[room], room));
        if snap.bounds.lower[room] != inst.lower()[room] || snap.bounds.upper[room] != cap {
            return Err(format!("snapshot bounds for room {} differ from the instance", room + 1));
        }
    }

    let g = EnvyGraph::from_parts(inst.valuations(), None, &alloc);
    let c = classify(&snap.rents, &snap.bounds);
    let low = c.below.union(&c.at_lower);
    let high = c.above.union(&c.at_upper);
    if let Some(path) = &cert.witness_path {
        let (&first, &last) = match (path.first(), path.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err("empty witness path".into()),
        };
        if path.iter().any(|&r| r >= n) {
            return Err("witness path names an unknown room".into());
        }
        if let Some(w) = path.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
            return Err(format!("no envy edge {} -> {}", w[0] + 1, w[1] + 1));
        }
        let forward = low.contains(first) && c.above.contains(last);
        let backward = c.below.contains(first) && high.contains(last);
        return if forward || backward {
            Ok(())
        } else {
            Err("witness path endpoints are not classified as claimed".into())
        };
    }
    if let Some(rooms) = &cert.witness_rooms {
        if rooms.iter().any(|&r| r >= n) {
            return Err("witness set names an unknown room".into());
        }
        let seeds = RoomSet::from_rooms(n, rooms.iter().copied());
        let lower_side =
            seeds.difference(&low).is_empty() && seeds.intersects(&c.below) && g.reachable(&seeds).is_full();
        let upper_side =
            seeds.difference(&high).is_empty() && seeds.intersects(&c.above) && g.co_reachable(&seeds).is_full();
        return if lower_side || upper_side { Ok(()) } else { Err("witness set does not cover every room".into()) };
    }
    Err("certificate has no witness".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{check_constraints, utilities, Assignment, RawInstance};
    use crate::rational::int;

    fn alloc(r: &[i64]) -> Allocation {
        Allocation::new(Assignment::identity(r.len()), rents(r))
    }

    fn solved_rents(outcome: &SolveOutcome) -> Vec<Rational> {
        outcome.allocation.as_ref().expect("solved").rents.clone()
    }

    #[test]
    fn repair_moves_room_down_to_cap() {
        let inst = fix_a().lower_bounds(bounds(&[0, 0])).upper_bounds(bounds(&[5, 5])).validate().unwrap();
        let out = ef_rents_with_bounds(&inst, &alloc(&[6, 2])).unwrap();
        assert_eq!(solved_rents(&out), rents(&[5, 3]));
    }

    #[test]
    fn repair_reports_envy_path() {
        let inst = fix_a().lower_bounds(bounds(&[0, 3])).upper_bounds(bounds(&[0, 8])).validate().unwrap();
        let start = crate::ef_base::initial_ef_allocation(&inst).unwrap();
        let out = ef_rents_with_bounds(&inst, &start).unwrap();
        let cert = out.certificate.expect("infeasible");
        assert_eq!(cert.kind, CertificateKind::EnvyPathViolation);
        assert_eq!(validate_certificate(&inst, &cert), Ok(()));
    }

    #[test]
    fn repair_is_identity_without_bounds() {
        let inst = fix_a().validate().unwrap();
        let out = ef_rents_with_bounds(&inst, &alloc(&[5, 3])).unwrap();
        assert_eq!(solved_rents(&out), rents(&[5, 3]));
        assert_eq!(out.trace.event_count(), 0);
    }

    #[test]
    fn maximin_examples() {
        let a = fix_a().validate().unwrap();
        let out = maximin_rents(&a, Some(&alloc(&[5, 3]))).unwrap();
        assert_eq!(solved_rents(&out), rents(&[6, 2]));
        assert_eq!(out.utilities.unwrap().0, rents(&[4, 4]));

        let capped = fix_a().upper_bounds(bounds(&[5, 5])).validate().unwrap();
        let out = maximin_rents(&capped, Some(&alloc(&[5, 3]))).unwrap();
        assert_eq!(solved_rents(&out), rents(&[5, 3]));
        assert_eq!(out.utilities.unwrap().0, rents(&[5, 3]));

        let ex = fix_ex().validate().unwrap();
        let out = maximin_rents(&ex, Some(&alloc(&[0, 2, 0, 2]))).unwrap();
        assert_eq!(out.utilities.unwrap().min(), &int(0));
    }

    #[test]
    fn leximin_examples() {
        let ex = fix_ex().validate().unwrap();
        let out = leximin_rents(&ex, None).unwrap();
        assert_eq!(solved_rents(&out), rents(&[0, 2, 0, 2]));
        assert_eq!(out.utilities.unwrap().0, rents(&[20, 17, 5, 0]));

        let a = fix_a().validate().unwrap();
        assert_eq!(solved_rents(&leximin_rents(&a, None).unwrap()), rents(&[6, 2]));

        let one = RawInstance::new(matrix(&[&[3]]), int(7)).validate().unwrap();
        assert_eq!(solved_rents(&leximin_rents(&one, None).unwrap()), rents(&[7]));
    }

    #[test]
    fn minspread_examples() {
        let ex = fix_ex().validate().unwrap();
        let out = minspread_rents(&ex, None).unwrap();
        assert_eq!(solved_rents(&out), rents(&[1, 0, 1, 2]));
        let u = out.utilities.unwrap();
        assert_eq!(u.0, rents(&[19, 19, 4, 0]));
        assert_eq!(u.spread(), int(19));

        let a = fix_a().validate().unwrap();
        let out = minspread_rents(&a, None).unwrap();
        assert_eq!(solved_rents(&out), rents(&[6, 2]));

        let tie = fix_tie().validate().unwrap();
        let out = minspread_rents(&tie, None).unwrap();
        assert_eq!(solved_rents(&out), rents(&[3, 3]));
        assert_eq!(out.utilities.unwrap().spread(), int(0));
    }

    #[test]
    fn minspread_keeps_squeezing_after_pinned_minimum() {
        // room 1 is pinned at 5; freezing every minimum-utility room after
        // the maximin phase would stop at spread 20
        let inst = RawInstance::new(matrix(&[&[10, 0, 0], &[0, 10, 0], &[0, 0, 30]]), int(15))
            .lower_bounds(vec![Bound::Finite(int(5)), Bound::NegInf, Bound::NegInf])
            .upper_bounds(vec![Bound::Finite(int(5)), Bound::PosInf, Bound::PosInf])
            .validate()
            .unwrap();
        let out = minspread_rents(&inst, Some(&alloc(&[5, 5, 5]))).unwrap();
        let u = out.utilities.clone().unwrap();
        assert_eq!(u.spread(), int(10));
        assert_eq!(u.min(), &int(5));
        let a = out.allocation.unwrap();
        assert!(check_constraints(&inst, &a).all_ok());
        assert_eq!(utilities(&inst, &a), u);
    }

    #[test]
    fn start_must_be_envy_free() {
        let a = fix_a().validate().unwrap();
        assert!(matches!(maximin_rents(&a, Some(&alloc(&[0, 8]))), Err(SolveError::Precondition(_))));
        assert!(matches!(ef_rents_with_bounds(&a, &alloc(&[1, 1])), Err(SolveError::Precondition(_))));
    }
}
