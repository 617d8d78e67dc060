//! Event-driven rent motion. Rents move along straight lines
//! `r_j(t) = r_j + c_j t`; the engine finds the first moment the envy graph,
//! a bound, or a tracked utility class changes, and jumps there exactly.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::envy::RoomSet;
use crate::model::{Allocation, Bound, Instance, RoomBounds};
use crate::rational::{format_exact, Rational};

/// Per-room rent velocity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatePlan {
    pub rate_of_room: Vec<Rational>,
}

impl RatePlan {
    pub fn still(n: usize) -> Self {
        RatePlan { rate_of_room: vec![Rational::zero(); n] }
    }

    /// `+1` on `inc`, `-|inc|/|dec|` on `dec`.
    pub fn transfer(inc: &RoomSet, dec: &RoomSet) -> Self {
        let n = inc.universe();
        let mut plan = RatePlan::still(n);
        let down = Rational::new(inc.len().into(), dec.len().into());
        for room in inc.iter() {
            plan.rate_of_room[room] = Rational::from_integer(1.into());
        }
        for room in dec.iter() {
            plan.rate_of_room[room] = -down.clone();
        }
        plan
    }

    /// `-1` on `dec`, `+|dec|/|inc|` on `inc`.
    pub fn drain(dec: &RoomSet, inc: &RoomSet) -> Self {
        let n = inc.universe();
        let mut plan = RatePlan::still(n);
        let up = Rational::new(dec.len().into(), inc.len().into());
        for room in dec.iter() {
            plan.rate_of_room[room] = Rational::from_integer((-1).into());
        }
        for room in inc.iter() {
            plan.rate_of_room[room] = up.clone();
        }
        plan
    }

    pub fn rate(&self, room: usize) -> &Rational {
        &self.rate_of_room[room]
    }

    pub fn is_conserving(&self) -> bool {
        self.rate_of_room.iter().fold(Rational::zero(), |acc, c| acc + c).is_zero()
    }

    pub fn is_still(&self) -> bool {
        self.rate_of_room.iter().all(Zero::is_zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    /// `agent` becomes indifferent between its room and `room`.
    NewWeakEdge {
        agent: usize,
        room: usize,
    },
    BoundHit {
        room: usize,
        side: BoundSide,
    },
    /// `room` reaches the utility of the tracked class containing `member`.
    UtilityMerge {
        member: usize,
        room: usize,
    },
    /// A strong preference of `agent` for `room` shrinks to indifference.
    GapClosed {
        agent: usize,
        room: usize,
    },
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::NewWeakEdge { agent, room } => write!(f, "edge(agent {}, room {})", agent + 1, room + 1),
            EventKind::BoundHit { room, side } => {
                let side = match side {
                    BoundSide::Lower => "lower",
                    BoundSide::Upper => "upper",
                };
                write!(f, "{side}(room {})", room + 1)
            }
            EventKind::UtilityMerge { member, room } => write!(f, "merge(room {}, room {})", member + 1, room + 1),
            EventKind::GapClosed { agent, room } => write!(f, "gap(agent {}, room {})", agent + 1, room + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// Earliest event time with every kind that fires at that time.
    At { time: Rational, kinds: Vec<EventKind> },
    /// Nothing ever happens along this ray.
    Unbounded,
}

impl Event {
    pub fn time(&self) -> Option<&Rational> {
        match self {
            Event::At { time, .. } => Some(time),
            Event::Unbounded => None,
        }
    }
}

/// What the engine watches besides new weak-envy edges.
#[derive(Debug, Clone, Default)]
pub struct Watch<'a> {
    pub bounds: Option<&'a RoomBounds>,
    /// Each class is a set of rooms of equal occupant utility; an event fires
    /// when an outside room's utility meets a class member's.
    pub classes: Vec<RoomSet>,
    /// Agent/room pair whose strong preference is being closed.
    pub gap: Option<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("step {requested} overshoots the next event at {limit}")]
pub struct OvershootError {
    pub requested: String,
    pub limit: String,
}

struct Earliest {
    time: Option<Rational>,
    kinds: Vec<EventKind>,
}

impl Earliest {
    fn offer(&mut self, time: Rational, kind: EventKind) {
        debug_assert!(time.is_positive());
        match self.time.as_ref().map(|t| time.cmp(t)) {
            None | Some(Ordering::Less) => {
                self.time = Some(time);
                self.kinds = vec![kind];
            }
            Some(Ordering::Equal) => self.kinds.push(kind),
            Some(Ordering::Greater) => {}
        }
    }
}

pub fn next_event(inst: &Instance, alloc: &Allocation, plan: &RatePlan, watch: &Watch) -> Event {
    next_event_raw(inst.valuations(), alloc, plan, watch)
}

pub(crate) fn next_event_raw(
    valuations: &[Vec<Rational>],
    alloc: &Allocation,
    plan: &RatePlan,
    watch: &Watch,
) -> Event {
    let n = alloc.rents.len();
    let rents = &alloc.rents;
    let rate = &plan.rate_of_room;
    let mut best = Earliest { time: None, kinds: Vec::new() };

    for (agent, &own) in alloc.assignment.room_of_agent().iter().enumerate() {
        let own_utility = &valuations[agent][own] - &rents[own];
        for room in 0..n {
            if room == own || rate[own] == rate[room] {
                continue;
            }
            let slack = &own_utility - (&valuations[agent][room] - &rents[room]);
            // d(slack)/dt = c_room - c_own
            let closing = &rate[own] - &rate[room];
            if slack.is_positive() && closing.is_positive() {
                best.offer(slack / closing, EventKind::NewWeakEdge { agent, room });
            } else if watch.gap == Some((agent, room)) && slack.is_negative() && closing.is_negative() {
                best.offer(slack / closing, EventKind::GapClosed { agent, room });
            }
        }
    }

    if let Some(bounds) = watch.bounds {
        for room in 0..n {
            let c = &rate[room];
            let r = &rents[room];
            let target = match c.cmp(&Rational::zero()) {
                Ordering::Greater => {
                    if bounds.lower[room].cmp_value(r) == Ordering::Greater {
                        Some((&bounds.lower[room], BoundSide::Lower))
                    } else if bounds.upper[room].cmp_value(r) == Ordering::Greater {
                        Some((&bounds.upper[room], BoundSide::Upper))
                    } else {
                        None
                    }
                }
                Ordering::Less => {
                    if bounds.upper[room].cmp_value(r) == Ordering::Less {
                        Some((&bounds.upper[room], BoundSide::Upper))
                    } else if bounds.lower[room].cmp_value(r) == Ordering::Less {
                        Some((&bounds.lower[room], BoundSide::Lower))
                    } else {
                        None
                    }
                }
                Ordering::Equal => None,
            };
            if let Some((Bound::Finite(b), side)) = target {
                best.offer((b - r) / c, EventKind::BoundHit { room, side });
            }
        }
    }

    if !watch.classes.is_empty() {
        let agent_of_room = alloc.assignment.agent_of_room();
        let utility: Vec<Rational> = (0..n).map(|j| &valuations[agent_of_room[j]][j] - &rents[j]).collect();
        for class in &watch.classes {
            for room in (0..n).filter(|&x| !class.contains(x)) {
                let mut hit: Option<(Rational, usize)> = None;
                for member in class.iter() {
                    // utility velocity is -c
                    let closing = &rate[room] - &rate[member];
                    let gap = &utility[room] - &utility[member];
                    if gap.is_zero() || closing.is_zero() || gap.is_positive() != closing.is_positive() {
                        continue;
                    }
                    let t = gap / closing;
                    if hit.as_ref().is_none_or(|(h, _)| t < *h) {
                        hit = Some((t, member));
                    }
                }
                if let Some((t, member)) = hit {
                    best.offer(t, EventKind::UtilityMerge { member, room });
                }
            }
        }
    }

    match best.time {
        None => Event::Unbounded,
        Some(time) => {
            let mut kinds = best.kinds;
            kinds.sort();
            kinds.dedup();
            Event::At { time, kinds }
        }
    }
}

/// Moves rents to time `t`, refusing to pass the next event.
pub fn advance(
    inst: &Instance,
    alloc: &Allocation,
    plan: &RatePlan,
    watch: &Watch,
    t: &Rational,
) -> Result<Allocation, OvershootError> {
    if let Event::At { time, .. } = next_event(inst, alloc, plan, watch) {
        if t > &time {
            return Err(OvershootError { requested: format_exact(t), limit: format_exact(&time) });
        }
    }
    Ok(apply(alloc, plan, t))
}

pub(crate) fn apply(alloc: &Allocation, plan: &RatePlan, t: &Rational) -> Allocation {
    let rents = alloc.rents.iter().zip(&plan.rate_of_room).map(|(r, c)| r + c * t).collect();
    Allocation::new(alloc.assignment.clone(), rents)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{check_envy_free, Assignment};
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn fix_a_at(r: &[i64]) -> (Instance, Allocation) {
        (fix_a().validate().unwrap(), Allocation::new(Assignment::identity(2), rents(r)))
    }

    fn plan(c: &[i64]) -> RatePlan {
        RatePlan { rate_of_room: rents(c) }
    }

    #[test]
    fn utility_merge_event() {
        let (inst, alloc) = fix_a_at(&[5, 3]);
        let watch = Watch { classes: vec![RoomSet::from_rooms(2, [1])], ..Watch::default() };
        let event = next_event(&inst, &alloc, &plan(&[1, -1]), &watch);
        assert_eq!(event, Event::At { time: int(1), kinds: vec![EventKind::UtilityMerge { member: 1, room: 0 }] });
    }

    #[test]
    fn bound_hit_preempts_merge() {
        let (inst, alloc) = fix_a_at(&[5, 3]);
        let bounds =
            RoomBounds { lower: vec![Bound::NegInf; 2], upper: vec![Bound::Finite(ratio(11, 2)), Bound::PosInf] };
        let watch = Watch { bounds: Some(&bounds), classes: vec![RoomSet::from_rooms(2, [1])], gap: None };
        let event = next_event(&inst, &alloc, &plan(&[1, -1]), &watch);
        assert_eq!(
            event,
            Event::At { time: ratio(1, 2), kinds: vec![EventKind::BoundHit { room: 0, side: BoundSide::Upper }] }
        );
    }

    #[test]
    fn still_plan_is_unbounded() {
        let (inst, alloc) = fix_a_at(&[5, 3]);
        assert_eq!(next_event(&inst, &alloc, &RatePlan::still(2), &Watch::default()), Event::Unbounded);
    }

    #[test]
    fn new_edge_event() {
        let (inst, alloc) = fix_a_at(&[5, 3]);
        // agent 1: own 5 - t, room 2: t - 1, equal at t = 3
        let event = next_event(&inst, &alloc, &plan(&[1, -1]), &Watch::default());
        assert_eq!(event, Event::At { time: int(3), kinds: vec![EventKind::NewWeakEdge { agent: 0, room: 1 }] });
    }

    #[test]
    fn advance_examples() {
        let (inst, alloc) = fix_a_at(&[5, 3]);
        let watch = Watch { classes: vec![RoomSet::from_rooms(2, [1])], ..Watch::default() };
        let p = plan(&[1, -1]);
        assert_eq!(advance(&inst, &alloc, &p, &watch, &int(1)).unwrap().rents, rents(&[6, 2]));
        assert_eq!(advance(&inst, &alloc, &p, &watch, &int(0)).unwrap(), alloc);
        assert!(advance(&inst, &alloc, &p, &watch, &int(2)).is_err());
    }

    #[test]
    fn gap_closing() {
        let (inst, alloc) = fix_a_at(&[0, 8]);
        // agent 2 prefers room 1 by 6; closing at rate 2
        let watch = Watch { gap: Some((1, 0)), ..Watch::default() };
        let event = next_event(&inst, &alloc, &plan(&[1, -1]), &watch);
        assert_eq!(event, Event::At { time: int(3), kinds: vec![EventKind::GapClosed { agent: 1, room: 0 }] });
    }

    #[test]
    fn transfer_plans_conserve() {
        let inc = RoomSet::from_rooms(5, [0, 3]);
        let dec = RoomSet::from_rooms(5, [1, 2, 4]);
        let p = RatePlan::transfer(&inc, &dec);
        assert!(p.is_conserving());
        assert_eq!(p.rate(1), &ratio(-2, 3));
        let q = RatePlan::drain(&dec, &inc);
        assert!(q.is_conserving());
        assert_eq!(q.rate(0), &ratio(3, 2));
    }

    proptest! {
        #[test]
        fn advancing_to_event_is_safe(
            vals in proptest::collection::vec(0i64..20, 9),
            split in 1usize..3,
        ) {
            let v: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| int(vals[i * 3 + j])).collect()).collect();
            let inst = crate::model::RawInstance::new(v, int(30)).validate().unwrap();
            let alloc = crate::ef_base::initial_ef_allocation(&inst).unwrap();
            let graph = crate::envy::build_envy_graph(&inst, &alloc);
            let inc = graph.reachable(&RoomSet::from_rooms(3, 0..split));
            prop_assume!(!inc.is_full());
            let dec = inc.complement();
            let p = RatePlan::transfer(&inc, &dec);
            if let Event::At { time, kinds } = next_event(&inst, &alloc, &p, &Watch::default()) {
                let moved = apply(&alloc, &p, &time);
                prop_assert!(check_envy_free(&inst, &moved).is_empty());
                prop_assert_eq!(moved.total(), alloc.total());
                for kind in kinds {
                    if let EventKind::NewWeakEdge { agent, room } = kind {
                        let own = moved.assignment.room(agent);
                        prop_assert_eq!(
                            inst.value(agent, own) - &moved.rents[own],
                            inst.value(agent, room) - &moved.rents[room]
                        );
                    }
                }
            }
        }
    }
}
