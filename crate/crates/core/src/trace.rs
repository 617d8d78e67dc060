//! Step-by-step record of a solve, used by the invariant suite and the
//! `--trace` output.

use std::fmt;

use crate::dynamics::EventKind;
use crate::envy::{EdgeStrength, EnvyGraph};
use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::model::{check_envy_free_raw, Allocation, Assignment, RoomBounds};
use crate::rational::{format_exact, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Strong-edge elimination from uniform rents.
    Initial,
    BoundsRepair,
    Maximin,
    Leximin,
    /// Raising the minimum utility before the spread is squeezed.
    SpreadMaximin,
    /// Lowering the maximum utility with the minimum held in place.
    SpreadMinimax,
    /// Maximum-rent search inside one strongly connected component.
    MaxRent,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Initial => "initial",
            Phase::BoundsRepair => "bounds",
            Phase::Maximin => "maximin",
            Phase::Leximin => "leximin",
            Phase::SpreadMaximin => "spread-maximin",
            Phase::SpreadMinimax => "spread-minimax",
            Phase::MaxRent => "max-rent",
        }
    }

    /// Whether every step of the phase keeps the total rent fixed.
    pub fn conserves_total(self) -> bool {
        self != Phase::MaxRent
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    Event(EventKind),
    /// Every rent moved by the same amount.
    Shift(Rational),
    /// Occupants moved one room forward along this room cycle.
    Rotate(Vec<usize>),
    Freeze(Vec<usize>),
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Event(kind) => write!(f, "{kind}"),
            StepKind::Shift(delta) => write!(f, "shift({})", format_exact(delta)),
            StepKind::Rotate(cycle) => write!(f, "rotate({})", one_based(cycle)),
            StepKind::Freeze(rooms) => write!(f, "freeze({})", one_based(rooms)),
        }
    }
}

fn one_based(rooms: &[usize]) -> String {
    rooms.iter().map(|r| (r + 1).to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// Elapsed time of the motion that ended in this step; zero for
    /// discrete steps.
    pub time: Rational,
    pub kinds: Vec<StepKind>,
    pub assignment: Option<Assignment>,
    pub rents: Vec<Rational>,
    pub frozen: Vec<usize>,
    pub increasing: usize,
    pub decreasing: usize,
}

/// One invocation of one algorithm. Rooms are local to the run and map to
/// global rooms through `rooms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRun {
    pub phase: Phase,
    pub rooms: Vec<usize>,
    /// Global agent behind each local agent.
    pub agents: Vec<usize>,
    pub assignment: Assignment,
    pub bounds: RoomBounds,
    pub start: Vec<Rational>,
    pub steps: Vec<TraceStep>,
    /// Outer-loop iterations (dynamics events, or Case 1 raises for
    /// the maximum-rent search).
    pub iterations: usize,
    /// Longest run of consecutive rotations (maximum-rent search only).
    pub max_rotation_streak: usize,
}

impl PhaseRun {
    pub fn new(
        phase: Phase,
        rooms: Vec<usize>,
        assignment: Assignment,
        bounds: RoomBounds,
        start: Vec<Rational>,
    ) -> Self {
        let agents = (0..rooms.len()).collect();
        PhaseRun {
            phase,
            rooms,
            agents,
            assignment,
            bounds,
            start,
            steps: Vec::new(),
            iterations: 0,
            max_rotation_streak: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.rooms.len()
    }

    /// Current assignment after the last recorded step.
    pub fn current_assignment(&self) -> &Assignment {
        self.steps.iter().rev().find_map(|s| s.assignment.as_ref()).unwrap_or(&self.assignment)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub runs: Vec<PhaseRun>,
}

impl Trace {
    pub fn push(&mut self, run: PhaseRun) {
        self.runs.push(run);
    }

    pub fn event_count(&self) -> usize {
        self.runs.iter().map(|r| r.steps.len()).sum()
    }

    pub fn runs_of(&self, phase: Phase) -> impl Iterator<Item = &PhaseRun> {
        self.runs.iter().filter(move |r| r.phase == phase)
    }

    /// Every broken step invariant: envy-freeness after each step (for
    /// strong-edge elimination: no new strong edge, none left), a fixed
    /// total in conserving phases, rooms staying inside their bounds once
    /// there, frozen rooms standing still, and the loop-count ceilings
    /// (`n²` repair events, `n²` maximum-rent raises, `n` consecutive
    /// rotations).
    pub fn audit(&self, valuations: &[Vec<Rational>]) -> Vec<String> {
        let mut problems = Vec::new();
        for (k, run) in self.runs.iter().enumerate() {
            let n = run.n();
            let local: Vec<Vec<Rational>> =
                run.agents.iter().map(|&a| run.rooms.iter().map(|&j| valuations[a][j].clone()).collect()).collect();
            let total: Rational = run.start.iter().sum();
            let inside = |rents: &[Rational], j: usize| {
                run.bounds.lower[j].cmp_value(&rents[j]) != Ordering::Greater
                    && run.bounds.upper[j].cmp_value(&rents[j]) != Ordering::Less
            };
            let mut assignment = &run.assignment;
            let mut previous = &run.start;
            let mut strong = strong_edges(&local, &Allocation::new(run.assignment.clone(), run.start.clone()));
            for (s, step) in run.steps.iter().enumerate() {
                let at = format!("run {k} ({}) step {s}", run.phase.name());
                if let Some(a) = &step.assignment {
                    assignment = a;
                }
                let alloc = Allocation::new(assignment.clone(), step.rents.clone());
                if run.phase == Phase::Initial {
                    // uniform start rents may carry strong envy; it may only shrink
                    let now = strong_edges(&local, &alloc);
                    if let Some((from, to)) = now.difference(&strong).next() {
                        problems.push(format!("{at}: new strong edge {}->{}", from + 1, to + 1));
                    }
                    strong = now;
                } else if let Some(v) = check_envy_free_raw(&local, &alloc).first() {
                    problems.push(format!("{at}: {v}"));
                }
                if run.phase.conserves_total() && step.rents.iter().sum::<Rational>() != total {
                    problems.push(format!("{at}: total rent drifted"));
                }
                if run.phase != Phase::Initial && run.phase != Phase::MaxRent {
                    for j in (0..n).filter(|&j| inside(previous, j) && !inside(&step.rents, j)) {
                        problems.push(format!("{at}: room {} left its bounds", j + 1));
                    }
                }
                for &j in &step.frozen {
                    if step.rents[j] != previous[j] {
                        problems.push(format!("{at}: frozen room {} moved", j + 1));
                    }
                }
                previous = &step.rents;
            }
            if run.phase == Phase::Initial && !strong.is_empty() {
                problems.push(format!("run {k} (initial): strong envy remains"));
            }
            let square = n * n;
            match run.phase {
                Phase::BoundsRepair if run.iterations > square => {
                    problems.push(format!("run {k} (bounds): {} events exceed n^2 = {square}", run.iterations))
                }
                Phase::MaxRent if run.iterations > square => {
                    problems.push(format!("run {k} (max-rent): {} raises exceed n^2 = {square}", run.iterations))
                }
                Phase::MaxRent if run.max_rotation_streak > n => problems.push(format!(
                    "run {k} (max-rent): {} consecutive rotations exceed n = {n}",
                    run.max_rotation_streak
                )),
                _ => {}
            }
        }
        problems
    }

    /// One line per step: phase, time, kinds, set sizes.
    pub fn log_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for run in &self.runs {
            for step in &run.steps {
                let kinds = step.kinds.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
                lines.push(format!(
                    "{} t={} inc={} dec={} frozen={} {}",
                    run.phase.name(),
                    format_exact(&step.time),
                    step.increasing,
                    step.decreasing,
                    step.frozen.len(),
                    kinds
                ));
            }
        }
        lines
    }
}

fn strong_edges(valuations: &[Vec<Rational>], alloc: &Allocation) -> BTreeSet<(usize, usize)> {
    EnvyGraph::from_parts(valuations, None, alloc)
        .edges()
        .iter()
        .filter(|e| e.strength == EdgeStrength::Strong)
        .map(|e| (e.from, e.to))
        .collect()
}
