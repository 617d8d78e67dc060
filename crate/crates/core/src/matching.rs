//! Welfare-maximizing assignments.

use num_traits::Zero;

use crate::error::SolveError;
use crate::model::Assignment;
use crate::rational::Rational;

/// Largest `n` for which [`all_max_welfare_assignments`] enumerates.
pub const ENUMERATION_LIMIT: usize = 8;

/// Maximum-welfare assignment; among optima, the lexicographically smallest
/// `room_of_agent` vector.
pub fn max_welfare_assignment(valuations: &[Vec<Rational>]) -> Assignment {
    let n = valuations.len();
    if n == 0 {
        return Assignment::identity(0);
    }
    let cost: Vec<Vec<Rational>> = valuations.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
    let (mut room_of_agent, row_pot, col_pot) = hungarian(&cost);
    let tight = |agent: usize, room: usize| &row_pot[agent] + &col_pot[room] == cost[agent][room];
    lexicographic_min(n, &tight, &mut room_of_agent);
    Assignment::new(room_of_agent).expect("hungarian yields a permutation")
}

/// Min-cost perfect matching with dual potentials `u + v <= cost`, tight on
/// the returned matching.
fn hungarian(cost: &[Vec<Rational>]) -> (Vec<usize>, Vec<Rational>, Vec<Rational>) {
    let n = cost.len();
    let zero = Rational::zero();
    let mut u = vec![zero.clone(); n + 1];
    let mut v = vec![zero.clone(); n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let row0 = owner[col0];
            let mut delta: Option<Rational> = None;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = &cost[row0 - 1][col - 1] - &u[row0] - &v[col];
                if minv[col].as_ref().is_none_or(|m| reduced < *m) {
                    minv[col] = Some(reduced);
                    way[col] = col0;
                }
                let m = minv[col].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| m < d) {
                    delta = Some(m.clone());
                    col1 = col;
                }
            }
            let delta = delta.expect("an unused column remains");
            for col in 0..=n {
                if used[col] {
                    u[owner[col]] += &delta;
                    v[col] -= &delta;
                } else if let Some(m) = minv[col].as_mut() {
                    *m -= &delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut room_of_agent = vec![0; n];
    for col in 1..=n {
        room_of_agent[owner[col] - 1] = col - 1;
    }
    (room_of_agent, u[1..].to_vec(), v[1..].to_vec())
}

/// Rewrites a perfect matching of the tight graph into the lexicographically
/// smallest one by fixing agents in order and rerouting along alternating
/// paths.
fn lexicographic_min(n: usize, tight: &dyn Fn(usize, usize) -> bool, room_of_agent: &mut [usize]) {
    let mut agent_of_room = vec![0; n];
    for (agent, &room) in room_of_agent.iter().enumerate() {
        agent_of_room[room] = agent;
    }
    for agent in 0..n {
        let current = room_of_agent[agent];
        for target in 0..current {
            let holder = agent_of_room[target];
            if holder < agent || !tight(agent, target) {
                continue;
            }
            if let Some(path) = reroute(n, tight, agent, holder, target, current, room_of_agent, &agent_of_room) {
                room_of_agent[agent] = target;
                agent_of_room[target] = agent;
                for (a, room) in path {
                    room_of_agent[a] = room;
                    agent_of_room[room] = a;
                }
                break;
            }
        }
    }
}

/// Breadth-first search for an alternating path that moves `start` off
/// `taken` and ends by claiming `freed`, touching only agents after `fixed`.
#[allow(clippy::too_many_arguments)]
fn reroute(
    n: usize,
    tight: &dyn Fn(usize, usize) -> bool,
    fixed: usize,
    start: usize,
    taken: usize,
    freed: usize,
    room_of_agent: &[usize],
    agent_of_room: &[usize],
) -> Option<Vec<(usize, usize)>> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for room in 0..n {
            if room == taken || room == room_of_agent[a] || !tight(a, room) {
                continue;
            }
            if room == freed {
                let mut moves = vec![(a, room)];
                let mut cur = a;
                while let Some((prev, via)) = parent[cur] {
                    moves.push((prev, via));
                    cur = prev;
                }
                return Some(moves);
            }
            let next = agent_of_room[room];
            if next <= fixed || seen[next] {
                continue;
            }
            seen[next] = true;
            parent[next] = Some((a, room));
            queue.push_back(next);
        }
    }
    None
}

/// Every maximum-welfare assignment, sorted lexicographically, truncated to
/// `cap` entries.
pub fn all_max_welfare_assignments(valuations: &[Vec<Rational>], cap: usize) -> Result<Vec<Assignment>, SolveError> {
    let n = valuations.len();
    if n > ENUMERATION_LIMIT {
        return Err(SolveError::Size { n, limit: ENUMERATION_LIMIT });
    }
    let mut best: Option<Rational> = None;
    let mut found = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    enumerate(valuations, &mut perm, &mut used, Rational::zero(), &mut best, &mut found);
    found.truncate(cap);
    Ok(found.into_iter().map(|p| Assignment::new(p).expect("permutation")).collect())
}

fn enumerate(
    valuations: &[Vec<Rational>],
    perm: &mut Vec<usize>,
    used: &mut [bool],
    welfare: Rational,
    best: &mut Option<Rational>,
    found: &mut Vec<Vec<usize>>,
) {
    let n = valuations.len();
    if perm.len() == n {
        match best.as_ref().map(|b| welfare.cmp(b)) {
            None | Some(std::cmp::Ordering::Greater) => {
                *best = Some(welfare);
                found.clear();
                found.push(perm.clone());
            }
            Some(std::cmp::Ordering::Equal) => found.push(perm.clone()),
            Some(std::cmp::Ordering::Less) => {}
        }
        return;
    }
    let agent = perm.len();
    for room in 0..n {
        if used[room] {
            continue;
        }
        used[room] = true;
        perm.push(room);
        enumerate(valuations, perm, used, &welfare + &valuations[agent][room], best, found);
        perm.pop();
        used[room] = false;
    }
}
