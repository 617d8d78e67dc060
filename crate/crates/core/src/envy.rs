//! Envy graphs on rooms, reachability closures, strongly connected
//! components and cycle search.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;

use crate::model::{Allocation, Bound, Instance};
use crate::rational::Rational;

/// A set of rooms over a fixed universe `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoomSet {
    members: Vec<bool>,
}

impl RoomSet {
    pub fn empty(n: usize) -> Self {
        RoomSet { members: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        RoomSet { members: vec![true; n] }
    }

    pub fn from_rooms(n: usize, rooms: impl IntoIterator<Item = usize>) -> Self {
        let mut set = RoomSet::empty(n);
        for room in rooms {
            set.insert(room);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, room: usize) -> bool {
        self.members[room]
    }

    pub fn insert(&mut self, room: usize) -> bool {
        !std::mem::replace(&mut self.members[room], true)
    }

    pub fn remove(&mut self, room: usize) {
        self.members[room] = false;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&m| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &RoomSet) -> RoomSet {
        RoomSet { members: self.members.iter().zip(&other.members).map(|(a, b)| *a || *b).collect() }
    }

    pub fn intersection(&self, other: &RoomSet) -> RoomSet {
        RoomSet { members: self.members.iter().zip(&other.members).map(|(a, b)| *a && *b).collect() }
    }

    pub fn difference(&self, other: &RoomSet) -> RoomSet {
        RoomSet { members: self.members.iter().zip(&other.members).map(|(a, b)| *a && !*b).collect() }
    }

    pub fn complement(&self) -> RoomSet {
        RoomSet { members: self.members.iter().map(|m| !m).collect() }
    }

    pub fn intersects(&self, other: &RoomSet) -> bool {
        self.members.iter().zip(&other.members).any(|(a, b)| *a && *b)
    }

    pub fn first(&self) -> Option<usize> {
        self.members.iter().position(|&m| m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeStrength {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFlavor {
    Plain,
    BudgetAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub strength: EdgeStrength,
}

/// Directed graph on rooms: `a -> b` when the occupant of `a` weakly prefers
/// `b` at current rents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyGraph {
    flavor: GraphFlavor,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

pub fn build_envy_graph(inst: &Instance, alloc: &Allocation) -> EnvyGraph {
    EnvyGraph::from_parts(inst.valuations(), None, alloc)
}

pub fn build_budget_graph(inst: &Instance, alloc: &Allocation) -> EnvyGraph {
    EnvyGraph::from_parts(inst.valuations(), Some(inst.budgets()), alloc)
}

impl EnvyGraph {
    /// Builds the plain graph, or the budget-aware one when `budgets` is
    /// given.
    pub fn from_parts(valuations: &[Vec<Rational>], budgets: Option<&[Vec<Bound>]>, alloc: &Allocation) -> Self {
        let n = alloc.rents.len();
        let rents = &alloc.rents;
        let mut edges = Vec::new();
        for (agent, &own) in alloc.assignment.room_of_agent().iter().enumerate() {
            let own_utility = &valuations[agent][own] - &rents[own];
            for room in 0..n {
                if room == own {
                    continue;
                }
                let other = &valuations[agent][room] - &rents[room];
                let strength = match other.cmp(&own_utility) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => EdgeStrength::Weak,
                    std::cmp::Ordering::Greater => EdgeStrength::Strong,
                };
                if let Some(b) = budgets {
                    if b[agent][room].cmp_value(&rents[room]) != std::cmp::Ordering::Greater {
                        continue;
                    }
                }
                edges.push(Edge { from: own, to: room, strength });
            }
        }
        edges.sort_by_key(|e| (e.from, e.to));
        let flavor = if budgets.is_some() { GraphFlavor::BudgetAware } else { GraphFlavor::Plain };
        EnvyGraph::from_edges(n, flavor, edges)
    }

    pub fn from_edges(n: usize, flavor: GraphFlavor, mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|e| (e.from, e.to));
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for e in &edges {
            out[e.from].push(e.to);
            inc[e.to].push(e.from);
        }
        for list in &mut inc {
            list.sort_unstable();
        }
        EnvyGraph { flavor, edges, out, inc }
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn flavor(&self) -> GraphFlavor {
        self.flavor
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn successors(&self, room: usize) -> &[usize] {
        &self.out[room]
    }

    pub fn predecessors(&self, room: usize) -> &[usize] {
        &self.inc[room]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out[from].binary_search(&to).is_ok()
    }

    pub fn strong_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.strength == EdgeStrength::Strong)
    }

    /// Rooms reachable from `seeds`, including the seeds.
    pub fn reachable(&self, seeds: &RoomSet) -> RoomSet {
        closure(&self.out, seeds)
    }

    /// Rooms that can reach `seeds`, including the seeds.
    pub fn co_reachable(&self, seeds: &RoomSet) -> RoomSet {
        closure(&self.inc, seeds)
    }

    /// Strongly connected components, each sorted, listed in a topological
    /// order of the condensation with ties broken by smallest room.
    pub fn scc_partition(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let comp = tarjan(&self.out);
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); count];
        for room in 0..n {
            members[comp[room]].push(room);
        }
        let mut indegree = vec![0usize; count];
        let mut succ = vec![Vec::new(); count];
        for e in &self.edges {
            let (a, b) = (comp[e.from], comp[e.to]);
            if a != b {
                succ[a].push(b);
                indegree[b] += 1;
            }
        }
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
            (0..count).filter(|&c| indegree[c] == 0).map(|c| Reverse((members[c][0], c))).collect();
        let mut order = Vec::with_capacity(count);
        while let Some(Reverse((_, c))) = heap.pop() {
            order.push(std::mem::take(&mut members[c]));
            for &d in &succ[c] {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    heap.push(Reverse((members[d][0], d)));
                }
            }
        }
        order
    }

    /// Shortest simple cycle through `start`, lexicographically smallest
    /// among the shortest, listed from `start` without repeating it.
    pub fn find_cycle_through(&self, start: usize) -> Option<Vec<usize>> {
        let n = self.n();
        // distance from each room to `start`
        let mut dist: Vec<Option<usize>> = vec![None; n];
        let mut queue = VecDeque::new();
        for &p in &self.inc[start] {
            if p != start && dist[p].is_none() {
                dist[p] = Some(1);
                queue.push_back(p);
            }
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued rooms have a distance");
            for &p in &self.inc[x] {
                if p != start && dist[p].is_none() {
                    dist[p] = Some(d + 1);
                    queue.push_back(p);
                }
            }
        }
        let length = self.out[start].iter().filter_map(|&w| dist[w]).min()?;
        let mut cycle = vec![start];
        let mut cur = start;
        let mut remaining = length;
        while remaining > 0 {
            cur = *self.out[cur]
                .iter()
                .find(|&&w| dist[w] == Some(remaining))
                .expect("a successor one step closer exists");
            cycle.push(cur);
            remaining -= 1;
        }
        Some(cycle)
    }

    /// DOT text with `W`/`S` edge labels. `names` defaults to 1-based ids.
    pub fn to_dot(&self, names: Option<&[String]>) -> String {
        let label = |room: usize| match names {
            Some(names) => format!("{:?}", names[room]),
            None => format!("\"{}\"", room + 1),
        };
        let mut dot = String::from("digraph envy {\n");
        for room in 0..self.n() {
            let _ = writeln!(dot, "  {};", label(room));
        }
        for e in &self.edges {
            let tag = match e.strength {
                EdgeStrength::Weak => "W",
                EdgeStrength::Strong => "S",
            };
            let _ = writeln!(dot, "  {} -> {} [label=\"{tag}\"];", label(e.from), label(e.to));
        }
        dot.push_str("}\n");
        dot
    }
}

fn closure(adj: &[Vec<usize>], seeds: &RoomSet) -> RoomSet {
    let mut seen = seeds.clone();
    let mut stack: Vec<usize> = seeds.iter().collect();
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Iterative Tarjan; returns a component id per vertex.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{Assignment, RawInstance};
    use proptest::prelude::*;

    fn alloc(n: usize, r: &[i64]) -> Allocation {
        Allocation::new(Assignment::identity(n), rents(r))
    }

    fn set(n: usize, rooms: &[usize]) -> RoomSet {
        RoomSet::from_rooms(n, rooms.iter().copied())
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> EnvyGraph {
        let edges = edges.iter().map(|&(from, to)| Edge { from, to, strength: EdgeStrength::Weak }).collect();
        EnvyGraph::from_edges(n, GraphFlavor::Plain, edges)
    }

    #[test]
    fn plain_graph_examples() {
        let a = fix_a().validate().unwrap();
        assert!(build_envy_graph(&a, &alloc(2, &[6, 2])).edges().is_empty());

        let g = build_envy_graph(&a, &alloc(2, &[8, 0]));
        assert_eq!(g.edges(), &[Edge { from: 0, to: 1, strength: EdgeStrength::Weak }]);

        let tie = fix_tie().validate().unwrap();
        let g = build_envy_graph(&tie, &alloc(2, &[3, 3]));
        assert_eq!(g.edges().len(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));

        let g = build_envy_graph(&a, &alloc(2, &[0, 8]));
        assert_eq!(g.strong_edges().count(), 1);
    }

    #[test]
    fn budget_graph_examples() {
        let tie = fix_tie().budgets(vec![bounds(&[3, 4]), bounds(&[4, 3])]).validate().unwrap();
        let g = build_budget_graph(&tie, &alloc(2, &[3, 3]));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert_eq!(g.flavor(), GraphFlavor::BudgetAware);

        let tight = fix_tie().budgets(vec![bounds(&[3, 3]), bounds(&[3, 3])]).validate().unwrap();
        assert!(build_budget_graph(&tight, &alloc(2, &[3, 3])).edges().is_empty());

        let a = RawInstance::new(matrix(&[&[10, 2], &[4, 6]]), crate::rational::int(8))
            .budgets(vec![bounds(&[9, 0]), bounds(&[9, 9])])
            .validate()
            .unwrap();
        assert!(!build_budget_graph(&a, &alloc(2, &[8, 0])).has_edge(0, 1));
        assert!(build_envy_graph(&a, &alloc(2, &[8, 0])).has_edge(0, 1));
    }

    #[test]
    fn reachability_examples() {
        let cycle = graph(2, &[(0, 1), (1, 0)]);
        assert_eq!(cycle.reachable(&set(2, &[0])), set(2, &[0, 1]));
        assert_eq!(cycle.co_reachable(&set(2, &[1])), set(2, &[0, 1]));
        let bare = graph(2, &[]);
        assert_eq!(bare.reachable(&set(2, &[0])), set(2, &[0]));
        assert_eq!(bare.co_reachable(&set(2, &[1])), set(2, &[1]));
        assert!(bare.reachable(&RoomSet::empty(2)).is_empty());
        assert!(bare.co_reachable(&RoomSet::empty(2)).is_empty());
    }

    #[test]
    fn scc_examples() {
        assert_eq!(graph(2, &[(0, 1), (1, 0)]).scc_partition(), vec![vec![0, 1]]);
        assert_eq!(graph(2, &[]).scc_partition(), vec![vec![0], vec![1]]);
        assert_eq!(graph(1, &[]).scc_partition(), vec![vec![0]]);
        // 2 -> 0, sources first, ties by smallest room
        assert_eq!(graph(3, &[(2, 0)]).scc_partition(), vec![vec![1], vec![2], vec![0]]);
        assert_eq!(graph(4, &[(3, 1), (1, 3), (0, 2)]).scc_partition(), vec![vec![0], vec![1, 3], vec![2]]);
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(graph(2, &[(0, 1), (1, 0)]).find_cycle_through(0), Some(vec![0, 1]));
        assert_eq!(graph(2, &[]).find_cycle_through(0), None);
        let one_way = graph(2, &[(0, 1)]);
        assert_eq!(one_way.find_cycle_through(0), None);
        assert_eq!(one_way.find_cycle_through(1), None);
        let g = graph(4, &[(0, 3), (3, 0), (0, 1), (1, 2), (2, 0), (0, 2)]);
        assert_eq!(g.find_cycle_through(0), Some(vec![0, 2]));
        let g = graph(4, &[(0, 3), (3, 2), (2, 0), (0, 1), (1, 2)]);
        assert_eq!(g.find_cycle_through(0), Some(vec![0, 1, 2]));
    }

    #[test]
    fn dot_dump() {
        let dot = graph(2, &[(0, 1)]).to_dot(None);
        assert!(dot.contains("\"1\" -> \"2\" [label=\"W\"];"));
    }

    fn random_graph(n: usize, bits: &[bool]) -> EnvyGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && bits[a * 8 + b] {
                    edges.push((a, b));
                }
            }
        }
        graph(n, &edges)
    }

    proptest! {
        #[test]
        fn reach_duality(n in 1usize..8, bits in proptest::collection::vec(any::<bool>(), 64)) {
            let g = random_graph(n, &bits);
            for i in 0..n {
                let fwd = g.reachable(&set(n, &[i]));
                for j in 0..n {
                    prop_assert_eq!(fwd.contains(j), g.co_reachable(&set(n, &[j])).contains(i));
                }
            }
        }

        #[test]
        fn cycles_match_nontrivial_components(n in 1usize..8, bits in proptest::collection::vec(any::<bool>(), 64)) {
            let g = random_graph(n, &bits);
            let parts = g.scc_partition();
            prop_assert_eq!(parts.iter().map(Vec::len).sum::<usize>(), n);
            for part in &parts {
                for &v in part {
                    let cycle = g.find_cycle_through(v);
                    prop_assert_eq!(cycle.is_some(), part.len() >= 2);
                    if let Some(c) = cycle {
                        for k in 0..c.len() {
                            prop_assert!(g.has_edge(c[k], c[(k + 1) % c.len()]));
                        }
                        prop_assert!(c.iter().all(|x| part.contains(x)));
                    }
                }
            }
            // components come in topological order
            let mut pos = vec![0; n];
            for (k, part) in parts.iter().enumerate() {
                for &v in part {
                    pos[v] = k;
                }
            }
            for e in g.edges() {
                prop_assert!(pos[e.from] <= pos[e.to]);
            }
        }
    }
}
