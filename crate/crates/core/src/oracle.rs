//! Exact breadth-first search over unlabeled configurations.
//!
//! States are sorted vertex lists, so agent permutations collapse into one
//! state. Meant for small graphs, where it serves as the ground truth for
//! feasibility and optimal makespan.

use std::collections::HashMap;
use std::time::Instant;

use crate::graph::{BallTable, Graph, VertexId};
use crate::instance::{Instance, Plan};
use crate::kernel::GalacticInstance;

/// Sorted multiset of occupied vertices.
pub type ConfigSpaceKey = Vec<VertexId>;

/// States explored before the search gives up with `CapReached`.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactOutcome {
    Optimal(Plan),
    Infeasible,
    /// Horizon, state budget or deadline exhausted before an answer.
    CapReached,
}

impl ExactOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            ExactOutcome::Optimal(p) => Some(p),
            _ => None,
        }
    }

    pub fn makespan(&self) -> Option<usize> {
        self.plan().map(Plan::makespan)
    }
}

pub fn default_horizon_cap(vertex_count: usize) -> usize {
    10 * vertex_count
}

/// `C(vertices, agents)`, saturating; the number of unlabeled configurations.
pub fn configuration_space_size(vertices: usize, agents: usize) -> u128 {
    if agents > vertices {
        return 0;
    }
    let k = agents.min(vertices - agents) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(vertices as u128 - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn exact_bfs_solve(instance: &Instance, horizon_cap: usize) -> ExactOutcome {
    exact_bfs_solve_within(instance, horizon_cap, None)
}

pub fn exact_bfs_solve_within(instance: &Instance, horizon_cap: usize, deadline: Option<Instant>) -> ExactOutcome {
    let graph = instance.graph();
    let balls = BallTable::new(graph, instance.radius());
    search(
        graph,
        None,
        &balls,
        instance.start(),
        instance.target(),
        horizon_cap,
        DEFAULT_STATE_BUDGET,
        deadline,
    )
}

/// Same search with black holes holding any number of agents and
/// independence measured inside the planet subgraph.
pub fn exact_galactic_solve(instance: &GalacticInstance, horizon_cap: usize) -> ExactOutcome {
    let g = &instance.galactic;
    let balls = BallTable::masked(g.graph(), instance.radius, &g.planet_mask());
    search(
        g.graph(),
        Some(g.black_hole_mask()),
        &balls,
        &instance.start,
        &instance.target,
        horizon_cap,
        DEFAULT_STATE_BUDGET,
        None,
    )
}

struct Arena {
    keys: Vec<ConfigSpaceKey>,
    parent: Vec<usize>,
    /// `moves[s][k]`: where the agent at `keys[parent[s]][k]` went.
    moves: Vec<Vec<VertexId>>,
    index: HashMap<ConfigSpaceKey, usize>,
}

#[allow(clippy::too_many_arguments)]
fn search(
    graph: &Graph,
    black_hole: Option<&[bool]>,
    balls: &BallTable,
    start: &[VertexId],
    target: &[VertexId],
    horizon_cap: usize,
    state_budget: usize,
    deadline: Option<Instant>,
) -> ExactOutcome {
    let mut start_key = start.to_vec();
    start_key.sort_unstable();
    let mut target_key = target.to_vec();
    target_key.sort_unstable();
    if start_key == target_key {
        return ExactOutcome::Optimal(Plan::new(vec![start.to_vec().into()]));
    }
    let mut arena = Arena {
        keys: vec![start_key.clone()],
        parent: vec![usize::MAX],
        moves: vec![Vec::new()],
        index: HashMap::from([(start_key, 0)]),
    };
    let is_bh = |v: VertexId| black_hole.is_some_and(|m| m[v]);
    let mut occupied = vec![0u32; graph.vertex_count()];
    let mut frontier = vec![0];
    let mut depth = 0;
    while !frontier.is_empty() {
        if depth >= horizon_cap {
            return ExactOutcome::CapReached;
        }
        let mut next = Vec::new();
        for &s in &frontier {
            if s % 1024 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                return ExactOutcome::CapReached;
            }
            let from = arena.keys[s].clone();
            let mut dest = Vec::with_capacity(from.len());
            let mut found = None;
            successors(graph, balls, &is_bh, &from, &mut dest, &mut occupied, &mut |moves| {
                if found.is_some() {
                    return;
                }
                let mut key = moves.to_vec();
                key.sort_unstable();
                if arena.index.contains_key(&key) {
                    return;
                }
                let id = arena.keys.len();
                arena.index.insert(key.clone(), id);
                arena.keys.push(key.clone());
                arena.parent.push(s);
                arena.moves.push(moves.to_vec());
                if key == target_key {
                    found = Some(id);
                }
                next.push(id);
            });
            if let Some(goal) = found {
                return ExactOutcome::Optimal(reconstruct(&arena, goal, start));
            }
        }
        if arena.keys.len() > state_budget {
            return ExactOutcome::CapReached;
        }
        frontier = next;
        depth += 1;
    }
    ExactOutcome::Infeasible
}

/// Every synchronous move out of `from`: each agent stays or crosses one
/// edge, and planet destinations stay pairwise outside each other's balls.
fn successors(
    graph: &Graph,
    balls: &BallTable,
    is_bh: &dyn Fn(VertexId) -> bool,
    from: &[VertexId],
    dest: &mut Vec<VertexId>,
    occupied: &mut [u32],
    emit: &mut dyn FnMut(&[VertexId]),
) {
    let k = dest.len();
    if k == from.len() {
        emit(dest);
        return;
    }
    for w in graph.closed_neighborhood(from[k]) {
        let planet = !is_bh(w);
        if planet && balls.ball(w).iter().any(|&u| occupied[u] > 0) {
            continue;
        }
        if planet {
            occupied[w] += 1;
        }
        dest.push(w);
        successors(graph, balls, is_bh, from, dest, occupied, emit);
        dest.pop();
        if planet {
            occupied[w] -= 1;
        }
    }
}

fn reconstruct(arena: &Arena, goal: usize, start: &[VertexId]) -> Plan {
    let mut chain = vec![goal];
    while arena.parent[*chain.last().expect("non-empty")] != usize::MAX {
        chain.push(arena.parent[*chain.last().expect("non-empty")]);
    }
    chain.reverse();
    let mut labeled = start.to_vec();
    let mut steps = vec![labeled.clone().into()];
    for pair in chain.windows(2) {
        let (prev, cur) = (pair[0], pair[1]);
        let key = &arena.keys[prev];
        let mut used = vec![false; key.len()];
        for pos in labeled.iter_mut() {
            let k = (0..key.len())
                .find(|&k| !used[k] && key[k] == *pos)
                .expect("labeled configuration matches its key");
            used[k] = true;
            *pos = arena.moves[cur][k];
        }
        steps.push(labeled.clone().into());
    }
    Plan::new(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path};
    use crate::instance::validate_plan;
    use std::sync::Arc;

    fn inst(g: Graph, s: &[usize], t: &[usize], r: u32) -> Instance {
        Instance::new(Arc::new(g), s.to_vec().into(), t.to_vec().into(), r).unwrap()
    }

    #[test]
    fn trivial_and_shift() {
        let same = inst(path(4), &[1], &[1], 0);
        assert_eq!(exact_bfs_solve(&same, 10).makespan(), Some(0));
        let shift = inst(path(7), &[0, 3], &[3, 6], 1);
        let out = exact_bfs_solve(&shift, 70);
        assert_eq!(out.makespan(), Some(3));
        assert_eq!(validate_plan(&shift, out.plan().unwrap()), Ok(()));
    }

    #[test]
    fn square_and_star() {
        let square = inst(cycle(4), &[0, 2], &[1, 3], 1);
        assert_eq!(exact_bfs_solve(&square, 40).makespan(), Some(1));
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(exact_bfs_solve(&inst(star, &[1, 2], &[1, 3], 1), 40), ExactOutcome::Infeasible);
    }

    #[test]
    fn horizon_cap() {
        let far = inst(path(9), &[0], &[8], 0);
        assert_eq!(exact_bfs_solve(&far, 7), ExactOutcome::CapReached);
        assert_eq!(exact_bfs_solve(&far, 8).makespan(), Some(8));
    }

    #[test]
    fn black_holes_absorb_agents() {
        use crate::kernel::{GalacticGraph, GalacticInstance};
        // 0 - 1 - [2] - 3 - 4, r = 1: two agents swap ends through the hole
        let g = GalacticGraph::with_black_holes(path(5), vec![false, false, true, false, false]);
        let gi = GalacticInstance {
            galactic: g,
            start: vec![0, 4],
            target: vec![4, 0],
            radius: 1,
        };
        assert_eq!(exact_galactic_solve(&gi, 50).makespan(), Some(0));
        let gi = GalacticInstance {
            start: vec![0],
            target: vec![4],
            ..gi
        };
        let out = exact_galactic_solve(&gi, 50);
        assert_eq!(out.makespan(), Some(4));
    }

    #[test]
    fn space_size() {
        assert_eq!(configuration_space_size(10, 3), 120);
        assert_eq!(configuration_space_size(4, 5), 0);
        assert_eq!(configuration_space_size(256, 0), 1);
        assert_eq!(configuration_space_size(4096, 30), u128::MAX);
    }
}
