//! IU-LaCAM: depth-first lazy-constraint search over configurations, with
//! IU-PIBT as the successor generator and livelock-triggered target
//! reassignment.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use crate::graph::{is_independent_with, Configuration, VertexId};
use crate::instance::{Instance, Plan};
use crate::matching::{reassign_with_bans, Assignment};
use crate::pibt::{IuPibt, Priorities, StepState};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_LIVELOCK_DEPTH: usize = 2;

/// Agents pinned to next vertices, in the node's agent order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Constraint {
    pub pins: Vec<(usize, VertexId)>,
}

impl Constraint {
    pub fn len(&self) -> usize {
        self.pins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pins.is_empty()
    }

    fn extended(&self, agent: usize, v: VertexId) -> Constraint {
        let mut pins = Vec::with_capacity(self.pins.len() + 1);
        pins.extend_from_slice(&self.pins);
        pins.push((agent, v));
        Constraint { pins }
    }
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub config: Configuration,
    pub assignment: Assignment,
    pub priorities: Priorities,
    /// Agents by descending goal priority; constraints pin them in this order.
    pub order: Vec<usize>,
    pub banned: Vec<Vec<VertexId>>,
    pub constraints: VecDeque<Constraint>,
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LacamOutcome {
    Solved(Plan),
    NoPlan,
    Timeout,
}

impl LacamOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            LacamOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LacamOptions {
    pub timeout: Duration,
    /// Ancestors inspected for livelocks; `None` turns detection off.
    pub livelock_depth: Option<usize>,
}

impl Default for LacamOptions {
    fn default() -> Self {
        LacamOptions {
            timeout: DEFAULT_TIMEOUT,
            livelock_depth: Some(DEFAULT_LIVELOCK_DEPTH),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: usize,
    pub generated: usize,
    pub nodes: usize,
    pub reinsertions: usize,
}

pub fn iu_lacam_solve(instance: &Instance, timeout: Duration, livelock_depth: usize) -> LacamOutcome {
    let options = LacamOptions {
        timeout,
        livelock_depth: Some(livelock_depth),
    };
    iu_lacam_solve_with(instance, &options).0
}

pub fn iu_lacam_solve_with(instance: &Instance, options: &LacamOptions) -> (LacamOutcome, SearchStats) {
    let mut search = Search::new(instance, options.livelock_depth);
    let outcome = search.run(Instant::now() + options.timeout);
    (outcome, search.stats)
}

/// Applies `constraint` on top of `node` and runs the generator for the
/// remaining agents. `None` when the pins or the result break independence.
pub fn constrained_generate(
    pibt: &IuPibt<'_>,
    state: &mut StepState,
    node: &SearchNode,
    constraint: &Constraint,
) -> Option<(Configuration, Assignment)> {
    state.reset(&node.config, node.assignment.clone());
    let balls = pibt.balls();
    for (k, &(i, v)) in constraint.pins.iter().enumerate() {
        if constraint.pins[..k].iter().any(|&(_, w)| balls.within(v, w)) {
            return None;
        }
        state.pin(i, v);
    }
    if constraint.is_empty() {
        pibt.resolve_all_deadlocks(state, &node.priorities);
        let order = node.priorities.agent_order(state.assignment(), pibt.distances());
        pibt.plan_in_order(state, &order);
    } else {
        pibt.plan_in_order(state, &node.order);
    }
    let q = state.next_configuration()?;
    if !is_independent_with(balls, &q) {
        return None;
    }
    Some((q, state.assignment().clone()))
}

struct Search<'a> {
    instance: &'a Instance,
    pibt: IuPibt<'a>,
    state: StepState,
    nodes: Vec<SearchNode>,
    open: Vec<usize>,
    explored: HashMap<Vec<VertexId>, usize>,
    target_key: Vec<VertexId>,
    livelock_depth: Option<usize>,
    stats: SearchStats,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, livelock_depth: Option<usize>) -> Self {
        let graph = instance.graph();
        let pibt = IuPibt::new(graph, instance.radius(), instance.target());
        let start = instance.start().clone();
        let assignment = pibt.initial_assignment(&start);
        let state = StepState::new(graph.vertex_count(), &start, assignment.clone());
        let mut search = Search {
            instance,
            pibt,
            state,
            nodes: Vec::new(),
            open: Vec::new(),
            explored: HashMap::new(),
            target_key: instance.target().key(),
            livelock_depth,
            stats: SearchStats::default(),
        };
        let p0 = Priorities::initial(instance.agent_count());
        let root = search.make_node(start, assignment, &p0, None);
        search.explored.insert(search.nodes[root].config.key(), root);
        search.open.push(root);
        search
    }

    fn make_node(
        &mut self,
        config: Configuration,
        assignment: Assignment,
        parent_priorities: &Priorities,
        parent: Option<usize>,
    ) -> usize {
        let dists = self.pibt.distances();
        let priorities = parent_priorities.updated(&config, &assignment, dists);
        let order = priorities.agent_order(&assignment, dists);
        let n = config.len();
        self.nodes.push(SearchNode {
            config,
            assignment,
            priorities,
            order,
            banned: vec![Vec::new(); n],
            constraints: VecDeque::from([Constraint::default()]),
            parent,
        });
        self.stats.nodes += 1;
        self.nodes.len() - 1
    }

    fn run(&mut self, deadline: Instant) -> LacamOutcome {
        let n = self.instance.agent_count();
        while let Some(&top) = self.open.last() {
            if Instant::now() >= deadline {
                return LacamOutcome::Timeout;
            }
            if self.nodes[top].config.key() == self.target_key {
                return LacamOutcome::Solved(self.backtrack(top));
            }
            let Some(constraint) = self.nodes[top].constraints.pop_front() else {
                self.open.pop();
                continue;
            };
            self.stats.expansions += 1;
            if constraint.len() < n {
                self.push_children(top, &constraint);
            }
            let generated = constrained_generate(&self.pibt, &mut self.state, &self.nodes[top], &constraint);
            let Some((q, g)) = generated else { continue };
            self.stats.generated += 1;
            let key = q.key();
            if self.explored.contains_key(&key) {
                if let Some(d) = self.livelock_depth {
                    self.detect_livelock_and_reassign(top, &q, &g, d);
                }
                continue;
            }
            let p = self.nodes[top].priorities.clone();
            let child = self.make_node(q, g, &p, Some(top));
            self.explored.insert(key, child);
            self.open.push(child);
        }
        LacamOutcome::NoPlan
    }

    /// Lazily extends the constraint tree: pin the next agent in node order
    /// to each vertex of its closed neighbourhood, nearest to its goal first.
    fn push_children(&mut self, top: usize, constraint: &Constraint) {
        let node = &self.nodes[top];
        let agent = node.order[constraint.len()];
        let table = self.pibt.distances().table(node.assignment.target(agent));
        let mut next = self.pibt.graph().closed_neighborhood(node.config[agent]);
        next.sort_by_key(|&v| (table[v], v));
        let children: Vec<Constraint> = next.into_iter().map(|v| constraint.extended(agent, v)).collect();
        self.nodes[top].constraints.extend(children);
    }

    /// Looks for `(q, g)` among the expanding node and its ancestors, `d + 1`
    /// nodes in all. On a hit, bans the current goals of agents stuck off
    /// their goal and, if a ban-respecting assignment exists, pushes a fresh
    /// node for `q` with the new assignment.
    fn detect_livelock_and_reassign(&mut self, expanding: usize, q: &Configuration, g: &Assignment, d: usize) {
        let mut ancestor = Some(expanding);
        for _ in 0..=d {
            let Some(a) = ancestor else { return };
            let node = &self.nodes[a];
            if node.config != *q || node.assignment != *g {
                ancestor = node.parent;
                continue;
            }
            let stuck: Vec<usize> = (0..q.len()).filter(|&i| q[i] != g.target(i)).collect();
            if stuck.is_empty() {
                return;
            }
            let mut banned = node.banned.clone();
            for &i in &stuck {
                if !banned[i].contains(&g.target(i)) {
                    banned[i].push(g.target(i));
                }
            }
            let dists = self.pibt.distances();
            let banned_columns: Vec<Vec<usize>> = banned
                .iter()
                .map(|b| b.iter().filter_map(|&t| dists.index_of(t)).collect())
                .collect();
            if let Ok(columns) = reassign_with_bans(&dists.cost_matrix(q), &banned_columns) {
                let assignment = Assignment::from_columns(&columns, dists.targets());
                let priorities = node.priorities.clone();
                let order = priorities.agent_order(&assignment, dists);
                let parent = node.parent;
                self.nodes.push(SearchNode {
                    config: q.clone(),
                    assignment,
                    priorities,
                    order,
                    banned,
                    constraints: VecDeque::from([Constraint::default()]),
                    parent,
                });
                self.stats.nodes += 1;
                self.stats.reinsertions += 1;
                self.open.push(self.nodes.len() - 1);
            }
            return;
        }
    }

    fn backtrack(&self, mut id: usize) -> Plan {
        let mut steps = vec![self.nodes[id].config.clone()];
        while let Some(parent) = self.nodes[id].parent {
            steps.push(self.nodes[parent].config.clone());
            id = parent;
        }
        steps.reverse();
        Plan::new(steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, grid, path};
    use crate::instance::validate_plan;
    use std::sync::Arc;

    fn solve(graph: crate::Graph, s: &[usize], t: &[usize], r: u32) -> (Instance, LacamOutcome) {
        let inst = Instance::new(Arc::new(graph), s.to_vec().into(), t.to_vec().into(), r).unwrap();
        let out = iu_lacam_solve(&inst, Duration::from_secs(10), 2);
        (inst, out)
    }

    #[test]
    fn trivial_instance() {
        let (_, out) = solve(path(4), &[0, 3], &[3, 0], 1);
        assert_eq!(out.plan().unwrap().makespan(), 0);
    }

    #[test]
    fn square_rotates_in_one_step() {
        let (inst, out) = solve(cycle(4), &[0, 2], &[1, 3], 1);
        let plan = out.plan().expect("both agents turn the same way");
        assert_eq!(plan.makespan(), 1);
        assert_eq!(validate_plan(&inst, plan), Ok(()));
    }

    #[test]
    fn blocked_star_has_no_plan() {
        let star = crate::Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let (_, out) = solve(star, &[1, 2], &[1, 3], 1);
        assert_eq!(out, LacamOutcome::NoPlan);
    }

    #[test]
    fn rotation_cycle_is_solved() {
        let (inst, out) = solve(cycle(8), &[0, 2, 4, 6], &[1, 3, 5, 7], 1);
        let plan = out.plan().expect("feasible");
        assert_eq!(validate_plan(&inst, plan), Ok(()));
    }

    #[test]
    fn grid_instance() {
        let (inst, out) = solve(grid(5, 5), &[0, 4, 20], &[24, 12, 2], 1);
        assert_eq!(validate_plan(&inst, out.plan().unwrap()), Ok(()));
    }

    #[test]
    fn pins_out_of_reach_are_rejected() {
        let g = path(6);
        let pibt = IuPibt::new(&g, 1, &[1, 4]);
        let a = pibt.initial_assignment(&[0, 3]);
        let mut state = StepState::new(6, &[0, 3], a.clone());
        let p = Priorities::initial(2);
        let node = SearchNode {
            config: vec![0, 3].into(),
            order: p.agent_order(&a, pibt.distances()),
            assignment: a,
            priorities: p,
            banned: vec![vec![]; 2],
            constraints: VecDeque::new(),
            parent: None,
        };
        let close = Constraint {
            pins: vec![(0, 1), (1, 2)],
        };
        assert!(constrained_generate(&pibt, &mut state, &node, &close).is_none());
        let stay = Constraint { pins: vec![(0, 0)] };
        let (q, _) = constrained_generate(&pibt, &mut state, &node, &stay).unwrap();
        assert_eq!(q[0], 0);
    }
}
