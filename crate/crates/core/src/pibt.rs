//! IU-PIBT: one-step configuration generator for rIUMAPF.
//!
//! Each step resolves deadlocks by rotating targets, refreshes goal
//! priorities, then lets agents claim next vertices in priority order through
//! the recursive `func_pibt`, which keeps the outcome distance-r independent
//! and free of distance-r rotations.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use crate::graph::{bfs_distances, greedy_hop, BallTable, Configuration, Graph, VertexId};
use crate::instance::{Instance, Plan};
use crate::matching::{hungarian_assignment, Assignment};

const NONE: usize = usize::MAX;

/// One BFS table per target vertex.
#[derive(Clone, Debug)]
pub struct TargetDistances {
    targets: Vec<VertexId>,
    tables: Vec<Vec<u32>>,
    index_of: Vec<usize>,
}

impl TargetDistances {
    pub fn new(graph: &Graph, targets: &[VertexId]) -> Self {
        let mut index_of = vec![NONE; graph.vertex_count()];
        for (k, &t) in targets.iter().enumerate() {
            index_of[t] = k;
        }
        TargetDistances {
            targets: targets.to_vec(),
            tables: targets
                .iter()
                .map(|&t| bfs_distances(graph, t).as_slice().to_vec())
                .collect(),
            index_of,
        }
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    /// Position of `target` in the target list.
    pub fn index_of(&self, target: VertexId) -> Option<usize> {
        match self.index_of.get(target) {
            Some(&k) if k != NONE => Some(k),
            _ => None,
        }
    }

    /// Distances to `target`, which must be one of the targets.
    pub fn table(&self, target: VertexId) -> &[u32] {
        &self.tables[self.index_of[target]]
    }

    pub fn dist(&self, v: VertexId, target: VertexId) -> u32 {
        self.table(target)[v]
    }

    /// `cost[i][k] = dist(from[i], targets[k])`.
    pub fn cost_matrix(&self, from: &[VertexId]) -> Vec<Vec<u32>> {
        from.iter()
            .map(|&s| self.tables.iter().map(|t| t[s]).collect())
            .collect()
    }
}

/// Goal priorities `p(v)`, indexed by target position.
#[derive(Clone, Debug, PartialEq)]
pub struct Priorities(pub Vec<f64>);

impl Priorities {
    /// `p(T[k]) = (k + 1) / (|T| + 1)`: distinct fractional parts in (0, 1).
    pub fn initial(n: usize) -> Self {
        Priorities((0..n).map(|k| (k + 1) as f64 / (n + 1) as f64).collect())
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// `p'(v) = frac(p(v))` when the agent assigned to `v` already sits on
    /// it, `p(v) + 1` otherwise.
    pub fn updated(&self, config: &[VertexId], g: &Assignment, dists: &TargetDistances) -> Self {
        let mut next = self.0.clone();
        for (i, &at) in config.iter().enumerate() {
            let t = g.target(i);
            let k = dists.index_of(t).expect("assignment maps onto the targets");
            next[k] = if at == t { self.0[k].fract() } else { self.0[k] + 1.0 };
        }
        Priorities(next)
    }

    /// Agents by descending priority of their goal; ties by agent id.
    pub fn agent_order(&self, g: &Assignment, dists: &TargetDistances) -> Vec<usize> {
        let key: Vec<f64> = (0..g.len())
            .map(|i| self.0[dists.index_of(g.target(i)).expect("assigned target")])
            .collect();
        let mut order: Vec<usize> = (0..g.len()).collect();
        order.sort_by(|&a, &b| match key[b].total_cmp(&key[a]) {
            Ordering::Equal => a.cmp(&b),
            o => o,
        });
        order
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Valid,
    Invalid,
}

/// Mutable state of one generator call.
#[derive(Clone, Debug)]
pub struct StepState {
    q_from: Vec<VertexId>,
    q_to: Vec<Option<VertexId>>,
    assignment: Assignment,
    wait_chain: Vec<usize>,
    on_chain: Vec<bool>,
    from_owner: Vec<usize>,
    to_count: Vec<u32>,
    calls: usize,
}

impl StepState {
    pub fn new(vertex_count: usize, q_from: &[VertexId], assignment: Assignment) -> Self {
        let mut state = StepState {
            q_from: Vec::new(),
            q_to: Vec::new(),
            assignment: Assignment::new(Vec::new()),
            wait_chain: Vec::new(),
            on_chain: Vec::new(),
            from_owner: vec![NONE; vertex_count],
            to_count: vec![0; vertex_count],
            calls: 0,
        };
        state.reset(q_from, assignment);
        state
    }

    /// Reuses the per-vertex buffers for a new step.
    pub fn reset(&mut self, q_from: &[VertexId], assignment: Assignment) {
        for &v in &self.q_from {
            self.from_owner[v] = NONE;
        }
        for v in self.q_to.iter().flatten() {
            self.to_count[*v] = 0;
        }
        self.q_from.clear();
        self.q_from.extend_from_slice(q_from);
        for (i, &v) in q_from.iter().enumerate() {
            self.from_owner[v] = i;
        }
        self.q_to.clear();
        self.q_to.resize(q_from.len(), None);
        self.assignment = assignment;
        self.wait_chain.clear();
        self.on_chain.clear();
        self.on_chain.resize(q_from.len(), false);
        self.calls = 0;
    }

    pub fn q_from(&self) -> &[VertexId] {
        &self.q_from
    }

    pub fn q_to(&self, agent: usize) -> Option<VertexId> {
        self.q_to[agent]
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn assignment_mut(&mut self) -> &mut Assignment {
        &mut self.assignment
    }

    pub fn wait_chain(&self) -> &[usize] {
        &self.wait_chain
    }

    /// Number of `func_pibt` invocations since the last reset.
    pub fn calls(&self) -> usize {
        self.calls
    }

    /// Agent whose current vertex is `v`.
    pub fn agent_at(&self, v: VertexId) -> Option<usize> {
        match self.from_owner[v] {
            NONE => None,
            i => Some(i),
        }
    }

    /// Fixes `q_to[agent]` ahead of planning (LaCAM constraints).
    pub fn pin(&mut self, agent: usize, v: VertexId) {
        self.set_to(agent, Some(v));
    }

    /// `q_to` once every agent is decided.
    pub fn next_configuration(&self) -> Option<Configuration> {
        self.q_to.iter().copied().collect::<Option<Vec<_>>>().map(Configuration)
    }

    fn set_to(&mut self, agent: usize, v: Option<VertexId>) {
        if let Some(old) = self.q_to[agent] {
            self.to_count[old] -= 1;
        }
        if let Some(new) = v {
            self.to_count[new] += 1;
        }
        self.q_to[agent] = v;
    }
}

/// Generator bound to one graph, radius and target set.
#[derive(Clone, Debug)]
pub struct IuPibt<'g> {
    graph: &'g Graph,
    radius: u32,
    balls: BallTable,
    dists: TargetDistances,
}

impl<'g> IuPibt<'g> {
    pub fn new(graph: &'g Graph, radius: u32, targets: &[VertexId]) -> Self {
        IuPibt {
            graph,
            radius,
            balls: BallTable::new(graph, radius),
            dists: TargetDistances::new(graph, targets),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn balls(&self) -> &BallTable {
        &self.balls
    }

    pub fn distances(&self) -> &TargetDistances {
        &self.dists
    }

    /// Minimum-total-distance assignment of `start` onto the targets.
    pub fn initial_assignment(&self, start: &[VertexId]) -> Assignment {
        let columns = hungarian_assignment(&self.dists.cost_matrix(start));
        Assignment::from_columns(&columns, self.dists.targets())
    }

    /// `next^hops(s, target)`.
    pub fn next_toward(&self, s: VertexId, target: VertexId, hops: u32) -> VertexId {
        let table = self.dists.table(target);
        (0..hops).fold(s, |cur, _| greedy_hop(self.graph, cur, table))
    }

    /// Full generator step: deadlock rotation, priority update, then
    /// `func_pibt` for every undecided agent. Returns the updated priorities.
    pub fn step(&self, state: &mut StepState, p: &Priorities) -> Priorities {
        self.resolve_all_deadlocks(state, p);
        let next = p.updated(&state.q_from, &state.assignment, &self.dists);
        let order = next.agent_order(&state.assignment, &self.dists);
        self.plan_in_order(state, &order);
        next
    }

    /// Calls `func_pibt` for each still-undecided agent of `order`.
    pub fn plan_in_order(&self, state: &mut StepState, order: &[usize]) {
        for &i in order {
            if state.q_to[i].is_none() {
                self.func_pibt(i, state);
            }
        }
    }

    /// Repeats full scans (agents by descending current priority) until one
    /// finds no deadlock, at most `n` scans. Returns the rotations applied.
    pub fn resolve_all_deadlocks(&self, state: &mut StepState, p: &Priorities) -> usize {
        let mut rotations = 0;
        for _ in 0..state.q_from.len() {
            let mut found = false;
            for i in p.agent_order(&state.assignment, &self.dists) {
                if state.q_to[i].is_some() {
                    continue;
                }
                let u = self.next_toward(state.q_from[i], state.assignment.target(i), 1);
                if let Some(cycle) = self.detect_deadlock(i, u, state) {
                    resolve_deadlock(&cycle, &mut state.assignment);
                    rotations += 1;
                    found = true;
                }
            }
            if !found {
                break;
            }
        }
        rotations
    }

    /// Agents `[i = a_1, ..., a_l]` with `next^{r+1}(a_k)` landing on
    /// `a_{k+1}` and `next^{r+1}(a_l)` back on `i`; all undecided.
    pub fn detect_deadlock(&self, i: usize, u: VertexId, state: &StepState) -> Option<Vec<usize>> {
        let undecided_at = |v: VertexId| state.agent_at(v).filter(|&j| state.q_to[j].is_none());
        let v = self.next_toward(u, state.assignment.target(i), self.radius);
        let mut j = undecided_at(v).filter(|&j| j != i)?;
        let mut cycle = vec![i];
        loop {
            if cycle.contains(&j) {
                return None;
            }
            cycle.push(j);
            let w = self.next_toward(state.q_from[j], state.assignment.target(j), self.radius + 1);
            let k = undecided_at(w)?;
            if k == i {
                return Some(cycle);
            }
            j = k;
        }
    }

    /// Undecided agent parked on its own goal at `next^r(v, g(i))`.
    pub fn detect_swap(&self, i: usize, v: VertexId, state: &StepState) -> Option<usize> {
        let u = self.next_toward(v, state.assignment.target(i), self.radius);
        state
            .agent_at(u)
            .filter(|&j| state.q_to[j].is_none() && state.assignment.target(j) == u)
    }

    /// Decides `q_to[i]`, recursing into agents that sit within `r` of the
    /// chosen vertex. Falls back to staying put.
    pub fn func_pibt(&self, i: usize, state: &mut StepState) -> Outcome {
        state.calls += 1;
        let here = state.q_from[i];
        let table = self.dists.table(state.assignment.target(i));
        let mut candidates = self.graph.closed_neighborhood(here);
        candidates.sort_by_key(|&v| (table[v], v));
        for v in candidates {
            let ball = self.balls.ball(v);
            if ball.iter().any(|&u| state.to_count[u] > 0) {
                continue;
            }
            if ball
                .iter()
                .any(|&u| state.from_owner[u] != NONE && state.on_chain[state.from_owner[u]])
            {
                continue;
            }
            state.set_to(i, Some(v));
            let swapped = self.detect_swap(i, v, state);
            if let Some(k) = swapped {
                state.assignment.swap(i, k);
            }
            state.wait_chain.push(i);
            state.on_chain[i] = true;
            let mut ok = true;
            for &u in ball {
                let j = state.from_owner[u];
                if j == NONE || j == i {
                    continue;
                }
                if state.q_to[j].is_none() {
                    self.func_pibt(j, state);
                }
                if state.q_to[j].is_some_and(|w| self.balls.within(v, w)) {
                    ok = false;
                    break;
                }
            }
            state.wait_chain.pop();
            state.on_chain[i] = false;
            if ok {
                return Outcome::Valid;
            }
            if let Some(k) = swapped {
                state.assignment.swap(i, k);
            }
            state.set_to(i, None);
        }
        state.set_to(i, Some(here));
        Outcome::Invalid
    }
}

/// Rotates targets along a deadlock cycle: `a_{k+1}` takes the old goal of
/// `a_k` (and `a_1` that of `a_l`), so each agent inherits the goal of the
/// agent it was blocking.
pub fn resolve_deadlock(cycle: &[usize], g: &mut Assignment) {
    let old: Vec<VertexId> = cycle.iter().map(|&a| g.target(a)).collect();
    for (k, &goal) in old.iter().enumerate() {
        g.set_target(cycle[(k + 1) % cycle.len()], goal);
    }
}

/// One generator call from scratch.
pub fn iu_pibt_step(
    graph: &Graph,
    radius: u32,
    q_from: &[VertexId],
    targets: &[VertexId],
    g: Assignment,
    p: &Priorities,
) -> (Configuration, Assignment, Priorities) {
    let pibt = IuPibt::new(graph, radius, targets);
    let mut state = StepState::new(graph.vertex_count(), q_from, g);
    let next = pibt.step(&mut state, p);
    let q_to = state.next_configuration().expect("every agent decided");
    (q_to, state.assignment, next)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stalled {
    pub last: Configuration,
    pub steps: usize,
    /// True when the wall-clock limit, not the step limit, ended the run.
    pub timed_out: bool,
}

/// Iterates the generator from `S` until the configuration equals `T` as a
/// set, or `max_steps` steps have been taken.
pub fn run_pibt(instance: &Instance, max_steps: usize) -> Result<Plan, Stalled> {
    run_pibt_within(instance, max_steps, None)
}

pub fn run_pibt_within(instance: &Instance, max_steps: usize, timeout: Option<Duration>) -> Result<Plan, Stalled> {
    let deadline = timeout.map(|t| Instant::now() + t);
    let graph = instance.graph();
    let pibt = IuPibt::new(graph, instance.radius(), instance.target());
    let mut g = pibt.initial_assignment(instance.start());
    let mut p = Priorities::initial(instance.agent_count());
    let mut steps = vec![instance.start().clone()];
    let mut state = StepState::new(graph.vertex_count(), instance.start(), g.clone());
    loop {
        let current = steps.last().expect("plan starts at S");
        if current.same_set(instance.target()) {
            return Ok(Plan::new(steps));
        }
        let timed_out = deadline.is_some_and(|d| Instant::now() >= d);
        if steps.len() > max_steps || timed_out {
            return Err(Stalled {
                last: current.clone(),
                steps: steps.len() - 1,
                timed_out,
            });
        }
        state.reset(current, g);
        p = pibt.step(&mut state, &p);
        g = state.assignment.clone();
        steps.push(state.next_configuration().expect("every agent decided"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path};
    use crate::graph::{check_transition, is_distance_r_independent};
    use std::sync::Arc;

    fn state_for(graph: &Graph, q: &[usize], goals: &[usize]) -> StepState {
        StepState::new(graph.vertex_count(), q, Assignment::new(goals.to_vec()))
    }

    #[test]
    fn single_agent_step() {
        let g = path(5);
        let (q, _, _) = iu_pibt_step(&g, 0, &[0], &[4], Assignment::new(vec![4]), &Priorities::initial(1));
        assert_eq!(q.0, vec![1]);
    }

    #[test]
    fn priority_update() {
        let g = path(5);
        let d = TargetDistances::new(&g, &[1, 3]);
        let p = Priorities(vec![3.25, 0.25]);
        // agent 0 sits on its goal 1, agent 1 is away from goal 3
        let next = p.updated(&[1, 0], &Assignment::new(vec![1, 3]), &d);
        assert_eq!(next.0, vec![0.25, 1.25]);
        assert_eq!(Priorities::initial(3).0, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn rotation_instance_freezes() {
        let g = cycle(8);
        let goals = [1, 3, 5, 7];
        let (q, _, _) = iu_pibt_step(&g, 1, &[0, 2, 4, 6], &goals, Assignment::new(goals.to_vec()), &Priorities::initial(4));
        assert_eq!(q.0, vec![0, 2, 4, 6]);
    }

    #[test]
    fn swap_and_deadlock_helpers() {
        let g = path(6);
        let pibt = IuPibt::new(&g, 1, &[3, 5]);
        // agent 1 parked on its goal 3, right where agent 0 is heading
        let st = state_for(&g, &[0, 3], &[5, 3]);
        assert_eq!(pibt.detect_swap(0, 1, &st), None);
        assert_eq!(pibt.detect_swap(0, 2, &st), Some(1));
        let lone = state_for(&g, &[3, 0], &[3, 5]);
        assert_eq!(pibt.detect_deadlock(0, 3, &lone), None);

        let mut a = Assignment::new(vec![10, 20, 30]);
        resolve_deadlock(&[], &mut a);
        assert_eq!(a.as_slice(), &[10, 20, 30]);
        resolve_deadlock(&[0, 1], &mut a);
        assert_eq!(a.as_slice(), &[20, 10, 30]);
        resolve_deadlock(&[0, 1, 2], &mut a);
        assert_eq!(a.as_slice(), &[30, 20, 10]);
    }

    #[test]
    fn run_pibt_basics() {
        let g = Arc::new(path(5));
        let same = Instance::new(g.clone(), vec![2].into(), vec![2].into(), 0).unwrap();
        assert_eq!(run_pibt(&same, 10).unwrap().steps().len(), 1);
        let walk = Instance::new(g, vec![0].into(), vec![4].into(), 0).unwrap();
        assert_eq!(run_pibt(&walk, 10).unwrap().makespan(), 4);
    }

    #[test]
    fn steps_are_sound_on_a_path() {
        let g = path(9);
        let pibt = IuPibt::new(&g, 1, &[2, 8]);
        let mut st = state_for(&g, &[0, 5], &[8, 2]);
        pibt.step(&mut st, &Priorities::initial(2));
        let q = st.next_configuration().unwrap();
        assert!(check_transition(&g, &[0, 5], &q));
        assert!(is_distance_r_independent(&g, &q, 1));
        assert_eq!(st.calls(), 2);
    }
}
