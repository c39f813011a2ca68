//! Problem instances, plans, plan validation and plan-quality metrics.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{check_transition, is_distance_r_independent, neighborhood_r, Configuration, Graph, VertexId};
use crate::matching::bottleneck_value;
use crate::pibt::TargetDistances;

/// Restarts the sampler attempts before giving up on a map.
pub const SAMPLE_RESTARTS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("start has {start} agents but target has {target}")]
    SizeMismatch { start: usize, target: usize },
    #[error("vertex {0} is not in the graph")]
    VertexOutOfRange(VertexId),
    #[error("vertex {0} listed twice in the {1} set")]
    Duplicate(VertexId, &'static str),
    #[error("{0} set is not distance-{1} independent")]
    NotIndependent(&'static str, u32),
    #[error("could not place {n} agents at pairwise distance > {r} after {attempts} restarts")]
    GenerationFailed { n: usize, r: u32, attempts: usize },
}

/// `(G, S, T, r)` with `|S| = |T|` and both sets distance-r independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    graph: Arc<Graph>,
    start: Configuration,
    target: Configuration,
    radius: u32,
}

impl Instance {
    pub fn new(
        graph: Arc<Graph>,
        start: Configuration,
        target: Configuration,
        radius: u32,
    ) -> Result<Self, InstanceError> {
        if start.len() != target.len() {
            return Err(InstanceError::SizeMismatch {
                start: start.len(),
                target: target.len(),
            });
        }
        for (set, name) in [(&start, "start"), (&target, "target")] {
            let mut seen = vec![false; graph.vertex_count()];
            for &v in set.iter() {
                if !graph.contains(v) {
                    return Err(InstanceError::VertexOutOfRange(v));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(InstanceError::Duplicate(v, name));
                }
            }
            if !is_distance_r_independent(&graph, set, radius) {
                return Err(InstanceError::NotIndependent(name, radius));
            }
        }
        Ok(Instance {
            graph,
            start,
            target,
            radius,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn start(&self) -> &Configuration {
        &self.start
    }

    pub fn target(&self) -> &Configuration {
        &self.target
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn agent_count(&self) -> usize {
        self.start.len()
    }

    /// Same sets, different radius; re-checks independence.
    pub fn with_radius(&self, radius: u32) -> Result<Self, InstanceError> {
        Instance::new(self.graph.clone(), self.start.clone(), self.target.clone(), radius)
    }
}

/// Draws `S` then `T` from one seeded stream. Each set comes from a shuffled
/// vertex order, greedily keeping every vertex farther than `r` from those
/// already kept; a fresh shuffle is tried when fewer than `n` survive.
pub fn sample_random_instance(
    graph: Arc<Graph>,
    n: usize,
    r: u32,
    seed: u64,
) -> Result<Instance, InstanceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = sample_independent_set(&graph, n, r, &mut rng)?;
    let target = sample_independent_set(&graph, n, r, &mut rng)?;
    Instance::new(graph, start, target, r)
}

fn sample_independent_set(
    graph: &Graph,
    n: usize,
    r: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Configuration, InstanceError> {
    let mut order: Vec<VertexId> = (0..graph.vertex_count()).collect();
    for _ in 0..SAMPLE_RESTARTS {
        order.shuffle(rng);
        let mut blocked = vec![false; graph.vertex_count()];
        let mut chosen = Vec::with_capacity(n);
        for &v in &order {
            if chosen.len() == n {
                break;
            }
            if blocked[v] {
                continue;
            }
            chosen.push(v);
            for u in neighborhood_r(graph, v, r) {
                blocked[u] = true;
            }
        }
        if chosen.len() == n {
            return Ok(Configuration(chosen));
        }
    }
    Err(InstanceError::GenerationFailed {
        n,
        r,
        attempts: SAMPLE_RESTARTS,
    })
}

/// Sequence of configurations, one per time step, agents in a fixed order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    steps: Vec<Configuration>,
}

impl Plan {
    pub fn new(steps: Vec<Configuration>) -> Self {
        Plan { steps }
    }

    pub fn steps(&self) -> &[Configuration] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<Configuration> {
        self.steps
    }

    /// Number of moves, `|steps| - 1` (0 for an empty plan).
    pub fn makespan(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyPlan,
    AgentCount,
    VertexOutOfRange,
    StartMismatch,
    GoalMismatch,
    Reachability { agent: usize },
    Independence,
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("plan violation at step {step}: {kind}")]
pub struct Violation {
    pub step: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::EmptyPlan => write!(f, "plan has no steps"),
            ViolationKind::AgentCount => write!(f, "wrong number of agents"),
            ViolationKind::VertexOutOfRange => write!(f, "vertex out of range"),
            ViolationKind::StartMismatch => write!(f, "first configuration differs from the start set"),
            ViolationKind::GoalMismatch => write!(f, "last configuration differs from the target set"),
            ViolationKind::Reachability { agent } => write!(f, "agent {agent} moved more than one edge"),
            ViolationKind::Independence => write!(f, "two agents within the radius"),
        }
    }
}

/// Checks the endpoints (as sets), per-agent reachability and distance-r
/// independence; reports the earliest failing step.
pub fn validate_plan(instance: &Instance, plan: &Plan) -> Result<(), Violation> {
    let graph = instance.graph();
    let steps = plan.steps();
    let fail = |step, kind| Err(Violation { step, kind });
    if steps.is_empty() {
        return fail(0, ViolationKind::EmptyPlan);
    }
    let n = instance.agent_count();
    for (k, q) in steps.iter().enumerate() {
        if q.len() != n {
            return fail(k, ViolationKind::AgentCount);
        }
        if q.iter().any(|&v| !graph.contains(v)) {
            return fail(k, ViolationKind::VertexOutOfRange);
        }
        if k == 0 && !q.same_set(instance.start()) {
            return fail(0, ViolationKind::StartMismatch);
        }
        if k > 0 && !check_transition(graph, &steps[k - 1], q) {
            let agent = (0..n)
                .find(|&i| !check_transition(graph, &[steps[k - 1][i]], &[q[i]]))
                .unwrap_or(0);
            return fail(k, ViolationKind::Reachability { agent });
        }
        if !is_distance_r_independent(graph, q, instance.radius()) {
            return fail(k, ViolationKind::Independence);
        }
    }
    let last = steps.len() - 1;
    if !steps[last].same_set(instance.target()) {
        return fail(last, ViolationKind::GoalMismatch);
    }
    Ok(())
}

/// `cost[i][j] = dist(S[i], T[j])`.
pub fn start_target_costs(instance: &Instance) -> Vec<Vec<u32>> {
    let dists = TargetDistances::new(instance.graph(), instance.target());
    dists.cost_matrix(instance.start())
}

/// Bottleneck matching value between `S` and `T`: no plan can be shorter.
pub fn bottleneck_lower_bound(instance: &Instance) -> u32 {
    bottleneck_value(&start_target_costs(instance))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanMetrics {
    pub makespan: usize,
    pub lower_bound: u32,
    /// `makespan / lower_bound`, with `0 / 0` taken as 1.
    pub suboptimality: f64,
}

pub fn plan_metrics(instance: &Instance, plan: &Plan) -> Result<PlanMetrics, Violation> {
    validate_plan(instance, plan)?;
    let makespan = plan.makespan();
    let lower_bound = bottleneck_lower_bound(instance);
    let suboptimality = if lower_bound == 0 {
        // a valid plan on S = T may still wander; 0/0 is the only "1" case
        if makespan == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        makespan as f64 / lower_bound as f64
    };
    Ok(PlanMetrics {
        makespan,
        lower_bound,
        suboptimality,
    })
}
