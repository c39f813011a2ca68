//! Undirected graphs, BFS distance tables and distance-r neighbourhoods.
//!
//! Every routine here is deterministic: adjacency lists are kept sorted by
//! vertex id and every argmin breaks ties towards the smaller id, so two runs
//! over the same input visit vertices in exactly the same order.

use std::collections::VecDeque;
use std::ops::{Deref, DerefMut};

use thiserror::Error;

/// Dense 0-based vertex index.
pub type VertexId = usize;

/// Sentinel stored in a [`DistanceTable`] for vertices the BFS never reached.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("coordinate list has {got} entries, expected {expected}")]
    CoordinateCount { got: usize, expected: usize },
}

/// Simple, undirected, finite and connected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    coords: Option<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges are merged; self-loops
    /// and disconnected inputs are rejected.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let graph = Graph {
            adjacency,
            coords: None,
        };
        let components = graph.component_count();
        if components != 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(graph)
    }

    /// Attaches (row, col) coordinates, one per vertex.
    pub fn with_coords(mut self, coords: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if coords.len() != self.vertex_count() {
            return Err(GraphError::CoordinateCount {
                got: coords.len(),
                expected: self.vertex_count(),
            });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Open neighbourhood, sorted ascending.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    /// Closed neighbourhood `N[v]`, sorted ascending.
    pub fn closed_neighborhood(&self, v: VertexId) -> Vec<VertexId> {
        let adj = &self.adjacency[v];
        let mut out = Vec::with_capacity(adj.len() + 1);
        let pos = adj.partition_point(|&u| u < v);
        out.extend_from_slice(&adj[..pos]);
        out.push(v);
        out.extend_from_slice(&adj[pos..]);
        out
    }

    pub fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn coords(&self, v: VertexId) -> Option<(usize, usize)> {
        self.coords.as_ref().map(|c| c[v])
    }

    pub fn has_coords(&self) -> bool {
        self.coords.is_some()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.vertex_count()
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertex_count()];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for root in 0..self.vertex_count() {
            if seen[root] {
                continue;
            }
            components += 1;
            seen[root] = true;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }
}

/// Hop distances from a single source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceTable {
    source: VertexId,
    dist: Vec<u32>,
}

impl DistanceTable {
    pub fn source(&self) -> VertexId {
        self.source
    }

    /// Distance to `v`, or `None` when unreachable.
    pub fn get(&self, v: VertexId) -> Option<u32> {
        match self.dist[v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    /// Distance to `v` with [`UNREACHABLE`] as the sentinel.
    pub fn raw(&self, v: VertexId) -> u32 {
        self.dist[v]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.dist
    }
}

pub fn bfs_distances(graph: &Graph, source: VertexId) -> DistanceTable {
    DistanceTable {
        source,
        dist: multi_source_bfs(graph, &[source], None),
    }
}

/// BFS from several sources at once. When `allowed` is given, the search never
/// enters a vertex whose flag is false (sources included).
pub fn multi_source_bfs(graph: &Graph, sources: &[VertexId], allowed: Option<&[bool]>) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; graph.vertex_count()];
    let mut queue = VecDeque::new();
    let ok = |v: VertexId| allowed.is_none_or(|mask| mask[v]);
    for &s in sources {
        if ok(s) && dist[s] == UNREACHABLE {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &w in graph.neighbors(u) {
            if dist[w] == UNREACHABLE && ok(w) {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `N^r[v]`: every vertex within `r` hops of `v`, sorted ascending.
pub fn neighborhood_r(graph: &Graph, v: VertexId, r: u32) -> Vec<VertexId> {
    ball(graph, v, r, None)
}

fn ball(graph: &Graph, v: VertexId, r: u32, allowed: Option<&[bool]>) -> Vec<VertexId> {
    let mut out = vec![v];
    let mut frontier = vec![v];
    for _ in 0..r {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in graph.neighbors(u) {
                if allowed.is_some_and(|mask| !mask[w]) || out.contains(&w) || next.contains(&w) {
                    continue;
                }
                next.push(w);
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend_from_slice(&next);
        frontier = next;
    }
    out.sort_unstable();
    out
}

/// Precomputed `N^r[v]` for every vertex of a graph.
///
/// With a mask, balls are measured inside the induced subgraph of the allowed
/// vertices and masked-out vertices get an empty ball.
#[derive(Clone, Debug)]
pub struct BallTable {
    radius: u32,
    balls: Vec<Vec<VertexId>>,
}

impl BallTable {
    pub fn new(graph: &Graph, radius: u32) -> Self {
        let balls = (0..graph.vertex_count())
            .map(|v| ball(graph, v, radius, None))
            .collect();
        BallTable { radius, balls }
    }

    pub fn masked(graph: &Graph, radius: u32, allowed: &[bool]) -> Self {
        let balls = (0..graph.vertex_count())
            .map(|v| {
                if allowed[v] {
                    ball(graph, v, radius, Some(allowed))
                } else {
                    Vec::new()
                }
            })
            .collect();
        BallTable { radius, balls }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn ball(&self, v: VertexId) -> &[VertexId] {
        &self.balls[v]
    }

    /// True when `u` lies within the radius of `v`.
    pub fn within(&self, v: VertexId, u: VertexId) -> bool {
        self.balls[v].binary_search(&u).is_ok()
    }

    /// Largest ball size, the `Δ_r` of the graph.
    pub fn max_ball(&self) -> usize {
        self.balls.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Placement of every agent on a vertex; index = agent id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Configuration(pub Vec<VertexId>);

impl Configuration {
    pub fn new(positions: Vec<VertexId>) -> Self {
        Configuration(positions)
    }

    /// Sorted copy of the occupied vertices (the unlabeled view).
    pub fn key(&self) -> Vec<VertexId> {
        let mut key = self.0.clone();
        key.sort_unstable();
        key
    }

    /// Multiset equality, ignoring which agent sits where.
    pub fn same_set(&self, other: &Configuration) -> bool {
        self.len() == other.len() && self.key() == other.key()
    }

    pub fn into_inner(self) -> Vec<VertexId> {
        self.0
    }
}

impl Deref for Configuration {
    type Target = [VertexId];
    fn deref(&self) -> &[VertexId] {
        &self.0
    }
}

impl DerefMut for Configuration {
    fn deref_mut(&mut self) -> &mut [VertexId] {
        &mut self.0
    }
}

impl From<Vec<VertexId>> for Configuration {
    fn from(v: Vec<VertexId>) -> Self {
        Configuration(v)
    }
}

impl FromIterator<VertexId> for Configuration {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        Configuration(iter.into_iter().collect())
    }
}

/// True iff every pair of agents is more than `r` hops apart. For `r = 0`
/// this reduces to "no two agents share a vertex".
pub fn is_distance_r_independent(graph: &Graph, config: &[VertexId], r: u32) -> bool {
    let mut occupied = vec![false; graph.vertex_count()];
    for &v in config {
        if occupied[v] {
            return false;
        }
        occupied[v] = true;
    }
    if r == 0 {
        return true;
    }
    config.iter().all(|&v| {
        neighborhood_r(graph, v, r)
            .into_iter()
            .all(|u| u == v || !occupied[u])
    })
}

/// Same check against a precomputed ball table (radius taken from the table).
pub fn is_independent_with(balls: &BallTable, config: &[VertexId]) -> bool {
    let mut occupied = vec![false; balls.balls.len()];
    for &v in config {
        if occupied[v] {
            return false;
        }
        occupied[v] = true;
    }
    config
        .iter()
        .all(|&v| balls.ball(v).iter().all(|&u| u == v || !occupied[u]))
}

/// Single greedy hop towards the target of `target_dist`: the closed neighbour
/// with the smallest distance, ties to the smaller vertex id.
pub fn greedy_hop(graph: &Graph, s: VertexId, target_dist: &[u32]) -> VertexId {
    let mut best = s;
    let mut best_d = target_dist[s];
    for &w in graph.neighbors(s) {
        let d = target_dist[w];
        if d < best_d || (d == best_d && w < best) {
            best = w;
            best_d = d;
        }
    }
    best
}

/// `next^r(s, t)`: `r` greedy hops from `s` towards the source of `target_dist`.
pub fn next_step_r(graph: &Graph, s: VertexId, target_dist: &DistanceTable, r: u32) -> VertexId {
    (0..r).fold(s, |cur, _| greedy_hop(graph, cur, &target_dist.dist))
}

/// Reachability between consecutive configurations: every agent stays or
/// moves along one edge.
pub fn check_transition(graph: &Graph, q_from: &[VertexId], q_to: &[VertexId]) -> bool {
    q_from.len() == q_to.len()
        && q_from
            .iter()
            .zip(q_to)
            .all(|(&u, &v)| u == v || graph.is_adjacent(u, v))
}

/// True when deleting both endpoints of some edge disconnects what is left.
/// Graphs without such an edge are the ones where IU-PIBT is complete at r = 0.
pub fn has_separating_edge(graph: &Graph) -> bool {
    let n = graph.vertex_count();
    graph.edges().any(|(u, v)| {
        let mut allowed = vec![true; n];
        allowed[u] = false;
        allowed[v] = false;
        let Some(seed) = (0..n).find(|&w| allowed[w]) else {
            return false;
        };
        let dist = multi_source_bfs(graph, &[seed], Some(&allowed));
        (0..n).any(|w| allowed[w] && dist[w] == UNREACHABLE)
    })
}
