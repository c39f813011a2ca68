//! Galactic graphs and the two feasibility-preserving reduction rules.
//!
//! A galactic graph splits its vertices into planets, where agents must stay
//! distance-r independent (measured inside the planet subgraph), and black
//! holes, which absorb up to `n` agents each. Far-away parts of the map are
//! contracted into black holes; adjacent black holes are merged.

use crate::graph::{multi_source_bfs, BallTable, Graph, VertexId, UNREACHABLE};
use crate::instance::Instance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalacticGraph {
    graph: Graph,
    black_hole: Vec<bool>,
    provenance: Vec<Vec<VertexId>>,
}

impl GalacticGraph {
    /// All planets; every vertex is its own provenance.
    pub fn from_graph(graph: Graph) -> Self {
        let n = graph.vertex_count();
        GalacticGraph {
            graph,
            black_hole: vec![false; n],
            provenance: (0..n).map(|v| vec![v]).collect(),
        }
    }

    /// Explicit partition; provenance defaults to the identity.
    pub fn with_black_holes(graph: Graph, black_hole: Vec<bool>) -> Self {
        assert_eq!(graph.vertex_count(), black_hole.len());
        let n = graph.vertex_count();
        GalacticGraph {
            graph,
            black_hole,
            provenance: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_black_hole(&self, v: VertexId) -> bool {
        self.black_hole[v]
    }

    pub fn black_hole_mask(&self) -> &[bool] {
        &self.black_hole
    }

    pub fn planet_mask(&self) -> Vec<bool> {
        self.black_hole.iter().map(|&b| !b).collect()
    }

    pub fn black_holes(&self) -> Vec<VertexId> {
        (0..self.vertex_count()).filter(|&v| self.black_hole[v]).collect()
    }

    pub fn planet_count(&self) -> usize {
        self.black_hole.iter().filter(|&&b| !b).count()
    }

    /// Original vertices merged into `v`, sorted.
    pub fn provenance(&self, v: VertexId) -> &[VertexId] {
        &self.provenance[v]
    }

    /// Merges each group into a single black hole. Returns the new graph and
    /// the old-to-new vertex map. Surviving vertices keep their relative
    /// order; a merged vertex takes the slot of its smallest member.
    fn contract(&self, groups: &[Vec<VertexId>]) -> (GalacticGraph, Vec<VertexId>) {
        let n = self.vertex_count();
        let mut leader: Vec<VertexId> = (0..n).collect();
        let mut grouped = vec![false; n];
        for group in groups {
            let &first = group.iter().min().expect("non-empty group");
            for &v in group {
                leader[v] = first;
                grouped[v] = true;
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if leader[v] == v {
                new_id[v] = next;
                next += 1;
            }
        }
        let map: Vec<VertexId> = (0..n).map(|v| new_id[leader[v]]).collect();
        let edges: Vec<(VertexId, VertexId)> = self
            .graph
            .edges()
            .map(|(u, v)| (map[u], map[v]))
            .filter(|(u, v)| u != v)
            .collect();
        let mut black_hole = vec![false; next];
        let mut provenance = vec![Vec::new(); next];
        for v in 0..n {
            black_hole[map[v]] |= self.black_hole[v] || grouped[v];
            provenance[map[v]].extend_from_slice(&self.provenance[v]);
        }
        for p in &mut provenance {
            p.sort_unstable();
        }
        let graph = Graph::from_edges(next, edges).expect("contraction keeps the graph connected");
        (
            GalacticGraph {
                graph,
                black_hole,
                provenance,
            },
            map,
        )
    }
}

/// Galactic rIUMAPF instance: `S`, `T` on planets, away from black holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalacticInstance {
    pub galactic: GalacticGraph,
    pub start: Vec<VertexId>,
    pub target: Vec<VertexId>,
    pub radius: u32,
}

impl GalacticInstance {
    pub fn from_instance(instance: &Instance) -> Self {
        GalacticInstance {
            galactic: GalacticGraph::from_graph(instance.graph().clone()),
            start: instance.start().to_vec(),
            target: instance.target().to_vec(),
            radius: instance.radius(),
        }
    }

    pub fn agent_count(&self) -> usize {
        self.start.len()
    }

    /// Rule 2 depth threshold `(r + 1)(n + 2) - 1`.
    pub fn threshold(&self) -> u32 {
        (self.radius + 1) * (self.agent_count() as u32 + 2) - 1
    }

    /// Planets pairwise farther than `r` inside the planet subgraph; black
    /// holes hold any number of agents.
    pub fn is_galactic_independent(&self, config: &[VertexId]) -> bool {
        let balls = BallTable::masked(self.galactic.graph(), self.radius, &self.galactic.planet_mask());
        galactic_independent(&self.galactic, &balls, config)
    }

    pub fn check_preconditions(&self) -> Result<(), String> {
        let g = &self.galactic;
        if self.start.len() != self.target.len() {
            return Err("start and target sizes differ".into());
        }
        for &v in self.start.iter().chain(&self.target) {
            if v >= g.vertex_count() {
                return Err(format!("vertex {v} out of range"));
            }
            if g.is_black_hole(v) {
                return Err(format!("endpoint {v} is a black hole"));
            }
            if let Some(&b) = g.graph().neighbors(v).iter().find(|&&b| g.is_black_hole(b)) {
                return Err(format!("black hole {b} is adjacent to endpoint {v}"));
            }
        }
        for (set, name) in [(&self.start, "start"), (&self.target, "target")] {
            let mut sorted = set.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) || !self.is_galactic_independent(set) {
                return Err(format!("{name} set is not galactic independent"));
            }
        }
        Ok(())
    }
}

pub(crate) fn galactic_independent(g: &GalacticGraph, balls: &BallTable, config: &[VertexId]) -> bool {
    let mut occupied = vec![false; g.vertex_count()];
    for &v in config {
        if g.is_black_hole(v) {
            continue;
        }
        if occupied[v] {
            return false;
        }
        occupied[v] = true;
    }
    config
        .iter()
        .filter(|&&v| !g.is_black_hole(v))
        .all(|&v| balls.ball(v).iter().all(|&u| u == v || !occupied[u]))
}

/// `d(v)`: planet-subgraph distance from `S ∪ T`; `None` for black holes and
/// for planets cut off from every endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerLabels {
    layer: Vec<u32>,
}

impl LayerLabels {
    pub fn layer(&self, v: VertexId) -> Option<u32> {
        match self.layer[v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn as_raw(&self) -> &[u32] {
        &self.layer
    }

    /// `L_k`, sorted.
    pub fn layer_set(&self, k: u32) -> Vec<VertexId> {
        (0..self.layer.len()).filter(|&v| self.layer[v] == k).collect()
    }
}

pub fn compute_layers(galactic: &GalacticGraph, start: &[VertexId], target: &[VertexId]) -> LayerLabels {
    let sources: Vec<VertexId> = start.iter().chain(target).copied().collect();
    LayerLabels {
        layer: multi_source_bfs(galactic.graph(), &sources, Some(&galactic.planet_mask())),
    }
}

/// Rule 1: contracts every connected group of adjacent black holes.
pub fn rule_adjacent_blackholes(instance: &GalacticInstance) -> (GalacticInstance, bool) {
    let g = &instance.galactic;
    let n = g.vertex_count();
    let mut parent: Vec<VertexId> = (0..n).collect();
    fn find(parent: &mut [VertexId], mut v: VertexId) -> VertexId {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut merged = false;
    for (u, v) in g.graph().edges() {
        if g.is_black_hole(u) && g.is_black_hole(v) {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
                merged = true;
            }
        }
    }
    if !merged {
        return (instance.clone(), false);
    }
    let mut classes: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..n {
        if g.is_black_hole(v) {
            let root = find(&mut parent, v);
            classes[root].push(v);
        }
    }
    let groups: Vec<Vec<VertexId>> = classes.into_iter().filter(|c| c.len() > 1).collect();
    (apply(instance, &groups), true)
}

/// Rule 2: contracts every component of `G[P \ N[S ∪ T]]` that reaches
/// layer `(r + 1)(n + 2) - 1` (or is cut off from `S ∪ T` inside `G[P]`).
pub fn rule_component_contract(instance: &GalacticInstance) -> (GalacticInstance, bool) {
    let g = &instance.galactic;
    let graph = g.graph();
    let n = g.vertex_count();
    let layers = compute_layers(g, &instance.start, &instance.target);
    let threshold = instance.threshold();
    let mut free = g.planet_mask();
    for &s in instance.start.iter().chain(&instance.target) {
        for v in graph.closed_neighborhood(s) {
            free[v] = false;
        }
    }
    let mut seen = vec![false; n];
    let mut groups = Vec::new();
    for root in 0..n {
        if !free[root] || seen[root] {
            continue;
        }
        let mut component = vec![root];
        seen[root] = true;
        let mut k = 0;
        while k < component.len() {
            let u = component[k];
            k += 1;
            for &w in graph.neighbors(u) {
                if free[w] && !seen[w] {
                    seen[w] = true;
                    component.push(w);
                }
            }
        }
        let deep = component
            .iter()
            .any(|&v| layers.layer(v).is_none_or(|d| d >= threshold));
        if deep {
            component.sort_unstable();
            groups.push(component);
        }
    }
    if groups.is_empty() {
        return (instance.clone(), false);
    }
    (apply(instance, &groups), true)
}

fn apply(instance: &GalacticInstance, groups: &[Vec<VertexId>]) -> GalacticInstance {
    let (galactic, map) = instance.galactic.contract(groups);
    GalacticInstance {
        galactic,
        start: instance.start.iter().map(|&v| map[v]).collect(),
        target: instance.target.iter().map(|&v| map[v]).collect(),
        radius: instance.radius,
    }
}

/// Applies Rule 2 then Rule 1 until neither changes the graph.
pub fn kernelize_galactic(instance: &GalacticInstance) -> GalacticInstance {
    let mut current = instance.clone();
    loop {
        let (after2, changed2) = rule_component_contract(&current);
        let (after1, changed1) = rule_adjacent_blackholes(&after2);
        current = after1;
        if !changed2 && !changed1 {
            return current;
        }
    }
}

pub fn kernelize(instance: &Instance) -> GalacticInstance {
    kernelize_galactic(&GalacticInstance::from_instance(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::path;

    fn gi(graph: Graph, bh: &[VertexId], s: &[VertexId], t: &[VertexId], r: u32) -> GalacticInstance {
        let mut mask = vec![false; graph.vertex_count()];
        for &b in bh {
            mask[b] = true;
        }
        GalacticInstance {
            galactic: GalacticGraph::with_black_holes(graph, mask),
            start: s.to_vec(),
            target: t.to_vec(),
            radius: r,
        }
    }

    #[test]
    fn layers_on_a_path() {
        let inst = gi(path(7), &[], &[0], &[6], 1);
        let l = compute_layers(&inst.galactic, &inst.start, &inst.target);
        assert_eq!(l.as_raw(), &[0, 1, 2, 3, 2, 1, 0]);
        assert_eq!(l.layer_set(0), vec![0, 6]);
    }

    #[test]
    fn unreachable_planet_has_no_layer() {
        // 0 - 1 - [2] - 3 with 2 a black hole
        let inst = gi(path(4), &[2], &[0], &[0], 1);
        let l = compute_layers(&inst.galactic, &inst.start, &inst.target);
        assert_eq!(l.layer(3), None);
        assert_eq!(l.layer(2), None);
        assert_eq!(l.layer(1), Some(1));
    }

    #[test]
    fn rule_one_merges_triangles() {
        let tri = Graph::from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let (out, changed) = rule_adjacent_blackholes(&gi(tri, &[0, 1, 2], &[3], &[3], 0));
        assert!(changed);
        assert_eq!(out.galactic.vertex_count(), 2);
        assert_eq!(out.galactic.black_holes(), vec![0]);
        assert_eq!(out.galactic.provenance(0), &[0, 1, 2]);
        assert_eq!(out.start, vec![1]);
        let (same, changed) = rule_adjacent_blackholes(&out);
        assert!(!changed);
        assert_eq!(same, out);
    }

    #[test]
    fn thresholds() {
        let inst = gi(path(3), &[], &[0], &[0], 1);
        assert_eq!(inst.threshold(), 5);
        let two = gi(path(3), &[], &[0, 2], &[0, 2], 1);
        assert_eq!(two.threshold(), 7);
        let wide = gi(path(3), &[], &[0], &[0], 2);
        assert_eq!(wide.threshold(), 8);
    }

    #[test]
    fn long_tail_collapses() {
        // core 0..3 followed by a tail 3..12, one agent, r = 1 -> threshold 5
        let inst = gi(path(12), &[], &[0], &[2], 1);
        let k = kernelize_galactic(&inst);
        assert!(k.galactic.vertex_count() < 12);
        assert_eq!(k.galactic.black_holes().len(), 1);
        let b = k.galactic.black_holes()[0];
        assert_eq!(k.galactic.provenance(b), &(4..12).collect::<Vec<_>>()[..]);
        assert_eq!(kernelize_galactic(&k), k);
        assert!(k.check_preconditions().is_ok());
    }

    #[test]
    fn shallow_graph_untouched() {
        let inst = gi(path(6), &[], &[0], &[2], 1);
        let k = kernelize_galactic(&inst);
        assert_eq!(k, inst);
    }

    #[test]
    fn galactic_independence() {
        let inst = gi(path(5), &[2], &[0], &[4], 1);
        // 1 and 3 are only linked through the black hole
        assert!(inst.is_galactic_independent(&[1, 3]));
        assert!(inst.is_galactic_independent(&[2, 2, 0]));
        assert!(!inst.is_galactic_independent(&[0, 1]));
        assert!(inst.check_preconditions().is_ok());
        let bad = gi(path(5), &[1], &[0], &[4], 1);
        assert!(bad.check_preconditions().is_err());
    }
}
