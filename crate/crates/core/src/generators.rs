//! Small graph families used by tests, benchmarks and examples.

use std::sync::Arc;

use rand::Rng;

use crate::graph::{multi_source_bfs, Graph, VertexId};
use crate::instance::{sample_random_instance, Instance};

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path is connected")
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a simple cycle needs at least 3 vertices");
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is connected")
}

/// Full 4-connected `height x width` grid, numbered row-major, with coordinates.
pub fn grid(height: usize, width: usize) -> Graph {
    let id = |r: usize, c: usize| r * width + c;
    let mut edges = Vec::new();
    for r in 0..height {
        for c in 0..width {
            if c + 1 < width {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < height {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let coords = (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .collect();
    Graph::from_edges(height * width, edges)
        .and_then(|g| g.with_coords(coords))
        .expect("grid is connected")
}

/// Random connected graph: a random spanning tree plus each remaining pair
/// independently with probability `extra_edge_prob`.
pub fn random_connected<R: Rng + ?Sized>(n: usize, extra_edge_prob: f64, rng: &mut R) -> Graph {
    let mut edges: Vec<(VertexId, VertexId)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(extra_edge_prob) {
                edges.push((u, v));
            }
        }
    }
    // shuffle labels so vertex 0 is not always the tree root
    let mut label: Vec<VertexId> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        label.swap(i, j);
    }
    Graph::from_edges(n, edges.into_iter().map(|(u, v)| (label[u], label[v])))
        .expect("spanning tree keeps the graph connected")
}

/// `base` plus a path of `len` new vertices hanging off `at`.
pub fn with_tail(base: &Graph, at: VertexId, len: usize) -> Graph {
    let n = base.vertex_count();
    let mut edges: Vec<(VertexId, VertexId)> = base.edges().collect();
    let mut prev = at;
    for v in n..n + len {
        edges.push((prev, v));
        prev = v;
    }
    Graph::from_edges(n + len, edges).expect("tail keeps the graph connected")
}

/// A random core carrying `S` and `T`, with a tail reaching past the
/// contraction layer `(r+1)(n+2)-1`, within `max_vertices` in total.
/// `None` when no draw fits after a few hundred tries.
pub fn tailed_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, r: u32, max_vertices: usize) -> Option<Instance> {
    let threshold = (r as usize + 1) * (n + 2) - 1;
    let min_core = (n * (r as usize + 1)).max(2);
    for _ in 0..500 {
        if min_core >= max_vertices {
            return None;
        }
        let k = rng.random_range(min_core..max_vertices);
        let core = random_connected(k, 0.2, rng);
        let Ok(inst) = sample_random_instance(Arc::new(core.clone()), n, r, rng.random()) else {
            continue;
        };
        let sources: Vec<VertexId> = inst.start().iter().chain(inst.target().iter()).copied().collect();
        let layers = multi_source_bfs(&core, &sources, None);
        let at = (0..k).max_by_key(|&v| (layers[v], std::cmp::Reverse(v))).expect("core is non-empty");
        let len = threshold.saturating_sub(layers[at] as usize).max(1) + rng.random_range(0..=1);
        if k + len > max_vertices {
            continue;
        }
        let graph = Arc::new(with_tail(&core, at, len));
        return Instance::new(graph, inst.start().clone(), inst.target().clone(), r).ok();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shapes() {
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(cycle(8).edge_count(), 8);
        let g = grid(2, 4);
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g.coords(5), Some((1, 1)));
    }

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..12 {
            let g = random_connected(n, 0.2, &mut rng);
            assert_eq!(g.vertex_count(), n);
        }
    }

    #[test]
    fn tails_reach_the_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, r) in [(1, 1), (2, 1), (3, 1), (1, 2)] {
            let inst = tailed_instance(&mut rng, n, r, 14).unwrap_or_else(|| panic!("n={n} r={r} does not fit"));
            assert!(inst.graph().vertex_count() <= 14);
            let sources: Vec<usize> = inst.start().iter().chain(inst.target().iter()).copied().collect();
            let deepest = *multi_source_bfs(inst.graph(), &sources, None).iter().max().unwrap();
            assert!(deepest as usize >= (r as usize + 1) * (n + 2) - 1);
        }
        // threshold 11 leaves too little room for a core
        assert!(tailed_instance(&mut rng, 2, 2, 14).is_none());
    }
}
