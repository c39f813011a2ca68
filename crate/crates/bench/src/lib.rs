//! Fixtures shared by the criterion benches.

use std::sync::Arc;

use riumapf::generators::{cycle, grid};
use riumapf::instance::sample_random_instance;
use riumapf::{Graph, GridMap, Instance};

/// The 16x16 obstacle-free grid.
pub fn empty_16() -> Arc<Graph> {
    Arc::new(grid(16, 16))
}

/// Same map as `maps/random-64-64-20.map`.
pub fn random_64() -> Arc<Graph> {
    let map = GridMap::random_obstacles(64, 64, 0.2, 20);
    Arc::new(map.to_graph().expect("largest component is connected"))
}

pub fn random_instance(graph: &Arc<Graph>, n: usize, r: u32, seed: u64) -> Instance {
    sample_random_instance(graph.clone(), n, r, seed).expect("map fits the agents")
}

/// Four agents that must rotate round an 8-cycle together.
pub fn rotation() -> Instance {
    Instance::new(Arc::new(cycle(8)), vec![0, 2, 4, 6].into(), vec![1, 3, 5, 7].into(), 1).expect("valid")
}

/// Two agents on a 2x4 ladder that IU-PIBT alone keeps swapping sides on.
pub fn ladder() -> Instance {
    Instance::new(Arc::new(grid(2, 4)), vec![1, 4].into(), vec![1, 6].into(), 1).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(empty_16().vertex_count(), 256);
        assert!(random_64().vertex_count() > 3000);
        assert_eq!(random_instance(&empty_16(), 30, 2, 1).agent_count(), 30);
        assert_eq!(rotation().agent_count(), 4);
        assert_eq!(ladder().radius(), 1);
    }
}
