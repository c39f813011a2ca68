use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riumapf::generators::{path, random_connected, tailed_instance, with_tail};
use riumapf::graph::multi_source_bfs;
use riumapf::instance::sample_random_instance;
use riumapf::kernel::{compute_layers, kernelize, kernelize_galactic, GalacticInstance};
use riumapf::oracle::{exact_bfs_solve, exact_galactic_solve, ExactOutcome};
use riumapf::Instance;

const CAP: usize = 1000;

fn feasible(out: &ExactOutcome) -> bool {
    match out {
        ExactOutcome::Optimal(_) => true,
        ExactOutcome::Infeasible => false,
        ExactOutcome::CapReached => panic!("oracle ran out of room"),
    }
}

/// Safety plus the structural invariants on one instance.
fn check(inst: &Instance) -> GalacticInstance {
    let kernel = kernelize(inst);
    assert_eq!(kernel.check_preconditions(), Ok(()));
    assert!(kernel.galactic.vertex_count() <= inst.graph().vertex_count());
    assert_eq!(kernelize_galactic(&kernel), kernel, "not a fixpoint");
    let original = feasible(&exact_bfs_solve(inst, CAP));
    let reduced = feasible(&exact_galactic_solve(&kernel, CAP));
    assert_eq!(original, reduced, "feasibility changed on {inst:?}");
    // surviving planets keep their identity and never gain neighbours
    let g = &kernel.galactic;
    for v in 0..g.vertex_count() {
        if !g.is_black_hole(v) {
            let origin = g.provenance(v);
            assert_eq!(origin.len(), 1);
            assert!(g.graph().degree(v) <= inst.graph().degree(origin[0]));
        }
    }
    let layers = compute_layers(g, &kernel.start, &kernel.target);
    for v in 0..g.vertex_count() {
        if let (false, Some(k)) = (g.is_black_hole(v), layers.layer(v)) {
            assert!(k < kernel.threshold());
        }
    }
    kernel
}

#[test]
fn tails_contract_without_changing_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let combos = [(1, 1), (2, 1), (3, 1), (1, 2)];
    let (mut cases, mut feasible_cases) = (0, 0);
    while cases < 240 {
        let (n, r) = combos[cases % combos.len()];
        let inst = tailed_instance(&mut rng, n, r, 14).expect("fits");
        let kernel = check(&inst);
        assert!(kernel.galactic.vertex_count() < inst.graph().vertex_count(), "tail was not contracted");
        assert!(!kernel.galactic.black_holes().is_empty());
        if exact_bfs_solve(&inst, CAP).plan().is_some() {
            feasible_cases += 1;
        }
        cases += 1;
    }
    assert!(feasible_cases > 0 && feasible_cases < cases, "feasible = {feasible_cases}");
}

#[test]
fn plain_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cases = 0;
    while cases < 200 {
        let vertices = rng.random_range(2..=14);
        let g = random_connected(vertices, rng.random_range(0.0..0.2), &mut rng);
        let n = rng.random_range(1..=3);
        let r = rng.random_range(1..=2);
        let Ok(inst) = sample_random_instance(Arc::new(g), n, r, rng.random()) else {
            continue;
        };
        check(&inst);
        cases += 1;
    }
}

#[test]
fn path_tail_on_a_small_core() {
    // core: 4-cycle 0..3 with a chord; tail of 9 vertices off vertex 2
    let core = riumapf::Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
    let g = Arc::new(with_tail(&core, 2, 9));
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let s = rng.random_range(0..4);
        let t = rng.random_range(0..4);
        let inst = Instance::new(g.clone(), vec![s].into(), vec![t].into(), 1).unwrap();
        let kernel = check(&inst);
        // layers in the tail run 1..=9 from vertex 2; threshold 5
        let deep: Vec<usize> = (0..13).filter(|&v| {
            let layer = multi_source_bfs(&g, &[s, t], None)[v];
            layer >= 5
        }).collect();
        assert!(!deep.is_empty());
        let holes = kernel.galactic.black_holes();
        assert_eq!(holes.len(), 1);
        for v in deep {
            assert!(kernel.galactic.provenance(holes[0]).contains(&v));
        }
    }
}

#[test]
fn nothing_fires_on_compact_instances() {
    let inst = Instance::new(Arc::new(path(6)), vec![0, 3].into(), vec![2, 5].into(), 1).unwrap();
    let kernel = kernelize(&inst);
    assert_eq!(kernel.galactic.graph(), inst.graph());
    assert!(kernel.galactic.black_holes().is_empty());
}
