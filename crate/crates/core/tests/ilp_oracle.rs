use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riumapf::generators::{grid, random_connected, tailed_instance};
use riumapf::ilp::{build_bounded_model, build_galactic_model, f_name, lp_string, naive_feasible, x_name, IlpModel};
use riumapf::instance::sample_random_instance;
use riumapf::kernel::kernelize;
use riumapf::oracle::{exact_bfs_solve, exact_galactic_solve};
use riumapf::{Instance, Plan};

fn small_instance(rng: &mut ChaCha8Rng) -> Option<Instance> {
    let vertices = rng.random_range(1..=7);
    let g = random_connected(vertices, rng.random_range(0.0..0.4), rng);
    let n = rng.random_range(1..=2);
    let r = rng.random_range(0..=1);
    sample_random_instance(Arc::new(g), n, r, rng.random()).ok()
}

#[test]
fn model_feasibility_matches_oracle_makespan() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut cases, mut yes) = (0, 0);
    while cases < 150 {
        let Some(inst) = small_instance(&mut rng) else {
            continue;
        };
        let tau = rng.random_range(0..=8);
        let optimum = exact_bfs_solve(&inst, 1000).makespan();
        let expected = optimum.is_some_and(|m| m <= tau);
        let model = build_bounded_model(&inst, tau);
        assert_eq!(naive_feasible(&model), expected, "tau = {tau}, optimum {optimum:?}, {inst:?}");
        yes += expected as usize;
        cases += 1;
    }
    assert!(yes > 20 && yes < 130, "yes = {yes}");
}

/// Occupancy and flow values read off a plan padded to `tau` steps.
fn plan_values(model: &IlpModel, plan: &Plan, tau: usize) -> Vec<i64> {
    let mut values = vec![0i64; model.variables().len()];
    let steps = plan.steps();
    let at = |t: usize| &steps[t.min(steps.len() - 1)];
    for t in 0..=tau {
        for &v in at(t).iter() {
            values[model.var_index(&x_name(v, t)).unwrap()] += 1;
        }
    }
    for t in 0..tau {
        for (&u, &v) in at(t).iter().zip(at(t + 1).iter()) {
            values[model.var_index(&f_name(u, v, t)).unwrap()] += 1;
        }
    }
    values
}

#[test]
fn oracle_plans_satisfy_the_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cases = 0;
    while cases < 100 {
        let Some(inst) = small_instance(&mut rng) else {
            continue;
        };
        let Some(plan) = exact_bfs_solve(&inst, 1000).plan().cloned() else {
            continue;
        };
        for tau in plan.makespan()..plan.makespan() + 3 {
            let model = build_bounded_model(&inst, tau);
            assert!(model.is_satisfied_by(&plan_values(&model, &plan, tau)));
        }
        if plan.makespan() > 0 {
            // one step short cannot satisfy the goal rows
            let model = build_bounded_model(&inst, plan.makespan() - 1);
            assert!(!naive_feasible(&model));
        }
        cases += 1;
    }
}

#[test]
fn galactic_model_matches_galactic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..40 {
        let n = 1 + case % 2;
        let inst = tailed_instance(&mut rng, n, 1, 12).expect("fits");
        let kernel = kernelize(&inst);
        let optimum = exact_galactic_solve(&kernel, 1000).makespan();
        for tau in [0, 2, 4, 6] {
            let model = build_galactic_model(&kernel, tau).unwrap();
            assert_eq!(naive_feasible(&model), optimum.is_some_and(|m| m <= tau), "tau {tau} {kernel:?}");
        }
    }
}

#[test]
fn export_is_byte_deterministic() {
    let g = Arc::new(grid(4, 4));
    let inst = sample_random_instance(g, 3, 1, 42).unwrap();
    let a = lp_string(&build_bounded_model(&inst, 6));
    let b = lp_string(&build_bounded_model(&inst.clone(), 6));
    assert_eq!(a, b);
    let again = sample_random_instance(Arc::new(grid(4, 4)), 3, 1, 42).unwrap();
    assert_eq!(lp_string(&build_bounded_model(&again, 6)), a);
    assert!(a.starts_with("Minimize\n obj: 0\nSubject To\n"));
    assert!(a.ends_with("End\n"));
}
