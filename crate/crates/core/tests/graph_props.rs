#![allow(clippy::needless_range_loop)]

mod common;

use common::{floyd, pairwise_far, seeded_graph};
use proptest::prelude::*;
use riumapf::graph::{
    bfs_distances, greedy_hop, is_distance_r_independent, multi_source_bfs, neighborhood_r, next_step_r, BallTable,
};
use riumapf::generators::grid;

proptest! {
    #[test]
    fn balls_match_all_pairs_distances(seed in any::<u64>(), n in 1usize..25, density in 0.0f64..0.4, r in 0u32..5) {
        let g = seeded_graph(seed, n, density);
        let d = floyd(&g);
        let balls = BallTable::new(&g, r);
        for v in 0..n {
            let expected: Vec<usize> = (0..n).filter(|&u| d[v][u] <= r).collect();
            prop_assert_eq!(&neighborhood_r(&g, v, r), &expected);
            prop_assert_eq!(balls.ball(v), expected.as_slice());
        }
    }

    #[test]
    fn bfs_matches_floyd(seed in any::<u64>(), n in 1usize..25, density in 0.0f64..0.4) {
        let g = seeded_graph(seed, n, density);
        let d = floyd(&g);
        for s in 0..n {
            let table = bfs_distances(&g, s);
            for v in 0..n {
                prop_assert_eq!(table.raw(v), d[s][v]);
            }
        }
        let sources: Vec<usize> = (0..n).step_by(3).collect();
        let multi = multi_source_bfs(&g, &sources, None);
        for v in 0..n {
            prop_assert_eq!(multi[v], sources.iter().map(|&s| d[s][v]).min().unwrap());
        }
    }

    #[test]
    fn independence_matches_pairwise_check(seed in any::<u64>(), n in 2usize..20, picks in prop::collection::vec(0usize..1000, 0..6), r in 0u32..4) {
        let g = seeded_graph(seed, n, 0.15);
        let d = floyd(&g);
        let mut config: Vec<usize> = picks.iter().map(|p| p % n).collect();
        config.sort_unstable();
        config.dedup();
        prop_assert_eq!(is_distance_r_independent(&g, &config, r), pairwise_far(&d, &config, r));
    }

    #[test]
    fn greedy_steps_close_in(seed in any::<u64>(), n in 1usize..25, s in 0usize..1000, t in 0usize..1000, r in 0u32..6) {
        let g = seeded_graph(seed, n, 0.2);
        let d = floyd(&g);
        let (s, t) = (s % n, t % n);
        let table = bfs_distances(&g, t);
        let hop = greedy_hop(&g, s, table.as_slice());
        prop_assert!(hop == s || g.is_adjacent(s, hop));
        prop_assert_eq!(d[hop][t], d[s][t].saturating_sub(1));
        // the smallest neighbour that closes in wins
        if s != t {
            let best = g.neighbors(s).iter().copied().filter(|&w| d[w][t] + 1 == d[s][t]).min().unwrap();
            prop_assert_eq!(hop, best);
        }
        let far = next_step_r(&g, s, &table, r);
        prop_assert_eq!(d[far][t], d[s][t].saturating_sub(r));
        prop_assert!(d[s][far] <= r);
    }
}

#[test]
fn grid_ball_sizes() {
    // Manhattan diamonds clipped by the border
    let g = grid(5, 5);
    assert_eq!(neighborhood_r(&g, 12, 2).len(), 13);
    assert_eq!(neighborhood_r(&g, 0, 2).len(), 6);
    assert_eq!(neighborhood_r(&grid(4, 4), 5, 2).len(), 11);
}
