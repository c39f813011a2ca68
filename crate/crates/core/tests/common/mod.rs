#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riumapf::generators::random_connected;
use riumapf::Graph;

pub const FAR: u32 = u32::MAX / 4;

/// All-pairs distances by Floyd-Warshall over the edge list.
pub fn floyd(graph: &Graph) -> Vec<Vec<u32>> {
    let n = graph.vertex_count();
    let mut d = vec![vec![FAR; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v) in graph.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn pairwise_far(d: &[Vec<u32>], config: &[usize], r: u32) -> bool {
    config
        .iter()
        .enumerate()
        .all(|(i, &u)| config[i + 1..].iter().all(|&v| d[u][v] > r))
}

pub fn seeded_graph(seed: u64, vertices: usize, density: f64) -> Graph {
    random_connected(vertices, density, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
