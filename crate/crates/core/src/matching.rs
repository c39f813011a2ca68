//! Target assignment: minimum-cost perfect matching (Hungarian method), the
//! banned-pair variant used for livelock recovery, and bottleneck matching.
//!
//! Cost matrices are square, row = agent, column = target index.

use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no perfect matching avoids the banned pairs")]
pub struct Infeasible;

/// Bijection from agents onto target vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    to_target: Vec<VertexId>,
}

impl Assignment {
    pub fn new(to_target: Vec<VertexId>) -> Self {
        Assignment { to_target }
    }

    /// Agent `i` gets `targets[columns[i]]`.
    pub fn from_columns(columns: &[usize], targets: &[VertexId]) -> Self {
        Assignment {
            to_target: columns.iter().map(|&c| targets[c]).collect(),
        }
    }

    pub fn target(&self, agent: usize) -> VertexId {
        self.to_target[agent]
    }

    pub fn set_target(&mut self, agent: usize, target: VertexId) {
        self.to_target[agent] = target;
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.to_target.swap(a, b);
    }

    pub fn len(&self) -> usize {
        self.to_target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_target.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.to_target
    }

    /// Agent assigned to `target`, if any.
    pub fn agent_of(&self, target: VertexId) -> Option<usize> {
        self.to_target.iter().position(|&t| t == target)
    }

    /// True when every vertex of `targets` is assigned to exactly one agent.
    pub fn is_bijection_onto(&self, targets: &[VertexId]) -> bool {
        let mut mine = self.to_target.clone();
        let mut theirs = targets.to_vec();
        mine.sort_unstable();
        theirs.sort_unstable();
        mine == theirs && mine.windows(2).all(|w| w[0] != w[1])
    }
}

/// Minimum-total-cost perfect matching. Returns the column chosen for each row.
///
/// O(n^3) shortest-augmenting-path Hungarian method with row/column
/// potentials. Rows are inserted in index order, which makes the result a
/// deterministic function of the matrix.
pub fn hungarian_assignment(cost: &[Vec<u32>]) -> Vec<usize> {
    let wide: Vec<Vec<i64>> = cost
        .iter()
        .map(|row| row.iter().map(|&c| c as i64).collect())
        .collect();
    hungarian_i64(&wide)
}

/// Minimum-cost perfect matching that never uses a banned `(row, column)`
/// pair. `banned[row]` lists forbidden column indices.
pub fn reassign_with_bans(cost: &[Vec<u32>], banned: &[Vec<usize>]) -> Result<Vec<usize>, Infeasible> {
    let n = cost.len();
    let max = cost.iter().flatten().copied().max().unwrap_or(0) as i64;
    // any matching with a banned pair costs more than every ban-free one
    let big = (max + 1) * (n as i64 + 1);
    let mut wide: Vec<Vec<i64>> = cost
        .iter()
        .map(|row| row.iter().map(|&c| c as i64).collect())
        .collect();
    for (row, cols) in banned.iter().enumerate() {
        for &c in cols {
            wide[row][c] = big;
        }
    }
    let columns = hungarian_i64(&wide);
    let hits_ban = columns
        .iter()
        .enumerate()
        .any(|(row, c)| banned.get(row).is_some_and(|b| b.contains(c)));
    if hits_ban {
        Err(Infeasible)
    } else {
        Ok(columns)
    }
}

fn hungarian_i64(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    assert!(cost.iter().all(|row| row.len() == n), "cost matrix must be square");
    const INF: i64 = i64::MAX / 4;
    // 1-based; column 0 is a virtual root.
    let mut row_pot = vec![0i64; n + 1];
    let mut col_pot = vec![0i64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        row_of_col[0] = row;
        let mut col0 = 0;
        let mut min_slack = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = row_of_col[col0];
            let mut delta = INF;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let slack = cost[r0 - 1][col - 1] - row_pot[r0] - col_pot[col];
                if slack < min_slack[col] {
                    min_slack[col] = slack;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    row_pot[row_of_col[col]] += delta;
                    col_pot[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if row_of_col[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            row_of_col[col0] = row_of_col[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; n];
    for col in 1..=n {
        columns[row_of_col[col] - 1] = col - 1;
    }
    columns
}

/// Maximum bipartite matching size restricted to pairs accepted by `allowed`
/// (Kuhn's augmenting paths).
pub fn max_matching_size(n: usize, allowed: impl Fn(usize, usize) -> bool) -> usize {
    fn augment(
        row: usize,
        n: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        row_of_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..n {
            if !allowed(row, col) || seen[col] {
                continue;
            }
            seen[col] = true;
            let free = match row_of_col[col] {
                None => true,
                Some(other) => augment(other, n, allowed, seen, row_of_col),
            };
            if free {
                row_of_col[col] = Some(row);
                return true;
            }
        }
        false
    }
    let mut row_of_col = vec![None; n];
    (0..n)
        .filter(|&row| augment(row, n, &allowed, &mut vec![false; n], &mut row_of_col))
        .count()
}

/// Smallest `c` such that some perfect matching uses only entries `<= c`,
/// found by binary search over the distinct matrix values.
pub fn bottleneck_value(cost: &[Vec<u32>]) -> u32 {
    let n = cost.len();
    if n == 0 {
        return 0;
    }
    let mut values: Vec<u32> = cost.iter().flatten().copied().collect();
    values.sort_unstable();
    values.dedup();
    let (mut lo, mut hi) = (0, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let threshold = values[mid];
        if max_matching_size(n, |r, c| cost[r][c] <= threshold) == n {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo]
}

pub fn total_cost(cost: &[Vec<u32>], columns: &[usize]) -> u64 {
    columns
        .iter()
        .enumerate()
        .map(|(row, &c)| cost[row][c] as u64)
        .sum()
}
