mod common;

use common::permutations;
use proptest::prelude::*;
use riumapf::matching::{bottleneck_value, hungarian_assignment, max_matching_size, reassign_with_bans, total_cost};

fn matrix(n: usize, max: u32) -> impl Strategy<Value = Vec<Vec<u32>>> {
    prop::collection::vec(prop::collection::vec(0..=max, n), n)
}

fn sized_matrix() -> impl Strategy<Value = Vec<Vec<u32>>> {
    (1usize..=6).prop_flat_map(|n| matrix(n, 20))
}

fn cost_of(cost: &[Vec<u32>], perm: &[usize]) -> u64 {
    perm.iter().enumerate().map(|(r, &c)| cost[r][c] as u64).sum()
}

proptest! {
    #[test]
    fn hungarian_is_optimal(cost in sized_matrix()) {
        let n = cost.len();
        let cols = hungarian_assignment(&cost);
        let mut seen = cols.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let best = permutations(n).iter().map(|p| cost_of(&cost, p)).min().unwrap();
        prop_assert_eq!(total_cost(&cost, &cols), best);
    }

    #[test]
    fn bans_are_respected(cost in sized_matrix(), ban_bits in prop::collection::vec(any::<u8>(), 6)) {
        let n = cost.len();
        let banned: Vec<Vec<usize>> = (0..n)
            .map(|r| (0..n).filter(|&c| ban_bits[r] >> c & 1 == 1 && (r + c) % 2 == 0).collect())
            .collect();
        let allowed: Vec<Vec<usize>> = permutations(n)
            .into_iter()
            .filter(|p| p.iter().enumerate().all(|(r, c)| !banned[r].contains(c)))
            .collect();
        match reassign_with_bans(&cost, &banned) {
            Ok(cols) => {
                prop_assert!(cols.iter().enumerate().all(|(r, c)| !banned[r].contains(c)));
                let best = allowed.iter().map(|p| cost_of(&cost, p)).min().unwrap();
                prop_assert_eq!(total_cost(&cost, &cols), best);
            }
            Err(_) => prop_assert!(allowed.is_empty()),
        }
    }

    #[test]
    fn bottleneck_is_min_max(cost in sized_matrix()) {
        let n = cost.len();
        let best = permutations(n)
            .iter()
            .map(|p| p.iter().enumerate().map(|(r, &c)| cost[r][c]).max().unwrap())
            .min()
            .unwrap();
        prop_assert_eq!(bottleneck_value(&cost), best);
    }

    #[test]
    fn matching_size(bits in prop::collection::vec(any::<u8>(), 6), n in 1usize..=6) {
        let allowed = |r: usize, c: usize| bits[r] >> c & 1 == 1;
        let best = permutations(n)
            .iter()
            .map(|p| p.iter().enumerate().filter(|&(r, &c)| allowed(r, c)).count())
            .max()
            .unwrap();
        // a maximum matching extends to a permutation, so the count agrees
        prop_assert_eq!(max_matching_size(n, allowed), best);
    }
}

#[test]
fn empty_matrices() {
    assert!(hungarian_assignment(&[]).is_empty());
    assert_eq!(reassign_with_bans(&[], &[]), Ok(vec![]));
    assert_eq!(reassign_with_bans(&[vec![3]], &[vec![0]]), Err(riumapf::matching::Infeasible));
}
