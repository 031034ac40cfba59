//! Bottleneck assignment: minimize, over perfect matchings of a square
//! cost matrix, the maximum selected cost.
//!
//! Solved by binary searching the sorted distinct costs and testing
//! perfect-matching feasibility on the thresholded bipartite graph with
//! Kuhn's augmenting-path algorithm. At the spectrum sizes used here
//! (tens of lines) this is effectively instantaneous.

/// Minimum over perfect matchings of the maximum matched cost.
///
/// `cost` must be square and nonempty.
pub fn bottleneck_assignment(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    assert!(n > 0 && cost.iter().all(|row| row.len() == n), "square matrix required");

    let mut thresholds: Vec<f64> = cost.iter().flatten().copied().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();

    // Binary search the smallest threshold admitting a perfect matching.
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    debug_assert!(feasible(cost, thresholds[hi]), "full graph must match");
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cost, thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    thresholds[lo]
}

/// Does the bipartite graph with edges `cost[i][j] <= threshold` admit a
/// perfect matching?
fn feasible(cost: &[Vec<f64>], threshold: f64) -> bool {
    let n = cost.len();
    let mut match_of_col: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut visited = vec![false; n];
        if !augment(cost, threshold, row, &mut visited, &mut match_of_col) {
            return false;
        }
    }
    true
}

fn augment(
    cost: &[Vec<f64>],
    threshold: f64,
    row: usize,
    visited: &mut [bool],
    match_of_col: &mut [Option<usize>],
) -> bool {
    for col in 0..cost.len() {
        if cost[row][col] <= threshold && !visited[col] {
            visited[col] = true;
            let free = match match_of_col[col] {
                None => true,
                Some(other) => augment(cost, threshold, other, visited, match_of_col),
            };
            if free {
                match_of_col[col] = Some(row);
                return true;
            }
        }
    }
    false
}
