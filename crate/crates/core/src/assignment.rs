//! Minimum-cost perfect matching (Hungarian algorithm, O(n³)).

use crate::state::SpherePoint;

/// Solves the square assignment problem. Returns `assign[i] = j` and the
/// total cost.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // potentials u (rows), v (cols), 1-based with column 0 as a sentinel
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    let total = (0..n).map(|i| cost[i][assign[i]]).sum();
    (assign, total)
}

/// Largest angular distance between two equally sized point multisets
/// after optimally pairing them (pairing minimizes the summed distance).
pub fn matched_max_distance(a: &[SpherePoint], b: &[SpherePoint]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|p| b.iter().map(|q| p.angular_distance(q)).collect())
        .collect();
    let (assign, _) = min_cost_assignment(&cost);
    assign
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max)
}
