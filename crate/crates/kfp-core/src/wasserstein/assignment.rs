//! Dense linear-assignment solver (shortest augmenting path with dual
//! potentials, O(n³) worst case). Costs are queried through a closure so the
//! matrix can be stored densely or generated on the fly; ties are broken by
//! the scan order over column indices, which makes results deterministic.

/// Minimum-cost perfect matching. Returns `assign` with `assign[row] = col`
/// and the total cost.
pub fn solve<C: Fn(usize, usize) -> f64>(n: usize, cost: C) -> (Vec<usize>, f64) {
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    let inf = f64::INFINITY;
    // 1-based arrays with a virtual row/column 0, following the classical
    // potential formulation.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // column -> row
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assign[matched_row[j] - 1] = j - 1;
        }
    }
    let total = (0..n).map(|i| cost(i, assign[i])).sum();
    (assign, total)
}
