//! Rectangular linear assignment by shortest augmenting paths with dual
//! potentials (Hungarian method, O(n^2 m)).

/// Minimum-cost assignment of every row of the smaller side.
///
/// Returns, for each row, the assigned column (`None` only when the
/// matrix has more rows than columns). Costs must be finite.
pub fn solve(costs: &[Vec<f64>]) -> Vec<Option<usize>> {
    let rows = costs.len();
    let cols = costs.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return vec![None; rows];
    }
    if rows <= cols {
        solve_wide(rows, cols, |i, j| costs[i][j])
            .into_iter()
            .map(Some)
            .collect()
    } else {
        let col_to_row = solve_wide(cols, rows, |i, j| costs[j][i]);
        let mut out = vec![None; rows];
        for (col, row) in col_to_row.into_iter().enumerate() {
            out[row] = Some(col);
        }
        out
    }
}

/// Assigns each of `n` rows to a distinct one of `m >= n` columns.
fn solve_wide(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based arrays; column 0 is the virtual root of each augmenting tree.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut min_slack = vec![f64::INFINITY; m + 1];
    let mut used = vec![false; m + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=m {
        if owner[j] != 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let c = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(solve(&c), vec![Some(1), Some(0)]);
    }

    #[test]
    fn rectangular_both_ways() {
        let wide = vec![vec![5.0, 1.0, 9.0], vec![1.0, 5.0, 9.0]];
        assert_eq!(solve(&wide), vec![Some(1), Some(0)]);
        let tall = vec![vec![5.0, 1.0], vec![9.0, 9.0], vec![1.0, 5.0]];
        assert_eq!(solve(&tall), vec![Some(1), None, Some(0)]);
    }

    #[test]
    fn empty() {
        assert!(solve(&[]).is_empty());
        assert_eq!(solve(&[vec![], vec![]]), vec![None, None]);
    }
}
