//! Dense primal simplex for `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`, `b ≥ 0`.
//!
//! The origin is feasible, so a single phase suffices. Bland's rule rules out
//! cycling; problems here have at most a few dozen columns.

const EPS: f64 = 1e-12;

pub(crate) struct Solution {
    pub value: f64,
    #[allow(dead_code)]
    pub x: Vec<f64>,
}

pub(crate) fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Solution {
    let (m, n) = (a.len(), c.len());
    debug_assert!(b.iter().all(|&v| v >= 0.0));
    let width = n + m + 1;
    // Rows 0..m are constraints, row m is the objective (reduced costs).
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(col) = (0..n + m).find(|&j| t[m][j] < -EPS) {
        let mut pivot: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][col] > EPS {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match pivot {
                    None => true,
                    Some((p, r)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < basis[p]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = pivot else {
            // Unbounded; callers always bound every variable.
            return Solution { value: f64::INFINITY, x: vec![0.0; n] };
        };
        let p = t[row][col];
        for v in t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != row {
                let f = r[col];
                if f != 0.0 {
                    for (v, pv) in r.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        basis[row] = col;
    }

    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1];
        }
    }
    Solution { value: t[m][width - 1], x }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let s = maximize(&[3.0, 5.0], &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]], &[4.0, 12.0, 18.0]);
        assert!((s.value - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_zero_rhs() {
        let s = maximize(&[1.0, 1.0], &[vec![1.0, -1.0], vec![-1.0, 1.0], vec![1.0, 1.0]], &[0.0, 0.0, 2.0]);
        assert!((s.value - 2.0).abs() < 1e-9);
    }
}
