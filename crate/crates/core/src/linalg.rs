//! Small dense linear-algebra helpers.

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major `n x n`. Returns `None` when a pivot falls below `tol`.
pub(crate) fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize, tol: f64) -> Option<()> {
    for col in 0..n {
        let (piv, best) =
            (col..n).map(|r| (r, a[r * n + col].abs())).fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in (col + 1)..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    Some(())
}

/// Numerical rank of the row set `rows`, each of equal length, using
/// elimination with the pivot threshold `tol` relative to the largest entry.
pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let scale = m.iter().flat_map(|r| r.iter()).fold(0.0f64, |acc, x| acc.max(x.abs())).max(1.0);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == m.len() {
            break;
        }
        let (piv, best) =
            (rank..m.len())
                .map(|r| (r, m[r][col].abs()))
                .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol * scale {
            continue;
        }
        m.swap(piv, rank);
        for r in (rank + 1)..m.len() {
            let f = m[r][col] / m[rank][col];
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][col..ncols].iter_mut().zip(&top[rank][col..ncols]) {
                *x -= f * y;
            }
        }
        rank += 1;
    }
    rank
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_solve_small_system() {
        let mut a = vec![0.0, 2.0, 1.0, 1.0];
        let mut b = vec![4.0, 3.0];
        solve_in_place(&mut a, &mut b, 2, 1e-14).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15 && (b[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn test_rank_detects_dependence() {
        let rows = vec![vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0]];
        assert_eq!(rank(&rows, 1e-10), 2);
        assert_eq!(rank(&rows[..2], 1e-10), 2);
    }
}
