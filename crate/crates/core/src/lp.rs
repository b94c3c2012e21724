//! Small dense linear programs over `{x >= 0 : A x = b}`.
//!
//! Two independent routes are provided: exhaustive basis enumeration, which
//! lists every vertex, and a two-phase tableau simplex with Bland's rule.
//! Problem sizes here are tiny (tens of variables), so everything is dense.

use crate::error::{Error, Result};

/// Largest column count accepted by [`enumerate_vertices`].
pub const MAX_ENUMERATION_COLUMNS: usize = 21;

const PIVOT_TOL: f64 = 1e-11;

/// Row-echelon reduction of `[A | b]` keeping only independent rows.
fn independent_rows(a: &[Vec<f64>], b: &[f64], rank_tol: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let cols = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(*v);
            r
        })
        .collect();
    let scale = rows
        .iter()
        .flat_map(|r| r[..cols].iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let (pivot, best) =
            (rank..rows.len())
                .map(|i| (i, rows[i][col].abs()))
                .fold(
                    (rank, -1.0),
                    |acc, cur| if cur.1 > acc.1 { cur } else { acc },
                );
        if best <= rank_tol * scale {
            continue;
        }
        rows.swap(rank, pivot);
        let p = rows[rank][col];
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank {
                let f = row[col] / p;
                if f != 0.0 {
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(x, y)| *x -= f * y);
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    let rhs = rows.iter_mut().map(|r| r.pop().unwrap()).collect();
    (rows, rhs)
}

/// Solves a square system by Gaussian elimination with partial pivoting.
pub(crate) fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < PIVOT_TOL {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f != 0.0 {
                let (upper, lower) = m.split_at_mut(i);
                for (t, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *t -= f * p;
                }
                rhs[i] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    Some(x)
}

/// Lexicographic `k`-subsets of `0..n`.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertices of `{x >= 0 : A x = b}` by exhaustive basis search.
///
/// Rows of `A` may be linearly dependent; dependent rows are dropped first.
/// Basic solutions with entries below `-feas_tol` are rejected, and tiny
/// negative entries are clamped to zero.
pub fn enumerate_vertices(a: &[Vec<f64>], b: &[f64], feas_tol: f64) -> Result<Vec<Vec<f64>>> {
    let cols = a.first().map_or(0, Vec::len);
    if cols > MAX_ENUMERATION_COLUMNS {
        return Err(Error::EnumerationTooLarge {
            size: cols as u128,
            limit: MAX_ENUMERATION_COLUMNS as u128,
        });
    }
    let (rows, rhs) = independent_rows(a, b, 1e-10);
    let rank = rows.len();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    if rank == 0 {
        // A x = b holds trivially only if b reduced to zero; the origin is the only vertex.
        vertices.push(vec![0.0; cols]);
        return Ok(vertices);
    }
    for_each_combination(cols, rank, |basis| {
        let m = rows
            .iter()
            .map(|r| basis.iter().map(|&j| r[j]).collect())
            .collect();
        let Some(xb) = solve_square(m, rhs.clone()) else {
            return;
        };
        if xb.iter().any(|v| *v < -feas_tol) {
            return;
        }
        let mut x = vec![0.0; cols];
        for (&j, v) in basis.iter().zip(xb) {
            x[j] = v.max(0.0);
        }
        let residual = a
            .iter()
            .zip(b)
            .map(|(r, bi)| (r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max);
        if residual > 1e3 * feas_tol {
            return;
        }
        let duplicate = vertices.iter().any(|v| {
            v.iter()
                .zip(&x)
                .all(|(p, q)| (p - q).abs() <= 10.0 * feas_tol)
        });
        if !duplicate {
            vertices.push(x);
        }
    });
    Ok(vertices)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(x, y)| *x -= f * y);
                }
            }
        }
        self.basis[r] = c;
    }

    fn rhs(&self, i: usize) -> f64 {
        *self.rows[i].last().unwrap()
    }

    /// Maximizes `cost . x` over the columns in `allowed` (Bland's rule).
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let max_iter = 50_000;
        for _ in 0..max_iter {
            let reduced = |j: usize| {
                cost[j]
                    - self
                        .rows
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &bj)| cost[bj] * row[j])
                        .sum::<f64>()
            };
            let Some(enter) = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| reduced(j) > 1e-10)
            else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || ((ratio - lr).abs() <= 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::LpUnbounded);
            };
            self.pivot(r, enter);
        }
        Err(Error::NonConvergence {
            iterations: max_iter,
            gap: f64::NAN,
        })
    }
}

/// Maximizes `c . x` subject to `A x = b`, `x >= 0` with a two-phase simplex.
pub fn simplex_maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if a.iter().any(|r| r.len() != n) || b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a.iter().map(Vec::len).find(|&l| l != n).unwrap_or(b.len()),
        });
    }
    // columns: structural 0..n, artificial n..n+m, then rhs
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let sign = if *bi < 0.0 { -1.0 } else { 1.0 };
        let mut t: Vec<f64> = row.iter().map(|v| sign * v).collect();
        t.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        t.push(sign * bi);
        rows.push(t);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
    };
    let mut phase1 = vec![0.0; n + m];
    phase1[n..].iter_mut().for_each(|v| *v = -1.0);
    tab.optimize(&phase1, n + m)?;
    let infeasibility: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i))
        .sum();
    let scale = b.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    if infeasibility > 1e-9 * scale {
        return Err(Error::EmptyPolytope);
    }
    // drive remaining artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| tab.rows[i][j].abs() > 1e-9) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, m));
    tab.optimize(&cost, n)?;
    let mut x = vec![0.0; n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rhs(i).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(p, q)| p * q).sum();
    Ok(LpSolution { x, value })
}

/// Minimization counterpart of [`simplex_maximize`].
pub fn simplex_minimize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let neg: Vec<f64> = c.iter().map(|v| -v).collect();
    let mut sol = simplex_maximize(a, b, &neg)?;
    sol.value = -sol.value;
    Ok(sol)
}
