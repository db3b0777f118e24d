//! Sparse LU factorization of a simplex basis.
//!
//! Left-looking (Gilbert–Peierls) elimination. Columns are processed in order of
//! increasing nonzero count so slack and other singleton columns pivot first, and
//! the pivot row of each column is chosen by threshold partial pivoting with a
//! preference for sparse rows. The factors satisfy `B = L U` with `L` stored as
//! unit columns over original row indices and `U` over elimination steps.

const NONE: usize = usize::MAX;
const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOL: f64 = 1e-11;

/// Columns that could not be pivoted, with rows left without a pivot.
#[derive(Debug, Clone)]
pub(crate) struct Singular {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct LuFactors {
    m: usize,
    pivot_row: Vec<usize>,
    step_pos: Vec<usize>,
    l_start: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    u_diag: Vec<f64>,
    work: Vec<f64>,
}

impl LuFactors {
    /// Factorizes the `m x m` matrix whose column `pos` is `column(pos)`.
    pub fn factorize<'a, F>(m: usize, column: F) -> Result<Self, Singular>
    where
        F: Fn(usize) -> (&'a [usize], &'a [f64]),
    {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| column(p).0.len());

        let mut row_count = vec![0usize; m];
        for p in 0..m {
            for &i in column(p).0 {
                row_count[i] += 1;
            }
        }

        let mut lu = LuFactors {
            m,
            pivot_row: Vec::with_capacity(m),
            step_pos: Vec::with_capacity(m),
            l_start: vec![0],
            u_start: vec![0],
            work: vec![0.0; m],
            ..Default::default()
        };
        let mut row_step = vec![NONE; m];
        let mut x = vec![0.0f64; m];
        let mut in_pattern = vec![false; m];
        let mut pattern: Vec<usize> = Vec::new();
        let mut visited = vec![false; m];
        let mut reached: Vec<usize> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut bad = Vec::new();

        for &pos in &order {
            let (idx, val) = column(pos);
            for (&i, &v) in idx.iter().zip(val) {
                x[i] += v;
                if !in_pattern[i] {
                    in_pattern[i] = true;
                    pattern.push(i);
                }
            }

            // Steps whose pivot rows become structurally nonzero.
            for &i in idx {
                let s = row_step[i];
                if s != NONE && !visited[s] {
                    visited[s] = true;
                    stack.push(s);
                    while let Some(s) = stack.pop() {
                        reached.push(s);
                        for k in lu.l_start[s]..lu.l_start[s + 1] {
                            let t = row_step[lu.l_idx[k]];
                            if t != NONE && !visited[t] {
                                visited[t] = true;
                                stack.push(t);
                            }
                        }
                    }
                }
            }
            // L-edges always point to later steps, so ascending order is topological.
            reached.sort_unstable();
            for &s in &reached {
                visited[s] = false;
                let v = x[lu.pivot_row[s]];
                if v == 0.0 {
                    continue;
                }
                for k in lu.l_start[s]..lu.l_start[s + 1] {
                    let i = lu.l_idx[k];
                    if !in_pattern[i] {
                        in_pattern[i] = true;
                        pattern.push(i);
                    }
                    x[i] -= lu.l_val[k] * v;
                }
            }
            reached.clear();

            let mut amax = 0.0f64;
            for &i in &pattern {
                if row_step[i] == NONE {
                    amax = amax.max(x[i].abs());
                }
            }
            let mut pivot = NONE;
            if amax > SINGULAR_TOL {
                let mut best_count = usize::MAX;
                for &i in &pattern {
                    if row_step[i] == NONE && x[i].abs() >= PIVOT_THRESHOLD * amax {
                        let c = row_count[i];
                        if c < best_count || (c == best_count && i < pivot) {
                            best_count = c;
                            pivot = i;
                        }
                    }
                }
            }

            if pivot == NONE {
                bad.push(pos);
            } else {
                let step = lu.pivot_row.len();
                let d = x[pivot];
                for &i in &pattern {
                    let v = x[i];
                    if i == pivot || v == 0.0 {
                        continue;
                    }
                    let s = row_step[i];
                    if s != NONE {
                        lu.u_idx.push(s);
                        lu.u_val.push(v);
                    } else if v.abs() > 1e-14 * amax {
                        lu.l_idx.push(i);
                        lu.l_val.push(v / d);
                    }
                }
                lu.u_start.push(lu.u_idx.len());
                lu.l_start.push(lu.l_idx.len());
                lu.u_diag.push(d);
                lu.pivot_row.push(pivot);
                lu.step_pos.push(pos);
                row_step[pivot] = step;
            }
            for &i in &pattern {
                x[i] = 0.0;
                in_pattern[i] = false;
            }
            pattern.clear();
        }

        if bad.is_empty() {
            Ok(lu)
        } else {
            let rows = (0..m).filter(|&i| row_step[i] == NONE).collect();
            Err(Singular { positions: bad, rows })
        }
    }

    pub fn nonzeros(&self) -> usize {
        self.l_idx.len() + self.u_idx.len() + self.m
    }

    /// Solves `B x = b`. `rhs` is indexed by row on entry and by basis position on exit.
    pub fn ftran(&mut self, rhs: &mut [f64]) {
        let m = self.m;
        for s in 0..m {
            let v = rhs[self.pivot_row[s]];
            if v != 0.0 {
                for k in self.l_start[s]..self.l_start[s + 1] {
                    rhs[self.l_idx[k]] -= self.l_val[k] * v;
                }
            }
        }
        let w = &mut self.work;
        for s in 0..m {
            w[s] = rhs[self.pivot_row[s]];
        }
        for s in (0..m).rev() {
            let y = w[s] / self.u_diag[s];
            w[s] = y;
            if y != 0.0 {
                for k in self.u_start[s]..self.u_start[s + 1] {
                    w[self.u_idx[k]] -= self.u_val[k] * y;
                }
            }
        }
        for s in 0..m {
            rhs[self.step_pos[s]] = w[s];
        }
    }

    /// Solves `y' B = c'`. `rhs` is indexed by basis position on entry and by row on exit.
    pub fn btran(&mut self, rhs: &mut [f64]) {
        let m = self.m;
        let z = &mut self.work;
        for s in 0..m {
            let mut v = rhs[self.step_pos[s]];
            for k in self.u_start[s]..self.u_start[s + 1] {
                v -= self.u_val[k] * z[self.u_idx[k]];
            }
            z[s] = v / self.u_diag[s];
        }
        for s in (0..m).rev() {
            let mut v = z[s];
            for k in self.l_start[s]..self.l_start[s + 1] {
                v -= self.l_val[k] * rhs[self.l_idx[k]];
            }
            rhs[self.pivot_row[s]] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_columns(a: &[Vec<f64>]) -> Vec<(Vec<usize>, Vec<f64>)> {
        let m = a.len();
        (0..m)
            .map(|j| {
                let mut idx = Vec::new();
                let mut val = Vec::new();
                for (i, row) in a.iter().enumerate() {
                    if row[j] != 0.0 {
                        idx.push(i);
                        val.push(row[j]);
                    }
                }
                (idx, val)
            })
            .collect()
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn solves_random_sparse_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let m = 1 + trial % 12;
            let mut a = vec![vec![0.0; m]; m];
            for i in 0..m {
                a[i][i] = rng.gen_range(1.0..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                for j in 0..m {
                    if i != j && rng.gen_bool(0.25) {
                        a[i][j] = rng.gen_range(-2.0..2.0);
                    }
                }
            }
            // Shuffle columns so the diagonal is not the natural pivot.
            for j in (1..m).rev() {
                let k = rng.gen_range(0..=j);
                for row in a.iter_mut() {
                    row.swap(j, k);
                }
            }
            let cols = dense_columns(&a);
            let Ok(mut lu) = LuFactors::factorize(m, |p| (&cols[p].0[..], &cols[p].1[..])) else {
                continue;
            };
            let x_true: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mut b = matvec(&a, &x_true);
            lu.ftran(&mut b);
            for (u, v) in b.iter().zip(&x_true) {
                assert!((u - v).abs() < 1e-8, "ftran mismatch {u} vs {v}");
            }
            // y' A = c'  <=>  A' y = c
            let y_true: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mut c: Vec<f64> = (0..m).map(|j| (0..m).map(|i| a[i][j] * y_true[i]).sum()).collect();
            lu.btran(&mut c);
            for (u, v) in c.iter().zip(&y_true) {
                assert!((u - v).abs() < 1e-8, "btran mismatch {u} vs {v}");
            }
        }
    }

    #[test]
    fn reports_singular_columns() {
        let cols: Vec<(Vec<usize>, Vec<f64>)> = vec![
            (vec![0, 1], vec![1.0, 1.0]),
            (vec![0, 1], vec![2.0, 2.0]),
            (vec![2], vec![1.0]),
        ];
        let err = LuFactors::factorize(3, |p| (&cols[p].0[..], &cols[p].1[..])).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
