//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Deliberately naive: every bound becomes a shifted column or an explicit row,
//! every row gets an artificial, and the full tableau is pivoted in place. It
//! shares no code with the revised simplex it is used to check.

use ucmarket_milp::{LinearProgram, Sense};

const EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

impl Outcome {
    pub fn objective(&self) -> Option<f64> {
        match self {
            Outcome::Optimal { objective, .. } => Some(*objective),
            _ => None,
        }
    }
}

/// How an original variable is rebuilt from the non-negative standard-form columns.
enum Map {
    /// `x = offset + z[k]`
    Shift(usize, f64),
    /// `x = offset - z[k]`
    Mirror(usize, f64),
    /// `x = z[a] - z[b]`
    Split(usize, usize),
}

struct Tableau {
    /// rows x (cols + 1); last column is the right-hand side
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimises `cost . z` over the allowed columns. Returns false when unbounded.
    fn optimise(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        let m = self.t.len();
        let rhs = self.cols;
        loop {
            // reduced costs d_j = c_j - c_B B^-1 a_j
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    d -= cost[self.basis[i]] * self.t[i][j];
                }
                if d < -EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][c];
                if a > EPS {
                    let ratio = self.t[i][rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((k, best)) => ratio < best - EPS || (ratio <= best + EPS && self.basis[i] < self.basis[k]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Outcome {
    let n = lp.objective.len();
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    // extra rows for finite upper bounds: (column, width)
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        if l > u {
            return Outcome::Infeasible;
        }
        if l.is_finite() {
            maps.push(Map::Shift(ncols, l));
            if u.is_finite() {
                bound_rows.push((ncols, u - l));
            }
            ncols += 1;
        } else if u.is_finite() {
            maps.push(Map::Mirror(ncols, u));
            ncols += 1;
        } else {
            maps.push(Map::Split(ncols, ncols + 1));
            ncols += 2;
        }
    }

    // rows in terms of z: (coefficients, sense, rhs)
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for row in &lp.rows {
        let mut a = vec![0.0; ncols];
        let mut b = row.rhs;
        for &(j, v) in &row.coeffs {
            match maps[j] {
                Map::Shift(k, off) => {
                    a[k] += v;
                    b -= v * off;
                }
                Map::Mirror(k, off) => {
                    a[k] -= v;
                    b -= v * off;
                }
                Map::Split(p, q) => {
                    a[p] += v;
                    a[q] -= v;
                }
            }
        }
        rows.push((a, row.sense, b));
    }
    for &(k, width) in &bound_rows {
        let mut a = vec![0.0; ncols];
        a[k] = 1.0;
        rows.push((a, Sense::Le, width));
    }

    let mut cost = vec![0.0; ncols];
    let mut constant = 0.0;
    for j in 0..n {
        let c = lp.objective[j];
        match maps[j] {
            Map::Shift(k, off) => {
                cost[k] += c;
                constant += c * off;
            }
            Map::Mirror(k, off) => {
                cost[k] -= c;
                constant += c * off;
            }
            Map::Split(p, q) => {
                cost[p] += c;
                cost[q] -= c;
            }
        }
    }

    // slacks, then one artificial per row
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let structural = ncols + slack_count;
    let cols = structural + m;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut s = ncols;
    for (i, (a, sense, b)) in rows.iter().enumerate() {
        t[i][..ncols].copy_from_slice(a);
        match sense {
            Sense::Le => {
                t[i][s] = 1.0;
                s += 1;
            }
            Sense::Ge => {
                t[i][s] = -1.0;
                s += 1;
            }
            Sense::Eq => {}
        }
        t[i][cols] = *b;
        if *b < 0.0 {
            for v in t[i].iter_mut() {
                *v = -*v;
            }
        }
        t[i][structural + i] = 1.0;
    }
    let mut tab = Tableau {
        t,
        basis: (structural..cols).collect(),
        cols,
    };

    let mut phase1 = vec![0.0; cols];
    for c in phase1.iter_mut().skip(structural) {
        *c = 1.0;
    }
    tab.optimise(&phase1, &vec![true; cols]);
    let infeas: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= structural)
        .map(|i| tab.t[i][cols])
        .sum();
    let scale = 1.0 + rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
    if infeas > 1e-9 * scale {
        return Outcome::Infeasible;
    }
    // drive zero-level artificials out where possible; rows that cannot be
    // cleared are redundant and are dropped
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= structural {
            match (0..structural).find(|&j| tab.t[i][j].abs() > 1e-9) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut phase2 = vec![0.0; cols];
    phase2[..ncols].copy_from_slice(&cost);
    let allowed: Vec<bool> = (0..cols).map(|j| j < structural).collect();
    if !tab.optimise(&phase2, &allowed) {
        return Outcome::Unbounded;
    }
    let mut z = vec![0.0; cols];
    for (r, &b) in tab.basis.iter().enumerate() {
        z[b] = tab.t[r][cols];
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            Map::Shift(k, off) => off + z[k],
            Map::Mirror(k, off) => off - z[k],
            Map::Split(p, q) => z[p] - z[q],
        })
        .collect();
    let objective = cost.iter().zip(&z).map(|(c, v)| c * v).sum::<f64>() + constant;
    Outcome::Optimal { x, objective }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_example() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::new();
        let x = lp.add_var(-3.0, 0.0, f64::INFINITY);
        let y = lp.add_var(-5.0, 0.0, f64::INFINITY);
        lp.add_row(&[(x, 1.0)], Sense::Le, 4.0);
        lp.add_row(&[(y, 2.0)], Sense::Le, 12.0);
        lp.add_row(&[(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        match solve(&lp) {
            Outcome::Optimal { x, objective } => {
                assert!((objective + 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn bounds_and_free_variables() {
        // min x - y, x in [-2, 3], y free, y <= 1 + x, equality x + y = 0.5
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, -2.0, 3.0);
        let y = lp.add_var(-1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(&[(y, 1.0), (x, -1.0)], Sense::Le, 1.0);
        lp.add_row(&[(x, 1.0), (y, 1.0)], Sense::Eq, 0.5);
        // y = 0.5 - x, y <= 1 + x -> x >= -0.25; obj = 2x - 0.5 -> x = -0.25
        let o = solve(&lp);
        assert!((o.objective().unwrap() - (-1.0)).abs() < 1e-9, "{o:?}");
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, f64::INFINITY);
        lp.add_row(&[(x, 1.0)], Sense::Ge, 3.0);
        lp.add_row(&[(x, 1.0)], Sense::Le, 1.0);
        assert_eq!(solve(&lp), Outcome::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        lp.add_row(&[(x, 1.0)], Sense::Ge, 1.0);
        assert_eq!(solve(&lp), Outcome::Unbounded);
    }

    #[test]
    fn mirrored_upper_bound() {
        let mut lp = LinearProgram::new();
        lp.add_var(-1.0, f64::NEG_INFINITY, 7.0);
        assert_eq!(solve(&lp).objective(), Some(-7.0));
    }
}
