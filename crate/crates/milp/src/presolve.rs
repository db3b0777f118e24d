//! Removal of fixed columns and empty rows ahead of the simplex.

use crate::model::{LinearProgram, Row, Sense};
use crate::result::{SolveResult, Status};

pub(crate) enum Presolve {
    Reduced(Reduction),
    /// An empty row with an unsatisfiable right-hand side, or crossed bounds.
    Infeasible,
}

pub(crate) struct Reduction {
    pub lp: LinearProgram,
    /// original column -> reduced column
    col_map: Vec<Option<usize>>,
    /// original row -> reduced row
    row_map: Vec<Option<usize>>,
    fixed: Vec<f64>,
}

/// Builds the reduced problem for `lp` under the bound vectors `lower`/`upper`.
pub(crate) fn presolve(lp: &LinearProgram, lower: &[f64], upper: &[f64], tol: f64) -> Presolve {
    let n = lp.num_vars();
    let mut col_map = vec![None; n];
    let mut fixed = vec![0.0; n];
    let mut reduced = LinearProgram::new();
    for j in 0..n {
        if lower[j] > upper[j] {
            return Presolve::Infeasible;
        }
        if lower[j] == upper[j] {
            fixed[j] = lower[j];
        } else {
            col_map[j] = Some(reduced.add_var(lp.objective[j], lower[j], upper[j]));
        }
    }
    let mut row_map = vec![None; lp.num_rows()];
    for (i, row) in lp.rows.iter().enumerate() {
        let mut rhs = row.rhs;
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        for &(j, a) in &row.coeffs {
            match col_map[j] {
                Some(k) => coeffs.push((k, a)),
                None => rhs -= a * fixed[j],
            }
        }
        if coeffs.is_empty() {
            let scale = tol * (1.0 + row.rhs.abs());
            let ok = match row.sense {
                Sense::Le => rhs >= -scale,
                Sense::Ge => rhs <= scale,
                Sense::Eq => rhs.abs() <= scale,
            };
            if !ok {
                return Presolve::Infeasible;
            }
            continue;
        }
        reduced.rows.push(Row { coeffs, sense: row.sense, rhs });
        row_map[i] = Some(reduced.rows.len() - 1);
    }
    Presolve::Reduced(Reduction { lp: reduced, col_map, row_map, fixed })
}

impl Reduction {
    #[cfg(test)]
    fn removed_cols(&self) -> usize {
        self.col_map.iter().filter(|c| c.is_none()).count()
    }

    /// Maps a result on the reduced problem back to the original columns and rows.
    pub fn restore(&self, original: &LinearProgram, mut r: SolveResult) -> SolveResult {
        if r.status != Status::Optimal {
            return r;
        }
        let x: Vec<f64> = self
            .col_map
            .iter()
            .enumerate()
            .map(|(j, c)| match c {
                Some(k) => r.solution[*k],
                None => self.fixed[j],
            })
            .collect();
        let y: Vec<f64> = match &r.duals {
            Some(dy) => self
                .row_map
                .iter()
                .map(|m| m.map_or(0.0, |k| dy[k]))
                .collect(),
            None => vec![0.0; original.num_rows()],
        };
        let mut d = original.objective.clone();
        for (i, row) in original.rows.iter().enumerate() {
            if y[i] != 0.0 {
                for &(j, a) in &row.coeffs {
                    d[j] -= a * y[i];
                }
            }
        }
        r.objective = original.evaluate(&x);
        r.best_bound = r.objective;
        r.solution = x;
        r.duals = Some(y);
        r.reduced_costs = Some(d);
        r
    }
}
