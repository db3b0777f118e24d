//! Problem containers: a sparse linear program in row form and its mixed-binary extension.

use crate::error::{Error, Result};

/// Direction of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// One constraint `sum(coeffs) <sense> rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization LP: `min c'x  s.t.  A x <sense> b,  lower <= x <= upper`.
///
/// Bounds may be infinite. The constraint matrix is stored row-wise and may be
/// built incrementally with [`LinearProgram::add_var`] and [`LinearProgram::add_row`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
    pub names: Vec<String>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    /// Appends a variable and returns its column index.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.add_named_var(String::new(), cost, lower, upper)
    }

    pub fn add_named_var(
        &mut self,
        name: impl Into<String>,
        cost: f64,
        lower: f64,
        upper: f64,
    ) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.names.push(name.into());
        self.objective.len() - 1
    }

    /// Appends a row. Duplicate column entries are summed; explicit zeros are dropped.
    pub fn add_row(&mut self, coeffs: &[(usize, f64)], sense: Sense, rhs: f64) -> usize {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs.to_vec();
        sorted.sort_by_key(|&(j, _)| j);
        for (j, a) in sorted {
            match merged.last_mut() {
                Some((k, v)) if *k == j => *v += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Row {
            coeffs: merged,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    /// Objective value `c'x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Row activities `A x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.coeffs.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    /// Largest violation of a row or bound at `x`, in absolute units.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for (row, act) in self.rows.iter().zip(self.activities(x)) {
            let viol = match row.sense {
                Sense::Le => act - row.rhs,
                Sense::Ge => row.rhs - act,
                Sense::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    /// Checks dimensions, finiteness and bound ordering.
    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension(format!(
                "{} objective entries but {} lower / {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (j, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite(format!("objective coefficient of x{j}")));
            }
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return Err(Error::Bounds { var: j, lower: lo, upper: hi });
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::NonFinite(format!("right-hand side of row {i}")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(Error::Dimension(format!(
                        "row {i} references column {j} but there are {n} variables"
                    )));
                }
                if !a.is_finite() {
                    return Err(Error::NonFinite(format!("coefficient ({i}, {j})")));
                }
            }
        }
        Ok(())
    }
}

/// An LP in which a subset of the variables must take values in {0, 1}.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MixedIntegerProgram {
    pub lp: LinearProgram,
    pub binaries: Vec<usize>,
}

impl MixedIntegerProgram {
    pub fn new(lp: LinearProgram) -> Self {
        Self { lp, binaries: Vec::new() }
    }

    /// Adds a binary variable, stored as a continuous column bounded to [0, 1].
    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> usize {
        let j = self.lp.add_named_var(name, cost, 0.0, 1.0);
        self.binaries.push(j);
        j
    }

    pub fn validate(&self) -> Result<()> {
        self.lp.validate()?;
        let n = self.lp.num_vars();
        for &j in &self.binaries {
            if j >= n {
                return Err(Error::Dimension(format!("binary index {j} out of range ({n} variables)")));
            }
            if self.lp.lower[j] < 0.0 || self.lp.upper[j] > 1.0 {
                return Err(Error::Bounds {
                    var: j,
                    lower: self.lp.lower[j],
                    upper: self.lp.upper[j],
                });
            }
        }
        Ok(())
    }

    /// Largest distance of a binary variable from the nearest integer.
    pub fn max_fractionality(&self, x: &[f64]) -> f64 {
        self.binaries
            .iter()
            .map(|&j| (x[j] - x[j].round()).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_row_merges_duplicates_and_drops_zeros() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, 1.0);
        let y = lp.add_var(1.0, 0.0, 1.0);
        lp.add_row(&[(y, 2.0), (x, 1.0), (y, -2.0), (x, 0.5)], Sense::Le, 3.0);
        assert_eq!(lp.rows[0].coeffs, vec![(x, 1.5)]);
    }

    #[test]
    fn validate_rejects_bad_input() {
        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 2.0, 1.0);
        assert!(matches!(lp.validate(), Err(Error::Bounds { .. })));

        let mut lp = LinearProgram::new();
        lp.add_var(f64::NAN, 0.0, 1.0);
        assert!(matches!(lp.validate(), Err(Error::NonFinite(_))));

        let mut lp = LinearProgram::new();
        lp.add_var(1.0, 0.0, 1.0);
        lp.rows.push(Row { coeffs: vec![(3, 1.0)], sense: Sense::Le, rhs: 1.0 });
        assert!(matches!(lp.validate(), Err(Error::Dimension(_))));
    }

    #[test]
    fn binaries_must_live_in_unit_box() {
        let mut mip = MixedIntegerProgram::default();
        let j = mip.lp.add_var(0.0, 0.0, 2.0);
        mip.binaries.push(j);
        assert!(mip.validate().is_err());
    }
}
