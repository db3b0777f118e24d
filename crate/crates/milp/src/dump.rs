//! Plain-text sparse dump of a program, one line per nonzero, for cross-checking
//! with external tools.
//!
//! ```text
//! var <j> <name> <lower> <upper> <cost> <bin|cont>
//! row <i> <sense> <rhs>
//! nz <i> <j> <value>
//! ```

use std::fmt::Write;

use crate::model::MixedIntegerProgram;

pub fn dump_text(mip: &MixedIntegerProgram) -> String {
    let lp = &mip.lp;
    let mut is_bin = vec![false; lp.num_vars()];
    for &j in &mip.binaries {
        is_bin[j] = true;
    }
    let mut out = String::new();
    let _ = writeln!(out, "# vars {} rows {} nonzeros {}", lp.num_vars(), lp.num_rows(), lp.num_nonzeros());
    for j in 0..lp.num_vars() {
        let name = lp.names.get(j).filter(|s| !s.is_empty()).map_or("-", |s| s.as_str());
        let _ = writeln!(
            out,
            "var {j} {name} {} {} {} {}",
            lp.lower[j],
            lp.upper[j],
            lp.objective[j],
            if is_bin[j] { "bin" } else { "cont" }
        );
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let _ = writeln!(out, "row {i} {} {}", row.sense.symbol(), row.rhs);
        for &(j, a) in &row.coeffs {
            let _ = writeln!(out, "nz {i} {j} {a}");
        }
    }
    out
}
