//! CSV output.
//!
//! ```text
//! trial,scheme,d1,d2,success,rel_err_2,rel_err_F,ms
//! 0,length,16,16,1,1.2345678901234567e-15,...,0.0000000000000000e0
//! # summary
//! # scheme,d1,d2,trials,successes,fraction
//! # length,16,16,500,500,1.0000000000000000e0
//! # note sigma=...
//! # extras
//! # 0,length,16,16,err_ratio=...
//! ```
//!
//! Reals are written with 17 significant digits, so equal inputs always give
//! byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::experiment::{fmt_real, Summary, TrialRecord};
use crate::LabError;

pub const HEADER: &str = "trial,scheme,d1,d2,success,rel_err_2,rel_err_F,ms";

pub fn write_csv<W: Write>(mut w: W, records: &[TrialRecord], summary: &Summary) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.trial,
            r.scheme,
            r.d1,
            r.d2,
            u8::from(r.success),
            fmt_real(r.rel_err_2),
            fmt_real(r.rel_err_f),
            fmt_real(r.ms)
        )?;
    }
    writeln!(w, "# summary")?;
    writeln!(w, "# scheme,d1,d2,trials,successes,fraction")?;
    for row in &summary.rows {
        writeln!(
            w,
            "# {},{},{},{},{},{}",
            row.scheme,
            row.d1,
            row.d2,
            row.trials,
            row.successes,
            fmt_real(row.fraction())
        )?;
    }
    for note in &summary.notes {
        writeln!(w, "# note {note}")?;
    }
    if records.iter().any(|r| !r.extras.is_empty()) {
        writeln!(w, "# extras")?;
        for r in records.iter().filter(|r| !r.extras.is_empty()) {
            write!(w, "# {},{},{},{}", r.trial, r.scheme, r.d1, r.d2)?;
            for (k, v) in &r.extras {
                write!(w, ",{k}={}", fmt_real(*v))?;
            }
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn emit_csv(records: &[TrialRecord], summary: &Summary, path: &Path) -> Result<(), LabError> {
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    write_csv(BufWriter::new(file), records, summary).map_err(|e| LabError::io(path, e))
}
