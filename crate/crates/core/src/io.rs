//! Flat-file formats: CSV tables with a header row and 17-significant-digit
//! floats, and pretty-printed JSON summaries.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::dyadic::DyadicSquare;
use crate::error::{Error, Result};
use crate::estimates::SweepReport;
use crate::step::StepFunction;

/// Fixed float formatting so reruns are byte-identical.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_squares_csv<W: Write>(w: W, squares: &[DyadicSquare]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["level", "ix", "iy"])?;
    for q in squares {
        out.write_record([q.level.to_string(), q.ix.to_string(), q.iy.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_squares_csv<R: std::io::Read>(r: R) -> Result<Vec<DyadicSquare>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut squares = Vec::new();
    for row in rdr.deserialize() {
        let (level, ix, iy): (u32, u64, u64) = row?;
        squares.push(DyadicSquare::new(level, ix, iy)?);
    }
    Ok(squares)
}

pub fn write_sweep_csv<W: Write>(w: W, report: &SweepReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["theta", "m_proj", "int_f", "int_f2", "cs_lower"])?;
    for r in &report.rows {
        out.write_record([r.theta, r.m_proj, r.int_f, r.int_f2, r.cs_lower].map(fmt_f64))?;
    }
    out.flush()?;
    Ok(())
}

/// One row per breakpoint; the value holds on `[breakpoint, next)` and the
/// final breakpoint carries 0.
pub fn write_step_csv<W: Write>(w: W, f: &StepFunction) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["breakpoint", "value"])?;
    write_step_rows(&mut out, f, &[])?;
    out.flush()?;
    Ok(())
}

pub(crate) fn write_step_rows<W: Write>(
    out: &mut csv::Writer<W>,
    f: &StepFunction,
    prefix: &[String],
) -> Result<()> {
    let values = f.values().iter().copied().chain(std::iter::once(0.0));
    for (&b, v) in f.breakpoints().iter().zip(values) {
        let mut record = prefix.to_vec();
        record.push(fmt_f64(b));
        record.push(fmt_f64(v));
        out.write_record(&record)?;
    }
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut file = File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}

pub fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}
