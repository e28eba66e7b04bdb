//! CSV emission and reading back.

use std::io::{Read, Write};

use crate::error::Result;
use crate::eval::SweepOutput;

/// Header plus one line per row, comma-separated, LF line endings.
pub fn emit_csv<W: Write>(out: &SweepOutput, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(out.columns())?;
    for row in &out.rows {
        w.write_record(out.cells(row).iter().map(|c| c.render()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(out: &SweepOutput) -> Result<String> {
    let mut buf = Vec::new();
    emit_csv(out, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

/// Header and records of a CSV produced by [`emit_csv`].
pub fn read_csv<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::ReaderBuilder::new().from_reader(reader);
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut records = Vec::new();
    for rec in r.records() {
        records.push(rec?.iter().map(str::to_owned).collect());
    }
    Ok((header, records))
}

/// Writes the error log, one line per failed point.
pub fn emit_error_log<W: Write>(out: &SweepOutput, mut writer: W) -> Result<()> {
    for e in &out.errors {
        writeln!(writer, "{}", e.log_line())?;
    }
    writer.flush()?;
    Ok(())
}
