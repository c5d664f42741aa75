//! Trace export: header `phase_rad,variance_db`, LF line endings.

use std::io::{Read, Write};

use sqzsim_core::homodyne::HomodyneTrace;

use crate::format::fmt_num;
use crate::AppError;

pub const HEADER: [&str; 2] = ["phase_rad", "variance_db"];

pub fn write_trace<W: Write>(trace: &HomodyneTrace, out: W) -> Result<(), AppError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(HEADER)?;
    for (phase, db) in trace.phases.iter().zip(&trace.variance_db) {
        writer.write_record([fmt_num(*phase), fmt_num(*db)])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn trace_to_string(trace: &HomodyneTrace) -> Result<String, AppError> {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf)?;
    Ok(String::from_utf8(buf).expect("formatted numbers are ASCII"))
}

/// Reads `(phase_rad, variance_db)` rows back.
pub fn read_trace<R: Read>(input: R) -> Result<Vec<(f64, f64)>, AppError> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(HEADER) {
        return Err(AppError::Model(sqzsim_core::Error::InvalidArgument(
            format!(
                "unexpected trace header {:?}",
                headers.iter().collect::<Vec<_>>()
            ),
        )));
    }
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}
