use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::inverse::IterationRecord;

/// Appends one record as a single JSON line.
pub fn write_record<W: Write>(record: &IterationRecord, mut out: W) -> Result<()> {
    serde_json::to_writer(&mut out, record)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_iteration_log<W: Write>(records: &[IterationRecord], mut out: W) -> Result<()> {
    for r in records {
        write_record(r, &mut out)?;
    }
    Ok(())
}

pub fn read_iteration_log<R: BufRead>(input: R) -> Result<Vec<IterationRecord>> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        records.push(r);
    }
    Ok(records)
}
