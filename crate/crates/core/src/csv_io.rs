//! CSV formats for pattern dumps and simulation output.
//!
//! * pattern: `s,t,i,j`, ordered by `s` then `t`
//! * curves: `frame,new_pairs,cum_mean_discovered` (mean printed with six
//!   decimals)
//! * distribution: `ue,discovered`
//!
//! Writers always emit the header, so an empty table is a single line.

use std::io::{Read, Write};

use thiserror::Error;

use crate::patterns::{Coord, HoppingPattern};
use crate::sim::SimResult;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
}

pub const PATTERN_HEADER: [&str; 4] = ["s", "t", "i", "j"];
pub const CURVES_HEADER: [&str; 3] = ["frame", "new_pairs", "cum_mean_discovered"];
pub const DISTRIBUTION_HEADER: [&str; 2] = ["ue", "discovered"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternRow {
    pub s: usize,
    pub t: u64,
    pub at: Coord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub frame: u64,
    pub new_pairs: u64,
    pub cum_mean_discovered: f64,
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out)
}

fn reader<R: Read>(input: R, expected: &[&str]) -> Result<csv::Reader<R>, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let found = rdr.headers()?.clone();
    if found.iter().ne(expected.iter().copied()) {
        return Err(CsvError::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(rdr)
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    idx: usize,
    row: usize,
) -> Result<T, CsvError>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(idx).ok_or_else(|| CsvError::Row {
        row,
        reason: "missing field".into(),
    })?;
    raw.parse().map_err(|e: T::Err| CsvError::Row {
        row,
        reason: format!("`{raw}`: {e}"),
    })
}

/// Dumps frames `0..frames` for every resource.
pub fn write_pattern<W: Write>(
    out: W,
    pattern: &HoppingPattern,
    frames: u64,
) -> Result<(), CsvError> {
    let mut w = writer(out);
    w.write_record(PATTERN_HEADER)?;
    for s in 0..pattern.resources() {
        for t in 0..frames {
            let c = pattern.coords_raw(s, t as i64);
            w.write_record(&[
                s.to_string(),
                t.to_string(),
                c.i.to_string(),
                c.j.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_pattern_rows<W: Write>(out: W, rows: &[PatternRow]) -> Result<(), CsvError> {
    let mut w = writer(out);
    w.write_record(PATTERN_HEADER)?;
    for r in rows {
        w.write_record(&[
            r.s.to_string(),
            r.t.to_string(),
            r.at.i.to_string(),
            r.at.j.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pattern<R: Read>(input: R) -> Result<Vec<PatternRow>, CsvError> {
    let mut rdr = reader(input, &PATTERN_HEADER)?;
    let mut rows = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        rows.push(PatternRow {
            s: field(&rec, 0, row)?,
            t: field(&rec, 1, row)?,
            at: Coord {
                i: field(&rec, 2, row)?,
                j: field(&rec, 3, row)?,
            },
        });
    }
    Ok(rows)
}

pub fn curve_rows(result: &SimResult) -> Vec<CurveRow> {
    result
        .new_pairs
        .iter()
        .enumerate()
        .map(|(t, &new_pairs)| CurveRow {
            frame: t as u64,
            new_pairs,
            cum_mean_discovered: result.cum_mean(t),
        })
        .collect()
}

pub fn write_curves<W: Write>(out: W, rows: &[CurveRow]) -> Result<(), CsvError> {
    let mut w = writer(out);
    w.write_record(CURVES_HEADER)?;
    for r in rows {
        w.write_record(&[
            r.frame.to_string(),
            r.new_pairs.to_string(),
            format!("{:.6}", r.cum_mean_discovered),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curves<R: Read>(input: R) -> Result<Vec<CurveRow>, CsvError> {
    let mut rdr = reader(input, &CURVES_HEADER)?;
    let mut rows = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        rows.push(CurveRow {
            frame: field(&rec, 0, row)?,
            new_pairs: field(&rec, 1, row)?,
            cum_mean_discovered: field(&rec, 2, row)?,
        });
    }
    Ok(rows)
}

pub fn write_distribution<W: Write>(out: W, discovered: &[u32]) -> Result<(), CsvError> {
    let mut w = writer(out);
    w.write_record(DISTRIBUTION_HEADER)?;
    for (ue, d) in discovered.iter().enumerate() {
        w.write_record(&[ue.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Returns the per-UE counts; UE ids must run `0, 1, 2, ...`.
pub fn read_distribution<R: Read>(input: R) -> Result<Vec<u32>, CsvError> {
    let mut rdr = reader(input, &DISTRIBUTION_HEADER)?;
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        let ue: usize = field(&rec, 0, row)?;
        if ue != out.len() {
            return Err(CsvError::Row {
                row,
                reason: format!("expected ue {}, found {ue}", out.len()),
            });
        }
        out.push(field(&rec, 1, row)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{FrameStructure, PatternSpec};

    #[test]
    fn pattern_header_only() {
        let p = PatternSpec::qc(FrameStructure::new(4, 5).unwrap(), 0)
            .build()
            .unwrap();
        let mut buf = Vec::new();
        write_pattern(&mut buf, &p, 0).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "s,t,i,j\n");
    }

    #[test]
    fn pattern_round_trip() {
        let p = PatternSpec::qc(FrameStructure::new(4, 5).unwrap(), 1)
            .build()
            .unwrap();
        let mut buf = Vec::new();
        write_pattern(&mut buf, &p, 3).unwrap();
        let rows = read_pattern(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 60);
        assert_eq!(
            rows[3],
            PatternRow {
                s: 1,
                t: 0,
                at: Coord { i: 0, j: 1 }
            }
        );
        let mut again = Vec::new();
        write_pattern_rows(&mut again, &rows).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn curves_and_distribution() {
        let rows = vec![
            CurveRow {
                frame: 0,
                new_pairs: 4,
                cum_mean_discovered: 4.0 / 3.0,
            },
            CurveRow {
                frame: 1,
                new_pairs: 0,
                cum_mean_discovered: 4.0 / 3.0,
            },
        ];
        let mut buf = Vec::new();
        write_curves(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "frame,new_pairs,cum_mean_discovered\n0,4,1.333333\n1,0,1.333333\n"
        );
        let parsed = read_curves(buf.as_slice()).unwrap();
        let mut again = Vec::new();
        write_curves(&mut again, &parsed).unwrap();
        assert_eq!(buf, again);

        let mut buf = Vec::new();
        write_distribution(&mut buf, &[2, 1, 1]).unwrap();
        assert_eq!(read_distribution(buf.as_slice()).unwrap(), vec![2, 1, 1]);
        assert!(read_distribution("ue,discovered\n1,3\n".as_bytes()).is_err());
        assert!(matches!(
            read_curves("a,b\n".as_bytes()),
            Err(CsvError::Header { .. })
        ));
    }
}
