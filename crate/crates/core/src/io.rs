//! CSV samples and grid strings.
//!
//! CSV files are comma separated with `\n` line endings. Readers take one
//! column (`value`) or two (`x,y`); the header row is optional. Writers always
//! emit a header and the shortest decimal text that parses back to the same float.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::inference::cf::linear_grid;
use crate::inference::exchange::Grid;
use crate::sample::{PairSample, Sample};

/// Most points a grid string may request.
pub const MAX_GRID_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum CsvData {
    Values(Sample),
    Pairs(PairSample),
}

/// Shortest round-trip decimal text of `v`, switching to exponent form for very large or small magnitudes.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn input_err(e: csv::Error) -> Error {
    Error::Input(e.to_string())
}

/// Reads a one- or two-column CSV of finite floats.
pub fn read_csv<R: Read>(reader: R) -> Result<CsvData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(input_err)?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if line == 0 => {
                // header row
                width = Some(record.len());
                continue;
            }
            Err(_) => {
                return Err(Error::Input(format!("row {}: not a number: {:?}", line + 1, record)));
            }
        };
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("row {}: non-finite value {v}", line + 1)));
        }
        let w = *width.get_or_insert(values.len());
        if values.len() != w {
            return Err(Error::Input(format!(
                "row {}: expected {w} columns, found {}",
                line + 1,
                values.len()
            )));
        }
        rows.push(values);
    }
    match width {
        _ if rows.is_empty() => Err(Error::Input("no data rows".into())),
        Some(1) => Ok(CsvData::Values(Sample::new(rows.into_iter().map(|r| r[0]).collect(), None))),
        Some(2) => {
            let (xs, ys) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
            Ok(CsvData::Pairs(PairSample { xs, ys, provenance: None }))
        }
        Some(w) => Err(Error::Input(format!("expected 1 or 2 columns, found {w}"))),
        None => unreachable!("width is set by the first row"),
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_values<W: Write>(out: W, values: &[f64]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["value"]).map_err(input_err)?;
    for &v in values {
        w.write_record([format_float(v)]).map_err(input_err)?;
    }
    w.flush().map_err(|e| Error::Input(e.to_string()))
}

pub fn write_pairs<W: Write>(out: W, pairs: &PairSample) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["x", "y"]).map_err(input_err)?;
    for (x, y) in pairs.iter() {
        w.write_record([format_float(x), format_float(y)]).map_err(input_err)?;
    }
    w.flush().map_err(|e| Error::Input(e.to_string()))
}

/// Writes a table with the given header; cells are written as given.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(header).map_err(input_err)?;
    for row in rows {
        w.write_record(row).map_err(input_err)?;
    }
    w.flush().map_err(|e| Error::Input(e.to_string()))
}

fn grid_syntax(position: usize, message: &str, expected: &str) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
        expected: expected.into(),
    }
}

fn parse_field<T: std::str::FromStr>(text: &str, offset: usize, expected: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| grid_syntax(offset, &format!("cannot read {:?}", text), expected))
}

/// Parses `lo:hi:steps` into `steps + 1` evenly spaced points.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(grid_syntax(0, "grid must have three fields", "lo:hi:steps"));
    }
    let off1 = parts[0].chars().count() + 1;
    let off2 = off1 + parts[1].chars().count() + 1;
    let lo: f64 = parse_field(parts[0], 0, "number")?;
    let hi: f64 = parse_field(parts[1], off1, "number")?;
    let steps: usize = parse_field(parts[2], off2, "positive integer")?;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::domain("grid range", format!("{lo}:{hi}"), "finite lo < hi"));
    }
    if steps == 0 || steps > MAX_GRID_STEPS {
        return Err(Error::domain("grid steps", steps, "1..=1000000"));
    }
    Ok(linear_grid(lo, hi, steps))
}

/// Parses a square binning: `quantiles:K`, `lo:hi:steps` (evenly spaced edges)
/// or a comma list of increasing edges.
pub fn parse_bin_grid(text: &str) -> Result<Grid> {
    let t = text.trim();
    if let Some(k) = t.strip_prefix("quantiles:") {
        let k: usize = parse_field(k, "quantiles:".len(), "bin count")?;
        if !(2..=MAX_GRID_STEPS).contains(&k) {
            return Err(Error::DegenerateGrid(format!("{k} bins per axis")));
        }
        return Ok(Grid::Quantiles(k));
    }
    let edges = if t.contains(':') {
        parse_grid(t)?
    } else {
        let mut offset = 0;
        let mut edges = Vec::new();
        for part in t.split(',') {
            edges.push(parse_field::<f64>(part, offset, "number")?);
            offset += part.chars().count() + 1;
        }
        edges
    };
    if edges.len() < 3 {
        return Err(Error::DegenerateGrid("a grid needs at least 2 bins".into()));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("grid edges must be finite and increasing".into()));
    }
    Ok(Grid::Edges(edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_column_with_and_without_header() {
        let a = read_csv("value\n1.5\n-2\n".as_bytes()).unwrap();
        let b = read_csv("1.5\n-2\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        match a {
            CsvData::Values(s) => assert_eq!(s.values, vec![1.5, -2.0]),
            _ => panic!("expected values"),
        }
    }

    #[test]
    fn two_columns() {
        match read_csv("x,y\n1,2\n3,4\n".as_bytes()).unwrap() {
            CsvData::Pairs(p) => {
                assert_eq!(p.xs, vec![1.0, 3.0]);
                assert_eq!(p.ys, vec![2.0, 4.0]);
            }
            _ => panic!("expected pairs"),
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(read_csv("".as_bytes()).is_err());
        assert!(read_csv("value\n".as_bytes()).is_err());
        assert!(read_csv("1\nabc\n".as_bytes()).is_err());
        assert!(read_csv("1,2\n3\n".as_bytes()).is_err());
        assert!(read_csv("1,2,3\n".as_bytes()).is_err());
        assert!(read_csv("inf\n".as_bytes()).is_err());
    }

    #[test]
    fn writer_format() {
        let mut buf = Vec::new();
        write_values(&mut buf, &[0.1, -3.0, 1e300, 2.5e-10]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value\n0.1\n-3\n1e300\n2.5e-10\n");
        let mut buf = Vec::new();
        let p = PairSample { xs: vec![1.0], ys: vec![0.5], provenance: None };
        write_pairs(&mut buf, &p).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y\n1,0.5\n");
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:4").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("1:0:4").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(matches!(parse_grid("0:x:3"), Err(Error::Syntax { position: 2, .. })));
        assert!(matches!(parse_grid("0:1"), Err(Error::Syntax { .. })));
        assert_eq!(parse_bin_grid("quantiles:6").unwrap(), Grid::Quantiles(6));
        assert_eq!(parse_bin_grid("0,1,2,3").unwrap(), Grid::Edges(vec![0.0, 1.0, 2.0, 3.0]));
        assert_eq!(parse_bin_grid("0:3:3").unwrap(), Grid::Edges(vec![0.0, 1.0, 2.0, 3.0]));
        assert!(parse_bin_grid("0,1").is_err());
        assert!(parse_bin_grid("quantiles:1").is_err());
        assert!(parse_bin_grid("2,1,3").is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip(v in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
            let mut buf = Vec::new();
            write_values(&mut buf, &[v]).unwrap();
            match read_csv(buf.as_slice()).unwrap() {
                CsvData::Values(s) => prop_assert_eq!(s.values[0].to_bits(), v.to_bits()),
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn readers_never_panic(text in ".{0,200}") {
            let _ = read_csv(text.as_bytes());
            let _ = parse_grid(&text);
            let _ = parse_bin_grid(&text);
        }
    }
}
