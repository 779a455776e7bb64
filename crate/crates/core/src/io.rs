//! Reading and writing state files and full-precision JSON.
//!
//! A state file is `{"dims": [dA, dB], "matrix": [[{"re": r, "im": i}, ...], ...]}`
//! in row-major order.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::linalg::{c, BipartiteState, ComplexMatrix, NumericConfig};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dims: [usize; 2],
    matrix: Vec<Vec<Entry>>,
}

/// Parses a square complex matrix written as rows of `{"re", "im"}` objects,
/// together with the declared dims.
pub fn parse_matrix_file(text: &str) -> Result<(ComplexMatrix, [usize; 2])> {
    let file: StateFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let n = file.matrix.len();
    if let Some((i, row)) = file.matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {n}", row.len())));
    }
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        let e = file.matrix[i][j];
        c(e.re, e.im)
    });
    Ok((m, file.dims))
}

/// Parses and validates a state file.
pub fn parse_state(text: &str, cfg: &NumericConfig) -> Result<BipartiteState> {
    let (m, [da, db]) = parse_matrix_file(text)?;
    BipartiteState::validate(m, da, db, cfg)
}

pub fn read_state(path: &std::path::Path, cfg: &NumericConfig) -> Result<BipartiteState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    parse_state(&text, cfg)
}

/// Serializes a matrix with the given dims label in the state-file format.
pub fn matrix_to_json(m: &ComplexMatrix, dims: [usize; 2]) -> String {
    let file = StateFile {
        dims,
        matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Entry { re: m[(i, j)].re, im: m[(i, j)].im }).collect()).collect(),
    };
    to_json_pretty(&file)
}

pub fn state_to_json(state: &BipartiteState) -> String {
    let (da, db) = state.dims();
    matrix_to_json(state.matrix(), [da, db])
}

/// Writes floats with 17 significant digits so values round-trip exactly and
/// output is stable across platforms.
#[derive(Debug, Clone)]
pub struct FullPrecision<F>(pub F);

impl<F: Formatter> Formatter for FullPrecision<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no literal for these.
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn to_json_with<T: Serialize + ?Sized, F: Formatter>(value: &T, fmt: F) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(fmt));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn to_json_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    to_json_with(value, PrettyFormatter::new())
}

/// Single-line JSON, for JSON-lines streams.
pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> String {
    to_json_with(value, CompactFormatter)
}
