//! File formats: JSON with 17 significant digits per float, and the
//! `epsilon,scheme,bound,mode` curve CSV with 10 significant digits.
//!
//! Both are fixed points of parse-then-emit, so re-emitting a file that was
//! read back produces identical bytes.

use std::io;

use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::schemes::{SchemeCurve, SchemeId};

/// Normative header of the curve CSV.
pub const CURVE_CSV_HEADER: [&str; 4] = ["epsilon", "scheme", "bound", "mode"];

/// Pretty JSON in which every float is written as `d.dddddddddddddddde±x`.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter::default());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[derive(Default)]
struct SigFigFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SigFigFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// 10 significant digits, scientific notation.
pub fn csv_number(x: f64) -> String {
    format!("{x:.9e}")
}

/// One row of the curve CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CurveRow {
    pub epsilon: f64,
    pub scheme: SchemeId,
    pub bound: f64,
    pub mode: String,
}

/// Flattens curves into rows: grid order, then [`SchemeId::ALL`] order.
pub fn curve_rows(curves: &[SchemeCurve]) -> Vec<CurveRow> {
    let len = curves.first().map_or(0, |c| c.points.len());
    let mut ordered: Vec<&SchemeCurve> = curves.iter().collect();
    ordered.sort_by_key(|c| SchemeId::ALL.iter().position(|s| *s == c.scheme));
    (0..len)
        .flat_map(|i| {
            ordered.iter().map(move |c| CurveRow {
                epsilon: c.points[i].0,
                scheme: c.scheme,
                bound: c.points[i].1,
                mode: c.mode.label().to_owned(),
            })
        })
        .collect()
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::invalid("csv", format!("malformed curve CSV: {e}"))
}

pub fn rows_to_csv(rows: &[CurveRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CURVE_CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            csv_number(r.epsilon),
            r.scheme.name().to_owned(),
            csv_number(r.bound),
            r.mode.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn curves_to_csv(curves: &[SchemeCurve]) -> String {
    rows_to_csv(&curve_rows(curves))
}

/// Parses a curve CSV, requiring the normative header.
pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?;
    if header.iter().ne(CURVE_CSV_HEADER) {
        return Err(csv_error(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}
