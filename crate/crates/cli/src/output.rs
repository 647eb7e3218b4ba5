//! Serialization of command results: compact JSON with 17 significant
//! digits per float, or CSV with a header row and `\n` line endings.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Writes every float as `d.dddddddddddddddde±x`.
struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn json<T: Serialize>(value: &T) -> io::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    out.push(b'\n');
    Ok(out)
}

/// Float cell in the same notation as the JSON output.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

/// A rendered result in both formats.
pub struct Report {
    pub json: Vec<u8>,
    pub csv: Vec<u8>,
}

impl Report {
    pub fn new<T: Serialize>(value: &T, header: &[&str], rows: &[Vec<String>]) -> io::Result<Self> {
        Ok(Report { json: json(value)?, csv: csv(header, rows)? })
    }

    pub fn bytes(self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => self.json,
            Format::Csv => self.csv,
        }
    }
}
