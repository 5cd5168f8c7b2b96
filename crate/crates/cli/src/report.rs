//! JSON and CSV report emission.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "intersective-lab";

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("float round trip")
}

pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        json!(round12(x))
    }
}

/// Complex number as `[re, im]`.
pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

/// Integer as a JSON number when it fits `i64`, a decimal string otherwise.
pub fn big(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => Value::String(x.to_string()),
    }
}

pub fn rational(x: &BigRational) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub threads: usize,
    pub wall_time_ms: u64,
}

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub manifest: Manifest,
    pub result: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Tabular output: a fixed header and rows of already formatted cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_path(&self, path: &Path) -> csv::Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }
}

/// Float cell with 12 significant digits.
pub fn cell(x: f64) -> String {
    match num(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(2.0f64.sqrt() * 1e20), 1.41421356237e20);
        assert_eq!(cell(f64::INFINITY), "inf");
        assert_eq!(cell(0.1 + 0.2), "0.3");
        assert_eq!(complex(Complex64::new(1.0, -0.5)), json!([1.0, -0.5]));
    }

    #[test]
    fn big_values() {
        assert_eq!(big(&BigInt::from(-5)), json!(-5));
        let huge: BigInt = BigInt::from(1u64) << 80;
        assert_eq!(big(&huge), json!("1208925819614629174706176"));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["q", "value"]);
        t.push(vec!["3".into(), cell(0.5)]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "q,value\n3,0.5\n");
    }
}
