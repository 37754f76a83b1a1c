//! Tables and their CSV/JSON encodings.
//!
//! Numbers are written as `{:.16e}`, i.e. 17 significant digits, which is
//! enough for every `f64` to survive a write/read round trip unchanged.

use std::io::Write;

use serde::Deserialize;

use crate::config::Format;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Appends a `quantity,re,im` row.
    pub fn push_complex(&mut self, name: &str, z: epdyn::Complex64) {
        self.push(vec![
            Cell::Text(name.into()),
            Cell::Num(z.re),
            Cell::Num(z.im),
        ]);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// A `# epdyn <version>` line, the header row, then one line per row.
    pub fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        writeln!(out, "# epdyn {VERSION}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    /// An array of objects keyed by column name, one object per line.
    pub fn write_json(&self, out: &mut dyn Write) -> Result<(), CliError> {
        writeln!(out, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = self
                .columns
                .iter()
                .zip(row)
                .map(|(k, v)| match v {
                    Cell::Num(x) => format!("\"{k}\": {}", format_number(*x)),
                    Cell::Text(s) => format!("\"{k}\": \"{}\"", escape_json(s)),
                })
                .collect();
            let sep = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(out, "  {{{}}}{sep}", fields.join(", "))?;
        }
        writeln!(out, "]")?;
        Ok(())
    }
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub const SWEEP_COLUMNS: [&str; 5] = ["lambda", "re_e1", "im_e1", "re_e2", "im_e2"];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub re_e1: f64,
    pub im_e1: f64,
    pub re_e2: f64,
    pub im_e2: f64,
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    for r in rows {
        table.push(
            [r.lambda, r.re_e1, r.im_e1, r.re_e2, r.im_e2]
                .into_iter()
                .map(Cell::Num)
                .collect(),
        );
    }
    table
}

/// Reads a sweep table as written by [`Table::write_csv`].
pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().ne(SWEEP_COLUMNS) {
        return Err(CliError::Usage(format!(
            "expected sweep columns {}, found {}",
            SWEEP_COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(CliError::from))
        .collect()
}
