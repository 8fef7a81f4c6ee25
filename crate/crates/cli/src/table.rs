//! Tabular output: CSV, or whitespace-aligned text, each preceded by a
//! comment line recording the tool version and every parameter.

use std::io::Write;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

pub struct Table {
    pub header_comment: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest representation that parses back to the same f64, in exponent
/// form outside [1e-4, 1e15). Never locale dependent.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Table {
    pub fn write<W: Write>(&self, mut w: W, format: Format) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(e.to_string());
        writeln!(w, "# {}", self.header_comment).map_err(io)?;
        match format {
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(&self.columns)
                    .map_err(|e| CliError::Io(e.to_string()))?;
                for r in &self.rows {
                    csv.write_record(r)
                        .map_err(|e| CliError::Io(e.to_string()))?;
                }
                csv.flush().map_err(io)?;
            }
            Format::Text => {
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|i| {
                        self.rows
                            .iter()
                            .map(|r| r[i].len())
                            .chain([self.columns[i].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: Vec<&str>| {
                    cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                writeln!(w, "{}", line(self.columns.clone())).map_err(io)?;
                for r in &self.rows {
                    writeln!(w, "{}", line(r.iter().map(String::as_str).collect())).map_err(io)?;
                }
                w.flush().map_err(io)?;
            }
        }
        Ok(())
    }
}
