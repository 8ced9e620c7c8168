//! CSV tables, gnuplot data files and scripts.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

/// A cell of an output table.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as u64)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::Int(x as u64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Int(x as u64)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.into())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Missing, Into::into)
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // shortest round-trip representation: deterministic and exact
            Value::Float(x) => write!(f, "{x:e}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(s) => write!(f, "{s}"),
            Value::Missing => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Table { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width of {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    /// `# scenario <name> sha256 <hash> bohr <version>`, the header, rows.
    pub fn to_csv(&self, stamp: &Stamp) -> String {
        let mut out = String::new();
        writeln!(out, "{}", stamp.comment()).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    /// Whitespace-separated numeric columns; missing values become `NaN`.
    pub fn to_dat(&self, stamp: &Stamp) -> String {
        let mut out = String::new();
        writeln!(out, "{}", stamp.comment()).unwrap();
        writeln!(out, "# {}", self.columns.join(" ")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Missing => "NaN".into(),
                    Value::Text(s) => format!("\"{s}\""),
                    v => v.to_string(),
                })
                .collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        out
    }
}

/// Provenance line written at the top of every file.
#[derive(Clone, Debug, PartialEq)]
pub struct Stamp {
    pub scenario: String,
    pub hash: String,
}

impl Stamp {
    pub fn comment(&self) -> String {
        format!("# scenario {} sha256 {} bohr {}", self.scenario, self.hash, env!("CARGO_PKG_VERSION"))
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// One panel of a gnuplot script: `(data file, x column, [(y column, title)])`.
pub struct Plot<'a> {
    pub title: &'a str,
    pub data: &'a str,
    pub x: usize,
    pub ys: Vec<(usize, &'a str)>,
    pub logx: bool,
    pub logy: bool,
}

pub fn gnuplot_script(plots: &[Plot<'_>]) -> String {
    let mut out = String::from("set terminal pngcairo size 900,600\nset key left top\n");
    for (i, p) in plots.iter().enumerate() {
        writeln!(out, "\nset output 'plot{i}.png'").unwrap();
        writeln!(out, "set title '{}'", p.title).unwrap();
        writeln!(out, "{}set logscale x", if p.logx { "" } else { "un" }).unwrap();
        writeln!(out, "{}set logscale y", if p.logy { "" } else { "un" }).unwrap();
        let series: Vec<String> = p
            .ys
            .iter()
            .map(|(y, t)| format!("'{}' using {}:{} with linespoints title '{}'", p.data, p.x, y, t))
            .collect();
        writeln!(out, "plot {}", series.join(", \\\n     ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stamp() -> Stamp {
        Stamp { scenario: "s".into(), hash: "ab".into() }
    }

    #[test]
    fn csv_has_stamp_and_header() {
        let mut t = Table::new("t", &["lambda", "N"]);
        t.push(vec![0.1.into(), 3usize.into()]);
        t.push(vec![2.5.into(), Value::Missing]);
        let csv = t.to_csv(&stamp());
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# scenario s sha256 ab bohr "));
        assert_eq!(lines[1], "lambda,N");
        assert_eq!(lines[2], "1e-1,3");
        assert_eq!(lines[3], "2.5e0,");
    }

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, 123456.789, -0.0] {
            let s = Value::Float(x).to_string();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn dat_marks_missing() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![1.0.into(), Value::Missing]);
        assert!(t.to_dat(&stamp()).lines().nth(2).unwrap().ends_with("NaN"));
    }

    #[test]
    fn script_references_data() {
        let s = gnuplot_script(&[Plot { title: "x", data: "d.dat", x: 1, ys: vec![(2, "y")], logx: true, logy: false }]);
        assert!(s.contains("'d.dat' using 1:2"));
        assert!(s.contains("set logscale x"));
    }
}
