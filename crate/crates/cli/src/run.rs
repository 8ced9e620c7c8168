//! Subcommand dispatch: run a pipeline and write its files.

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde_json::{json, Value as Json};

use crate::output::{gnuplot_script, write_file, Plot, Stamp, Table};
use crate::pipeline::{self, Prepared};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Build,
    Spectrum,
    Count,
    Bohr,
    Trace,
    Validate,
    Report,
}

struct Writer<'a> {
    dir: &'a Path,
    stamp: &'a Stamp,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn csv(&mut self, t: &Table) -> Result<()> {
        let name = format!("{}.csv", t.name);
        write_file(self.dir, &name, &t.to_csv(self.stamp))?;
        self.written.push(self.dir.join(name));
        Ok(())
    }

    fn dat(&mut self, t: &Table) -> Result<()> {
        let name = format!("{}.dat", t.name);
        write_file(self.dir, &name, &t.to_dat(self.stamp))?;
        self.written.push(self.dir.join(name));
        Ok(())
    }

    fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        write_file(self.dir, name, contents)?;
        self.written.push(self.dir.join(name));
        Ok(())
    }

    fn json(&mut self, name: &str, value: &Json) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }
}

/// Run `command` on a prepared scenario, writing into `dir`. Returns the
/// written paths in order.
pub fn run(command: Command, p: &Prepared, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut w = Writer { dir, stamp: &p.stamp, written: Vec::new() };
    let stamp = json!({"scenario": p.scenario.name, "sha256": p.stamp.hash, "bohr": env!("CARGO_PKG_VERSION")});
    match command {
        Command::Build => {
            let (summary, vertices, edges) = pipeline::build(p);
            w.json("complex.json", &summary)?;
            w.csv(&vertices)?;
            w.csv(&edges)?;
        }
        Command::Spectrum => {
            for t in pipeline::spectrum(p)? {
                w.csv(&t)?;
            }
            if let Some((a, m)) = pipeline::matrix_market(p)? {
                w.text("operator.mtx", &a)?;
                w.text("mass.mtx", &m)?;
            }
        }
        Command::Count => {
            let rows = pipeline::count(p)?;
            w.csv(&pipeline::count_table(&rows))?;
            w.json("count.json", &json!({"stamp": stamp, "count": pipeline::count_summary(p, &rows)}))?;
        }
        Command::Bohr => {
            let rows = pipeline::count(p)?;
            let lines = pipeline::bohr(p, &rows)?;
            w.csv(&pipeline::bohr_table(&lines))?;
            let (weak, weak_summary) = pipeline::weak_bohr_table(p);
            w.csv(&weak)?;
            w.json(
                "bohr.json",
                &json!({"stamp": stamp, "bohr": pipeline::bohr_summary(p, &lines), "weak_bohr": weak_summary}),
            )?;
        }
        Command::Trace => {
            let rows = pipeline::trace(p)?;
            w.csv(&pipeline::trace_table(&rows))?;
            w.json("trace.json", &json!({"stamp": stamp, "trace": pipeline::trace_summary(p, &rows)}))?;
        }
        Command::Validate => {
            let (tables, summary) = pipeline::validate(p)?;
            for t in &tables {
                w.csv(t)?;
            }
            w.json("validate.json", &json!({"stamp": stamp, "validate": summary}))?;
        }
        Command::Report => report(p, &mut w, stamp)?,
    }
    Ok(w.written)
}

fn report(p: &Prepared, w: &mut Writer<'_>, stamp: Json) -> Result<()> {
    let rows = pipeline::count(p)?;
    let counts = pipeline::count_table(&rows);
    let lines = pipeline::bohr(p, &rows)?;
    let bohr = pipeline::bohr_table(&lines);
    let (weak, weak_summary) = pipeline::weak_bohr_table(p);
    let (validation, validate_summary) = pipeline::validate(p)?;
    let mut summary = json!({
        "stamp": stamp,
        "count": pipeline::count_summary(p, &rows),
        "bohr": pipeline::bohr_summary(p, &lines),
        "weak_bohr": weak_summary,
        "validate": validate_summary,
    });
    let mut tables = vec![counts, bohr, weak];
    tables.extend(validation);
    let mut plots = vec![
        Plot { title: "bracketed counts", data: "counts.dat", x: 1, ys: vec![(2, "N lower"), (3, "N upper"), (4, "N direct")], logx: true, logy: true },
        Plot { title: "N / g", data: "bohr.dat", x: 1, ys: vec![(9, "ratio")], logx: true, logy: false },
        Plot { title: "Bohr error bound", data: "bohr.dat", x: 1, ys: vec![(8, "bound")], logx: true, logy: true },
        Plot { title: "envelope ratio h", data: "envelope_ratio.dat", x: 1, ys: vec![(2, "h")], logx: true, logy: false },
    ];
    if p.scenario.t.is_some() {
        let trace_rows = pipeline::trace(p)?;
        summary["trace"] = pipeline::trace_summary(p, &trace_rows);
        tables.push(pipeline::trace_table(&trace_rows));
        plots.push(Plot { title: "trace ratio bracket", data: "trace.dat", x: 1, ys: vec![(7, "lower"), (8, "upper")], logx: true, logy: false });
    }
    for t in &tables {
        w.csv(t)?;
        w.dat(t)?;
    }
    w.text("report.gp", &gnuplot_script(&plots))?;
    w.json("report.json", &summary)
}
