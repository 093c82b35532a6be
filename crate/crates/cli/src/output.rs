//! CSV and plot-data emission.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use randseries::{PathSample, TrialReport};

/// A real with 17 significant digits, enough to round-trip any f64.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with `#` metadata lines ahead of the header row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, line: impl Into<String>) -> &mut Self {
        self.meta.push(line.into());
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for m in &self.meta {
            let _ = writeln!(s, "# {m}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// Writes `contents` through a temporary file in the same directory, so a
/// failed run never leaves a partial file at `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents).with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// What [`emit_plotdata`] can export.
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    Path(&'a PathSample),
    Reports(&'a [TrialReport]),
}

pub fn plotdata_table(data: PlotData<'_>) -> Table {
    match data {
        PlotData::Path(p) => {
            let mut t = Table::new(&["t", "value"]);
            t.meta("columns: t = time in [0, 1], value = path value at t");
            for (&x, &y) in p.grid.iter().zip(&p.values) {
                t.row(vec![real(x), real(y)]);
            }
            t
        }
        PlotData::Reports(reports) => {
            let mut t = Table::new(&["name", "frequency", "bound", "verdict"]);
            t.meta("columns: name = test, frequency = observed statistic, bound = theoretical bound, verdict = pass/fail");
            for r in reports {
                let verdict = if r.passed() { "pass" } else { "fail" };
                t.row(vec![r.name.clone(), real(r.statistic), real(r.theoretical_bound), verdict.into()]);
            }
            t
        }
    }
}

pub fn emit_plotdata(data: PlotData<'_>, path: &Path) -> Result<()> {
    write_atomic(path, plotdata_table(data).render().as_bytes())
}

/// Fixed-width summary of reports, one line per check.
pub fn report_table(reports: &[TrialReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(
            s,
            "{:<20} {:>8} {}",
            r.name,
            r.trials,
            if r.passed() { "PASS" } else { "FAIL" }
        );
        for c in &r.checks {
            let _ = writeln!(
                s,
                "    {:<4} stat={:<12.6} bound={:<12.6} slack={:<10.6} {}",
                if c.verdict.passed() { "ok" } else { "FAIL" },
                c.statistic,
                c.bound,
                c.slack,
                c.label
            );
        }
    }
    s
}
