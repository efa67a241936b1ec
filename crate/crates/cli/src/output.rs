//! CSV tables and the plain-text report. Everything is rendered in memory
//! first so a failed run leaves no partial data files behind.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fracsolve_core::field::SolutionField;
use fracsolve_core::spectral::CompatibilityReport;

/// A float with `digits` significant digits in scientific notation.
pub fn number(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), v)
}

/// In-memory CSV table with a header row and LF line endings.
pub struct Table {
    pub name: &'static str,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&str]) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { name, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        self.writer.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {}", e.error()))
    }
}

/// u(t, x) row-major over the tensor grid: t slowest, x fastest.
pub fn field_table(field: &SolutionField, digits: usize) -> Result<Table> {
    let mut table = Table::new("u_field.csv", &["t", "x", "u"])?;
    let xs = field.space.points();
    for (i, t) in field.time.points().into_iter().enumerate() {
        let ts = number(t, digits);
        for (j, &x) in xs.iter().enumerate() {
            table.row([ts.as_str(), &number(x, digits), &number(field.u[[i, j]], digits)])?;
        }
    }
    Ok(table)
}

/// Writes the tables, creating the directory if needed.
pub fn write_tables(dir: &Path, tables: Vec<Table>) -> Result<Vec<PathBuf>> {
    let mut rendered = Vec::with_capacity(tables.len());
    for t in tables {
        let name = t.name;
        rendered.push((name, t.into_bytes()?));
    }
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    rendered
        .into_iter()
        .map(|(name, bytes)| {
            let path = dir.join(name);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            Ok(path)
        })
        .collect()
}

/// Accumulates the sections of report.txt.
#[derive(Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn section(&mut self, title: &str) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        let _ = writeln!(self.text, "[{title}]");
    }

    pub fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key:<28} {value}");
    }

    pub fn compatibility(&mut self, report: &CompatibilityReport) {
        let verdict = if report.passed() { "pass" } else { "FAIL" };
        self.line(format!("profile {}: {verdict}", report.profile.name()));
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            self.line(format!(
                "  {mark} {:<18} measured {:.3e}  tolerance {:.3e}",
                c.name, c.measured, c.tolerance
            ));
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("report.txt");
        fs::write(&path, &self.text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
