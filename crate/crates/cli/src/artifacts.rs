//! On-disk artifacts shared between stages.
//!
//! JSON artifacts carry a `format` tag; readers reject anything else. Reals
//! are written as decimal strings.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use mertens_core::LatticeBasis;
use serde_json::Value;

pub const FORMAT: &str = "mertens-search/1";

pub const DATASET: &str = "dataset.json";
pub const INSTANCE: &str = "instance.json";
pub const BASIS: &str = "basis.txt";
pub const TARGET: &str = "target.txt";
pub const REDUCED: &str = "reduced.txt";
pub const TRANSFORM: &str = "transform.txt";
pub const REDUCTION: &str = "reduction.json";
pub const CANDIDATES: &str = "candidates.jsonl";
pub const ENUMERATION: &str = "enumeration.json";
pub const REPORTS: &str = "reports.jsonl";
pub const CORRELATION: &str = "correlation.csv";
pub const SUMMARY: &str = "summary.json";
pub const SUMMARY_TEXT: &str = "summary.txt";
pub const RUN_MANIFEST: &str = "run.json";
/// Present while a run has not finished cleanly; holds the reason.
pub const INCOMPLETE: &str = "INCOMPLETE";

/// Shortest round-trip decimal form of a double.
pub fn real(x: f64) -> String {
    format!("{x:?}")
}

pub fn parse_real(v: &Value, what: &str) -> anyhow::Result<f64> {
    v.as_str()
        .with_context(|| format!("{what} is not a string"))?
        .parse()
        .with_context(|| format!("{what} is not a decimal number"))
}

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path) -> anyhow::Result<RunDir> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(RunDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn exists(&self, name: &str) -> bool {
        self.path(name).exists()
    }

    pub fn write_text(&self, name: &str, text: &str) -> anyhow::Result<()> {
        write_file(&self.path(name), text.as_bytes())
    }

    pub fn write_json(&self, name: &str, mut value: Value) -> anyhow::Result<()> {
        value
            .as_object_mut()
            .expect("artifact is an object")
            .insert("format".into(), FORMAT.into());
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn read_json(&self, name: &str) -> anyhow::Result<Value> {
        read_json(&self.path(name))
    }

    pub fn write_basis(&self, name: &str, basis: &LatticeBasis) -> anyhow::Result<()> {
        basis
            .write_to(self.path(name))
            .with_context(|| format!("writing {}", self.path(name).display()))
    }

    pub fn read_basis(&self, name: &str) -> anyhow::Result<LatticeBasis> {
        read_basis(&self.path(name))
    }

    pub fn mark_incomplete(&self, reason: &str) -> anyhow::Result<()> {
        self.write_text(INCOMPLETE, &format!("{reason}\n"))
    }

    pub fn clear_incomplete(&self) -> anyhow::Result<()> {
        match fs::remove_file(self.path(INCOMPLETE)) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(e.into()),
            _ => Ok(()),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match v.get("format").and_then(Value::as_str) {
        Some(FORMAT) => Ok(v),
        Some(other) => bail!("{} has format {other:?}, expected {FORMAT:?}", path.display()),
        None => bail!("{} carries no format tag", path.display()),
    }
}

pub fn read_basis(path: &Path) -> anyhow::Result<LatticeBasis> {
    LatticeBasis::read_from(path).with_context(|| format!("reading basis {}", path.display()))
}

/// Non-empty lines of a JSONL file, parsed.
pub fn read_jsonl(path: &Path) -> anyhow::Result<Vec<Value>> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(out)
}

pub fn write_jsonl(path: &Path, rows: &[Value]) -> anyhow::Result<()> {
    let mut text = String::new();
    for r in rows {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    write_file(path, text.as_bytes())
}
