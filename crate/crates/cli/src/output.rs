use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// 17 significant digits, enough to round-trip binary64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with a header row; values must not contain commas.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Value> =
                    self.header.iter().zip(r).map(|(h, v)| (h.to_string(), Value::String(v.clone()))).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "columns": self.header, "rows": rows })
    }
}

/// Writes to a sibling temporary file, then renames over the target.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".metadata.json");
    PathBuf::from(s)
}

/// Provenance record kept next to data files, never inside them.
pub fn metadata(command: &str, args: &[String], files: &[String]) -> String {
    let v = json!({
        "tool": "virial-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "argv": args,
        "files": files,
        "float_format": "17 significant digits",
        "normalization": "eta = exp(-2 epsilon t), lambda = (1 - eta)/(2 epsilon)",
    });
    let mut s = serde_json::to_string_pretty(&v).expect("metadata serializes");
    s.push('\n');
    s
}

/// Data to stdout, or to `out` plus its sidecar.
pub fn emit(out: Option<&Path>, contents: &str, command: &str, args: &[String]) -> io::Result<()> {
    match out {
        None => {
            let mut so = io::stdout().lock();
            so.write_all(contents.as_bytes())?;
            so.flush()
        }
        Some(p) => {
            write_atomic(p, contents)?;
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            write_atomic(&sidecar_path(p), &metadata(command, args, &[name]))
        }
    }
}
