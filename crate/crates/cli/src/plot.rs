//! Plot-ready `.dat` files: two whitespace-separated columns per line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lexweight_core::experiment::format_number;
use lexweight_core::Error;

pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }
}

pub fn file_name(experiment: &str, curve: &str) -> String {
    format!("{experiment}_{curve}.dat")
}

/// Writes `<experiment>_<curve>.dat` for every non-empty curve.
///
/// Empty curves are skipped with a warning on stderr.
pub fn emit(dir: &Path, experiment: &str, curves: &[Curve]) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for curve in curves {
        let name = file_name(experiment, &curve.name);
        if curve.points.is_empty() {
            eprintln!(
                "warning: curve '{}' is empty; {name} not written",
                curve.name
            );
            continue;
        }
        let mut text = String::new();
        for &(x, y) in &curve.points {
            let _ = writeln!(text, "{} {}", format_number(x), format_number(y));
        }
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
