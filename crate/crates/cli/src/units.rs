//! Locating and loading unit data.

use std::path::{Path, PathBuf};

use unilift::indecomp::{parse_unit_file, UnitRecord};

use crate::error::{io_err, CliResult};

/// Overrides the bundled unit data: a unit file, or a directory whose
/// `*.json` files are read in name order.
pub const UNITS_ENV: &str = "UNILIFT_UNITS";

/// Where the unit data came from, as recorded in reports.
pub fn describe(path: Option<&Path>) -> String {
    match resolve(path) {
        Some(p) => p.display().to_string(),
        None => "bundled".into(),
    }
}

fn resolve(path: Option<&Path>) -> Option<PathBuf> {
    path.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(UNITS_ENV).map(PathBuf::from))
}

/// Checks that a given unit path exists before any computation starts.
pub fn validate(path: Option<&Path>) -> CliResult<()> {
    if let Some(p) = resolve(path) {
        if !p.exists() {
            return Err(io_err(&p, "no such file or directory"));
        }
    }
    Ok(())
}

pub fn load(path: Option<&Path>) -> CliResult<Vec<UnitRecord>> {
    let Some(p) = resolve(path) else {
        return Ok(unilift::data::bundled_units());
    };
    let files = if p.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(&p)
            .map_err(|e| io_err(&p, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|f| f.extension().is_some_and(|x| x == "json"))
            .collect();
        v.sort();
        v
    } else {
        vec![p]
    };
    let mut out = Vec::new();
    for f in files {
        let s = std::fs::read_to_string(&f).map_err(|e| io_err(&f, e))?;
        out.extend(parse_unit_file(&s)?.fields);
    }
    Ok(out)
}
