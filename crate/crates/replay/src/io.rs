//! Dataset directory layout: `matches/<id>.json` and `labels/<id>.json`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{ReplayError, Result};
use crate::model::{LabelSet, MatchRecord};
use crate::parse::{labels_to_json, match_to_json, parse_labels_json, parse_match_json};

pub const MATCHES_DIR: &str = "matches";
pub const LABELS_DIR: &str = "labels";

/// File-name safe form of a match id.
pub fn file_stem(match_id: &str) -> String {
    match_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn read_match(path: &Path) -> Result<MatchRecord> {
    let bytes = fs::read(path).map_err(|e| ReplayError::io(path, e))?;
    parse_match_json(&bytes)
}

pub fn read_labels(path: &Path) -> Result<LabelSet> {
    let bytes = fs::read(path).map_err(|e| ReplayError::io(path, e))?;
    parse_labels_json(&bytes)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| ReplayError::io(parent, e))?;
    }
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes).map_err(|e| ReplayError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| ReplayError::io(path, e))
}

pub fn match_path(root: &Path, match_id: &str) -> PathBuf {
    root.join(MATCHES_DIR).join(format!("{}.json", file_stem(match_id)))
}

pub fn labels_path(root: &Path, match_id: &str) -> PathBuf {
    root.join(LABELS_DIR).join(format!("{}.json", file_stem(match_id)))
}

pub fn write_match(root: &Path, m: &MatchRecord) -> Result<PathBuf> {
    let p = match_path(root, &m.match_id);
    write_atomic(&p, &match_to_json(m))?;
    Ok(p)
}

pub fn write_labels(root: &Path, l: &LabelSet) -> Result<PathBuf> {
    let p = labels_path(root, &l.match_id);
    write_atomic(&p, &labels_to_json(l))?;
    Ok(p)
}

/// Sorted list of `*.json` files in `dir`; a missing directory is empty.
pub fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| ReplayError::io(dir, e))? {
        let entry = entry.map_err(|e| ReplayError::io(dir, e))?;
        let p = entry.path();
        if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Match files of a dataset directory, sorted by file name.
pub fn match_files(root: &Path) -> Result<Vec<PathBuf>> {
    json_files(&root.join(MATCHES_DIR))
}

/// Load every match together with its label file.
pub fn load_dataset(root: &Path) -> Result<Vec<(MatchRecord, LabelSet)>> {
    let mut out = Vec::new();
    for path in match_files(root)? {
        let m = read_match(&path)?;
        let lp = labels_path(root, &m.match_id);
        let l = read_labels(&lp)?;
        if l.match_id != m.match_id {
            return Err(ReplayError::consistency(
                lp.display().to_string(),
                format!("labels for `{}` stored under `{}`", l.match_id, m.match_id),
            ));
        }
        out.push((m, l));
    }
    Ok(out)
}

pub fn write_dataset(root: &Path, data: &[(MatchRecord, LabelSet)]) -> Result<()> {
    for (m, l) in data {
        write_match(root, m)?;
        write_labels(root, l)?;
    }
    Ok(())
}
