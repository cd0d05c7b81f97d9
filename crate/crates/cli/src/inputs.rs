//! Input expansion and basename pairing.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

fn is_glob(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

fn is_wav(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

/// `.wav` files directly inside `dir`, sorted.
pub fn wav_files_in(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::NoInputs(format!("cannot read directory {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_wav(p))
        .collect();
    files.sort();
    Ok(files)
}

/// Expands paths, directories (their `.wav` files) and glob patterns into a
/// sorted, de-duplicated file list. Plain paths are kept even if missing so
/// that the per-file error names them.
pub fn expand_inputs(patterns: &[String]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = BTreeSet::new();
    for pattern in patterns {
        let path = Path::new(pattern);
        if is_glob(pattern) {
            let entries = glob::glob(pattern).map_err(|e| CliError::Config(format!("bad glob '{pattern}': {e}")))?;
            out.extend(entries.filter_map(Result::ok).filter(|p| p.is_file()));
        } else if path.is_dir() {
            out.extend(wav_files_in(path)?);
        } else {
            out.insert(path.to_path_buf());
        }
    }
    if out.is_empty() {
        return Err(CliError::NoInputs(format!("nothing matched {}", patterns.join(" "))));
    }
    Ok(out.into_iter().collect())
}

/// File id used in tables and output names: the basename without `.wav`.
pub fn file_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
