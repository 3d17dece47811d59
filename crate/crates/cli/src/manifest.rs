use std::path::{Path, PathBuf};

use imfclass_core::Label;

use crate::CliError;

/// One labeled recording listed in a manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path as written in the manifest; used as the row's `source_id`.
    pub source_id: String,
    /// `source_id` resolved against the manifest's directory.
    pub path: PathBuf,
    pub label: Label,
}

/// Reads a `path,label` CSV. Relative paths resolve against the manifest's
/// own directory; rows keep file order.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::csv(path, e))?
        .clone();
    if headers.len() != 2 || &headers[0] != "path" || &headers[1] != "label" {
        return Err(CliError::BadHeader {
            path: path.to_path_buf(),
            expected: "path,label".into(),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let base = path.parent().unwrap_or_else(|| Path::new(""));

    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let source_id = record[0].to_string();
        if source_id.is_empty() {
            return Err(CliError::BadRecord {
                path: path.to_path_buf(),
                line,
                message: "empty path".into(),
            });
        }
        let label = match &record[1] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(CliError::BadLabel {
                    path: path.to_path_buf(),
                    line,
                    value: other.to_string(),
                })
            }
        };
        entries.push(ManifestEntry {
            path: base.join(&source_id),
            source_id,
            label,
        });
    }
    if entries.is_empty() {
        return Err(CliError::EmptyManifest(path.to_path_buf()));
    }
    Ok(entries)
}
