use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{MmfError, Result};

/// One benchmark matrix: a collection `group/name`, optionally backed by a local file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub group: String,
    pub name: String,
    pub path: Option<PathBuf>,
}

impl ManifestEntry {
    pub fn id(&self) -> String {
        format!("{}/{}", self.group, self.name)
    }
}

/// Parses a line-oriented manifest.
///
/// Each non-blank line is `group/name`, optionally followed by a path to a
/// local `.mtx` file. `#` starts a comment.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let id = fields.next().unwrap_or_default();
        let path = fields.next().map(PathBuf::from);
        if fields.next().is_some() {
            return Err(MmfError::Parse {
                line: k + 1,
                msg: "expected 'group/name [path]'".into(),
            });
        }
        let (group, name) = id
            .split_once('/')
            .filter(|(g, n)| !g.is_empty() && !n.is_empty() && !n.contains('/'))
            .ok_or_else(|| MmfError::Parse {
                line: k + 1,
                msg: format!("'{id}' is not 'group/name'"),
            })?;
        out.push(ManifestEntry {
            group: group.into(),
            name: name.into(),
            path,
        });
    }
    Ok(out)
}
