//! TOML code manifest: a name, the declared [[n,k,d]] parameters, and
//! relative paths to the two alist files.
//!
//! ```toml
//! name = "b1"
//! n = 882
//! k = 24
//! d = 18          # optional, metadata only
//! path_g2 = "b1_g2.alist"
//! path_h1 = "b1_h1.alist"
//! ```
//!
//! Paths are resolved relative to the manifest file's directory. Declared
//! `n` and `k` are cross-checked against the loaded matrices; `d` is not.

use super::{alist, make_css, CodeError, CssCode};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeManifest {
    pub name: String,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub path_g2: String,
    pub path_h1: String,
}

pub fn load_manifest(path: &Path) -> Result<CssCode, CodeError> {
    let text = fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let manifest: CodeManifest = toml::from_str(&text).map_err(|e| CodeError::Manifest {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let g2 = alist::load_alist(&dir.join(&manifest.path_g2))?;
    let h1 = alist::load_alist(&dir.join(&manifest.path_h1))?;
    let code = make_css(g2, h1, manifest.name.clone())?;
    if code.n() != manifest.n {
        return Err(CodeError::ManifestMismatch {
            path: path.display().to_string(),
            field: "n",
            declared: manifest.n,
            actual: code.n(),
        });
    }
    if code.k() != manifest.k {
        return Err(CodeError::ManifestMismatch {
            path: path.display().to_string(),
            field: "k",
            declared: manifest.k,
            actual: code.k(),
        });
    }
    Ok(code.with_claimed_distance(manifest.d))
}
