//! Output files are assembled in memory and written only once a command has
//! finished, so a failing run leaves no partial output behind.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct Artifacts {
    files: BTreeMap<PathBuf, Vec<u8>>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) {
        self.files.insert(name.into(), bytes.into());
    }

    /// Render with a writer-based serializer and add the result.
    pub fn add_with<F>(&mut self, name: impl Into<PathBuf>, render: F) -> CliResult<()>
    where
        F: FnOnce(&mut Vec<u8>) -> poqg_core::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf).map_err(|e| CliError::internal(e.to_string()))?;
        self.add(name, buf);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &Path> {
        self.files.keys().map(PathBuf::as_path)
    }

    pub fn get(&self, name: impl AsRef<Path>) -> Option<&[u8]> {
        self.files.get(name.as_ref()).map(Vec::as_slice)
    }

    pub fn write_to(&self, dir: &Path) -> CliResult<()> {
        let io = |e: std::io::Error, p: &Path| CliError::internal(format!("writing {}: {e}", p.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| io(e, parent))?;
            }
            std::fs::write(&path, bytes).map_err(|e| io(e, &path))?;
        }
        Ok(())
    }
}
