//! Memo persistence under `QPAR_CACHE_DIR`. Entries are JSON files named by
//! a hash of the full request, so a hit is only ever served for an identical
//! invocation of the same build.

use serde::de::DeserializeOwned;
use serde::Serialize;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;

pub const ENV: &str = "QPAR_CACHE_DIR";

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn from_env() -> Self {
        Cache { dir: std::env::var_os(ENV).filter(|d| !d.is_empty()).map(PathBuf::from) }
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        let mut h = DefaultHasher::new();
        (env!("CARGO_PKG_VERSION"), kind, key).hash(&mut h);
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{:016x}.json", h.finish())))
    }

    pub fn get<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let text = std::fs::read_to_string(self.path(kind, key)?).ok()?;
        // A corrupt entry is a miss; it is overwritten on the next put.
        serde_json::from_str(&text).ok()
    }

    /// Best effort: an unwritable cache directory never fails a command.
    pub fn put<T: Serialize>(&self, kind: &str, key: &str, value: &T) {
        let Some(path) = self.path(kind, key) else { return };
        let Ok(text) = serde_json::to_string(value) else { return };
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        let tmp = path.with_extension("tmp");
        if std::fs::write(&tmp, text).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
}
