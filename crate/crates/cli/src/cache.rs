//! On-disk copy of the enumerated avoider lists. Entries are validated on
//! load and any failure falls back to enumeration, so removing the directory
//! only costs time.

use std::path::{Path, PathBuf};

use blockers_core::perm_core::{avoiders, install_avoiders};
use blockers_core::Permutation;

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os("BLOCKER_CACHE_DIR") {
        return Some(PathBuf::from(dir));
    }
    std::env::var_os("HOME").map(|home| PathBuf::from(home).join(".cache").join("blockers"))
}

fn entry_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("avoiders-{VERSION}-n{n}.json"))
}

/// Makes the avoider list for `n` available in memory, reading or filling
/// the disk cache on the way.
pub fn warm(n: usize, limit: usize) {
    let Some(dir) = cache_dir() else { return };
    let path = entry_path(&dir, n);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(perms) = serde_json::from_str::<Vec<Permutation>>(&text) {
            if install_avoiders(n, perms).is_ok() {
                return;
            }
        }
    }
    let Ok(list) = avoiders(n, limit) else { return };
    let _ = store(&dir, &path, &list);
}

fn store(dir: &Path, path: &Path, list: &[Permutation]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, serde_json::to_vec(list)?)?;
    std::fs::rename(&tmp, path)
}
