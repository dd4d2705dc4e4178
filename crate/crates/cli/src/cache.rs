//! Append-only cache of computed base sizes, one `n,k,b` record per line.
//! `k` is stored folded onto `min(k, n - k)`.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub const ENV_VAR: &str = "BSIZE_CACHE";

/// `$BSIZE_CACHE`, else `$HOME/.cache/bsize/results.txt`, else
/// `bsize-results.txt` in the working directory.
pub fn default_path() -> PathBuf {
    if let Some(p) = std::env::var_os(ENV_VAR).filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    match std::env::var_os("HOME").filter(|h| !h.is_empty()) {
        Some(home) => Path::new(&home).join(".cache/bsize/results.txt"),
        None => PathBuf::from("bsize-results.txt"),
    }
}

#[derive(Debug)]
pub struct ResultCache {
    path: PathBuf,
    known: HashMap<(u32, u32), u32>,
}

fn fold(n: u32, k: u32) -> (u32, u32) {
    (n, k.min(n.saturating_sub(k)))
}

impl ResultCache {
    /// Reads the cache; a missing file is an empty cache and unparsable
    /// lines are ignored.
    pub fn open(path: impl Into<PathBuf>) -> io::Result<Self> {
        let path = path.into();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e),
        };
        let mut known = HashMap::new();
        for line in text.lines() {
            let fields: Vec<u32> = line
                .split(',')
                .filter_map(|f| f.trim().parse().ok())
                .collect();
            if let [n, k, b] = fields[..] {
                known.insert(fold(n, k), b);
            }
        }
        Ok(ResultCache { path, known })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, n: u32, k: u32) -> Option<u32> {
        self.known.get(&fold(n, k)).copied()
    }

    pub fn insert(&mut self, n: u32, k: u32, b: u32) -> io::Result<()> {
        let key = fold(n, k);
        if self.known.get(&key) == Some(&b) {
            return Ok(());
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        writeln!(f, "{},{},{}", key.0, key.1, b)?;
        self.known.insert(key, b);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/cache.txt");
        let mut c = ResultCache::open(&path).unwrap();
        assert_eq!(c.get(6, 3), None);
        c.insert(6, 3, 3).unwrap();
        c.insert(10, 7, 4).unwrap();
        c.insert(10, 3, 4).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "6,3,3\n10,3,4\n");
        let c = ResultCache::open(&path).unwrap();
        assert_eq!(c.get(10, 7), Some(4));
        assert_eq!(c.get(6, 3), Some(3));
    }

    #[test]
    fn junk_lines_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.txt");
        fs::write(&path, "garbage\n8,4,3\n1,2\n").unwrap();
        let c = ResultCache::open(&path).unwrap();
        assert_eq!(c.get(8, 4), Some(3));
        assert_eq!(c.known.len(), 1);
    }
}
