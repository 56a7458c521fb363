//! On-disk table cache keyed by `(m, B, coeffs)`.
//!
//! Entries use the binary layout from [`crate::table`]. Corrupt entries are
//! recomputed and overwritten; entries from another format version are
//! ignored with a warning and left alone.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::warn;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::form::MGonalForm;
use crate::table::{build_table, RepTable};

pub const CACHE_ENV: &str = "POLYFORM_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheEvent {
    Hit,
    Miss,
    /// Checksum or layout failure; recomputed and overwritten.
    Corrupt,
    /// Written by another format version; recomputed, file untouched.
    VersionMismatch,
}

#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(TableCache { dir })
    }

    /// The directory named by `POLYFORM_CACHE`, if set and non-empty.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Self::open(PathBuf::from(d)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(form: &MGonalForm, bound: u64) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}|{}|{}", form.m(), bound, form.coeffs_string()));
        let digest = hex::encode(h.finalize());
        format!("m{}-b{}-{}.pfrt", form.m(), bound, &digest[..16])
    }

    pub fn path_for(&self, form: &MGonalForm, bound: u64) -> PathBuf {
        self.dir.join(Self::key(form, bound))
    }

    pub fn store(&self, table: &RepTable) -> Result<()> {
        let path = self.path_for(table.form(), table.bound());
        let tmp = path.with_extension("tmp");
        table.write_to(BufWriter::new(fs::File::create(&tmp)?))?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Cached table, or `None` on a miss or an unusable entry.
    pub fn load(&self, form: &MGonalForm, bound: u64) -> Result<(Option<RepTable>, CacheEvent)> {
        let path = self.path_for(form, bound);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((None, CacheEvent::Miss)),
            Err(e) => return Err(e.into()),
        };
        match RepTable::read_from(&bytes[..]) {
            Ok(t) if t.form() == form && t.bound() == bound => Ok((Some(t), CacheEvent::Hit)),
            Ok(_) => Ok((None, CacheEvent::Corrupt)),
            Err(Error::CacheVersion { found, expected }) => {
                warn!(
                    "ignoring cache entry {} with version {found} (expected {expected})",
                    path.display()
                );
                Ok((None, CacheEvent::VersionMismatch))
            }
            Err(Error::CacheFormat(msg)) => {
                warn!("cache entry {} is corrupt ({msg}); recomputing", path.display());
                Ok((None, CacheEvent::Corrupt))
            }
            Err(e) => Err(e),
        }
    }

    /// Cached table or a fresh build; misses and corrupt entries are written back.
    pub fn get_or_build(&self, form: &MGonalForm, bound: u64) -> Result<(RepTable, CacheEvent)> {
        let (hit, event) = self.load(form, bound)?;
        if let Some(t) = hit {
            return Ok((t, event));
        }
        let t = build_table(form, bound)?;
        if event != CacheEvent::VersionMismatch {
            self.store(&t)?;
        }
        Ok((t, event))
    }
}

/// Builds through the cache when one is given.
pub fn table_via(cache: Option<&TableCache>, form: &MGonalForm, bound: u64) -> Result<RepTable> {
    match cache {
        Some(c) => c.get_or_build(form, bound).map(|(t, _)| t),
        None => build_table(form, bound),
    }
}
