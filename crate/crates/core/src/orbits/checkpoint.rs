//! Census checkpoint files and their lock files.
//!
//! Layout (little endian): magic `BBCK`, format version `u32`, header length
//! `u32`, JSON header, then the frontier of the running orbit (`u64` keys) and
//! the visited bitmap (`u64` words). The header records the bitmap popcount;
//! a mismatch on load is reported as corruption.

use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::bfs::BfsState;
use super::classify::Layer;
use super::group::GeneratorSet;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"BBCK";
pub const FORMAT_VERSION: u32 = 1;

/// Census state as stored on disk.
#[derive(Debug, Clone)]
pub(crate) struct Snapshot {
    pub m: u8,
    pub k: u8,
    pub layer: Layer,
    pub generators: GeneratorSet,
    pub cursor: u32,
    pub expansions: u64,
    /// `(representative key, cardinality)` of finished classes.
    pub classes: Vec<(u64, u64)>,
    pub current: Option<BfsState>,
    pub bitmap: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    m: u8,
    k: u8,
    layer: Layer,
    generators: GeneratorSet,
    cursor: u32,
    expansions: u64,
    classes: Vec<(u64, u64)>,
    current: Option<PartialOrbit>,
    frontier_len: u64,
    bitmap_words: u64,
    bitmap_popcount: u64,
}

#[derive(Serialize, Deserialize)]
struct PartialOrbit {
    seed: u64,
    count: u64,
    min_key: u64,
    expansions: u64,
}

/// Writes atomically: a temporary sibling file is renamed over `path`.
pub(crate) fn write(path: &Path, snap: &Snapshot, bitmap: &[AtomicU64]) -> Result<()> {
    let words: Vec<u64> = bitmap.iter().map(|w| w.load(Ordering::Relaxed)).collect();
    let frontier: &[u64] = snap.current.as_ref().map_or(&[], |s| &s.frontier);
    let header = Header {
        m: snap.m,
        k: snap.k,
        layer: snap.layer,
        generators: snap.generators,
        cursor: snap.cursor,
        expansions: snap.expansions,
        classes: snap.classes.clone(),
        current: snap.current.as_ref().map(|s| PartialOrbit {
            seed: s.seed,
            count: s.count,
            min_key: s.min_key,
            expansions: s.expansions,
        }),
        frontier_len: frontier.len() as u64,
        bitmap_words: words.len() as u64,
        bitmap_popcount: words.iter().map(|w| w.count_ones() as u64).sum(),
    };
    let json = serde_json::to_vec(&header)?;
    let tmp = sibling(path, "tmp");
    {
        let mut out = BufWriter::new(File::create(&tmp)?);
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(json.len() as u32).to_le_bytes())?;
        out.write_all(&json)?;
        for &x in frontier.iter().chain(&words) {
            out.write_all(&x.to_le_bytes())?;
        }
        out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub(crate) fn read(path: &Path) -> Result<Snapshot> {
    let mut input = BufReader::new(File::open(path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?);
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!("{} is not a census checkpoint", path.display())));
    }
    let version = read_u32(&mut input)?;
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "checkpoint format version {version} is not supported (expected {FORMAT_VERSION})"
        )));
    }
    let len = read_u32(&mut input)? as usize;
    let mut json = vec![0u8; len];
    input.read_exact(&mut json).map_err(truncated)?;
    let header: Header =
        serde_json::from_slice(&json).map_err(|e| Error::Checkpoint(format!("bad checkpoint header: {e}")))?;
    let frontier = read_words(&mut input, header.frontier_len)?;
    let bitmap = read_words(&mut input, header.bitmap_words)?;
    if input.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Checkpoint("trailing bytes after bitmap".into()));
    }
    let popcount: u64 = bitmap.iter().map(|w| w.count_ones() as u64).sum();
    if popcount != header.bitmap_popcount {
        return Err(Error::Checkpoint(format!(
            "bitmap digest mismatch: {popcount} bits set, header says {}",
            header.bitmap_popcount
        )));
    }
    Ok(Snapshot {
        m: header.m,
        k: header.k,
        layer: header.layer,
        generators: header.generators,
        cursor: header.cursor,
        expansions: header.expansions,
        classes: header.classes,
        current: header.current.map(|p| BfsState {
            seed: p.seed,
            frontier,
            count: p.count,
            min_key: p.min_key,
            expansions: p.expansions,
        }),
        bitmap,
    })
}

fn truncated(e: std::io::Error) -> Error {
    Error::Checkpoint(format!("truncated checkpoint: {e}"))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn read_words(r: &mut impl Read, n: u64) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(n as usize);
    let mut b = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut b).map_err(truncated)?;
        out.push(u64::from_le_bytes(b));
    }
    Ok(out)
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(ext);
    path.with_file_name(name)
}

/// Exclusive claim on a checkpoint path, held as `<path>.lock`.
#[derive(Debug)]
pub struct CheckpointLock {
    path: PathBuf,
}

impl CheckpointLock {
    pub fn acquire(checkpoint: &Path) -> Result<Self> {
        let path = sibling(checkpoint, "lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(CheckpointLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Checkpoint(format!(
                "{} exists: another census is using this checkpoint (remove the lock if that run is dead)",
                path.display()
            ))),
            Err(e) => Err(e.into()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Drop for CheckpointLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
