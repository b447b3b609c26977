//! Run directories, manifests and per-cell checkpoints.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use lmg_otoc::analysis::{CellKey, CellStore};
use lmg_otoc::otoc::LongTimeAverage;
use serde::{Deserialize, Serialize};

use crate::config::Resolved;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const CHECKPOINT: &str = "checkpoint.jsonl";
pub const ENV_RUN_ROOT: &str = "LMG_OTOC_RUN_ROOT";
pub const ENV_THREADS: &str = "LMG_OTOC_THREADS";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_max: f64,
    pub dt: f64,
    pub samples: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub parameters: &'a BTreeMap<String, Resolved>,
    pub engine_version: &'a str,
    pub time_grid: Option<GridSpec>,
    pub diagnostics: serde_json::Value,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

/// Owns every write into one run directory.
pub struct RunDir {
    path: PathBuf,
    outputs: Vec<String>,
    started: Instant,
    started_unix: u64,
}

/// Deterministic directory name from the command and its resolved parameters.
pub fn default_dir(command: &str, params: &BTreeMap<String, Resolved>) -> PathBuf {
    let root = std::env::var_os(ENV_RUN_ROOT).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (k, v) in params {
        for b in k.bytes().chain([b'=']).chain(v.value.bytes()).chain([b';']) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    root.join(format!("{command}-{h:016x}"))
}

impl RunDir {
    pub fn create(path: PathBuf) -> Result<Self> {
        fs::create_dir_all(&path).with_context(|| format!("creating run directory {}", path.display()))?;
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Ok(Self {
            path,
            outputs: Vec::new(),
            started: Instant::now(),
            started_unix,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.path.join(name);
        fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        self.note(name);
        Ok(())
    }

    /// Records a file that was written by someone else (the checkpoint).
    pub fn note(&mut self, name: &str) {
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
    }

    pub fn finish(
        mut self,
        command: &str,
        parameters: &BTreeMap<String, Resolved>,
        time_grid: Option<GridSpec>,
        diagnostics: serde_json::Value,
    ) -> Result<PathBuf> {
        self.outputs.retain(|o| self.path.join(o).exists());
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            command,
            parameters,
            engine_version: lmg_otoc::ENGINE_VERSION,
            time_grid,
            diagnostics,
            started_unix: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        let p = self.path.join(MANIFEST);
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        Ok(self.path)
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointLine {
    key: CellKey,
    value: LongTimeAverage,
}

/// Append-only JSON-lines cache of finished cells. Interrupted runs pick up
/// every line that was completely written.
pub struct Checkpoint {
    done: Vec<(CellKey, LongTimeAverage)>,
    file: Mutex<File>,
    pub resumed: usize,
}

fn same_key(a: &CellKey, b: &CellKey) -> bool {
    a.alpha.to_bits() == b.alpha.to_bits()
        && a.lambda.to_bits() == b.lambda.to_bits()
        && a.n_spins == b.n_spins
        && a.total_time.to_bits() == b.total_time.to_bits()
        && a.dt.to_bits() == b.dt.to_bits()
}

impl Checkpoint {
    pub fn open(path: &Path) -> Result<Self> {
        let mut done = Vec::new();
        if path.exists() {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            for line in BufReader::new(f).lines() {
                let line = line?;
                match serde_json::from_str::<CheckpointLine>(&line) {
                    Ok(c) => done.push((c.key, c.value)),
                    Err(e) => log::warn!("skipping unreadable checkpoint line: {e}"),
                }
            }
        }
        let torn = fs::read(path).map(|b| b.last().is_some_and(|&c| c != b'\n')).unwrap_or(false);
        let resumed = done.len();
        if resumed > 0 {
            log::info!("resuming with {resumed} checkpointed cells from {}", path.display());
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        if torn {
            writeln!(file)?;
        }
        Ok(Self {
            done,
            file: Mutex::new(file),
            resumed,
        })
    }
}

impl CellStore for Checkpoint {
    fn load(&self, key: &CellKey) -> Option<LongTimeAverage> {
        self.done.iter().find(|(k, _)| same_key(k, key)).map(|(_, v)| *v)
    }

    fn store(&self, key: &CellKey, value: &LongTimeAverage) {
        let line = serde_json::to_string(&CheckpointLine { key: *key, value: *value }).expect("plain data serializes");
        let mut f = self.file.lock().expect("checkpoint writer");
        if let Err(e) = writeln!(f, "{line}").and_then(|_| f.flush()) {
            log::warn!("checkpoint write failed: {e}");
        }
    }
}
