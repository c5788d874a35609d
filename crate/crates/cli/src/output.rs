//! Provenance-stamped, atomically written outputs.

use std::io::Write;
use std::path::{Path, PathBuf};

use movbound::solver::GridSpec;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::config::RunConfig;
use crate::error::CliError;

/// Identical for reruns with equal (config, seed, grid, version).
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub samples: usize,
    pub grid: GridSpec,
}

impl Provenance {
    pub fn new(subcommand: &str, cfg: &RunConfig) -> Self {
        Provenance {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.into(),
            config_hash: cfg.hash(),
            seed: cfg.ensemble.seed,
            samples: cfg.ensemble.samples,
            grid: cfg.grid,
        }
    }

    fn csv_comment(&self) -> String {
        let g = &self.grid;
        format!(
            "# {} {} {} config={} seed={} samples={} grid=cells:{},steps:{},theta:{},stride:{}\n",
            self.tool, self.version, self.subcommand, self.config_hash, self.seed, self.samples, g.cells, g.steps, g.theta, g.stride
        )
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

pub struct Writer {
    pub dir: PathBuf,
    pub provenance: Provenance,
    written: Vec<PathBuf>,
}

pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let unwritable = |e: std::io::Error| CliError::Config(format!("output directory {} not writable: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(unwritable)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(unwritable)?;
    tmp.write_all(bytes).map_err(unwritable)?;
    tmp.as_file().sync_all().map_err(unwritable)?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| unwritable(e.error))?;
    Ok(target)
}

impl Writer {
    pub fn new(dir: &Path, provenance: Provenance) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("output directory {} not writable: {e}", dir.display())))?;
        let stale = dir.join("error.json");
        if stale.exists() {
            std::fs::remove_file(&stale).map_err(|e| CliError::Config(format!("cannot clear {}: {e}", stale.display())))?;
        }
        Ok(Writer { dir: dir.to_path_buf(), provenance, written: Vec::new() })
    }

    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&Stamped { provenance: &self.provenance, body })
            .map_err(|e| CliError::Numerical(format!("{name}: {e}")))?;
        text.push('\n');
        let p = write_atomic(&self.dir, name, text.as_bytes())?;
        self.written.push(p);
        Ok(())
    }

    /// `body` is a headed CSV; a provenance comment line goes first.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let text = self.provenance.csv_comment() + body;
        let p = write_atomic(&self.dir, name, text.as_bytes())?;
        self.written.push(p);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
