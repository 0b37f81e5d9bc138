use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::Failure;

/// Record of one run. Written last; lists every output including itself.
/// The duration is the only field that differs between identical reruns.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
}

/// Collects output files for an optional output directory.
pub struct Outputs {
    dir: Option<PathBuf>,
    written: Vec<PathBuf>,
    started: Instant,
}

impl Outputs {
    pub fn new(dir: Option<&Path>) -> Result<Self, Failure> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Outputs {
            dir: dir.map(Path::to_path_buf),
            written: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Writes `name` under the output directory; a no-op without one.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::write(&path, contents)?;
            self.written.push(path);
        }
        Ok(())
    }

    pub fn finish(
        mut self,
        config: serde_json::Value,
        seed: Option<u64>,
        inputs: Vec<PathBuf>,
    ) -> Result<(), Failure> {
        let Some(d) = self.dir.clone() else {
            return Ok(());
        };
        self.written.push(d.join("manifest.json"));
        let manifest = RunManifest {
            command: std::env::args().collect(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            inputs,
            outputs: std::mem::take(&mut self.written),
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(d.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}
