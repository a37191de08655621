//! Flat-file artifacts: CSV tables, JSON objects and the run manifest.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ddwave::ModelParams;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliResult;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Collects output files under one directory and writes `manifest.json` last.
pub struct RunManifest {
    dir: PathBuf,
    command: String,
    params: Option<ModelParams>,
    extras: BTreeMap<String, Value>,
    outputs: Vec<String>,
    seed: Option<u64>,
    started: Instant,
}

impl RunManifest {
    /// `started` is when the command began, for the wall-time field.
    pub fn new(dir: &Path, command: &str, started: Instant) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            params: None,
            extras: BTreeMap::new(),
            outputs: vec![],
            seed: None,
            started,
        })
    }

    pub fn params(&mut self, params: ModelParams) {
        self.params = Some(params);
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn extra(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.extras.insert(key.to_string(), v);
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn register(&mut self, name: &str) -> CliResult<PathBuf> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        Ok(path)
    }

    /// Writes a CSV table with the given header.
    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.register(name)?;
        write_csv(&path, header, rows)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let path = self.register(name)?;
        write_json(&path, value)
    }

    /// Records a file written by someone else (e.g. a worker thread).
    pub fn adopt(&mut self, name: &str) -> CliResult<()> {
        self.register(name).map(|_| ())
    }

    pub fn finish(mut self) -> CliResult<()> {
        let mut obj = Map::new();
        obj.insert("command".into(), Value::String(self.command.clone()));
        if let Some(p) = &self.params {
            if let Value::Object(m) = serde_json::to_value(p)? {
                obj.extend(m);
            }
        }
        for (k, v) in std::mem::take(&mut self.extras) {
            obj.insert(k, v);
        }
        obj.insert("seed".into(), serde_json::to_value(self.seed)?);
        self.outputs.push("manifest.json".into());
        obj.insert("outputs".into(), serde_json::to_value(&self.outputs)?);
        obj.insert(
            "wall_time_s".into(),
            serde_json::to_value(self.started.elapsed().as_secs_f64())?,
        );
        write_json(&self.path("manifest.json"), &Value::Object(obj))
    }
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

/// Serializes `value` and merges its fields into `into`.
pub fn merge_flat(into: &mut Map<String, Value>, value: &impl Serialize) -> CliResult<()> {
    if let Value::Object(m) = serde_json::to_value(value)? {
        into.extend(m);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn manifest_lists_outputs_once() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new(dir.path(), "test", Instant::now()).unwrap();
        m.seed(3);
        m.extra("k", 1.5);
        m.csv("a.csv", &["x"], vec![vec!["1".to_string()]]).unwrap();
        m.json("b.json", &serde_json::json!({"y": 2})).unwrap();
        m.adopt("a.csv").unwrap();
        m.finish().unwrap();
        let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["outputs"], serde_json::json!(["a.csv", "b.json", "manifest.json"]));
        assert_eq!(v["seed"], 3);
        assert_eq!(v["k"], 1.5);
        assert_eq!(v["command"], "test");
    }
}
