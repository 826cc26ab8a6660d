//! JSON report written next to every output: parameters, timings, counters
//! and, for 8-bit or 16-bit images, the min-max mapping.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::error::{io_err, CliResult};
use crate::io::pgm::Mapping;

#[derive(Serialize)]
pub struct Sidecar {
    command: &'static str,
    version: &'static str,
    params: Value,
    outputs: Vec<PathBuf>,
    timings_ms: BTreeMap<&'static str, f64>,
    counts: BTreeMap<&'static str, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mapping: Option<Mapping>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    results: BTreeMap<&'static str, Value>,
}

impl Sidecar {
    pub fn new(command: &'static str, params: &impl Serialize) -> Self {
        Sidecar {
            command,
            version: env!("CARGO_PKG_VERSION"),
            params: serde_json::to_value(params).expect("params serialize"),
            outputs: Vec::new(),
            timings_ms: BTreeMap::new(),
            counts: BTreeMap::new(),
            mapping: None,
            results: BTreeMap::new(),
        }
    }

    pub fn output(&mut self, p: &Path) -> &mut Self {
        self.outputs.push(p.to_path_buf());
        self
    }

    pub fn timing(&mut self, name: &'static str, d: Duration) -> &mut Self {
        *self.timings_ms.entry(name).or_default() += d.as_secs_f64() * 1e3;
        self
    }

    pub fn count(&mut self, name: &'static str, n: usize) -> &mut Self {
        self.counts.insert(name, n);
        self
    }

    pub fn mapping(&mut self, m: Option<Mapping>) -> &mut Self {
        if m.is_some() {
            self.mapping = m;
        }
        self
    }

    pub fn result(&mut self, name: &'static str, v: impl Serialize) -> &mut Self {
        self.results
            .insert(name, serde_json::to_value(v).expect("result serializes"));
        self
    }

    /// Writes to `<primary output>.json`.
    pub fn write_for(&self, primary: &Path) -> CliResult<PathBuf> {
        let mut name = primary.as_os_str().to_owned();
        name.push(".json");
        let path = PathBuf::from(name);
        let text = serde_json::to_string_pretty(self).expect("sidecar serializes");
        std::fs::write(&path, text + "\n").map_err(io_err(&path))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_sits_beside_the_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.pgm");
        let mut s = Sidecar::new("xconv", &serde_json::json!({ "k": 4 }));
        s.output(&out)
            .count("convolutions", 5)
            .timing("total", Duration::from_millis(3));
        let p = s.write_for(&out).unwrap();
        assert_eq!(p, dir.path().join("r.pgm.json"));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(v["counts"]["convolutions"], 5);
        assert_eq!(v["params"]["k"], 4);
        assert!(v.get("mapping").is_none());
    }
}
