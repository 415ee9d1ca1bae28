//! Optional flat `key = value` config files; command-line flags override
//! file entries, which override built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::errors::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Usage(format!(
                        "config {} line {}: expected 'key = value'",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Settings { values })
    }

    /// Flag value if given, else the config entry, else `default`.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> CliResult<T> {
        self.resolve_opt(flag, key)
            .map(|v| v.unwrap_or(default))
    }

    /// Flag value if given, else the config entry, else `None`.
    pub fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if let Some(v) = flag {
            return Ok(Some(v));
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key '{key}': bad value '{raw}'"))),
        }
    }

    /// Flag value, config entry, or a usage error naming the flag.
    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.resolve_opt(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required value '--{key}'")))
    }
}

/// A grid of real values: either a comma-separated list (`0.1,0.5,1`) or
/// `start:stop:count` for `count` evenly spaced points including both ends.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |msg: &str| CliError::Usage(format!("grid '{spec}': {msg}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad("bad stop"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("bad count"))?;
        if count == 0 {
            return Err(bad("count must be at least 1"));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    let values: Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let values = values.map_err(|_| bad("bad value"))?;
    if values.is_empty() {
        return Err(bad("empty"));
    }
    Ok(values)
}

/// A list of measurement counts, `10,20,30` or `start:stop:count`.
pub fn parse_m_list(spec: &str) -> CliResult<Vec<usize>> {
    let grid = parse_grid(spec)?;
    let mut out = Vec::with_capacity(grid.len());
    for v in grid {
        if v < 1.0 || v.fract() != 0.0 {
            return Err(CliError::Usage(format!(
                "measurement list '{spec}': entries must be positive integers"
            )));
        }
        out.push(v as usize);
    }
    Ok(out)
}
