//! Run configuration: a TOML file flattened to dotted keys, with `--set`
//! overrides applied in order (last wins).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use mhdrelax::experiments::ExperimentConfig;
use mhdrelax::fields::InitKind;

/// Keys in validation order; `experiment.params.*` is free-form.
pub const KEYS: [&str; 14] = [
    "grid.n",
    "params.nu",
    "params.eta",
    "time.dt",
    "time.t_end",
    "time.cfl_safety",
    "init.kind",
    "init.seed",
    "init.spectrum_exponent",
    "init.path",
    "output.dir",
    "output.cadence",
    "experiment.name",
    "experiment.params",
];

const PARAMS_PREFIX: &str = "experiment.params.";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                Self::parse(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Self::default(),
        };
        for s in sets {
            cfg.apply_set(s)?;
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let mut cfg = Self::default();
        flatten("", &toml::Value::Table(table), &mut cfg.values);
        for key in cfg.values.keys() {
            check_key(key)?;
        }
        Ok(cfg)
    }

    /// `key=value`.
    pub fn apply_set(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got `{kv}`"))?;
        let k = k.trim();
        check_key(k)?;
        self.values.insert(k.to_string(), v.trim().trim_matches('"').to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| anyhow!("invalid config: `{key}` has unparsable value `{v}`")),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parsed(key)?.ok_or_else(|| anyhow!("invalid config: `{key}` is missing"))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn experiment_name(&self) -> &str {
        self.get("experiment.name").unwrap_or("ledger")
    }

    pub fn output_dir(&self, cli: Option<&Path>) -> PathBuf {
        cli.map(Path::to_path_buf)
            .or_else(|| self.get("output.dir").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("mhdrelax-out"))
    }

    /// Full validation for `run`: every key parses and satisfies its
    /// precondition, checked in [`KEYS`] order.
    pub fn experiment_config(&self, output_dir: PathBuf) -> Result<ExperimentConfig> {
        let n: usize = self.required("grid.n")?;
        let nu: f64 = self.required("params.nu")?;
        let eta: f64 = self.required("params.eta")?;
        let dt: f64 = self.required("time.dt")?;
        let t_end: f64 = self.required("time.t_end")?;
        let cfl_safety: f64 = self.or("time.cfl_safety", 0.5)?;
        let kind = self.get("init.kind").unwrap_or("taylor_green");
        let seed: u64 = self.or("init.seed", 0)?;
        let exponent: f64 = self.or("init.spectrum_exponent", 2.0)?;
        let path = self.get("init.path").map(PathBuf::from);
        let init = InitKind::parse(kind, seed, exponent, path).map_err(|e| anyhow!("invalid config: `init.kind`: {e}"))?;
        let cadence: f64 = self.or("output.cadence", 0.0)?;
        let params = self
            .values
            .iter()
            .filter_map(|(k, v)| k.strip_prefix(PARAMS_PREFIX).map(|p| (p.to_string(), v.clone())))
            .collect();
        let cfg = ExperimentConfig {
            n,
            nu,
            eta,
            dt,
            t_end,
            cfl_safety,
            init,
            cadence,
            output_dir: Some(output_dir),
            params,
        };
        cfg.validate().map_err(|e| anyhow!("invalid config: {e}"))?;
        let name = self.experiment_name();
        if !mhdrelax::experiments::EXPERIMENTS.contains(&name) {
            bail!("invalid config: `experiment.name` is `{name}`, expected one of {:?}", mhdrelax::experiments::EXPERIMENTS);
        }
        Ok(cfg)
    }

    pub fn grid_n_or(&self, default: usize) -> Result<usize> {
        self.or("grid.n", default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.or(key, default)
    }
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) || key.strip_prefix(PARAMS_PREFIX).is_some_and(|p| !p.is_empty()) {
        Ok(())
    } else {
        bail!("invalid config: unknown key `{key}`")
    }
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut BTreeMap<String, String>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                flatten(&join(k), v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), scalar_text(other));
        }
    }
}

fn scalar_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Array(a) => a.iter().map(scalar_text).collect::<Vec<_>>().join(","),
        toml::Value::Float(f) => f.to_string(),
        other => other.to_string(),
    }
}
