//! Reproducible experiment drivers and verification sweeps. Each
//! experiment produces named metric series and a verdict that is a pure
//! function of those metrics, so `report.csv` alone is enough to re-audit a
//! run.

mod diagnostics;
mod relaxation;
mod smoothing;
mod uniqueness;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub use diagnostics::{
    check_higher_order_ledger, check_hs_product_inequality, flux_function_diagnostics, run_higher_order, run_ledger,
    FluxDiagnostics, TrajectorySample,
};
pub use relaxation::run_relaxation;
pub use smoothing::run_smoothing;
pub use uniqueness::{run_uniqueness, uniqueness_pair, PairOutcome};

use crate::dynamics::GalerkinConfig;
use crate::error::{Error, Result};
use crate::fields::{init_field, write_atomic, FlowState, InitKind, Snapshot, VectorField};
use crate::grid::TorusGrid;
use crate::report::{verdict_text, Criterion, Metrics};

/// Experiment names understood by [`run_experiment`].
pub const EXPERIMENTS: [&str; 5] = ["ledger", "uniqueness", "smoothing", "relaxation", "higher_order"];

/// Everything an experiment needs; validated before any computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub nu: f64,
    pub eta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub init: InitKind,
    /// Time between snapshots; zero disables them.
    pub cadence: f64,
    pub output_dir: Option<PathBuf>,
    /// Experiment-specific settings.
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// Taylor–Green reference settings: `n = 64, ν = 1, η = 0.1, dt = 10⁻³, T = 1`.
    pub fn reference() -> Self {
        Self {
            n: 64,
            nu: 1.0,
            eta: 0.1,
            dt: 1e-3,
            t_end: 1.0,
            cfl_safety: 0.5,
            init: InitKind::TaylorGreen,
            cadence: 0.0,
            output_dir: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn validate(&self) -> Result<()> {
        TorusGrid::<f64>::new(self.n).map_err(|_| Error::param("grid.n", format!("must be even and >= 4, got {}", self.n)))?;
        let checks: [(&'static str, bool, String); 5] = [
            ("params.nu", self.nu > 0.0 && self.nu.is_finite(), format!("must be > 0, got {}", self.nu)),
            ("params.eta", self.eta >= 0.0 && self.eta.is_finite(), format!("must be >= 0, got {}", self.eta)),
            ("time.dt", self.dt > 0.0 && self.dt.is_finite(), format!("must be > 0, got {}", self.dt)),
            ("time.t_end", self.t_end >= 0.0 && self.t_end.is_finite(), format!("must be >= 0, got {}", self.t_end)),
            (
                "time.cfl_safety",
                self.cfl_safety > 0.0 && self.cfl_safety <= 1.0,
                format!("must lie in (0, 1], got {}", self.cfl_safety),
            ),
        ];
        for (key, ok, reason) in checks {
            if !ok {
                return Err(Error::param(key, reason));
            }
        }
        if !(self.cadence >= 0.0) {
            return Err(Error::param("output.cadence", format!("must be >= 0, got {}", self.cadence)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TorusGrid<f64>> {
        TorusGrid::new(self.n)
    }

    pub fn galerkin(&self, grid: &TorusGrid<f64>) -> Result<GalerkinConfig<f64>> {
        let mut g = GalerkinConfig::new(grid.clone(), self.nu, self.eta, self.dt, self.t_end)?;
        g.cfl_safety = self.cfl_safety;
        Ok(g)
    }

    pub fn initial_state(&self, grid: &TorusGrid<f64>) -> Result<FlowState<f64>> {
        FlowState::new(0.0, init_field(grid, &self.init)?, self.nu, self.eta)
    }

    pub fn param_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::param("experiment.params", format!("`{key}` is not a number: {v}"))),
        }
    }

    pub fn param_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::param("experiment.params", format!("`{key}` is not a number list: {v}")))
                })
                .collect(),
        }
    }

    /// Key-value lines describing the configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let (kind, seed, exponent) = match &self.init {
            InitKind::TaylorGreen => ("taylor_green".to_string(), None, None),
            InitKind::RandomSobolev { seed, exponent, .. } => ("random_sobolev".to_string(), Some(*seed), Some(*exponent)),
            InitKind::FromFile(p) => (format!("from_file:{}", p.display()), None, None),
        };
        let mut out = vec![
            ("grid.n".to_string(), self.n.to_string()),
            ("params.nu".to_string(), self.nu.to_string()),
            ("params.eta".to_string(), self.eta.to_string()),
            ("time.dt".to_string(), self.dt.to_string()),
            ("time.t_end".to_string(), self.t_end.to_string()),
            ("time.cfl_safety".to_string(), self.cfl_safety.to_string()),
            ("init.kind".to_string(), kind),
            ("output.cadence".to_string(), self.cadence.to_string()),
        ];
        if let Some(s) = seed {
            out.push(("init.seed".to_string(), s.to_string()));
        }
        if let Some(e) = exponent {
            out.push(("init.spectrum_exponent".to_string(), e.to_string()));
        }
        for (k, v) in &self.params {
            out.push((format!("experiment.params.{k}"), v.clone()));
        }
        out
    }

    /// Whole steps between snapshots, or `None` when disabled.
    pub(crate) fn snapshot_every(&self, dt: f64) -> Option<usize> {
        (self.cadence > 0.0).then(|| ((self.cadence / dt).round() as usize).max(1))
    }
}

/// Outcome of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub config: Vec<(String, String)>,
    pub metrics: Metrics,
    pub verdict: Vec<Criterion>,
    pub artifacts: Vec<PathBuf>,
}

impl ExperimentReport {
    pub(crate) fn new(name: &str, config: &ExperimentConfig, metrics: Metrics) -> Result<Self> {
        let verdict = evaluate_verdict(name, &metrics)?;
        let mut echo = vec![("experiment.name".to_string(), name.to_string())];
        echo.extend(config.echo());
        Ok(Self {
            name: name.to_string(),
            config: echo,
            metrics,
            verdict,
            artifacts: Vec::new(),
        })
    }

    pub fn passed(&self) -> bool {
        self.verdict.iter().all(|c| c.pass)
    }

    /// Writes `report.csv`, `verdict.txt` and `config.toml` into `dir`.
    pub fn write(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let files = [
            ("report.csv", self.metrics.to_csv()),
            ("verdict.txt", verdict_text(&self.verdict)),
            ("config.toml", config_toml(&self.config)),
        ];
        for (name, text) in files {
            let path = dir.join(name);
            write_atomic(&path, text.as_bytes())?;
            self.artifacts.push(path);
        }
        Ok(())
    }
}

/// Echo lines as TOML: numbers bare, everything else quoted.
pub fn config_toml(lines: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in lines {
        let bare = v.parse::<f64>().is_ok_and(|x| x.is_finite()) && !v.contains(',');
        if bare {
            let _ = writeln!(s, "\"{k}\" = {v}");
        } else {
            let _ = writeln!(s, "\"{k}\" = \"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""));
        }
    }
    s
}

/// Runs the named experiment.
pub fn run_experiment(name: &str, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = match name {
        "ledger" => run_ledger(config)?,
        "uniqueness" => run_uniqueness(config)?,
        "smoothing" => run_smoothing(config)?,
        "relaxation" => run_relaxation(config)?,
        "higher_order" => run_higher_order(config)?,
        other => return Err(Error::param("experiment.name", format!("unknown experiment `{other}`"))),
    };
    if let Some(dir) = &config.output_dir {
        report.write(dir)?;
    }
    Ok(report)
}

/// Recomputes the verdict of experiment `name` from its metrics.
pub fn evaluate_verdict(name: &str, metrics: &Metrics) -> Result<Vec<Criterion>> {
    match name {
        "ledger" => diagnostics::ledger_verdict(metrics),
        "uniqueness" => uniqueness::verdict(metrics),
        "smoothing" => smoothing::verdict(metrics),
        "relaxation" => relaxation::verdict(metrics),
        "higher_order" => diagnostics::higher_order_verdict(metrics),
        other => Err(Error::param("experiment.name", format!("unknown experiment `{other}`"))),
    }
}

/// Observer writing SMHD snapshots of `B` every `every` steps.
pub(crate) struct SnapshotWriter {
    pub dir: PathBuf,
    pub every: usize,
    pub written: Vec<PathBuf>,
}

impl crate::dynamics::Observer<f64> for SnapshotWriter {
    fn cadence(&self) -> usize {
        self.every
    }

    fn observe(&mut self, step: usize, state: &FlowState<f64>, _: &crate::dynamics::RhsEval<f64>) -> Result<()> {
        let path = self.dir.join(format!("b_{step:08}.smhd"));
        Snapshot::from_vector(state.t, &state.b).write(&path)?;
        self.written.push(path);
        Ok(())
    }
}

pub(crate) fn snapshot_writer(config: &ExperimentConfig, dt: f64, sub: &str) -> Result<Option<SnapshotWriter>> {
    match (&config.output_dir, config.snapshot_every(dt)) {
        (Some(dir), Some(every)) => {
            let dir = dir.join("snapshots").join(sub);
            std::fs::create_dir_all(&dir)?;
            Ok(Some(SnapshotWriter {
                dir,
                every,
                written: Vec::new(),
            }))
        }
        _ => Ok(None),
    }
}

/// Unit-`L²` random solenoidal perturbation.
pub(crate) fn unit_perturbation(grid: &TorusGrid<f64>, seed: u64) -> VectorField<f64> {
    let z = crate::fields::random_sobolev(grid, seed, 2.0, 1.0);
    let n = z.l2_norm();
    z.scaled(1.0 / n)
}
