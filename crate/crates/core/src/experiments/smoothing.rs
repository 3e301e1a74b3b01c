use rayon::prelude::*;

use super::{snapshot_writer, ExperimentConfig, ExperimentReport};
use crate::dynamics::{integrate, Observer};
use crate::error::{Error, Result};
use crate::fields::{init_field, FlowState, InitKind, SobolevIndex, VectorField};
use crate::grid::TorusGrid;
use crate::report::{Comparison, Criterion, Metrics};

const MAX_HALVINGS: usize = 8;

/// `[‖B‖_{L²}, ‖B‖_{H¹}, ‖B‖_{H²}, ‖B‖_{H³}]`.
fn norms(b: &VectorField<f64>) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = b.sobolev_norm(SobolevIndex::new(k as i32)?);
    }
    Ok(out)
}

/// Advances by `span`, halving the step until the CFL guard accepts it.
fn advance(state: &FlowState<f64>, config: &ExperimentConfig, span: f64, sub: &str) -> Result<FlowState<f64>> {
    let grid = state.b.grid().clone();
    let mut cfg = config.galerkin(&grid)?;
    cfg.t_end = span;
    if span == 0.0 {
        return Ok(state.clone());
    }
    for _ in 0..=MAX_HALVINGS {
        let mut writer = snapshot_writer(config, cfg.dt, sub)?;
        let mut obs: Vec<&mut dyn Observer<f64>> = Vec::new();
        if let Some(w) = writer.as_mut() {
            obs.push(w);
        }
        match integrate(state, &cfg, &mut obs) {
            Ok((s, _)) => return Ok(s),
            Err(Error::Cfl { .. }) => cfg.dt *= 0.5,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Cfl {
        dt: cfg.dt,
        admissible: 0.0,
    })
}

fn norms_at_times(config: &ExperimentConfig, n: usize, times: &[f64]) -> Result<Vec<[f64; 4]>> {
    let grid = TorusGrid::new(n)?;
    let mut state = FlowState::new(0.0, init_field(&grid, &config.init)?, config.nu, config.eta)?;
    let mut out = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        state = advance(&state, config, t - state.t, &format!("n{n}_segment{i}"))?;
        out.push(norms(&state.b)?);
    }
    Ok(out)
}

/// Sobolev norms of matched-phase rough data at several resolutions and
/// times (`experiment.params.resolutions`, `experiment.params.times`).
pub fn run_smoothing(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if !matches!(config.init, InitKind::RandomSobolev { .. }) {
        return Err(Error::param("init.kind", "smoothing needs random_sobolev initial data"));
    }
    let resolutions = config.param_list("resolutions", &[64.0, 128.0, 256.0])?;
    let times = config.param_list("times", &[0.0, 0.1, 0.5])?;
    if resolutions.len() < 2 || resolutions.iter().any(|n| !(*n >= 4.0) || n.fract() != 0.0) {
        return Err(Error::param("experiment.params", "resolutions must be at least two grid sizes"));
    }
    if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) || !(times[0] >= 0.0) {
        return Err(Error::param("experiment.params", "times must be increasing and >= 0"));
    }
    let per_n: Vec<Vec<[f64; 4]>> = resolutions
        .par_iter()
        .map(|&n| norms_at_times(config, n as usize, &times))
        .collect::<Result<_>>()?;
    let mut m = Metrics::new();
    m.insert("resolutions", resolutions.clone());
    m.insert("times", times.clone());
    for (n, rows) in resolutions.iter().zip(&per_n) {
        for k in 0..4 {
            let name = if k == 0 { format!("l2_n{n}") } else { format!("h{k}_n{n}") };
            m.insert(name, rows.iter().map(|r| r[k]).collect());
        }
    }
    ExperimentReport::new("smoothing", config, m)
}

fn norm_across_n(m: &Metrics, k: usize, time_index: usize) -> Result<Vec<f64>> {
    m.require("resolutions")?
        .iter()
        .map(|n| {
            let name = if k == 0 { format!("l2_n{n}") } else { format!("h{k}_n{n}") };
            m.require(&name)?
                .get(time_index)
                .copied()
                .ok_or_else(|| Error::MalformedSnapshot(format!("metric `{name}` too short")))
        })
        .collect()
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(*x), h.max(*x)));
    hi / lo - 1.0
}

pub(crate) fn verdict(m: &Metrics) -> Result<Vec<Criterion>> {
    let times = m.require("times")?;
    let initial = norm_across_n(m, 1, 0)?;
    let growth = initial.windows(2).map(|w| w[1] / w[0] - 1.0).fold(f64::INFINITY, f64::min);
    let mut out = vec![Criterion::new("h1_initial_min_growth_per_doubling", growth, Comparison::AtLeast, 0.25)];
    if let Some(i) = times.iter().position(|t| (t - 0.1).abs() < 1e-12) {
        out.push(Criterion::new("h1_t0.1_spread", spread(&norm_across_n(m, 1, i)?), Comparison::Below, 0.10));
    }
    Ok(out)
}
