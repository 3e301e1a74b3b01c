use super::diagnostics::{flux_function_diagnostics, BUDGET_TOLERANCE, ENERGY_RISE_TOLERANCE};
use super::{snapshot_writer, unit_perturbation, ExperimentConfig, ExperimentReport};
use crate::dynamics::{integrate, Observer, RhsEval};
use crate::error::{Error, Result};
use crate::fields::{FlowState, SobolevIndex};
use crate::report::{Comparison, Criterion, Metrics};
use crate::stokes::velocity_and_forcing;

/// Samples taken every `every` steps.
struct RelaxationProbe {
    every: usize,
    t: Vec<f64>,
    dissipation_u: Vec<f64>,
    euler_residual: Vec<f64>,
    b_l2: Vec<f64>,
    flux_ratio: Vec<f64>,
}

impl Observer<f64> for RelaxationProbe {
    fn cadence(&self) -> usize {
        self.every
    }

    fn observe(&mut self, _: usize, state: &FlowState<f64>, eval: &RhsEval<f64>) -> Result<()> {
        let (_, forcing) = velocity_and_forcing(&state.b, state.nu)?;
        let b_l2 = state.b.l2_norm();
        let flux = flux_function_diagnostics(&state.b)?;
        self.t.push(state.t);
        self.dissipation_u.push(eval.dissipation_u);
        self.euler_residual.push(forcing.leray_project().sobolev_norm(SobolevIndex::H_MINUS_1));
        self.b_l2.push(b_l2);
        self.flux_ratio.push(if b_l2 > 0.0 { flux.b_lower_bound / b_l2 } else { 0.0 });
        Ok(())
    }
}

/// Trailing moving average over `window` time units.
pub(crate) fn moving_average(t: &[f64], v: &[f64], window: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let (mut lo, mut sum) = (0usize, 0.0);
    for i in 0..v.len() {
        sum += v[i];
        while t[i] - t[lo] > window + 1e-9 {
            sum -= v[lo];
            lo += 1;
        }
        out.push(sum / (i + 1 - lo) as f64);
    }
    out
}

/// Largest relative increase between consecutive entries; zero for a
/// non-increasing series.
pub(crate) fn max_relative_rise(v: &[f64]) -> f64 {
    v.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d <= 0.0 {
                0.0
            } else if w[0] > 0.0 {
                d / w[0]
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

/// Long weakly resistive run. `experiment.params`: `perturbation` adds
/// that multiple of a unit random field to `B₀` (seed
/// `perturbation_seed`), `sample_interval` sets the probe spacing,
/// `window` the smoothing window and `trend_start` where the monotone
/// trend is tested.
pub fn run_relaxation(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let perturbation = config.param_f64("perturbation", 0.0)?;
    let seed = config.param_f64("perturbation_seed", 7.0)? as u64;
    let interval = config.param_f64("sample_interval", 0.05)?;
    let window = config.param_f64("window", 1.0)?;
    let trend_start = config.param_f64("trend_start", 5.0)?;
    if !(interval > 0.0 && window > 0.0 && trend_start >= 0.0) {
        return Err(Error::param("experiment.params", "sample_interval and window must be > 0"));
    }
    let grid = config.grid()?;
    let mut s0 = config.initial_state(&grid)?;
    if perturbation != 0.0 {
        let mut b = s0.b.clone();
        b.axpy(perturbation, &unit_perturbation(&grid, seed));
        s0 = FlowState::new(0.0, b, config.nu, config.eta)?;
    }
    let cfg = config.galerkin(&grid)?;
    let mut probe = RelaxationProbe {
        every: ((interval / cfg.dt).round() as usize).max(1),
        t: Vec::new(),
        dissipation_u: Vec::new(),
        euler_residual: Vec::new(),
        b_l2: Vec::new(),
        flux_ratio: Vec::new(),
    };
    let mut writer = snapshot_writer(config, cfg.dt, "relaxation")?;
    let (_, ledger) = {
        let mut obs: Vec<&mut dyn Observer<f64>> = vec![&mut probe];
        if let Some(w) = writer.as_mut() {
            obs.push(w);
        }
        integrate(&s0, &cfg, &mut obs)?
    };
    let initial_energy = s0.energy();
    let smoothed = moving_average(&probe.t, &probe.dissipation_u, window);
    let mut m = Metrics::new();
    m.insert("t", probe.t.clone());
    m.insert("dissipation_u", probe.dissipation_u);
    m.insert("dissipation_u_smoothed", smoothed);
    m.insert("euler_residual", probe.euler_residual);
    m.insert("b_l2", probe.b_l2);
    m.insert("flux_ratio", probe.flux_ratio);
    m.insert("trend_start", vec![trend_start]);
    m.insert("energy_budget_max_residual", vec![ledger.max_abs_residual()]);
    m.insert("energy_max_rise", vec![ledger.max_energy_increase()]);
    let integral_u = ledger.integral_u.last().copied().unwrap_or(0.0);
    m.insert(
        "u_dissipation_over_initial_energy",
        vec![if initial_energy > 0.0 { integral_u / initial_energy } else { 0.0 }],
    );
    ExperimentReport::new("relaxation", config, m)
}

pub(crate) fn verdict(m: &Metrics) -> Result<Vec<Criterion>> {
    let t = m.require("t")?;
    let start = m.scalar("trend_start")?;
    let smoothed = m.require("dissipation_u_smoothed")?;
    let tail: Vec<f64> = t.iter().zip(smoothed).filter(|(t, _)| **t >= start - 1e-9).map(|(_, v)| *v).collect();
    let euler = m.require("euler_residual")?;
    let euler_change = match (euler.first(), euler.last()) {
        (Some(a), Some(b)) if *a > 0.0 => b / a,
        _ => f64::NAN,
    };
    let flux = m.require("flux_ratio")?.iter().fold(0.0f64, |a, b| a.max(*b));
    Ok(vec![
        Criterion::new("smoothed_dissipation_u_max_rise", max_relative_rise(&tail), Comparison::AtMost, 0.0),
        Criterion::new("euler_residual_final_over_initial", euler_change, Comparison::Below, 1.0),
        Criterion::new("energy_budget_max_residual", m.scalar("energy_budget_max_residual")?, Comparison::Below, BUDGET_TOLERANCE),
        Criterion::new("energy_max_rise", m.scalar("energy_max_rise")?, Comparison::AtMost, ENERGY_RISE_TOLERANCE),
        Criterion::new("u_dissipation_over_initial_energy", m.scalar("u_dissipation_over_initial_energy")?, Comparison::AtMost, 1.0),
        Criterion::new("flux_bound_max_ratio", flux, Comparison::AtMost, 1.0 + 1e-12),
    ])
}
