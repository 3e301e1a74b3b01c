use super::{unit_perturbation, ExperimentConfig, ExperimentReport};
use crate::dynamics::{integrate, Observer, RhsEval};
use crate::error::{Error, Result};
use crate::fields::{FlowState, VectorField};
use crate::report::{fit_slope, Comparison, Criterion, Metrics};

/// Two trajectories from `B₀` and `B₀ + δζ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub delta: f64,
    pub times: Vec<f64>,
    /// `‖z(t)‖` with `z = B₁ - B₂`.
    pub z_norm: Vec<f64>,
    /// `∫₀ᵗ (‖∇B₁‖² + ‖∇B₂‖²)` at the recorded times.
    pub gradient_integral: Vec<f64>,
    /// Smallest `C ≥ 0` with `ln‖z(t)‖² - ln‖z(0)‖² ≤ C ∫₀ᵗ(‖∇B₁‖² + ‖∇B₂‖²)`.
    pub gronwall_c: f64,
}

impl PairOutcome {
    pub fn z_final(&self) -> f64 {
        self.z_norm.last().copied().unwrap_or(0.0)
    }
}

/// Keeps every state and `‖∇B‖²` of one trajectory.
struct Trace {
    times: Vec<f64>,
    states: Vec<VectorField<f64>>,
    grad_sq: Vec<f64>,
}

impl Observer<f64> for Trace {
    fn observe(&mut self, _: usize, state: &FlowState<f64>, _: &RhsEval<f64>) -> Result<()> {
        self.times.push(state.t);
        self.states.push(state.b.clone());
        self.grad_sq.push(state.b.gradient_norm_sq());
        Ok(())
    }
}

fn trace(state0: &FlowState<f64>, config: &ExperimentConfig) -> Result<Trace> {
    let grid = state0.b.grid().clone();
    let cfg = config.galerkin(&grid)?;
    let mut t = Trace {
        times: Vec::new(),
        states: Vec::new(),
        grad_sq: Vec::new(),
    };
    integrate(state0, &cfg, &mut [&mut t])?;
    Ok(t)
}

/// Runs the pair concurrently; each trajectory is sequential, so the
/// result equals the sequential one bit for bit.
pub fn uniqueness_pair(config: &ExperimentConfig, delta: f64, seed: u64) -> Result<PairOutcome> {
    if !(delta >= 0.0) {
        return Err(Error::param("delta", format!("must be >= 0, got {delta}")));
    }
    let grid = config.grid()?;
    let s1 = config.initial_state(&grid)?;
    let mut b2 = s1.b.clone();
    b2.axpy(delta, &unit_perturbation(&grid, seed));
    let s2 = FlowState::new(0.0, b2, config.nu, config.eta)?;
    let (a, b) = rayon::join(|| trace(&s1, config), || trace(&s2, config));
    let (a, b) = (a?, b?);
    let z_norm: Vec<f64> = a.states.iter().zip(&b.states).map(|(x, y)| (x - y).l2_norm()).collect();
    let mut gradient_integral = vec![0.0];
    for i in 1..a.times.len() {
        let h = a.times[i] - a.times[i - 1];
        let g0 = a.grad_sq[i - 1] + b.grad_sq[i - 1];
        let g1 = a.grad_sq[i] + b.grad_sq[i];
        gradient_integral.push(gradient_integral[i - 1] + 0.5 * h * (g0 + g1));
    }
    let mut c = 0.0f64;
    if let Some(&z0) = z_norm.first() {
        if z0 > 0.0 {
            for (z, g) in z_norm.iter().zip(&gradient_integral).skip(1) {
                if *g > 0.0 {
                    c = c.max((z * z / (z0 * z0)).ln() / g);
                }
            }
        }
    }
    Ok(PairOutcome {
        delta,
        times: a.times,
        z_norm,
        gradient_integral,
        gronwall_c: c,
    })
}

/// Sweeps `experiment.params.deltas` (default `1e-4, 1e-5, 1e-6`).
pub fn run_uniqueness(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let deltas = config.param_list("deltas", &[1e-4, 1e-5, 1e-6])?;
    let seed = config.param_f64("perturbation_seed", 1.0)? as u64;
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::param("experiment.params", "deltas must be > 0"));
    }
    let mut m = Metrics::new();
    let mut z_final = Vec::new();
    let mut cs = Vec::new();
    for &d in &deltas {
        let p = uniqueness_pair(config, d, seed)?;
        z_final.push(p.z_final());
        cs.push(p.gronwall_c);
    }
    m.insert("delta", deltas);
    m.insert("z_final", z_final);
    m.insert("gronwall_c", cs);
    ExperimentReport::new("uniqueness", config, m)
}

pub(crate) fn verdict(m: &Metrics) -> Result<Vec<Criterion>> {
    let deltas = m.require("delta")?;
    let z = m.require("z_final")?;
    let pts: Vec<(f64, f64)> = deltas.iter().zip(z).map(|(d, z)| (d.ln(), z.ln())).collect();
    let slope = fit_slope(&pts);
    let ratios: Vec<f64> = deltas.iter().zip(z).map(|(d, z)| z / d).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    let c = m.require("gronwall_c")?.iter().fold(0.0f64, |a, b| a.max(*b));
    Ok(vec![
        Criterion::new("z_delta_slope_min", slope, Comparison::AtLeast, 0.95),
        Criterion::new("z_delta_slope_max", slope, Comparison::AtMost, 1.05),
        Criterion::new("z_over_delta_spread", hi / lo - 1.0, Comparison::Below, 0.05),
        Criterion::new("gronwall_c_max", c, Comparison::Below, f64::INFINITY),
    ])
}
