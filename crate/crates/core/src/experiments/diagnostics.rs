use super::{snapshot_writer, ExperimentConfig, ExperimentReport};
use crate::dynamics::{integrate, Observer, RhsEval};
use crate::error::{Error, Result};
use crate::fields::{advective_term, AdvectionForm, FlowState, SobolevIndex, SpectralField, VectorField};
use crate::report::{Comparison, Criterion, Metrics};

/// Flux function `ψ = Δ⁻¹ curl B` with `B = ∇⊥ψ`, and the Poincaré lower
/// bound `‖B‖ ≥ 2π‖ψ‖` it gives on the unit torus. A planar stand-in for
/// the helicity bound.
#[derive(Debug, Clone)]
pub struct FluxDiagnostics {
    pub psi: SpectralField<f64>,
    pub potential_l2: f64,
    /// `2π‖ψ‖_{L²}`.
    pub b_lower_bound: f64,
}

pub fn flux_function_diagnostics(b: &VectorField<f64>) -> Result<FluxDiagnostics> {
    b.check_divergence_free()?;
    let psi = b.curl().inverse_laplacian();
    let potential_l2 = psi.l2_norm();
    Ok(FluxDiagnostics {
        psi,
        potential_l2,
        b_lower_bound: std::f64::consts::TAU * potential_l2,
    })
}

/// `‖(u·∇)v‖_{H^s} / (‖u‖_{H^s} ‖v‖_{H^{s+1}})` for integer `s ≥ 2`.
pub fn check_hs_product_inequality(u: &VectorField<f64>, v: &VectorField<f64>, s: i32) -> Result<f64> {
    let (lhs, rhs) = hs_product_sides(u, v, s)?;
    Ok(if lhs == 0.0 { 0.0 } else { lhs / rhs })
}

pub(crate) fn hs_product_sides(u: &VectorField<f64>, v: &VectorField<f64>, s: i32) -> Result<(f64, f64)> {
    if s < 2 {
        return Err(Error::param("s", format!("need an integer s >= 2, got {s}")));
    }
    u.check_divergence_free()?;
    let order = SobolevIndex::new(s)?;
    let lhs = advective_term(u, v, AdvectionForm::Advective)?.sobolev_norm(order);
    let rhs = u.sobolev_norm(order) * v.sobolev_norm(order.raised());
    if lhs != 0.0 && !(rhs > 0.0) {
        return Err(Error::Degenerate("zero Sobolev norm".into()));
    }
    Ok((lhs, rhs))
}

/// Squared Sobolev norms of `B` and `u` at one time, index `j` holding
/// `‖·‖²_{H^j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub b: Vec<f64>,
    pub u: Vec<f64>,
}

impl TrajectorySample {
    pub fn of(t: f64, b: &VectorField<f64>, u: &VectorField<f64>, max_order: i32) -> Result<Self> {
        let norms = |v: &VectorField<f64>| -> Result<Vec<f64>> {
            (0..=max_order)
                .map(|j| Ok(v.sobolev_norm(SobolevIndex::new(j)?).powi(2)))
                .collect()
        };
        Ok(Self {
            t,
            b: norms(b)?,
            u: norms(u)?,
        })
    }
}

/// Fit of `d/dt‖B‖²_{H^k} + ν‖u‖²_{H^{k+1}} + η‖B‖²_{H^{k+1}} ≤ c‖B‖²_{H^k}(‖u‖²_{H^k} + ‖B‖²_{H^k})`.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderFit {
    pub k: i32,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Smallest `c ≥ 0` making the inequality hold at every interior sample.
    pub c: f64,
}

/// Evaluates the inequality at interior samples with a three-point
/// (second-order, non-uniform) centred difference for the time derivative.
pub fn check_higher_order_ledger(samples: &[TrajectorySample], k: i32, nu: f64, eta: f64) -> Result<HigherOrderFit> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            found: samples.len(),
        });
    }
    let ku = k as usize;
    if samples.iter().any(|s| s.b.len() < ku + 2 || s.u.len() < ku + 2) {
        return Err(Error::param("k", format!("samples lack the H^{} norms", k + 1)));
    }
    let mut fit = HigherOrderFit {
        k,
        times: Vec::new(),
        lhs: Vec::new(),
        rhs: Vec::new(),
        c: 0.0,
    };
    for w in samples.windows(3) {
        let (a, m, b) = (&w[0], &w[1], &w[2]);
        let (h0, h1) = (m.t - a.t, b.t - m.t);
        let deriv = -h1 / (h0 * (h0 + h1)) * a.b[ku] + (h1 - h0) / (h0 * h1) * m.b[ku] + h0 / (h1 * (h0 + h1)) * b.b[ku];
        let lhs = deriv + nu * m.u[ku + 1] + eta * m.b[ku + 1];
        let rhs = m.b[ku] * (m.u[ku] + m.b[ku]);
        if rhs > 0.0 {
            fit.c = fit.c.max(lhs / rhs);
        } else if lhs > 0.0 {
            fit.c = f64::INFINITY;
        }
        fit.times.push(m.t);
        fit.lhs.push(lhs);
        fit.rhs.push(rhs);
    }
    Ok(fit)
}

/// Observer collecting [`TrajectorySample`]s.
pub(crate) struct SampleRecorder {
    pub every: usize,
    pub max_order: i32,
    pub samples: Vec<TrajectorySample>,
}

impl Observer<f64> for SampleRecorder {
    fn cadence(&self) -> usize {
        self.every
    }

    fn observe(&mut self, _: usize, state: &FlowState<f64>, eval: &RhsEval<f64>) -> Result<()> {
        self.samples.push(TrajectorySample::of(state.t, &state.b, &eval.u, self.max_order)?);
        Ok(())
    }
}

/// Relative budget tolerance of every ledger verdict.
pub const BUDGET_TOLERANCE: f64 = 1e-6;
/// Per-step energy rise tolerated as round-off, relative to `E(0)`.
pub const ENERGY_RISE_TOLERANCE: f64 = 1e-12;

fn max_rise(energy: &[f64]) -> f64 {
    let e0 = energy.first().copied().unwrap_or(1.0);
    energy.windows(2).fold(0.0f64, |m, w| m.max((w[1] - w[0]) / e0))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::NAN })
}

/// Plain run of the configured dynamics with its energy ledger. With
/// `experiment.params.convergence = 1` the run is repeated at `dt/2` and
/// the contraction of the final budget residual is reported.
pub fn run_ledger(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = config.grid()?;
    let state0 = config.initial_state(&grid)?;
    let cfg = config.galerkin(&grid)?;
    let mut snaps = snapshot_writer(config, config.dt, "ledger")?;
    let mut observers: Vec<&mut dyn Observer<f64>> = Vec::new();
    if let Some(s) = snaps.as_mut() {
        observers.push(s);
    }
    let (_, ledger) = integrate(&state0, &cfg, &mut observers)?;
    let mut m = Metrics::new();
    m.insert("t", ledger.times.clone());
    m.insert("energy_B", ledger.energy_b.clone());
    m.insert("dissipation_u", ledger.dissipation_u.clone());
    m.insert("dissipation_B", ledger.dissipation_b.clone());
    m.insert("balance_residual", ledger.balance_residual.clone());
    m.insert("max_u", ledger.max_u.clone());
    if config.param_f64("convergence", 0.0)? != 0.0 {
        let mut half = cfg.clone();
        half.dt = cfg.dt / 2.0;
        let (_, l2) = integrate(&state0, &half, &mut [])?;
        m.insert("final_residual_dt", vec![ledger.final_residual().unwrap_or(0.0)]);
        m.insert("final_residual_half_dt", vec![l2.final_residual().unwrap_or(0.0)]);
    }
    let mut report = ExperimentReport::new("ledger", config, m)?;
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("ledger.csv");
        ledger.write_csv(&path)?;
        report.artifacts.push(path);
    }
    if let Some(s) = snaps {
        report.artifacts.extend(s.written);
    }
    Ok(report)
}

pub(crate) fn ledger_verdict(m: &Metrics) -> Result<Vec<Criterion>> {
    let mut v = vec![
        Criterion::new("energy_budget_max_residual", max_abs(m.require("balance_residual")?), Comparison::Below, BUDGET_TOLERANCE),
        Criterion::new("energy_max_rise", max_rise(m.require("energy_B")?), Comparison::AtMost, ENERGY_RISE_TOLERANCE),
    ];
    if let (Some(a), Some(b)) = (m.get("final_residual_dt"), m.get("final_residual_half_dt")) {
        let ratio = a.first().copied().unwrap_or(f64::NAN).abs() / b.first().copied().unwrap_or(f64::NAN).abs();
        v.push(Criterion::new("residual_contraction_min", ratio, Comparison::AtLeast, 12.0));
        v.push(Criterion::new("residual_contraction_max", ratio, Comparison::AtMost, 20.0));
    }
    Ok(v)
}

/// Fits the higher-order inequality for `k = 1, 2` along the configured
/// trajectory, and again at `dt/2` for the refinement check.
pub fn run_higher_order(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = config.grid()?;
    let state0 = config.initial_state(&grid)?;
    let every = config.param_f64("record_every", 10.0)?.max(1.0) as usize;
    let fit = |dt: f64, every: usize| -> Result<Vec<f64>> {
        let mut cfg = config.galerkin(&grid)?;
        cfg.dt = dt;
        let mut rec = SampleRecorder {
            every,
            max_order: 3,
            samples: Vec::new(),
        };
        integrate(&state0, &cfg, &mut [&mut rec])?;
        [1, 2]
            .iter()
            .map(|&k| Ok(check_higher_order_ledger(&rec.samples, k, config.nu, config.eta)?.c))
            .collect()
    };
    let coarse = fit(config.dt, every)?;
    let fine = fit(config.dt / 2.0, 2 * every)?;
    let mut m = Metrics::new();
    m.insert("c_k1", vec![coarse[0], fine[0]]);
    m.insert("c_k2", vec![coarse[1], fine[1]]);
    ExperimentReport::new("higher_order", config, m)
}

fn relative_change(v: &[f64]) -> f64 {
    match v {
        [a, b] if *a == 0.0 && *b == 0.0 => 0.0,
        [a, b] => (a - b).abs() / a.abs().max(b.abs()),
        _ => f64::NAN,
    }
}

pub(crate) fn higher_order_verdict(m: &Metrics) -> Result<Vec<Criterion>> {
    let mut v = Vec::new();
    for k in ["c_k1", "c_k2"] {
        let c = m.require(k)?;
        let finite = if c.iter().all(|x| x.is_finite()) { 1.0 } else { 0.0 };
        v.push(Criterion::new(format!("{k}_finite"), finite, Comparison::AtLeast, 1.0));
        v.push(Criterion::new(format!("{k}_dt_refinement_change"), relative_change(c), Comparison::Below, 0.1));
    }
    Ok(v)
}
