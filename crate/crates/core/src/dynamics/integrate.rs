use std::fmt::Write as _;
use std::path::Path;

use super::rhs::{evaluate_rhs, Nonlinearity, RhsEval};
use crate::error::{Error, Result};
use crate::fields::{write_atomic, FlowState, VectorField};
use crate::grid::TorusGrid;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Integrating-factor (Lawson) fourth-order Runge–Kutta.
    #[default]
    IfRk4,
}

#[derive(Debug, Clone)]
pub struct GalerkinConfig<T: Real> {
    pub grid: TorusGrid<T>,
    pub nu: T,
    pub eta: T,
    pub dt: T,
    pub t_end: T,
    /// In `(0, 1]`.
    pub cfl_safety: T,
    pub integrator: Integrator,
    pub nonlinearity: Nonlinearity,
}

impl<T: Real> GalerkinConfig<T> {
    pub fn new(grid: TorusGrid<T>, nu: T, eta: T, dt: T, t_end: T) -> Result<Self> {
        let cfg = Self {
            grid,
            nu,
            eta,
            dt,
            t_end,
            cfl_safety: T::c(0.5),
            integrator: Integrator::IfRk4,
            nonlinearity: Nonlinearity::On,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > T::zero()) {
            return Err(Error::param("nu", format!("must be > 0, got {}", self.nu)));
        }
        if !(self.eta >= T::zero()) {
            return Err(Error::param("eta", format!("must be >= 0, got {}", self.eta)));
        }
        if !(self.dt > T::zero()) {
            return Err(Error::param("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= T::zero()) {
            return Err(Error::param("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if !(self.cfl_safety > T::zero() && self.cfl_safety <= T::one()) {
            return Err(Error::param("cfl_safety", format!("must lie in (0, 1], got {}", self.cfl_safety)));
        }
        Ok(())
    }

    /// `cfl_safety · (1/n) / max(1, max|u|)`.
    pub fn admissible_dt(&self, max_u: T) -> T {
        self.cfl_safety / T::from_usize_lossy(self.grid.n()) / max_u.max(T::one())
    }
}

/// One row per recorded time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger<T: Real> {
    pub times: Vec<T>,
    /// `½‖B‖²`.
    pub energy_b: Vec<T>,
    /// Instantaneous `ν‖∇u‖²`.
    pub dissipation_u: Vec<T>,
    /// Instantaneous `η‖∇B‖²`.
    pub dissipation_b: Vec<T>,
    /// `∫₀ᵗ ν‖∇u‖²`.
    pub integral_u: Vec<T>,
    /// `∫₀ᵗ η‖∇B‖²`.
    pub integral_b: Vec<T>,
    /// `(E(t) - E(0) + ∫₀ᵗ dissipation) / E(0)`.
    pub balance_residual: Vec<T>,
    pub max_u: Vec<T>,
    /// Step that produced the row; zero for the initial row.
    pub dt: Vec<T>,
}

impl<T: Real> EnergyLedger<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|balance_residual|`.
    pub fn max_abs_residual(&self) -> T {
        self.balance_residual.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }

    pub fn final_residual(&self) -> Option<T> {
        self.balance_residual.last().copied()
    }

    /// Largest one-step increase of `energy_b` relative to `E(0)`; zero
    /// when the energy never rises.
    pub fn max_energy_increase(&self) -> T {
        let e0 = self.energy_b.first().copied().unwrap_or(T::one());
        self.energy_b
            .windows(2)
            .fold(T::zero(), |m, w| m.max((w[1] - w[0]) / e0))
    }

    /// Columns `t, energy_B, dissipation_u, dissipation_B, balance_residual, max_u, dt`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,energy_B,dissipation_u,dissipation_B,balance_residual,max_u,dt\n");
        for i in 0..self.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                self.times[i].to_f64_lossy(),
                self.energy_b[i].to_f64_lossy(),
                self.dissipation_u[i].to_f64_lossy(),
                self.dissipation_b[i].to_f64_lossy(),
                self.balance_residual[i].to_f64_lossy(),
                self.max_u[i].to_f64_lossy(),
                self.dt[i].to_f64_lossy()
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, t: T, energy: T, e: &RhsEval<T>, iu: T, ib: T, e0: T, dt: T) {
        self.times.push(t);
        self.energy_b.push(energy);
        self.dissipation_u.push(e.dissipation_u);
        self.dissipation_b.push(e.dissipation_b);
        self.integral_u.push(iu);
        self.integral_b.push(ib);
        let res = energy - e0 + iu + ib;
        self.balance_residual.push(if e0 > T::zero() { res / e0 } else { res });
        self.max_u.push(e.max_u);
        self.dt.push(dt);
    }
}

/// Called after each recorded step with the step index (zero for the
/// initial state), the state and the evaluation at that state.
pub trait Observer<T: Real> {
    /// Steps between calls; zero disables the observer.
    fn cadence(&self) -> usize {
        1
    }

    fn observe(&mut self, step: usize, state: &FlowState<T>, eval: &RhsEval<T>) -> Result<()>;
}

impl<T: Real, F: FnMut(usize, &FlowState<T>, &RhsEval<T>) -> Result<()>> Observer<T> for F {
    fn observe(&mut self, step: usize, state: &FlowState<T>, eval: &RhsEval<T>) -> Result<()> {
        self(step, state, eval)
    }
}

struct Advance<T: Real> {
    b: VectorField<T>,
    integral_u: T,
    integral_b: T,
}

/// One Lawson step from `b` with the stage-one evaluation `e1` already
/// computed. The dissipation integrals use the same stage weights on the
/// stage states, so the energy budget closes to fourth order.
fn if_rk4<T: Real>(b: &VectorField<T>, e1: &RhsEval<T>, h: T, cfg: &GalerkinConfig<T>) -> Result<Advance<T>> {
    let (nu, eta, mode) = (cfg.nu, cfg.eta, cfg.nonlinearity);
    let half = T::c(0.5) * h;
    let e_half = |v: &VectorField<T>| v.heat_flow(eta * half);
    let e_full = |v: &VectorField<T>| v.heat_flow(eta * h);
    let n1 = &e1.nonlinear;

    let mut s2 = b.clone();
    s2.axpy(half, n1);
    let s2 = e_half(&s2);
    let e2 = evaluate_rhs(&s2, nu, eta, mode)?;

    let mut s3 = e_half(b);
    s3.axpy(half, &e2.nonlinear);
    let e3 = evaluate_rhs(&s3, nu, eta, mode)?;

    let mut s4 = e_full(b);
    s4.axpy(h, &e_half(&e3.nonlinear));
    let e4 = evaluate_rhs(&s4, nu, eta, mode)?;

    let sixth = h / T::c(6.0);
    let two = T::c(2.0);
    let mut mid = e2.nonlinear.clone();
    mid.axpy(T::one(), &e3.nonlinear);
    let mut next = e_full(b);
    next.axpy(sixth, &e_full(n1));
    next.axpy(two * sixth, &e_half(&mid));
    next.axpy(sixth, &e4.nonlinear);
    let next = VectorField::assume_solenoidal(next.x, next.y);

    let quad = |a: T, b2: T, c: T, d: T| sixth * (a + two * b2 + two * c + d);
    Ok(Advance {
        b: next,
        integral_u: quad(e1.dissipation_u, e2.dissipation_u, e3.dissipation_u, e4.dissipation_u),
        integral_b: quad(e1.dissipation_b, e2.dissipation_b, e3.dissipation_b, e4.dissipation_b),
    })
}

/// Advances one step of size `config.dt`, refusing when it violates the
/// CFL bound at the current state.
pub fn step<T: Real>(state: &FlowState<T>, config: &GalerkinConfig<T>) -> Result<FlowState<T>> {
    config.validate()?;
    let e1 = evaluate_rhs(&state.b, config.nu, config.eta, config.nonlinearity)?;
    check_cfl(config, config.dt, e1.max_u)?;
    let adv = if_rk4(&state.b, &e1, config.dt, config)?;
    if !adv.b.is_finite() {
        return Err(Error::NonFinite { step: 1 });
    }
    Ok(FlowState {
        t: state.t + config.dt,
        b: adv.b,
        nu: state.nu,
        eta: state.eta,
    })
}

fn check_cfl<T: Real>(config: &GalerkinConfig<T>, h: T, max_u: T) -> Result<()> {
    let admissible = config.admissible_dt(max_u);
    if h > admissible {
        return Err(Error::Cfl {
            dt: h.to_f64_lossy(),
            admissible: admissible.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Advances `state0` to `t0 + t_end`, recording the ledger after every
/// step and calling each observer at its cadence.
pub fn integrate<T: Real>(
    state0: &FlowState<T>,
    config: &GalerkinConfig<T>,
    observers: &mut [&mut dyn Observer<T>],
) -> Result<(FlowState<T>, EnergyLedger<T>)> {
    config.validate()?;
    config.grid.ensure_same(state0.b.grid())?;
    let mut ledger = EnergyLedger::default();
    if config.t_end == T::zero() {
        return Ok((state0.clone(), ledger));
    }
    let steps = (config.t_end / config.dt - T::c(1e-9)).ceil().to_usize().unwrap_or(0).max(1);
    let (nu, eta, mode) = (config.nu, config.eta, config.nonlinearity);
    let mut state = state0.clone();
    let e0 = state.energy();
    let (mut iu, mut ib) = (T::zero(), T::zero());
    let mut eval = evaluate_rhs(&state.b, nu, eta, mode)?;
    ledger.push(state.t, e0, &eval, iu, ib, e0, T::zero());
    notify(observers, 0, &state, &eval)?;
    for k in 0..steps {
        let t_k = state0.t + config.dt * T::from_usize_lossy(k);
        let h = config.dt.min(state0.t + config.t_end - t_k);
        check_cfl(config, h, eval.max_u)?;
        let adv = if_rk4(&state.b, &eval, h, config)?;
        if !adv.b.is_finite() {
            return Err(Error::NonFinite { step: k + 1 });
        }
        iu = iu + adv.integral_u;
        ib = ib + adv.integral_b;
        state = FlowState {
            t: if k + 1 == steps { state0.t + config.t_end } else { t_k + h },
            b: adv.b,
            nu: state.nu,
            eta: state.eta,
        };
        eval = evaluate_rhs(&state.b, nu, eta, mode)?;
        ledger.push(state.t, state.energy(), &eval, iu, ib, e0, h);
        notify(observers, k + 1, &state, &eval)?;
    }
    Ok((state, ledger))
}

fn notify<T: Real>(observers: &mut [&mut dyn Observer<T>], step: usize, state: &FlowState<T>, eval: &RhsEval<T>) -> Result<()> {
    for o in observers.iter_mut() {
        let c = o.cadence();
        if c > 0 && step.is_multiple_of(c) {
            o.observe(step, state, eval)?;
        }
    }
    Ok(())
}
