//! Corpus sweeps behind `verify`: one table per inequality, plus the hard
//! invariants (exact inequalities and identities) that must never fail.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::diagnostics::{flux_function_diagnostics, hs_product_sides};
use crate::dynamics::{cancellations, dbdt_hminus1_bound_sides, Nonlinearity};
use crate::error::{Error, Result};
use crate::fields::write_atomic;
use crate::grid::TorusGrid;
use crate::lorentz::{corpus_field, lorentz_corpus, Rearrangement};
use crate::report::{verdict_text, Comparison, Criterion, InequalityRow, InequalityTable};
use crate::stokes::{
    bump, check_weak_young, greens_eval, greens_gradient_quasinorm, greens_sample_points, solve_stokes_freespace,
    velocity_and_forcing, BoxTensor,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lorentz,
    Stokes,
    Dynamics,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "lorentz" => Ok(Self::Lorentz),
            "stokes" => Ok(Self::Stokes),
            "dynamics" => Ok(Self::Dynamics),
            "all" => Ok(Self::All),
            other => Err(Error::param("suite", format!("unknown suite `{other}` (lorentz, stokes, dynamics, all)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub n: usize,
    pub seeds: Range<u64>,
    pub nu: f64,
    pub eta: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n: 64,
            seeds: 0..crate::lorentz::STANDARD_CORPUS_SIZE,
            nu: 1.0,
            eta: 0.1,
        }
    }
}

/// Tables whose every ratio is bounded by an exact inequality or identity.
pub const HARD_LIMITS: [(&str, f64); 6] = [
    ("greens_bound", 1.0),
    ("dbdt_hminus1_bound", 1.0 + 1e-8),
    ("cancellation_transport", 1e-10),
    ("cancellation_stretching", 1e-10),
    ("flux_poincare", 1.0 + 1e-12),
    ("stokes_residual", 1e-8),
];

/// Number of sample points of the Green's-bound sweep.
pub const GREENS_POINTS: usize = 10_000;
pub const GREENS_VISCOSITIES: [f64; 3] = [0.1, 1.0, 10.0];

/// `|∂_k U_ij(x)|` against `1/(πν|x|)` at random points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GreensBoundTable {
    /// `(index, ν, x, y, lhs, rhs)`.
    pub rows: Vec<(usize, f64, f64, f64, f64, f64)>,
}

impl GreensBoundTable {
    pub fn sweep(count: usize, seed: u64, viscosities: &[f64]) -> Result<Self> {
        let points = greens_sample_points(count, seed);
        let mut rows = Vec::with_capacity(count * viscosities.len());
        for &nu in viscosities {
            for (i, &p) in points.iter().enumerate() {
                let e = greens_eval(p, nu)?;
                let r = p[0].hypot(p[1]);
                let lhs = e.grad_u.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
                rows.push((i, nu, p[0], p[1], lhs, 1.0 / (std::f64::consts::PI * nu * r)));
            }
        }
        Ok(Self { rows })
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| if (r.4 / r.5).is_finite() { m.max(r.4 / r.5) } else { f64::NAN })
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !(r.4 <= r.5)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,nu,x,y,lhs,rhs,ratio\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{},{},{}", r.0, r.1, r.2, r.3, r.4, r.5, r.4 / r.5);
        }
        s
    }

    /// Largest value of the `ratio` column of a CSV written by [`Self::to_csv`].
    pub fn max_ratio_of_csv(text: &str) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, line) in text.lines().enumerate().skip(1) {
            let v: f64 = line
                .rsplit(',')
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::MalformedSnapshot(format!("greens_bound.csv line {}", i + 1)))?;
            worst = if v.is_finite() { worst.max(v) } else { f64::NAN };
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOutput {
    pub tables: Vec<InequalityTable>,
    pub greens: Option<GreensBoundTable>,
    /// One criterion per hard-invariant table present.
    pub hard: Vec<Criterion>,
}

impl VerifyOutput {
    pub fn hard_failed(&self) -> bool {
        self.hard.iter().any(|c| !c.pass)
    }

    pub fn table(&self, name: &str) -> Option<&InequalityTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// One CSV per inequality plus `verdict.txt` with the hard checks.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for t in &self.tables {
            paths.push(t.write(dir)?);
        }
        if let Some(g) = &self.greens {
            let p = dir.join("greens_bound.csv");
            write_atomic(&p, g.to_csv().as_bytes())?;
            paths.push(p);
        }
        let p = dir.join("verdict.txt");
        write_atomic(&p, verdict_text(&self.hard).as_bytes())?;
        paths.push(p);
        Ok(paths)
    }
}

fn hard_criterion(name: &str, worst: f64) -> Option<Criterion> {
    HARD_LIMITS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, limit)| Criterion::new(*n, worst, Comparison::AtMost, *limit))
}

fn hard_checks(tables: &[InequalityTable], greens: Option<&GreensBoundTable>) -> Vec<Criterion> {
    HARD_LIMITS
        .iter()
        .filter_map(|(name, _)| {
            let worst = if *name == "greens_bound" {
                greens?.max_ratio()
            } else {
                tables.iter().find(|t| t.name == *name)?.max_ratio()
            };
            hard_criterion(name, worst)
        })
        .collect()
}

/// Re-derives the hard checks from CSVs written by [`VerifyOutput::write`].
pub fn hard_checks_from_dir(dir: &Path) -> Result<Vec<Criterion>> {
    let mut out = Vec::new();
    for (name, _) in HARD_LIMITS {
        let path = dir.join(format!("{name}.csv"));
        if !path.exists() {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        let worst = if name == "greens_bound" {
            GreensBoundTable::max_ratio_of_csv(&text)?
        } else {
            InequalityTable::from_csv(name, &text)?.max_ratio()
        };
        out.extend(hard_criterion(name, worst));
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyOutput> {
    if opts.seeds.is_empty() {
        return Err(Error::param("seeds", "seed range is empty"));
    }
    let mut tables = Vec::new();
    let mut greens = None;
    if matches!(suite, Suite::Lorentz | Suite::All) {
        tables.extend(lorentz_corpus(opts.n, opts.seeds.clone())?);
    }
    if matches!(suite, Suite::Stokes | Suite::All) {
        greens = Some(GreensBoundTable::sweep(GREENS_POINTS, 0, &GREENS_VISCOSITIES)?);
        tables.extend(stokes_corpus(opts)?);
    }
    if matches!(suite, Suite::Dynamics | Suite::All) {
        tables.extend(dynamics_corpus(opts)?);
    }
    let hard = hard_checks(&tables, greens.as_ref());
    Ok(VerifyOutput { tables, greens, hard })
}

fn transpose(names: &[&str], per_seed: Vec<Vec<InequalityRow>>) -> Vec<InequalityTable> {
    let mut tables: Vec<InequalityTable> = names.iter().map(|n| InequalityTable::new(*n)).collect();
    for rows in per_seed {
        for (t, r) in tables.iter_mut().zip(rows) {
            t.rows.push(r);
        }
    }
    tables
}

fn row(seed: u64, exponent: f64, lhs: f64, rhs: f64) -> InequalityRow {
    InequalityRow {
        seed,
        exponent,
        lhs,
        rhs,
        ratio: if lhs == 0.0 { 0.0 } else { lhs / rhs },
    }
}

/// Box side and resolution of the free-space weak-Young sweep.
const YOUNG_BOX: f64 = 4.0;
const YOUNG_M: usize = 64;

/// `f = B⊗B` with `B = ∇⊥φ` for a random polynomial bump `φ`; the
/// `exponent` column carries the bump power.
fn bump_forcing(seed: u64) -> (BoxTensor, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius: f64 = rng.random_range(0.4..1.2);
    let power: i32 = rng.random_range(3..=8);
    let reach = 0.5 * YOUNG_BOX - radius - 2.0 * YOUNG_BOX / YOUNG_M as f64;
    let cx: f64 = rng.random_range(-reach..reach);
    let cy: f64 = rng.random_range(-reach..reach);
    let r2 = radius * radius;
    let field = |x: f64, y: f64| -> (f64, f64) {
        let (dx, dy) = (x - cx, y - cy);
        let s = bump(dx, dy, radius, 1);
        if s <= 0.0 {
            return (0.0, 0.0);
        }
        // ∇φ = -2p s^{p-1} (dx, dy) / R²
        let g = -2.0 * power as f64 * s.powi(power - 1) / r2;
        (-g * dy, g * dx)
    };
    let f = BoxTensor::from_fn(YOUNG_M, YOUNG_BOX, |x, y| {
        let (a, b) = field(x, y);
        [a * a, a * b, b * a, b * b]
    });
    (f, power as f64)
}

fn stokes_corpus(opts: &VerifyOptions) -> Result<Vec<InequalityTable>> {
    let grid = TorusGrid::<f64>::new(opts.n)?;
    let per_seed: Vec<Vec<InequalityRow>> = opts
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let (f, power) = bump_forcing(seed);
            let u = solve_stokes_freespace(&f, opts.nu)?;
            let g = greens_gradient_quasinorm(opts.nu);
            let ratio = check_weak_young(f.l1_norm(), g, u.weak_l2())?;
            let young = InequalityRow {
                seed,
                exponent: power,
                lhs: u.weak_l2(),
                rhs: f.l1_norm() * g,
                ratio,
            };
            let (b, exponent) = corpus_field(&grid, seed);
            let (sol, forcing) = velocity_and_forcing(&b, opts.nu)?;
            let weak = Rearrangement::from_samples(&sol.u.magnitude_samples(), grid.cell_measure()).weak_lp(2.0).value;
            let b2 = b.inner(&b);
            Ok(vec![
                young,
                row(seed, exponent, weak, b2 / opts.nu),
                row(seed, exponent, sol.relative_residual(&forcing, opts.nu), 1.0),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(transpose(&["weak_young_freespace", "stokes_weak_l2", "stokes_residual"], per_seed))
}

fn dynamics_corpus(opts: &VerifyOptions) -> Result<Vec<InequalityTable>> {
    let grid = TorusGrid::<f64>::new(opts.n)?;
    let per_seed: Vec<Vec<InequalityRow>> = opts
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let (b, exponent) = corpus_field(&grid, seed);
            let (lhs, rhs) = dbdt_hminus1_bound_sides(&b, opts.nu, opts.eta, Nonlinearity::On)?;
            let c = cancellations(&b, opts.nu)?;
            let (hl, hr) = hs_product_sides(&b, &b, 2)?;
            let flux = flux_function_diagnostics(&b)?;
            Ok(vec![
                row(seed, exponent, lhs, rhs),
                row(seed, exponent, c.transport, 1.0),
                row(seed, exponent, c.stretching, 1.0),
                row(seed, exponent, hl, hr),
                row(seed, exponent, flux.b_lower_bound, b.l2_norm()),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(transpose(
        &[
            "dbdt_hminus1_bound",
            "cancellation_transport",
            "cancellation_stretching",
            "hs_product_s2",
            "flux_poincare",
        ],
        per_seed,
    ))
}
