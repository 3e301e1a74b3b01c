//! The standard random-field corpus and the Lorentz inequality sweep.

use rayon::prelude::*;

use super::inequalities::{
    check_bernstein, check_bmo_interpolation, check_ladyzhenskaya, check_weak_ladyzhenskaya,
    check_weak_strong_interpolation, InequalityRatioReport,
};
use crate::error::Result;
use crate::fields::{corpus_exponent, random_sobolev, VectorField};
use crate::grid::TorusGrid;
use crate::report::{InequalityRow, InequalityTable};

pub const STANDARD_CORPUS_SIZE: u64 = 1000;
pub const CORPUS_EXPONENT_RANGE: (f64, f64) = (1.1, 3.0);
/// Band limits used for the Bernstein sweep.
pub const BERNSTEIN_KAPPAS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];

/// Corpus member `seed`: a random solenoidal field with its exponent.
pub fn corpus_field(grid: &TorusGrid<f64>, seed: u64) -> (VectorField<f64>, f64) {
    let (lo, hi) = CORPUS_EXPONENT_RANGE;
    let exponent = corpus_exponent(seed, lo, hi);
    (random_sobolev(grid, seed, exponent, 1.0), exponent)
}

fn row(seed: u64, exponent: f64, r: &InequalityRatioReport<f64>) -> InequalityRow {
    InequalityRow {
        seed,
        exponent,
        lhs: r.lhs,
        rhs: r.rhs,
        ratio: r.ratio,
    }
}

/// Runs every Lorentz-space inequality over the corpus seeds on an `n`
/// grid, using the first component of each corpus field.
pub fn lorentz_corpus(n: usize, seeds: std::ops::Range<u64>) -> Result<Vec<InequalityTable>> {
    let grid = TorusGrid::<f64>::new(n)?;
    let per_seed: Vec<Vec<InequalityRow>> = seeds
        .into_par_iter()
        .map(|seed| {
            let (b, exponent) = corpus_field(&grid, seed);
            let f = &b.x;
            let mut rows = vec![
                row(seed, exponent, &check_ladyzhenskaya(f)?),
                row(seed, exponent, &check_weak_ladyzhenskaya(f)?),
            ];
            for kappa in BERNSTEIN_KAPPAS {
                rows.push(row(seed, exponent, &check_bernstein(&f.band_limited(kappa), kappa)?));
            }
            let bmo = check_bmo_interpolation(f, 2.0, 4.0)?;
            rows.push(row(seed, exponent, &bmo.strong));
            rows.push(row(seed, exponent, &bmo.weak));
            rows.push(row(seed, exponent, &check_weak_strong_interpolation(f, 2.0, 3.0, 4.0)?));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut names: Vec<String> = vec!["ladyzhenskaya".into(), "weak_ladyzhenskaya".into()];
    names.extend(BERNSTEIN_KAPPAS.iter().map(|k| format!("bernstein_kappa{k}")));
    names.extend(["bmo_interpolation_strong", "bmo_interpolation_weak", "weak_strong_interpolation"].map(String::from));
    let mut tables: Vec<InequalityTable> = names.into_iter().map(InequalityTable::new).collect();
    for rows in per_seed {
        for (t, r) in tables.iter_mut().zip(rows) {
            t.rows.push(r);
        }
    }
    Ok(tables)
}
