//! Acceptance criteria at full scale. Prints one line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use mhdrelax::dynamics::cancellations;
use mhdrelax::experiments::verify::{run_suite, GreensBoundTable, Suite, VerifyOptions, GREENS_POINTS, GREENS_VISCOSITIES};
use mhdrelax::experiments::{check_hs_product_inequality, run_experiment, ExperimentConfig};
use mhdrelax::fields::{gradient, perp_gradient, InitKind, SpectralField};
use mhdrelax::lorentz::{centered_inverse_distance, corpus_field, lorentz_corpus, Rearrangement, STANDARD_CORPUS_SIZE};
use mhdrelax::report::InequalityTable;
use mhdrelax::stokes::{compare_with_oracle, observed_order, solve_stokes};
use mhdrelax::TorusGrid;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn greens_bound() -> Outcome {
    let t = GreensBoundTable::sweep(GREENS_POINTS, 0, &GREENS_VISCOSITIES).unwrap();
    outcome(
        t.violations() == 0 && t.rows.len() == GREENS_POINTS * 3,
        format!("{} points x nu in {:?}: {} violations, max ratio {:.6}", GREENS_POINTS, GREENS_VISCOSITIES, t.violations(), t.max_ratio()),
    )
}

fn weak_l2_inverse_distance() -> Outcome {
    let target = PI.sqrt();
    let errs: Vec<f64> = [128usize, 256, 512]
        .iter()
        .map(|&n| {
            let g = TorusGrid::<f64>::new(n).unwrap();
            let q = Rearrangement::of(&centered_inverse_distance(&g)).weak_lp(2.0).value;
            (q - target).abs() / target
        })
        .collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    outcome(
        errs[2] < 0.05 && monotone,
        format!("relative errors vs sqrt(pi) at n = 128/256/512: {:.3e} {:.3e} {:.3e}", errs[0], errs[1], errs[2]),
    )
}

fn energy_identity() -> Outcome {
    let c = ExperimentConfig::reference().with_param("convergence", 1);
    let r = run_experiment("ledger", &c).unwrap();
    let lines: Vec<String> = r.verdict.iter().map(|v| format!("{} = {:.3e}", v.name, v.value)).collect();
    outcome(r.passed(), lines.join(", "))
}

fn semi_discrete_cancellations() -> Outcome {
    let g = TorusGrid::<f64>::new(64).unwrap();
    let (mut t, mut s) = (0.0f64, 0.0f64);
    for seed in 0..100 {
        let (b, _) = corpus_field(&g, seed);
        let c = cancellations(&b, 1.0).unwrap();
        t = t.max(c.transport);
        s = s.max(c.stretching);
    }
    outcome(t < 1e-10 && s < 1e-10, format!("100 states at n = 64: transport {t:.2e}, stretching {s:.2e}"))
}

/// Tables whose ratio has no exact bound, compared across resolutions.
fn drifting_tables(tables: &[InequalityTable]) -> Vec<&InequalityTable> {
    let hard: Vec<&str> = mhdrelax::experiments::verify::HARD_LIMITS.iter().map(|h| h.0).collect();
    tables.iter().filter(|t| !hard.contains(&t.name.as_str())).collect()
}

fn hs_table(n: usize) -> InequalityTable {
    let g = TorusGrid::<f64>::new(n).unwrap();
    let mut t = InequalityTable::new("hs_product_s2");
    for seed in 0..STANDARD_CORPUS_SIZE {
        let (b, exponent) = corpus_field(&g, seed);
        let ratio = check_hs_product_inequality(&b, &b, 2).unwrap();
        t.rows.push(mhdrelax::report::InequalityRow { seed, exponent, lhs: ratio, rhs: 1.0, ratio });
    }
    t
}

fn inequality_corpus() -> Outcome {
    let opts = VerifyOptions::default();
    let coarse = run_suite(Suite::Dynamics, &opts).unwrap();
    let dbdt_ratio = coarse.table("dbdt_hminus1_bound").unwrap().max_ratio();
    let mut low = lorentz_corpus(64, 0..STANDARD_CORPUS_SIZE).unwrap();
    let mut high = lorentz_corpus(128, 0..STANDARD_CORPUS_SIZE).unwrap();
    low.push(coarse.table("hs_product_s2").unwrap().clone());
    high.push(hs_table(128));
    let mut ok = dbdt_ratio <= 1.0 + 1e-8 && !coarse.hard_failed();
    let mut worst = (String::new(), 0.0f64);
    for (a, b) in drifting_tables(&low).into_iter().zip(drifting_tables(&high)) {
        assert_eq!(a.name, b.name);
        let drift = (b.max_ratio() - a.max_ratio()).abs() / a.max_ratio();
        ok &= a.all_finite() && b.all_finite() && drift < 0.10;
        if drift.is_nan() || drift > worst.1 {
            worst = (a.name.clone(), drift);
        }
    }
    outcome(
        ok,
        format!(
            "1000 fields: max dB/dt H^-1 bound ratio {dbdt_ratio:.6}; {} drifting tables, largest drift {:.2}% ({})",
            drifting_tables(&low).len(),
            100.0 * worst.1,
            worst.0
        ),
    )
}

fn random_init(seed: u64, exponent: f64) -> InitKind {
    InitKind::RandomSobolev { seed, exponent, amplitude: 1.0 }
}

fn continuous_dependence() -> Outcome {
    let c = ExperimentConfig {
        n: 32,
        eta: 0.05,
        dt: 2e-3,
        init: random_init(11, 2.0),
        ..ExperimentConfig::reference()
    };
    let r = run_experiment("uniqueness", &c).unwrap();
    let lines: Vec<String> = r.verdict.iter().map(|v| format!("{} = {:.4}", v.name, v.value)).collect();
    outcome(r.passed(), lines.join(", "))
}

fn smoothing() -> Outcome {
    let c = ExperimentConfig {
        eta: 0.05,
        dt: 2e-3,
        init: random_init(11, 1.5),
        ..ExperimentConfig::reference()
    };
    let r = run_experiment("smoothing", &c).unwrap();
    let lines: Vec<String> = r.verdict.iter().map(|v| format!("{} = {:.4}", v.name, v.value)).collect();
    outcome(r.passed() && r.verdict.len() == 2, lines.join(", "))
}

fn stokes_manufactured() -> Outcome {
    let g = TorusGrid::<f64>::new(32).unwrap();
    let nu = 0.7;
    let psi = SpectralField::from_fn(&g, |x, y| (TAU * (2.0 * x + 3.0 * y)).sin());
    let p = SpectralField::from_fn(&g, |x, y| (TAU * (x - y)).cos());
    let u = perp_gradient(&psi);
    let mut forcing = u.laplacian().scaled(-nu);
    forcing.axpy(1.0, &gradient(&p));
    let sol = solve_stokes(&forcing, nu).unwrap();
    let round_trip = (&sol.u - &u).max_coeff_abs().max((&sol.p_star - &p).max_coeff_abs()) / u.max_coeff_abs();
    let runs: Vec<_> = [256usize, 512, 1024].iter().map(|&m| compare_with_oracle(m, 8.0, 0.5, 0.25, 1.0).unwrap()).collect();
    let order = observed_order(&runs);
    let err = runs[2].relative_error;
    outcome(
        round_trip < 1e-12 && err < 1e-3 && order >= 0.9,
        format!("single-mode round trip {round_trip:.2e}; free-space vs periodic oracle at h = 1/128: {err:.2e}, observed order {order:.2}"),
    )
}

fn relaxation() -> Outcome {
    let c = ExperimentConfig {
        eta: 1e-3,
        dt: 5e-3,
        t_end: 50.0,
        ..ExperimentConfig::reference()
    }
    .with_param("perturbation", 0.2);
    let r = run_experiment("relaxation", &c).unwrap();
    let lines: Vec<String> = r.verdict.iter().map(|v| format!("{} = {:.3e}", v.name, v.value)).collect();
    outcome(r.passed(), lines.join(", "))
}

fn main() {
    // `cargo test` passes harness flags; a name filter that matches nothing
    // here skips the suite.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filter.is_empty() && !filter.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    type Check = fn() -> Outcome;
    let criteria: [(&str, Duration, Check); 9] = [
        ("greens_gradient_bound", Duration::from_secs(1), greens_bound),
        ("weak_l2_inverse_distance", Duration::from_secs(10), weak_l2_inverse_distance),
        ("discrete_energy_identity", Duration::from_secs(60), energy_identity),
        ("semi_discrete_cancellations", Duration::from_secs(60), semi_discrete_cancellations),
        ("inequality_corpus", Duration::from_secs(15 * 60), inequality_corpus),
        ("continuous_dependence", Duration::from_secs(5 * 60), continuous_dependence),
        ("instantaneous_smoothing", Duration::from_secs(10 * 60), smoothing),
        ("stokes_manufactured_solution", Duration::from_secs(2 * 60), stokes_manufactured),
        ("relaxation_heuristic", Duration::from_secs(10 * 60), relaxation),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed < *budget;
        failed += usize::from(!pass);
        println!(
            "[{}] {} {name}: {} (runtime {:.1}s, budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
