//! Locates the Werner steering threshold with the three-setting template and
//! compares it with the closed-form criteria.
//!
//! Run with `cargo run --release --example werner_threshold`.

use steering_moments::analytic::{pauli_nonlinear_criterion, PauliCorrelations};
use steering_moments::moments::ObservabilityPolicy;
use steering_moments::pipeline::{detect, werner_scenario};
use steering_moments::witnesses::{threshold_scan, ScanSpec};

fn main() -> steering_moments::Result<()> {
    let tol = 1e-8;
    println!(
        "{:>6} {:>14} {:>14} {:>12}",
        "w", "lambda*", "1 - sqrt3 w", "nonlinear"
    );
    for i in 0..=6 {
        let w = 0.3 + 0.1 * i as f64;
        let det = detect(&werner_scenario(w)?, ObservabilityPolicy::Full, tol)?;
        let crit = pauli_nonlinear_criterion(&PauliCorrelations::werner(w)?);
        println!(
            "{w:>6.2} {:>14.6e} {:>14.6e} {:>12}",
            det.solution.lambda_star,
            1.0 - 3f64.sqrt() * w,
            if crit.steering { "steering" } else { "-" }
        );
    }

    let spec = ScanSpec {
        param: "w".into(),
        min: 0.3,
        max: 0.9,
        tol_param: 1e-4,
        solver_tol: tol,
        policy: ObservabilityPolicy::Full,
        jobs: 3,
    };
    let report = threshold_scan(&werner_scenario, &spec)?;
    println!(
        "threshold {:.6} (bracket [{:.6}, {:.6}], {} solves); 1/sqrt(3) = {:.6}",
        report.threshold,
        report.bracket[0],
        report.bracket[1],
        report.trace.len(),
        1.0 / 3f64.sqrt()
    );
    Ok(())
}
