//! Lossy N00N states: threshold scans in the loss parameter under the
//! local-restricted observability policy, for `N = 1` at two Fock
//! truncations and for `N = 2` with second-order quadratures.
//!
//! Run with `cargo run --release --example noon_scan`.

use steering_moments::moments::ObservabilityPolicy;
use steering_moments::pipeline::noon_scenario;
use steering_moments::witnesses::{threshold_scan, ScanSpec};

fn main() -> steering_moments::Result<()> {
    for (n, d) in [(1u32, 6usize), (1, 8), (2, 10)] {
        let spec = ScanSpec {
            param: "eta".into(),
            min: 0.5,
            max: 0.95,
            tol_param: 1e-3,
            solver_tol: 1e-8,
            policy: ObservabilityPolicy::LocalRestricted,
            jobs: 3,
        };
        let family = move |eta: f64| noon_scenario(n, eta, d, d);
        let report = threshold_scan(&family, &spec)?;
        println!(
            "N = {n}, d = {d}: eta_c = {:.4} (bracket [{:.4}, {:.4}], {} solves)",
            report.threshold,
            report.bracket[0],
            report.bracket[1],
            report.trace.len()
        );
    }
    Ok(())
}
