//! Two-mode squeezed vacuum: the determinant criterion, the uncertainty
//! criterion, completability of the 4×4 moment matrix, and the semidefinite
//! pipeline side by side.
//!
//! Run with `cargo run --release --example gaussian_criteria`.

use steering_moments::analytic::{
    gaussian_det_criterion, gaussian_exists_r, gaussian_wiseman_criterion,
};
use steering_moments::moments::ObservabilityPolicy;
use steering_moments::pipeline::{detect, gaussian_scenario};
use steering_moments::scenarios::{two_mode_squeezed_std_form, GaussianStdForm};

fn main() -> steering_moments::Result<()> {
    println!(
        "{:>5} {:>12} {:>12} {:>10} {:>14}",
        "r", "det", "min eig", "exists R", "sdp decision"
    );
    for i in 0..=6 {
        let r = 0.25 * i as f64;
        let g = two_mode_squeezed_std_form(r)?;
        let det = gaussian_det_criterion(&g)?;
        let wis = gaussian_wiseman_criterion(&g)?;
        let sdp = detect(&gaussian_scenario(g)?, ObservabilityPolicy::Full, 1e-8)?;
        println!(
            "{r:>5.2} {:>12.4e} {:>12.4e} {:>10} {:>14}",
            det.value,
            wis.value,
            gaussian_exists_r(&g),
            sdp.decision
        );
    }

    // A correlated but unsteerable state: thermal noise on Alice's side.
    let g = GaussianStdForm::new(5.0, 2.0, 1.0, -1.0)?;
    println!(
        "a=5 b=2 c=(1,-1): det {:.3}, steering {}",
        gaussian_det_criterion(&g)?.value,
        gaussian_det_criterion(&g)?.steering
    );
    Ok(())
}
