//! Soundness check on random local-hidden-state assemblages: the level-2
//! program never reports steering, and a witness extracted on steerable
//! data stays non-negative on unsteerable data of the same shape.
//!
//! Run with `cargo run --release --example unsteerable_models`.

use steering_moments::moments::ObservabilityPolicy;
use steering_moments::pipeline::{assemblage_scenario, detect, Decision};
use steering_moments::scenarios::random_unsteerable_assemblage;

fn main() -> steering_moments::Result<()> {
    let mut worst = f64::INFINITY;
    let mut counts = [0usize; 3];
    for seed in 0..40u64 {
        let n_inputs = 2 + (seed % 2) as usize;
        let dim_b = 2 + ((seed / 2) % 2) as usize;
        let (asm, _) = random_unsteerable_assemblage(n_inputs, 2, dim_b, 4, seed)?;
        let sc = assemblage_scenario(&format!("lhs-{seed}"), asm, None, 2)?;
        let det = detect(&sc, ObservabilityPolicy::Full, 1e-8)?;
        worst = worst.min(det.solution.lambda_star);
        counts[match det.decision {
            Decision::Steering => 0,
            Decision::NoDetection => 1,
            Decision::Inconclusive => 2,
        }] += 1;
    }
    println!(
        "40 random unsteerable assemblages: {} steering, {} no-detection, {} inconclusive; smallest lambda* {worst:.3e}",
        counts[0], counts[1], counts[2]
    );
    Ok(())
}
