//! Extracts the optimal linear witness from the dual of the Werner program
//! at `w = 1` and prints its JSON document.
//!
//! Run with `cargo run --release --example werner_witness`.

use steering_moments::moments::ObservabilityPolicy;
use steering_moments::pipeline::{detect, werner_scenario};
use steering_moments::witnesses::{witness_from_detection, witness_to_json};

fn main() -> steering_moments::Result<()> {
    let scenario = werner_scenario(1.0)?;
    let det = detect(&scenario, ObservabilityPolicy::Full, 1e-9)?;
    let w = witness_from_detection(&det, &scenario.id)?;
    println!("{}", witness_to_json(&w)?);

    // The witness stays non-negative below the threshold and is violated above it.
    for v in [0.5, 0.6, 0.8, 1.0] {
        let s = werner_scenario(v)?;
        let beta = w.evaluate_source(s.source.moments(), s.bob.names())?;
        println!("w = {v:.2}: witness value {beta:+.6}");
    }
    Ok(())
}
