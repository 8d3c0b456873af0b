//! Evaluates the bundled single-photon witness (four-decimal
//! coefficients) on the lossy single-photon state across the loss range.
//!
//! Run with `cargo run --release --example photon_witness`.

use steering_moments::witnesses::{fixture_noon_source, photon_fixture_witness, witness_to_json};

fn main() -> steering_moments::Result<()> {
    let w = photon_fixture_witness();
    println!("{}", witness_to_json(&w)?);
    for i in 0..=8 {
        let eta = 0.6 + 0.05 * i as f64;
        let (src, names) = fixture_noon_source(eta, 8)?;
        println!(
            "eta = {eta:.2}: beta = {:+.6}",
            w.evaluate_source(&src, &names)?
        );
    }
    Ok(())
}
