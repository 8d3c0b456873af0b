//! Compiles the lossy single-photon template, prints its unknown
//! classification, and writes the structural program in SDPA sparse format
//! for cross-checking with an external solver.
//!
//! Run with `cargo run --release --example sdpa_export [-- out.dat-s]`.

use steering_moments::moments::ObservabilityPolicy;
use steering_moments::pipeline::noon_scenario;
use steering_moments::sdp::{write_sdpa, SdpProblem};

fn main() -> steering_moments::Result<()> {
    let sc = noon_scenario(1, 0.75, 6, 6)?;
    let template = sc.template(ObservabilityPolicy::LocalRestricted)?;
    println!("{}", serde_json::to_string_pretty(&template.debug_dump())?);
    let rows = template.independent_rows().to_vec();
    let problem = SdpProblem::from_export(&template.export(&rows))?;
    let text = write_sdpa(&problem);
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &text)?;
            println!("wrote {path} ({} free parameters)", problem.n_free());
        }
        None => print!("{text}"),
    }
    Ok(())
}
