use crate::error::Result;
use crate::moments::StateSource;
use crate::operators::{generalized_quadratures, C64};
use crate::scenarios::{lossy_noon_state, measurement_from_observable};

use super::witness::{BobRef, Provenance, Witness, WitnessTerm};

/// The bundled witness for the lossy single-photon state (eleven-string
/// set, Alice–Bob mixed moments with long Bob words unobserved), optimized
/// at `η = 0.67` and transcribed with its four-decimal coefficients:
///
/// ```text
/// β = 8.1657 − (⟨A0 q⟩ + ⟨A1 p⟩) + 0.2508 (⟨A0 q³⟩ + ⟨A1 p³⟩)
///     − 0.3110 (⟨A0²⟩ + ⟨A1²⟩) + 0.3205 (⟨A0² q²⟩ + ⟨A1² p²⟩)
///     + 0.3020 (⟨A0² p²⟩ + ⟨A1² q²⟩) − 0.0001 (⟨A0³ q⟩ + ⟨A1³ p⟩)
///     + 7.7217 (⟨q⁴⟩ + ⟨p⁴⟩) + 15.5451 ⟨q² p²⟩ − 31.0941 (⟨q²⟩ + ⟨p²⟩)
///     − 31.0903 i ⟨q p⟩  ≥ 0
/// ```
///
/// Inputs are `A0` (x = 0) and `A1` (x = 1); Bob's operators are named `q`
/// and `p`. The coefficients are kept unnormalized (scale 1).
pub fn photon_fixture_witness() -> Witness {
    let r = |v: f64| C64::new(v, 0.0);
    let w = |s: &[&str]| BobRef::Word(s.iter().map(|n| n.to_string()).collect());
    let mut terms = Vec::new();
    let mut pair = |c: C64, power: u32, b0: &[&str], b1: &[&str]| {
        terms.push(WitnessTerm {
            x: Some(0),
            power,
            bob: w(b0),
            coeff: c,
        });
        terms.push(WitnessTerm {
            x: Some(1),
            power,
            bob: w(b1),
            coeff: c,
        });
    };
    pair(r(-1.0), 1, &["q"], &["p"]);
    pair(r(0.2508), 1, &["q", "q", "q"], &["p", "p", "p"]);
    pair(r(-0.3110), 2, &[], &[]);
    pair(r(0.3205), 2, &["q", "q"], &["p", "p"]);
    pair(r(0.3020), 2, &["p", "p"], &["q", "q"]);
    pair(r(-0.0001), 3, &["q"], &["p"]);
    let local = |c: C64, b: &[&str]| WitnessTerm {
        x: None,
        power: 0,
        bob: w(b),
        coeff: c,
    };
    terms.push(local(r(7.7217), &["q", "q", "q", "q"]));
    terms.push(local(r(7.7217), &["p", "p", "p", "p"]));
    terms.push(local(r(15.5451), &["q", "q", "p", "p"]));
    terms.push(local(r(-31.0941), &["q", "q"]));
    terms.push(local(r(-31.0941), &["p", "p"]));
    terms.push(local(C64::new(0.0, -31.0903), &["q", "p"]));
    Witness {
        terms,
        constant: 8.1657,
        provenance: Provenance {
            scenario: "bundled lossy single-photon witness (eta = 0.67)".into(),
            policy: "local-restricted".into(),
            string_set: vec![
                "1".into(),
                "A0·q".into(),
                "A0·p".into(),
                "A1·q".into(),
                "A1·p".into(),
                "A0^2".into(),
                "A1^2".into(),
                "q·q".into(),
                "q·p".into(),
                "p·q".into(),
                "p·p".into(),
            ],
            solver_tol: 1e-4,
            scale: 1.0,
            beta: -8.88e-4,
        },
    }
}

/// Data on which the bundled witness is evaluated: the lossy
/// single-photon state on `d` Fock levels, Bob's quadratures named `q`, `p`,
/// and Alice's quadrature measurements with outcome labels negated
/// (`a ↦ −a`).
///
/// The sign flip matches the relative phase convention of the bundled
/// coefficients: with `|N00N⟩ = (|10⟩ − |01⟩)/√2` the correlations
/// `⟨A0 q⟩`, `⟨A1 p⟩` are negative, while the witness's linear term
/// `−(⟨A0 q⟩ + ⟨A1 p⟩)` is violated only for positive correlations. Relabeling
/// Alice's untrusted outcomes is a free local choice and leaves the
/// steerability of the data unchanged.
pub fn fixture_noon_source(eta: f64, d: usize) -> Result<(StateSource, Vec<String>)> {
    let state = lossy_noon_state(1, eta, d)?;
    let (q, p) = generalized_quadratures(1, d)?;
    let ms = vec![
        measurement_from_observable(&q)?.scaled(-1.0),
        measurement_from_observable(&p)?.scaled(-1.0),
    ];
    Ok((
        StateSource::new(state, ms, vec![q, p])?,
        vec!["q".into(), "p".into()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shape() {
        let w = photon_fixture_witness();
        assert_eq!(w.terms.len(), 18);
        assert_eq!(w.constant, 8.1657);
    }

    #[test]
    fn fixture_violations() {
        let w = photon_fixture_witness();
        let (src, names) = fixture_noon_source(1.0, 8).unwrap();
        let b1 = w.evaluate_source(&src, &names).unwrap();
        assert!((b1 + 0.1556).abs() < 5e-3, "{b1}");
        let (src, names) = fixture_noon_source(0.67, 8).unwrap();
        let b = w.evaluate_source(&src, &names).unwrap();
        assert!((b + 8.88e-4).abs() < 2e-3, "{b}");
    }
}
