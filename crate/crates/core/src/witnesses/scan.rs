use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::ObservabilityPolicy;
use crate::pipeline::{detect, Decision, Scenario};

/// Bisection settings for [`threshold_scan`].
#[derive(Clone, Debug)]
pub struct ScanSpec {
    /// Name of the scanned parameter (for reports).
    pub param: String,
    /// Lower end of the range.
    pub min: f64,
    /// Upper end of the range.
    pub max: f64,
    /// Target width of the final bracket.
    pub tol_param: f64,
    /// Solver tolerance.
    pub solver_tol: f64,
    /// Observability policy.
    pub policy: ObservabilityPolicy,
    /// Points evaluated concurrently per round (1 = plain bisection).
    pub jobs: usize,
}

/// One evaluated parameter value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    /// Parameter value.
    pub value: f64,
    /// Structural optimum `λ⋆`.
    pub lambda_star: f64,
    /// Face-reduced optimum, when the face reduction ran (`null` when the
    /// kernel condition was infeasible).
    pub lambda_face: Option<Option<f64>>,
    /// Decision at this point.
    pub decision: Decision,
    /// Whether the structural dual certificate verified.
    pub certified: bool,
    /// Duality gap of the structural solve.
    pub duality_gap: f64,
}

impl ScanPoint {
    fn detected(&self) -> bool {
        self.decision == Decision::Steering
    }
}

/// Bracketing history and the located threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    /// Scanned parameter.
    pub param: String,
    /// Midpoint of the final bracket.
    pub threshold: f64,
    /// Final bracket `[lo, hi]`.
    pub bracket: [f64; 2],
    /// Whether steering is detected above (true) or below the threshold.
    pub detected_above: bool,
    /// Every evaluation in order: the two endpoints, then each round.
    pub trace: Vec<ScanPoint>,
}

fn evaluate(
    family: &(dyn Fn(f64) -> Result<Scenario> + Sync),
    v: f64,
    spec: &ScanSpec,
) -> Result<ScanPoint> {
    let d = detect(&family(v)?, spec.policy, spec.solver_tol)?;
    Ok(ScanPoint {
        value: v,
        lambda_star: d.solution.lambda_star,
        lambda_face: d.face.as_ref().map(|f| f.lambda),
        decision: d.decision,
        certified: d.certificate.is_ok(),
        duality_gap: d.solution.duality_gap,
    })
}

/// Locates the parameter value where the detection decision flips.
///
/// The endpoints must disagree (one detects steering, the other does not;
/// inconclusive points count as not detected), otherwise the scan fails
/// with a bracketing error. Each round evaluates `jobs` equally spaced
/// interior points concurrently and keeps the sub-interval containing the
/// first flip, so the trace depends only on the inputs, not on thread
/// timing.
pub fn threshold_scan(
    family: &(dyn Fn(f64) -> Result<Scenario> + Sync),
    spec: &ScanSpec,
) -> Result<ScanReport> {
    if spec.min.is_nan()
        || spec.max.is_nan()
        || spec.min >= spec.max
        || !spec.tol_param.is_finite()
        || spec.tol_param <= 0.0
    {
        return Err(Error::Config(
            "scan needs min < max and a positive tolerance".into(),
        ));
    }
    let jobs = spec.jobs.max(1);
    let lo_pt = evaluate(family, spec.min, spec)?;
    let hi_pt = evaluate(family, spec.max, spec)?;
    let detected_above = hi_pt.detected();
    if lo_pt.detected() == hi_pt.detected() {
        return Err(Error::Bracketing(format!(
            "no threshold in [{}, {}]: both endpoints {}",
            spec.min,
            spec.max,
            if hi_pt.detected() {
                "detect steering"
            } else {
                "show no detection"
            }
        )));
    }
    let mut trace = vec![lo_pt, hi_pt];
    let (mut lo, mut hi) = (spec.min, spec.max);
    while hi - lo > spec.tol_param {
        let pts: Vec<f64> = (1..=jobs)
            .map(|i| lo + (hi - lo) * i as f64 / (jobs + 1) as f64)
            .collect();
        let results: Vec<Result<ScanPoint>> = if jobs == 1 {
            vec![evaluate(family, pts[0], spec)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = pts
                    .iter()
                    .map(|&v| s.spawn(move || evaluate(family, v, spec)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| {
                        h.join().unwrap_or_else(|_| {
                            Err(Error::Numerical("scan worker panicked".into()))
                        })
                    })
                    .collect()
            })
        };
        let round = results.into_iter().collect::<Result<Vec<_>>>()?;
        // first point on the detected side determines the new bracket
        let mut new_lo = lo;
        let mut new_hi = hi;
        if detected_above {
            for p in &round {
                if p.detected() {
                    new_hi = p.value;
                    break;
                }
                new_lo = p.value;
            }
        } else {
            for p in &round {
                if !p.detected() {
                    new_hi = p.value;
                    break;
                }
                new_lo = p.value;
            }
        }
        lo = new_lo;
        hi = new_hi;
        trace.extend(round);
    }
    Ok(ScanReport {
        param: spec.param.clone(),
        threshold: 0.5 * (lo + hi),
        bracket: [lo, hi],
        detected_above,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::werner_scenario;

    fn spec(jobs: usize, min: f64, max: f64) -> ScanSpec {
        ScanSpec {
            param: "w".into(),
            min,
            max,
            tol_param: 1e-3,
            solver_tol: 1e-8,
            policy: ObservabilityPolicy::Full,
            jobs,
        }
    }

    #[test]
    fn werner_threshold_and_reproducibility() {
        let f = |w: f64| werner_scenario(w);
        let a = threshold_scan(&f, &spec(1, 0.3, 0.9)).unwrap();
        assert!((a.threshold - 1.0 / 3f64.sqrt()).abs() < 1e-3);
        assert!(a.detected_above);
        assert_eq!(a, threshold_scan(&f, &spec(1, 0.3, 0.9)).unwrap());
        let b = threshold_scan(&f, &spec(3, 0.3, 0.9)).unwrap();
        assert!((b.threshold - 1.0 / 3f64.sqrt()).abs() < 1e-3);
        assert_eq!(b, threshold_scan(&f, &spec(3, 0.3, 0.9)).unwrap());
    }

    #[test]
    fn no_threshold_in_range() {
        let f = |w: f64| werner_scenario(w);
        assert!(matches!(
            threshold_scan(&f, &spec(1, 0.7, 0.9)),
            Err(Error::Bracketing(_))
        ));
    }
}
