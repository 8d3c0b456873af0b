use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::analytic::{
    gaussian_det_criterion, gaussian_exists_r, gaussian_wiseman_criterion, pauli_linear_witness,
    pauli_nonlinear_criterion, pauli_two_setting_criteria, PauliCorrelations,
};
use crate::error::{Error, Result};
use crate::pipeline::{detect, Decision};
use crate::scenarios::{two_mode_squeezed_std_form, GaussianStdForm};
use crate::sdp::{Certificate, SolveStatus};
use crate::tolerances;
use crate::witnesses::{
    photon_fixture_witness, threshold_scan, witness_from_detection, witness_from_json,
    witness_to_json, ScanReport, ScanSpec, Witness,
};

use super::config::{build_scenario, RunConfig};
use super::{AnalyticArgs, Cli, Command, WitnessCommand};

/// Certificate verification outcome as recorded in reports.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CertificateSummary {
    Verified(Certificate),
    Rejected { reason: String },
}

/// Result of `solve`: everything except wall-clock times, so identical
/// inputs give byte-identical files.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    /// Effective configuration (command-line overrides applied).
    pub config: RunConfig,
    pub scenario: String,
    pub n_strings: usize,
    pub n_free: usize,
    pub solver_status: String,
    pub iterations: usize,
    /// Structural optimum.
    pub lambda_star: f64,
    /// Face-reduced optimum when the face reduction ran; `null` inside means
    /// the data admit no completion at all.
    pub lambda_face: Option<Option<f64>>,
    /// Dual bound of the structural program.
    pub beta_star: f64,
    pub duality_gap: f64,
    pub decision: Decision,
    pub certificate: CertificateSummary,
    /// Witness document written alongside, when the certificate verified.
    pub witness_path: Option<String>,
}

/// Wall-clock times in milliseconds, written to a separate sidecar file.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub build_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn effective(cli: &Cli, path: &Path) -> Result<(RunConfig, u64, f64)> {
    let mut cfg = RunConfig::load(path)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    let seed = cfg.seed.unwrap_or(0);
    let tol = cfg.tol.unwrap_or(tolerances::SDP_DEFAULT);
    Ok((cfg, seed, tol))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// Runs the pipeline on a configuration; writes the witness document to
/// `witness_out` when the dual certificate verifies.
pub fn run_solve(
    cfg: &RunConfig,
    seed: u64,
    tol: f64,
    witness_out: Option<&Path>,
) -> Result<(SolveReport, Timings, Option<Witness>)> {
    let t0 = Instant::now();
    let scenario = build_scenario(cfg, seed)?;
    let build_ms = ms(t0);
    let t1 = Instant::now();
    let det = detect(&scenario, cfg.policy, tol)?;
    let solve_ms = ms(t1);
    let (certificate, witness) = match &det.certificate {
        Ok(c) => (
            CertificateSummary::Verified(c.clone()),
            Some(witness_from_detection(&det, &scenario.id)?),
        ),
        Err(reason) => (
            CertificateSummary::Rejected {
                reason: reason.clone(),
            },
            None,
        ),
    };
    let mut witness_path = None;
    if let (Some(w), Some(path)) = (&witness, witness_out) {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, witness_to_json(w)?)?;
        witness_path = Some(path.display().to_string());
    }
    let report = SolveReport {
        config: cfg.clone(),
        scenario: scenario.id.clone(),
        n_strings: det.template.k(),
        n_free: det.template.n_free(),
        solver_status: match det.solution.status {
            SolveStatus::Optimal => "optimal".into(),
            SolveStatus::NumericalTrouble => "numerical-trouble".into(),
        },
        iterations: det.solution.iterations,
        lambda_star: det.solution.lambda_star,
        lambda_face: det.face.as_ref().map(|f| f.lambda),
        beta_star: det.solution.beta,
        duality_gap: det.solution.duality_gap,
        decision: det.decision,
        certificate,
        witness_path,
    };
    Ok((
        report,
        Timings {
            build_ms,
            solve_ms,
            total_ms: ms(t0),
        },
        witness,
    ))
}

/// Threshold scan of one configuration parameter.
pub fn run_scan(cfg: &RunConfig, seed: u64, spec: &ScanSpec) -> Result<ScanReport> {
    cfg.scenario.with_param(&spec.param, spec.min)?;
    let family = |v: f64| {
        let mut c = cfg.clone();
        c.scenario = cfg.scenario.with_param(&spec.param, v)?;
        build_scenario(&c, seed)
    };
    threshold_scan(&family, spec)
}

fn pauli_input(a: &AnalyticArgs) -> Result<PauliCorrelations> {
    match (a.w, a.cxx, a.cyy, a.czz) {
        (Some(w), None, None, None) => PauliCorrelations::werner(w),
        (None, Some(x), Some(y), Some(z)) => PauliCorrelations::new(x, y, z),
        _ => Err(Error::Config(
            "Pauli criteria need either --w or all of --cxx --cyy --czz".into(),
        )),
    }
}

fn gaussian_input(a: &AnalyticArgs) -> Result<GaussianStdForm> {
    match (a.r, a.a, a.b, a.c1, a.c2) {
        (Some(r), None, None, None, None) => two_mode_squeezed_std_form(r),
        (None, Some(x), Some(y), Some(c1), Some(c2)) => GaussianStdForm::new(x, y, c1, c2),
        _ => Err(Error::Config(
            "Gaussian criteria need either --r or all of --a --b --c1 --c2".into(),
        )),
    }
}

/// Evaluates a named closed-form criterion as one JSON line.
pub fn analytic_line(a: &AnalyticArgs) -> Result<String> {
    let value = match a.name.as_str() {
        "pauli-linear" => json!(pauli_linear_witness(&pauli_input(a)?)),
        "pauli-nonlinear" => json!(pauli_nonlinear_criterion(&pauli_input(a)?)),
        "pauli-two-setting" => {
            let [yz, xz, xy] = pauli_two_setting_criteria(&pauli_input(a)?);
            json!({ "yz": yz, "xz": xz, "xy": xy, "steering": yz.steering || xz.steering || xy.steering })
        }
        "gaussian-det" => json!(gaussian_det_criterion(&gaussian_input(a)?)?),
        "gaussian-wiseman" => json!(gaussian_wiseman_criterion(&gaussian_input(a)?)?),
        "gaussian-exists-r" => {
            let g = gaussian_input(a)?;
            if !g.is_physical() {
                return Err(Error::InvalidParameter(
                    "unphysical Gaussian standard form".into(),
                ));
            }
            let exists = gaussian_exists_r(&g);
            json!({ "completable": exists, "steering": !exists })
        }
        other => return Err(Error::Config(format!("unknown criterion {other:?}"))),
    };
    Ok(json!({ "criterion": a.name, "result": value }).to_string())
}

fn load_witness(spec: &str) -> Result<Witness> {
    if spec == "builtin:fixture" {
        Ok(photon_fixture_witness())
    } else {
        witness_from_json(&std::fs::read_to_string(spec)?)
    }
}

pub(super) fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Solve { config } => {
            let (cfg, seed, tol) = effective(cli, config)?;
            let witness_out = cli.out.join("witness.json");
            let (report, timings, _) = run_solve(&cfg, seed, tol, Some(&witness_out))?;
            write_json(&cli.out.join("report.json"), &report)?;
            write_json(&cli.out.join("timings.json"), &timings)?;
            println!("scenario      {}", report.scenario);
            println!(
                "strings       {} ({} free parameters)",
                report.n_strings, report.n_free
            );
            println!("lambda*       {:.6e}", report.lambda_star);
            if let Some(face) = report.lambda_face {
                match face {
                    Some(l) => println!("lambda (face) {l:.6e}"),
                    None => println!("lambda (face) infeasible: data admit no completion"),
                }
            }
            println!("duality gap   {:.3e}", report.duality_gap);
            println!("decision      {}", report.decision);
            println!("report        {}", cli.out.join("report.json").display());
            Ok(())
        }
        Command::Scan {
            config,
            param,
            min,
            max,
            tol,
        } => {
            let (cfg, seed, solver_tol) = effective(cli, config)?;
            let spec = ScanSpec {
                param: param.clone(),
                min: *min,
                max: *max,
                tol_param: *tol,
                solver_tol,
                policy: cfg.policy,
                jobs: cli.jobs.max(1),
            };
            let t0 = Instant::now();
            let report = run_scan(&cfg, seed, &spec)?;
            let path = cli.out.join("scan.json");
            write_json(&path, &json!({ "config": cfg, "scan": report }))?;
            write_json(
                &cli.out.join("timings.json"),
                &json!({ "total_ms": ms(t0) }),
            )?;
            println!(
                "{} threshold {:.6} in [{:.6}, {:.6}] ({} evaluations, steering {} threshold)",
                report.param,
                report.threshold,
                report.bracket[0],
                report.bracket[1],
                report.trace.len(),
                if report.detected_above {
                    "above"
                } else {
                    "below"
                }
            );
            println!("report {}", path.display());
            Ok(())
        }
        Command::Witness(WitnessCommand::Extract { config, output }) => {
            let (cfg, seed, tol) = effective(cli, config)?;
            let path: PathBuf = output
                .clone()
                .unwrap_or_else(|| cli.out.join("witness.json"));
            let (report, _, witness) = run_solve(&cfg, seed, tol, Some(&path))?;
            let w = witness.ok_or_else(|| match &report.certificate {
                CertificateSummary::Rejected { reason } => Error::Certificate(reason.clone()),
                CertificateSummary::Verified(_) => Error::Certificate("no witness produced".into()),
            })?;
            println!(
                "beta* {:.6e} ({} terms, constant {:.6})",
                w.provenance.beta,
                w.terms.len(),
                w.constant
            );
            println!("witness {}", path.display());
            Ok(())
        }
        Command::Witness(WitnessCommand::Eval { witness, config }) => {
            let (cfg, seed, _) = effective(cli, config)?;
            let w = load_witness(witness)?;
            let scenario = build_scenario(&cfg, seed)?;
            let beta = w.evaluate_source(scenario.source.moments(), scenario.bob.names())?;
            println!(
                "{}",
                json!({ "scenario": scenario.id, "beta": beta, "violated": beta < 0.0 })
            );
            Ok(())
        }
        Command::Analytic(args) => {
            println!("{}", analytic_line(args)?);
            Ok(())
        }
    }
}
