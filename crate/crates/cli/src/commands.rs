//! The six subcommands. Each produces a JSON report (written to `--out`,
//! or stdout when no output path is given) and a one-line human summary;
//! exit codes are 0 for a clean pass, 1 for a failed check or rejection,
//! 2 for malformed input, 3 for inconclusive rank stabilization.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use polyhg::hypergroup::AxiomReport;
use polyhg::sweeps::{check_equation, Counterexample, EquationSpec, Mode};
use polyhg::synthesis::{default_box, moment_span_decompose};
use polyhg::{HFunction, Hypergroup, MomentFamily, Scalar};

use crate::schema::{
    self, hfunction_from_json, hfunction_to_json, measure_from_json, measure_to_json,
    poly_from_json, poly_to_json, HFunctionJson, HypergroupSpec, MeasureJson, PolyJson, ScalarJson,
};
use crate::{CliError, Common};

pub fn load_spec(path: &Path) -> Result<HypergroupSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed spec {}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed file {}: {e}", path.display())))
}

/// Writes the report to `--out` (summary goes to stdout), or prints the
/// JSON itself when no output path is set.
fn emit<T: Serialize>(common: &Common, report: &T, summary: &str) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    match &common.out {
        Some(path) => {
            fs::write(path, json.as_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            println!("{summary}");
            println!("report written to {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn mode_of(common: &Common) -> Result<Mode, CliError> {
    match common.mode.as_str() {
        "exact" => Ok(Mode::Exact),
        "float" => {
            if common.tol <= 0.0 {
                return Err(CliError::Usage("tolerance must be positive".into()));
            }
            Ok(Mode::Float { tol: common.tol })
        }
        other => Err(CliError::Usage(format!(
            "unknown mode {other:?} (use exact or float)"
        ))),
    }
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyReport {
    #[serde(rename = "box")]
    box_n: usize,
    pass: bool,
    checks: Vec<CheckEntry>,
}

#[derive(Serialize)]
struct CheckEntry {
    name: String,
    pass: bool,
    checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

pub fn cmd_verify(common: &Common) -> Result<i32, CliError> {
    let spec = load_spec(&common.spec)?;
    // certification happens inside the sweep so that sign violations come
    // back as report entries with witnesses instead of construction errors
    let hg = spec.build(0)?;
    let report = run_verify(&hg, common.box_n, common.jobs)?;
    let pass = report.pass();
    let json = VerifyReport {
        box_n: report.box_n,
        pass,
        checks: report
            .checks
            .iter()
            .map(|c| CheckEntry {
                name: c.name.to_string(),
                pass: c.pass,
                checked: c.checked,
                detail: c.detail.clone(),
            })
            .collect(),
    };
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name)
        .collect();
    let summary = if pass {
        format!(
            "verify: all {} checks pass on box {}",
            report.checks.len(),
            report.box_n
        )
    } else {
        format!("verify: FAILED ({})", failed.join(", "))
    };
    emit(common, &json, &summary)?;
    if !pass {
        if let Some(witness) = report
            .checks
            .iter()
            .filter_map(|c| c.detail.as_ref())
            .next()
        {
            eprintln!("witness: {witness}");
        }
    }
    Ok(if pass { 0 } else { 1 })
}

fn run_verify(hg: &Arc<Hypergroup>, box_n: usize, jobs: usize) -> Result<AxiomReport, CliError> {
    if jobs <= 1 {
        return hg.verify_axioms(box_n).map_err(CliError::from_core);
    }
    let parts: Vec<Result<AxiomReport, polyhg::Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|chunk| scope.spawn(move || hg.verify_axioms_chunk(box_n, chunk, jobs)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verify worker panicked"))
            .collect()
    });
    let parts = parts
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::from_core)?;
    Ok(AxiomReport::merge(parts))
}

// ------------------------------------------------------------------ conv

pub fn cmd_conv(common: &Common, x: &str, y: &str) -> Result<i32, CliError> {
    let spec = load_spec(&common.spec)?;
    // parse against a cheap build to learn the dimension
    let dim = spec.build(0)?.dim();
    let x = schema::parse_element(x, dim)?;
    let y = schema::parse_element(y, dim)?;
    let needed = x
        .entries()
        .iter()
        .chain(y.entries())
        .copied()
        .max()
        .unwrap_or(0) as usize;
    let hg = spec.build(needed)?;
    let conv = hg.linearization(&x, &y).map_err(CliError::from_core)?;
    let json: MeasureJson = measure_to_json(&conv);
    let summary = format!(
        "conv: δ_{x} * δ_{y} has {} support points",
        conv.support_size()
    );
    emit(common, &json, &summary)?;
    Ok(0)
}

// --------------------------------------------------------------- fourier

pub fn cmd_fourier(
    common: &Common,
    measure: Option<&Path>,
    invert: Option<&Path>,
) -> Result<i32, CliError> {
    let spec = load_spec(&common.spec)?;
    match (measure, invert) {
        (Some(path), None) => {
            let json: MeasureJson = load_json(path)?;
            let hg = spec.build(common.box_n)?;
            let mu = measure_from_json(&json, &hg)?;
            let p = mu.fourier().map_err(CliError::from_core)?;
            let out = poly_to_json(&p);
            let summary = format!("fourier: polynomial with {} terms", p.num_terms());
            emit(common, &out, &summary)?;
            Ok(0)
        }
        (None, Some(path)) => {
            let json: PolyJson = load_json(path)?;
            let p = poly_from_json(&json)?;
            let hg = spec.build(common.box_n)?;
            if p.dim() != hg.dim() {
                return Err(CliError::Usage(format!(
                    "polynomial dimension {} does not match hypergroup dimension {}",
                    p.dim(),
                    hg.dim()
                )));
            }
            let mu = polyhg::measures::inverse_fourier(&p, &hg).map_err(CliError::from_core)?;
            let out: MeasureJson = measure_to_json(&mu);
            let summary = format!("fourier: measure with {} support points", mu.support_size());
            emit(common, &out, &summary)?;
            Ok(0)
        }
        _ => Err(CliError::Usage(
            "pass exactly one of --measure <file> or --invert <polynomial file>".into(),
        )),
    }
}

// -------------------------------------------------------------- check-eq

#[derive(Serialize)]
struct CheckEqReport {
    kind: String,
    #[serde(rename = "box")]
    box_n: usize,
    mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    pass: bool,
    checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<CounterexampleJson>,
}

#[derive(Serialize)]
struct CounterexampleJson {
    x: Vec<u32>,
    ys: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<u32>>,
    lhs: ScalarJson,
    rhs: ScalarJson,
}

fn counterexample_json(c: &Counterexample) -> CounterexampleJson {
    CounterexampleJson {
        x: c.x.entries().to_vec(),
        ys: c.ys.iter().map(|y| y.entries().to_vec()).collect(),
        alpha: c.alpha.as_ref().map(|a| a.entries().to_vec()),
        lhs: ScalarJson::from_scalar(&c.lhs),
        rhs: ScalarJson::from_scalar(&c.rhs),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_check_eq(
    common: &Common,
    kind: &str,
    lambda: Option<&str>,
    m_lambda: Option<&str>,
    sine_coeffs: Option<&str>,
    cap: Option<&str>,
    function: Option<&Path>,
    degree: Option<usize>,
    trials: usize,
) -> Result<i32, CliError> {
    let spec = load_spec(&common.spec)?;
    let hg = spec.build(common.box_n)?;
    let dim = hg.dim();
    let mode = mode_of(common)?;
    let point = |src: Option<&str>, name: &str| -> Result<Vec<Scalar>, CliError> {
        let s = src.ok_or_else(|| CliError::Usage(format!("--{name} is required")))?;
        let p = schema::parse_point(s)?;
        if p.len() != dim {
            return Err(CliError::Usage(format!(
                "--{name} has {} coordinates, hypergroup dimension is {dim}",
                p.len()
            )));
        }
        Ok(p)
    };

    let report = match kind {
        "exponential" => {
            let m = HFunction::exponential(hg.clone(), point(lambda, "lambda")?);
            check_equation(EquationSpec::Exponential { m: &m }, common.box_n, mode)
        }
        "sine" => {
            let lam = point(lambda, "lambda")?;
            let coeffs = schema::parse_point(
                sine_coeffs.ok_or_else(|| CliError::Usage("--coeffs is required".into()))?,
            )?;
            if coeffs.len() != dim {
                return Err(CliError::Usage(format!(
                    "--coeffs has {} entries, hypergroup dimension is {dim}",
                    coeffs.len()
                )));
            }
            let s = HFunction::sine(hg.clone(), &coeffs, lam.clone());
            let m_point = match m_lambda {
                Some(_) => point(m_lambda, "m-lambda")?,
                None => lam,
            };
            let m = HFunction::exponential(hg.clone(), m_point);
            check_equation(EquationSpec::Sine { s: &s, m: &m }, common.box_n, mode)
        }
        "moment" => {
            let lam = point(lambda, "lambda")?;
            let cap_str = cap.ok_or_else(|| CliError::Usage("--cap is required".into()))?;
            let cap = schema::parse_element(cap_str, dim)?;
            let family = MomentFamily::new(hg.clone(), lam, cap);
            check_equation(EquationSpec::Moment { family: &family }, common.box_n, mode)
        }
        "degree" => {
            let path = function.ok_or_else(|| CliError::Usage("--function is required".into()))?;
            let json: HFunctionJson = load_json(path)?;
            let f = hfunction_from_json(&json, &hg)?;
            let m_point = match (m_lambda, lambda) {
                (Some(_), _) => point(m_lambda, "m-lambda")?,
                (None, Some(_)) => point(lambda, "lambda")?,
                (None, None) => {
                    return Err(CliError::Usage("--lambda or --m-lambda is required".into()))
                }
            };
            let m = HFunction::exponential(hg.clone(), m_point);
            let n = degree
                .ok_or_else(|| CliError::Usage("--degree is required for kind degree".into()))?;
            check_equation(
                EquationSpec::Degree {
                    f: &f,
                    m: &m,
                    degree: n,
                    trials,
                    seed: common.seed,
                },
                common.box_n,
                mode,
            )
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown kind {other:?} (exponential, sine, moment, degree)"
            )))
        }
    }
    .map_err(CliError::from_core)?;

    let json = CheckEqReport {
        kind: report.kind.name().to_string(),
        box_n: report.box_n,
        mode: common.mode.clone(),
        tol: match mode {
            Mode::Float { tol } => Some(tol),
            Mode::Exact => None,
        },
        pass: report.pass,
        checked: report.checked,
        max_residual: report.max_residual,
        counterexample: report.counterexample.as_ref().map(counterexample_json),
    };
    let summary = match (&report.pass, &report.counterexample) {
        (true, _) => format!(
            "check-eq {}: pass ({} instances, box {})",
            report.kind.name(),
            report.checked,
            report.box_n
        ),
        (false, Some(c)) => format!("check-eq {}: FAILED at {c}", report.kind.name()),
        (false, None) => format!("check-eq {}: FAILED", report.kind.name()),
    };
    emit(common, &json, &summary)?;
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------- degree

#[derive(Serialize)]
struct DegreeReport {
    degree: Option<usize>,
    found: bool,
    #[serde(rename = "box")]
    box_n: usize,
    n_max: usize,
    trials: usize,
    seed: u64,
}

pub fn cmd_degree(
    common: &Common,
    function: &Path,
    lambda: Option<&str>,
    n_max: usize,
    trials: usize,
) -> Result<i32, CliError> {
    let spec = load_spec(&common.spec)?;
    let hg = spec.build(common.box_n)?;
    let json: HFunctionJson = load_json(function)?;
    let f = hfunction_from_json(&json, &hg)?;
    let m_point = match lambda {
        Some(s) => {
            let p = schema::parse_point(s)?;
            if p.len() != hg.dim() {
                return Err(CliError::Usage(format!(
                    "--lambda has {} coordinates, hypergroup dimension is {}",
                    p.len(),
                    hg.dim()
                )));
            }
            p
        }
        None => f
            .single_point()
            .ok_or_else(|| {
                CliError::Usage(
                    "function has terms at several points; pass --lambda explicitly".into(),
                )
            })?
            .to_vec(),
    };
    let m = HFunction::exponential(hg.clone(), m_point);
    let mut rng = polyhg::rng::SplitMix64::new(common.seed);
    let degree = polyhg::functions::monomial_degree(&f, &m, common.box_n, n_max, trials, &mut rng)
        .map_err(CliError::from_core)?;
    let json = DegreeReport {
        degree,
        found: degree.is_some(),
        box_n: common.box_n,
        n_max,
        trials,
        seed: common.seed,
    };
    let summary = match degree {
        Some(n) => format!("degree: {n}"),
        None => format!("degree: not found up to n_max = {n_max}"),
    };
    emit(common, &json, &summary)?;
    Ok(0)
}

// ----------------------------------------------------------------- synth

#[derive(Serialize)]
struct SynthReport {
    seed: HFunctionJson,
    atoms: Vec<AtomJson>,
    coefficients: Vec<ScalarJson>,
    residual: ScalarJson,
    unique: bool,
    variety_dim: usize,
    sine_dim: usize,
    degree: Option<usize>,
    #[serde(rename = "box")]
    box_n: usize,
    stable: bool,
}

#[derive(Serialize)]
struct AtomJson {
    alpha: Vec<u32>,
    lambda: Vec<ScalarJson>,
}

pub fn cmd_synth(
    common: &Common,
    function: Option<&Path>,
    pdo: Option<&Path>,
    lambda: Option<&str>,
    box_override: Option<usize>,
) -> Result<i32, CliError> {
    let spec = load_spec(&common.spec)?;
    let hg = spec.build(common.box_n)?;
    let f = match (function, pdo) {
        (Some(path), None) => {
            let json: HFunctionJson = load_json(path)?;
            hfunction_from_json(&json, &hg)?
        }
        (None, Some(path)) => {
            let json: PolyJson = load_json(path)?;
            let p = poly_from_json(&json)?;
            if p.dim() != hg.dim() {
                return Err(CliError::Usage(format!(
                    "operator dimension {} does not match hypergroup dimension {}",
                    p.dim(),
                    hg.dim()
                )));
            }
            let lam = schema::parse_point(
                lambda.ok_or_else(|| CliError::Usage("--pdo needs --lambda".into()))?,
            )?;
            if lam.len() != hg.dim() {
                return Err(CliError::Usage(format!(
                    "--lambda has {} coordinates, hypergroup dimension is {}",
                    lam.len(),
                    hg.dim()
                )));
            }
            polyhg::functions::apply_pdo(&p, &lam, &hg)
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --function <file> or --pdo <polynomial file>".into(),
            ))
        }
    };
    if f.is_zero_symbol() {
        return Err(CliError::Usage("the seed function is zero".into()));
    }
    if f.single_point().is_none() {
        return Err(CliError::Usage(
            "decomposition needs all terms at one point λ".into(),
        ));
    }
    let box_n = box_override.unwrap_or_else(|| default_box(&f));
    let (dec, variety) = moment_span_decompose(&f, box_n).map_err(CliError::from_core)?;
    let m = HFunction::exponential(hg.clone(), f.single_point().unwrap().to_vec());
    let sine_dim = variety.sine_dimension(&m).map_err(CliError::from_core)?;
    let mut rng = polyhg::rng::SplitMix64::new(common.seed);
    let n_max = f.order_cap().total() as usize + 1;
    let degree =
        polyhg::functions::monomial_degree(&f, &m, common.box_n.max(4), n_max, 8, &mut rng)
            .map_err(CliError::from_core)?;
    let residual_zero = dec.residual.is_zero();
    let json = SynthReport {
        seed: hfunction_to_json(&dec.seed),
        atoms: dec
            .atoms
            .iter()
            .map(|(alpha, lam)| AtomJson {
                alpha: alpha.entries().to_vec(),
                lambda: lam.iter().map(ScalarJson::from_scalar).collect(),
            })
            .collect(),
        coefficients: dec
            .coefficients
            .iter()
            .map(ScalarJson::from_scalar)
            .collect(),
        residual: ScalarJson::from_scalar(&dec.residual),
        unique: dec.unique,
        variety_dim: variety.dim(),
        sine_dim,
        degree,
        box_n: variety.box_size(),
        stable: variety.stable(),
    };
    let summary = format!(
        "synth: {} atoms, variety dim {}, sine dim {}, degree {:?}, residual {}{}",
        dec.atoms.len(),
        variety.dim(),
        sine_dim,
        degree,
        if residual_zero { "0" } else { "NONZERO" },
        if dec.unique { "" } else { " (non-unique)" },
    );
    emit(common, &json, &summary)?;
    Ok(if residual_zero { 0 } else { 1 })
}
