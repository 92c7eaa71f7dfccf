use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pstchain::{
    amplitude, check_persymmetry, detect_ese, detect_pst, eigendecompose, eigensystem, evolve_with,
    gap_family_spectrum, krawtchouk_chain, persymmetric_jacobi, persymmetric_weights,
    surgery_spectrum, EseReport, JacobiMatrix, PstCertificate, Site, SpectrumRequest,
};
use serde::Serialize;
use serde_json::json;

use crate::doc::{
    load_chain, sig12, sig12_all, AnalysisDoc, ChainDoc, EseDoc, LoadedChain, MatrixDoc,
    PersymmetryDoc, PstDoc, PERSYMMETRY_TOLERANCE,
};
use crate::error::CliError;
use crate::svg::{self, PlotData};
use crate::{AnalyzeArgs, ConstructArgs, EvolveArgs, Format, Kind, PlotArgs};

/// Weight mismatch allowed when a spectral document without a matrix is
/// checked against the persymmetric weights of its spectrum.
const WEIGHT_MATCH_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: serde_json::Value,
    pub outputs: Vec<String>,
    pub tool_version: String,
}

impl RunManifest {
    fn new(command: &str, inputs: serde_json::Value, outputs: &[&Path]) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub fn print_manifest(manifest: &RunManifest) -> Result<(), CliError> {
    for path in &manifest.outputs {
        let len = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
        if len == 0 {
            return Err(CliError::Io(format!("output {path} is missing or empty")));
        }
    }
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| CliError::Io(format!("cannot write manifest: {e}")))
}

/// Writes through a sibling temporary file so that a failed run never leaves
/// a truncated output behind.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().ok_or_else(|| {
        CliError::Usage(format!("output path {} has no file name", path.display()))
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let io_err = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    if let Err(e) = std::fs::write(&tmp, contents) {
        let _ = std::fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io_err(e)
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("document serializes");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn required<T: Copy>(value: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{kind} requires {flag}")))
}

fn path_echo(p: &Option<PathBuf>) -> serde_json::Value {
    p.as_ref()
        .map_or(serde_json::Value::Null, |p| json!(p.display().to_string()))
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Krawtchouk => "krawtchouk",
        Kind::GapFamily => "gap-family",
        Kind::Surgery => "surgery",
        Kind::Example4x4 => "example-4x4",
        Kind::FromSpectrum => "from-spectrum",
    }
}

fn read_spectrum_file(path: &Path) -> Result<SpectrumRequest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let values: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{} is not a JSON array of reals: {e}",
            path.display()
        ))
    })?;
    Ok(SpectrumRequest::new(values)?)
}

fn example_4x4() -> Result<JacobiMatrix, CliError> {
    let b = 15f64.sqrt() / 2.0;
    Ok(JacobiMatrix::new(vec![0.0; 4], vec![b, 1.0, b])?)
}

fn certificate(
    req: &SpectrumRequest,
    persymmetric: bool,
    tol: f64,
) -> Result<PstCertificate, CliError> {
    if persymmetric {
        Ok(detect_pst(req, tol)?)
    } else {
        Ok(PstCertificate::none())
    }
}

pub fn construct(args: &ConstructArgs) -> Result<RunManifest, CliError> {
    let kind = kind_name(args.kind);
    let (matrix, spectral) = match args.kind {
        Kind::Krawtchouk => {
            let j = krawtchouk_chain(required(args.big_n, "--N", kind)?)?;
            let sd = eigendecompose(&j)?;
            (j, sd)
        }
        Kind::Example4x4 => {
            let j = example_4x4()?;
            let sd = eigendecompose(&j)?;
            (j, sd)
        }
        Kind::GapFamily | Kind::Surgery | Kind::FromSpectrum => {
            let req = match args.kind {
                Kind::GapFamily => gap_family_spectrum(
                    required(args.n, "--n", kind)?,
                    required(args.m, "--m", kind)?,
                )?,
                Kind::Surgery => surgery_spectrum(required(args.big_n, "--N", kind)?)?,
                _ => {
                    let path = args
                        .input
                        .as_deref()
                        .ok_or_else(|| CliError::Usage(format!("{kind} requires --in")))?;
                    read_spectrum_file(path)?
                }
            };
            (persymmetric_jacobi(&req)?, persymmetric_weights(&req)?)
        }
    };

    // Everything downstream is derived from the rounded values so that
    // `analyze` on the written document reproduces the certificate exactly.
    let spectrum = sig12_all(spectral.eigenvalues());
    let weights = sig12_all(spectral.weights());
    let req = SpectrumRequest::new(spectrum.clone())?;
    let persymmetry = check_persymmetry(&matrix, PERSYMMETRY_TOLERANCE);
    let cert = certificate(&req, persymmetry.is_persymmetric, args.tol)?;

    let doc = ChainDoc {
        kind: kind.to_string(),
        spectrum,
        weights,
        matrix: MatrixDoc::from(&matrix),
        persymmetry: PersymmetryDoc::from(&persymmetry),
        pst: PstDoc::from(&cert),
    };
    write_json(&args.out, &doc)?;
    let inputs = json!({
        "kind": kind,
        "N": args.big_n,
        "n": args.n,
        "m": args.m,
        "in": path_echo(&args.input),
        "tol": args.tol,
    });
    Ok(RunManifest::new("construct", inputs, &[&args.out]))
}

/// Decides persymmetry for inputs that carry no matrix by comparing their
/// weights with the ones a persymmetric chain must have.
fn effective_persymmetry(chain: &LoadedChain) -> bool {
    if chain.matrix.is_some() {
        return chain.persymmetric;
    }
    let Ok(req) = chain.spectrum() else {
        return false;
    };
    match persymmetric_weights(&req) {
        Ok(expected) => expected
            .weights()
            .iter()
            .zip(chain.spectral.weights())
            .all(|(a, b)| (a - b).abs() <= WEIGHT_MATCH_TOLERANCE),
        Err(_) => false,
    }
}

struct Analysis {
    cert: PstCertificate,
    ese: Option<EseReport>,
}

fn run_analysis(chain: &LoadedChain, pst_tol: f64, zero_tol: f64) -> Result<Analysis, CliError> {
    let req = chain.spectrum()?;
    let cert = certificate(&req, effective_persymmetry(chain), pst_tol)?;
    let ese = if cert.has_pst {
        Some(detect_ese(&chain.spectral, &cert, zero_tol)?)
    } else {
        None
    };
    Ok(Analysis { cert, ese })
}

pub fn analyze(args: &AnalyzeArgs) -> Result<RunManifest, CliError> {
    let chain = load_chain(&args.input)?;
    let analysis = run_analysis(&chain, args.pst_tol, args.tol)?;
    let verdict = match &analysis.ese {
        Some(r) if r.has_ese() => "ESE present",
        Some(_) => "ESE absent",
        None => "ESE not applicable (no perfect state transfer)",
    };
    let doc = AnalysisDoc {
        source: chain.source.to_string(),
        spectrum: sig12_all(chain.spectral.eigenvalues()),
        weights: sig12_all(chain.spectral.weights()),
        matrix: chain.matrix.as_ref().map(MatrixDoc::from),
        persymmetric: effective_persymmetry(&chain),
        pst: PstDoc::from(&analysis.cert),
        ese: analysis.ese.as_ref().map(EseDoc::from),
        verdict: verdict.to_string(),
    };
    write_json(&args.out, &doc)?;
    let inputs = json!({
        "in": args.input.display().to_string(),
        "tol": args.tol,
        "pst_tol": args.pst_tol,
    });
    Ok(RunManifest::new("analyze", inputs, &[&args.out]))
}

struct Series {
    times: Vec<f64>,
    x0: Vec<Complex64>,
    x_n: Vec<Complex64>,
}

fn time_grid(t0: f64, t1: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(CliError::Usage(format!(
            "need finite t0 < t1, got t0 = {t0}, t1 = {t1}"
        )));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!("need --steps >= 2, got {steps}")));
    }
    let dt = (t1 - t0) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                t1
            } else {
                t0 + i as f64 * dt
            }
        })
        .collect())
}

/// `x_N` comes from the spectral sum for persymmetric chains and from the
/// full eigendecomposition otherwise.
fn sample(chain: &LoadedChain, times: Vec<f64>) -> Result<Series, CliError> {
    let x0 = times
        .iter()
        .map(|&t| amplitude(&chain.spectral, Site::First, t))
        .collect();
    let x_n = match (&chain.matrix, effective_persymmetry(chain)) {
        (Some(j), false) => {
            let es = eigensystem(j)?;
            times
                .iter()
                .map(|&t| *evolve_with(&es, t).last().expect("non-empty column"))
                .collect()
        }
        _ => times
            .iter()
            .map(|&t| amplitude(&chain.spectral, Site::Last, t))
            .collect(),
    };
    Ok(Series { times, x0, x_n })
}

const COLUMNS: [&str; 7] = ["t", "re_x0", "im_x0", "abs_x0", "re_xN", "im_xN", "abs_xN"];

fn row(s: &Series, i: usize) -> [f64; 7] {
    let (a, b) = (s.x0[i], s.x_n[i]);
    [s.times[i], a.re, a.im, a.norm(), b.re, b.im, b.norm()].map(sig12)
}

fn number(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float serializes")
}

pub fn evolve(args: &EvolveArgs) -> Result<RunManifest, CliError> {
    let times = time_grid(args.t0, args.t1, args.steps)?;
    let chain = load_chain(&args.input)?;
    let series = sample(&chain, times)?;
    let rows: Vec<[f64; 7]> = (0..series.times.len()).map(|i| row(&series, i)).collect();
    let text = match args.format {
        Format::Csv => {
            let mut out = COLUMNS.join(",");
            out.push('\n');
            for r in &rows {
                out.push_str(&r.iter().map(|&x| number(x)).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut out =
                serde_json::to_string_pretty(&json!({ "columns": COLUMNS, "rows": rows }))
                    .expect("series serializes");
            out.push('\n');
            out
        }
    };
    write_atomic(&args.out, text.as_bytes())?;
    let inputs = json!({
        "in": args.input.display().to_string(),
        "t0": args.t0,
        "t1": args.t1,
        "steps": args.steps,
        "format": match args.format { Format::Csv => "csv", Format::Json => "json" },
    });
    Ok(RunManifest::new("evolve", inputs, &[&args.out]))
}

pub fn plot(args: &PlotArgs) -> Result<RunManifest, CliError> {
    let chain = load_chain(&args.input)?;
    let analysis = run_analysis(&chain, pstchain::dynamics::PST_TOLERANCE, args.tol)?;
    let t1 = match (args.t1, analysis.cert.transfer_time) {
        (Some(t1), _) => t1,
        (None, Some(t)) => t,
        (None, None) => {
            return Err(CliError::Usage(
                "--t1 is required for a chain without perfect state transfer".into(),
            ))
        }
    };
    let series = sample(&chain, time_grid(args.t0, t1, args.steps)?)?;
    let in_window = |t: &f64| *t >= args.t0 && *t <= t1;
    let data = PlotData {
        times: series.times.clone(),
        abs_x0: series.x0.iter().map(|z| z.norm()).collect(),
        abs_xn: series.x_n.iter().map(|z| z.norm()).collect(),
        ese_times: analysis
            .ese
            .iter()
            .flat_map(|r| r.zeros.iter().map(|z| z.time))
            .filter(in_window)
            .collect(),
        transfer_time: analysis.cert.transfer_time.filter(in_window),
        n_sites: chain.spectral.len(),
    };
    write_atomic(&args.out, svg::render(&data).as_bytes())?;
    let inputs = json!({
        "in": args.input.display().to_string(),
        "t0": args.t0,
        "t1": t1,
        "steps": args.steps,
        "tol": args.tol,
    });
    Ok(RunManifest::new("plot", inputs, &[&args.out]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pstchain::SpectralData;

    #[test]
    fn grid_is_inclusive() {
        let g = time_grid(0.0, 1.0, 5).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(time_grid(1.0, 1.0, 5).is_err());
        assert!(time_grid(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn numbers_use_shortest_form() {
        assert_eq!(number(sig12(1.0)), "1.0");
        assert_eq!(number(sig12(1e-20)), "1e-20");
        assert_eq!(number(sig12(std::f64::consts::PI)), "3.14159265359");
    }

    #[test]
    fn spectral_documents_without_matrix() {
        let req = SpectrumRequest::new(vec![-1.5, -0.5, 0.5, 1.5]).unwrap();
        let sd = persymmetric_weights(&req).unwrap();
        let chain = LoadedChain {
            source: "test",
            spectral: sd,
            matrix: None,
            persymmetric: true,
        };
        assert!(effective_persymmetry(&chain));
        let skewed =
            SpectralData::normalized(req.eigenvalues().to_vec(), vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let chain = LoadedChain {
            source: "test",
            spectral: skewed,
            matrix: None,
            persymmetric: true,
        };
        assert!(!effective_persymmetry(&chain));
    }
}
