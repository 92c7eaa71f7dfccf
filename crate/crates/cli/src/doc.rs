//! JSON documents read and written by the CLI.
//!
//! Every float is rounded to 12 significant digits before it is stored, so
//! the emitted decimal strings are short and identical across runs.

use std::path::Path;

use pstchain::{
    check_persymmetry, eigendecompose, persymmetric_jacobi, persymmetric_weights, EseReport,
    EseZero, JacobiMatrix, PersymmetryReport, PstCertificate, SpectralData, SpectrumRequest,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Tolerance for deciding that an input matrix is persymmetric.
pub const PERSYMMETRY_TOLERANCE: f64 = 1e-8;

pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

pub fn sig12_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| sig12(x)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl From<&JacobiMatrix> for MatrixDoc {
    fn from(j: &JacobiMatrix) -> Self {
        Self {
            diag: sig12_all(j.diag()),
            offdiag: sig12_all(j.offdiag()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersymmetryDoc {
    pub is_persymmetric: bool,
    pub max_diag_asymmetry: f64,
    pub max_offdiag_asymmetry: f64,
    pub tolerance: f64,
}

impl From<&PersymmetryReport> for PersymmetryDoc {
    fn from(r: &PersymmetryReport) -> Self {
        Self {
            is_persymmetric: r.is_persymmetric,
            max_diag_asymmetry: sig12(r.max_diag_asymmetry),
            max_offdiag_asymmetry: sig12(r.max_offdiag_asymmetry),
            tolerance: sig12(r.tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PstDoc {
    pub has_pst: bool,
    pub transfer_time: Option<f64>,
    pub gap_odd_integers: Option<Vec<u64>>,
    pub phase_re: Option<f64>,
    pub phase_im: Option<f64>,
}

impl From<&PstCertificate> for PstDoc {
    fn from(c: &PstCertificate) -> Self {
        Self {
            has_pst: c.has_pst,
            transfer_time: c.transfer_time.map(sig12),
            gap_odd_integers: c.gap_odd_integers.clone(),
            phase_re: c.phase.map(|p| sig12(p.re)),
            phase_im: c.phase.map(|p| sig12(p.im)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDoc {
    pub time: f64,
    pub residual: f64,
    pub last_site_modulus: f64,
}

impl From<&EseZero> for ZeroDoc {
    fn from(z: &EseZero) -> Self {
        Self {
            time: sig12(z.time),
            residual: sig12(z.residual),
            last_site_modulus: sig12(z.last_site_modulus),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EseDoc {
    pub zeros: Vec<ZeroDoc>,
    pub unresolved: Vec<ZeroDoc>,
    pub early_pst_anomalies: Vec<ZeroDoc>,
    pub scan_resolution: f64,
    pub tolerance: f64,
}

impl From<&EseReport> for EseDoc {
    fn from(r: &EseReport) -> Self {
        let docs = |zs: &[EseZero]| zs.iter().map(ZeroDoc::from).collect();
        Self {
            zeros: docs(&r.zeros),
            unresolved: docs(&r.unresolved),
            early_pst_anomalies: docs(&r.early_pst_anomalies),
            scan_resolution: sig12(r.scan_resolution),
            tolerance: sig12(r.tolerance),
        }
    }
}

/// Output of `construct`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDoc {
    pub kind: String,
    pub spectrum: Vec<f64>,
    pub weights: Vec<f64>,
    pub matrix: MatrixDoc,
    pub persymmetry: PersymmetryDoc,
    pub pst: PstDoc,
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDoc {
    pub source: String,
    pub spectrum: Vec<f64>,
    pub weights: Vec<f64>,
    pub matrix: Option<MatrixDoc>,
    pub persymmetric: bool,
    pub pst: PstDoc,
    pub ese: Option<EseDoc>,
    pub verdict: String,
}

/// A chain loaded from any accepted input file.
#[derive(Debug, Clone)]
pub struct LoadedChain {
    pub source: &'static str,
    pub spectral: SpectralData,
    pub matrix: Option<JacobiMatrix>,
    pub persymmetric: bool,
}

impl LoadedChain {
    pub fn spectrum(&self) -> Result<SpectrumRequest, CliError> {
        Ok(SpectrumRequest::new(self.spectral.eigenvalues().to_vec())?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InputDoc {
    Spectrum(Vec<f64>),
    Chain {
        spectrum: Vec<f64>,
        weights: Vec<f64>,
        matrix: Option<MatrixDoc>,
    },
    Matrix {
        matrix: MatrixDoc,
    },
}

/// Reads a bare JSON spectrum, a `construct` document, or an object with a
/// `matrix` entry.
pub fn load_chain(path: &Path) -> Result<LoadedChain, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let doc: InputDoc = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{} is neither a JSON spectrum array nor a chain document: {e}",
            path.display()
        ))
    })?;
    match doc {
        InputDoc::Spectrum(values) => {
            let req = SpectrumRequest::new(values)?;
            Ok(LoadedChain {
                source: "spectrum",
                spectral: persymmetric_weights(&req)?,
                matrix: Some(persymmetric_jacobi(&req)?),
                persymmetric: true,
            })
        }
        InputDoc::Chain {
            spectrum,
            weights,
            matrix,
        } => {
            let spectral = SpectralData::normalized(spectrum, weights)?;
            let matrix = matrix
                .map(|m| JacobiMatrix::new(m.diag, m.offdiag))
                .transpose()?;
            let persymmetric = match &matrix {
                Some(j) => check_persymmetry(j, PERSYMMETRY_TOLERANCE).is_persymmetric,
                None => true,
            };
            Ok(LoadedChain {
                source: "chain-document",
                spectral,
                matrix,
                persymmetric,
            })
        }
        InputDoc::Matrix { matrix } => {
            let j = JacobiMatrix::new(matrix.diag, matrix.offdiag)?;
            let persymmetric = check_persymmetry(&j, PERSYMMETRY_TOLERANCE).is_persymmetric;
            Ok(LoadedChain {
                source: "matrix",
                spectral: eigendecompose(&j)?,
                matrix: Some(j),
                persymmetric,
            })
        }
    }
}
