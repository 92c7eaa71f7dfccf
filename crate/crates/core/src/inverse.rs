//! Persymmetric Jacobi matrices from a prescribed simple spectrum.
//!
//! A persymmetric Jacobi matrix is fixed by its eigenvalues alone: the first
//! components of its eigenvectors satisfy `w_s ∝ (-1)^(N+s) / Π_{k≠s} (λ_s - λ_k)`.
//! Given eigenvalues and weights, the matrix is recovered by Lanczos
//! tridiagonalization of `diag(λ)` started from `(√w_0, …, √w_N)`.

use crate::error::{Error, Result};
use crate::jacobi::{check_persymmetry, check_strictly_increasing, JacobiMatrix, SpectralData};

/// Largest supported chain length `N` (matrix order `N + 1`).
pub const MAX_N: usize = 40;

/// Mirror asymmetry tolerated before persymmetry is enforced by averaging.
pub const SYMMETRIZE_THRESHOLD: f64 = 1e-6;

/// A strictly increasing list of at least two prescribed eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRequest {
    eigenvalues: Vec<f64>,
}

impl SpectrumRequest {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(Error::InvalidSpectrum(format!(
                "need at least 2 eigenvalues, got {}",
                eigenvalues.len()
            )));
        }
        check_strictly_increasing(&eigenvalues)?;
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.eigenvalues.windows(2).map(|p| p[1] - p[0]).collect()
    }
}

impl From<&SpectralData> for SpectrumRequest {
    fn from(sd: &SpectralData) -> Self {
        // SpectralData already guarantees a strictly increasing spectrum.
        Self {
            eigenvalues: sd.eigenvalues().to_vec(),
        }
    }
}

/// Weights of the persymmetric Jacobi matrix with the requested spectrum.
///
/// Products of gaps are accumulated as logarithms with an explicit sign so
/// that spectra up to [`MAX_N`] do not overflow.
pub fn persymmetric_weights(req: &SpectrumRequest) -> Result<SpectralData> {
    let lambda = &req.eigenvalues;
    let n = lambda.len() - 1;
    if n > MAX_N {
        return Err(Error::Domain(format!(
            "spectrum size {} exceeds the supported {}",
            n + 1,
            MAX_N + 1
        )));
    }

    let mut log_inv = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let mut log_abs = 0.0;
        let mut negative = (n + s) % 2 == 1;
        for k in (0..=n).filter(|&k| k != s) {
            let d = lambda[s] - lambda[k];
            log_abs += d.abs().ln();
            if d < 0.0 {
                negative = !negative;
            }
        }
        if negative || !log_abs.is_finite() {
            return Err(Error::Inconsistent(format!(
                "weight {s} came out non-positive; spectrum gaps violate tolerance"
            )));
        }
        log_inv.push(-log_abs);
    }

    let top = log_inv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_inv.iter().map(|l| (l - top).exp()).collect();
    SpectralData::normalized(lambda.clone(), weights)
}

/// Lanczos tridiagonalization of `diag(λ)` from `√w`, with full
/// reorthogonalization and no post-processing.
pub fn lanczos_tridiagonalize(sd: &SpectralData) -> Result<JacobiMatrix> {
    let lambda = sd.eigenvalues();
    let size = lambda.len();
    let scale = lambda
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let breakdown = 64.0 * f64::EPSILON * scale * size as f64;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(size);
    basis.push(sd.weights().iter().map(|w| w.sqrt()).collect());
    let mut diag = Vec::with_capacity(size);
    let mut offdiag: Vec<f64> = Vec::with_capacity(size - 1);

    for step in 0..size {
        let q = &basis[step];
        let mut v: Vec<f64> = q.iter().zip(lambda).map(|(x, l)| x * l).collect();
        let alpha = dot(q, &v);
        diag.push(alpha);
        if step + 1 == size {
            break;
        }
        axpy(-alpha, q, &mut v);
        if step > 0 {
            axpy(-offdiag[step - 1], &basis[step - 1], &mut v);
        }
        for _ in 0..2 {
            for prev in &basis {
                let c = dot(prev, &v);
                axpy(-c, prev, &mut v);
            }
        }
        let beta = dot(&v, &v).sqrt();
        if beta.is_nan() || beta <= breakdown {
            return Err(Error::Reconstruction {
                step,
                reason: format!("coupling collapsed to {beta:e}"),
            });
        }
        v.iter_mut().for_each(|x| *x /= beta);
        offdiag.push(beta);
        basis.push(v);
    }

    JacobiMatrix::new(diag, offdiag).map_err(|e| Error::Reconstruction {
        step: size,
        reason: e.to_string(),
    })
}

/// Jacobi matrix with the given spectral data.
///
/// When the raw reconstruction is persymmetric up to
/// [`SYMMETRIZE_THRESHOLD`], mirrored entries are averaged so the result is
/// exactly persymmetric; otherwise it is returned as computed.
pub fn reconstruct_jacobi(sd: &SpectralData) -> Result<JacobiMatrix> {
    let raw = lanczos_tridiagonalize(sd)?;
    let report = check_persymmetry(&raw, SYMMETRIZE_THRESHOLD);
    if report.is_persymmetric {
        Ok(symmetrize(&raw))
    } else {
        Ok(raw)
    }
}

/// The unique persymmetric Jacobi matrix with spectrum `req`.
pub fn persymmetric_jacobi(req: &SpectrumRequest) -> Result<JacobiMatrix> {
    let sd = persymmetric_weights(req)?;
    let raw = lanczos_tridiagonalize(&sd)?;
    let report = check_persymmetry(&raw, SYMMETRIZE_THRESHOLD);
    if !report.is_persymmetric {
        return Err(Error::Reconstruction {
            step: raw.n_sites(),
            reason: format!(
                "result is not persymmetric (asymmetry {:e} / {:e})",
                report.max_diag_asymmetry, report.max_offdiag_asymmetry
            ),
        });
    }
    Ok(symmetrize(&raw))
}

fn symmetrize(j: &JacobiMatrix) -> JacobiMatrix {
    let mirror = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(v.iter().rev())
            .map(|(x, y)| 0.5 * (x + y))
            .collect()
    };
    JacobiMatrix::new(mirror(j.diag()), mirror(j.offdiag()))
        .expect("averaging positive couplings keeps them positive")
}

/// Spectrum left after removing `±1/2` from the unit-gap symmetric spectrum
/// of size `N + 3`.
pub fn surgery_spectrum(n: usize) -> Result<SpectrumRequest> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "surgery needs an odd N >= 3, got {n}"
        )));
    }
    let half = n.div_ceil(2);
    let upper: Vec<f64> = (1..=half).map(|k| (2 * k + 1) as f64 / 2.0).collect();
    let eigenvalues = upper
        .iter()
        .rev()
        .map(|v| -v)
        .chain(upper.iter().cloned())
        .collect();
    SpectrumRequest::new(eigenvalues)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}
