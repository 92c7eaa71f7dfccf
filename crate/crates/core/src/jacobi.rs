//! Jacobi matrices, their spectral data and boundary transfer amplitudes.
//!
//! A chain of `N + 1` sites with on-site energies `a_k` and positive
//! couplings `b_k` evolves under `exp(-i J t)`. Starting from the first site,
//! the amplitude on the first site is `x_0(t) = Σ_s w_s exp(-i λ_s t)` where
//! `w_s` is the squared first component of the unit eigenvector for `λ_s`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tridiag;

/// Relative gap below which two computed eigenvalues count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Allowed deviation of the weight sum from 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Real symmetric tridiagonal matrix with strictly positive off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidMatrix(
                "matrix must have at least one site".into(),
            ));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} diagonal entries need {} off-diagonal entries, got {}",
                diag.len(),
                diag.len() - 1,
                offdiag.len()
            )));
        }
        if let Some(k) = diag.iter().position(|a| !a.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "diagonal entry {k} is not finite"
            )));
        }
        if let Some(k) = offdiag.iter().position(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::InvalidMatrix(format!(
                "off-diagonal entry {k} = {} is not strictly positive",
                offdiag[k]
            )));
        }
        Ok(Self { diag, offdiag })
    }

    /// Matrix order `N + 1`.
    pub fn n_sites(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n_sites();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i] } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// `J v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n_sites();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }
}

/// Simple spectrum paired with first-component weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralData {
    /// Validates ordering, positivity and normalization.
    pub fn new(eigenvalues: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum".into()));
        }
        if eigenvalues.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} eigenvalues but {} weights",
                eigenvalues.len(),
                weights.len()
            )));
        }
        check_strictly_increasing(&eigenvalues)?;
        if let Some(s) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "weight {s} = {} is not strictly positive",
                weights[s]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            eigenvalues,
            weights,
        })
    }

    /// Like [`SpectralData::new`] but rescales positive weights to sum to one.
    pub fn normalized(eigenvalues: Vec<f64>, mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_finite() && total > 0.0 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Self::new(eigenvalues, weights)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `λ_N - λ_0`.
    pub fn bandwidth(&self) -> f64 {
        self.eigenvalues[self.len() - 1] - self.eigenvalues[0]
    }
}

pub(crate) fn check_strictly_increasing(values: &[f64]) -> Result<()> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSpectrum(format!(
            "eigenvalue {k} is not finite"
        )));
    }
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    for (k, pair) in values.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if gap <= DEGENERACY_TOLERANCE * scale {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalues {k} and {} are not strictly increasing (gap {gap:e})",
                k + 1
            )));
        }
    }
    Ok(())
}

/// Eigenvalues together with full unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    /// `vectors[s]` is the unit eigenvector for `eigenvalues[s]`, first
    /// component non-negative.
    pub vectors: Vec<Vec<f64>>,
}

impl Eigensystem {
    pub fn spectral_data(&self) -> Result<SpectralData> {
        let weights = self.vectors.iter().map(|v| v[0] * v[0]).collect();
        SpectralData::normalized(self.eigenvalues.clone(), weights)
    }
}

/// Full eigendecomposition: Sturm bisection plus recurrence-built vectors.
pub fn eigensystem(j: &JacobiMatrix) -> Result<Eigensystem> {
    let eigenvalues = tridiag::eigenvalues(&j.diag, &j.offdiag)?;
    let max_abs = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (index, pair) in eigenvalues.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if gap < DEGENERACY_TOLERANCE * max_abs {
            return Err(Error::NearDegenerate { index, gap });
        }
    }
    let n = j.diag.len();
    let vectors = if n > 1 && tridiag::is_mirror_symmetric(&j.diag, &j.offdiag) {
        // v_N = (-1)^{N+s} v_0 for the s-th eigenvector
        eigenvalues
            .iter()
            .enumerate()
            .map(|(s, &lambda)| {
                tridiag::sector_eigenvector(
                    &j.diag,
                    &j.offdiag,
                    lambda,
                    (n - 1 + s).is_multiple_of(2),
                )
            })
            .collect()
    } else {
        let mut vectors: Vec<Vec<f64>> = eigenvalues
            .iter()
            .map(|&lambda| tridiag::eigenvector(&j.diag, &j.offdiag, lambda))
            .collect();
        tridiag::reorthogonalize_clusters(&j.diag, &j.offdiag, &eigenvalues, &mut vectors);
        vectors
    };
    Ok(Eigensystem {
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues and first-component weights of `J`.
pub fn eigendecompose(j: &JacobiMatrix) -> Result<SpectralData> {
    eigensystem(j)?.spectral_data()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersymmetryReport {
    pub is_persymmetric: bool,
    pub max_diag_asymmetry: f64,
    pub max_offdiag_asymmetry: f64,
    pub tolerance: f64,
}

/// Compares `a_k` with `a_{N-k}` and `b_l` with `b_{N-1-l}`.
pub fn check_persymmetry(j: &JacobiMatrix, tol: f64) -> PersymmetryReport {
    let max_diag_asymmetry = max_mirror_gap(&j.diag);
    let max_offdiag_asymmetry = max_mirror_gap(&j.offdiag);
    PersymmetryReport {
        is_persymmetric: max_diag_asymmetry <= tol && max_offdiag_asymmetry <= tol,
        max_diag_asymmetry,
        max_offdiag_asymmetry,
        tolerance: tol,
    }
}

fn max_mirror_gap(values: &[f64]) -> f64 {
    values
        .iter()
        .zip(values.iter().rev())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Which end of the chain an amplitude refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    First,
    Last,
}

/// `x_0(t)` or `x_N(t)` from spectral data.
///
/// The last-site amplitude uses the alternating sign `(-1)^(N+s)` relating
/// the first and last eigenvector components, which only holds when the
/// underlying matrix is persymmetric.
pub fn amplitude(sd: &SpectralData, site: Site, t: f64) -> Complex64 {
    let n = sd.len() - 1;
    sd.eigenvalues
        .iter()
        .zip(&sd.weights)
        .enumerate()
        .map(|(s, (&lambda, &w))| {
            let sign = match site {
                Site::First => 1.0,
                Site::Last if (n + s).is_multiple_of(2) => 1.0,
                Site::Last => -1.0,
            };
            Complex64::from_polar(sign * w, -lambda * t)
        })
        .sum()
}

/// Sampled boundary amplitudes on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries {
    pub times: Vec<f64>,
    pub x0: Vec<Complex64>,
    pub x_n: Vec<Complex64>,
}

/// Uniform grid of `steps` points from `t0` to `t1` inclusive.
pub fn time_grid(t0: f64, t1: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::Domain(format!(
            "time interval [{t0}, {t1}] must have t0 < t1"
        )));
    }
    if steps < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 time steps, got {steps}"
        )));
    }
    let h = (t1 - t0) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                t1
            } else {
                t0 + i as f64 * h
            }
        })
        .collect())
}

pub fn amplitude_series(
    sd: &SpectralData,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<AmplitudeSeries> {
    let times = time_grid(t0, t1, steps)?;
    let x0 = times
        .iter()
        .map(|&t| amplitude(sd, Site::First, t))
        .collect();
    let x_n = times
        .iter()
        .map(|&t| amplitude(sd, Site::Last, t))
        .collect();
    Ok(AmplitudeSeries { times, x0, x_n })
}

/// `exp(-i J t) e_0`, every component.
pub fn full_evolution_column(j: &JacobiMatrix, t: f64) -> Result<Vec<Complex64>> {
    let es = eigensystem(j)?;
    Ok(evolve_with(&es, t))
}

/// Same as [`full_evolution_column`] for a precomputed eigensystem.
pub fn evolve_with(es: &Eigensystem, t: f64) -> Vec<Complex64> {
    let n = es.eigenvalues.len();
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for (lambda, v) in es.eigenvalues.iter().zip(&es.vectors) {
        let phase = Complex64::from_polar(v[0], -lambda * t);
        for (c, vj) in column.iter_mut().zip(v) {
            *c += phase * vj;
        }
    }
    column
}
