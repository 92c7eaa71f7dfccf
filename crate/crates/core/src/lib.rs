//! Quantum-wire Hamiltonians with perfect state transfer.
//!
//! Builds persymmetric Jacobi matrices from prescribed spectra, evaluates the
//! boundary amplitudes of `exp(-i J t) e_0`, certifies perfect state transfer
//! and locates early state exclusion times: zeros of the return amplitude
//! before the transfer time.
//!
//! ```
//! use pstchain::{detect_ese, detect_pst, gap_family_spectrum, persymmetric_weights};
//!
//! let spectrum = gap_family_spectrum(2, 1).unwrap();
//! let cert = detect_pst(&spectrum, 1e-8).unwrap();
//! let sd = persymmetric_weights(&spectrum).unwrap();
//! let report = detect_ese(&sd, &cert, 1e-10).unwrap();
//! assert_eq!(report.zeros.len(), 1);
//! ```

pub mod dynamics;
pub mod error;
pub mod inverse;
pub mod jacobi;
pub mod polyfamilies;
mod tridiag;

pub use dynamics::{
    detect_ese, detect_pst, min_overlap, EseReport, EseZero, Overlap, PstCertificate,
};
pub use error::{Error, Result};
pub use inverse::{
    lanczos_tridiagonalize, persymmetric_jacobi, persymmetric_weights, reconstruct_jacobi,
    surgery_spectrum, SpectrumRequest,
};
pub use jacobi::{
    amplitude, amplitude_series, check_persymmetry, eigendecompose, eigensystem, evolve_with,
    full_evolution_column, AmplitudeSeries, Eigensystem, JacobiMatrix, PersymmetryReport, Site,
    SpectralData,
};
pub use polyfamilies::{
    amplitude_as_chebyshev, chebyshev_eval, closed_form_4x4, closed_form_krawtchouk_x0,
    closed_form_surgery_x0, count_sign_changes, gap_family_spectrum, krawtchouk_chain,
    monic_krawtchouk, ChebyshevCombination, FourByFourAmplitudes,
};
