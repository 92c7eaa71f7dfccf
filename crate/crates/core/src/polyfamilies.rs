//! Krawtchouk and Chebyshev machinery behind the named constructions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::inverse::SpectrumRequest;
use crate::jacobi::{JacobiMatrix, SpectralData};

/// Jacobi matrix of the symmetric (`p = 1/2`) Krawtchouk polynomials,
/// shifted to zero diagonal. Couplings are `√((k+1)(N-k)) / 2`; the spectrum
/// is `s - N/2`, `s = 0..=N`.
pub fn krawtchouk_chain(n: usize) -> Result<JacobiMatrix> {
    if n == 0 {
        return Err(Error::Domain("Krawtchouk chain needs N >= 1".into()));
    }
    let offdiag = (0..n)
        .map(|k| (((k + 1) * (n - k)) as f64).sqrt() / 2.0)
        .collect();
    JacobiMatrix::new(vec![0.0; n + 1], offdiag)
}

/// Monic Krawtchouk polynomial `K_degree(x; 1/2, N)` by forward recurrence
/// `K_{k+1} = (x - N/2) K_k - (N+1-k) k / 4 · K_{k-1}`.
pub fn monic_krawtchouk(n: usize, degree: usize, x: f64) -> Result<f64> {
    if n == 0 || degree > n + 1 {
        return Err(Error::Domain(format!(
            "degree {degree} outside [0, N+1] for N = {n}"
        )));
    }
    let half = n as f64 / 2.0;
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..degree {
        let c = ((n + 1 - k) * k) as f64 / 4.0;
        let next = (x - half) * cur - c * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Symmetric spectrum of size `2n` with unit gaps except a middle gap of
/// `2m + 1`: `λ_{n+k} = (2m + 2k + 1)/2` and `λ_k = -λ_{2n-1-k}`.
pub fn gap_family_spectrum(n: usize, m: usize) -> Result<SpectrumRequest> {
    if n < 2 || m < 1 {
        return Err(Error::Domain(format!(
            "gap family needs n >= 2 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    let upper: Vec<f64> = (0..n).map(|k| (2 * m + 2 * k + 1) as f64 / 2.0).collect();
    SpectrumRequest::new(
        upper
            .iter()
            .rev()
            .map(|v| -v)
            .chain(upper.iter().cloned())
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourByFourAmplitudes {
    pub x0: f64,
    pub x3_modulus: f64,
}

/// `x_0 = cos³(t/2)(3 cos t - 2)` and `|x_3| = |sin³(t/2)(3 cos t + 2)|`.
pub fn closed_form_4x4(t: f64) -> FourByFourAmplitudes {
    let (s, c) = (t / 2.0).sin_cos();
    FourByFourAmplitudes {
        x0: c.powi(3) * (3.0 * t.cos() - 2.0),
        x3_modulus: (s.powi(3) * (3.0 * t.cos() + 2.0)).abs(),
    }
}

/// `cos^N(t/2)`, the return amplitude of the Krawtchouk chain.
pub fn closed_form_krawtchouk_x0(n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("Krawtchouk amplitude needs N >= 1".into()));
    }
    Ok((t / 2.0).cos().powi(n as i32))
}

/// Return amplitude after removing the two innermost eigenvalues from the
/// Krawtchouk spectrum of size `N + 3`:
/// `((N+1)/2 + 1) cos t - (N+1)/2` times `cos^N(t/2)`.
pub fn closed_form_surgery_x0(n: usize, t: f64) -> Result<f64> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "surgery amplitude needs an odd N >= 3, got {n}"
        )));
    }
    let h = (n + 1) as f64 / 2.0;
    Ok(((h + 1.0) * t.cos() - h) * (t / 2.0).cos().powi(n as i32))
}

/// `T_j(x)` by the three-term recurrence.
pub fn chebyshev_eval(j: usize, x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() > 1.0 {
        return Err(Error::Domain(format!(
            "Chebyshev argument {x} outside [-1, 1]"
        )));
    }
    Ok(chebyshev_unchecked(j, x))
}

fn chebyshev_unchecked(j: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if j == 0 {
        return prev;
    }
    for _ in 1..j {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Σ_j A_j T_j(x)` with a nonzero lowest-degree coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevCombination {
    coefficients: BTreeMap<usize, f64>,
}

impl ChebyshevCombination {
    /// Drops exact zeros; fails if nothing nonzero remains.
    pub fn new(coefficients: BTreeMap<usize, f64>) -> Result<Self> {
        if let Some((j, a)) = coefficients.iter().find(|(_, a)| !a.is_finite()) {
            return Err(Error::Domain(format!(
                "coefficient A_{j} = {a} is not finite"
            )));
        }
        let coefficients: BTreeMap<usize, f64> = coefficients
            .into_iter()
            .filter(|(_, a)| *a != 0.0)
            .collect();
        if coefficients.is_empty() {
            return Err(Error::Domain(
                "Chebyshev combination has no nonzero coefficient".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, f64> {
        &self.coefficients
    }

    pub fn lowest_degree(&self) -> usize {
        *self.coefficients.keys().next().expect("non-empty")
    }

    pub fn highest_degree(&self) -> usize {
        *self.coefficients.keys().next_back().expect("non-empty")
    }

    /// Clenshaw summation.
    pub fn eval(&self, x: f64) -> f64 {
        let top = self.highest_degree();
        let (mut b1, mut b2) = (0.0, 0.0);
        for j in (1..=top).rev() {
            let a = self.coefficients.get(&j).copied().unwrap_or(0.0);
            let b0 = a + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients.get(&0).copied().unwrap_or(0.0) + x * b1 - b2
    }
}

/// Absolute tolerance for matching eigenvalues to odd half-integers.
pub const HALF_INTEGER_TOLERANCE: f64 = 1e-9;

/// Rewrites `x_0(t)` as `Σ A_{2j+1} T_{2j+1}(cos(t/2))`.
///
/// Requires a spectrum of odd half-integers symmetric about zero with
/// mirror-symmetric weights; then `A_{2λ} = 2 w(λ)` for each `λ > 0`.
pub fn amplitude_as_chebyshev(sd: &SpectralData) -> Result<ChebyshevCombination> {
    let lambda = sd.eigenvalues();
    let w = sd.weights();
    let size = lambda.len();
    if size % 2 == 1 {
        return Err(Error::NotChebyshevRepresentable(
            "odd number of eigenvalues".into(),
        ));
    }
    let mut coefficients = BTreeMap::new();
    for s in 0..size {
        let mirror = size - 1 - s;
        if (lambda[s] + lambda[mirror]).abs() > HALF_INTEGER_TOLERANCE {
            return Err(Error::NotChebyshevRepresentable(format!(
                "spectrum not symmetric about 0 at index {s}"
            )));
        }
        if (w[s] - w[mirror]).abs() > HALF_INTEGER_TOLERANCE {
            return Err(Error::NotChebyshevRepresentable(format!(
                "weights not mirror-symmetric at index {s}"
            )));
        }
        let doubled = 2.0 * lambda[s];
        let degree = doubled.round();
        if (doubled - degree).abs() > 2.0 * HALF_INTEGER_TOLERANCE || (degree as i64) % 2 == 0 {
            return Err(Error::NotChebyshevRepresentable(format!(
                "eigenvalue {} is not an odd half-integer",
                lambda[s]
            )));
        }
        if lambda[s] > 0.0 {
            coefficients.insert(degree as usize, 2.0 * w[s]);
        }
    }
    ChebyshevCombination::new(coefficients)
}

/// Sign changes of `Q` over `samples` equally spaced interior points of
/// `(-1, 1)`; a lower bound on the number of distinct zeros there.
pub fn count_sign_changes(c: &ChebyshevCombination, samples: usize) -> Result<usize> {
    if samples < 64 {
        return Err(Error::Domain(format!(
            "need at least 64 samples, got {samples}"
        )));
    }
    let step = 2.0 / (samples + 1) as f64;
    let mut count = 0;
    let mut last_sign = 0.0;
    for i in 1..=samples {
        let v = c.eval(-1.0 + i as f64 * step);
        if v == 0.0 {
            continue;
        }
        let sign = v.signum();
        if last_sign != 0.0 && sign != last_sign {
            count += 1;
        }
        last_sign = sign;
    }
    Ok(count)
}
