//! Symmetric tridiagonal eigensolver.
//!
//! Eigenvalues come from Sturm-sequence bisection. Each eigenvector is then
//! assembled from the three-term recurrence run inward from both ends of the
//! chain (the ratio form of the forward and backward recurrences), joined at
//! the index where the twisted pivot is smallest. Running the recurrence from
//! one end only amplifies rounding error whenever the eigenvector decays
//! towards the far end; the twisted join avoids that.
//!
//! Mirror-symmetric matrices split into a symmetric and an antisymmetric
//! half-size problem. Mirror pairs of eigenvalues can be arbitrarily close,
//! but their eigenvectors live in different sectors and stay exactly
//! orthogonal.

use crate::error::{Error, Result};

const MAX_BISECTION_STEPS: usize = 256;

/// Relative gap below which neighbouring eigenvectors are reorthogonalized.
const CLUSTER_GAP: f64 = 1e-3;

/// Number of eigenvalues strictly below `x`, from the pivots of the LDLᵀ
/// factorization of `T - x I`.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64, pivot_guard: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        if q == 0.0 {
            q = pivot_guard;
        }
        q = (diag[i] - x) - offdiag[i - 1] * offdiag[i - 1] / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin_bounds(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

fn scale_of(diag: &[f64], offdiag: &[f64]) -> f64 {
    let (lo, hi) = gershgorin_bounds(diag, offdiag);
    lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
}

/// All eigenvalues in increasing order.
pub fn eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let (lo, hi) = gershgorin_bounds(diag, offdiag);
    let scale = scale_of(diag, offdiag);
    let guard = f64::EPSILON * f64::EPSILON * scale;
    let abs_floor = f64::EPSILON * scale;

    let mut out = Vec::with_capacity(n);
    let mut left = lo - abs_floor;
    for k in 0..n {
        let mut a = left;
        let mut b = hi + abs_floor;
        let mut converged = false;
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (a + b);
            if !mid.is_finite() {
                return Err(Error::SolverFailure { index: k });
            }
            let width = b - a;
            if width <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) + abs_floor * 1e-3
                || mid <= a
                || mid >= b
            {
                converged = true;
                break;
            }
            if sturm_count(diag, offdiag, mid, guard) <= k {
                a = mid;
            } else {
                b = mid;
            }
        }
        if !converged {
            return Err(Error::SolverFailure { index: k });
        }
        let value = 0.5 * (a + b);
        out.push(value);
        // eigenvalue k+1 is at least eigenvalue k
        left = a;
    }
    Ok(out)
}

/// Unit eigenvector for a (computed) eigenvalue `lambda`, with a
/// non-negative first component.
pub fn eigenvector(diag: &[f64], offdiag: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let tiny = f64::EPSILON * f64::EPSILON * scale_of(diag, offdiag);
    let nonzero = |v: f64| if v == 0.0 { tiny } else { v };

    let mut upper = vec![0.0; n];
    upper[0] = nonzero(diag[0] - lambda);
    for k in 1..n {
        upper[k] = nonzero((diag[k] - lambda) - offdiag[k - 1] * offdiag[k - 1] / upper[k - 1]);
    }
    let mut lower = vec![0.0; n];
    lower[n - 1] = nonzero(diag[n - 1] - lambda);
    for k in (0..n - 1).rev() {
        lower[k] = nonzero((diag[k] - lambda) - offdiag[k] * offdiag[k] / lower[k + 1]);
    }

    let twist = (0..n)
        .map(|k| (k, (upper[k] + lower[k] - (diag[k] - lambda)).abs()))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
        .0;

    let mut z = vec![0.0; n];
    z[twist] = 1.0;
    for k in (0..twist).rev() {
        z[k] = -offdiag[k] * z[k + 1] / upper[k];
    }
    for k in twist + 1..n {
        z[k] = -offdiag[k - 1] * z[k - 1] / lower[k];
    }

    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if z[0] < 0.0 { -1.0 } else { 1.0 };
    z.iter_mut().for_each(|v| *v *= sign / norm);
    z
}

/// True when `a_k = a_{n-1-k}` and `b_l = b_{n-2-l}` hold exactly.
pub fn is_mirror_symmetric(diag: &[f64], offdiag: &[f64]) -> bool {
    let mirrored = |v: &[f64]| v.iter().zip(v.iter().rev()).all(|(a, b)| a == b);
    mirrored(diag) && mirrored(offdiag)
}

/// Eigenvector for `lambda` in the symmetric (`v_{n-1-k} = v_k`) or
/// antisymmetric sector of a mirror-symmetric matrix with `n >= 2`.
pub fn sector_eigenvector(diag: &[f64], offdiag: &[f64], lambda: f64, symmetric: bool) -> Vec<f64> {
    let n = diag.len();
    let half = n / 2;
    let sign = if symmetric { 1.0 } else { -1.0 };
    let mut d = diag[..half].to_vec();
    let mut e = offdiag[..half.saturating_sub(1)].to_vec();
    let centre = !n.is_multiple_of(2) && symmetric;
    if n.is_multiple_of(2) {
        d[half - 1] += sign * offdiag[half - 1];
    } else if centre {
        // basis (e_k ± e_{n-1-k})/√2 for k < half, plus e_half
        d.push(diag[half]);
        e.push(std::f64::consts::SQRT_2 * offdiag[half - 1]);
    }
    let u = eigenvector(&d, &e, lambda);
    let mut v = vec![0.0; n];
    for k in 0..half {
        v[k] = u[k] * std::f64::consts::FRAC_1_SQRT_2;
        v[n - 1 - k] = sign * v[k];
    }
    if centre {
        v[half] = u[half];
    }
    v
}

/// Modified Gram–Schmidt of each vector against its predecessors within a
/// run of eigenvalues whose consecutive gaps are below `CLUSTER_GAP · scale`.
pub fn reorthogonalize_clusters(
    diag: &[f64],
    offdiag: &[f64],
    eigenvalues: &[f64],
    vectors: &mut [Vec<f64>],
) {
    let threshold = CLUSTER_GAP * scale_of(diag, offdiag);
    let mut start = 0;
    for i in 1..vectors.len() {
        if eigenvalues[i] - eigenvalues[i - 1] >= threshold {
            start = i;
            continue;
        }
        let (done, rest) = vectors.split_at_mut(i);
        let v = &mut rest[0];
        for u in &done[start..] {
            let c: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
        v.iter_mut().for_each(|x| *x *= sign / norm);
    }
}
