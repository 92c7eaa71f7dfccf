//! Perfect state transfer and early state exclusion.
//!
//! A persymmetric chain transfers perfectly at time `T₀` when every spectral
//! gap is an odd multiple of `π / T₀`. Early state exclusion happens when the
//! return amplitude `x_0(t)` vanishes at some `0 < t < T₀` without the state
//! having already arrived at the far end.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inverse::{persymmetric_weights, SpectrumRequest};
use crate::jacobi::{amplitude, Site, SpectralData};

/// Default relative tolerance for the odd-multiple gap test.
pub const PST_TOLERANCE: f64 = 1e-8;
/// Default residual below which `|x_0|` counts as zero.
pub const ZERO_TOLERANCE: f64 = 1e-10;
/// `|x_N|` must stay below `1 - EXCLUSION_MARGIN` at an exclusion time.
pub const EXCLUSION_MARGIN: f64 = 1e-6;
/// Largest odd-multiple index `j` in `δ = g_min / (2j + 1)`.
pub const MAX_ODD_INDEX: u64 = 10_000;
/// Grid points per shortest oscillation period of the return amplitude.
pub const SCAN_POINTS_PER_PERIOD: f64 = 256.0;
/// Scan window margin at both ends, relative to `T₀`.
pub const EDGE_MARGIN: f64 = 1e-6;
/// Refined minima below this but above the zero tolerance are reported as
/// unresolved rather than dropped.
pub const UNRESOLVED_THRESHOLD: f64 = 1e-6;
/// Sampled `|x_0|` values below this are indistinguishable from rounding
/// noise in the spectral sum.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PstCertificate {
    pub has_pst: bool,
    /// Earliest transfer time `T₀`.
    pub transfer_time: Option<f64>,
    /// `n_k` with `λ_{k+1} - λ_k = (2 n_k + 1) π / T₀`.
    pub gap_odd_integers: Option<Vec<u64>>,
    /// `x_N(T₀)`, a unit complex number.
    pub phase: Option<Complex64>,
}

impl PstCertificate {
    pub fn none() -> Self {
        Self {
            has_pst: false,
            transfer_time: None,
            gap_odd_integers: None,
            phase: None,
        }
    }
}

/// Decide from the spectrum alone whether the persymmetric chain realizing
/// it transfers perfectly, and find the earliest transfer time.
///
/// Candidate unit gaps are `δ = g_min / (2j + 1)` for `j = 0, 1, …`; the
/// first one making every gap an odd multiple within `tol · g_k` wins. When
/// the search is exhausted, the outcome is `has_pst = false` if some gap
/// ratio is recognizably a fraction with an even numerator or denominator,
/// and [`Error::PstUndecidable`] otherwise.
pub fn detect_pst(req: &SpectrumRequest, tol: f64) -> Result<PstCertificate> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::Domain(format!(
            "PST tolerance {tol:e} must lie in (0, 1e-4]"
        )));
    }
    let gaps = req.gaps();
    let g_min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);

    for j in 0..=MAX_ODD_INDEX {
        let delta = g_min / (2 * j + 1) as f64;
        if let Some(odd) = odd_multiples(&gaps, delta, tol) {
            let total_gap: f64 = gaps.iter().sum();
            let total_odd: u64 = odd.iter().map(|n| 2 * n + 1).sum();
            let delta = total_gap / total_odd as f64;
            let transfer_time = PI / delta;
            let sd = persymmetric_weights(req)?;
            let phase = amplitude(&sd, Site::Last, transfer_time);
            return Ok(PstCertificate {
                has_pst: true,
                transfer_time: Some(transfer_time),
                gap_odd_integers: Some(odd),
                phase: Some(phase / phase.norm()),
            });
        }
    }

    let bound = 2 * MAX_ODD_INDEX + 1;
    let refuted = gaps
        .iter()
        .filter_map(|g| best_rational(g / g_min, tol, bound))
        .any(|(p, q)| p % 2 == 0 || q % 2 == 0);
    if refuted {
        Ok(PstCertificate::none())
    } else {
        Err(Error::PstUndecidable { tol })
    }
}

fn odd_multiples(gaps: &[f64], delta: f64, tol: f64) -> Option<Vec<u64>> {
    gaps.iter()
        .map(|&g| {
            let ratio = g / delta;
            let n = ((ratio - 1.0) / 2.0).round().max(0.0);
            let odd = 2.0 * n + 1.0;
            ((g - odd * delta).abs() <= tol * g).then_some(n as u64)
        })
        .collect()
}

/// First continued-fraction convergent `p/q` (lowest terms) of `x` within
/// relative tolerance, if one exists with `q <= bound`.
fn best_rational(x: f64, tol: f64, bound: u64) -> Option<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a > u32::MAX as f64 {
            return None;
        }
        let a = a as u64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > bound {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol * x {
            return Some((p2, q2));
        }
        let frac = rest - a as f64;
        if frac <= 0.0 {
            return None;
        }
        rest = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// A refined zero of the return amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EseZero {
    pub time: f64,
    /// `|x_0|` at the refined time.
    pub residual: f64,
    /// `|x_N|` at the refined time.
    pub last_site_modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EseReport {
    pub transfer_time: f64,
    pub zeros: Vec<EseZero>,
    /// Local minima that came close to zero but did not refine below the
    /// tolerance.
    pub unresolved: Vec<EseZero>,
    /// Zeros at which the state already sits on the last site. These would
    /// be earlier transfer times and never occur for a correct certificate.
    pub early_pst_anomalies: Vec<EseZero>,
    pub scan_resolution: f64,
    pub tolerance: f64,
}

impl EseReport {
    pub fn has_ese(&self) -> bool {
        !self.zeros.is_empty()
    }
}

/// Locate every zero of `x_0(t)` strictly between `0` and `T₀`.
///
/// `sd` must belong to a persymmetric chain whose spectrum matches the
/// certificate.
pub fn detect_ese(sd: &SpectralData, cert: &PstCertificate, tol: f64) -> Result<EseReport> {
    let (transfer_time, odd) = match (cert.has_pst, cert.transfer_time, &cert.gap_odd_integers) {
        (true, Some(t), Some(odd)) => (t, odd),
        _ => {
            return Err(Error::Domain(
                "early state exclusion needs a PST certificate".into(),
            ))
        }
    };
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "zero tolerance {tol:e} must be positive"
        )));
    }
    check_consistent(sd, transfer_time, odd)?;

    let margin = EDGE_MARGIN * transfer_time;
    let resolution = transfer_time.min(2.0 * PI / sd.bandwidth()) / SCAN_POINTS_PER_PERIOD;
    let x0 = |t: f64| amplitude(sd, Site::First, t).norm();
    let scan = Scan::new(&x0, margin, transfer_time - margin, resolution);

    // Near a high-order zero at T₀ the amplitude sinks below rounding noise
    // well before T₀; minima in that terminal basin belong to the transfer
    // itself.
    let basin_start = scan
        .values
        .iter()
        .rposition(|&v| v >= NOISE_FLOOR)
        .map_or(0, |i| i + 1);

    let mut report = EseReport {
        transfer_time,
        zeros: Vec::new(),
        unresolved: Vec::new(),
        early_pst_anomalies: Vec::new(),
        scan_resolution: resolution,
        tolerance: tol,
    };
    for m in scan.minima(&x0) {
        if m.index >= basin_start {
            break;
        }
        if m.value >= UNRESOLVED_THRESHOLD || m.time <= 0.0 || m.time >= transfer_time - tol {
            continue;
        }
        let zero = EseZero {
            time: m.time,
            residual: m.value,
            last_site_modulus: amplitude(sd, Site::Last, m.time).norm(),
        };
        if m.value >= tol || m.bracket_floor < NOISE_FLOOR {
            report.unresolved.push(zero);
        } else if zero.last_site_modulus >= 1.0 - EXCLUSION_MARGIN {
            report.early_pst_anomalies.push(zero);
        } else {
            report.zeros.push(zero);
        }
    }
    Ok(report)
}

fn check_consistent(sd: &SpectralData, transfer_time: f64, odd: &[u64]) -> Result<()> {
    if odd.len() + 1 != sd.len() {
        return Err(Error::InvalidSpectrum(format!(
            "certificate covers {} gaps but spectrum has {}",
            odd.len(),
            sd.len() - 1
        )));
    }
    let delta = PI / transfer_time;
    for (k, (pair, n)) in sd.eigenvalues().windows(2).zip(odd).enumerate() {
        let gap = pair[1] - pair[0];
        let expected = (2 * n + 1) as f64 * delta;
        if (gap - expected).abs() > PST_TOLERANCE * gap {
            return Err(Error::InvalidSpectrum(format!(
                "gap {k} = {gap} does not match the certificate ({expected})"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub min_value: f64,
    pub argmin: f64,
}

/// Global minimum of `|x_0(t)|` over `[t0, t1]`.
pub fn min_overlap(sd: &SpectralData, t0: f64, t1: f64) -> Result<Overlap> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::Domain(format!(
            "interval [{t0}, {t1}] must have t0 < t1"
        )));
    }
    let x0 = |t: f64| amplitude(sd, Site::First, t).norm();
    let span = t1 - t0;
    let period = if sd.bandwidth() > 0.0 {
        2.0 * PI / sd.bandwidth()
    } else {
        span
    };
    let resolution = span.min(period) / SCAN_POINTS_PER_PERIOD;

    let mut best = Overlap {
        min_value: x0(t0),
        argmin: t0,
    };
    let end = Overlap {
        min_value: x0(t1),
        argmin: t1,
    };
    if end.min_value < best.min_value {
        best = end;
    }
    for m in Scan::new(&x0, t0, t1, resolution).minima(&x0) {
        if m.value < best.min_value {
            best = Overlap {
                min_value: m.value,
                argmin: m.time,
            };
        }
    }
    Ok(best)
}

/// Uniform samples of `f` on `[a, b]` with spacing at most `resolution`.
struct Scan {
    times: Vec<f64>,
    values: Vec<f64>,
    spacing: f64,
}

struct Minimum {
    index: usize,
    time: f64,
    value: f64,
    /// Smaller of the two sampled values bracketing the minimum.
    bracket_floor: f64,
}

impl Scan {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, resolution: f64) -> Self {
        let cells = ((b - a) / resolution).ceil().max(2.0) as usize;
        let spacing = (b - a) / cells as f64;
        let times: Vec<f64> = (0..=cells)
            .map(|i| {
                if i == cells {
                    b
                } else {
                    a + i as f64 * spacing
                }
            })
            .collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self {
            times,
            values,
            spacing,
        }
    }

    /// Interior discrete local minima, each refined by golden-section search
    /// over its two neighbouring cells. Sorted by time.
    fn minima<F: Fn(f64) -> f64>(&self, f: &F) -> Vec<Minimum> {
        let v = &self.values;
        let mut out: Vec<Minimum> = Vec::new();
        for i in 1..v.len() - 1 {
            if !(v[i] <= v[i - 1] && v[i] < v[i + 1]) {
                continue;
            }
            let (time, value) = golden_section(f, self.times[i - 1], self.times[i + 1]);
            let m = Minimum {
                index: i,
                time,
                value,
                bracket_floor: v[i - 1].min(v[i + 1]),
            };
            if let Some(last) = out.last() {
                if (m.time - last.time).abs() < self.spacing {
                    if m.value < last.value {
                        out.pop();
                    } else {
                        continue;
                    }
                }
            }
            out.push(m);
        }
        out
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn req(v: &[f64]) -> SpectrumRequest {
        SpectrumRequest::new(v.to_vec()).unwrap()
    }

    #[test]
    fn four_by_four_certificate() {
        let cert = detect_pst(&req(&[-2.5, -1.5, 1.5, 2.5]), PST_TOLERANCE).unwrap();
        assert!(cert.has_pst);
        assert_abs_diff_eq!(cert.transfer_time.unwrap(), PI, epsilon = 1e-14);
        assert_eq!(cert.gap_odd_integers.unwrap(), vec![0, 1, 0]);
        assert_abs_diff_eq!(cert.phase.unwrap().norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn unit_gap_certificate() {
        for n in 1..=10usize {
            let spectrum: Vec<f64> = (0..=n).map(|s| s as f64 - n as f64 / 2.0).collect();
            let cert = detect_pst(&req(&spectrum), PST_TOLERANCE).unwrap();
            assert!(cert.has_pst);
            assert_abs_diff_eq!(cert.transfer_time.unwrap(), PI, epsilon = 1e-13);
            assert!(cert.gap_odd_integers.unwrap().iter().all(|&k| k == 0));
        }
    }

    #[test]
    fn earliest_time_uses_common_odd_divisor() {
        // gaps 3 and 9 share the odd factor 3
        let cert = detect_pst(&req(&[0.0, 3.0, 12.0]), PST_TOLERANCE).unwrap();
        assert_abs_diff_eq!(cert.transfer_time.unwrap(), PI / 3.0, epsilon = 1e-14);
        assert_eq!(cert.gap_odd_integers.unwrap(), vec![0, 1]);
        // gaps 3 and 5 only share 1
        let cert = detect_pst(&req(&[0.0, 3.0, 8.0]), PST_TOLERANCE).unwrap();
        assert_abs_diff_eq!(cert.transfer_time.unwrap(), PI, epsilon = 1e-14);
        assert_eq!(cert.gap_odd_integers.unwrap(), vec![1, 2]);
    }

    #[test]
    fn even_ratio_has_no_pst() {
        // oracle: every δ = g_min / (2j + 1), j ≤ 10⁴, leaves 1.5 / δ off the odd integers
        let gaps = [1.0, 1.5];
        for j in 0..=MAX_ODD_INDEX {
            let delta = 1.0 / (2 * j + 1) as f64;
            let all_odd = gaps.iter().all(|g| {
                let q = g / delta;
                let nearest = q.round();
                (q - nearest).abs() <= 1e-8 * q && nearest as u64 % 2 == 1
            });
            assert!(!all_odd, "j = {j}");
        }
        let cert = detect_pst(&req(&[0.0, 1.0, 2.5]), PST_TOLERANCE).unwrap();
        assert!(!cert.has_pst);
        assert!(cert.transfer_time.is_none());
    }

    #[test]
    fn odd_ratios_beyond_search_bound_are_undecidable() {
        // 151/149 and 163/157 are odd over odd, but the common odd divisor
        // needs 2j + 1 = 149 · 157 > 2 · 10⁴ + 1
        let r = req(&[
            0.0,
            1.0,
            1.0 + 151.0 / 149.0,
            1.0 + 151.0 / 149.0 + 163.0 / 157.0,
        ]);
        assert!(matches!(
            detect_pst(&r, PST_TOLERANCE),
            Err(Error::PstUndecidable { .. })
        ));
    }

    #[test]
    fn tolerance_domain() {
        let r = req(&[-0.5, 0.5]);
        assert!(detect_pst(&r, 0.0).is_err());
        assert!(detect_pst(&r, 1e-3).is_err());
        assert!(detect_pst(&r, 1e-4).is_ok());
    }

    #[test]
    fn ese_requires_certificate() {
        let sd = SpectralData::new(vec![-0.5, 0.5], vec![0.5, 0.5]).unwrap();
        assert!(detect_ese(&sd, &PstCertificate::none(), ZERO_TOLERANCE).is_err());
        let wrong = PstCertificate {
            has_pst: true,
            transfer_time: Some(PI / 3.0),
            gap_odd_integers: Some(vec![0]),
            phase: None,
        };
        assert!(matches!(
            detect_ese(&sd, &wrong, ZERO_TOLERANCE),
            Err(Error::InvalidSpectrum(_))
        ));
    }

    #[test]
    fn four_by_four_single_exclusion() {
        let r = req(&[-2.5, -1.5, 1.5, 2.5]);
        let sd = persymmetric_weights(&r).unwrap();
        let cert = detect_pst(&r, PST_TOLERANCE).unwrap();
        let report = detect_ese(&sd, &cert, ZERO_TOLERANCE).unwrap();
        assert_eq!(report.zeros.len(), 1);
        assert!(report.unresolved.is_empty());
        assert!(report.early_pst_anomalies.is_empty());
        let z = report.zeros[0];
        assert_abs_diff_eq!(z.time, (2.0f64 / 3.0).acos(), epsilon = 1e-9);
        assert!(z.residual < ZERO_TOLERANCE);
        assert_abs_diff_eq!(z.last_site_modulus, 4.0 / 6f64.powf(1.5), epsilon = 1e-9);
    }

    #[test]
    fn equidistant_has_no_exclusion() {
        for n in 1..=12usize {
            let r = req(&(0..=n)
                .map(|s| s as f64 - n as f64 / 2.0)
                .collect::<Vec<_>>());
            let sd = persymmetric_weights(&r).unwrap();
            let cert = detect_pst(&r, PST_TOLERANCE).unwrap();
            let report = detect_ese(&sd, &cert, ZERO_TOLERANCE).unwrap();
            assert!(!report.has_ese(), "N = {n}: {:?}", report.zeros);
            assert!(report.early_pst_anomalies.is_empty());
        }
    }

    #[test]
    fn min_overlap_cases() {
        let r = req(&[-1.0, 0.0, 1.0]);
        let sd = persymmetric_weights(&r).unwrap();
        let got = min_overlap(&sd, 0.1, PI - 0.1).unwrap();
        // oracle: x_0 = cos²(t/2), decreasing on (0, π)
        assert_abs_diff_eq!(
            got.min_value,
            ((PI - 0.1) / 2.0).cos().powi(2),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(got.argmin, PI - 0.1, epsilon = 1e-12);

        let r = req(&[-2.5, -1.5, 1.5, 2.5]);
        let sd = persymmetric_weights(&r).unwrap();
        let got = min_overlap(&sd, 0.5, 1.0).unwrap();
        assert!(got.min_value < 1e-8);
        assert!(min_overlap(&sd, 0.0, 0.0).is_err());
    }

    #[test]
    fn golden_section_finds_v_minimum() {
        let (t, v) = golden_section(&|t: f64| (t - 0.3).abs(), 0.0, 1.0);
        assert!((t - 0.3).abs() < 1e-14);
        assert!(v < 1e-14);
    }

    #[test]
    fn rational_recognition() {
        assert_eq!(best_rational(1.5, 1e-8, 20001), Some((3, 2)));
        assert_eq!(best_rational(3.0, 1e-8, 20001), Some((3, 1)));
        assert_eq!(best_rational(2f64.sqrt(), 1e-8, 20001), Some((8119, 5741)));
        assert_eq!(best_rational(2f64.sqrt(), 1e-8, 1000), None);
    }
}
