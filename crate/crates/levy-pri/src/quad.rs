//! Quadrature helpers and the dyadic-band convergence/divergence protocol
//! shared by the integral criteria.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and budget for one-dimensional quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_evals: 1_000_000 }
    }
}

/// Outcome of an improper-integral evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IntegralStatus {
    Convergent { value: f64, abs_error_estimate: f64 },
    Divergent { local_exponent_estimate: f64 },
    Indeterminate,
}

impl IntegralStatus {
    pub fn is_convergent(&self) -> bool {
        matches!(self, IntegralStatus::Convergent { .. })
    }
    pub fn is_divergent(&self) -> bool {
        matches!(self, IntegralStatus::Divergent { .. })
    }
    pub fn value(&self) -> Option<f64> {
        match self {
            IntegralStatus::Convergent { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Result of a dyadic-band integral with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub status: IntegralStatus,
    /// Mass of band k = 1, 2, ... (band k covers [2^-k, 2^-k+1)).
    pub band_masses: Vec<f64>,
    /// Nondecreasing partial sums over bands (atom contribution included in
    /// the first entry when present).
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of log band mass over the fit window, when fitted.
    pub fitted_slope: Option<f64>,
    /// For exact power-law inputs, the known exponent of the integrand
    /// (diagnostic cross-check; classification never reads it).
    pub analytic_exponent: Option<f64>,
}

/// Protocol constants for the band classifier.
#[derive(Debug, Clone, Copy)]
pub struct BandProtocol {
    pub k_max: u32,
    pub fit_window: usize,
    /// Declare divergent when the fitted slope is at or above this (band
    /// masses not decaying). Default −0.02·ln 2.
    pub divergence_slope: f64,
    /// Early exit to convergent when the extrapolated remaining tail falls
    /// below this absolute tolerance.
    pub tail_abs_tol: f64,
    /// Indeterminate when the log-linear fit has RMS residual above this.
    pub fit_rms_max: f64,
}

impl Default for BandProtocol {
    fn default() -> Self {
        Self {
            k_max: 60,
            fit_window: 20,
            divergence_slope: -0.02 * std::f64::consts::LN_2,
            tail_abs_tol: 1e-10,
            fit_rms_max: 0.25,
        }
    }
}

/// One band's contribution, produced by the integrand-specific driver.
#[derive(Debug, Clone, Copy)]
pub struct BandMass {
    pub mass: f64,
    pub quad_error: f64,
    /// True when no measure mass remains below this band; the sum is exact.
    pub support_exhausted: bool,
}

/// Run the dyadic-band protocol. `atom_term` is any contribution sitting at
/// the upper endpoint 1 (outside the half-open bands); `band` yields the mass
/// of band k over [2^-k, 2^-(k-1)).
pub fn classify_dyadic_bands(
    atom_term: f64,
    protocol: &BandProtocol,
    mut band: impl FnMut(u32) -> Result<BandMass>,
) -> Result<IntegralResult> {
    let mut masses = Vec::with_capacity(protocol.k_max as usize);
    let mut partials = Vec::with_capacity(protocol.k_max as usize);
    let mut sum = atom_term;
    let mut quad_err = 0.0;
    let mut exhausted = false;

    for k in 1..=protocol.k_max {
        let bm = band(k)?;
        let m = bm.mass.max(0.0);
        masses.push(m);
        sum += m;
        quad_err += bm.quad_error.abs();
        partials.push(sum);
        if bm.support_exhausted {
            exhausted = true;
            break;
        }
        if masses.len() >= protocol.fit_window {
            if let Some((slope, _rms)) = log_linear_fit(&masses, protocol.fit_window) {
                if slope < 0.0 {
                    let tail = geometric_tail(*masses.last().unwrap(), slope);
                    if tail < protocol.tail_abs_tol {
                        return Ok(IntegralResult {
                            status: IntegralStatus::Convergent {
                                value: sum + tail,
                                abs_error_estimate: quad_err + tail,
                            },
                            band_masses: masses,
                            partial_sums: partials,
                            fitted_slope: Some(slope),
                            analytic_exponent: None,
                        });
                    }
                }
            }
        }
    }

    if exhausted {
        return Ok(IntegralResult {
            status: IntegralStatus::Convergent { value: sum, abs_error_estimate: quad_err },
            band_masses: masses,
            partial_sums: partials,
            fitted_slope: None,
            analytic_exponent: None,
        });
    }

    // Budget of k_max bands spent: decide from the decay of the band masses.
    let fit = log_linear_fit(&masses, protocol.fit_window);
    let status = match fit {
        None => IntegralStatus::Indeterminate,
        Some((_, rms)) if rms > protocol.fit_rms_max => IntegralStatus::Indeterminate,
        Some((slope, _)) if slope >= protocol.divergence_slope => IntegralStatus::Divergent {
            local_exponent_estimate: -slope / std::f64::consts::LN_2 - 1.0,
        },
        Some((slope, _)) => {
            let tail = geometric_tail(*masses.last().unwrap(), slope);
            IntegralStatus::Convergent {
                value: sum + tail,
                abs_error_estimate: quad_err + 0.25 * tail,
            }
        }
    };
    Ok(IntegralResult {
        status,
        band_masses: masses,
        partial_sums: partials,
        fitted_slope: fit.map(|(s, _)| s),
        analytic_exponent: None,
    })
}

/// Sum of the geometric extrapolation of all bands past the last one.
fn geometric_tail(last_mass: f64, slope: f64) -> f64 {
    let r = slope.exp();
    if r >= 1.0 {
        f64::INFINITY
    } else {
        last_mass * r / (1.0 - r)
    }
}

/// Least-squares fit of log(mass) against band index over the trailing
/// window. Returns (slope, rms residual); `None` when any mass in the window
/// is nonpositive (unless all are zero, which callers treat separately).
fn log_linear_fit(masses: &[f64], window: usize) -> Option<(f64, f64)> {
    let n = masses.len();
    let w = window.min(n);
    let tail = &masses[n - w..];
    if tail.iter().any(|&m| m <= 0.0) || w < 2 {
        return None;
    }
    let logs: Vec<f64> = tail.iter().map(|m| m.ln()).collect();
    let xbar = (w as f64 - 1.0) / 2.0;
    let ybar = logs.iter().sum::<f64>() / w as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, y) in logs.iter().enumerate() {
        let dx = i as f64 - xbar;
        sxx += dx * dx;
        sxy += dx * (y - ybar);
    }
    let slope = sxy / sxx;
    let mut ss = 0.0;
    for (i, y) in logs.iter().enumerate() {
        let fit = ybar + slope * (i as f64 - xbar);
        ss += (y - fit) * (y - fit);
    }
    Some((slope, (ss / w as f64).sqrt()))
}

/// Adaptive Simpson quadrature on [a, b].
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
    budget: &mut usize,
) -> Result<(f64, f64)> {
    if a >= b {
        return Ok((0.0, 0.0));
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    *budget = budget.saturating_sub(3);
    let whole = simpson(a, b, fa, fm, fb);
    let mut total = 0.0;
    let mut err_total = 0.0;
    let tol = cfg.abs_tol.max(cfg.rel_tol * whole.abs());
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50, budget, &mut total, &mut err_total)?;
    Ok((total, err_total))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
    total: &mut f64,
    err_total: &mut f64,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    if *budget < 2 {
        return Err(Error::Budget("quadrature evaluation budget exhausted".into()));
    }
    let flm = f(lm);
    let frm = f(rm);
    *budget -= 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = (left + right - whole) / 15.0;
    if depth == 0 || err.abs() <= tol || (b - a) < 1e-15 * (a.abs() + b.abs() + 1.0) {
        *total += left + right + err;
        *err_total += err.abs();
        return Ok(());
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget, total, err_total)?;
    simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget, total, err_total)
}

/// Adaptive Simpson split at the supplied interior breakpoints.
pub fn adaptive_simpson_with_breaks(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
    budget: &mut usize,
) -> Result<(f64, f64)> {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    let mut total = 0.0;
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let (v, e) = adaptive_simpson(f, w[0], w[1], cfg, budget)?;
        total += v;
        err += e;
    }
    Ok((total, err))
}

/// Improper integral over (0, b] with a possible endpoint singularity at 0:
/// geometric subdivision toward 0, stopping when segment contributions are
/// negligible or the integrand's support is exhausted.
pub fn graded_integral_to_zero(
    f: &dyn Fn(f64) -> f64,
    b: f64,
    cfg: &QuadConfig,
    budget: &mut usize,
) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut err = 0.0;
    let mut hi = b;
    for _ in 0..200 {
        let lo = hi * 0.5;
        let (v, e) = adaptive_simpson(f, lo, hi, cfg, budget)?;
        total += v;
        err += e;
        if v.abs() < cfg.abs_tol.max(cfg.rel_tol * total.abs()) && hi < b {
            return Ok((total, err + v.abs()));
        }
        hi = lo;
    }
    // Whatever is left below 2^-200 b is beyond double precision relevance.
    Ok((total, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomial_exact() {
        let cfg = QuadConfig::default();
        let mut budget = cfg.max_evals;
        let (v, _) = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, &cfg, &mut budget).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn graded_handles_integrable_singularity() {
        let cfg = QuadConfig::default();
        let mut budget = cfg.max_evals;
        let (v, _) = graded_integral_to_zero(&|x| x.powf(-0.5), 1.0, &cfg, &mut budget).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-7);
    }

    #[test]
    fn band_protocol_geometric_decay_convergent() {
        // Band masses 2^-k sum to 1.
        let res = classify_dyadic_bands(0.0, &BandProtocol::default(), |k| {
            Ok(BandMass { mass: (2f64).powi(-(k as i32)), quad_error: 0.0, support_exhausted: false })
        })
        .unwrap();
        match res.status {
            IntegralStatus::Convergent { value, .. } => assert_relative_eq!(value, 1.0, max_relative = 1e-9),
            other => panic!("expected convergent, got {other:?}"),
        }
    }

    #[test]
    fn band_protocol_flat_divergent() {
        let res = classify_dyadic_bands(0.0, &BandProtocol::default(), |_| {
            Ok(BandMass { mass: 0.7, quad_error: 0.0, support_exhausted: false })
        })
        .unwrap();
        match res.status {
            IntegralStatus::Divergent { local_exponent_estimate } => {
                assert_relative_eq!(local_exponent_estimate, -1.0, epsilon = 1e-9);
            }
            other => panic!("expected divergent, got {other:?}"),
        }
    }

    #[test]
    fn band_protocol_growing_divergent_exponent() {
        // Masses ∝ 2^{0.3 k} correspond to integrand exponent −1.3.
        let res = classify_dyadic_bands(0.0, &BandProtocol::default(), |k| {
            Ok(BandMass { mass: (2f64).powf(0.3 * k as f64), quad_error: 0.0, support_exhausted: false })
        })
        .unwrap();
        match res.status {
            IntegralStatus::Divergent { local_exponent_estimate } => {
                assert_relative_eq!(local_exponent_estimate, -1.3, epsilon = 1e-9);
            }
            other => panic!("expected divergent, got {other:?}"),
        }
    }

    #[test]
    fn band_protocol_support_exhaustion_exact() {
        let res = classify_dyadic_bands(0.25, &BandProtocol::default(), |k| {
            Ok(BandMass {
                mass: if k == 1 { 0.5 } else { 0.0 },
                quad_error: 0.0,
                support_exhausted: k >= 2,
            })
        })
        .unwrap();
        match res.status {
            IntegralStatus::Convergent { value, abs_error_estimate } => {
                assert_relative_eq!(value, 0.75);
                assert_eq!(abs_error_estimate, 0.0);
            }
            other => panic!("expected exact convergent, got {other:?}"),
        }
    }

    #[test]
    fn partial_sums_nondecreasing() {
        let res = classify_dyadic_bands(0.0, &BandProtocol::default(), |k| {
            Ok(BandMass { mass: (2f64).powi(-(k as i32)), quad_error: 0.0, support_exhausted: false })
        })
        .unwrap();
        assert!(res.partial_sums.windows(2).all(|w| w[1] >= w[0]));
    }
}
