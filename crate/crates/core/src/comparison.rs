//! Model comparison functions.
//!
//! Conventions: `sn`, [`model_ball_volume`] and [`model_sphere_area`] take
//! the *sectional* curvature `K` of the simply connected model, while
//! [`jacobian`] takes the Ricci lower bound `K` together with `N` and
//! internally uses the sectional parameter `K/(N−1)`. Callers that hold a
//! Ricci bound and need `v(N, ·, r)` pass `K/(N−1)` explicitly, see
//! [`CurvatureParams`].

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, cosh, pow, sin, sinh, sqrt, tgamma};
use serde::{Deserialize, Serialize};

use crate::numeric::integrate;
use crate::{Error, Result, VerificationReport};

/// Below this value of `|k| r²` the trigonometric/hyperbolic branches are
/// replaced by their Taylor expansions around `k = 0`.
const SERIES_THRESHOLD: f64 = 1e-6;

const QUAD_ABS_TOL: f64 = 1e-12;
const QUAD_REL_TOL: f64 = 1e-13;

/// Curvature-dimension parameters of a comparison model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureParams {
    /// Ricci lower bound.
    #[serde(rename = "K")]
    pub ricci: f64,
    /// Dimension upper bound, `N >= 1`.
    #[serde(rename = "N")]
    pub dim: f64,
}

impl CurvatureParams {
    pub fn new(ricci: f64, dim: f64) -> Result<Self> {
        if !(dim >= 1.0) {
            return Err(Error::invalid("N", format!("must be >= 1, got {dim}")));
        }
        Ok(CurvatureParams { ricci, dim })
    }

    /// Sectional parameter `K/(N−1)`; zero when `N = 1`.
    pub fn sectional(&self) -> f64 {
        if self.dim > 1.0 {
            self.ricci / (self.dim - 1.0)
        } else {
            0.0
        }
    }
}

/// A model function value together with its `r`-derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonValue {
    pub value: f64,
    pub derivative: f64,
}

/// `sn_K(r)`: `sinh(√−K r)/√−K`, `r` or `sin(√K r)/√K`.
pub fn sn(k: f64, r: f64) -> f64 {
    let x = k * r * r;
    if x.abs() < SERIES_THRESHOLD {
        // r − K r³/6 + K² r⁵/120
        return r * (1.0 - x / 6.0 + x * x / 120.0);
    }
    if k < 0.0 {
        let s = sqrt(-k);
        sinh(s * r) / s
    } else {
        let s = sqrt(k);
        sin(s * r) / s
    }
}

/// Solutions `(cos_k(r), sin_k(r))` of `v'' + k v = 0` with unit initial data.
///
/// Derivatives follow from the pair: `cos_k' = −k sin_k`, `sin_k' = cos_k`.
pub fn cos_sin_k(k: f64, r: f64) -> (f64, f64) {
    let x = k * r * r;
    if x.abs() < SERIES_THRESHOLD {
        let c = 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0;
        return (c, sn(k, r));
    }
    if k < 0.0 {
        let s = sqrt(-k);
        (cosh(s * r), sinh(s * r) / s)
    } else {
        let s = sqrt(k);
        (cos(s * r), sin(s * r) / s)
    }
}

/// `s_{k,λ}(r) = cos_k(r) − λ sin_k(r)` and its derivative.
pub fn s_lambda(k: f64, lambda: f64, r: f64) -> ComparisonValue {
    if k == 0.0 {
        return ComparisonValue {
            value: 1.0 - lambda * r,
            derivative: -lambda,
        };
    }
    let (c, s) = cos_sin_k(k, r);
    ComparisonValue {
        value: c - lambda * s,
        derivative: -k * s - lambda * c,
    }
}

/// Heintze–Karcher Jacobian `J_{H,K,N}(r) = (cos_{K/(N−1)} + H/(N−1) sin_{K/(N−1)})₊^{N−1}`.
///
/// `k` is the Ricci lower bound.
pub fn jacobian(h: f64, k: f64, n: f64, r: f64) -> Result<f64> {
    if !(n > 1.0) {
        return Err(Error::invalid("N", format!("Jacobian needs N > 1, got {n}")));
    }
    let m = n - 1.0;
    let base = s_lambda(k / m, -h / m, r).value;
    Ok(if base > 0.0 { pow(base, m) } else { 0.0 })
}

/// Volume `ω_N = π^{N/2} / Γ(N/2 + 1)` of the unit ball, for real `N`.
pub fn unit_ball_volume(n: f64) -> f64 {
    // exact small cases avoid Γ rounding in the most common dimensions
    match n {
        1.0 => 2.0,
        2.0 => PI,
        3.0 => 4.0 * PI / 3.0,
        _ => pow(PI, n / 2.0) / tgamma(n / 2.0 + 1.0),
    }
}

/// Diameter `π/√K` of the positively curved model, infinite otherwise.
pub fn model_diameter(k: f64) -> f64 {
    if k > 0.0 {
        PI / sqrt(k)
    } else {
        f64::INFINITY
    }
}

fn check_radius(k: f64, r: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::invalid("r", format!("must be >= 0, got {r}")));
    }
    let d = model_diameter(k);
    // allow the diameter itself up to rounding
    if r > d * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::BeyondDiameter { r, diameter: d });
    }
    Ok(())
}

/// Area `s(N, K, r) = N ω_N sn_K(r)^{N−1}` of the model sphere (sectional `K`).
pub fn model_sphere_area(n: f64, k: f64, r: f64) -> Result<f64> {
    check_radius(k, r)?;
    let s = sn(k, r).max(0.0);
    if n == 1.0 {
        return Ok(2.0);
    }
    Ok(n * unit_ball_volume(n) * pow(s, n - 1.0))
}

/// Volume `v(N, K, r) = ∫₀ʳ N ω_N sn_K^{N−1}` of the model ball (sectional `K`).
///
/// Closed form `ω_N r^N` for `K = 0`, adaptive Gauss–Kronrod otherwise.
pub fn model_ball_volume(n: f64, k: f64, r: f64) -> Result<f64> {
    check_radius(k, r)?;
    if !(n >= 1.0) {
        return Err(Error::invalid("N", format!("must be >= 1, got {n}")));
    }
    let omega = unit_ball_volume(n);
    if k == 0.0 {
        return Ok(omega * pow(r, n));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let r = r.min(model_diameter(k));
    let c = n * omega;
    let q = integrate(
        |s| c * pow(sn(k, s).max(0.0), n - 1.0),
        0.0,
        r,
        QUAD_ABS_TOL,
        QUAD_REL_TOL,
    );
    Ok(q.value)
}

/// Ball-volume ratios `vol(r) / v(N, K, r)`.
pub fn bishop_gromov_ratios(volume_samples: &[(f64, f64)], n: f64, k: f64) -> Result<Vec<f64>> {
    volume_samples
        .iter()
        .map(|&(r, vol)| Ok(vol / model_ball_volume(n, k, r)?))
        .collect()
}

/// Monotonicity tolerance `max(1e−9, 1e−6 · value)` for sampled ratios.
pub fn monotone_tolerance(value: f64) -> f64 {
    1e-9_f64.max(1e-6 * value.abs())
}

/// Checks Bishop–Gromov monotonicity on sampled ball data.
///
/// `volume_samples` holds `(r, vol(B_r))` pairs with strictly increasing
/// radii. Verifies that `vol(r)/v(N,K,r)` is nonincreasing; when
/// `perimeter_samples` is supplied (one value per radius) also verifies
/// `Per(B_r)/s(N,K,r) <= vol(B_r)/v(N,K,r)`. `K` is sectional. Violations are
/// measured in ratio units; each step is allowed [`monotone_tolerance`] of
/// the local ratio, and the report's `tol` records the relative part.
pub fn bishop_gromov_report(
    volume_samples: &[(f64, f64)],
    perimeter_samples: Option<&[f64]>,
    n: f64,
    k: f64,
) -> Result<VerificationReport> {
    if volume_samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::Malformed("radii must be strictly increasing".into()));
    }
    if volume_samples.iter().any(|&(r, v)| !(r > 0.0) || !(v >= 0.0)) {
        return Err(Error::Malformed("radii must be positive and volumes nonnegative".into()));
    }
    if let Some(p) = perimeter_samples {
        if p.len() != volume_samples.len() {
            return Err(Error::Malformed(format!(
                "{} perimeter samples for {} radii",
                p.len(),
                volume_samples.len()
            )));
        }
    }
    let ratios = bishop_gromov_ratios(volume_samples, n, k)?;
    let mut report = VerificationReport::new("bishop_gromov", 1e-6);
    for i in 1..ratios.len() {
        let increase = ratios[i] - ratios[i - 1];
        report.observe_with(increase, volume_samples[i].0, monotone_tolerance(ratios[i - 1]));
    }
    if let Some(perims) = perimeter_samples {
        for (i, (&(r, _), &per)) in volume_samples.iter().zip(perims).enumerate() {
            let area_ratio = per / model_sphere_area(n, k, r)?;
            report.observe_with(area_ratio - ratios[i], r, monotone_tolerance(ratios[i]));
        }
    }
    if ratios.len() == 1 && perimeter_samples.is_none() {
        report.observe(0.0, volume_samples[0].0);
    }
    Ok(report)
}
