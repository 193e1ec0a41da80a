//! Mean-curvature barrier certificates and Heintze–Karcher equidistant bounds.
//!
//! A certificate is data: a barrier value `c` for a set with given perimeter
//! and volume, checked for consistency against the two-sided bounds
//! `c_lo = (N−1)(N ω_N avr / P)^{1/(N−1)} <= c <= c_hi = (N−1)/N · P/V`
//! that hold in nonnegatively curved spaces.

use alloc::format;
use alloc::vec::Vec;

use libm::{atan2, atanh, pow, sqrt};
use core::f64::consts::PI;
use serde::{Deserialize, Serialize};

use crate::comparison::{jacobian, unit_ball_volume};
use crate::numeric::integrate;
use crate::{Error, Result};

/// Default relative tolerance for rigidity detection.
pub const RIGIDITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierCertificate {
    pub c: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub perimeter: f64,
    pub volume: f64,
    pub avr: Option<f64>,
    pub c_lo: f64,
    pub c_hi: f64,
    /// `(N−1)/c`; infinite when `c = 0`.
    pub inscribed_radius_bound: f64,
    /// Both bounds agree within [`RIGIDITY_TOL`]: the set is a tip ball.
    pub rigid: bool,
}

impl BarrierCertificate {
    /// The certificate with barrier value `c` in place of the default `c_lo`.
    pub fn with_barrier(mut self, c: f64) -> Self {
        self.c = c;
        self.inscribed_radius_bound = radius_for(self.n, c);
        self
    }
}

fn radius_for(n: f64, c: f64) -> f64 {
    if c > 0.0 {
        (n - 1.0) / c
    } else {
        f64::INFINITY
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Two-sided barrier interval for a set of given perimeter and volume.
///
/// The certificate's `c` defaults to `c_lo` (0 without `avr`); replace it
/// with [`BarrierCertificate::with_barrier`] when a barrier is known.
pub fn barrier_bounds(n: f64, perimeter: f64, volume: f64, avr: Option<f64>) -> Result<BarrierCertificate> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Error::invalid("N", format!("must be >= 2, got {n}")));
    }
    if !(perimeter > 0.0) || !perimeter.is_finite() {
        return Err(Error::invalid("perimeter", format!("must be positive, got {perimeter}")));
    }
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::invalid("volume", format!("must be positive, got {volume}")));
    }
    if let Some(a) = avr {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::invalid("avr", format!("must lie in [0, 1], got {a}")));
        }
    }
    let c_hi = (n - 1.0) / n * perimeter / volume;
    let c_lo = match avr {
        Some(a) => (n - 1.0) * pow(n * unit_ball_volume(n) * a / perimeter, 1.0 / (n - 1.0)),
        None => 0.0,
    };
    let rigid = avr.is_some() && relative_gap(c_hi, c_lo) <= RIGIDITY_TOL;
    Ok(BarrierCertificate {
        c: c_lo,
        n,
        k: 0.0,
        perimeter,
        volume,
        avr,
        c_lo,
        c_hi,
        inscribed_radius_bound: radius_for(n, c_lo),
        rigid,
    })
}

/// `(N−1)/c`: no point of the set is farther than this from its complement.
pub fn inscribed_radius_bound(n: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid("c", format!("must be positive, got {c}")));
    }
    if !(n >= 2.0) {
        return Err(Error::invalid("N", format!("must be >= 2, got {n}")));
    }
    Ok((n - 1.0) / c)
}

/// Side of the hypersurface on which equidistant sets are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Outside the set; Jacobian `J_{c,K,N}`.
    Outward,
    /// Inside the set; Jacobian `J_{−c,K,N}`.
    Inward,
}

impl Side {
    fn signed(self, c: f64) -> f64 {
        match self {
            Side::Outward => c,
            Side::Inward => -c,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    Ok(())
}

/// `J_{±c,K,N}(t) · Per(E)` bounding the perimeter of the `t`-equidistant set.
pub fn equidistant_perimeter_bound(per: f64, c: f64, k: f64, n: f64, t: f64, side: Side) -> Result<f64> {
    check_t(t)?;
    Ok(per * jacobian(side.signed(c), k, n, t)?)
}

/// `Per(E) ∫₀ᵗ J_{±c,K,N}` bounding the volume of the `t`-neighborhood
/// outside (or inside) the set. Closed form for `K = 0`, adaptive quadrature
/// otherwise.
pub fn equidistant_volume_bound(per: f64, c: f64, k: f64, n: f64, t: f64, side: Side) -> Result<f64> {
    check_t(t)?;
    if !(n > 1.0) {
        return Err(Error::invalid("N", format!("must be > 1, got {n}")));
    }
    let h = side.signed(c);
    if k == 0.0 {
        let m = n - 1.0;
        if h == 0.0 {
            return Ok(per * t);
        }
        // ∫₀ᵗ (1 + h r/m)₊^m dr
        let end = (1.0 + h * t / m).max(0.0);
        return Ok(per * m / (n * h) * (pow(end, n) - 1.0));
    }
    jacobian(h, k, n, 0.0)?;
    // integrate piecewise between zeros of the bracket, where J has kinks
    let mut edges = bracket_zeros(h, k, n, t);
    edges.push(t);
    let mut total = 0.0;
    let mut lo = 0.0;
    for hi in edges {
        total += integrate(|r| jacobian(h, k, n, r).unwrap_or(0.0), lo, hi, 1e-14, 1e-13).value;
        lo = hi;
    }
    Ok(per * total)
}

/// Zeros in `(0, t)` of `cos_κ(r) + (h/(N−1)) sin_κ(r)`, `κ = K/(N−1) != 0`.
fn bracket_zeros(h: f64, k: f64, n: f64, t: f64) -> Vec<f64> {
    let m = n - 1.0;
    let (kappa, b) = (k / m, h / m);
    let mut out = Vec::new();
    if kappa > 0.0 {
        let a = sqrt(kappa);
        let mut r = atan2(a, -b) / a;
        while r < t {
            if r > 0.0 {
                out.push(r);
            }
            r += PI / a;
        }
    } else {
        let a = sqrt(-kappa);
        if b < 0.0 && a < -b {
            let r = atanh(-a / b) / a;
            if r < t {
                out.push(r);
            }
        }
    }
    out
}

/// `(N V c/(N−1))^{(N−1)/N} · (avr ω_N N (N−1)^{N−1} / c^{N−1})^{1/N}`.
///
/// The product of the two barrier bounds raised to complementary powers;
/// independent of `c` and equal to the sharp isoperimetric bound.
pub fn geometric_mean_bound(n: f64, volume: f64, avr: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid("c", format!("must be positive, got {c}")));
    }
    let m = n - 1.0;
    let first = pow(n * volume * c / m, m / n);
    let second = pow(avr * unit_ball_volume(n) * n * pow(m, m) / pow(c, m), 1.0 / n);
    Ok(first * second)
}

/// Consistency of a certificate and detection of the equality case.
///
/// Returns `true` when `c` equals `c_hi` within `tol` (relative): the set is
/// then isometric to a tip ball of radius `(N−1)/c`. A negative `c`, `c = 0`
/// with positive `avr`, or `c` outside `[c_lo − tol, c_hi + tol]` (tolerances
/// relative to `c_hi`) is an inconsistent certificate.
pub fn barrier_rigidity_check(cert: &BarrierCertificate, tol: f64) -> Result<bool> {
    let c = cert.c;
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InconsistentCertificate(format!("barrier c = {c} must be >= 0")));
    }
    if c == 0.0 && cert.avr.is_some_and(|a| a > 0.0) {
        return Err(Error::InconsistentCertificate(format!(
            "positive avr {} forces c > 0",
            cert.avr.unwrap_or_default()
        )));
    }
    let slack = tol * cert.c_hi.abs().max(f64::MIN_POSITIVE);
    if c < cert.c_lo - slack || c > cert.c_hi + slack {
        return Err(Error::InconsistentCertificate(format!(
            "c = {c} outside [{}, {}]",
            cert.c_lo, cert.c_hi
        )));
    }
    Ok((c - cert.c_hi).abs() <= slack)
}
