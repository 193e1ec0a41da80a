//! Almost-Euclidean isoperimetry to almost-Euclidean volume, for K = 0.
//!
//! If `I(v) >= (N ω_N^{1/N} − δ) v^{(N−1)/N}`, the coarea formula gives
//! `F' >= (N ω_N^{1/N} − δ) F^{(N−1)/N}` for `F(r) = |B_r(x)|` as long as
//! `F(r) <= v`, and integrating yields the volume ratio floor
//! `(1 − δ/(N ω_N^{1/N}))^N`.

use alloc::format;

use libm::{exp, log, pow};
use serde::{Deserialize, Serialize};

use crate::comparison::unit_ball_volume;
use crate::profile::cone_constant;
use crate::{Error, Result, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsRegResult {
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: f64,
    /// Largest admissible radius `½ ω_N^{1/N} v^{1/N}`.
    pub radius_cap: f64,
    /// Lower bound for `|B_r(x)| / (ω_N r^N)`.
    pub ratio_bound: f64,
}

fn check_gronwall(c: f64, exponent: f64, r: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid("c", format!("must be positive, got {c}")));
    }
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(Error::invalid("exponent", format!("must lie in (0, 1), got {exponent}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::invalid("r", format!("must be nonnegative, got {r}")));
    }
    Ok(())
}

/// Positive solution of `F' = c F^a`, `F(0) = 0`: `((1 − a) c r)^{1/(1−a)}`.
pub fn gronwall_closed_form(c: f64, exponent: f64, r: f64) -> Result<f64> {
    check_gronwall(c, exponent, r)?;
    Ok(pow((1.0 - exponent) * c * r, 1.0 / (1.0 - exponent)))
}

/// Same solution by RK4 in `(ln r, ln F)`, where the equation reads
/// `y' = c exp(x + (a − 1) y)`. The zero solution is excluded by seeding
/// the positive branch at `r_0 = 1e−10 r`.
pub fn gronwall_integrate(c: f64, exponent: f64, r: f64, steps: usize) -> Result<f64> {
    check_gronwall(c, exponent, r)?;
    if steps == 0 {
        return Err(Error::invalid("steps", "must be positive"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let a = exponent;
    let x1 = log(r);
    let x0 = x1 + log(1e-10);
    let mut y = log(gronwall_closed_form(c, a, exp(x0))?);
    let f = |x: f64, y: f64| c * exp(x + (a - 1.0) * y);
    let h = (x1 - x0) / steps as f64;
    for i in 0..steps {
        let x = x0 + h * i as f64;
        let k1 = f(x, y);
        let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(x + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(exp(y))
}

fn check_n(n: f64) -> Result<()> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Error::invalid("N", format!("must be >= 2, got {n}")));
    }
    Ok(())
}

/// `N ω_N^{1/N}`, the Euclidean isoperimetric constant.
pub fn euclidean_constant(n: f64) -> f64 {
    n * pow(unit_ball_volume(n), 1.0 / n)
}

/// `C(0, N) v^{1/N}` with `C(0, N) = ½ ω_N^{1/N}`.
pub fn radius_cap(n: f64, v: f64) -> f64 {
    0.5 * pow(unit_ball_volume(n) * v, 1.0 / n)
}

/// Volume ratio floor on balls of radius `r` from a profile deficit `delta`
/// holding up to volume `v`.
pub fn volume_lower_bound_from_profile(delta: f64, n: f64, v: f64, r: f64) -> Result<EpsRegResult> {
    volume_lower_bound(0.0, delta, n, v, r)
}

/// As [`volume_lower_bound_from_profile`] with an explicit Ricci bound `k`.
/// `k > 0` reduces to `k = 0`; negative `k` has no explicit constants and is
/// rejected.
pub fn volume_lower_bound(k: f64, delta: f64, n: f64, v: f64, r: f64) -> Result<EpsRegResult> {
    if k < 0.0 || k.is_nan() {
        return Err(Error::WrongCurvature(k));
    }
    check_n(n)?;
    let e = euclidean_constant(n);
    if !(delta >= 0.0) || delta >= e {
        return Err(Error::invalid("delta", format!("must lie in [0, {e}), got {delta}")));
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid("v", format!("must be positive, got {v}")));
    }
    let cap = radius_cap(n, v);
    if !(r > 0.0) || r > cap {
        return Err(Error::invalid("r", format!("must lie in (0, {cap}], got {r}")));
    }
    let ratio_bound = if delta == 0.0 {
        1.0
    } else {
        pow(1.0 - delta / e, n)
    };
    Ok(EpsRegResult {
        delta,
        n,
        radius_cap: cap,
        ratio_bound,
    })
}

/// Profile deficit that guarantees volume ratio `1 − ε`:
/// `δ = N ω_N^{1/N} (1 − (1 − ε)^{1/N})`.
pub fn delta_for_epsilon(epsilon: f64, n: f64) -> Result<f64> {
    check_n(n)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    Ok(euclidean_constant(n) * (1.0 - pow(1.0 - epsilon, 1.0 / n)))
}

/// Converse direction on the cone of opening `theta`: the volume floor `θ`
/// and the profile constant `N (ω_N θ)^{1/N}` must correspond exactly under
/// the δ ↔ ε map. Equality is recorded at `theta`.
pub fn cone_consistency_check(theta: f64, n: f64) -> Result<VerificationReport> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid("theta", format!("must lie in (0, 1], got {theta}")));
    }
    check_n(n)?;
    let tol = 1e-12;
    let mut report = VerificationReport::new("cone_consistency", tol);
    let e = euclidean_constant(n);
    let constant = cone_constant(theta, n);
    // profile constant against N ω_N^{1/N} θ^{1/N}
    let expected = e * pow(theta, 1.0 / n);
    let d1 = (constant - expected).abs() / expected;
    report.observe(d1, theta);
    // profile deficit against the volume deficit 1 − θ
    let profile_deficit = 1.0 - constant / e;
    let volume_deficit = 1.0 - theta;
    let d2 = (profile_deficit - (1.0 - pow(1.0 - volume_deficit, 1.0 / n))).abs();
    report.observe(d2, theta);
    // and the floor returned by the forward map
    let floor = pow(1.0 - (e - constant) / e, n);
    let d3 = (floor - theta).abs();
    report.observe(d3, theta);
    if d1.max(d2).max(d3) <= tol {
        report.mark_equality(theta);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn gronwall_examples() {
        assert!((gronwall_closed_form(2.0, 0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(gronwall_integrate(2.0, 0.5, 0.0, 10).unwrap(), 0.0);
        for n in [2.0, 3.0, 4.5] {
            let c = euclidean_constant(n);
            for r in [0.1, 1.0, 3.0] {
                let f = gronwall_integrate(c, (n - 1.0) / n, r, 200).unwrap();
                let ball = unit_ball_volume(n) * pow(r, n);
                assert!(((f - ball) / ball).abs() < 1e-8, "{n} {r}");
            }
        }
        assert!(gronwall_integrate(1.0, 1.0, 1.0, 10).is_err());
        assert!(gronwall_integrate(-1.0, 0.5, 1.0, 10).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(volume_lower_bound_from_profile(0.0, 3.0, 1.0, 0.1).unwrap().ratio_bound, 1.0);
        let b = volume_lower_bound_from_profile(0.1, 2.0, 1.0, 0.1).unwrap();
        assert!((b.ratio_bound - 0.94438).abs() < 1e-5, "{}", b.ratio_bound);
        let cap = radius_cap(2.0, 1.0);
        assert!((cap - 0.5 * libm::sqrt(PI)).abs() < 1e-15);
        assert!(volume_lower_bound_from_profile(0.1, 2.0, 1.0, cap * 1.01).is_err());
        assert!(volume_lower_bound_from_profile(euclidean_constant(2.0), 2.0, 1.0, 0.1).is_err());
        assert!(matches!(volume_lower_bound(-1.0, 0.1, 2.0, 1.0, 0.1), Err(Error::WrongCurvature(_))));
    }

    #[test]
    fn delta_examples() {
        let d = delta_for_epsilon(0.19, 2.0).unwrap();
        assert!((d - 0.2 * libm::sqrt(PI)).abs() < 1e-14);
        assert!((d - 0.35449).abs() < 1e-5);
        assert!(delta_for_epsilon(1e-12, 3.0).unwrap() < 1e-11);
        assert!(delta_for_epsilon(0.0, 3.0).is_err());
        assert!(delta_for_epsilon(1.0, 3.0).is_err());
    }

    #[test]
    fn cone_consistency() {
        for (theta, n) in [(1.0, 3.0), (0.5, 3.0), (0.9, 2.0), (0.1, 7.5)] {
            let r = cone_consistency_check(theta, n).unwrap();
            assert!(r.pass && r.rigid(), "{theta} {n}: {}", r.worst_violation);
        }
    }
}
