use alloc::format;
use alloc::vec::Vec;

use libm::{log, pow};
use serde::{Deserialize, Serialize};

use super::ProfileCurve;
use crate::comparison::unit_ball_volume;
use crate::numeric::{first_derivative, log_grid, second_derivative};
use crate::{Error, Result, VerificationReport};

/// `N ω_N^{1/N} avr^{1/N} v^{(N−1)/N}`.
pub fn sharp_lower_bound(n: f64, avr: f64, v: f64) -> f64 {
    if v <= 0.0 || avr <= 0.0 {
        return 0.0;
    }
    n * pow(unit_ball_volume(n), 1.0 / n) * pow(avr, 1.0 / n) * pow(v, (n - 1.0) / n)
}

fn require_flat(curve: &ProfileCurve) -> Result<()> {
    if curve.k != 0.0 {
        return Err(Error::WrongCurvature(curve.k));
    }
    Ok(())
}

fn require_nonnegative(curve: &ProfileCurve) -> Result<()> {
    if curve.k < 0.0 {
        return Err(Error::WrongCurvature(curve.k));
    }
    Ok(())
}

fn check_avr(avr: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&avr) {
        return Err(Error::invalid("avr", format!("must lie in [0, 1], got {avr}")));
    }
    Ok(())
}

/// Grid nodes strictly inside `(0, total_mass)` with their profile values.
fn interior_samples(curve: &ProfileCurve) -> (Vec<f64>, Vec<f64>) {
    let mut vs = Vec::new();
    let mut is = Vec::new();
    for (v, i) in curve.grid().into_iter().zip(curve.values()) {
        if curve.total_mass.is_none_or(|m| v < m) && i > 0.0 {
            vs.push(v);
            is.push(i);
        }
    }
    (vs, is)
}

/// Signed relative gap `(bound − I) / max(bound, I)`.
fn relative_deficit(value: f64, bound: f64) -> f64 {
    (bound - value) / bound.max(value).max(f64::MIN_POSITIVE)
}

/// Verifies `I(v) >= N (ω_N avr)^{1/N} v^{(N−1)/N}` on the curve grid.
///
/// Violations are relative: `(bound − I)/max(bound, I)`. Grid volumes where
/// the two sides agree within `tol` are recorded in `equality_at`; any such
/// volume flags cone rigidity.
pub fn check_sharp_inequality(curve: &ProfileCurve, avr: f64, tol: f64) -> Result<VerificationReport> {
    curve.validate()?;
    require_flat(curve)?;
    check_avr(avr)?;
    let mut report = VerificationReport::new("sharp_isoperimetric", tol);
    let (vs, is) = interior_samples(curve);
    for (&v, &i) in vs.iter().zip(&is) {
        let d = relative_deficit(i, sharp_lower_bound(curve.n, avr, v));
        report.observe(d, v);
        if d.abs() <= tol {
            report.mark_equality(v);
        }
    }
    Ok(report)
}

/// Grid volumes where the profile equals the cone value within `tol` (relative).
pub fn rigidity_scan(curve: &ProfileCurve, avr: f64, tol: f64) -> Result<Vec<f64>> {
    Ok(check_sharp_inequality(curve, avr, tol)?.equality_at)
}

/// Coordinates for the finite-difference derivatives of the viscosity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdCoordinates {
    /// Differences of `I` against `v`.
    Linear,
    /// Differences of `ln I` against `ln v`, mapped back by the chain rule.
    /// Exact on power laws, hence on every cone profile.
    LogLog,
    /// `LogLog`; the checked nodes always carry positive values.
    #[default]
    Auto,
}

/// Normalized residuals of the two differential inequalities at one node.
///
/// `i_form = (−I''I − K − I'²/(N−1)) / max(I²/v², |K|)` and
/// `psi_form = (−ψ'' − KN/(N−1) ψ^{(2−N)/N}) / max(ψ/v², |K|N/(N−1) ψ^{(2−N)/N})`.
/// Both are nonnegative for a profile satisfying the inequalities and vanish
/// in the equality case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscosityResidual {
    pub v: f64,
    pub i_form: f64,
    pub psi_form: f64,
    /// `v² I''/I`, used to detect oscillating second differences.
    pub curvature: f64,
}

fn derivatives(x: [f64; 3], y: [f64; 3], coords: FdCoordinates) -> (f64, f64) {
    match coords {
        FdCoordinates::LogLog => {
            let lx = x.map(log);
            let ly = y.map(log);
            let d1 = first_derivative(lx, ly);
            let d2 = second_derivative(lx, ly);
            let (v, f) = (x[1], y[1]);
            (f / v * d1, f / (v * v) * (d2 + d1 * d1 - d1))
        }
        _ => (first_derivative(x, y), second_derivative(x, y)),
    }
}

/// Finite-difference residuals at every interior grid node.
pub fn viscosity_residuals(curve: &ProfileCurve, coords: FdCoordinates) -> Result<Vec<ViscosityResidual>> {
    curve.validate()?;
    let (vs, is) = interior_samples(curve);
    if vs.len() < 5 {
        return Err(Error::InsufficientGrid(format!(
            "viscosity check needs at least 5 interior nodes, got {}",
            vs.len()
        )));
    }
    let coords = match coords {
        FdCoordinates::Auto => FdCoordinates::LogLog,
        c => c,
    };
    let (n, k) = (curve.n, curve.k);
    let e = n / (n - 1.0);
    let mut out = Vec::with_capacity(vs.len() - 2);
    for j in 1..vs.len() - 1 {
        let x = [vs[j - 1], vs[j], vs[j + 1]];
        let y = [is[j - 1], is[j], is[j + 1]];
        let (d1, d2) = derivatives(x, y, coords);
        let (v, i) = (x[1], y[1]);
        let i_scale = (i * i / (v * v)).max(k.abs());
        let i_form = (-d2 * i - k - d1 * d1 / (n - 1.0)) / i_scale;

        let psi = y.map(|t| pow(t, e));
        let (_, p2) = derivatives(x, psi, coords);
        let rhs = k * e * pow(psi[1], (2.0 - n) / n);
        let p_scale = (psi[1] / (v * v)).max(rhs.abs());
        let psi_form = (-p2 - rhs) / p_scale;
        out.push(ViscosityResidual {
            v,
            i_form,
            psi_form,
            curvature: d2 * v * v / i,
        });
    }
    Ok(out)
}

/// Checks `−I''I >= K + (I')²/(N−1)` and `−ψ'' >= KN/(N−1) ψ^{(2−N)/N}` at
/// interior grid nodes with [`FdCoordinates::Auto`].
pub fn check_viscosity_inequality(curve: &ProfileCurve, tol: f64) -> Result<VerificationReport> {
    check_viscosity_inequality_with(curve, tol, FdCoordinates::Auto)
}

/// [`check_viscosity_inequality`] with explicit difference coordinates.
///
/// Violations are the negated normalized residuals of
/// [`ViscosityResidual`]. Finite differences stand in for touching test
/// functions, which is sound for twice differentiable profiles; when the
/// normalized second differences oscillate by more than `10 tol` the report
/// carries a warning instead.
pub fn check_viscosity_inequality_with(
    curve: &ProfileCurve,
    tol: f64,
    coords: FdCoordinates,
) -> Result<VerificationReport> {
    let residuals = viscosity_residuals(curve, coords)?;
    let mut report = VerificationReport::new("viscosity", tol);
    for r in &residuals {
        report.observe(-r.i_form, r.v);
        report.observe(-r.psi_form, r.v);
    }
    let jumps: Vec<f64> = residuals.windows(2).map(|w| w[1].curvature - w[0].curvature).collect();
    let flips = jumps
        .windows(2)
        .filter(|w| w[0] * w[1] < 0.0 && w[0].abs() > 10.0 * tol && w[1].abs() > 10.0 * tol)
        .count();
    if flips > 0 {
        report.warn(format!(
            "second differences oscillate at {flips} nodes; finite differences do not certify the viscosity sense there"
        ));
    }
    Ok(report)
}

/// `excess` relative to the reference value, so that `scaled(..) <= 1e−6`
/// is the same as `excess <= monotone_tolerance(reference)`.
fn scaled(excess: f64, reference: f64) -> f64 {
    excess / reference.abs().max(1e-3)
}

/// Checks discrete concavity of `ψ = I^{N/(N−1)}`, that `I(v)/v^{(N−1)/N}`
/// is nonincreasing and, for infinite mass, that `I` is nondecreasing.
///
/// Each step is allowed [`monotone_tolerance`](crate::comparison::monotone_tolerance) of the local value; the
/// report's `tol` is the relative part `1e−6`. Curvature bounds `K > 0` are
/// accepted since such spaces also satisfy the `K = 0` hypotheses.
pub fn check_concavity_and_monotonicity(curve: &ProfileCurve) -> Result<VerificationReport> {
    curve.validate()?;
    require_nonnegative(curve)?;
    let (vs, is) = interior_samples(curve);
    if vs.len() < 3 {
        return Err(Error::InsufficientGrid("need at least 3 interior nodes".into()));
    }
    let tol = 1e-6;
    let e = curve.n / (curve.n - 1.0);
    let a = curve.alpha();
    let psi: Vec<f64> = is.iter().map(|&i| pow(i, e)).collect();
    let ratio: Vec<f64> = vs.iter().zip(&is).map(|(&v, &i)| i / pow(v, a)).collect();
    let mut report = VerificationReport::new("concavity_monotonicity", tol);
    for j in 1..vs.len() - 1 {
        let (h1, h2) = (vs[j] - vs[j - 1], vs[j + 1] - vs[j]);
        let chord = (h2 * psi[j - 1] + h1 * psi[j + 1]) / (h1 + h2);
        report.observe(scaled(chord - psi[j], psi[j]), vs[j]);
    }
    for j in 1..vs.len() {
        report.observe(scaled(ratio[j] - ratio[j - 1], ratio[j - 1]), vs[j]);
        if curve.total_mass.is_none() {
            report.observe(scaled(is[j - 1] - is[j], is[j - 1]), vs[j]);
        }
    }
    Ok(report)
}

/// `sup_u |Ī_a(u)/Ī_b(u) − 1|` with `Ī(u) = I(m u)`, over normalized volumes
/// `u ∈ [margin, 1 − margin]`.
pub fn normalized_profile_ratio(a: &ProfileCurve, b: &ProfileCurve, margin: f64) -> Result<f64> {
    let (Some(ma), Some(mb)) = (a.total_mass, b.total_mass) else {
        return Err(Error::InfiniteMass);
    };
    if !(margin > 0.0 && margin < 0.5) {
        return Err(Error::invalid("margin", format!("must lie in (0, 0.5), got {margin}")));
    }
    let half = log_grid(margin, 0.5, 400);
    let mut worst: f64 = 0.0;
    for u in half.iter().copied().chain(half.iter().map(|&u| 1.0 - u)) {
        let ib = b.eval(mb * u);
        if !(ib > 0.0) {
            continue;
        }
        worst = worst.max((a.eval(ma * u) / ib - 1.0).abs());
    }
    Ok(worst)
}
