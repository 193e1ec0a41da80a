//! First Dirichlet eigenvalue of the p-Laplacian on model balls.
//!
//! The radial Rayleigh quotient `∫|f'|^p dm / ∫|f|^p dm` is discretized with
//! piecewise-linear `f` on a uniform radial grid (lumped masses for the
//! `L^p` term, `f = 0` at the outer node, free at the center) and minimized
//! by nonlinear inverse iteration: each step solves `−Δ_p f = |g|^{p−2} g`
//! exactly, which for a radial chain reduces to one cumulative sum for the
//! flux and one for the values.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use libm::pow;
use serde::{Deserialize, Serialize};

use crate::comparison::unit_ball_volume;
use crate::numeric::{linspace, NeumaierSum};
use crate::profile::{sharp_lower_bound, ProfileCurve};
use crate::{Error, Result, VerificationReport};

/// Solver settings; serialized as `{grid_points, max_iters, tol}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub grid_points: usize,
    pub max_iters: usize,
    /// Relative change of the eigenvalue estimate that stops the iteration.
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_points: 10_000,
            max_iters: 2000,
            tol: 1e-13,
        }
    }
}

/// Discrete first eigenpair on `[0, radius]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub lambda: f64,
    pub radius: f64,
    pub nodes: Vec<f64>,
    /// Eigenfunction normalized to `f(0) = 1`.
    pub values: Vec<f64>,
    pub iterations: usize,
}

fn check_np(n: f64, p: f64) -> Result<()> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::invalid("N", format!("must be >= 1, got {n}")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::invalid("p", format!("must be > 1, got {p}")));
    }
    Ok(())
}

/// First eigenvalue of the radial p-Laplacian on the tip ball of radius
/// `radius` in the cone of opening `theta` (measure `θ N ω_N r^{N−1} dr`).
pub fn p_eigenvalue_radial(n: f64, p: f64, radius: f64, theta: f64, opts: &SolverOptions) -> Result<EigenSolution> {
    check_np(n, p)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("radius", format!("must be positive, got {radius}")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid("theta", format!("must lie in (0, 1], got {theta}")));
    }
    if opts.grid_points < 3 {
        return Err(Error::InsufficientGrid(format!("need at least 3 grid points, got {}", opts.grid_points)));
    }
    let m = opts.grid_points - 1;
    let r = linspace(0.0, radius, m + 1);
    let c = theta * unit_ball_volume(n);
    // cell measures w_j of [r_j, r_{j+1}], cell lengths h_j, lumped node masses
    let w: Vec<f64> = (0..m).map(|j| c * (pow(r[j + 1], n) - pow(r[j], n))).collect();
    let h: Vec<f64> = (0..m).map(|j| r[j + 1] - r[j]).collect();
    let mass: Vec<f64> = (0..m)
        .map(|j| 0.5 * (w[j] + if j > 0 { w[j - 1] } else { 0.0 }))
        .collect();
    let q = 1.0 / (p - 1.0);

    let quotient = |f: &[f64]| {
        let mut e = NeumaierSum::default();
        let mut d = NeumaierSum::default();
        for j in 0..m {
            e.add(w[j] * pow(((f[j + 1] - f[j]) / h[j]).abs(), p));
            d.add(mass[j] * pow(f[j].abs(), p));
        }
        e.total() / d.total()
    };

    let mut f: Vec<f64> = r.iter().map(|&x| 1.0 - (x / radius) * (x / radius)).collect();
    let mut lambda = quotient(&f);
    let mut next = alloc::vec![0.0; m + 1];
    let mut last_change = f64::INFINITY;
    for it in 1..=opts.max_iters {
        // flux through the outer face of node j: −Σ_{i<=j} m_i |f_i|^{p−2} f_i
        let mut flux = 0.0;
        let mut slopes = Vec::with_capacity(m);
        for j in 0..m {
            flux -= mass[j] * pow(f[j].abs(), p - 1.0) * f[j].signum();
            let s = pow((flux * h[j] / w[j]).abs(), q);
            slopes.push(if flux < 0.0 { -s } else { s });
        }
        next[m] = 0.0;
        for j in (0..m).rev() {
            next[j] = next[j + 1] - slopes[j] * h[j];
        }
        let top = next[0];
        if !(top.is_finite() && top != 0.0) {
            return Err(Error::NonConvergence {
                iterations: it,
                last_change,
            });
        }
        for (a, b) in f.iter_mut().zip(&next) {
            *a = b / top;
        }
        let updated = quotient(&f);
        last_change = ((updated - lambda) / updated).abs();
        lambda = updated;
        if last_change <= opts.tol {
            return Ok(EigenSolution {
                lambda,
                radius,
                nodes: r,
                values: f,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iters,
        last_change,
    })
}

fn ball_radius(n: f64, v: f64) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid("v", format!("must be positive, got {v}")));
    }
    Ok(pow(v / unit_ball_volume(n), 1.0 / n))
}

/// `I_{p,N}(v)`: first Dirichlet eigenvalue of the p-Laplacian on the
/// Euclidean ball of volume `v`, with default [`SolverOptions`].
pub fn p_eigenvalue_model(n: f64, p: f64, v: f64) -> Result<f64> {
    check_np(n, p)?;
    let radius = ball_radius(n, v)?;
    Ok(p_eigenvalue_radial(n, p, radius, 1.0, &SolverOptions::default())?.lambda)
}

/// Model eigenvalues through the scaling law `I_{p,N}(v) = C_{p,N} v^{−p/N}`,
/// with `C_{p,N} = I_{p,N}(1)` computed once per `(N, p)` and cached.
#[derive(Debug, Clone, Default)]
pub struct ModelSpectrum {
    pub options: SolverOptions,
    constants: BTreeMap<(u64, u64), f64>,
}

impl ModelSpectrum {
    pub fn new(options: SolverOptions) -> Self {
        ModelSpectrum {
            options,
            constants: BTreeMap::new(),
        }
    }

    /// `C_{p,N}`.
    pub fn constant(&mut self, n: f64, p: f64) -> Result<f64> {
        check_np(n, p)?;
        let key = (n.to_bits(), p.to_bits());
        if let Some(&c) = self.constants.get(&key) {
            return Ok(c);
        }
        let c = p_eigenvalue_radial(n, p, ball_radius(n, 1.0)?, 1.0, &self.options)?.lambda;
        self.constants.insert(key, c);
        Ok(c)
    }

    /// `I_{p,N}(v)`.
    pub fn eigenvalue(&mut self, n: f64, p: f64, v: f64) -> Result<f64> {
        ball_radius(n, v)?;
        Ok(self.constant(n, p)? * pow(v, -p / n))
    }

    /// See [`p_spectral_comparison`].
    #[allow(clippy::too_many_arguments)]
    pub fn spectral_comparison(
        &mut self,
        lambda: f64,
        n: f64,
        avr: f64,
        v: f64,
        p: f64,
        profile: Option<&ProfileCurve>,
        tol: f64,
    ) -> Result<VerificationReport> {
        if !(lambda > 0.0) {
            return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&avr) {
            return Err(Error::invalid("avr", format!("must lie in [0, 1], got {avr}")));
        }
        let model = self.eigenvalue(n, p, v)?;
        let mut report = VerificationReport::new("p_spectral", tol);
        let rel = |bound: f64| (bound - lambda) / bound.max(lambda);
        if let Some(curve) = profile {
            if curve.n != n {
                return Err(Error::DimensionMismatch(n, curve.n));
            }
            let factor = pow(curve.eval(v) / sharp_lower_bound(n, 1.0, v), p);
            report.observe(rel(factor * model), v);
        }
        let avr_bound = pow(avr, p / n) * model;
        let d = rel(avr_bound);
        report.observe(d, v);
        if d.abs() <= tol {
            report.mark_equality(v);
        }
        Ok(report)
    }
}

/// Checks `λ >= (I(v)/I_N(v))^p I_{p,N}(v)` (with a profile) and
/// `λ >= avr^{p/N} I_{p,N}(v)`; equality in the latter within `tol`
/// (relative) is recorded as spectral rigidity at `v`.
pub fn p_spectral_comparison(
    lambda: f64,
    n: f64,
    avr: f64,
    v: f64,
    p: f64,
    profile: Option<&ProfileCurve>,
    tol: f64,
) -> Result<VerificationReport> {
    ModelSpectrum::default().spectral_comparison(lambda, n, avr, v, p, profile, tol)
}
