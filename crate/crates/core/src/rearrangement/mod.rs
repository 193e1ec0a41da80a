//! Monotone rearrangement onto the weighted half-line
//! `([0, ∞), N ω_N r^{N−1} dr)`, p-Dirichlet energies of radial profiles,
//! Pólya–Szegő checks and p-Laplacian eigenvalues of model balls.
//!
//! Functions live on a discretized domain: cells with a value and a measure.
//! Rearrangement sorts cells by decreasing value and accumulates their
//! masses once; the distribution functions of `u` and of `u*` are both read
//! from that table, so equimeasurability holds exactly on every level.

mod spectral;

use alloc::format;
use alloc::vec::Vec;

use libm::pow;
use serde::{Deserialize, Serialize};

use crate::comparison::unit_ball_volume;
use crate::numeric::{integrate, is_strictly_increasing, NeumaierSum};
use crate::profile::{sharp_lower_bound, ProfileCurve};
use crate::{Error, Result, VerificationReport};

pub use spectral::{
    p_eigenvalue_model, p_eigenvalue_radial, p_spectral_comparison, EigenSolution, ModelSpectrum,
    SolverOptions,
};

/// Nonnegative function on a discretized weighted domain.
///
/// `nodes` are cell coordinates (a radial coordinate for radial data),
/// `weights` the measure of each cell and `n` the dimension of the target
/// measure `m_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(rename = "N")]
    pub n: f64,
}

impl SampledFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, weights: Vec<f64>, n: f64) -> Result<Self> {
        let u = SampledFunction { nodes, values, weights, n };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.nodes.len();
        if len == 0 || self.values.len() != len || self.weights.len() != len {
            return Err(Error::Malformed(format!(
                "nodes, values and weights must have the same nonzero length ({}, {}, {})",
                len,
                self.values.len(),
                self.weights.len()
            )));
        }
        if !is_strictly_increasing(&self.nodes) {
            return Err(Error::Malformed("nodes must be strictly increasing".into()));
        }
        if self.values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Malformed("values must be finite and nonnegative".into()));
        }
        if self.weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Malformed("weights must be finite and positive".into()));
        }
        if !(self.n >= 1.0) {
            return Err(Error::invalid("N", format!("must be >= 1, got {}", self.n)));
        }
        Ok(())
    }

    /// Radial function `f(|x|)` on the ball of radius `edges.last()` in the
    /// cone of opening `theta` (`theta = 1`: Euclidean space).
    ///
    /// `edges` are cell boundaries starting at 0; each cell is sampled at
    /// its mass midpoint `((r_i^N + r_{i+1}^N)/2)^{1/N}` and weighted by its
    /// measure `θ ω_N (r_{i+1}^N − r_i^N)`.
    pub fn radial<F: Fn(f64) -> f64>(n: f64, theta: f64, edges: &[f64], f: F) -> Result<Self> {
        if edges.len() < 2 || edges[0] != 0.0 || !is_strictly_increasing(edges) {
            return Err(Error::Malformed("edges must start at 0 and increase strictly".into()));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::invalid("theta", format!("must lie in (0, 1], got {theta}")));
        }
        let omega = unit_ball_volume(n);
        let mut nodes = Vec::with_capacity(edges.len() - 1);
        let mut weights = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let (a, b) = (pow(w[0], n), pow(w[1], n));
            nodes.push(pow(0.5 * (a + b), 1.0 / n));
            weights.push(theta * omega * (b - a));
        }
        let values = nodes.iter().map(|&x| f(x)).collect();
        SampledFunction::new(nodes, values, weights, n)
    }

    pub fn total_mass(&self) -> f64 {
        let mut s = NeumaierSum::default();
        for &w in &self.weights {
            s.add(w);
        }
        s.total()
    }

    /// `∫ u^q dm`.
    pub fn integral_power(&self, q: f64) -> f64 {
        let mut s = NeumaierSum::default();
        for (&u, &w) in self.values.iter().zip(&self.weights) {
            s.add(pow(u, q) * w);
        }
        s.total()
    }
}

/// Superlevel table: distinct values in decreasing order and the mass of
/// `{u >= values[k]}`.
#[derive(Debug, Clone, PartialEq)]
struct LevelTable {
    values: Vec<f64>,
    masses: Vec<f64>,
}

impl LevelTable {
    fn build(u: &SampledFunction) -> Self {
        let mut order: Vec<usize> = (0..u.values.len()).collect();
        order.sort_by(|&a, &b| u.values[b].total_cmp(&u.values[a]).then(a.cmp(&b)));
        let mut values: Vec<f64> = Vec::new();
        let mut masses: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for &i in &order {
            acc += u.weights[i];
            let v = u.values[i];
            if values.last() == Some(&v) {
                let k = masses.len() - 1;
                masses[k] = acc;
            } else {
                values.push(v);
                masses.push(acc);
            }
        }
        LevelTable { values, masses }
    }

    fn total(&self) -> f64 {
        self.masses.last().copied().unwrap_or(0.0)
    }

    /// `m({u > t})`.
    fn mu(&self, t: f64) -> f64 {
        let k = self.values.partition_point(|&v| v > t);
        if k == 0 {
            0.0
        } else {
            self.masses[k - 1]
        }
    }

    fn distribution(&self, levels: &[f64]) -> Result<DistributionFunction> {
        if levels.windows(2).any(|w| !(w[0] <= w[1])) || levels.iter().any(|t| t.is_nan()) {
            return Err(Error::Malformed("levels must be sorted".into()));
        }
        Ok(DistributionFunction {
            total_mass: self.total(),
            points: levels.iter().map(|&t| (t, self.mu(t))).collect(),
        })
    }
}

/// Samples `(t, μ(t))` of a distribution function `μ(t) = m({u > t})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    pub total_mass: f64,
    pub points: Vec<(f64, f64)>,
}

impl DistributionFunction {
    pub fn inverse(&self) -> Result<GeneralizedInverse> {
        generalized_inverse(&self.points, self.total_mass)
    }
}

/// `μ(t) = m({u > t})` at each of the sorted `levels`.
pub fn distribution_function(u: &SampledFunction, levels: &[f64]) -> Result<DistributionFunction> {
    u.validate()?;
    LevelTable::build(u).distribution(levels)
}

/// Distinct sample values of `u` in increasing order: the natural level grid.
pub fn distinct_levels(u: &SampledFunction) -> Vec<f64> {
    let mut v = LevelTable::build(u).values;
    v.reverse();
    v
}

/// `u♯(s) = inf{t : μ(t) <= s}` over sampled levels, `0` for `s >= total_mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedInverse {
    pub total_mass: f64,
    points: Vec<(f64, f64)>,
}

impl GeneralizedInverse {
    pub fn eval(&self, s: f64) -> f64 {
        if s >= self.total_mass {
            return 0.0;
        }
        // μ is nonincreasing in t, so the admissible levels form a suffix
        let k = self.points.partition_point(|&(_, m)| m > s);
        self.points.get(k).map_or(0.0, |p| p.0)
    }
}

/// Generalized inverse of a sampled distribution function.
pub fn generalized_inverse(mu: &[(f64, f64)], total_mass: f64) -> Result<GeneralizedInverse> {
    if mu.windows(2).any(|w| !(w[0].0 <= w[1].0) || w[1].1 > w[0].1) {
        return Err(Error::Malformed("levels must increase and μ must be nonincreasing".into()));
    }
    if !(total_mass >= 0.0) || mu.iter().any(|p| p.1 > total_mass) {
        return Err(Error::Malformed("μ cannot exceed the total mass".into()));
    }
    Ok(GeneralizedInverse {
        total_mass,
        points: mu.to_vec(),
    })
}

/// Monotone rearrangement `u*(x) = u♯(ω_N x^N)`: a nonincreasing step
/// function on `[0, r_max)`.
///
/// Step `k` takes the value `values[k]` on `[ρ_{k−1}, ρ_k)` where
/// `ω_N ρ_k^N = masses[k]` is the mass of `{u >= values[k]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangedFunction {
    #[serde(rename = "N")]
    pub n: f64,
    pub r_max: f64,
    pub breaks: Vec<f64>,
    pub masses: Vec<f64>,
    pub values: Vec<f64>,
}

impl RearrangedFunction {
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.breaks.partition_point(|&b| b <= x);
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// `m_N({u* > t})`, read from the stored step masses.
    pub fn distribution(&self, levels: &[f64]) -> Result<DistributionFunction> {
        LevelTable {
            values: self.values.clone(),
            masses: self.masses.clone(),
        }
        .distribution(levels)
    }

    /// `∫ (u*)^q dm_N`.
    pub fn integral_power(&self, q: f64) -> f64 {
        let mut s = NeumaierSum::default();
        let mut prev = 0.0;
        for (&v, &m) in self.values.iter().zip(&self.masses) {
            s.add(pow(v, q) * (m - prev));
            prev = m;
        }
        s.total()
    }

    /// `(x, u*(x))` at the left end of every step, then `(r_max, 0)`.
    pub fn rows(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.values.len() + 1);
        let mut left = 0.0;
        for (&b, &v) in self.breaks.iter().zip(&self.values) {
            out.push((left, v));
            left = b;
        }
        out.push((self.r_max, 0.0));
        out
    }

    /// Piecewise-linear resampling for energies: each step is placed at the
    /// radius of its mass midpoint, and `u*(r_max) = 0` closes the profile.
    pub fn energy_samples(&self) -> (Vec<f64>, Vec<f64>) {
        let omega = unit_ball_volume(self.n);
        let mut xs = Vec::with_capacity(self.values.len() + 1);
        let mut prev = 0.0;
        for &m in &self.masses {
            xs.push(pow(0.5 * (prev + m) / omega, 1.0 / self.n));
            prev = m;
        }
        xs.push(self.r_max);
        let mut fs = self.values.clone();
        fs.push(0.0);
        (xs, fs)
    }

    /// `∫ |∇u*|^p dm_N` of [`energy_samples`](Self::energy_samples).
    pub fn dirichlet_energy(&self, p: f64) -> Result<f64> {
        let (xs, fs) = self.energy_samples();
        dirichlet_energy_p(&xs, &fs, self.n, p)
    }
}

/// Monotone rearrangement of `u` onto `([0, r_max], m_N)`.
pub fn monotone_rearrangement(u: &SampledFunction) -> Result<RearrangedFunction> {
    u.validate()?;
    let table = LevelTable::build(u);
    let omega = unit_ball_volume(u.n);
    let breaks: Vec<f64> = table.masses.iter().map(|&m| pow(m / omega, 1.0 / u.n)).collect();
    let r_max = breaks.last().copied().unwrap_or(0.0);
    Ok(RearrangedFunction {
        n: u.n,
        r_max,
        breaks,
        masses: table.masses,
        values: table.values,
    })
}

fn check_profile_samples(xs: &[f64], fs: &[f64], n: f64, p: f64) -> Result<()> {
    if xs.len() != fs.len() || xs.len() < 2 {
        return Err(Error::Malformed("need at least two (x, f) samples of equal length".into()));
    }
    if !is_strictly_increasing(xs) || xs[0] < 0.0 {
        return Err(Error::Malformed("radii must be nonnegative and strictly increasing".into()));
    }
    if !(p > 1.0) {
        return Err(Error::invalid("p", format!("must be > 1, got {p}")));
    }
    if !(n >= 1.0) {
        return Err(Error::invalid("N", format!("must be >= 1, got {n}")));
    }
    Ok(())
}

/// `∫ |f'|^p dm_N` of the piecewise-linear interpolant of `(xs, fs)`:
/// `Σ |Δf/Δx|^p ω_N (x_{i+1}^N − x_i^N)`.
pub fn dirichlet_energy_p(xs: &[f64], fs: &[f64], n: f64, p: f64) -> Result<f64> {
    check_profile_samples(xs, fs, n, p)?;
    let omega = unit_ball_volume(n);
    let mut s = NeumaierSum::default();
    for i in 0..xs.len() - 1 {
        let slope = (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]);
        s.add(pow(slope.abs(), p) * omega * (pow(xs[i + 1], n) - pow(xs[i], n)));
    }
    Ok(s.total())
}

/// `f_u(t) = |∇u*|^{p−1} Per({u* > t})` for a nonincreasing piecewise-linear
/// radial profile, at level `t`.
pub fn level_flux(xs: &[f64], fs: &[f64], n: f64, p: f64, t: f64) -> Result<f64> {
    check_profile_samples(xs, fs, n, p)?;
    if fs.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Malformed("profile must be nonincreasing".into()));
    }
    Ok(flux_at(xs, fs, n, p, t))
}

fn flux_at(xs: &[f64], fs: &[f64], n: f64, p: f64, t: f64) -> f64 {
    // segment where f crosses t, scanning outward
    for i in 0..xs.len() - 1 {
        let (a, b) = (fs[i], fs[i + 1]);
        if a > t && t >= b && a > b {
            let rho = xs[i] + (a - t) / (a - b) * (xs[i + 1] - xs[i]);
            let slope = (a - b) / (xs[i + 1] - xs[i]);
            return pow(slope, p - 1.0) * n * unit_ball_volume(n) * pow(rho, n - 1.0);
        }
    }
    0.0
}

/// `∫₀^{sup u*} f_u(t) dt` by quadrature in the level variable.
pub fn coarea_energy(xs: &[f64], fs: &[f64], n: f64, p: f64) -> Result<f64> {
    level_flux(xs, fs, n, p, 0.0)?;
    let mut s = NeumaierSum::default();
    for i in 0..xs.len() - 1 {
        let (hi, lo) = (fs[i], fs[i + 1]);
        if hi > lo {
            let q = integrate(|t| flux_at(xs, fs, n, p, t), lo, hi, 1e-14, 1e-12);
            s.add(q.value);
        }
    }
    Ok(s.total())
}

/// Outcome of [`polya_szego_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaSzegoReport {
    /// `E(u) >= (I(V)/I_N(V))^p E(u*)`.
    pub profile_form: VerificationReport,
    /// `E(u) >= avr^{p/N} E(u*)`, when `avr` was supplied.
    pub avr_form: Option<VerificationReport>,
    /// `(I(V)/I_N(V))^p`.
    pub factor: f64,
    pub rearranged_energy: f64,
}

fn energy_report(name: &str, ambient: f64, bound: f64, volume: f64, tol: f64) -> VerificationReport {
    let mut r = VerificationReport::new(name, tol);
    let d = (bound - ambient) / bound.max(ambient).max(f64::MIN_POSITIVE);
    r.observe(d, volume);
    if d.abs() <= tol {
        r.mark_equality(volume);
    }
    r
}

/// Pólya–Szegő comparison for a function `u` with ambient p-energy
/// `ambient_energy` (supplied by the caller).
///
/// `V` is the mass of the domain of `u`, `I` the ambient profile and `I_N`
/// the Euclidean one. Violations are relative to the larger side; equality
/// within `tol` is recorded at `V`.
pub fn polya_szego_check(
    ambient_energy: f64,
    u: &SampledFunction,
    profile: &ProfileCurve,
    p: f64,
    avr: Option<f64>,
    tol: f64,
) -> Result<PolyaSzegoReport> {
    if profile.k != 0.0 {
        return Err(Error::WrongCurvature(profile.k));
    }
    if profile.n != u.n {
        return Err(Error::DimensionMismatch(profile.n, u.n));
    }
    if !(ambient_energy >= 0.0) {
        return Err(Error::invalid("ambient_energy", format!("must be >= 0, got {ambient_energy}")));
    }
    let star = monotone_rearrangement(u)?;
    let e_star = star.dirichlet_energy(p)?;
    let volume = u.total_mass();
    let factor = pow(profile.eval(volume) / sharp_lower_bound(u.n, 1.0, volume), p);
    let profile_form = energy_report("polya_szego", ambient_energy, factor * e_star, volume, tol);
    let avr_form = avr.map(|a| {
        energy_report("polya_szego_avr", ambient_energy, pow(a, p / u.n) * e_star, volume, tol)
    });
    Ok(PolyaSzegoReport {
        profile_form,
        avr_form,
        factor,
        rearranged_energy: e_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linspace;
    use crate::profile::cone_profile;
    use alloc::vec;
    use core::f64::consts::PI;

    fn three() -> SampledFunction {
        SampledFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0], vec![1.0; 3], 1.0).unwrap()
    }

    #[test]
    fn distribution_examples() {
        let u = three();
        let d = distribution_function(&u, &[1.5, 3.0, 7.0]).unwrap();
        assert_eq!(d.points, vec![(1.5, 2.0), (3.0, 0.0), (7.0, 0.0)]);
        let ind = SampledFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![0.25, 4.0, 0.5], 2.0).unwrap();
        assert_eq!(distribution_function(&ind, &[0.5]).unwrap().points, vec![(0.5, 0.75)]);
        assert!(distribution_function(&u, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn inverse_examples() {
        let u = three();
        let d = distribution_function(&u, &distinct_levels(&u)).unwrap();
        let inv = d.inverse().unwrap();
        assert_eq!(inv.eval(1.5), 2.0);
        assert_eq!(inv.eval(0.0), 3.0);
        assert_eq!(inv.eval(3.0), 0.0);
        assert_eq!(inv.eval(10.0), 0.0);
        let c = SampledFunction::new(vec![0.0, 1.0], vec![0.7, 0.7], vec![1.0, 2.0], 1.0).unwrap();
        let ci = distribution_function(&c, &distinct_levels(&c)).unwrap().inverse().unwrap();
        for s in [0.0, 1.0, 2.99] {
            assert_eq!(ci.eval(s), 0.7);
        }
    }

    #[test]
    fn rearrangement_of_indicator() {
        let u = SampledFunction::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0, 1.0], vec![1.0, 2.0, 3.0, 4.0], 2.0).unwrap();
        let s = monotone_rearrangement(&u).unwrap();
        let rho = (6.0 / PI).sqrt();
        assert!((s.breaks[0] - rho).abs() < 1e-15);
        assert_eq!(s.eval(0.5 * rho), 1.0);
        assert_eq!(s.eval(1.01 * rho), 0.0);
        assert!((s.r_max - (10.0 / PI).sqrt()).abs() < 1e-15);
        assert_eq!(s.rows(), vec![(0.0, 1.0), (s.breaks[0], 0.0), (s.r_max, 0.0)]);
    }

    #[test]
    fn radial_decreasing_data_is_fixed() {
        let edges = linspace(0.0, 1.0, 1001);
        let u = SampledFunction::radial(3.0, 1.0, &edges, |r| 1.0 - r * r).unwrap();
        let s = monotone_rearrangement(&u).unwrap();
        for (&x, &v) in u.nodes.iter().zip(&u.values) {
            assert_eq!(s.eval(x), v);
        }
        assert!((s.r_max - 1.0).abs() < 1e-12);
        let l1 = u.integral_power(1.0);
        assert!(((s.integral_power(1.0) - l1) / l1).abs() < 1e-8);
    }

    #[test]
    fn energy_examples() {
        let xs = linspace(0.0, 1.0, 101);
        let constant = vec![2.0; 101];
        assert_eq!(dirichlet_energy_p(&xs, &constant, 2.0, 2.0).unwrap(), 0.0);
        let lin: Vec<f64> = xs.iter().map(|x| 1.0 - x).collect();
        assert!((dirichlet_energy_p(&xs, &lin, 1.0, 2.0).unwrap() - 2.0).abs() < 1e-13);
        let mut prev = f64::INFINITY;
        for m in [101, 201, 401] {
            let xs = linspace(0.0, 1.0, m);
            let q: Vec<f64> = xs.iter().map(|x| 1.0 - x * x).collect();
            let err = (dirichlet_energy_p(&xs, &q, 2.0, 2.0).unwrap() - 2.0 * PI).abs();
            assert!(err < prev / 1.9);
            prev = err;
        }
        assert!(dirichlet_energy_p(&xs, &lin, 2.0, 1.0).is_err());
    }

    #[test]
    fn coarea_matches_energy() {
        let xs = linspace(0.0, 1.0, 400);
        for (n, p) in [(2.0, 2.0), (3.0, 1.5), (4.0, 3.0)] {
            let f: Vec<f64> = xs.iter().map(|x| libm::cos(0.5 * PI * x)).collect();
            let e = dirichlet_energy_p(&xs, &f, n, p).unwrap();
            let c = coarea_energy(&xs, &f, n, p).unwrap();
            assert!(((c - e) / e).abs() < 1e-4, "N={n} p={p}: {c} vs {e}");
        }
        assert!(level_flux(&[0.0, 1.0], &[0.0, 1.0], 2.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn polya_szego_on_euclidean_and_cone_balls() {
        let edges = linspace(0.0, 1.0, 1001);
        let f = |r: f64| libm::cos(0.5 * PI * r);
        for (theta, p) in [(1.0, 2.0), (0.3, 1.5), (0.6, 3.0)] {
            let n = 3.0;
            let u = SampledFunction::radial(n, theta, &edges, f).unwrap();
            let mut xs = u.nodes.clone();
            xs.push(1.0);
            let mut fs = u.values.clone();
            fs.push(0.0);
            let ambient = theta * dirichlet_energy_p(&xs, &fs, n, p).unwrap();
            let r = polya_szego_check(ambient, &u, &cone_profile(theta, n).unwrap(), p, Some(theta), 1e-3).unwrap();
            assert!((r.factor - pow(theta, p / n)).abs() < 1e-12);
            assert!(r.profile_form.pass && r.profile_form.rigid(), "{r:?}");
            assert!(r.avr_form.as_ref().is_some_and(|a| a.pass));

            let half = polya_szego_check(0.5 * ambient, &u, &cone_profile(theta, n).unwrap(), p, None, 1e-3).unwrap();
            assert!(!half.profile_form.pass);
        }
    }
}
