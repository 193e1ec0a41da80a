//! Isoperimetric profile curves of model spaces and the profile-level checks.
//!
//! A [`ProfileCurve`] is either the closed-form cone profile
//! `I(v) = N (ω_N θ)^{1/N} v^{(N−1)/N}` or a sampled curve on a strictly
//! increasing volume grid. Sampled curves are evaluated between nodes by
//! log–log interpolation, so power laws are reproduced exactly; above half
//! of a finite total mass `M` the interpolation runs against `M − v`
//! instead, matching the behavior of profiles near full mass.

mod asymptotics;
mod checks;
mod union;

use alloc::format;
use alloc::vec::Vec;

use libm::{log, pow};
use serde::{Deserialize, Serialize};

use crate::comparison::{model_ball_volume, model_diameter, model_sphere_area, unit_ball_volume};
use crate::numeric::{bisect, is_strictly_increasing, log_grid};
use crate::spaces::ModelSpace;
use crate::{Error, Result};

pub use asymptotics::{asymptotics, Asymptotics};
pub use checks::{
    check_concavity_and_monotonicity, check_sharp_inequality, check_viscosity_inequality,
    check_viscosity_inequality_with, normalized_profile_ratio, rigidity_scan, sharp_lower_bound,
    viscosity_residuals, FdCoordinates, ViscosityResidual,
};
pub use union::{generalized_profile, generalized_profile_curve, SplitResult};

/// How a profile is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Representation {
    /// Closed-form cone profile. With a finite `total_mass` `M` the curve is
    /// `I_cone(min(v, M − v))`, a symmetric finite-mass test family.
    ClosedFormCone { theta: f64 },
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

/// An isoperimetric profile `v ↦ I(v)` with its metadata.
///
/// `k` is the Ricci lower bound `K` of the underlying space, `v0` a lower
/// bound on the volume of unit balls and `total_mass = None` means infinite
/// mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub v0: f64,
    pub total_mass: Option<f64>,
    pub representation: Representation,
}

const DEFAULT_GRID_POINTS: usize = 121;

impl ProfileCurve {
    /// A sampled curve, validated.
    pub fn sampled(
        n: f64,
        k: f64,
        v0: f64,
        total_mass: Option<f64>,
        grid: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let c = ProfileCurve {
            n,
            k,
            v0,
            total_mass,
            representation: Representation::Sampled { grid, values },
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks metadata ranges and the sampled data layout.
    pub fn validate(&self) -> Result<()> {
        if !(self.n > 1.0) || !self.n.is_finite() {
            return Err(Error::invalid("N", format!("profiles need N > 1, got {}", self.n)));
        }
        if !self.k.is_finite() {
            return Err(Error::invalid("K", "must be finite"));
        }
        if !(self.v0 > 0.0) {
            return Err(Error::invalid("v0", format!("must be positive, got {}", self.v0)));
        }
        if let Some(m) = self.total_mass {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::invalid("total_mass", format!("must be positive and finite, got {m}")));
            }
        }
        match &self.representation {
            Representation::ClosedFormCone { theta } => {
                if !(*theta > 0.0 && *theta <= 1.0) {
                    return Err(Error::invalid("theta", format!("must lie in (0, 1], got {theta}")));
                }
            }
            Representation::Sampled { grid, values } => {
                if grid.len() != values.len() {
                    return Err(Error::Malformed(format!(
                        "{} grid points but {} values",
                        grid.len(),
                        values.len()
                    )));
                }
                if grid.len() < 2 {
                    return Err(Error::InsufficientGrid("a sampled profile needs at least 2 points".into()));
                }
                if !is_strictly_increasing(grid) || !(grid[0] > 0.0) {
                    return Err(Error::Malformed("grid must be positive and strictly increasing".into()));
                }
                if let Some(m) = self.total_mass {
                    if grid[grid.len() - 1] > m {
                        return Err(Error::Malformed(format!("grid extends past the total mass {m}")));
                    }
                }
                for (&v, &i) in grid.iter().zip(values) {
                    let interior = self.total_mass.is_none_or(|m| v < m);
                    if !i.is_finite() || i < 0.0 || (interior && i == 0.0) {
                        return Err(Error::Malformed(format!(
                            "profile value {i} at v = {v} must be positive and finite"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Exponent `(N−1)/N` of the Euclidean profile.
    pub fn alpha(&self) -> f64 {
        (self.n - 1.0) / self.n
    }

    /// `I(v)`. Zero at `v <= 0`, `+∞` beyond a finite total mass.
    pub fn eval(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if let Some(m) = self.total_mass {
            if v > m {
                return f64::INFINITY;
            }
        }
        match &self.representation {
            Representation::ClosedFormCone { theta } => {
                let c = cone_constant(*theta, self.n);
                let w = self.total_mass.map_or(v, |m| v.min(m - v));
                if w <= 0.0 {
                    0.0
                } else {
                    c * pow(w, self.alpha())
                }
            }
            Representation::Sampled { grid, values } => self.eval_sampled(grid, values, v),
        }
    }

    fn eval_sampled(&self, grid: &[f64], values: &[f64], v: f64) -> f64 {
        let n = grid.len();
        let last = n - 1;
        // above half of a finite mass, interpolate against the complement
        let upper = |i: usize| self.total_mass.filter(|&m| 2.0 * grid[i] >= m);
        if v < grid[0] {
            return power_law(grid[0], values[0], grid[1], values[1], v)
                .unwrap_or(values[0] * v / grid[0]);
        }
        if v > grid[last] {
            return match self.total_mass {
                None => power_law(grid[last - 1], values[last - 1], grid[last], values[last], v)
                    .unwrap_or(values[last]),
                Some(m) => {
                    if v == m {
                        return 0.0;
                    }
                    let from_top = upper(last - 1).and_then(|_| {
                        power_law(m - grid[last], values[last], m - grid[last - 1], values[last - 1], m - v)
                    });
                    from_top.unwrap_or(values[last] * (m - v) / (m - grid[last]))
                }
            };
        }
        let j = grid.partition_point(|&g| g < v);
        if grid[j] == v {
            return values[j];
        }
        let (a, b) = (j - 1, j);
        let through = match upper(a) {
            Some(m) if grid[b] < m => power_law(m - grid[b], values[b], m - grid[a], values[a], m - v),
            Some(_) => None,
            None => power_law(grid[a], values[a], grid[b], values[b], v),
        };
        through.unwrap_or_else(|| {
            let t = (v - grid[a]) / (grid[b] - grid[a]);
            values[a] + t * (values[b] - values[a])
        })
    }

    /// `ψ(v) = I(v)^{N/(N−1)}`.
    pub fn psi(&self, v: f64) -> f64 {
        pow(self.eval(v), self.n / (self.n - 1.0))
    }

    /// Sample grid: the stored grid, or a default geometric grid for
    /// closed-form curves.
    pub fn grid(&self) -> Vec<f64> {
        match &self.representation {
            Representation::Sampled { grid, .. } => grid.clone(),
            Representation::ClosedFormCone { .. } => match self.total_mass {
                None => log_grid(1e-3, 1e3, DEFAULT_GRID_POINTS),
                Some(m) => mass_grid(m, 1e-3, DEFAULT_GRID_POINTS),
            },
        }
    }

    /// Profile values on [`grid`](Self::grid).
    pub fn values(&self) -> Vec<f64> {
        match &self.representation {
            Representation::Sampled { values, .. } => values.clone(),
            Representation::ClosedFormCone { .. } => self.grid().iter().map(|&v| self.eval(v)).collect(),
        }
    }

    /// The same profile evaluated on `grid` and stored as samples.
    pub fn sampled_on(&self, grid: &[f64]) -> Result<Self> {
        let values = grid.iter().map(|&v| self.eval(v)).collect();
        ProfileCurve::sampled(self.n, self.k, self.v0, self.total_mass, grid.to_vec(), values)
    }
}

/// Grid on `[lo·m, (1 − lo)·m]`, geometric towards both ends of the mass
/// and symmetric about `m/2`; `points` is rounded up to an odd count.
pub fn mass_grid(m: f64, lo: f64, points: usize) -> Vec<f64> {
    let half = log_grid(lo * m, 0.5 * m, points / 2 + 1);
    let mut g = half.clone();
    g.extend(half.iter().rev().skip(1).map(|&x| m - x));
    g
}

fn power_law(v1: f64, i1: f64, v2: f64, i2: f64, v: f64) -> Option<f64> {
    if i1 > 0.0 && i2 > 0.0 {
        let slope = log(i2 / i1) / log(v2 / v1);
        let out = i1 * pow(v / v1, slope);
        out.is_finite().then_some(out)
    } else {
        None
    }
}

/// `N (ω_N θ)^{1/N}`.
pub fn cone_constant(theta: f64, n: f64) -> f64 {
    n * pow(unit_ball_volume(n) * theta, 1.0 / n)
}

fn check_cone_params(theta: f64, n: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid("theta", format!("must lie in (0, 1], got {theta}")));
    }
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Error::invalid("N", format!("cones need N >= 2, got {n}")));
    }
    Ok(())
}

/// Closed-form profile of the Euclidean cone of opening `θ`.
pub fn cone_profile(theta: f64, n: f64) -> Result<ProfileCurve> {
    check_cone_params(theta, n)?;
    Ok(ProfileCurve {
        n,
        k: 0.0,
        v0: theta * unit_ball_volume(n),
        total_mass: None,
        representation: Representation::ClosedFormCone { theta },
    })
}

/// Cone profile folded at half of a finite mass: `I_cone(min(v, M − v))`.
pub fn truncated_cone_profile(theta: f64, n: f64, mass: f64) -> Result<ProfileCurve> {
    let mut c = cone_profile(theta, n)?;
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::invalid("mass", format!("must be positive and finite, got {mass}")));
    }
    c.total_mass = Some(mass);
    c.v0 = c.v0.min(mass);
    Ok(c)
}

/// Radius of the model ball of volume `v` (sectional curvature `k`).
pub fn model_ball_radius(n: f64, k: f64, v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::invalid("v", format!("must be >= 0, got {v}")));
    }
    if k == 0.0 {
        return Ok(pow(v / unit_ball_volume(n), 1.0 / n));
    }
    let mut hi = if k > 0.0 {
        let d = model_diameter(k);
        let total = model_ball_volume(n, k, d)?;
        if v > total {
            return Err(Error::invalid("v", format!("exceeds the model mass {total}")));
        }
        d
    } else {
        pow(v / unit_ball_volume(n), 1.0 / n).max(1.0)
    };
    if k < 0.0 {
        while model_ball_volume(n, k, hi)? < v {
            hi *= 2.0;
        }
    }
    // model_ball_volume cannot fail inside [0, hi]
    Ok(bisect(|r| model_ball_volume(n, k, r).unwrap_or(f64::NAN) - v, 0.0, hi, 200))
}

/// Profile of the model space form: `I(v) = s(N, K, r)` where
/// `v(N, K, r) = v`, sampled on `grid`. `k_sec` is the sectional curvature;
/// the curve records the Ricci bound `(N−1) k_sec`.
pub fn space_form_profile(n: f64, k_sec: f64, grid: &[f64]) -> Result<ProfileCurve> {
    if !(n > 1.0) {
        return Err(Error::invalid("N", format!("profiles need N > 1, got {n}")));
    }
    let total_mass = if k_sec > 0.0 {
        Some(model_ball_volume(n, k_sec, model_diameter(k_sec))?)
    } else {
        None
    };
    if let Some(m) = total_mass {
        if grid.iter().any(|&v| v >= m) {
            return Err(Error::Malformed(format!("grid must stay below the model mass {m}")));
        }
    }
    let values = grid
        .iter()
        .map(|&v| model_sphere_area(n, k_sec, model_ball_radius(n, k_sec, v)?))
        .collect::<Result<Vec<_>>>()?;
    let v0 = model_ball_volume(n, k_sec, model_diameter(k_sec).min(1.0))?;
    ProfileCurve::sampled(n, (n - 1.0) * k_sec, v0, total_mass, grid.to_vec(), values)
}

/// Profile of the weighted half-line `[0, r_max]`: the smaller of the
/// perimeters of `[0, a]` and `[b, r_max]` enclosing volume `v`.
pub fn half_line_profile(n: f64, r_max: Option<f64>, grid: &[f64]) -> Result<ProfileCurve> {
    let Some(r_max) = r_max else {
        let c = cone_profile(1.0, n)?;
        return c.sampled_on(grid);
    };
    let omega = unit_ball_volume(n);
    let mass = omega * pow(r_max, n);
    if grid.iter().any(|&v| v >= mass) {
        return Err(Error::Malformed(format!("grid must stay below the total mass {mass}")));
    }
    let values = grid
        .iter()
        .map(|&v| {
            let a = pow(v / omega, 1.0 / n);
            let b = pow((mass - v) / omega, 1.0 / n);
            n * omega * pow(a.min(b), n - 1.0)
        })
        .collect();
    ProfileCurve::sampled(n, 0.0, omega * pow(r_max.min(1.0), n), Some(mass), grid.to_vec(), values)
}

/// Profile of a model space sampled on `grid`; unions go through
/// [`generalized_profile_curve`] with `split_grid` allocations.
pub fn model_profile(space: &ModelSpace, grid: &[f64], split_grid: usize) -> Result<ProfileCurve> {
    space.validate()?;
    match space {
        ModelSpace::Cone { theta, dim } => cone_profile(*theta, *dim)?.sampled_on(grid),
        ModelSpace::SpaceForm { k, dim } => space_form_profile(*dim, *k, grid),
        ModelSpace::HalfLine { dim, r_max } => half_line_profile(*dim, *r_max, grid),
        ModelSpace::Union { parts } => {
            let curves = parts
                .iter()
                .map(|p| model_profile(p, grid, split_grid))
                .collect::<Result<Vec<_>>>()?;
            generalized_profile_curve(&curves, grid, split_grid)
        }
        ModelSpace::Warped { .. } => Err(Error::Undefined {
            quantity: "isoperimetric profile",
            space: "warped",
        }),
    }
}
