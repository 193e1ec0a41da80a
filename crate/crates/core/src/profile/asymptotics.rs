use alloc::format;
use alloc::vec::Vec;

use libm::{log, pow};
use serde::{Deserialize, Serialize};

use super::{ProfileCurve, Representation};
use crate::numeric::{aitken, log_grid};
use crate::{Error, Result};

/// Extrapolated end behavior of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    /// `lim_{v→0} I(v)/v^{(N−1)/N}`.
    pub small_limit: f64,
    /// `lim_{v→∞} I(v)/v^{(N−1)/N}`; absent for finite mass.
    pub large_limit: Option<f64>,
    /// `lim_{v→∞} v^{1/N} I'(v)`; absent for finite mass.
    pub derivative_limit: Option<f64>,
}

const DECADES: f64 = 100.0;

/// Aitken-accelerated limits of `I/v^{(N−1)/N}` at both ends of the grid and
/// of `v^{1/N} I'` at the large end.
///
/// The small-volume limit uses the values at `v_min`, `10 v_min`,
/// `100 v_min`; the large-volume limits use `v_max/100`, `v_max/10`,
/// `v_max`. `I'` is a forward difference in log–log coordinates between
/// neighboring grid nodes. Closed-form cones are sampled on `[1e−8, 1e8]`.
pub fn asymptotics(curve: &ProfileCurve) -> Result<Asymptotics> {
    curve.validate()?;
    let grid = match curve.representation {
        Representation::ClosedFormCone { .. } if curve.total_mass.is_none() => log_grid(1e-8, 1e8, 161),
        _ => curve.grid(),
    };
    let values: Vec<f64> = grid.iter().map(|&v| curve.eval(v)).collect();
    let (vmin, vmax) = (grid[0], grid[grid.len() - 1]);
    if vmax / vmin < DECADES {
        return Err(Error::InsufficientGrid(format!(
            "grid spans [{vmin}, {vmax}], need at least two decades"
        )));
    }
    let a = curve.alpha();
    let ratio = |v: f64| curve.eval(v) / pow(v, a);
    let small_limit = aitken(ratio(DECADES * vmin), ratio(10.0 * vmin), ratio(vmin));
    if curve.total_mass.is_some() {
        return Ok(Asymptotics {
            small_limit,
            large_limit: None,
            derivative_limit: None,
        });
    }
    let large_limit = aitken(ratio(vmax / DECADES), ratio(vmax / 10.0), ratio(vmax));

    let n = curve.n;
    let slope = |target: f64| {
        let i = grid.partition_point(|&g| g <= target).clamp(1, grid.len() - 1) - 1;
        let (v0, v1, i0, i1) = (grid[i], grid[i + 1], values[i], values[i + 1]);
        let dlog = log(i1 / i0) / log(v1 / v0);
        pow(v0, 1.0 / n) * i0 / v0 * dlog
    };
    let derivative_limit = aitken(slope(vmax / DECADES), slope(vmax / 10.0), slope(vmax));
    Ok(Asymptotics {
        small_limit,
        large_limit: Some(large_limit),
        derivative_limit: Some(derivative_limit),
    })
}
