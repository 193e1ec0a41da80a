//! Model metric measure spaces with explicit ball data.
//!
//! Balls are always centered at the distinguished point of the model: the
//! tip of a cone, the pole of a space form, the origin of the half-line.
//! Cones are described by their opening `θ` and dimension only; no cross
//! section is ever built.

use alloc::format;
use alloc::vec::Vec;

use libm::{cosh, exp, pow, tanh};
use serde::{Deserialize, Serialize};

use crate::comparison::{model_ball_volume, model_diameter, model_sphere_area, sn, unit_ball_volume};
use crate::{Error, Result};

/// A model metric measure space.
///
/// Serialized with an internal `"type"` tag, e.g.
/// `{"type":"cone","theta":0.5,"dim":2}` or
/// `{"type":"space_form","K":1,"dim":2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpace {
    /// Simply connected space form of sectional curvature `K`.
    SpaceForm {
        #[serde(rename = "K", alias = "k")]
        k: f64,
        dim: f64,
    },
    /// Euclidean metric measure cone of opening `θ ∈ (0, 1]`.
    Cone { theta: f64, dim: f64 },
    /// `([0, r_max], |·|, N ω_N r^{N−1} dr)`; `r_max = None` means `[0, ∞)`.
    HalfLine {
        dim: f64,
        #[serde(default)]
        r_max: Option<f64>,
    },
    /// `dt² + dr² + σ(t, r)² dθ²` on `ℝ × [0, ∞) × S¹`.
    Warped { sigma: Warp },
    Union { parts: Vec<ModelSpace> },
}

impl ModelSpace {
    pub fn cone(theta: f64, dim: f64) -> Result<Self> {
        let s = ModelSpace::Cone { theta, dim };
        s.validate()?;
        Ok(s)
    }

    pub fn space_form(k: f64, dim: f64) -> Result<Self> {
        let s = ModelSpace::SpaceForm { k, dim };
        s.validate()?;
        Ok(s)
    }

    pub fn union(parts: Vec<ModelSpace>) -> Result<Self> {
        let s = ModelSpace::Union { parts };
        s.validate()?;
        Ok(s)
    }

    fn kind(&self) -> &'static str {
        match self {
            ModelSpace::SpaceForm { .. } => "space_form",
            ModelSpace::Cone { .. } => "cone",
            ModelSpace::HalfLine { .. } => "half_line",
            ModelSpace::Warped { .. } => "warped",
            ModelSpace::Union { .. } => "union",
        }
    }

    /// Checks parameter ranges (and, for unions, a common dimension).
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpace::Cone { theta, dim } => {
                if !(*theta > 0.0 && *theta <= 1.0) {
                    return Err(Error::invalid("theta", format!("must lie in (0, 1], got {theta}")));
                }
                if !(*dim >= 2.0) {
                    return Err(Error::invalid("dim", format!("cones need N >= 2, got {dim}")));
                }
            }
            ModelSpace::SpaceForm { k, dim } => {
                if !k.is_finite() {
                    return Err(Error::invalid("K", "must be finite"));
                }
                if !(*dim >= 1.0) {
                    return Err(Error::invalid("dim", format!("must be >= 1, got {dim}")));
                }
            }
            ModelSpace::HalfLine { dim, r_max } => {
                if !(*dim >= 1.0) {
                    return Err(Error::invalid("dim", format!("must be >= 1, got {dim}")));
                }
                if let Some(r) = r_max {
                    if !(*r > 0.0) {
                        return Err(Error::invalid("r_max", format!("must be positive, got {r}")));
                    }
                }
            }
            ModelSpace::Warped { .. } => {}
            ModelSpace::Union { parts } => {
                if parts.is_empty() {
                    return Err(Error::invalid("parts", "a union needs at least one part"));
                }
                let n0 = parts[0].dim()?;
                for p in parts {
                    p.validate()?;
                    let n = p.dim()?;
                    if n != n0 {
                        return Err(Error::DimensionMismatch(n0, n));
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimension `N` of the space.
    pub fn dim(&self) -> Result<f64> {
        match self {
            ModelSpace::SpaceForm { dim, .. }
            | ModelSpace::Cone { dim, .. }
            | ModelSpace::HalfLine { dim, .. } => Ok(*dim),
            ModelSpace::Warped { .. } => Ok(3.0),
            ModelSpace::Union { parts } => parts
                .first()
                .ok_or_else(|| Error::invalid("parts", "empty union"))?
                .dim(),
        }
    }

    /// Measure of the ball of radius `r` about the distinguished point.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.validate()?;
        if !(r >= 0.0) {
            return Err(Error::invalid("r", format!("must be >= 0, got {r}")));
        }
        match *self {
            ModelSpace::SpaceForm { k, dim } => model_ball_volume(dim, k, r),
            ModelSpace::Cone { theta, dim } => Ok(theta * unit_ball_volume(dim) * pow(r, dim)),
            ModelSpace::HalfLine { dim, r_max } => {
                let r = r_max.map_or(r, |m| r.min(m));
                Ok(unit_ball_volume(dim) * pow(r, dim))
            }
            _ => Err(Error::Undefined {
                quantity: "ball volume",
                space: self.kind(),
            }),
        }
    }

    /// Perimeter of the ball of radius `r` about the distinguished point.
    pub fn ball_perimeter(&self, r: f64) -> Result<f64> {
        self.validate()?;
        if !(r >= 0.0) {
            return Err(Error::invalid("r", format!("must be >= 0, got {r}")));
        }
        match *self {
            ModelSpace::SpaceForm { k, dim } => model_sphere_area(dim, k, r),
            ModelSpace::Cone { theta, dim } => {
                Ok(theta * dim * unit_ball_volume(dim) * pow(r, dim - 1.0))
            }
            ModelSpace::HalfLine { dim, r_max } => match r_max {
                Some(m) if r >= m => Ok(0.0),
                _ => Ok(dim * unit_ball_volume(dim) * pow(r, dim - 1.0)),
            },
            _ => Err(Error::Undefined {
                quantity: "ball perimeter",
                space: self.kind(),
            }),
        }
    }

    /// Total measure; `None` when infinite.
    pub fn total_mass(&self) -> Result<Option<f64>> {
        self.validate()?;
        match *self {
            ModelSpace::SpaceForm { k, dim } if k > 0.0 => {
                Ok(Some(model_ball_volume(dim, k, model_diameter(k))?))
            }
            ModelSpace::HalfLine { dim, r_max: Some(m) } => Ok(Some(unit_ball_volume(dim) * pow(m, dim))),
            ModelSpace::Union { ref parts } => {
                let mut total = 0.0;
                for p in parts {
                    match p.total_mass()? {
                        Some(m) => total += m,
                        None => return Ok(None),
                    }
                }
                Ok(Some(total))
            }
            _ => Ok(None),
        }
    }

    /// Asymptotic volume ratio `lim vol(B_r)/(ω_N r^N)`.
    ///
    /// `+∞` for hyperbolic space forms, `0` for compact models.
    pub fn avr(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            ModelSpace::Cone { theta, .. } => Ok(theta),
            ModelSpace::SpaceForm { k, .. } => Ok(if k == 0.0 {
                1.0
            } else if k < 0.0 {
                f64::INFINITY
            } else {
                0.0
            }),
            ModelSpace::HalfLine { r_max, .. } => Ok(if r_max.is_some() { 0.0 } else { 1.0 }),
            _ => Err(Error::Undefined {
                quantity: "AVR",
                space: self.kind(),
            }),
        }
    }

    /// Volume density at the tip (`at_tip`) or at a regular point.
    pub fn density(&self, at_tip: bool) -> Result<f64> {
        self.validate()?;
        match self {
            ModelSpace::Cone { theta, .. } if at_tip => Ok(*theta),
            ModelSpace::Union { parts } if at_tip => {
                let mut m = f64::INFINITY;
                for p in parts {
                    m = m.min(p.density(true)?);
                }
                Ok(m)
            }
            _ => Ok(1.0),
        }
    }

    /// Smallest density over the space and its limits at infinity.
    pub fn min_density_at_infinity(&self) -> Result<f64> {
        self.validate()?;
        match self {
            ModelSpace::Cone { theta, .. } => Ok(theta.min(1.0)),
            ModelSpace::SpaceForm { .. } | ModelSpace::HalfLine { .. } => Ok(1.0),
            ModelSpace::Warped { sigma } => sigma.asymptotic_density().ok_or(Error::Undefined {
                quantity: "minimal density at infinity",
                space: "this warped metric",
            }),
            ModelSpace::Union { parts } => {
                let mut m = f64::INFINITY;
                for p in parts {
                    m = m.min(p.min_density_at_infinity()?);
                }
                Ok(m)
            }
        }
    }

    /// Lower bound `v₀` on the volume of unit balls.
    pub fn unit_ball_lower_bound(&self) -> Result<f64> {
        self.validate()?;
        match self {
            ModelSpace::SpaceForm { k, dim } => model_ball_volume(*dim, *k, model_diameter(*k).min(1.0)),
            ModelSpace::Cone { .. } | ModelSpace::HalfLine { .. } => self.ball_volume(1.0),
            ModelSpace::Union { parts } => {
                let mut m = f64::INFINITY;
                for p in parts {
                    m = m.min(p.unit_ball_lower_bound()?);
                }
                Ok(m)
            }
            ModelSpace::Warped { .. } => Err(Error::Undefined {
                quantity: "unit ball volume",
                space: "warped",
            }),
        }
    }
}

/// Second derivatives `(∂t²σ, ∂r²σ, ∂t∂rσ)` of a warping function.
pub type WarpHessian = (f64, f64, f64);

/// A warping function `σ(t, r)` for the metric `dt² + dr² + σ² dθ²`.
pub trait WarpFunction {
    fn value(&self, t: f64, r: f64) -> f64;

    /// Exact second derivatives, when known in closed form.
    fn hessian(&self, _t: f64, _r: f64) -> Option<WarpHessian> {
        None
    }
}

impl<F: Fn(f64, f64) -> f64> WarpFunction for F {
    fn value(&self, t: f64, r: f64) -> f64 {
        self(t, r)
    }
}

/// Serializable warping functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warp {
    /// `σ = r`: flat `ℝ × ℝ²`.
    Flat,
    /// `σ = sn_k(r)`: `ℝ ×` the 2-dimensional space form of curvature `k`.
    Sn { k: f64 },
    /// `σ = e^{a t} r`.
    ExpLinear { a: f64 },
    /// `σ = r/2 + (ε(t)/2) tanh(r/ε(t))` with `ε(t) = eps0 / cosh(t/length)`.
    ///
    /// Equals `r` to first order at the axis, is concave in `r`, and tends to
    /// the cone profile `r/2 + ε/2`; the smoothing scale shrinks as
    /// `|t| → ∞`, so the pointed limits there are the cone `σ = r/2`.
    SmoothedCone { eps0: f64, length: f64 },
}

impl Warp {
    fn smoothing_scale(eps0: f64, length: f64, t: f64) -> f64 {
        eps0 / cosh(t / length)
    }

    fn asymptotic_density(&self) -> Option<f64> {
        match self {
            Warp::Flat | Warp::Sn { .. } => Some(1.0),
            Warp::SmoothedCone { .. } => Some(0.5),
            Warp::ExpLinear { .. } => None,
        }
    }
}

impl WarpFunction for Warp {
    fn value(&self, t: f64, r: f64) -> f64 {
        match *self {
            Warp::Flat => r,
            Warp::Sn { k } => sn(k, r),
            Warp::ExpLinear { a } => exp(a * t) * r,
            Warp::SmoothedCone { eps0, length } => {
                let eps = Warp::smoothing_scale(eps0, length, t);
                0.5 * r + 0.5 * eps * tanh(r / eps)
            }
        }
    }

    fn hessian(&self, t: f64, r: f64) -> Option<WarpHessian> {
        match *self {
            Warp::Flat => Some((0.0, 0.0, 0.0)),
            Warp::Sn { k } => Some((0.0, -k * sn(k, r), 0.0)),
            Warp::ExpLinear { a } => {
                let e = exp(a * t);
                Some((a * a * e * r, 0.0, a * e))
            }
            Warp::SmoothedCone { .. } => None,
        }
    }
}

/// Ricci tensor of `dt² + dr² + σ² dθ²` in the frame `∂t, ∂r, ∂θ/σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciComponents {
    pub ric_tt: f64,
    pub ric_rr: f64,
    pub ric_thth: f64,
    pub ric_tr: f64,
}

impl RicciComponents {
    fn from_hessian(sigma: f64, (stt, srr, str_): WarpHessian) -> Self {
        RicciComponents {
            ric_tt: -stt / sigma,
            ric_rr: -srr / sigma,
            ric_thth: -(stt + srr) / sigma,
            ric_tr: -str_ / sigma,
        }
    }

    /// Smallest eigenvalue of the (block-diagonal) Ricci tensor.
    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.ric_tt + self.ric_rr);
        let half_gap = 0.5 * (self.ric_tt - self.ric_rr);
        let disc = libm::sqrt(half_gap * half_gap + self.ric_tr * self.ric_tr);
        (mean - disc).min(self.ric_thth)
    }
}

fn check_positive<W: WarpFunction + ?Sized>(sigma: &W, t: f64, r: f64) -> Result<f64> {
    let s = sigma.value(t, r);
    if !(s > 0.0) {
        return Err(Error::invalid("sigma", format!("must be positive at (t, r) = ({t}, {r}), got {s}")));
    }
    Ok(s)
}

/// Offsets `x ± h` with a step that is exactly representable relative to `x`.
fn exact_step(x: f64, h: f64) -> f64 {
    (x + h) - x
}

fn fd_hessian<W: WarpFunction + ?Sized>(sigma: &W, t: f64, r: f64, h: f64) -> WarpHessian {
    let ht = exact_step(t, h);
    let hr = exact_step(r, h);
    let f = |dt: f64, dr: f64| sigma.value(t + dt, r + dr);
    let c = f(0.0, 0.0);
    let stt = (f(ht, 0.0) - 2.0 * c + f(-ht, 0.0)) / (ht * ht);
    let srr = (f(0.0, hr) - 2.0 * c + f(0.0, -hr)) / (hr * hr);
    let str_ = (f(ht, hr) - f(ht, -hr) - f(-ht, hr) + f(-ht, -hr)) / (4.0 * ht * hr);
    (stt, srr, str_)
}

/// Ricci components by centered differences with step `h`, refined by one
/// Richardson extrapolation step (`h` and `h/2`).
pub fn ricci_warped<W: WarpFunction + ?Sized>(sigma: &W, t: f64, r: f64, h: f64) -> Result<RicciComponents> {
    if !(h > 0.0) {
        return Err(Error::invalid("h", format!("step must be positive, got {h}")));
    }
    let s = check_positive(sigma, t, r)?;
    let coarse = fd_hessian(sigma, t, r, h);
    let fine = fd_hessian(sigma, t, r, 0.5 * h);
    let rich = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    let hess = (
        rich(coarse.0, fine.0),
        rich(coarse.1, fine.1),
        rich(coarse.2, fine.2),
    );
    Ok(RicciComponents::from_hessian(s, hess))
}

/// Ricci components from the closed-form second derivatives of `σ`.
pub fn ricci_warped_exact<W: WarpFunction + ?Sized>(sigma: &W, t: f64, r: f64) -> Result<RicciComponents> {
    let s = check_positive(sigma, t, r)?;
    let hess = sigma.hessian(t, r).ok_or(Error::Undefined {
        quantity: "closed-form second derivatives",
        space: "this warping function",
    })?;
    Ok(RicciComponents::from_hessian(s, hess))
}

/// Grid sweep of the Ricci tensor of a warped metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciSweep {
    /// Smallest eigenvalue estimate found; a heuristic value for `K` in `Ric ≥ K`.
    pub min_eigenvalue: f64,
    pub at_t: f64,
    pub at_r: f64,
    /// Smallest `Ric(∂r, ∂r)`; nonnegative whenever `σ` is concave in `r`.
    pub min_ric_rr: f64,
}

/// Sweeps `ricci_warped` over the tensor grid `ts × rs`.
///
/// This samples, it does not certify: the reported minimum is only a lower
/// bound estimate for `Ric` on the swept region.
pub fn ricci_sweep<W: WarpFunction + ?Sized>(sigma: &W, ts: &[f64], rs: &[f64], h: f64) -> Result<RicciSweep> {
    if ts.is_empty() || rs.is_empty() {
        return Err(Error::InsufficientGrid("empty sweep grid".into()));
    }
    let mut out = RicciSweep {
        min_eigenvalue: f64::INFINITY,
        at_t: ts[0],
        at_r: rs[0],
        min_ric_rr: f64::INFINITY,
    };
    for &t in ts {
        for &r in rs {
            let ric = ricci_warped(sigma, t, r, h)?;
            let e = ric.min_eigenvalue();
            if e < out.min_eigenvalue {
                out.min_eigenvalue = e;
                out.at_t = t;
                out.at_r = r;
            }
            out.min_ric_rr = out.min_ric_rr.min(ric.ric_rr);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{linspace, log_grid};
    use alloc::vec;
    use core::f64::consts::PI;
    use libm::sin;

    #[test]
    fn ball_volume_examples() {
        let plane = ModelSpace::cone(1.0, 2.0).unwrap();
        assert!((plane.ball_volume(1.0).unwrap() - PI).abs() < 1e-15);
        let half = ModelSpace::cone(0.5, 2.0).unwrap();
        assert!((half.ball_volume(2.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        let r3 = ModelSpace::space_form(0.0, 3.0).unwrap();
        assert!((r3.ball_volume(1.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-15);
        let s2 = ModelSpace::space_form(1.0, 2.0).unwrap();
        assert!(matches!(s2.ball_volume(4.0), Err(Error::BeyondDiameter { .. })));
    }

    #[test]
    fn ball_perimeter_examples() {
        let plane = ModelSpace::cone(1.0, 2.0).unwrap();
        assert!((plane.ball_perimeter(1.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        let c3 = ModelSpace::cone(0.5, 3.0).unwrap();
        assert!((c3.ball_perimeter(1.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        for n in [2.0, 3.0, 4.5] {
            let e = ModelSpace::space_form(0.0, n).unwrap();
            let r = 1.7;
            let expect = n * unit_ball_volume(n) * pow(r, n - 1.0);
            assert!((e.ball_perimeter(r).unwrap() - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn half_line_truncation() {
        let h = ModelSpace::HalfLine { dim: 3.0, r_max: Some(2.0) };
        let w = unit_ball_volume(3.0);
        assert!((h.ball_volume(5.0).unwrap() - 8.0 * w).abs() < 1e-13);
        assert_eq!(h.ball_perimeter(2.5).unwrap(), 0.0);
        assert_eq!(h.total_mass().unwrap(), Some(8.0 * w));
        assert_eq!(h.avr().unwrap(), 0.0);
    }

    #[test]
    fn avr_and_density() {
        assert_eq!(ModelSpace::cone(0.3, 2.0).unwrap().avr().unwrap(), 0.3);
        assert_eq!(ModelSpace::space_form(0.0, 4.0).unwrap().avr().unwrap(), 1.0);
        assert_eq!(ModelSpace::space_form(-1.0, 4.0).unwrap().avr().unwrap(), f64::INFINITY);
        assert_eq!(ModelSpace::space_form(1.0, 4.0).unwrap().avr().unwrap(), 0.0);
        let u = ModelSpace::union(vec![
            ModelSpace::cone(0.6, 2.0).unwrap(),
            ModelSpace::cone(0.2, 2.0).unwrap(),
        ])
        .unwrap();
        assert!(matches!(u.avr(), Err(Error::Undefined { .. })));

        let c = ModelSpace::cone(0.7, 3.0).unwrap();
        assert_eq!(c.density(true).unwrap(), 0.7);
        assert_eq!(c.density(false).unwrap(), 1.0);
        assert_eq!(ModelSpace::space_form(2.0, 3.0).unwrap().density(true).unwrap(), 1.0);

        assert_eq!(ModelSpace::cone(0.4, 2.0).unwrap().min_density_at_infinity().unwrap(), 0.4);
        assert_eq!(ModelSpace::space_form(-3.0, 5.0).unwrap().min_density_at_infinity().unwrap(), 1.0);
        assert_eq!(u.min_density_at_infinity().unwrap(), 0.2);
        let w = ModelSpace::Warped { sigma: Warp::SmoothedCone { eps0: 1.0, length: 5.0 } };
        assert_eq!(w.min_density_at_infinity().unwrap(), 0.5);
    }

    #[test]
    fn validation() {
        assert!(ModelSpace::cone(0.0, 2.0).is_err());
        assert!(ModelSpace::cone(1.2, 2.0).is_err());
        assert!(ModelSpace::cone(0.5, 1.5).is_err());
        let mixed = ModelSpace::union(vec![
            ModelSpace::cone(0.5, 2.0).unwrap(),
            ModelSpace::cone(0.5, 3.0).unwrap(),
        ]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch(_, _))));
    }

    #[test]
    fn bishop_gromov_and_coarea_on_models() {
        let spaces = [
            ModelSpace::cone(0.35, 2.0).unwrap(),
            ModelSpace::cone(0.8, 4.0).unwrap(),
            ModelSpace::space_form(0.0, 3.0).unwrap(),
            ModelSpace::space_form(-1.0, 3.0).unwrap(),
            ModelSpace::space_form(1.0, 2.5).unwrap(),
            ModelSpace::HalfLine { dim: 2.0, r_max: None },
        ];
        for s in &spaces {
            let n = s.dim().unwrap();
            let k = match s {
                ModelSpace::SpaceForm { k, .. } => *k,
                _ => 0.0,
            };
            let rs = log_grid(0.01, model_diameter(k).min(20.0) * 0.999, 40);
            let mut prev = f64::INFINITY;
            for &r in &rs {
                let vol = s.ball_volume(r).unwrap();
                let ratio = vol / model_ball_volume(n, k, r).unwrap();
                assert!(ratio <= prev + 1e-9, "{s:?} r={r}");
                prev = ratio;
                assert!(vol <= model_ball_volume(n, k, r).unwrap() * (1.0 + 1e-12));
                let h = 1e-6 * r;
                let fd = (s.ball_volume(r + h).unwrap() - s.ball_volume(r - h).unwrap()) / (2.0 * h);
                let per = s.ball_perimeter(r).unwrap();
                assert!(((fd - per) / per).abs() < 1e-6, "{s:?} r={r}: {fd} vs {per}");
            }
        }
    }

    #[test]
    fn ricci_flat_cone_vanishes() {
        let flat = |_t: f64, r: f64| r;
        for &t in &[-2.0, 0.0, 0.3, 5.0] {
            for &r in &[0.1, 0.7, 1.0, 3.3] {
                let ric = ricci_warped(&flat, t, r, 1e-4).unwrap();
                for c in [ric.ric_tt, ric.ric_rr, ric.ric_thth, ric.ric_tr] {
                    assert!(c.abs() <= 1e-8, "t={t} r={r}: {ric:?}");
                }
            }
        }
    }

    #[test]
    fn ricci_round_and_exponential() {
        let round = |_t: f64, r: f64| sin(r);
        let ric = ricci_warped(&round, 0.4, PI / 4.0, 1e-4).unwrap();
        assert!((ric.ric_rr - 1.0).abs() < 1e-6);
        assert!((ric.ric_thth - 1.0).abs() < 1e-6);
        assert!(ric.ric_tt.abs() < 1e-6 && ric.ric_tr.abs() < 1e-6);

        let grow = |t: f64, r: f64| exp(t) * r;
        let ric = ricci_warped(&grow, 0.0, 1.0, 1e-4).unwrap();
        assert!((ric.ric_tt + 1.0).abs() < 1e-6);
        assert!((ric.ric_tr + 1.0).abs() < 1e-6);
        assert!(ric.ric_rr.abs() < 1e-6);

        let exact = ricci_warped_exact(&Warp::ExpLinear { a: 1.0 }, 0.0, 1.0).unwrap();
        assert_eq!(exact.ric_tt, -1.0);
        assert_eq!(exact.ric_tr, -1.0);
        assert!(ricci_warped_exact(&Warp::SmoothedCone { eps0: 1.0, length: 1.0 }, 0.0, 1.0).is_err());
    }

    #[test]
    fn ricci_rejects_nonpositive_sigma() {
        let bad = |_t: f64, r: f64| r - 1.0;
        assert!(ricci_warped(&bad, 0.0, 0.5, 1e-4).is_err());
        assert!(ricci_warped(&Warp::Flat, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn smoothed_cone_is_concave_in_r() {
        let w = Warp::SmoothedCone { eps0: 0.5, length: 4.0 };
        let ts = linspace(-6.0, 6.0, 13);
        let rs = log_grid(0.05, 6.0, 25);
        let sweep = ricci_sweep(&w, &ts, &rs, 1e-4).unwrap();
        assert!(sweep.min_ric_rr >= -1e-6, "{sweep:?}");
        assert!(sweep.min_eigenvalue.is_finite());
        // the sweep sees the warp's own numbers
        let ric = ricci_warped(&w, ts[3], rs[7], 1e-4).unwrap();
        assert!(ric.min_eigenvalue() >= sweep.min_eigenvalue);
    }
}
