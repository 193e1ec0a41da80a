use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ProfileCurve;
use crate::{Error, Result};

/// Minimizing allocation of a volume among the parts of a union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub value: f64,
    /// `(part index, volume)` for every part, zero volumes included.
    pub allocation: Vec<(usize, f64)>,
}

impl SplitResult {
    /// Index of the part holding the largest volume.
    pub fn dominant_part(&self) -> usize {
        self.allocation
            .iter()
            .fold((0, f64::NEG_INFINITY), |best, &(j, v)| if v > best.1 { (j, v) } else { best })
            .0
    }
}

fn check_parts(parts: &[ProfileCurve]) -> Result<()> {
    let first = parts
        .first()
        .ok_or_else(|| Error::invalid("parts", "need at least one profile"))?;
    for p in parts {
        p.validate()?;
        if p.n != first.n {
            return Err(Error::DimensionMismatch(first.n, p.n));
        }
    }
    Ok(())
}

fn total(parts: &[ProfileCurve], alloc: &[f64]) -> f64 {
    parts.iter().zip(alloc).map(|(p, &v)| p.eval(v)).sum()
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Moves volume between parts `a` and `b` within `±width` while it helps.
fn refine_pair(parts: &[ProfileCurve], alloc: &mut [f64], a: usize, b: usize, width: f64) {
    let (va, vb) = (alloc[a], alloc[b]);
    // t is the volume moved from a to b
    let lo = (-vb).max(-width);
    let hi = va.min(width);
    if !(hi > lo) {
        return;
    }
    let f = |t: f64| parts[a].eval(va - t) + parts[b].eval(vb + t);
    let (mut x0, mut x1) = (lo, hi);
    let mut c = x1 - GOLDEN * (x1 - x0);
    let mut d = x0 + GOLDEN * (x1 - x0);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - GOLDEN * (x1 - x0);
            fc = f(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + GOLDEN * (x1 - x0);
            fd = f(d);
        }
    }
    // candidates: both bracket ends and the golden-section point
    let mut best = (0.0, f(0.0));
    for t in [lo, hi, 0.5 * (x0 + x1)] {
        let ft = f(t);
        if ft < best.1 {
            best = (t, ft);
        }
    }
    let t = best.0;
    if t != 0.0 {
        if t == va {
            alloc[a] = 0.0;
            alloc[b] = va + vb;
        } else if t == -vb {
            alloc[a] = va + vb;
            alloc[b] = 0.0;
        } else {
            alloc[a] = va - t;
            alloc[b] = vb + t;
        }
    }
}

fn refine(parts: &[ProfileCurve], alloc: &mut [f64], width: f64) {
    for _ in 0..4 {
        let before = total(parts, alloc);
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                refine_pair(parts, alloc, a, b, width);
            }
        }
        if !(total(parts, alloc) < before) {
            break;
        }
    }
}

fn exhaustive_two(parts: &[ProfileCurve], v: f64, m: usize) -> Vec<f64> {
    let mut best = (f64::INFINITY, vec![v, 0.0]);
    for i in 0..=m {
        let s = if i == m { v } else { v * i as f64 / m as f64 };
        let alloc = [s, if i == m { 0.0 } else { v - s }];
        let val = total(parts, &alloc);
        if val < best.0 {
            best = (val, alloc.to_vec());
        }
    }
    best.1
}

fn exhaustive_three(parts: &[ProfileCurve], v: f64, m: usize) -> Vec<f64> {
    let mut best = (f64::INFINITY, vec![v, 0.0, 0.0]);
    let step = v / m as f64;
    for i in 0..=m {
        for j in 0..=m - i {
            let a = if i == m { v } else { step * i as f64 };
            let b = if j == m { v } else { step * j as f64 };
            let c = if i + j == m { 0.0 } else { v - a - b };
            let alloc = [a, b, c.max(0.0)];
            let val = total(parts, &alloc);
            if val < best.0 {
                best = (val, alloc.to_vec());
            }
        }
    }
    best.1
}

/// Tabulated infimal convolution over parts merged one at a time.
fn pairwise_merge(parts: &[ProfileCurve], v: f64, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..=m)
        .map(|j| if j == m { v } else { v * j as f64 / m as f64 })
        .collect();
    let mut table: Vec<f64> = w.iter().map(|&x| parts[0].eval(x)).collect();
    // choice[p][j]: grid index given to part p + 1 when the merged volume is w[j]
    let mut choice: Vec<Vec<usize>> = Vec::with_capacity(parts.len() - 1);
    for part in &parts[1..] {
        let own: Vec<f64> = w.iter().map(|&x| part.eval(x)).collect();
        let mut next = vec![f64::INFINITY; m + 1];
        let mut arg = vec![0usize; m + 1];
        for j in 0..=m {
            for i in 0..=j {
                let val = table[j - i] + own[i];
                if val < next[j] {
                    next[j] = val;
                    arg[j] = i;
                }
            }
        }
        table = next;
        choice.push(arg);
    }
    let mut alloc = vec![0.0; parts.len()];
    let mut j = m;
    for p in (1..parts.len()).rev() {
        let i = choice[p - 1][j];
        alloc[p] = w[i];
        j -= i;
    }
    alloc[0] = w[j];
    // restore the exact total lost to grid rounding
    let placed: f64 = alloc[1..].iter().sum();
    alloc[0] = (v - placed).max(0.0);
    alloc
}

/// Generalized profile of a disjoint union:
/// `inf { Σ I_j(v_j) : Σ v_j = v }`.
///
/// Up to three parts are searched exhaustively on `split_grid` points per
/// coordinate (a simplex grid for three parts); more parts are merged
/// pairwise through a tabulated infimal convolution on `split_grid + 1`
/// volumes, costing `O(parts · split_grid²)`. Pairwise golden-section
/// refinement around the best grid allocation follows.
pub fn generalized_profile(parts: &[ProfileCurve], v: f64, split_grid: usize) -> Result<SplitResult> {
    check_parts(parts)?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid("v", format!("must be positive and finite, got {v}")));
    }
    if split_grid == 0 {
        return Err(Error::invalid("split_grid", "must be positive"));
    }
    let mut alloc = match parts.len() {
        1 => vec![v],
        2 => exhaustive_two(parts, v, split_grid),
        3 => exhaustive_three(parts, v, split_grid),
        _ => pairwise_merge(parts, v, split_grid),
    };
    if parts.len() > 1 {
        refine(parts, &mut alloc, v / split_grid as f64);
    }
    let value = total(parts, &alloc);
    if !value.is_finite() {
        return Err(Error::invalid("v", format!("exceeds the total mass of the union, got {v}")));
    }
    Ok(SplitResult {
        value,
        allocation: alloc.into_iter().enumerate().collect(),
    })
}

/// The generalized profile sampled on `grid`.
pub fn generalized_profile_curve(parts: &[ProfileCurve], grid: &[f64], split_grid: usize) -> Result<ProfileCurve> {
    check_parts(parts)?;
    let values = grid
        .iter()
        .map(|&v| Ok(generalized_profile(parts, v, split_grid)?.value))
        .collect::<Result<Vec<_>>>()?;
    let mut mass = Some(0.0);
    for p in parts {
        mass = match (mass, p.total_mass) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    }
    let k = parts.iter().map(|p| p.k).fold(f64::INFINITY, f64::min);
    let v0 = parts.iter().map(|p| p.v0).fold(f64::INFINITY, f64::min);
    ProfileCurve::sampled(parts[0].n, k, v0, mass, grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{cone_profile, cone_constant};
    use libm::{pow, sqrt};
    use core::f64::consts::PI;

    #[test]
    fn two_planes_concentrate() {
        let p = cone_profile(1.0, 2.0).unwrap();
        let r = generalized_profile(&[p.clone(), p], 4.0, 10_000).unwrap();
        assert!((r.value - 4.0 * sqrt(PI)).abs() < 1e-12);
        let vols: Vec<f64> = r.allocation.iter().map(|a| a.1).collect();
        assert!(vols.contains(&4.0) && vols.contains(&0.0));
    }

    #[test]
    fn smaller_opening_wins() {
        let parts = [cone_profile(0.2, 2.0).unwrap(), cone_profile(0.8, 2.0).unwrap()];
        for &v in &[0.01, 1.0, 37.0] {
            let r = generalized_profile(&parts, v, 2000).unwrap();
            assert_eq!(r.dominant_part(), 0);
            assert_eq!(r.allocation[0].1, v);
            let expect = 2.0 * sqrt(0.2 * PI) * sqrt(v);
            assert!((r.value - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn single_part_is_identity() {
        let p = cone_profile(0.3, 3.0).unwrap();
        let r = generalized_profile(core::slice::from_ref(&p), 2.5, 10).unwrap();
        assert_eq!(r.value, p.eval(2.5));
        assert_eq!(r.allocation, vec![(0, 2.5)]);
    }

    #[test]
    fn many_parts_merge() {
        let thetas = [0.9, 0.4, 0.7, 0.15, 0.5];
        let parts: Vec<ProfileCurve> = thetas.iter().map(|&t| cone_profile(t, 3.0).unwrap()).collect();
        let r = generalized_profile(&parts, 2.0, 200).unwrap();
        assert_eq!(r.dominant_part(), 3);
        let expect = cone_constant(0.15, 3.0) * pow(2.0, 2.0 / 3.0);
        assert!((r.value - expect).abs() < 1e-12 * expect);
        let sum: f64 = r.allocation.iter().map(|a| a.1).sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn finite_mass_parts_split_when_forced() {
        use crate::profile::truncated_cone_profile;
        let a = truncated_cone_profile(1.0, 2.0, 1.0).unwrap();
        let b = truncated_cone_profile(1.0, 2.0, 1.0).unwrap();
        let r = generalized_profile(&[a, b], 1.5, 1000).unwrap();
        assert!(r.value.is_finite());
        assert!(r.allocation.iter().all(|&(_, v)| v <= 1.0));
        assert!(generalized_profile(&[cone_profile(1.0, 2.0).unwrap(), cone_profile(1.0, 3.0).unwrap()], 1.0, 10).is_err());
    }
}
