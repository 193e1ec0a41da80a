//! Comparison-geometry toolkit for model metric measure spaces.
//!
//! The crate evaluates the model comparison functions of spaces with Ricci
//! curvature bounded below (`sn_K`, `cos_k`/`sin_k`, the Heintze–Karcher
//! Jacobian, model ball volumes and sphere areas) and checks the sharp
//! isoperimetric, differential, barrier, rearrangement, spectral and
//! ε-regularity inequalities on spaces where everything is explicit:
//! space forms, Euclidean metric measure cones, the weighted half-line and
//! finite disjoint unions of those.
//!
//! Everything here is pure computation over `alloc` collections. File
//! formats and the command-line driver live in the `isocomp` crate.
//!
//! | module | contents |
//! |--------|----------|
//! | [`comparison`] | `sn_K`, `cos_k`, `sin_k`, `s_{k,λ}`, `J_{H,K,N}`, `ω_N`, `v(N,K,r)`, `s(N,K,r)`, Bishop–Gromov report |
//! | [`spaces`] | [`ModelSpace`] descriptors, ball data, AVR, densities, warped-metric Ricci components |
//! | [`profile`] | [`ProfileCurve`] and the profile-level verifiers |
//! | [`barriers`] | mean-curvature barrier certificates and equidistant bounds |
//! | [`rearrangement`] | monotone rearrangement, Pólya–Szegő, p-Laplacian eigenvalues |
//! | [`epsreg`] | almost-Euclidean profile ⇒ almost-Euclidean volume |

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod barriers;
pub mod comparison;
pub mod epsreg;
mod error;
pub mod numeric;
pub mod profile;
pub mod rearrangement;
mod report;
pub mod spaces;

pub use error::{Error, Result};
pub use profile::ProfileCurve;
pub use report::VerificationReport;
pub use spaces::ModelSpace;
