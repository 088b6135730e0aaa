//! Explicit minimal disks `F_N : Ω_N → R³` with Weierstrass data
//! `g = e^{i h_N}`, `φ = dz`, whose curvature blows up along the segment
//! `{(0, 0, t) : −1/2 ≤ t ≤ 0}`, together with a numerical verification
//! suite for the estimates that make them embedded and describe their limit.

// NaN must fail the negated comparisons, and rule constants are kept as published.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod domain;
pub mod error;
pub mod immersion;
pub mod mesh;
pub mod quadrature;
pub mod summation;
pub mod sweep;
pub mod verification;
pub mod weierstrass;

pub use domain::{DomainPoint, DomainSpec};
pub use error::{CoreError, Result};
pub use immersion::{immerse, slice, ImmersionPoint, SliceCurve};
pub use quadrature::{integrate, IntegralResult, QuadError, QuadOptions};
pub use weierstrass::{dzh, h, h_axis, HolomorphicSample};
