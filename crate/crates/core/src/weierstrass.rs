//! Weierstrass data `g = e^{i h_N}`, `φ = dz` of the family.
//!
//! `∂_z h_N` is a finite sum of squared-Lorentzian poles clustered at
//! `±i/N − k/N`. `h_N` itself is evaluated as its real closed form on the
//! axis plus a vertical path integral of `i·∂_z h_N`, which keeps every
//! evaluation inside `Ω_N` and away from complex-arctan branch cuts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainPoint, DomainSpec};
use crate::error::{CoreError, Result};
use crate::quadrature::{integrate, IntegralResult, QuadOptions};
use crate::summation::{ComplexSum, NeumaierSum};

/// Closer than this to a pole, `∂_z h_N` is reported as singular.
pub const POLE_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicSample {
    /// `Re h_N`: the turning angle of the Gauss map.
    pub u: f64,
    /// `Im h_N`.
    pub v: f64,
    pub dzh: Complex64,
    pub quad_error: f64,
}

/// `∂_z h_N(z)` without domain or pole checks.
pub fn dzh_unchecked(spec: &DomainSpec, z: Complex64) -> Complex64 {
    let nf = spec.nf();
    let a2 = 1.0 / (nf * nf);
    let pole = |w: Complex64| {
        let q = w * w + a2;
        (q * q).inv()
    };
    let mut tail = ComplexSum::new();
    for k in 1..=spec.n() {
        tail.add(pole(z + f64::from(k) / nf));
    }
    0.5 * (pole(z) + tail.value() / nf)
}

/// `∂_z h_N(z)` for `z ∈ Ω_N`.
pub fn dzh(spec: &DomainSpec, z: Complex64) -> Result<Complex64> {
    if !spec.contains(z.re, z.im) {
        return Err(CoreError::NotInDomain { n: spec.n(), x: z.re, y: z.im });
    }
    dzh_off_domain(spec, z)
}

/// `∂_z h_N(z)` anywhere except within [`POLE_GUARD`] of a pole.
pub fn dzh_off_domain(spec: &DomainSpec, z: Complex64) -> Result<Complex64> {
    let dist = spec.pole_distance(z);
    if dist < POLE_GUARD {
        return Err(CoreError::Singularity { re: z.re, im: z.im, dist });
    }
    Ok(dzh_unchecked(spec, z))
}

/// `∂_x u_N(x, 0) = ∂_y v_N(x, 0)`, the real restriction of `∂_z h_N`.
pub fn dxu_axis(spec: &DomainSpec, x: f64) -> Result<f64> {
    spec.y_boundary(x)?;
    Ok(dxu_axis_unchecked(spec, x))
}

pub(crate) fn dxu_axis_unchecked(spec: &DomainSpec, x: f64) -> f64 {
    let nf = spec.nf();
    let a2 = 1.0 / (nf * nf);
    let pole = |w: f64| {
        let q = w * w + a2;
        1.0 / (q * q)
    };
    let tail: NeumaierSum = (1..=spec.n()).map(|k| pole(x + f64::from(k) / nf)).collect();
    0.5 * (pole(x) + tail.value() / nf)
}

/// `u_N(x, 0) = h_N(x)` from the real closed form of the antiderivative.
pub fn h_axis(spec: &DomainSpec, x: f64) -> Result<f64> {
    spec.y_boundary(x)?;
    Ok(h_axis_unchecked(spec, x))
}

pub(crate) fn h_axis_unchecked(spec: &DomainSpec, x: f64) -> f64 {
    let nf = spec.nf();
    let a2 = 1.0 / (nf * nf);
    let prim = |w: f64| nf * (nf * w).atan() + w / (w * w + a2);
    let mut tail = NeumaierSum::new();
    for k in 1..=spec.n() {
        tail.add(prim(x + f64::from(k) / nf));
    }
    let mut acc = NeumaierSum::new();
    acc.add(prim(x));
    acc.add(tail.value() / nf);
    0.25 * nf * nf * acc.value()
}

/// `u_N(x1, 0) − u_N(x0, 0)` without forming the two large closed-form
/// values; each arctan and rational pair is differenced analytically.
pub fn h_axis_increment(spec: &DomainSpec, x0: f64, x1: f64) -> Result<f64> {
    spec.y_boundary(x0)?;
    spec.y_boundary(x1)?;
    Ok(h_axis_increment_unchecked(spec, x0, x1))
}

pub(crate) fn h_axis_increment_unchecked(spec: &DomainSpec, x0: f64, x1: f64) -> f64 {
    let nf = spec.nf();
    let a2 = 1.0 / (nf * nf);
    let d = x1 - x0;
    let prim_diff = |w0: f64, w1: f64| {
        let (p0, p1) = (nf * w0, nf * w1);
        let atan_diff = (nf * d).atan2(1.0 + p0 * p1);
        let rat_diff = d * (a2 - w0 * w1) / ((w1 * w1 + a2) * (w0 * w0 + a2));
        nf * atan_diff + rat_diff
    };
    let mut tail = NeumaierSum::new();
    for k in 1..=spec.n() {
        let s = f64::from(k) / nf;
        tail.add(prim_diff(x0 + s, x1 + s));
    }
    let mut acc = NeumaierSum::new();
    acc.add(prim_diff(x0, x1));
    acc.add(tail.value() / nf);
    0.25 * nf * nf * acc.value()
}

/// One vertical fibre `{x} × [-y_{x,N}, y_{x,N}]` of the domain.
#[derive(Debug, Clone, Copy)]
pub struct VerticalLine {
    pub spec: DomainSpec,
    pub x: f64,
    /// `u_N(x, 0)`.
    pub u0: f64,
}

impl VerticalLine {
    pub fn new(spec: &DomainSpec, x: f64) -> Result<Self> {
        Ok(Self { spec: *spec, x, u0: h_axis(spec, x)? })
    }

    #[inline]
    pub fn dzh_at(&self, s: f64) -> Complex64 {
        dzh_unchecked(&self.spec, Complex64::new(self.x, s))
    }

    /// `d/ds (u, v)(x, s) = (−Im ∂_z h, Re ∂_z h)`.
    #[inline]
    pub fn rate(&self, s: f64) -> [f64; 2] {
        let d = self.dzh_at(s);
        [-d.im, d.re]
    }

    /// `(Δu, Δv)` along the fibre from `s0` to `s1`.
    pub fn increment(&self, s0: f64, s1: f64, opts: QuadOptions) -> Result<IntegralResult<2>> {
        Ok(integrate(|s| self.rate(s), s0, s1, opts)?)
    }

    /// `h_N(x + i y)` by quadrature from the axis.
    pub fn sample(&self, y: f64, opts: QuadOptions) -> Result<HolomorphicSample> {
        let inc = self.increment(0.0, y, opts)?;
        Ok(HolomorphicSample { u: self.u0 + inc.value[0], v: inc.value[1], dzh: self.dzh_at(y), quad_error: inc.error_estimate })
    }
}

/// `h_N` at a domain point, with quadrature tolerance `tol`.
pub fn h(spec: &DomainSpec, p: &DomainPoint, tol: f64) -> Result<HolomorphicSample> {
    if !spec.contains(p.x, p.y) {
        return Err(CoreError::NotInDomain { n: spec.n(), x: p.x, y: p.y });
    }
    VerticalLine::new(spec, p.x)?.sample(p.y, QuadOptions::with_tol(tol))
}

/// `∂_y v_N = Re ∂_z h_N` at `(x, y)` (Cauchy–Riemann).
pub fn dyv(spec: &DomainSpec, x: f64, y: f64) -> Result<f64> {
    Ok(dzh(spec, Complex64::new(x, y))?.re)
}

/// `∂_y u_N = −Im ∂_z h_N` at `(x, y)`.
pub fn dyu(spec: &DomainSpec, x: f64, y: f64) -> Result<f64> {
    Ok(-dzh(spec, Complex64::new(x, y))?.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::uniform_grid;
    use proptest::prelude::*;

    fn spec(n: u32) -> DomainSpec {
        DomainSpec::new(n).unwrap()
    }

    #[test]
    fn dzh_fixture_values() {
        let s = spec(2);
        let v = dzh(&s, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v.re - 9.16).abs() < 1e-13 && v.im == 0.0);
        let v = dzh(&s, Complex64::new(-0.25, 0.0)).unwrap();
        assert!((v.re - 8.0586980).abs() / 8.0586980 < 1e-7);
        assert_eq!(dxu_axis(&s, 0.0).unwrap(), v_at(&s, 0.0));
    }

    fn v_at(s: &DomainSpec, x: f64) -> f64 {
        dzh(s, Complex64::new(x, 0.0)).unwrap().re
    }

    #[test]
    fn dzh_rejects_poles_and_outside() {
        let s = spec(2);
        assert!(matches!(dzh(&s, Complex64::new(0.0, 0.3)), Err(CoreError::NotInDomain { .. })));
        assert!(matches!(dzh_off_domain(&s, Complex64::new(-0.5, 0.5)), Err(CoreError::Singularity { .. })));
        assert!(dzh_off_domain(&s, Complex64::new(-0.5, 0.49)).is_ok());
    }

    #[test]
    fn h_axis_fixture() {
        let u = h_axis(&spec(2), 0.0).unwrap();
        let expected = 1f64.atan() + 0.5 + 2f64.atan() + 0.4;
        assert!((u - expected).abs() < 1e-14);
        assert!((u - 2.7925469).abs() < 1e-7);
        assert!(h_axis(&spec(2), 0.75).is_err());
    }

    #[test]
    fn h_axis_derivative_matches_dzh() {
        for n in [2, 8, 33] {
            let s = spec(n);
            for x in [-0.4, -0.1, 0.0, 0.2, 0.45] {
                let eps = 1e-6;
                let fd = (h_axis(&s, x + eps).unwrap() - h_axis(&s, x).unwrap()) / eps;
                let exact = dxu_axis(&s, x).unwrap();
                assert!(((fd - exact) / exact).abs() < 1e-4, "N={n} x={x}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn increment_agrees_with_difference() {
        for n in [2, 16, 256] {
            let s = spec(n);
            let (x0, x1) = (-0.31, 0.27);
            let direct = h_axis(&s, x1).unwrap() - h_axis(&s, x0).unwrap();
            let inc = h_axis_increment(&s, x0, x1).unwrap();
            let scale = h_axis(&s, x1).unwrap().abs();
            assert!((direct - inc).abs() <= 1e-13 * scale, "N={n}: {direct} vs {inc}");
        }
    }

    #[test]
    fn dxu_positive_on_grid() {
        for n in 2..=64 {
            let s = spec(n);
            for x in uniform_grid(-0.5, 0.5, 1001) {
                assert!(dxu_axis(&s, x).unwrap() > 0.0);
            }
        }
        assert!(dxu_axis(&spec(8), -0.25).unwrap() >= 64.0);
    }

    #[test]
    fn h_on_axis_is_real() {
        let s = spec(4);
        let hs = h(&s, &DomainPoint::on_axis(-0.2), 1e-10).unwrap();
        assert_eq!(hs.v, 0.0);
        assert_eq!(hs.u, h_axis(&s, -0.2).unwrap());
    }

    #[test]
    fn transverse_growth_example() {
        let s = spec(2);
        for eta in [0.1, 0.5, 1.0] {
            let p = DomainPoint::from_eta(&s, -0.25, eta).unwrap();
            let hs = h(&s, &p, 1e-10).unwrap();
            assert!(hs.v >= 161.0 / 3200.0 * 8.0 * p.y);
        }
    }

    #[test]
    fn reflection_is_conjugation() {
        let s = spec(8);
        for (x, eta) in [(0.3, 0.9), (-0.1, 0.5), (0.01, -1.0)] {
            let p = DomainPoint::from_eta(&s, x, eta).unwrap();
            let a = h(&s, &p, 1e-10).unwrap();
            let b = h(&s, &p.conj(), 1e-10).unwrap();
            assert!((a.u - b.u).abs() <= 2e-10 * (1.0 + a.u.abs()));
            assert!((a.v + b.v).abs() <= 2e-10 * (1.0 + a.v.abs()));
        }
    }

    #[test]
    fn h_rejects_outside_point() {
        let p = DomainPoint { x: -0.2, y: 0.1, eta: 1.0 };
        assert!(h(&spec(4), &p, 1e-10).is_err());
    }

    proptest! {
        #[test]
        fn schwarz_reflection_of_dzh(n in 2u32..=128, x in -0.5f64..=0.5, eta in -1.0f64..=1.0) {
            let s = spec(n);
            let y = eta * s.y_boundary(x).unwrap();
            let a = dzh(&s, Complex64::new(x, y)).unwrap();
            let b = dzh(&s, Complex64::new(x, -y)).unwrap();
            prop_assert_eq!(a, b.conj());
        }

        #[test]
        fn axis_monotone(n in 2u32..=256, x1 in -0.5f64..0.5, dx in 1e-4f64..0.5) {
            let s = spec(n);
            let x2 = (x1 + dx).min(0.5);
            prop_assume!(x2 > x1);
            prop_assert!(h_axis_increment(&s, x1, x2).unwrap() > 0.0);
        }
    }
}
