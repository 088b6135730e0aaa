//! Parameter domains `Ω_N = Ω_N⁺ ∪ Ω_N⁻`, the limit domain `Ω₀`, and the
//! pole set of `∂_z h_N`.
//!
//! `Ω_N⁻` is the thin rectangle `[-1/2, 0] × [-b_N, b_N]` with
//! `b_N = 1/(4 N^{5/2})`; `Ω_N⁺` flares out as
//! `|y| ≤ (x² + 1/N²)^{5/4} / 4` for `0 < x ≤ 1/2`. The two pieces meet
//! continuously at `x = 0`, which belongs to `Ω_N⁻`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

pub const X_MIN: f64 = -0.5;
pub const X_MAX: f64 = 0.5;
pub const MIN_N: u32 = 2;
/// Largest family index accepted by [`DomainSpec::new`].
pub const MAX_N: u32 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    n: u32,
    b_n: f64,
}

impl DomainSpec {
    pub fn new(n: u32) -> Result<Self> {
        if !(MIN_N..=MAX_N).contains(&n) {
            return Err(CoreError::InvalidN(n));
        }
        let nf = f64::from(n);
        Ok(Self { n, b_n: 1.0 / (4.0 * nf * nf * nf.sqrt()) })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// Half-width of `Ω_N⁻`.
    #[inline]
    pub fn b_n(&self) -> f64 {
        self.b_n
    }

    /// Upper boundary `y_{x,N}` of the domain over abscissa `x`.
    pub fn y_boundary(&self, x: f64) -> Result<f64> {
        if !(X_MIN..=X_MAX).contains(&x) {
            return Err(CoreError::OutOfRange { x });
        }
        Ok(self.y_boundary_unchecked(x))
    }

    #[inline]
    pub(crate) fn y_boundary_unchecked(&self, x: f64) -> f64 {
        if x > 0.0 {
            let a = 1.0 / self.nf();
            (x * x + a * a).powf(1.25) / 4.0
        } else {
            self.b_n
        }
    }

    /// Closed membership test for `Ω_N`.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (X_MIN..=X_MAX).contains(&x) && y.abs() <= self.y_boundary_unchecked(x)
    }

    /// `true` on the flared half `Ω_N⁺` (`x > 0`).
    pub fn is_upper(&self, x: f64) -> bool {
        x > 0.0
    }

    /// The `2(N+1)` poles `±i/N − k/N`, `0 ≤ k ≤ N`, ordered by `k` then sign.
    pub fn pole_positions(&self) -> Vec<Complex64> {
        let nf = self.nf();
        (0..=self.n)
            .flat_map(|k| {
                let re = -f64::from(k) / nf;
                [Complex64::new(re, 1.0 / nf), Complex64::new(re, -1.0 / nf)]
            })
            .collect()
    }

    /// Euclidean distance from `z` to the nearest pole.
    pub fn pole_distance(&self, z: Complex64) -> f64 {
        let nf = self.nf();
        let a = 1.0 / nf;
        // only the nearest k on the real axis matters
        let k = (-z.re * nf).round().clamp(0.0, nf);
        let dx = z.re + k / nf;
        let dy = z.im.abs() - a;
        dx.hypot(dy)
    }

    /// Smallest distance from any pole to the closed domain.
    ///
    /// Every pole has `Re ≤ 0`, so its distance to `Ω_N⁺` is at least that of
    /// the `k = 0` pole, and only the rectangle part needs checking per pole.
    pub fn pole_clearance(&self) -> f64 {
        let rect = self
            .pole_positions()
            .iter()
            .map(|p| {
                let dx = if p.re < X_MIN { X_MIN - p.re } else { 0.0 };
                dx.hypot((p.im.abs() - self.b_n).max(0.0))
            })
            .fold(f64::INFINITY, f64::min);
        let apex = self.distance_to_domain(Complex64::new(0.0, 1.0 / self.nf()));
        rect.min(apex)
    }

    /// Euclidean distance from `z` to the closed domain, zero inside.
    ///
    /// The `Ω_N⁻` rectangle is handled exactly; the `Ω_N⁺` part is minimised
    /// over its vertical fibres by a dense scan refined with golden-section
    /// search.
    pub fn distance_to_domain(&self, z: Complex64) -> f64 {
        if self.contains(z.re, z.im) {
            return 0.0;
        }
        let (px, py) = (z.re, z.im.abs());
        let dx = if px < X_MIN {
            X_MIN - px
        } else if px > 0.0 {
            px
        } else {
            0.0
        };
        let dy = (py - self.b_n).max(0.0);
        let rect = dx.hypot(dy);

        let fibre = |x: f64| -> f64 {
            let gap = (py - self.y_boundary_unchecked(x)).max(0.0);
            (x - px).hypot(gap)
        };
        const SCAN: usize = 4096;
        let step = X_MAX / SCAN as f64;
        let mut best_i = 1;
        let mut best = f64::INFINITY;
        for i in 1..=SCAN {
            let d = fibre(i as f64 * step);
            if d < best {
                best = d;
                best_i = i;
            }
        }
        let (mut lo, mut hi) = (((best_i - 1) as f64 * step).max(f64::MIN_POSITIVE), ((best_i + 1) as f64 * step).min(X_MAX));
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let m1 = hi - inv_phi * (hi - lo);
            let m2 = lo + inv_phi * (hi - lo);
            if fibre(m1) < fibre(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let upper = best.min(fibre(0.5 * (lo + hi)));
        rect.min(upper)
    }
}

/// Point of `Ω_N` carrying both the raw transverse coordinate and its
/// normalised form `eta = y / y_{x,N}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainPoint {
    pub x: f64,
    pub y: f64,
    pub eta: f64,
}

impl DomainPoint {
    pub fn from_eta(spec: &DomainSpec, x: f64, eta: f64) -> Result<Self> {
        let yb = spec.y_boundary(x)?;
        if !(-1.0..=1.0).contains(&eta) {
            return Err(CoreError::NotInDomain { n: spec.n(), x, y: eta * yb });
        }
        Ok(Self { x, y: eta * yb, eta })
    }

    pub fn from_xy(spec: &DomainSpec, x: f64, y: f64) -> Result<Self> {
        if !spec.contains(x, y) {
            return Err(CoreError::NotInDomain { n: spec.n(), x, y });
        }
        let yb = spec.y_boundary_unchecked(x);
        Ok(Self { x, y, eta: (y / yb).clamp(-1.0, 1.0) })
    }

    /// Point on the real axis.
    pub fn on_axis(x: f64) -> Self {
        Self { x, y: 0.0, eta: 0.0 }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Mirror image `(x, -y)`.
    pub fn conj(&self) -> Self {
        Self { x: self.x, y: -self.y, eta: -self.eta }
    }
}

/// Membership in the limit domain `Ω₀ = {0 < x ≤ 1/2, |y| ≤ x^{5/2}/4}`.
pub fn in_limit_domain(x: f64, y: f64) -> bool {
    x > 0.0 && x <= X_MAX && y.abs() <= x.powf(2.5) / 4.0
}

/// Uniform grid of `count` points on `[lo, hi]` (both ends included).
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * (i as f64 / last) }).collect()
        }
    }
}
