//! The immersion `F_N`, its tangent frame, Gauss map and curvature, and the
//! horizontal slices `F_N(x, ·)`.
//!
//! Positions are integrated from the axis, where `F_N(x, 0) = (0, 0, x)`
//! holds exactly, up the vertical fibre using
//! `∂_y F = (cosh v sin u, −cosh v cos u, 0)`. The fibre is walked
//! cumulatively so a whole slice costs one pass.

use std::cell::Cell;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::domain::{uniform_grid, DomainPoint, DomainSpec};
use crate::error::{CoreError, Result};
use crate::quadrature::{integrate, QuadError, QuadOptions, DEFAULT_TOL};
use crate::weierstrass::{HolomorphicSample, VerticalLine};

/// Slices stop once the horizontal radius exceeds this.
pub const TRUNCATION_RADIUS: f64 = 1e6;
/// Beyond this `|v|`, curvature is reported from its logarithm only.
pub const LOG_SPACE_V: f64 = 300.0;
/// Sub-steps used when walking to a boundary point with truncation enabled.
const BOUNDARY_CHUNKS: usize = 32;

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImmersionPoint {
    pub position: Vec3,
    pub dfx: Vec3,
    pub dfy: Vec3,
    pub normal: Vec3,
    /// Gauss curvature; `|A|² = −2K`.
    pub k: f64,
    /// `ln |K|`, finite even where `K` underflows.
    pub log_k_mag: f64,
    pub sample: HolomorphicSample,
    pub quad_error: f64,
}

impl ImmersionPoint {
    pub fn a_squared(&self) -> f64 {
        -2.0 * self.k
    }
}

/// `(∂_x F, ∂_y F)` from `u`, `v`.
pub fn frame_from_sample(s: &HolomorphicSample) -> (Vec3, Vec3) {
    let (su, cu) = s.u.sin_cos();
    let (sh, ch) = (s.v.sinh(), s.v.cosh());
    ([sh * cu, sh * su, 1.0], [ch * su, -ch * cu, 0.0])
}

/// Unit normal `(cos u sech v, sin u sech v, −tanh v)`.
pub fn normal_from_sample(s: &HolomorphicSample) -> Vec3 {
    let (su, cu) = s.u.sin_cos();
    let sech = 1.0 / s.v.cosh();
    [cu * sech, su * sech, -s.v.tanh()]
}

/// Normal from the stereographic formula `(2 Re g, 2 Im g, |g|² − 1)/(|g|² + 1)`
/// with `g = e^{i u − v}`. Loses accuracy for large `|v|`; kept as a cross-check.
pub fn normal_stereographic(s: &HolomorphicSample) -> Vec3 {
    let g = num_complex::Complex64::from_polar((-s.v).exp(), s.u);
    let g2 = g.norm_sqr();
    let d = g2 + 1.0;
    [2.0 * g.re / d, 2.0 * g.im / d, (g2 - 1.0) / d]
}

/// `ln cosh v` without overflow.
pub fn ln_cosh(v: f64) -> f64 {
    let a = v.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `(K, ln|K|)` with `K = −|∂_z h|² / cosh⁴ v`.
pub fn curvature_from_sample(s: &HolomorphicSample) -> (f64, f64) {
    let log_k = 2.0 * s.dzh.norm().ln() - 4.0 * ln_cosh(s.v);
    let k = if s.v.abs() > LOG_SPACE_V {
        -log_k.exp()
    } else {
        let c2 = s.v.cosh().powi(2);
        -s.dzh.norm_sqr() / (c2 * c2)
    };
    (k, log_k)
}

fn sample_at(spec: &DomainSpec, p: &DomainPoint) -> Result<HolomorphicSample> {
    crate::weierstrass::h(spec, p, DEFAULT_TOL)
}

pub fn tangent_frame(spec: &DomainSpec, p: &DomainPoint) -> Result<(Vec3, Vec3)> {
    Ok(frame_from_sample(&sample_at(spec, p)?))
}

pub fn normal(spec: &DomainSpec, p: &DomainPoint) -> Result<Vec3> {
    Ok(normal_from_sample(&sample_at(spec, p)?))
}

pub fn curvature(spec: &DomainSpec, p: &DomainPoint) -> Result<(f64, f64)> {
    Ok(curvature_from_sample(&sample_at(spec, p)?))
}

/// Cumulative integrator along one vertical fibre, in one direction from the
/// axis.
#[derive(Debug, Clone)]
pub struct FibreWalker {
    line: VerticalLine,
    s: f64,
    u: f64,
    v: f64,
    pos: [f64; 2],
    error: f64,
    h_opts: QuadOptions,
    f_opts: QuadOptions,
}

impl FibreWalker {
    /// Starts at `(x, 0)`; `tol` is split evenly between `h` and `F`.
    pub fn new(spec: &DomainSpec, x: f64, tol: f64) -> Result<Self> {
        let line = VerticalLine::new(spec, x)?;
        let opts = QuadOptions::with_tol(0.5 * tol);
        Ok(Self { u: line.u0, line, s: 0.0, v: 0.0, pos: [0.0; 2], error: 0.0, h_opts: opts, f_opts: opts })
    }

    pub fn y(&self) -> f64 {
        self.s
    }

    pub fn position(&self) -> Vec3 {
        [self.pos[0], self.pos[1], self.line.x]
    }

    pub fn horizontal_radius(&self) -> f64 {
        self.pos[0].hypot(self.pos[1])
    }

    pub fn sample(&self) -> HolomorphicSample {
        HolomorphicSample { u: self.u, v: self.v, dzh: self.line.dzh_at(self.s), quad_error: self.error }
    }

    /// Advances `h` only.
    pub fn advance_h(&mut self, target: f64) -> Result<()> {
        let inc = self.line.increment(self.s, target, self.h_opts)?;
        self.u += inc.value[0];
        self.v += inc.value[1];
        self.error += inc.error_estimate;
        self.s = target;
        Ok(())
    }

    /// Advances `h` and the horizontal position.
    pub fn advance(&mut self, target: f64) -> Result<()> {
        let (s0, u0, v0) = (self.s, self.u, self.v);
        let line = self.line;
        let inner = self.h_opts;
        let failure: Cell<Option<QuadError>> = Cell::new(None);
        let leg = integrate(
            |sigma| match line.increment(s0, sigma, inner) {
                Ok(inc) => {
                    let (u, v) = (u0 + inc.value[0], v0 + inc.value[1]);
                    let (su, cu) = u.sin_cos();
                    let ch = v.cosh();
                    [ch * su, -ch * cu]
                }
                Err(e) => {
                    if let CoreError::Quadrature(q) = e {
                        failure.set(Some(q));
                    }
                    [f64::NAN; 2]
                }
            },
            s0,
            target,
            self.f_opts,
        );
        if let Some(q) = failure.take() {
            return Err(q.into());
        }
        let leg = leg?;
        self.pos[0] += leg.value[0];
        self.pos[1] += leg.value[1];
        self.error += leg.error_estimate;
        self.advance_h(target)
    }
}

/// `F_N(p)` with tangent frame, normal and curvature.
pub fn immerse(spec: &DomainSpec, p: &DomainPoint, tol: f64) -> Result<ImmersionPoint> {
    if !spec.contains(p.x, p.y) {
        return Err(CoreError::NotInDomain { n: spec.n(), x: p.x, y: p.y });
    }
    let mut walker = FibreWalker::new(spec, p.x, tol)?;
    if p.y != 0.0 {
        walker.advance(p.y)?;
    }
    Ok(point_from_walker(&walker))
}

fn point_from_walker(w: &FibreWalker) -> ImmersionPoint {
    let sample = w.sample();
    let (dfx, dfy) = frame_from_sample(&sample);
    let (k, log_k_mag) = curvature_from_sample(&sample);
    ImmersionPoint { position: w.position(), dfx, dfy, normal: normal_from_sample(&sample), k, log_k_mag, sample, quad_error: w.error }
}

/// Symmetric `eta` grid of odd size `m` containing 0.
pub fn eta_grid(m: usize) -> Result<Vec<f64>> {
    if m < 3 || m % 2 == 0 {
        return Err(CoreError::InvalidParameter(format!("slice size m = {m} must be odd and at least 3")));
    }
    Ok(uniform_grid(-1.0, 1.0, m))
}

/// `h_N` along the whole fibre on the `eta` grid of size `m`, without
/// positions.
pub fn fibre_samples(spec: &DomainSpec, x: f64, m: usize, tol: f64) -> Result<(Vec<f64>, Vec<HolomorphicSample>)> {
    let etas = eta_grid(m)?;
    let yb = spec.y_boundary(x)?;
    let ys: Vec<f64> = etas.iter().map(|e| e * yb).collect();
    let c = m / 2;
    let mut samples = vec![None; m];
    for dir in [1isize, -1] {
        let mut w = FibreWalker::new(spec, x, tol)?;
        samples[c] = Some(w.sample());
        let mut j = c as isize + dir;
        while (0..m as isize).contains(&j) {
            w.advance_h(ys[j as usize])?;
            samples[j as usize] = Some(w.sample());
            j += dir;
        }
    }
    Ok((ys, samples.into_iter().map(|s| s.expect("every index visited")).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceCurve {
    pub n: u32,
    pub x: f64,
    /// Transverse coordinates of all `m` grid samples.
    pub ys: Vec<f64>,
    /// `h_N` at every grid sample.
    pub samples: Vec<HolomorphicSample>,
    /// Grid indices whose positions were computed.
    pub kept: Range<usize>,
    /// `F_N(x, ys[j])` for `j` in `kept`.
    pub points: Vec<Vec3>,
    /// Direction `(sin u(x,0), −cos u(x,0))` of the slice at the axis.
    pub base_tangent: [f64; 2],
    /// `min_j cos(u(x, y_j) − u(x, 0))`.
    pub graph_margin: f64,
    /// `max_j |u(x, y_j) − u(x, 0)|`.
    pub max_du: f64,
    pub truncated: bool,
    pub quad_error: f64,
}

impl SliceCurve {
    pub fn point(&self, j: usize) -> Option<&Vec3> {
        if self.kept.contains(&j) {
            self.points.get(j - self.kept.start)
        } else {
            None
        }
    }
}

/// Horizontal slice `F_N(x, ·)` on the `eta` grid of odd size `m`.
pub fn slice(spec: &DomainSpec, x: f64, m: usize, tol: f64) -> Result<SliceCurve> {
    let etas = eta_grid(m)?;
    let yb = spec.y_boundary(x)?;
    let ys: Vec<f64> = etas.iter().map(|e| e * yb).collect();
    let c = m / 2;
    let mut samples: Vec<Option<HolomorphicSample>> = vec![None; m];
    let mut points: Vec<Option<Vec3>> = vec![None; m];
    let mut truncated = false;
    let mut quad_error = 0.0;
    for dir in [1isize, -1] {
        let mut w = FibreWalker::new(spec, x, tol)?;
        samples[c] = Some(w.sample());
        points[c] = Some(w.position());
        let mut j = c as isize + dir;
        let mut positions_live = true;
        while (0..m as isize).contains(&j) {
            let ju = j as usize;
            if positions_live {
                w.advance(ys[ju])?;
                if w.horizontal_radius() > TRUNCATION_RADIUS {
                    positions_live = false;
                    truncated = true;
                } else {
                    points[ju] = Some(w.position());
                }
            } else {
                w.advance_h(ys[ju])?;
            }
            samples[ju] = Some(w.sample());
            j += dir;
        }
        quad_error += w.error;
    }
    let samples: Vec<HolomorphicSample> = samples.into_iter().map(|s| s.expect("every index visited")).collect();
    let lo = points.iter().position(Option::is_some).unwrap_or(c);
    let hi = points.iter().rposition(Option::is_some).unwrap_or(c) + 1;
    let points: Vec<Vec3> = points[lo..hi].iter().map(|p| p.expect("contiguous around the axis")).collect();
    let u0 = samples[c].u;
    let (graph_margin, max_du) = graph_stats(&samples, u0);
    let (su, cu) = u0.sin_cos();
    Ok(SliceCurve {
        n: spec.n(),
        x,
        ys,
        samples,
        kept: lo..hi,
        points,
        base_tangent: [su, -cu],
        graph_margin,
        max_du,
        truncated,
        quad_error,
    })
}

/// `(min cos Δu, max |Δu|)` over samples relative to the axis angle `u0`.
pub fn graph_stats(samples: &[HolomorphicSample], u0: f64) -> (f64, f64) {
    samples.iter().fold((f64::INFINITY, 0.0f64), |(margin, du), s| {
        let d = s.u - u0;
        (margin.min(d.cos()), du.max(d.abs()))
    })
}

/// Distance from the axis point `F(x, 0)` to one slice endpoint `F(x, ±y_{x,N})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointSeparation {
    /// Measured separation, or a lower bound when truncated.
    pub distance: f64,
    /// `⟨F(x, y_end) − F(x, 0), ∂_y F(x, 0)⟩` (signed along the outward side).
    pub projected: f64,
    pub truncated: bool,
}

/// Separations of both slice endpoints from the axis at height `x`.
pub fn endpoint_separation(spec: &DomainSpec, x: f64, tol: f64) -> Result<[EndpointSeparation; 2]> {
    let yb = spec.y_boundary(x)?;
    let mut out = [EndpointSeparation { distance: 0.0, projected: 0.0, truncated: false }; 2];
    for (slot, sign) in out.iter_mut().zip([1.0, -1.0]) {
        let mut w = FibreWalker::new(spec, x, tol)?;
        let (su, cu) = w.line.u0.sin_cos();
        let tangent = [sign * su, -sign * cu];
        for i in 1..=BOUNDARY_CHUNKS {
            let target = sign * yb * (i as f64 / BOUNDARY_CHUNKS as f64);
            w.advance(target)?;
            if w.horizontal_radius() > TRUNCATION_RADIUS {
                slot.truncated = true;
                break;
            }
        }
        slot.distance = w.horizontal_radius();
        slot.projected = w.pos[0] * tangent[0] + w.pos[1] * tangent[1];
    }
    Ok(out)
}

/// Normalised mean-curvature residual `|⟨ΔF, n⟩| / (2 |∂_z h| cosh v)` from
/// central differences of the tangent frame. `step` is relative to the local
/// length scale `1/|∂_z h|`. Zero for a minimal
/// surface up to discretisation and quadrature error.
pub fn mean_curvature_residual(spec: &DomainSpec, p: &DomainPoint, step: f64, tol: f64) -> Result<f64> {
    let opts = QuadOptions::with_tol(tol);
    let sample = |x: f64, y: f64| -> Result<HolomorphicSample> {
        let line = VerticalLine::new(spec, x)?;
        line.sample(y, opts)
    };
    let c = sample(p.x, p.y)?;
    // `step` is measured in units of the local length scale 1/|dzh|
    let scale = c.dzh.norm();
    let step = step / scale.max(1.0);
    let (xp, xm) = (sample(p.x + step, p.y)?, sample(p.x - step, p.y)?);
    let (yp, ym) = (sample(p.x, p.y + step)?, sample(p.x, p.y - step)?);
    let fx = |s: &HolomorphicSample| frame_from_sample(s).0;
    let fy = |s: &HolomorphicSample| frame_from_sample(s).1;
    let (fxp, fxm, fyp, fym) = (fx(&xp), fx(&xm), fy(&yp), fy(&ym));
    let lap: Vec3 = std::array::from_fn(|i| (fxp[i] - fxm[i] + fyp[i] - fym[i]) / (2.0 * step));
    let n = normal_from_sample(&c);
    let along = lap.iter().zip(n).map(|(a, b)| a * b).sum::<f64>();
    Ok(along.abs() / (2.0 * scale * c.v.cosh()))
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}
