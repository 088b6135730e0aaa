//! Adaptive Gauss–Kronrod (G7/K15) quadrature for vector-valued integrands.
//!
//! Globally adaptive: the panel with the largest error estimate is bisected
//! until the summed estimate passes `max(abs_tol, rel_tol·|I|)`. All
//! components share one partition. Panel contributions are accumulated with
//! compensated summation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::summation::{NeumaierSum, VecSum};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 20_000;

/// Number of integrand calls made by one application of the K15 rule.
pub const RULE_SIZE: usize = 15;

// Kronrod abscissae on [-1, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult<const D: usize> {
    #[serde(with = "serde_arrays")]
    pub value: [f64; D],
    pub error_estimate: f64,
    pub evaluations: usize,
}

mod serde_arrays {
    use serde::ser::{Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(v: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge (estimate {error_estimate:e} after {evaluations} evaluations, partial value {partial:?})")]
    Convergence { partial: Vec<f64>, error_estimate: f64, evaluations: usize },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("invalid quadrature arguments: {0}")]
    InvalidArguments(&'static str),
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: DEFAULT_TOL, rel_tol: DEFAULT_TOL, max_depth: DEFAULT_MAX_DEPTH }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: tol, ..Self::default() }
    }
}

struct Panel<const D: usize> {
    a: f64,
    b: f64,
    depth: u32,
    value: [f64; D],
    error: f64,
}

impl<const D: usize> PartialEq for Panel<D> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const D: usize> Eq for Panel<D> {}
impl<const D: usize> PartialOrd for Panel<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const D: usize> Ord for Panel<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken by position so the refinement order is deterministic
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

#[inline]
fn norm<const D: usize>(v: &[f64; D]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn kronrod15<const D: usize, F>(f: &mut F, a: f64, b: f64) -> Result<([f64; D], f64), QuadError>
where
    F: FnMut(f64) -> [f64; D],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<[f64; D], QuadError> {
        let v = f(x);
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };

    let fc = eval(center)?;
    let mut kron = [0.0; D];
    let mut gauss = [0.0; D];
    for d in 0..D {
        kron[d] = WGK[7] * fc[d];
        gauss[d] = WG[3] * fc[d];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        for d in 0..D {
            let s = f1[d] + f2[d];
            kron[d] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[d] += WG[j / 2] * s;
            }
        }
    }
    let mut diff = [0.0; D];
    for d in 0..D {
        kron[d] *= half;
        gauss[d] *= half;
        diff[d] = kron[d] - gauss[d];
    }
    Ok((kron, norm(&diff)))
}

/// Integrates a vector-valued `f` over `[a, b]`. Reversed bounds negate the
/// result.
pub fn integrate<const D: usize, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<IntegralResult<D>, QuadError>
where
    F: FnMut(f64) -> [f64; D],
{
    if !(opts.abs_tol > 0.0 && opts.rel_tol > 0.0) {
        return Err(QuadError::InvalidArguments("tolerances must be positive"));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadError::InvalidArguments("bounds must be finite"));
    }
    if a > b {
        let mut r = integrate_forward(f, b, a, opts)?;
        r.value.iter_mut().for_each(|v| *v = -*v);
        return Ok(r);
    }
    integrate_forward(f, a, b, opts)
}

fn integrate_forward<const D: usize, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<IntegralResult<D>, QuadError>
where
    F: FnMut(f64) -> [f64; D],
{
    let (value, error) = kronrod15(&mut f, a, b)?;
    let mut evaluations = RULE_SIZE;
    let target = |v: &[f64; D]| opts.abs_tol.max(opts.rel_tol * norm(v));
    if error <= target(&value) || a == b {
        return Ok(IntegralResult { value, error_estimate: error, evaluations });
    }

    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, depth: 0, value, error });
    loop {
        let mut total = VecSum::<D>::default();
        let mut err = NeumaierSum::new();
        for p in heap.iter() {
            total.add(&p.value);
            err.add(p.error);
        }
        let total = total.value();
        let err = err.value();
        if err <= target(&total) {
            return Ok(IntegralResult { value: total, error_estimate: err, evaluations });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= opts.max_depth || heap.len() + 2 > MAX_PANELS || !(worst.a < mid && mid < worst.b) {
            return Err(QuadError::Convergence { partial: total.to_vec(), error_estimate: err, evaluations });
        }
        let (lv, le) = kronrod15(&mut f, worst.a, mid)?;
        let (rv, re) = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 2 * RULE_SIZE;
        heap.push(Panel { a: worst.a, b: mid, depth: worst.depth + 1, value: lv, error: le });
        heap.push(Panel { a: mid, b: worst.b, depth: worst.depth + 1, value: rv, error: re });
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<IntegralResult<1>, QuadError>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| [f(x)], a, b, opts)
}
