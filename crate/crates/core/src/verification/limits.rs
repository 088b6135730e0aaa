//! Limit-lamination diagnostics: spiral rate of the upper leaf, slab
//! thickness `ε_N` of the lower leaves, and the `δ`-neighbourhood of the
//! singular segment.

use std::f64::consts::PI;

use crate::domain::{DomainSpec, X_MAX, X_MIN};
use crate::error::{CoreError, Result};
use crate::weierstrass::{dxu_axis, h_axis_increment};

/// Angle turned by the slice direction between heights `t` and `2t`:
/// `u_N(2t, 0) − u_N(t, 0)`.
pub fn spiral_angle(spec: &DomainSpec, t: f64) -> Result<f64> {
    if !(t > 0.0 && 2.0 * t <= X_MAX) {
        return Err(CoreError::InvalidParameter(format!("spiral angle needs 0 < t <= 1/4, got {t}")));
    }
    h_axis_increment(spec, t, 2.0 * t)
}

/// Limit of the single retained pole term: `7 / (48 t³)`.
pub fn retained_spiral_limit(t: f64) -> f64 {
    7.0 / (48.0 * t * t * t)
}

/// Full `N → ∞` limit of [`spiral_angle`]: the retained term plus the limit
/// of the Riemann sum over the remaining poles,
/// `(1/12)(t⁻² − (2t)⁻² − (1+t)⁻² + (1+2t)⁻²)`.
pub fn spiral_limit(t: f64) -> f64 {
    let inv2 = |s: f64| 1.0 / (s * s);
    retained_spiral_limit(t) + (inv2(t) - inv2(2.0 * t) - inv2(1.0 + t) + inv2(1.0 + 2.0 * t)) / 12.0
}

/// Number of sheets `angle / 2π` of the multi-valued graph between heights
/// `t` and `2t`.
pub fn winding_sheets(angle: f64) -> f64 {
    angle / (2.0 * PI)
}

/// Lower bound `7 / (96 π t³)` on the sheet count in the limit.
pub fn winding_sheets_bound(t: f64) -> f64 {
    7.0 / (96.0 * PI * t * t * t)
}

/// Bisection tolerance on `s` for [`epsilon_turn`].
pub const EPSILON_TOL: f64 = 1e-10;

/// Upper bound `48π / N³` on the slab thickness.
pub fn slab_bound(n: u32) -> f64 {
    48.0 * PI / f64::from(n).powi(3)
}

/// The height increment `s = ε_N(t)` over which the axis tangent turns by
/// exactly `4π`, found by bisection (the turn is strictly increasing in `s`).
pub fn epsilon_turn(spec: &DomainSpec, t: f64) -> Result<f64> {
    spec.y_boundary(t)?;
    let target = 4.0 * PI;
    let turn = |s: f64| h_axis_increment(spec, t, t + s).map(|a| a - target);
    if turn(X_MAX - t)? < 0.0 {
        return Err(CoreError::TurnUnreachable { t });
    }
    // slope is at least N³/8 on the lower half, which brackets s well below 1
    let mut lo = 0.0;
    let mut hi = X_MAX - t;
    let guess = target / (dxu_axis(spec, t)?.max(1.0));
    if guess < hi && turn(guess)? >= 0.0 {
        hi = guess;
    }
    while hi - lo > EPSILON_TOL {
        let mid = 0.5 * (lo + hi);
        if turn(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the turn rate is of order N³, so polish the bracket with Newton steps
    let mut s = 0.5 * (lo + hi);
    for _ in 0..3 {
        let next = s - turn(s)? / dxu_axis(spec, t + s)?;
        if !(next > 0.0 && next <= X_MAX - t) {
            break;
        }
        s = next;
    }
    Ok(s)
}

/// Vertical separations between consecutive sheets over the axis direction:
/// successive heights, going down from `top`, at which `u_N(·, 0)` has
/// dropped by another `2π`, stopping at `bottom`.
pub fn sheet_separations(spec: &DomainSpec, top: f64, bottom: f64, max_sheets: usize) -> Result<Vec<f64>> {
    if !(X_MIN..=X_MAX).contains(&top) || !(X_MIN..=top).contains(&bottom) {
        return Err(CoreError::InvalidParameter(format!("bad sheet range [{bottom}, {top}]")));
    }
    let mut out = Vec::new();
    let mut x = top;
    while out.len() < max_sheets {
        // find x' < x with u(x) − u(x') = 2π
        let drop = |xp: f64| h_axis_increment(spec, xp, x).map(|a| a - 2.0 * PI);
        if drop(bottom)? < 0.0 {
            break;
        }
        let (mut lo, mut hi) = (bottom, x);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if drop(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let next = 0.5 * (lo + hi);
        out.push(x - next);
        x = next;
    }
    Ok(out)
}

/// Distance from `p` to the segment `{(0, 0, t) : −1/2 ≤ t ≤ 0}`.
pub fn segment_distance(p: &[f64; 3]) -> f64 {
    let t = p[2].clamp(X_MIN, 0.0);
    let dz = p[2] - t;
    p[0].hypot(p[1]).hypot(dz)
}

/// Membership in the `δ`-neighbourhood `B_δ` of the segment: a cylinder of
/// radius `δ` with hemispherical caps.
pub fn in_b_delta(p: &[f64; 3], delta: f64) -> bool {
    segment_distance(p) < delta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32) -> DomainSpec {
        DomainSpec::new(n).unwrap()
    }

    #[test]
    fn retained_term_values() {
        assert!((retained_spiral_limit(0.2) - 18.229166666666668).abs() < 1e-12);
        assert!((retained_spiral_limit(0.4) - 2.27865).abs() < 1e-5);
        assert!((spiral_limit(0.2) - 19.77631).abs() < 1e-5);
    }

    #[test]
    fn spiral_angle_domain() {
        assert!(spiral_angle(&spec(4), 0.0).is_err());
        assert!(spiral_angle(&spec(4), 0.3).is_err());
        assert!(spiral_angle(&spec(4), 0.25).is_ok());
    }

    #[test]
    fn epsilon_examples() {
        for (n, bound) in [(10, 0.150796), (20, 0.0188496)] {
            let s = spec(n);
            let eps = epsilon_turn(&s, -0.25).unwrap();
            assert!(eps <= bound, "N={n}: {eps}");
            let turn = h_axis_increment(&s, -0.25, -0.25 + eps).unwrap();
            assert!((turn - 4.0 * PI).abs() < 1e-8);
        }
    }

    #[test]
    fn epsilon_unreachable_near_top() {
        assert!(matches!(epsilon_turn(&spec(2), 0.45), Err(CoreError::TurnUnreachable { .. })));
    }

    #[test]
    fn sheets_shrink_towards_the_plane() {
        let seps = sheet_separations(&spec(128), 0.4, 0.2, 64).unwrap();
        assert!(!seps.is_empty());
        for w in seps.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn capsule_membership() {
        assert!(in_b_delta(&[0.1, 0.0, -0.3], 0.2));
        assert!(!in_b_delta(&[0.3, 0.0, -0.3], 0.2));
        assert!(in_b_delta(&[0.0, 0.0, 0.15], 0.2));
        assert!(!in_b_delta(&[0.0, 0.0, 0.25], 0.2));
        assert!(!in_b_delta(&[0.15, 0.0, -0.65], 0.2));
        assert!(in_b_delta(&[0.1, 0.0, -0.6], 0.2));
    }
}
