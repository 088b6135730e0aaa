//! Tables of per-`N` diagnostics for plotting and regression.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainPoint, DomainSpec};
use crate::error::{CoreError, Result};
use crate::immersion::curvature_from_sample;
use crate::verification::limits::{epsilon_turn, slab_bound, spiral_angle, spiral_limit};
use crate::verification::{blowup_bound, relative_margin, Direction};
use crate::weierstrass::{dxu_axis, h};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `∂_z h_N(t)` on the axis against `N³/8`.
    Blowup,
    /// Slab thickness `ε_N(t)` against `48π/N³`.
    Epsilon,
    /// Spiral angle between `t` and `2t` against its limit.
    Spiral,
    /// Gauss curvature at `(x, eta)`.
    Curvature,
}

impl FromStr for Metric {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blowup" => Ok(Self::Blowup),
            "epsilon" => Ok(Self::Epsilon),
            "spiral" => Ok(Self::Spiral),
            "curvature" => Ok(Self::Curvature),
            _ => Err(CoreError::InvalidParameter(format!("unknown metric {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

/// One row per `N`. `t` is the axis height for blow-up, epsilon and spiral;
/// curvature uses `(t, eta)` as the domain point.
pub fn sweep(metric: Metric, n_list: &[u32], t: f64, eta: f64, tol: f64) -> Result<Table> {
    let cols: &[&str] = match metric {
        Metric::Blowup => &["N", "t", "dzh", "bound", "margin"],
        Metric::Epsilon => &["N", "t", "epsilon", "bound", "margin"],
        Metric::Spiral => &["N", "t", "angle", "limit", "rel_dev"],
        Metric::Curvature => &["N", "x", "y", "K", "A2"],
    };
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let spec = DomainSpec::new(n)?;
        let nf = f64::from(n);
        let row = match metric {
            Metric::Blowup => {
                let d = dxu_axis(&spec, t)?;
                let b = blowup_bound(n);
                vec![nf, t, d, b, relative_margin(Direction::Lower, d, b)]
            }
            Metric::Epsilon => {
                let b = slab_bound(n);
                match epsilon_turn(&spec, t) {
                    Ok(e) => vec![nf, t, e, b, relative_margin(Direction::Upper, e, b)],
                    Err(CoreError::TurnUnreachable { .. }) => vec![nf, t, f64::NAN, b, f64::NAN],
                    Err(e) => return Err(e),
                }
            }
            Metric::Spiral => {
                let a = spiral_angle(&spec, t)?;
                let l = spiral_limit(t);
                vec![nf, t, a, l, (a - l) / l]
            }
            Metric::Curvature => {
                let p = DomainPoint::from_eta(&spec, t, eta)?;
                let (k, logk) = curvature_from_sample(&h(&spec, &p, tol)?);
                let k = if k == 0.0 && logk.is_finite() { -logk.exp() } else { k };
                vec![nf, p.x, p.y, k, -2.0 * k]
            }
        };
        rows.push(row);
    }
    Ok(Table { columns: cols.iter().map(|c| (*c).to_owned()).collect(), rows })
}
