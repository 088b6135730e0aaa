//! Cross-checks against an independent closed form: `h_N` is the principal
//! complex arctan expression throughout `Ω_N`, and `F_N` follows from
//! composite Simpson integration of that closed form.

use lamina_core::domain::{DomainPoint, DomainSpec};
use lamina_core::{immerse, weierstrass};
use num_complex::Complex64;
use proptest::prelude::*;

fn h_closed(n: u32, z: Complex64) -> Complex64 {
    let nf = f64::from(n);
    let a2 = 1.0 / (nf * nf);
    let prim = |w: Complex64| (w * nf).atan() * nf + w / (w * w + a2);
    let tail: Complex64 = (1..=n).map(|k| prim(z + f64::from(k) / nf)).sum();
    (prim(z) + tail / nf) * (nf * nf / 4.0)
}

/// `∂_y F` from the closed form.
fn dyf(n: u32, x: f64, y: f64) -> [f64; 3] {
    let h = h_closed(n, Complex64::new(x, y));
    let (s, c) = h.re.sin_cos();
    let ch = h.im.cosh();
    [ch * s, -ch * c, 0.0]
}

fn simpson(n: u32, x: f64, y: f64, panels: usize) -> [f64; 3] {
    let step = y / panels as f64;
    let mut acc = [0.0; 3];
    for i in 0..=panels {
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let f = dyf(n, x, i as f64 * step);
        for c in 0..3 {
            acc[c] += w * f[c];
        }
    }
    let mut out = acc.map(|a| a * step / 3.0);
    out[2] = x;
    out
}

#[test]
fn fixtures_match_closed_form() {
    let s = DomainSpec::new(2).unwrap();
    let h = weierstrass::h(&s, &DomainPoint::on_axis(0.0), 1e-12).unwrap();
    let c = h_closed(2, Complex64::new(0.0, 0.0));
    assert!((h.u - c.re).abs() < 1e-14 && c.im == 0.0);
    assert!((c.re - 2.792_546_881_191_539).abs() < 1e-14);
}

#[test]
fn positions_match_simpson() {
    for (n, x, eta) in [(2, -0.3, 0.9), (4, 0.2, -0.6), (8, -0.05, 1.0), (16, 0.4, 0.5), (32, -0.45, -0.8)] {
        let s = DomainSpec::new(n).unwrap();
        let p = DomainPoint::from_eta(&s, x, eta).unwrap();
        let f = immerse(&s, &p, 1e-12).unwrap().position;
        let o = simpson(n, x, p.y, 4000);
        let scale = o.iter().fold(1e-3f64, |m, c| m.max(c.abs()));
        for c in 0..3 {
            assert!((f[c] - o[c]).abs() / scale < 1e-9, "N={n} x={x} eta={eta}: {f:?} vs {o:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_matches_closed_form(n in 2u32..=64, x in -0.5f64..=0.5, eta in -1.0f64..=1.0) {
        let s = DomainSpec::new(n).unwrap();
        let p = DomainPoint::from_eta(&s, x, eta).unwrap();
        let h = weierstrass::h(&s, &p, 1e-12).unwrap();
        let c = h_closed(n, p.z());
        let scale = c.re.abs().max(1.0);
        prop_assert!((h.u - c.re).abs() / scale < 1e-10, "u {} vs {}", h.u, c.re);
        prop_assert!((h.v - c.im).abs() / c.im.abs().max(1.0) < 1e-10, "v {} vs {}", h.v, c.im);
    }
}
