//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use lamina_core::domain::{uniform_grid, DomainPoint, DomainSpec};
use lamina_core::mesh::{build_mesh, read_obj, write_mesh, MeshFormat};
use lamina_core::verification::limits::spiral_limit;
use lamina_core::verification::*;
use lamina_core::weierstrass::{dxu_axis, h_axis};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn summarise(c: &CheckResult) -> String {
    format!("{} measured={:.6e} margin={:?} samples={}", c.name, c.measured, c.margin.map(|m| (m * 1e4).round() / 1e4), c.samples)
}

fn passed(c: Result<CheckResult, lamina_core::CoreError>) -> Outcome {
    let c = c.map_err(|e| e.to_string())?;
    ensure(c.passed, summarise(&c))
}

fn full_ladder() -> Vec<u32> {
    (2..=64).collect()
}

fn powers() -> Vec<u32> {
    vec![2, 4, 8, 16, 32, 64]
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `∂_z h_N(x)` at a rational point of the axis, exactly.
fn dzh_exact(n: i64, x: &BigRational) -> BigRational {
    let a2 = rat(1, n * n);
    let term = |w: BigRational| {
        let q = &w * &w + &a2;
        (&q * &q).recip()
    };
    let mut tail = BigRational::zero();
    for k in 1..=n {
        tail += term(x + rat(k, n));
    }
    (term(x.clone()) + tail / rat(n, 1)) / rat(2, 1)
}

/// `atan(1/m)` by its alternating series, truncated well below `1e-30`.
fn atan_inv(m: i64) -> BigRational {
    let x = rat(1, m);
    let x2 = &x * &x;
    let mut pow = x.clone();
    let mut sum = BigRational::zero();
    let eps = rat(1, 10).pow(35);
    let mut k = 0i64;
    loop {
        let t = &pow / rat(2 * k + 1, 1);
        if t < eps {
            break;
        }
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        pow = &pow * &x2;
        k += 1;
    }
    sum
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite")
}

fn crit_1() -> Outcome {
    let start = Instant::now();
    let c = check_blowup(&powers(), &uniform_grid(-0.5, 0.0, 101)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(c.passed && secs < 1.0, format!("{} in {secs:.3}s", summarise(&c)))
}

fn crit_2() -> Outcome {
    let s = DomainSpec::new(2).map_err(|e| e.to_string())?;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let d0 = dzh_exact(2, &BigRational::zero());
    let dq = dzh_exact(2, &rat(-1, 4));
    // u_2(0, 0) = atan 1 + 1/2 + atan 2 + 2/5, atan 2 = 2 atan 1 - atan(1/2)
    let atan1 = atan_inv(5) * rat(4, 1) - atan_inv(239);
    let u0 = &atan1 + rat(1, 2) + (&atan1 * rat(2, 1) - atan_inv(2)) + rat(2, 5);
    let k0 = -(&d0 * &d0);
    let p0 = DomainPoint::on_axis(0.0);
    let k_ours = lamina_core::immersion::curvature(&s, &p0).map_err(|e| e.to_string())?.0;
    let rows = [
        ("dzh_2(0)", dxu_axis(&s, 0.0).map_err(|e| e.to_string())?, to_f64(&d0), 9.16),
        ("u_2(0,0)", h_axis(&s, 0.0).map_err(|e| e.to_string())?, to_f64(&u0), 2.7925469),
        ("dzh_2(-1/4)", dxu_axis(&s, -0.25).map_err(|e| e.to_string())?, to_f64(&dq), 8.0586980),
        ("K_2(0,0)", k_ours, to_f64(&k0), -83.9056),
    ];
    let mut worst: f64 = 0.0;
    let mut ok = d0 == rat(229, 25) && k0 == rat(-524_410, 6_250);
    for (_, ours, oracle, quoted) in rows {
        worst = worst.max(rel(ours, oracle));
        ok &= rel(ours, oracle) <= 1e-6 && rel(quoted, oracle) <= 1e-6;
    }
    ensure(ok, format!("4 fixtures, worst relative deviation from the exact oracle {worst:.2e}"))
}

fn crit_3() -> Outcome {
    let ns = full_ladder();
    let xs = uniform_grid(-0.5, 0.5, 65);
    let c = check_graphical(&ns, &xs, 257, 1e-10).map_err(|e| e.to_string())?;
    let quoted_ok = c.measured <= 0.16182;
    ensure(c.passed && quoted_ok, format!("{} over N=2..=64; {}", summarise(&c), c.note.clone().unwrap_or_default()))
}

fn crit_4() -> Outcome {
    let ns = full_ladder();
    let xs = uniform_grid(-0.5, 0.5, 65);
    let mut lines = Vec::new();
    let mut ok = true;
    for c in [check_growth_upper(&ns, &xs), check_growth_lower(&ns, &xs), check_outer_half_v(&ns, &xs, 1e-10)] {
        let c = c.map_err(|e| e.to_string())?;
        ok &= c.passed;
        lines.push(summarise(&c));
    }
    ensure(ok, lines.join("; "))
}

fn crit_5() -> Outcome {
    let start = Instant::now();
    let c = check_spiral(&[32, 64, 128, 256], 0.2).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let angles: Vec<f64> = c.per_n.iter().map(|r| r.measured).collect();
    let l = spiral_limit(0.2);
    let ok = c.passed
        && angles.windows(2).all(|w| w[1] > w[0])
        && (l - 19.77631).abs() < 5e-6
        && (angles[3] - l).abs() / l <= 0.02
        && angles[3] > 18.22917
        && secs < 5.0;
    ensure(ok, format!("angles {angles:.5?}, L(0.2) = {l:.5}, in {secs:.3}s"))
}

fn crit_6() -> Outcome {
    passed(check_slab(&[8, 16, 32], -0.25))
}

fn crit_7() -> Outcome {
    let example = flattening_bound(4, 1.0 / 256.0);
    let c = check_flattening(&[4, 8, 16], &[-0.4, -0.25, -0.1], &[-0.5, 0.5], 1e-10).map_err(|e| e.to_string())?;
    ensure(c.passed && (example - 0.012577).abs() < 5e-7, format!("{}; bound at N=4, y=1/256 is {example:.6}", summarise(&c)))
}

fn crit_8() -> Outcome {
    let c = check_structural(&powers(), 1000, DEFAULT_SEED, 1e-10).map_err(|e| e.to_string())?;
    ensure(c.passed && c.samples == 1000 && c.measured <= 1e-9, summarise(&c))
}

fn crit_9() -> Outcome {
    let c = check_boundary(&full_ladder(), &uniform_grid(-0.5, 0.5, 129), 1e-10).map_err(|e| e.to_string())?;
    let r0 = c.params["r0_hat"].as_f64().unwrap_or(f64::NAN);
    ensure(c.passed && r0 > 0.0, format!("{} r0_hat={r0:.4e}", summarise(&c)))
}

fn crit_10() -> Outcome {
    let ns = [2, 4, 8, 16, 32, 64, 128, 256, 512];
    let c = check_offsegment_bound(&ns, 0.3).map_err(|e| e.to_string())?;
    ensure(c.passed && c.bound.is_some_and(|b| (b - 140.4663).abs() < 1e-4), summarise(&c))
}

fn crit_11() -> Outcome {
    passed(check_poles(512))
}

fn crit_12() -> Outcome {
    let s = DomainSpec::new(8).map_err(|e| e.to_string())?;
    let m = build_mesh(&s, 200, 65, 1e-10).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("m8.obj");
    write_mesh(&m, &path, MeshFormat::Obj).map_err(|e| e.to_string())?;
    let back = read_obj(&path).map_err(|e| e.to_string())?;
    let chi = m.euler_characteristic();
    let lossless = back.vertices == m.vertices && back.normals == m.normals && back.faces == m.faces;
    let height = m.vertices.iter().zip(&m.params).map(|(p, q)| (p[2] - q[0]).abs()).fold(0.0, f64::max);
    ensure(
        chi == 1 && lossless && height <= 1e-9 && m.vertex_count() == 200 * 65,
        format!("V={} F={} chi={chi} obj_lossless={lossless} max|x3-x|={height:.1e}", m.vertex_count(), m.face_count()),
    )
}

fn crit_13() -> Outcome {
    let r = run_report(&VerifyConfig::default()).map_err(|e| e.to_string())?;
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    ensure(
        r.all_passed() && r.elapsed_seconds < 60.0,
        format!("{}/{} checks passed in {:.2}s, failed {failed:?}", r.summary.passed, r.summary.total, r.elapsed_seconds),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("axis blow-up", crit_1),
        ("oracle fixtures", crit_2),
        ("slice graphs", crit_3),
        ("transverse growth", crit_4),
        ("spiral rate", crit_5),
        ("slab thickness", crit_6),
        ("flattening", crit_7),
        ("structural identities", crit_8),
        ("boundary separation", crit_9),
        ("off-segment bound", crit_10),
        ("pole exclusion", crit_11),
        ("mesh sanity", crit_12),
        ("full verify run", crit_13),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2} {name:<22} ({:.2}s) {detail}", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
