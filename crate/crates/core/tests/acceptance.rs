//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime
//! against a fixed budget. Criteria run sequentially so the timings are not
//! skewed by each other.

mod common;

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{max_abs_diff, printed_extension_x, printed_extension_y};
use qpi::boundary::{
    corner_indices, corner_windings, eval_conjugate_reading, theorem_check, winding3, winding_raw, CORNER_SIGN,
};
use qpi::bulk::{homotopy_scan, mu2d, mu3d};
use qpi::config::Config;
use qpi::ktheory::Ledger;
use qpi::linalg::{adjoint, cis, eigvalsh, identity, max_abs, C64};
use qpi::model::{self, ModelKind};
use qpi::wienerhopf::{assumption_check_2d, assumption_check_3d, factorize_right, ExtendedSymbol};
use qpi::Error;

// tolerances and budgets
const FACTOR_RESIDUAL: f64 = 1e-8;
const PRINTED_FACTOR_AGREEMENT: f64 = 1e-6;
const REFERENCE_DEGREE_TOL: f64 = 0.05;
const EXTENSION_SYMMETRY_TOL: f64 = 1e-6;
const PRINTED_EIGENVALUE_TOL: f64 = 1e-12;

const BUDGETS: [u64; 8] = [10, 60, 5, 180, 600, 300, 1, 900];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { pass, detail: detail.into() }
    }
}

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

/// Runs `qpi verify` and returns its exit code and parsed report.
fn cli_verify(args: &[&str]) -> (Option<i32>, serde_json::Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_qpi"))
        .arg("--quiet")
        .arg("verify")
        .args(args)
        .env_remove("QPI_CONFIG")
        .output()
        .expect("run qpi");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code(), v)
}

fn values_of(v: &serde_json::Value) -> Option<[i64; 4]> {
    let a = v["boundary"]["values"].as_array()?;
    let x: Vec<i64> = a.iter().filter_map(|e| e.as_i64()).collect();
    x.try_into().ok()
}

fn identities_hold(x: [i64; 4]) -> bool {
    (x[0] + x[1]).rem_euclid(2) == 1 && x[0] == -x[2] && x[1] == -x[3] && x.iter().sum::<i64>() == 0
}

fn criterion_1() -> Outcome {
    let cfg = Config::default().factor;
    let h = model::example_h();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut residual, mut dx, mut dy) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..12 {
        let w = cis(-3.0 + 0.5 * k as f64 + 0.01);
        let cf = match factorize_right(&h.fix_variable(1, w).unwrap(), &cfg) {
            Ok(cf) => cf,
            Err(e) => return Outcome::new(false, format!("x-factorization failed at w = {w}: {e}")),
        };
        residual = residual.max(cf.residual);
        // y-direction at the same angle for z
        let z0 = w;
        let cy = match factorize_right(&h.fix_variable(0, z0).unwrap(), &cfg) {
            Ok(cf) => cf,
            Err(e) => return Outcome::new(false, format!("y-factorization failed at z = {z0}: {e}")),
        };
        residual = residual.max(cy.residual);
        for _ in 0..100 {
            let r = rng.random_range(0.0..0.98f64).sqrt();
            let u = cis(rng.random_range(-3.2..3.2)) * r;
            dx = dx.max(max_abs_diff(&cf.extend(u).unwrap(), &printed_extension_x(u, w)));
            dy = dy.max(max_abs_diff(&cy.extend(u).unwrap(), &printed_extension_y(z0, u)));
        }
    }
    let pass = residual < FACTOR_RESIDUAL && dx < PRINTED_FACTOR_AGREEMENT && dy < PRINTED_FACTOR_AGREEMENT;
    Outcome::new(pass, format!("max residual {residual:.1e}, printed-factor deviation x {dx:.1e} y {dy:.1e}"))
}

fn criterion_2() -> Outcome {
    let cfg = Config::default();
    let m2 = model::example_2d();
    let g2 = assumption_check_2d(m2.planar().unwrap(), &cfg.gap, &cfg.factor);
    let m3 = model::example_3d();
    let g3 = assumption_check_3d(m3.family().unwrap(), &cfg.gap, &cfg.factor);
    match (g2, g3) {
        (Ok(a), Ok(b)) => {
            let pass = a.all_invertible && b.all_invertible && a.entries.len() == 4 && b.entries.len() == 4
                && b.theta_samples == Some(64);
            Outcome::new(
                pass,
                format!(
                    "edges {:?} min sv {:.3}; surfaces {:?} min sv {:.3}",
                    a.status,
                    a.min_singular(),
                    b.status,
                    b.min_singular()
                ),
            )
        }
        (a, b) => Outcome::new(false, format!("{:?} / {:?}", a.err(), b.err())),
    }
}

fn criterion_3() -> Outcome {
    let cfg = Config::default();
    let path = model::example_2d_path();
    let s = &path.symmetry;
    let h1 = path.path_at(1.0).unwrap().unwrap();
    let rep = mu2d(&h1, s, &cfg.bulk).unwrap();
    let by_coords = |c: [i8; 2]| rep.entries.iter().find(|e| e.coords == c).expect("fixed point");
    let order = [[1, 1], [-1, 1], [1, -1], [-1, -1]];
    let minus = order.map(|c| by_coords(c).n_minus);
    let ranks_ok = rep.entries.iter().all(|e| e.occupied_rank == 3);
    // negative spectrum of H_1 at (1, 1) and (1, -1), as printed
    let occupied = |z: f64, w: f64| {
        let v = eigvalsh(&h1.eval(&[C64::new(z, 0.0), C64::new(w, 0.0)]).unwrap()).unwrap();
        v.into_iter().filter(|x| *x < 0.0).collect::<Vec<_>>()
    };
    let r2 = 2f64.sqrt();
    let close = |a: Vec<f64>, mut b: Vec<f64>| {
        b.sort_by(f64::total_cmp);
        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() < PRINTED_EIGENVALUE_TOL)
    };
    let spectra_ok = close(occupied(1.0, 1.0), vec![-2.0 - r2, -2.0 + r2, -2.0]) && close(occupied(1.0, -1.0), vec![-2.0, -r2, -r2]);
    let base = mu2d(path.planar().unwrap(), s, &cfg.bulk).unwrap();
    let grid: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
    let scan = homotopy_scan(|r| path.path_at(r).unwrap(), &grid, s, &cfg.bulk).unwrap();
    let m3 = model::example_3d();
    let r3 = mu3d(m3.family().unwrap(), &m3.symmetry, &cfg.bulk).unwrap();
    let pass = minus == [3, 1, 1, 1]
        && ranks_ok
        && spectra_ok
        && base.mu == 2
        && base.half_mu == Some(1)
        && scan.constant
        && r3.half_mu == Some(1);
    Outcome::new(
        pass,
        format!(
            "n_- {minus:?}, ranks 3: {ranks_ok}, printed spectra: {spectra_ok}, mu2d {} half {:?}, scan constant {}, half mu3d {:?}",
            base.mu, base.half_mu, scan.constant, r3.half_mu
        ),
    )
}

fn criterion_4() -> Outcome {
    let path = models().join("example-2d.json");
    let (code, v) = cli_verify(&["--model", &path.to_string_lossy(), "--L", "24"]);
    let Some(x) = values_of(&v) else {
        return Outcome::new(false, format!("no report (exit {code:?})"));
    };
    let counts = v["boundary"]["diagnostics"]["counts"].as_array().cloned().unwrap_or_default();
    let at = |side: u64| -> Vec<i64> {
        counts.iter().filter(|c| c["side"] == side).filter_map(|c| c["index"].as_i64()).collect()
    };
    let stable = at(24) == x.to_vec() && at(32) == x.to_vec();
    let pass = code == Some(0) && identities_hold(x) && stable && v["pass"] == true;
    Outcome::new(pass, format!("ind {x:?} at L = 24 and 32: {stable}, exit {code:?}"))
}

fn criterion_5() -> Outcome {
    let path = models().join("example-3d.json");
    let (code, v) = cli_verify(&["--model", &path.to_string_lossy(), "--L", "16", "--theta-samples", "128"]);
    let Some(x) = values_of(&v) else {
        return Outcome::new(false, format!("no report (exit {code:?})"));
    };
    let diag = &v["boundary"]["diagnostics"];
    let setup = diag["side"] == 16 && diag["theta_samples"].as_u64().is_some_and(|t| t >= 128);
    let pass = code == Some(0) && identities_hold(x) && setup && v["pass"] == true;
    Outcome::new(pass, format!("sf {x:?}, L 16, samples {}, exit {code:?}", diag["theta_samples"]))
}

fn criterion_6() -> Outcome {
    let cfg = Config::default();
    let constant = |_: C64, _: C64| Ok(identity(2) * faer::Scale(C64::new(0.7, -0.4)));
    let zero = winding_raw(&constant, cfg.winding.grid).unwrap();
    let reference = model::winding_reference();
    let ModelKind::Reference(g) = &reference.kind else { unreachable!() };
    let rmap = |z, w| eval_conjugate_reading(g, z, w);
    let r = winding3(&rmap, &cfg.winding).unwrap();
    let m = model::example_2d();
    let h = m.planar().unwrap();
    let gap = assumption_check_2d(h, &cfg.gap, &cfg.factor).unwrap();
    let ind = corner_indices(h, &m.symmetry, &gap, &cfg.corner, &cfg.bulk).unwrap().values;
    let wr = match corner_windings(h, &m.symmetry, &gap, &cfg.factor, &cfg.winding) {
        Ok(w) => w,
        Err(e) => return Outcome::new(false, format!("corner windings: {e}")),
    };
    let degrees: Vec<i64> = wr.corners.iter().map(|c| c.winding).collect();
    let raws: Vec<String> = wr.corners.iter().map(|c| format!("{:.4}", c.raw)).collect();
    let magnitudes = (0..4).all(|j| degrees[j].abs() == ind[j].abs());
    let one_sign = (0..4).all(|j| CORNER_SIGN * degrees[j] == ind[j]);
    let pass = zero == 0.0 && (r.raw.abs() - 1.0).abs() < REFERENCE_DEGREE_TOL && magnitudes && one_sign;
    Outcome::new(
        pass,
        format!(
            "constant {zero}, reference {:.4}, corner degrees {degrees:?} (raw {}) vs ind {ind:?}, sign {CORNER_SIGN}",
            r.raw,
            raws.join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let report = Ledger::standard().verify();
    let names: Vec<String> =
        report.checks.iter().map(|c| format!("{} {}", c.name, if c.pass { "ok" } else { "FAILED" })).collect();
    Outcome::new(report.pass && report.checks.len() == 5, names.join(", "))
}

/// A point of `X` with one coordinate off the circle.
fn point_of_x(rng: &mut ChaCha8Rng) -> (C64, C64) {
    let r: f64 = rng.random_range(0.05..0.95);
    let r = if rng.random_bool(0.5) { r } else { 1.0 / r };
    let disk = cis(rng.random_range(-3.2..3.2)) * r;
    let circle = cis(rng.random_range(-3.2..3.2));
    if rng.random_bool(0.5) {
        (disk, circle)
    } else {
        (circle, disk)
    }
}

fn criterion_8() -> Outcome {
    let cfg = Config::default();
    let mut evaluated = 0;
    let mut failures = Vec::new();
    let mut skips = Vec::new();
    for k in 0..20u64 {
        let (n, seed) = if k < 10 { (2, 100 + k) } else { (3, 100 + k) };
        let m = model::random_block_model(n, seed);
        let label = format!("{}x{} seed {seed}", 2 * n, 2 * n);
        let report = match theorem_check(&m, Some(2), &cfg, false) {
            Ok(r) => r,
            Err(e @ (Error::Undecided(_) | Error::UnstableCount(_) | Error::GapViolation(_))) => {
                skips.push(format!("{label}: {e}"));
                continue;
            }
            Err(e) => {
                failures.push(format!("{label}: {e}"));
                continue;
            }
        };
        evaluated += 1;
        let ext = ExtendedSymbol::new(m.planar().unwrap().clone(), cfg.factor.clone()).unwrap();
        let (inv, chi) = (&m.symmetry.inversion, m.symmetry.chiral.as_ref().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut defect = 0.0f64;
        for _ in 0..50 {
            let (z, w) = point_of_x(&mut rng);
            let (a, mirrored) = match (ext.eval(z, w), ext.eval(z.inv(), w.inv())) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    defect = f64::INFINITY;
                    failures.push(format!("{label}: extension at ({z}, {w}): {e}"));
                    break;
                }
            };
            defect = defect
                .max(max_abs(&(&a - adjoint(&a))))
                .max(max_abs(&(chi * &a * adjoint(chi) + &a)))
                .max(max_abs(&(inv * &a * adjoint(inv) - mirrored)));
        }
        if defect >= EXTENSION_SYMMETRY_TOL {
            failures.push(format!("{label}: extension symmetry defect {defect:.1e}"));
        }
        if !report.pass {
            failures.push(format!("{label}: correspondence failed, values {:?}", report.boundary.values));
        }
    }
    let mut detail = format!("{evaluated} evaluated, {} skipped, {} failed", skips.len(), failures.len());
    for s in &skips {
        detail.push_str(&format!("; skip {s}"));
    }
    for f in &failures {
        detail.push_str(&format!("; FAIL {f}"));
    }
    Outcome::new(failures.is_empty() && evaluated > 0, detail)
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("factorization golden test", criterion_1),
        ("gap certification", criterion_2),
        ("indicators", criterion_3),
        ("bulk-corner correspondence", criterion_4),
        ("bulk-hinge correspondence", criterion_5),
        ("winding oracle", criterion_6),
        ("K-ledger", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let elapsed = t.elapsed();
        let budget = Duration::from_secs(BUDGETS[i]);
        let pass = out.pass && elapsed < budget;
        let line = format!(
            "{} [{}] {name}: {} ({:.2} s, budget {} s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64(),
            BUDGETS[i]
        );
        // straight to stderr so the line shows without --nocapture
        writeln!(std::io::stderr(), "{line}").unwrap();
        if !pass {
            failed.push(line);
        }
    }
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
