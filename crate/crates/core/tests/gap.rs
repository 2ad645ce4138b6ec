//! Half-plane gap checks of 3D families against direct slice checks.

use qpi::config::{Config, GapConfig};
use qpi::model;
use qpi::Family3D;
use qpi::linalg::eigvalsh;
use qpi::wienerhopf::{assumption_check_3d, edge_symbol, half_plane_gap, toeplitz_dense, GapStatus};

#[test]
fn surface_scan_matches_direct_slices() {
    let cfg = Config::default();
    let gcfg = GapConfig { theta_samples: 8, ..cfg.gap.clone() };
    // the stopping rule bounds the per-step change, not the error, which is
    // larger on the clustered spectra of tilted slices
    let tol = 10.0 * gcfg.eig_rel_tol;
    let m = model::example_3d();
    let f = m.family().unwrap();
    let report = assumption_check_3d(f, &gcfg, &cfg.factor).unwrap();
    assert!(report.all_invertible);
    for e in &report.entries {
        let theta = e.theta.unwrap();
        let direct = half_plane_gap(&f.slice(theta).unwrap(), e.label, &gcfg, &cfg.factor).unwrap();
        assert_eq!(direct.status, GapStatus::Invertible);
        assert!((direct.min_singular - e.min_singular).abs() < tol * e.min_singular, "surface {}: {} vs {}", e.label, direct.min_singular, e.min_singular);
    }
    // spot checks away from the worst angle
    let Family3D::Suspension { h, .. } = f else { panic!("suspension expected") };
    let base = half_plane_gap(h, 1, &gcfg, &cfg.factor).unwrap().min_singular;
    for theta in [0.3, -1.1, 1.5] {
        let slice = f.slice(theta).unwrap();
        let direct = half_plane_gap(&slice, 1, &gcfg, &cfg.factor).unwrap().min_singular;
        let derived = (theta.cos().powi(2) * base * base + theta.sin().powi(2)).sqrt();
        assert!((direct - derived).abs() < tol * derived, "theta {theta}: {direct} vs {derived}");
    }
}

fn min_abs_eig(m: &qpi::linalg::CMat) -> f64 {
    eigvalsh(m).unwrap().into_iter().map(f64::abs).fold(f64::INFINITY, f64::min)
}

#[test]
fn tilted_sections_follow_the_base_section() {
    let m = model::example_3d();
    let f = m.family().unwrap();
    let Family3D::Suspension { h, .. } = f else { panic!("suspension expected") };
    for label in 1..=4u8 {
        for frozen in [0.0, 0.7, 2.9] {
            let base = min_abs_eig(&toeplitz_dense(&edge_symbol(h, label, frozen).unwrap(), 48));
            for theta in [0.3, -1.1, 1.5] {
                let slice = f.slice(theta).unwrap();
                let direct = min_abs_eig(&toeplitz_dense(&edge_symbol(&slice, label, frozen).unwrap(), 48));
                let derived = (theta.cos().powi(2) * base * base + theta.sin().powi(2)).sqrt();
                assert!((direct - derived).abs() < 1e-10, "edge {label} at {frozen}, theta {theta}: {direct} vs {derived}");
            }
        }
    }
}
