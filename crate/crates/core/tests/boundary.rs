//! Corner counts, hinge flows and the winding integrator on small inputs.

use qpi::boundary::{
    corner_indices_at, eval_conjugate_reading, spectral_flows_of, theta_grid, truncate, winding3, winding_raw, Corner,
    CornerOptions, FlowOptions,
};
use qpi::bulk::bulk_gap;
use qpi::config::{Config, WindingConfig};
use qpi::linalg::{identity, CMat, C64};
use qpi::model::{self, ModelKind};
use qpi::{Family3D, Result};

fn reference_map() -> impl Fn(C64, C64) -> Result<CMat> + Sync {
    let m = model::winding_reference();
    let ModelKind::Reference(g) = m.kind else { unreachable!() };
    move |z, w| eval_conjugate_reading(&g, z, w)
}

fn coarse(grid: usize) -> WindingConfig {
    WindingConfig { grid, guard: 0.1, enabled: true }
}

#[test]
fn constant_map_has_degree_zero() {
    let g = |_: C64, _: C64| Ok(identity(2) * faer::Scale(C64::new(0.3, 1.2)));
    assert_eq!(winding_raw(&g, 16).unwrap(), 0.0);
}

#[test]
fn reference_map_has_degree_one() {
    let g = reference_map();
    let r = winding3(&g, &coarse(48)).unwrap();
    assert_eq!(r.value, 1);
    assert!((r.raw - 1.0).abs() < 0.05, "raw {}", r.raw);
}

#[test]
fn degrees_add_under_products() {
    let g = reference_map();
    let square = |z, w| Ok(g(z, w)? * g(z, w)?);
    let conj = |z: C64, w: C64| g(z.conj(), w);
    let r = |f: &(dyn Fn(C64, C64) -> Result<CMat> + Sync)| winding_raw(&f, 32).unwrap();
    let (one, two, minus) = (r(&g), r(&square), r(&conj));
    assert!((two - 2.0 * one).abs() < 0.1, "{two} vs 2 x {one}");
    assert!((minus + one).abs() < 0.1, "{minus} vs -{one}");
    let mixed = |z, w| Ok(g(z, w)? * conj(z, w)?);
    assert!(r(&mixed).abs() < 0.1);
}

#[test]
fn thread_count_does_not_change_the_sum() {
    let g = reference_map();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| winding_raw(&g, 24).unwrap())
    };
    assert_eq!(run(1).to_bits(), run(3).to_bits());
}

#[test]
fn example_truncation_is_hermitian_and_banded() {
    let h = model::example_2d();
    let t = truncate(h.planar().unwrap(), Corner::A, 24).unwrap();
    assert!(t.hermitian_defect() < 1e-12);
    assert_eq!(t.dim(), 6 * 24 * 24);
    // widest nonzero coupling, in scalar entries and in sites
    let (n, reach) = (6, t.matrix.half_bandwidth());
    let (mut scalar, mut sites) = (0, 0);
    for i in 0..t.dim() {
        for j in i..(i + reach + 1).min(t.dim()) {
            if t.matrix.get(i, j).norm() > 0.0 {
                scalar = scalar.max(j - i);
                sites = sites.max(j / n - i / n);
            }
        }
    }
    assert!(sites <= 24 + 1, "site bandwidth {sites}");
    assert!(scalar <= n * (24 + 1) + n - 1, "scalar bandwidth {scalar}");
}

#[test]
fn trivial_model_has_no_corner_modes() {
    let m = model::trivial_eps();
    let h = m.planar().unwrap();
    let opts = CornerOptions { side: 8, zero_tol: 1e-4, loc_radius: 8.0 / 3.0, loc_weight: 0.6 };
    let (zm, counts) = corner_indices_at(h, &m.symmetry, &opts).unwrap();
    assert!(zm.energies.is_empty());
    assert!(counts.iter().all(|c| c.index == 0));
}

#[test]
fn corner_indices_add_under_direct_sums() {
    let cfg = Config::default();
    let (a, b) = (model::example_2d(), model::random_block_model(2, 4));
    let h = a.planar().unwrap().direct_sum(b.planar().unwrap()).unwrap();
    let s = a.symmetry.direct_sum(&b.symmetry);
    let run = |h, s, gap| {
        let opts = CornerOptions::from_config(&cfg.corner, 16, gap);
        corner_indices_at(h, s, &opts).unwrap().1.map(|c| c.index)
    };
    let gap = bulk_gap(&h, cfg.bulk.torus_grid).unwrap();
    let sum = run(&h, &s, gap);
    let pa = run(a.planar().unwrap(), &a.symmetry, bulk_gap(a.planar().unwrap(), 64).unwrap());
    let pb = run(b.planar().unwrap(), &b.symmetry, bulk_gap(b.planar().unwrap(), 64).unwrap());
    assert_eq!(sum, [0, 1, 2, 3].map(|i| pa[i] + pb[i]));
}

fn flow_opts(side: usize, samples: usize, window: f64) -> FlowOptions {
    FlowOptions { side, theta_samples: samples, window, overlap: 0.7, loc_radius: side as f64 / 3.0, loc_weight: 0.6 }
}

#[test]
fn theta_independent_family_has_no_flow() {
    let m = model::random_block_model(2, 4);
    let h = m.planar().unwrap().clone();
    let slice = |_: f64| Ok(h.clone());
    let (report, _) = spectral_flows_of(&slice, &|_| false, &flow_opts(8, 16, 0.3)).unwrap();
    assert_eq!(report.values, [0; 4]);
}

#[test]
fn theta_grid_avoids_fixed_angles() {
    for m in [8, 64, 128] {
        let g = theta_grid(m);
        assert!(g.iter().all(|t| t.abs() > 1e-9 && (t.abs() - std::f64::consts::PI).abs() > 1e-9));
        assert!((g[0] + g[m - 1]).abs() < 1e-12);
    }
}

#[test]
fn reversed_family_negates_flows() {
    let m = model::example_3d();
    let f = m.family().unwrap();
    let opts = flow_opts(12, 64, 0.08);
    let constant = |t: f64| f.slice_is_constant(t);
    let forward = |t: f64| f.slice(t);
    let backward = |t: f64| f.slice(-t);
    let rev_constant = |t: f64| f.slice_is_constant(-t);
    let (a, _) = spectral_flows_of(&forward, &constant, &opts).unwrap();
    let (b, _) = spectral_flows_of(&backward, &rev_constant, &opts).unwrap();
    assert_eq!(b.values, a.values.map(|v| -v));
    assert_ne!(a.values, [0; 4]);
    assert!(matches!(f, Family3D::Suspension { .. }));
}
