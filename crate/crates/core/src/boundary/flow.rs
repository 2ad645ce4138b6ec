//! Spectral flow of corner-localized branches of a truncated 3D family.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::corner::localize;
use super::truncation::{truncate, Corner};
use crate::config::FlowConfig;
use crate::error::{Error, Result};
use crate::laurent::{Family3D, LaurentMatrix};
use crate::linalg::{eigh, hermitian_band_eigs_near_zero, CMat, C64};
use crate::wienerhopf::GapReport;

/// A corner-localized state at one angle: Ritz energy and vector.
#[derive(Debug, Clone)]
struct BranchState {
    energy: f64,
    vec: Vec<C64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Crossing {
    /// Midpoint of the two samples the crossing lies between.
    pub theta: f64,
    /// `+1` from negative to positive energy as `θ` increases.
    pub direction: i64,
    pub branch: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub corner: Corner,
    pub flow: i64,
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HingeReport {
    pub values: [i64; 4],
    pub side: usize,
    pub theta_samples: usize,
    pub window: f64,
    /// Whether the angle grid had to be doubled to keep track of branches.
    pub refined: bool,
    pub flows: Vec<FlowReport>,
}

/// Tracked branch energies for plotting: `(θ, branch id, energy)`.
#[derive(Debug, Clone, Serialize)]
pub struct BranchPoint {
    pub theta: f64,
    pub branch: usize,
    pub energy: f64,
}

/// Angles `-π + 2π(k + 1/2)/M`; no sample falls on an inversion-fixed angle.
pub fn theta_grid(samples: usize) -> Vec<f64> {
    (0..samples).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / samples as f64).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    pub side: usize,
    pub theta_samples: usize,
    pub window: f64,
    pub overlap: f64,
    pub loc_radius: f64,
    pub loc_weight: f64,
}

/// In-window localized states at every corner for the slice at `theta`.
fn states_at<F>(slice: &F, theta: f64, constant: bool, opts: &FlowOptions) -> Result<[Vec<BranchState>; 4]>
where
    F: Fn(f64) -> Result<LaurentMatrix>,
{
    let empty = || [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    let h = slice(theta)?;
    if constant {
        // translation-invariant box: no states can localize at a corner
        return Ok(empty());
    }
    let t = truncate(&h, Corner::A, opts.side)?;
    // slightly off zero so an exact crossing cannot make the solve singular
    let shift = 1e-3 * opts.window;
    let (vals, vecs) = hermitian_band_eigs_near_zero(&t.matrix, opts.window, shift)?;
    if vals.is_empty() {
        return Ok(empty());
    }
    let mut out = empty();
    for c in Corner::ALL {
        let (w, y) = localize(&vecs, opts.side, t.block, c.site_in_box(opts.side), opts.loc_radius)?;
        let keep: Vec<usize> = (0..w.len()).filter(|&i| w[i] >= opts.loc_weight).collect();
        if keep.is_empty() {
            continue;
        }
        // H on the localized span, in the eigenbasis coordinates: Y^* diag(vals) Y
        let yk = CMat::from_fn(y.nrows(), keep.len(), |r, k| y[(r, keep[k])]);
        let hsub = CMat::from_fn(keep.len(), keep.len(), |i, j| {
            (0..vals.len()).map(|r| yk[(r, i)].conj() * yk[(r, j)] * vals[r]).sum::<C64>()
        });
        let hsub = CMat::from_fn(keep.len(), keep.len(), |i, j| 0.5 * (hsub[(i, j)] + hsub[(j, i)].conj()));
        let sub = &vecs * &yk;
        let (e, y) = eigh(&hsub)?;
        let ritz = &sub * &y;
        out[c.index()] = (0..e.len())
            .map(|i| BranchState { energy: e[i], vec: (0..ritz.nrows()).map(|r| ritz[(r, i)]).collect() })
            .collect();
    }
    Ok(out)
}

fn overlap(a: &[C64], b: &[C64]) -> f64 {
    crate::linalg::dot(a, b).norm()
}

struct Tracked {
    flow: i64,
    crossings: Vec<Crossing>,
    points: Vec<BranchPoint>,
}

/// Greedy overlap matching between consecutive angles, cyclically.
fn track(thetas: &[f64], states: &[Vec<BranchState>], opts: &FlowOptions) -> Result<Tracked> {
    let m = thetas.len();
    let mut ids: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut next_id = 0;
    let mut flow = 0;
    let mut crossings = Vec::new();
    let mut points = Vec::new();
    for (k, s) in states.iter().enumerate() {
        if k == 0 {
            ids.push((0..s.len()).map(|i| i + next_id).collect());
            next_id += s.len();
        }
        let k1 = (k + 1) % m;
        let (cur, nxt) = (s, &states[k1]);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, a) in cur.iter().enumerate() {
            for (j, b) in nxt.iter().enumerate() {
                let o = overlap(&a.vec, &b.vec);
                if o >= opts.overlap {
                    pairs.push((o, i, j));
                }
            }
        }
        pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut used_a = vec![false; cur.len()];
        let mut used_b = vec![None; nxt.len()];
        for (_, i, j) in pairs {
            if !used_a[i] && used_b[j].is_none() {
                used_a[i] = true;
                used_b[j] = Some(i);
            }
        }
        let lost_theta = 0.5 * (thetas[k] + if k1 == 0 { thetas[0] + 2.0 * PI } else { thetas[k1] });
        // A state near zero energy must continue on both sides.
        let near_zero = |e: f64| e.abs() < 0.5 * opts.window;
        if (0..cur.len()).any(|i| !used_a[i] && near_zero(cur[i].energy))
            || (0..nxt.len()).any(|j| used_b[j].is_none() && near_zero(nxt[j].energy))
        {
            return Err(Error::TrackingLost { theta: lost_theta });
        }
        for (j, src) in used_b.iter().enumerate() {
            let Some(i) = *src else { continue };
            let (e0, e1) = (cur[i].energy, nxt[j].energy);
            let dir = if e0 < 0.0 && e1 >= 0.0 {
                1
            } else if e0 >= 0.0 && e1 < 0.0 {
                -1
            } else {
                0
            };
            if dir != 0 {
                flow += dir;
                crossings.push(Crossing { theta: lost_theta, direction: dir, branch: ids[k][i] });
            }
        }
        if k1 != 0 {
            let mut row = Vec::with_capacity(nxt.len());
            for src in &used_b {
                row.push(match src {
                    Some(i) => ids[k][*i],
                    None => {
                        next_id += 1;
                        next_id - 1
                    }
                });
            }
            ids.push(row);
        }
    }
    for (k, s) in states.iter().enumerate() {
        for (i, st) in s.iter().enumerate() {
            points.push(BranchPoint { theta: thetas[k], branch: ids[k][i], energy: st.energy });
        }
    }
    Ok(Tracked { flow, crossings, points })
}

struct Sweep {
    thetas: Vec<f64>,
    per_corner: [Vec<Vec<BranchState>>; 4],
}

fn sweep<F, C>(slice: &F, is_constant: &C, samples: usize, opts: &FlowOptions) -> Result<Sweep>
where
    F: Fn(f64) -> Result<LaurentMatrix> + Sync,
    C: Fn(f64) -> bool + Sync,
{
    let thetas = theta_grid(samples);
    let states: Vec<[Vec<BranchState>; 4]> = thetas
        .par_iter()
        .map(|&t| states_at(slice, t, is_constant(t), opts))
        .collect::<Result<_>>()?;
    let mut per_corner: [Vec<Vec<BranchState>>; 4] = Default::default();
    for s in states {
        for (c, v) in s.into_iter().enumerate() {
            per_corner[c].push(v);
        }
    }
    Ok(Sweep { thetas, per_corner })
}

/// Flows at all four corners of a family given by its slices.
///
/// Returns the report together with the tracked branches of every corner.
pub fn spectral_flows_of<F, C>(slice: &F, is_constant: &C, opts: &FlowOptions) -> Result<(HingeReport, Vec<Vec<BranchPoint>>)>
where
    F: Fn(f64) -> Result<LaurentMatrix> + Sync,
    C: Fn(f64) -> bool + Sync,
{
    let mut samples = opts.theta_samples;
    let mut refined = false;
    loop {
        let sw = sweep(slice, is_constant, samples, opts)?;
        let tracked: Result<Vec<Tracked>> = sw.per_corner.iter().map(|st| track(&sw.thetas, st, opts)).collect();
        match tracked {
            Ok(tr) => {
                let values = [tr[0].flow, tr[1].flow, tr[2].flow, tr[3].flow];
                let mut flows = Vec::new();
                let mut points = Vec::new();
                for (c, t) in Corner::ALL.into_iter().zip(tr) {
                    flows.push(FlowReport { corner: c, flow: t.flow, crossings: t.crossings });
                    points.push(t.points);
                }
                let report =
                    HingeReport { values, side: opts.side, theta_samples: samples, window: opts.window, refined, flows };
                return Ok((report, points));
            }
            Err(Error::TrackingLost { .. }) if !refined => {
                refined = true;
                samples *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Options from the configuration; the window is a fraction of the smallest
/// certified surface gap.
pub fn flow_options(gap: &GapReport, cfg: &FlowConfig, loc_radius_frac: f64, loc_weight: f64) -> FlowOptions {
    FlowOptions {
        side: cfg.side,
        theta_samples: cfg.theta_samples,
        window: cfg.window_frac * gap.min_singular(),
        overlap: cfg.overlap,
        loc_radius: loc_radius_frac * cfg.side as f64,
        loc_weight,
    }
}

/// `sf_a .. sf_d` of a 3D family whose surfaces are certified gapped.
pub fn spectral_flows(f: &Family3D, gap: &GapReport, opts: &FlowOptions) -> Result<HingeReport> {
    gap.require()?;
    let slice = |t: f64| f.slice(t);
    let constant = |t: f64| f.slice_is_constant(t);
    Ok(spectral_flows_of(&slice, &constant, opts)?.0)
}

/// `sf_j` of one corner.
pub fn spectral_flow(f: &Family3D, gap: &GapReport, corner: Corner, opts: &FlowOptions) -> Result<FlowReport> {
    let r = spectral_flows(f, gap, opts)?;
    Ok(r.flows.into_iter().nth(corner.index()).expect("four corners"))
}
