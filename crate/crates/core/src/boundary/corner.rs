//! Chiral zero modes of truncated boxes and their attribution to corners.

use serde::Serialize;

use super::truncation::{truncate, Corner, QuarterTruncation};
use crate::bulk::bulk_gap;
use crate::config::{BulkConfig, CornerConfig};
use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, SymmetryData};
use crate::linalg::{adjoint, eigh, hermitian_band_eigs_near_zero, CMat, C64};
use crate::wienerhopf::GapReport;

/// Options of a single corner count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CornerOptions {
    pub side: usize,
    /// Absolute energy threshold for zero modes.
    pub zero_tol: f64,
    pub loc_radius: f64,
    pub loc_weight: f64,
}

impl CornerOptions {
    pub fn from_config(cfg: &CornerConfig, side: usize, bulk_gap: f64) -> Self {
        CornerOptions {
            side,
            zero_tol: cfg.zero_tol_rel * bulk_gap,
            loc_radius: cfg.loc_radius_frac * side as f64,
            loc_weight: cfg.loc_weight,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CornerCount {
    pub corner: Corner,
    pub side: usize,
    pub index: i64,
    pub plus: usize,
    pub minus: usize,
    /// Eigenvalues of the compressed localization projector that passed.
    pub loc_weights: Vec<f64>,
}

/// Near-zero modes of one box, split by chirality.
#[derive(Debug, Clone)]
pub struct ZeroModes {
    pub side: usize,
    pub block: usize,
    pub energies: Vec<f64>,
    pub plus: CMat,
    pub minus: CMat,
}

/// Applies the on-site operator `u` to every site of a stacked vector space.
pub(crate) fn apply_onsite(u: &CMat, v: &CMat) -> CMat {
    let n = u.nrows();
    CMat::from_fn(v.nrows(), v.ncols(), |r, c| {
        let base = r - r % n;
        let a = r % n;
        (0..n).map(|b| u[(a, b)] * v[(base + b, c)]).sum()
    })
}

/// Splits a `Π`-invariant subspace into its `±1` eigenspaces.
pub(crate) fn chiral_split(vecs: &CMat, chiral: &CMat) -> Result<(CMat, CMat)> {
    if vecs.ncols() == 0 {
        return Ok((vecs.clone(), vecs.clone()));
    }
    let pv = apply_onsite(chiral, vecs);
    let c = adjoint(vecs) * &pv;
    let c = CMat::from_fn(c.nrows(), c.ncols(), |i, j| 0.5 * (c[(i, j)] + c[(j, i)].conj()));
    let (vals, y) = eigh(&c)?;
    if let Some(bad) = vals.iter().find(|v| (v.abs() - 1.0).abs() > 1e-3) {
        return Err(Error::SymmetryViolation(format!(
            "zero-mode space is not chiral-invariant (eigenvalue {bad:.4} of Π)"
        )));
    }
    let pick = |sign: f64| {
        let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] * sign > 0.0).collect();
        let sel = CMat::from_fn(y.nrows(), cols.len(), |r, c| y[(r, cols[c])]);
        vecs * &sel
    };
    Ok((pick(1.0), pick(-1.0)))
}

/// Eigenvalues and eigenvectors `Y` of `V^* P V`, with `P` the projector onto
/// sites within `radius` of `site`.
pub(crate) fn localize(
    vecs: &CMat,
    side: usize,
    block: usize,
    site: (usize, usize),
    radius: f64,
) -> Result<(Vec<f64>, CMat)> {
    let k = vecs.ncols();
    if k == 0 {
        return Ok((Vec::new(), vecs.clone()));
    }
    let mut m = CMat::from_fn(k, k, |_, _| C64::new(0.0, 0.0));
    for y in 0..side {
        for x in 0..side {
            let dx = x as f64 - site.0 as f64;
            let dy = y as f64 - site.1 as f64;
            if dx.hypot(dy) > radius {
                continue;
            }
            let base = (y * side + x) * block;
            for a in 0..block {
                let r = base + a;
                for i in 0..k {
                    let vi = vecs[(r, i)].conj();
                    for j in 0..k {
                        m[(i, j)] += vi * vecs[(r, j)];
                    }
                }
            }
        }
    }
    eigh(&m)
}

/// Energy shift for the shift-invert solve: inside the gap of the box but
/// well away from the zero cluster.
fn zero_shift(zero_tol: f64) -> f64 {
    100.0 * zero_tol
}

pub fn zero_modes(t: &QuarterTruncation, chiral: &CMat, zero_tol: f64) -> Result<ZeroModes> {
    let (energies, vecs) = hermitian_band_eigs_near_zero(&t.matrix, zero_tol, zero_shift(zero_tol))?;
    let (plus, minus) = chiral_split(&vecs, chiral)?;
    Ok(ZeroModes { side: t.side, block: t.block, energies, plus, minus })
}

impl ZeroModes {
    /// Signed count of the modes attributed to the box site `site`.
    pub fn count_at(&self, corner: Corner, site: (usize, usize), opts: &CornerOptions) -> Result<CornerCount> {
        let mut weights = Vec::new();
        let mut count = |v: &CMat| -> Result<usize> {
            let (w, _) = localize(v, self.side, self.block, site, opts.loc_radius)?;
            let kept: Vec<f64> = w.into_iter().filter(|&x| x >= opts.loc_weight).collect();
            let c = kept.len();
            weights.extend(kept);
            Ok(c)
        };
        let plus = count(&self.plus)?;
        let minus = count(&self.minus)?;
        Ok(CornerCount { corner, side: self.side, index: plus as i64 - minus as i64, plus, minus, loc_weights: weights })
    }
}

/// The chiral operator of `s`, required for corner counting.
fn chiral(s: &SymmetryData) -> Result<&CMat> {
    s.chiral.as_ref().ok_or(Error::MissingChiral)
}

/// `ind_j` from the box compressed at corner `j` itself, at one side length.
pub fn corner_index_at(h: &LaurentMatrix, s: &SymmetryData, corner: Corner, opts: &CornerOptions) -> Result<CornerCount> {
    let t = truncate(h, corner, opts.side)?;
    zero_modes(&t, chiral(s)?, opts.zero_tol)?.count_at(corner, (0, 0), opts)
}

/// All four corners from a single `a`-box: its corner `(L-1, 0)` is the
/// `b`-corner, and so on.
pub fn corner_indices_at(h: &LaurentMatrix, s: &SymmetryData, opts: &CornerOptions) -> Result<(ZeroModes, [CornerCount; 4])> {
    let t = truncate(h, Corner::A, opts.side)?;
    let zm = zero_modes(&t, chiral(s)?, opts.zero_tol)?;
    let counts = Corner::ALL.map(|c| zm.count_at(c, c.site_in_box(opts.side), opts));
    let [a, b, c, d] = counts;
    Ok((zm, [a?, b?, c?, d?]))
}

#[derive(Debug, Clone, Serialize)]
pub struct CornerReport {
    pub values: [i64; 4],
    pub sides: [usize; 2],
    pub bulk_gap: f64,
    pub zero_tol: f64,
    pub loc_radius_frac: f64,
    /// Zero-mode energies of the box at the first side length.
    pub zero_energies: Vec<f64>,
    pub counts: Vec<CornerCount>,
}

/// Corner indices at `L` and `L + step`; the two must agree.
pub fn corner_indices(
    h: &LaurentMatrix,
    s: &SymmetryData,
    gap: &GapReport,
    cfg: &CornerConfig,
    bcfg: &BulkConfig,
) -> Result<CornerReport> {
    gap.require()?;
    let bg = bulk_gap(h, bcfg.torus_grid)?;
    let sides = [cfg.side, cfg.side + cfg.side_step];
    let mut all = Vec::new();
    let mut energies = Vec::new();
    let mut values = Vec::new();
    for (i, &side) in sides.iter().enumerate() {
        let opts = CornerOptions::from_config(cfg, side, bg);
        let (zm, counts) = corner_indices_at(h, s, &opts)?;
        if i == 0 {
            energies = zm.energies.clone();
        }
        values.push(counts.clone().map(|c| c.index));
        all.extend(counts);
    }
    if values[0] != values[1] {
        return Err(Error::UnstableCount(format!(
            "{:?} at L = {} but {:?} at L = {}",
            values[0], sides[0], values[1], sides[1]
        )));
    }
    Ok(CornerReport {
        values: values[0],
        sides,
        bulk_gap: bg,
        zero_tol: cfg.zero_tol_rel * bg,
        loc_radius_frac: cfg.loc_radius_frac,
        zero_energies: energies,
        counts: all,
    })
}

/// `ind_j` for one corner, with the same stability requirement.
pub fn corner_index(
    h: &LaurentMatrix,
    s: &SymmetryData,
    gap: &GapReport,
    corner: Corner,
    cfg: &CornerConfig,
    bcfg: &BulkConfig,
) -> Result<i64> {
    gap.require()?;
    let bg = bulk_gap(h, bcfg.torus_grid)?;
    let mut out = Vec::new();
    for side in [cfg.side, cfg.side + cfg.side_step] {
        out.push(corner_index_at(h, s, corner, &CornerOptions::from_config(cfg, side, bg))?.index);
    }
    if out[0] != out[1] {
        return Err(Error::UnstableCount(format!("corner {corner}: {} then {}", out[0], out[1])));
    }
    Ok(out[0])
}
