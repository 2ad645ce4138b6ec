//! Degree of a matrix-valued map on the glued 3-sphere
//! `S^3_{++} = (D+ x T) ∪ (T x D+)`, by quadrature of `Tr((g^-1 dg)^3)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::truncation::Corner;
use crate::config::{FactorConfig, WindingConfig};
use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, SymmetryData};
use crate::linalg::{adjoint, cis, eigh, inverse, CMat, C64};
use crate::wienerhopf::{ExtendedSymbol, GapReport};

/// Orientation of the quadrature, fixed so that the reference map
/// `[[z, -w̄], [w, z̄]]` has degree `+1`.
pub const ORIENTATION: f64 = 1.0;

/// Relation `ind_j = CORNER_SIGN * winding_j` between truncation counts and
/// degrees of the off-diagonal block over the corner's sphere.
pub const CORNER_SIGN: i64 = -1;

const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Serialize)]
pub struct WindingResult {
    pub raw: f64,
    pub value: i64,
    /// Cells along the circle coordinate of each patch.
    pub grid: usize,
    pub refined: bool,
}

fn tr3(a: &CMat, b: &CMat, c: &CMat) -> C64 {
    let m = a * b;
    let n = m.nrows();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            t += m[(i, k)] * c[(k, i)];
        }
    }
    t
}

/// `∫ Tr((g^-1 dg)^3) / 24π²` over one solid-torus patch with coordinates
/// `(u0, u1, β)`, `point` mapping them to `(z, w)`.
fn patch_integral<G, P>(g: &G, point: &P, n_disk: usize, n_circle: usize) -> Result<f64>
where
    G: Fn(C64, C64) -> Result<CMat> + Sync,
    P: Fn(f64, f64, f64) -> (C64, C64) + Sync,
{
    // patch coordinates: radial in [0, 1], two angles in [0, 2π)
    let nr = n_disk;
    let na = n_disk;
    let nb = n_circle;
    let (hr, ha, hb) = (1.0 / nr as f64, 2.0 * PI / na as f64, 2.0 * PI / nb as f64);
    let per_b: Vec<f64> = (0..nb)
        .into_par_iter()
        .map(|ib| -> Result<f64> {
            let b = (ib as f64 + 0.5) * hb;
            let mut acc = 0.0;
            for ir in 0..nr {
                let r = (ir as f64 + 0.5) * hr;
                for ia in 0..na {
                    let a = (ia as f64 + 0.5) * ha;
                    let at = |r: f64, a: f64, b: f64| {
                        let (z, w) = point(r, a, b);
                        g(z, w)
                    };
                    let g0 = at(r, a, b)?;
                    let gi = inverse(&g0).ok_or_else(|| Error::Linalg(format!("map singular at r={r:.3}, a={a:.3}, b={b:.3}")))?;
                    let s = 0.5 / FD_STEP;
                    let d0 = (at(r + FD_STEP, a, b)? - at(r - FD_STEP, a, b)?) * faer::Scale(C64::new(s, 0.0));
                    let d1 = (at(r, a + FD_STEP, b)? - at(r, a - FD_STEP, b)?) * faer::Scale(C64::new(s, 0.0));
                    let d2 = (at(r, a, b + FD_STEP)? - at(r, a, b - FD_STEP)?) * faer::Scale(C64::new(s, 0.0));
                    let (a0, a1, a2) = (&gi * d0, &gi * d1, &gi * d2);
                    let dens = tr3(&a0, &a1, &a2) - tr3(&a0, &a2, &a1);
                    acc += dens.re;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    // sequential sum keeps the result independent of scheduling
    let total: f64 = per_b.iter().sum();
    Ok(total * hr * ha * hb * 3.0 / (24.0 * PI * PI))
}

/// Raw degree at one resolution. `grid` cells along each circle coordinate;
/// each disk uses `grid / 2` radial and angular cells.
pub fn winding_raw<G>(g: &G, grid: usize) -> Result<f64>
where
    G: Fn(C64, C64) -> Result<CMat> + Sync,
{
    let nd = (grid / 2).max(2);
    // D+ x T with orientation (ρ, α, β); T x D+ with (α, ρ, β). The two
    // induce opposite orientations on the common torus.
    let p1 = patch_integral(g, &|r, a, b| (cis(a) * r, cis(b)), nd, grid)?;
    let p2 = patch_integral(g, &|r, a, b| (cis(a), cis(b) * r), nd, grid)?;
    // the second patch's coordinates (ρ, α, β) are an odd permutation of (α, ρ, β)
    Ok(ORIENTATION * (p1 - p2))
}

/// Degree with the integer guard; one refinement ×2 if the guard fails.
pub fn winding3<G>(g: &G, cfg: &WindingConfig) -> Result<WindingResult>
where
    G: Fn(C64, C64) -> Result<CMat> + Sync,
{
    let mut grid = cfg.grid;
    let mut refined = false;
    loop {
        let raw = winding_raw(g, grid)?;
        let value = raw.round();
        if (raw - value).abs() < cfg.guard {
            return Ok(WindingResult { raw, value: value as i64, grid, refined });
        }
        if refined {
            return Err(Error::QuadratureUnresolved { raw });
        }
        refined = true;
        grid *= 2;
    }
}

/// Evaluates a Laurent matrix with negative powers read as conjugates, which
/// agrees with the symbol on the torus and extends it polynomially in `z, z̄`.
pub fn eval_conjugate_reading(m: &LaurentMatrix, z: C64, w: C64) -> Result<CMat> {
    if m.nvars() != 2 {
        return Err(Error::DimensionMismatch("conjugate reading needs 2 variables".into()));
    }
    let pw = |x: C64, k: i32| if k >= 0 { x.powi(k) } else { x.conj().powi(-k) };
    let n = m.size();
    let mut out = CMat::from_fn(n, n, |_, _| C64::new(0.0, 0.0));
    for (k, a) in m.terms() {
        let c = pw(z, k[0]) * pw(w, k[1]);
        out += a * faer::Scale(c);
    }
    Ok(out)
}

/// Unitary whose first columns span the `+1` eigenspace of `Π`, and the
/// dimension of that eigenspace.
pub fn chiral_basis(chiral: &CMat) -> Result<(CMat, usize)> {
    let (vals, vecs) = eigh(chiral)?;
    let n = vals.len();
    let plus: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.0).collect();
    let minus: Vec<usize> = (0..n).filter(|&i| vals[i] <= 0.0).collect();
    let order: Vec<usize> = plus.iter().chain(minus.iter()).copied().collect();
    Ok((CMat::from_fn(n, n, |r, c| vecs[(r, order[c])]), plus.len()))
}

/// The block of `U^* H U` mapping the `-1` eigenspace of `Π` to the `+1` one.
pub fn off_diagonal_block(h: &CMat, basis: &(CMat, usize)) -> CMat {
    let (u, np) = basis;
    let m = adjoint(u) * h * u;
    let n = m.nrows();
    CMat::from_fn(*np, n - np, |i, j| m[(i, np + j)])
}

#[derive(Debug, Clone, Serialize)]
pub struct CornerWinding {
    pub corner: Corner,
    pub raw: f64,
    pub winding: i64,
    /// `CORNER_SIGN * winding`, comparable with the truncation count.
    pub predicted_index: i64,
    pub grid: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindingReport {
    pub values: [i64; 4],
    pub corners: Vec<CornerWinding>,
}

/// Degrees of the off-diagonal block of the extended symbol, one per corner.
///
/// Corner `j` is evaluated on `S^3_{++}` of the symbol reflected as in its
/// truncation, so all four use the same orientation.
pub fn corner_windings(
    h: &LaurentMatrix,
    s: &SymmetryData,
    gap: &GapReport,
    fcfg: &FactorConfig,
    wcfg: &WindingConfig,
) -> Result<WindingReport> {
    gap.require()?;
    let basis = chiral_basis(s.chiral.as_ref().ok_or(Error::MissingChiral)?)?;
    let mut corners = Vec::new();
    for c in Corner::ALL {
        let ext = ExtendedSymbol::new(c.transform(h)?, fcfg.clone())?;
        let g = |z: C64, w: C64| ext.eval(z, w).map(|m| off_diagonal_block(&m, &basis));
        let r = winding3(&g, wcfg)?;
        corners.push(CornerWinding {
            corner: c,
            raw: r.raw,
            winding: r.value,
            predicted_index: CORNER_SIGN * r.value,
            grid: r.grid,
        });
    }
    let values = [0, 1, 2, 3].map(|i| corners[i].predicted_index);
    Ok(WindingReport { values, corners })
}
