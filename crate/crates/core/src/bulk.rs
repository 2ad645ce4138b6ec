//! Parity counts at inversion-fixed momenta and the indicators built from them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::BulkConfig;
use crate::error::{Error, Result};
use crate::laurent::{Family3D, LaurentMatrix, SymmetryData};
use crate::linalg::{cis, eigh, eigvalsh, max_abs, CMat, C64};

#[derive(Debug, Clone, Serialize)]
pub struct ParityEntry {
    pub label: String,
    pub coords: Vec<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub occupied_rank: usize,
    /// Smallest |eigenvalue| at this point.
    pub min_abs_energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndicatorReport {
    pub dim: usize,
    pub entries: Vec<ParityEntry>,
    pub mu: u8,
    /// `mu / 2` when `mu` is even; `None` flags inconsistent inversion data.
    pub half_mu: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl IndicatorReport {
    fn from_entries(dim: usize, entries: Vec<ParityEntry>) -> IndicatorReport {
        let total: i64 = entries.iter().map(|e| e.n_minus as i64).sum();
        let mu = (-total).rem_euclid(4) as u8;
        let (half_mu, diagnostic) = if mu % 2 == 0 {
            (Some(mu / 2), None)
        } else {
            (None, Some(format!("mu = {mu} is odd; the inversion data is inconsistent")))
        };
        IndicatorReport { dim, entries, mu, half_mu, diagnostic }
    }

    /// `half_mu`, or the odd-indicator error.
    pub fn require_half(&self) -> Result<u8> {
        self.half_mu.ok_or(Error::OddIndicator(self.mu))
    }
}

/// `(n_+, n_-)` of the occupied (negative-energy) subspace of `hval` under `inversion`.
pub fn parity_counts(hval: &CMat, inversion: &CMat, cfg: &BulkConfig) -> Result<(usize, usize)> {
    parity_counts_labeled(hval, inversion, "point", cfg).map(|(p, m, _)| (p, m))
}

fn parity_counts_labeled(
    hval: &CMat,
    inversion: &CMat,
    label: &str,
    cfg: &BulkConfig,
) -> Result<(usize, usize, f64)> {
    let defect = max_abs(&(hval * inversion - inversion * hval));
    if defect > cfg.commutator_tol {
        return Err(Error::NonCommuting { label: label.into(), defect });
    }
    let (vals, vecs) = eigh(hval)?;
    let min_abs = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_abs < cfg.energy_floor {
        return Err(Error::GaplessAtFixedPoint { label: label.into(), energy: min_abs });
    }
    let occ: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < 0.0).collect();
    let rank = occ.len();
    // Tr(I P) with P the projector onto the occupied columns
    let mut trace = 0.0;
    for &i in &occ {
        let v = vecs.col(i);
        let iv = inversion * v;
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..v.nrows() {
            acc += v[r].conj() * iv[r];
        }
        trace += acc.re;
    }
    let plus = (rank as f64 + trace) / 2.0;
    let rounded = plus.round();
    if (plus - rounded).abs() > cfg.parity_guard || rounded < 0.0 || rounded > rank as f64 {
        return Err(Error::SymmetryViolation(format!(
            "parity trace at {label} is not an integer ({plus:.3e})"
        )));
    }
    let n_plus = rounded as usize;
    Ok((n_plus, rank - n_plus, min_abs))
}

fn sign_label(c: i8) -> &'static str {
    if c > 0 {
        "1"
    } else {
        "-1"
    }
}

/// The four inversion-fixed momenta of the 2-torus, in the order
/// `(1,1), (-1,1), (1,-1), (-1,-1)`.
pub fn fixed_points_2d() -> Vec<[i8; 2]> {
    vec![[1, 1], [-1, 1], [1, -1], [-1, -1]]
}

fn entry_2d(h: &LaurentMatrix, s: &SymmetryData, p: [i8; 2], theta: Option<f64>, cfg: &BulkConfig) -> Result<ParityEntry> {
    let pt = [C64::new(p[0] as f64, 0.0), C64::new(p[1] as f64, 0.0)];
    let label = match theta {
        None => format!("({},{})", sign_label(p[0]), sign_label(p[1])),
        Some(t) if t == 0.0 => format!("({},{},0)", sign_label(p[0]), sign_label(p[1])),
        Some(_) => format!("({},{},pi)", sign_label(p[0]), sign_label(p[1])),
    };
    let hval = h.eval(&pt)?;
    let (n_plus, n_minus, min_abs) = parity_counts_labeled(&hval, &s.inversion, &label, cfg)?;
    Ok(ParityEntry {
        label,
        coords: p.to_vec(),
        theta,
        n_plus,
        n_minus,
        occupied_rank: n_plus + n_minus,
        min_abs_energy: min_abs,
    })
}

/// Smallest |eigenvalue| of `h` over a uniform `grid x grid` torus mesh.
pub fn bulk_gap(h: &LaurentMatrix, grid: usize) -> Result<f64> {
    let mut gap = f64::INFINITY;
    for a in 0..grid {
        for b in 0..grid {
            let z = cis(2.0 * PI * a as f64 / grid as f64);
            let w = cis(2.0 * PI * b as f64 / grid as f64);
            let vals = eigvalsh(&h.eval(&[z, w])?)?;
            gap = gap.min(vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())));
        }
    }
    Ok(gap)
}

fn require_inversion(h: &LaurentMatrix, s: &SymmetryData) -> Result<()> {
    let c = h.check_inversion(s);
    if !c.ok {
        return Err(Error::SymmetryViolation(format!("inversion defect {:.3e}", c.defect)));
    }
    Ok(())
}

/// `mu_2D = -Σ n_-(Γ) mod 4` over the four fixed points.
pub fn mu2d(h: &LaurentMatrix, s: &SymmetryData, cfg: &BulkConfig) -> Result<IndicatorReport> {
    if h.nvars() != 2 {
        return Err(Error::DimensionMismatch("mu2d needs a 2-variable symbol".into()));
    }
    require_inversion(h, s)?;
    let gap = bulk_gap(h, cfg.torus_grid)?;
    if gap < cfg.energy_floor {
        return Err(Error::GapViolation(format!("bulk gap {gap:.3e} on the torus grid")));
    }
    let entries = fixed_points_2d()
        .into_iter()
        .map(|p| entry_2d(h, s, p, None, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndicatorReport::from_entries(2, entries))
}

/// `mu_3D` over the eight fixed points `(±1, ±1, θ ∈ {0, π})`.
pub fn mu3d(f: &Family3D, s: &SymmetryData, cfg: &BulkConfig) -> Result<IndicatorReport> {
    let mut entries = Vec::with_capacity(8);
    for theta in f.fixed_thetas() {
        let slice = f.slice(theta)?;
        for p in fixed_points_2d() {
            entries.push(entry_2d(&slice, s, p, Some(theta), cfg)?);
        }
    }
    Ok(IndicatorReport::from_entries(3, entries))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSample {
    pub r: f64,
    pub report: IndicatorReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub samples: Vec<ScanSample>,
    /// Whether `mu` is the same at every sample.
    pub constant: bool,
    /// Parameters at which `mu` differs from the previous sample.
    pub changes: Vec<f64>,
}

/// Indicator along a path of 2D symbols; a gap closing at a fixed point is
/// reported with the offending parameter.
pub fn homotopy_scan<F>(path: F, grid: &[f64], s: &SymmetryData, cfg: &BulkConfig) -> Result<ScanReport>
where
    F: Fn(f64) -> Result<LaurentMatrix>,
{
    let mut samples = Vec::with_capacity(grid.len());
    for &r in grid {
        let h = path(r)?;
        require_inversion(&h, s)?;
        let entries = fixed_points_2d()
            .into_iter()
            .map(|p| entry_2d(&h, s, p, None, cfg))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::GaplessAtFixedPoint { label, energy } => {
                    Error::GaplessAtFixedPoint { label: format!("{label} at r = {r}"), energy }
                }
                other => other,
            })?;
        samples.push(ScanSample { r, report: IndicatorReport::from_entries(2, entries) });
    }
    let changes: Vec<f64> = samples
        .windows(2)
        .filter(|w| w[0].report.mu != w[1].report.mu)
        .map(|w| w[1].r)
        .collect();
    Ok(ScanReport { constant: changes.is_empty(), samples, changes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::block_swap;

    #[test]
    fn epsilon_occupied_states_are_odd() {
        let eps = block_swap(3);
        assert_eq!(parity_counts(&eps, &eps, &BulkConfig::default()).unwrap(), (0, 3));
    }

    #[test]
    fn gapless_and_noncommuting_are_errors() {
        let cfg = BulkConfig::default();
        let z = crate::linalg::zeros(2, 2);
        assert!(matches!(
            parity_counts(&z, &crate::linalg::identity(2), &cfg),
            Err(Error::GaplessAtFixedPoint { .. })
        ));
        let sz = CMat::from_fn(2, 2, |i, j| if i == j { C64::new(if i == 0 { 1.0 } else { -1.0 }, 0.0) } else { C64::new(0.0, 0.0) });
        assert!(matches!(parity_counts(&sz, &block_swap(1), &cfg), Err(Error::NonCommuting { .. })));
    }
}
