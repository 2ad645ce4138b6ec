use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::factor::{toeplitz_section, winding_det};
use crate::config::{FactorConfig, GapConfig};
use crate::error::{Error, Result};
use crate::laurent::{Family3D, LaurentMatrix};
use crate::linalg::{cis, hermitian_band_min_abs_eig, min_singular};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapStatus {
    Invertible,
    NotInvertible,
    Undecided,
}

impl GapStatus {
    fn combine(self, other: GapStatus) -> GapStatus {
        use GapStatus::*;
        match (self, other) {
            (NotInvertible, _) | (_, NotInvertible) => NotInvertible,
            (Undecided, _) | (_, Undecided) => Undecided,
            _ => Invertible,
        }
    }
}

/// Outcome for one edge (2D) or surface (3D).
#[derive(Debug, Clone, Serialize)]
pub struct GapEntry {
    pub label: u8,
    pub status: GapStatus,
    pub invertible: bool,
    /// Smallest singular value at the largest section over all samples.
    pub min_singular: f64,
    pub section_sizes: Vec<usize>,
    pub frozen_samples: usize,
    /// Angle of the worst slice (3D only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub dim: usize,
    pub entries: Vec<GapEntry>,
    pub status: GapStatus,
    pub all_invertible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_samples: Option<usize>,
}

impl GapReport {
    fn from_entries(dim: usize, entries: Vec<GapEntry>, theta_samples: Option<usize>) -> GapReport {
        let status = entries.iter().fold(GapStatus::Invertible, |s, e| s.combine(e.status));
        GapReport { dim, entries, status, all_invertible: status == GapStatus::Invertible, theta_samples }
    }

    /// Converts a failed or undecided report into the matching error.
    pub fn require(&self) -> Result<()> {
        let bad: Vec<String> = self
            .entries
            .iter()
            .filter(|e| e.status != GapStatus::Invertible)
            .map(|e| format!("edge {} {:?}", e.label, e.status))
            .collect();
        match self.status {
            GapStatus::Invertible => Ok(()),
            GapStatus::Undecided => Err(Error::Undecided(bad.join(", "))),
            GapStatus::NotInvertible => Err(Error::GapViolation(bad.join(", "))),
        }
    }

    /// Smallest certified singular value across entries.
    pub fn min_singular(&self) -> f64 {
        self.entries.iter().map(|e| e.min_singular).fold(f64::INFINITY, f64::min)
    }
}

/// One-variable symbol of edge `label` at frozen transverse momentum `frozen`.
///
/// Edges 1 and 3 run along `z` (half-planes `x >= 0` and `x <= 0`), edges 2
/// and 4 along `w`.
pub fn edge_symbol(h: &LaurentMatrix, label: u8, frozen: f64) -> Result<LaurentMatrix> {
    let f = match label {
        1 | 3 => h.fix_variable(1, cis(frozen))?,
        2 | 4 => h.fix_variable(0, cis(frozen))?,
        _ => return Err(Error::IndexOutOfRange { index: label as usize, nvars: 4 }),
    };
    if label >= 3 {
        f.flip_variable(0)
    } else {
        Ok(f)
    }
}

struct Sample {
    status: GapStatus,
    sigma: f64,
    note: Option<String>,
}

fn sample(f: &LaurentMatrix, gcfg: &GapConfig, fcfg: &FactorConfig) -> Sample {
    match winding_det(f, fcfg) {
        Ok(0) => {}
        Ok(w) => {
            return Sample { status: GapStatus::NotInvertible, sigma: 0.0, note: Some(format!("det winding {w}")) }
        }
        Err(Error::SingularOnCircle(d)) => {
            return Sample {
                status: GapStatus::NotInvertible,
                sigma: 0.0,
                note: Some(format!("bulk symbol singular (|det| = {d:.3e})")),
            }
        }
        Err(e) => return Sample { status: GapStatus::Undecided, sigma: 0.0, note: Some(e.to_string()) },
    }
    if f.is_constant() {
        let a = f.coeff(&[0]).cloned().unwrap_or_else(|| crate::linalg::zeros(f.size(), f.size()));
        let s = min_singular(&a).unwrap_or(0.0);
        let status = if s > gcfg.singular_floor { GapStatus::Invertible } else { GapStatus::NotInvertible };
        return Sample { status, sigma: s, note: None };
    }
    let sigmas: Vec<f64> = gcfg
        .section_sizes
        .iter()
        .map(|&nb| hermitian_band_min_abs_eig(&toeplitz_section(f, nb), gcfg.max_iterations, gcfg.eig_rel_tol))
        .collect();
    let k = sigmas.len();
    let (a, b) = if k >= 2 { (sigmas[k - 2], sigmas[k - 1]) } else { (sigmas[0], sigmas[0]) };
    let floor = gcfg.singular_floor;
    let status = if a > floor && b > floor && (a - b).abs() <= gcfg.stabilization_band * a.max(b) {
        GapStatus::Invertible
    } else if a <= floor && b <= floor {
        GapStatus::NotInvertible
    } else {
        GapStatus::Undecided
    };
    let note = (status == GapStatus::Undecided).then(|| format!("section singular values {sigmas:?}"));
    Sample { status, sigma: b, note }
}

/// Certifies the half-plane operator of edge `label` for a 2-variable symbol.
pub fn half_plane_gap(h: &LaurentMatrix, label: u8, gcfg: &GapConfig, fcfg: &FactorConfig) -> Result<GapEntry> {
    if h.nvars() != 2 {
        return Err(Error::DimensionMismatch("half-plane gap needs a 2-variable symbol".into()));
    }
    let herm = h.check_hermitian_on_torus();
    if !herm.ok {
        return Err(Error::NotHermitian(herm.defect));
    }
    let m = gcfg.frozen_samples;
    let samples: Vec<Result<Sample>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let f = edge_symbol(h, label, 2.0 * PI * k as f64 / m as f64)?;
            Ok(sample(&f, gcfg, fcfg))
        })
        .collect();
    let mut status = GapStatus::Invertible;
    let mut sigma = f64::INFINITY;
    let mut note = None;
    for (k, s) in samples.into_iter().enumerate() {
        let s = s?;
        if s.status != GapStatus::Invertible && note.is_none() {
            let angle = 2.0 * PI * k as f64 / m as f64;
            note = Some(format!("frozen angle {angle:.4}: {}", s.note.as_deref().unwrap_or("below floor")));
        }
        status = status.combine(s.status);
        sigma = sigma.min(s.sigma);
    }
    Ok(GapEntry {
        label,
        status,
        invertible: status == GapStatus::Invertible,
        min_singular: sigma,
        section_sizes: gcfg.section_sizes.clone(),
        frozen_samples: m,
        theta: None,
        diagnostic: note,
    })
}

/// Four edge checks of a 2D model.
pub fn assumption_check_2d(h: &LaurentMatrix, gcfg: &GapConfig, fcfg: &FactorConfig) -> Result<GapReport> {
    let entries = (1..=4).map(|l| half_plane_gap(h, l, gcfg, fcfg)).collect::<Result<Vec<_>>>()?;
    Ok(GapReport::from_entries(2, entries, None))
}

fn worse(a: &GapEntry, b: &GapEntry) -> bool {
    let rank = |s: GapStatus| match s {
        GapStatus::NotInvertible => 2,
        GapStatus::Undecided => 1,
        GapStatus::Invertible => 0,
    };
    (rank(b.status), -b.min_singular) > (rank(a.status), -a.min_singular)
}

/// Four surface checks of a 3D family over an angle grid, refined around the
/// worst angle of each surface.
pub fn assumption_check_3d(f: &Family3D, gcfg: &GapConfig, fcfg: &FactorConfig) -> Result<GapReport> {
    let m = gcfg.theta_samples.max(1);
    let step = 2.0 * PI / m as f64;
    let mut entries = Vec::with_capacity(4);
    for label in 1..=4u8 {
        // A non-constant suspension slice is cos(t) H - sin(t) P with P on-site,
        // unitary and anticommuting with H, so every section squares to
        // cos^2 T(H)^2 + sin^2 and its singular values follow from those of H.
        let base = match f {
            Family3D::Suspension { h, .. } if !h.is_constant() => Some(half_plane_gap(h, label, gcfg, fcfg)?),
            _ => None,
        };
        let run = |theta: f64| -> Result<GapEntry> {
            if let Some(b) = base.as_ref().filter(|b| b.status == GapStatus::Invertible && !f.slice_is_constant(theta)) {
                let (c, s) = (theta.cos(), theta.sin());
                let mut e = b.clone();
                e.min_singular = (c * c * b.min_singular * b.min_singular + s * s).sqrt();
                e.theta = Some(theta);
                return Ok(e);
            }
            let slice = f.slice(theta)?;
            let mut e = half_plane_gap(&slice, label, gcfg, fcfg)?;
            e.theta = Some(theta);
            Ok(e)
        };
        let mut best: Option<GapEntry> = None;
        let mut worst_theta = 0.0;
        let mut status = GapStatus::Invertible;
        for theta in (0..m).map(|k| k as f64 * step) {
            let e = run(theta)?;
            status = status.combine(e.status);
            if best.as_ref().is_none_or(|b| worse(b, &e)) {
                worst_theta = theta;
                best = Some(e);
            }
        }
        for theta in [worst_theta - step / 2.0, worst_theta + step / 2.0] {
            let e = run(theta)?;
            status = status.combine(e.status);
            if best.as_ref().is_none_or(|b| worse(b, &e)) {
                best = Some(e);
            }
        }
        let mut e = best.expect("at least one angle");
        e.status = status;
        e.invertible = status == GapStatus::Invertible;
        entries.push(e);
    }
    Ok(GapReport::from_entries(3, entries, Some(m)))
}
