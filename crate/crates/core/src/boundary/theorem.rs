//! Bulk-boundary correspondence: the indicator against the corner or hinge
//! invariants, with the pairing and zero-sum identities.

use std::time::Instant;

use serde::Serialize;

use super::corner::{corner_indices, CornerReport};
use super::flow::{flow_options, spectral_flows, HingeReport};
use super::winding::{corner_windings, WindingReport};
use crate::bulk::{mu2d, mu3d, IndicatorReport};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ktheory::pqr_from_values;
use crate::model::ModelBundle;
use crate::wienerhopf::{assumption_check_2d, assumption_check_3d, GapReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Truncation,
    Winding,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum BoundaryDiagnostics {
    Corner(CornerReport),
    Hinge(HingeReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryInvariants {
    /// `ind_a .. ind_d` in 2D, `sf_a .. sf_d` in 3D.
    pub values: [i64; 4],
    /// `(p, q, r)` with `W_3(p, q, r) = values`, if one exists.
    pub pqr: Option<[i64; 3]>,
    pub method: Method,
    pub diagnostics: BoundaryDiagnostics,
}

impl BoundaryInvariants {
    fn new(values: [i64; 4], diagnostics: BoundaryDiagnostics) -> Self {
        let pqr = pqr_from_values(values).map(|(p, q, r)| [p, q, r]);
        BoundaryInvariants { values, pqr, method: Method::Truncation, diagnostics }
    }
}

/// `half_mu` against `value_a + value_b`, both mod 2.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Identities {
    pub zero_sum: bool,
    /// `value_a = -value_c` and `value_b = -value_d`.
    pub pairing: bool,
    /// `(p, q, r)` exists and reproduces the values.
    pub pqr: bool,
}

impl Identities {
    pub fn of(values: [i64; 4]) -> Identities {
        Identities {
            zero_sum: values.iter().sum::<i64>() == 0,
            pairing: values[0] == -values[2] && values[1] == -values[3],
            pqr: pqr_from_values(values).is_some(),
        }
    }

    pub fn all(&self) -> bool {
        self.zero_sum && self.pairing && self.pqr
    }
}

/// Winding oracle next to the truncation counts.
#[derive(Debug, Clone, Serialize)]
pub struct WindingAgreement {
    pub report: WindingReport,
    pub agrees: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub gap_s: f64,
    pub indicator_s: f64,
    pub boundary_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceReport {
    pub model: String,
    pub dim: usize,
    pub gap: GapReport,
    pub indicator: IndicatorReport,
    pub boundary: BoundaryInvariants,
    pub theorem: TheoremCheck,
    pub identities: Identities,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<WindingAgreement>,
    pub config: Config,
    pub pass: bool,
    /// Wall-clock seconds per stage; only filled on request, so that reports
    /// stay byte-stable by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

/// Runs gap certification, the indicator and the boundary invariants, then
/// checks the mod-2 correspondence and the integer identities.
///
/// `dim` defaults to the model's own dimension. The winding oracle runs in 2D
/// when `cfg.winding.enabled` is set.
pub fn theorem_check(bundle: &ModelBundle, dim: Option<usize>, cfg: &Config, timings: bool) -> Result<CorrespondenceReport> {
    let dim = dim.unwrap_or(bundle.dim());
    if dim != bundle.dim() {
        return Err(Error::DimensionMismatch(format!("model '{}' is {}D, not {dim}D", bundle.name, bundle.dim())));
    }
    let s = &bundle.symmetry;
    let mut tm = Timings::default();
    let (gap, indicator, boundary, winding) = match dim {
        2 => {
            let h = bundle
                .planar()
                .ok_or_else(|| Error::DimensionMismatch(format!("'{}' has no 2D Hamiltonian", bundle.name)))?;
            let t = Instant::now();
            let gap = assumption_check_2d(h, &cfg.gap, &cfg.factor)?;
            tm.gap_s = secs(t);
            gap.require()?;
            let t = Instant::now();
            let indicator = mu2d(h, s, &cfg.bulk)?;
            tm.indicator_s = secs(t);
            let t = Instant::now();
            let corners = corner_indices(h, s, &gap, &cfg.corner, &cfg.bulk)?;
            tm.boundary_s = secs(t);
            let values = corners.values;
            let winding = if cfg.winding.enabled {
                let t = Instant::now();
                let report = corner_windings(h, s, &gap, &cfg.factor, &cfg.winding)?;
                tm.winding_s = Some(secs(t));
                Some(WindingAgreement { agrees: report.values == values, report })
            } else {
                None
            };
            (gap, indicator, BoundaryInvariants::new(values, BoundaryDiagnostics::Corner(corners)), winding)
        }
        3 => {
            let f = bundle.family().ok_or_else(|| Error::DimensionMismatch(format!("'{}' has no 3D family", bundle.name)))?;
            let t = Instant::now();
            let gap = assumption_check_3d(f, &cfg.gap, &cfg.factor)?;
            tm.gap_s = secs(t);
            gap.require()?;
            let t = Instant::now();
            let indicator = mu3d(f, s, &cfg.bulk)?;
            tm.indicator_s = secs(t);
            let t = Instant::now();
            let opts = flow_options(&gap, &cfg.flow, cfg.corner.loc_radius_frac, cfg.corner.loc_weight);
            let hinges = spectral_flows(f, &gap, &opts)?;
            tm.boundary_s = secs(t);
            (gap, indicator, BoundaryInvariants::new(hinges.values, BoundaryDiagnostics::Hinge(hinges)), None)
        }
        d => return Err(Error::DimensionMismatch(format!("dimension {d} is not 2 or 3"))),
    };
    let half = indicator.require_half()? as i64;
    let v = boundary.values;
    let theorem = TheoremCheck { lhs: half, rhs: (v[0] + v[1]).rem_euclid(2), pass: half == (v[0] + v[1]).rem_euclid(2) };
    let identities = Identities::of(v);
    let pass = theorem.pass && identities.all() && winding.as_ref().is_none_or(|w| w.agrees);
    Ok(CorrespondenceReport {
        model: bundle.name.clone(),
        dim,
        gap,
        indicator,
        boundary,
        theorem,
        identities,
        winding,
        config: cfg.clone(),
        pass,
        timings: timings.then_some(tm),
    })
}
