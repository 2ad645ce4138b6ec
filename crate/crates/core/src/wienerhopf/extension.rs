use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::factor::{factorize_left, factorize_right, CanonicalFactorization};
use super::gap::GapReport;
use crate::config::FactorConfig;
use crate::error::{Error, Patch, Result};
use crate::laurent::LaurentMatrix;
use crate::linalg::{CMat, C64};

/// Points closer than this to the unit circle count as lying on it.
pub const CIRCLE_TOL: f64 = 1e-12;

type CacheKey = (Patch, u64);

/// Gap-preserving extension `H^E` of a 2-variable symbol to the glued space
/// `X = (D+ x T) ∪ (D- x T) ∪ (T x D+) ∪ (T x D-)`.
///
/// Factorizations of the frozen 1-variable symbols are computed on demand and
/// cached per patch, keyed by the exact bit pattern of the frozen angle.
#[derive(Debug)]
pub struct ExtendedSymbol {
    base: LaurentMatrix,
    cfg: FactorConfig,
    cache: RwLock<HashMap<CacheKey, Arc<CanonicalFactorization>>>,
}

impl ExtendedSymbol {
    pub fn new(base: LaurentMatrix, cfg: FactorConfig) -> Result<Self> {
        if base.nvars() != 2 {
            return Err(Error::DimensionMismatch("extension needs a 2-variable symbol".into()));
        }
        Ok(ExtendedSymbol { base, cfg, cache: RwLock::new(HashMap::new()) })
    }

    pub fn base(&self) -> &LaurentMatrix {
        &self.base
    }

    pub fn cached_factorizations(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    fn factorization(&self, patch: Patch, frozen: f64) -> Result<Arc<CanonicalFactorization>> {
        let key = (patch, frozen.to_bits());
        if let Some(cf) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(cf.clone());
        }
        let value = crate::linalg::cis(frozen);
        let computed = match patch {
            Patch::ZPlus | Patch::ZMinus => self.base.fix_variable(1, value),
            Patch::WPlus | Patch::WMinus => self.base.fix_variable(0, value),
        }
        .and_then(|f| match patch {
            Patch::ZPlus | Patch::WPlus => factorize_right(&f, &self.cfg),
            Patch::ZMinus | Patch::WMinus => factorize_left(&f, &self.cfg),
        })
        .map_err(|e| Error::Patch { patch, frozen, source: Box::new(e) })?;
        let mut cache = self.cache.write().expect("cache lock");
        Ok(cache.entry(key).or_insert_with(|| Arc::new(computed)).clone())
    }

    /// `H^E` on a patch: `frozen` is the angle of the circle coordinate and
    /// `disk` the coordinate in the open disk (inner for `+`, outer for `-`).
    pub fn eval_patch(&self, patch: Patch, frozen: f64, disk: C64) -> Result<CMat> {
        let r = disk.norm();
        let inner = matches!(patch, Patch::ZPlus | Patch::WPlus);
        if (r - 1.0).abs() < CIRCLE_TOL {
            let u = crate::linalg::cis(frozen);
            let d = disk / r;
            return match patch {
                Patch::ZPlus | Patch::ZMinus => self.base.eval(&[d, u]),
                Patch::WPlus | Patch::WMinus => self.base.eval(&[u, d]),
            };
        }
        if inner != (r < 1.0) {
            return Err(Error::OutsideX(format!("|{}| = {r} does not lie in patch {patch}", disk)));
        }
        let cf = self.factorization(patch, frozen)?;
        cf.extend(disk).map_err(|e| Error::Patch { patch, frozen, source: Box::new(e) })
    }

    /// `H^E(z, w)` for a point of `X`.
    pub fn eval(&self, z: C64, w: C64) -> Result<CMat> {
        let (rz, rw) = (z.norm(), w.norm());
        let on_z = (rz - 1.0).abs() < CIRCLE_TOL;
        let on_w = (rw - 1.0).abs() < CIRCLE_TOL;
        match (on_z, on_w) {
            (true, true) => self.base.eval(&[z, w]),
            (false, true) => {
                let patch = if rz < 1.0 { Patch::ZPlus } else { Patch::ZMinus };
                self.eval_patch(patch, w.arg(), z)
            }
            (true, false) => {
                let patch = if rw < 1.0 { Patch::WPlus } else { Patch::WMinus };
                self.eval_patch(patch, z.arg(), w)
            }
            (false, false) => Err(Error::OutsideX(format!("{z}, {w}"))),
        }
    }
}

/// Builds the extension of a model whose four half-plane operators are certified.
pub fn extend_bulk(h: &LaurentMatrix, gap: &GapReport, cfg: &FactorConfig) -> Result<ExtendedSymbol> {
    gap.require()?;
    ExtendedSymbol::new(h.clone(), cfg.clone())
}
