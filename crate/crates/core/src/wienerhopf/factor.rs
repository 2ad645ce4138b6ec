use std::f64::consts::{FRAC_PI_2, PI};

use crate::config::FactorConfig;
use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;
use crate::linalg::{
    det_in_place, eigh, frobenius, inverse, zeros, BandMatrix, CMat, C64, ONE,
};

fn require_one_var(f: &LaurentMatrix) -> Result<()> {
    if f.nvars() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 1-variable symbol, got {} variables",
            f.nvars()
        )));
    }
    Ok(())
}

fn circle(k: usize, m: usize) -> C64 {
    crate::linalg::cis(2.0 * PI * k as f64 / m as f64)
}

/// Winding number of `z -> det f(z)` around the origin.
pub fn winding_det(f: &LaurentMatrix, cfg: &FactorConfig) -> Result<i64> {
    require_one_var(f)?;
    let n = f.size();
    let terms: Vec<(i32, Vec<C64>)> = f
        .terms()
        .map(|(k, a)| (k[0], (0..n * n).map(|i| a[(i / n, i % n)]).collect()))
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    let mut det_at = |z: C64| {
        buf.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        for (k, a) in &terms {
            let c = z.powi(*k);
            for (b, x) in buf.iter_mut().zip(a) {
                *b += x * c;
            }
        }
        det_in_place(&mut buf, n)
    };
    let mut m = cfg.winding_grid.max(8);
    for attempt in 0..2 {
        let dets: Vec<C64> = (0..m).map(|k| det_at(circle(k, m))).collect();
        let min_det = dets.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        if min_det < cfg.det_floor {
            return Err(Error::SingularOnCircle(min_det));
        }
        let mut total = 0.0;
        let mut jump = false;
        for k in 0..m {
            let step = (dets[(k + 1) % m] / dets[k]).arg();
            if step.abs() > FRAC_PI_2 {
                jump = true;
                break;
            }
            total += step;
        }
        if jump {
            if attempt == 0 {
                m *= 2;
                continue;
            }
            return Err(Error::PhaseJump);
        }
        let raw = total / (2.0 * PI);
        let rounded = raw.round();
        if (raw - rounded).abs() >= cfg.winding_guard {
            return Err(Error::PhaseJump);
        }
        return Ok(rounded as i64);
    }
    Err(Error::PhaseJump)
}

/// Which half-line problem a factorization solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    /// `f = f_- f_+`.
    Right,
    /// `f = f_+ f_-`, obtained from a right factorization of `z -> f(1/z)`.
    Left,
}

/// Canonical factorization of a 1-variable symbol.
///
/// Internally everything is stored for the right factorization of `g`, where
/// `g = f` for [`Handedness::Right`] and `g(u) = f(1/u)` for [`Handedness::Left`].
/// `g = g_- g_+` with `g_-(u) = Σ M_j u^{-j}` exact and `g_+ = h^{-1}`,
/// `h(u) = Σ X_k u^k`.
#[derive(Debug, Clone)]
pub struct CanonicalFactorization {
    pub handedness: Handedness,
    /// Taylor coefficients of `g_+` from a DFT of `h^{-1}`.
    pub series_coeffs: Vec<CMat>,
    /// `M_j`, coefficients of `g_-` in `u^{-j}`.
    pub poly_coeffs: Vec<CMat>,
    /// `X_k`, Taylor coefficients of `h = g_+^{-1}`.
    pub inv_series_coeffs: Vec<CMat>,
    pub residual: f64,
    pub decay: f64,
    pub truncation: usize,
}

fn horner(coeffs: &[CMat], u: C64, n: usize) -> CMat {
    // in place: the long series makes per-step allocation dominate
    let mut acc = vec![C64::new(0.0, 0.0); n * n];
    for c in coeffs.iter().rev() {
        for j in 0..n {
            for i in 0..n {
                let a = &mut acc[j * n + i];
                *a = *a * u + c[(i, j)];
            }
        }
    }
    CMat::from_fn(n, n, |i, j| acc[j * n + i])
}

impl CanonicalFactorization {
    fn size(&self) -> usize {
        self.poly_coeffs[0].nrows()
    }

    /// Coefficients of `f_+`: in `z^k` for right factorizations, `z^k` as well for left ones.
    pub fn plus_coeffs(&self) -> &[CMat] {
        match self.handedness {
            Handedness::Right => &self.series_coeffs,
            Handedness::Left => &self.poly_coeffs,
        }
    }

    /// Coefficients of `f_-` in `z^{-k}`.
    pub fn minus_coeffs(&self) -> &[CMat] {
        match self.handedness {
            Handedness::Right => &self.poly_coeffs,
            Handedness::Left => &self.series_coeffs,
        }
    }

    fn g_plus(&self, u: C64) -> Result<CMat> {
        let h = horner(&self.inv_series_coeffs, u, self.size());
        inverse(&h).ok_or_else(|| Error::NonCanonical("plus factor is singular at a sampled point".into()))
    }

    fn g_minus_conj(&self, u: C64) -> CMat {
        // g_-(1/conj(u)) = Σ M_j conj(u)^j
        horner(&self.poly_coeffs, u.conj(), self.size())
    }

    /// Canonical extension at `z`: `|z| <= 1` for right factorizations,
    /// `|z| >= 1` for left ones.
    pub fn extend(&self, z: C64) -> Result<CMat> {
        let u = match self.handedness {
            Handedness::Right => z,
            Handedness::Left => {
                if z.norm() == 0.0 {
                    return Err(Error::OutsideX("z = 0 is not in the outer disk".into()));
                }
                z.inv()
            }
        };
        if u.norm() > 1.0 + 1e-12 {
            return Err(Error::OutsideX(format!("|z| = {} on the wrong side of the circle", z.norm())));
        }
        Ok(self.g_minus_conj(u) * self.g_plus(u)?)
    }
}

/// Scalar band of the block Toeplitz section `[A_{i-j}]` with `nblocks` blocks.
pub fn toeplitz_section(f: &LaurentMatrix, nblocks: usize) -> BandMatrix {
    let n = f.size();
    let (lo, hi) = f.degree_range(0);
    let p = hi.max(0) as usize;
    let d = (-lo).max(0) as usize;
    let mut band = BandMatrix::new(nblocks * n, p * n + n - 1, d * n + n - 1);
    for (k, a) in f.terms() {
        let k = k[0];
        let entries: Vec<(usize, usize, C64)> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, a[(r, c)]))
            .filter(|e| e.2 != C64::new(0.0, 0.0))
            .collect();
        for j in 0..nblocks {
            let i = j as i64 + k as i64;
            if i < 0 || i >= nblocks as i64 {
                continue;
            }
            let i = i as usize;
            for &(r, c, v) in &entries {
                band.add(i * n + r, j * n + c, v);
            }
        }
    }
    band
}

/// Dense version of [`toeplitz_section`].
pub fn toeplitz_dense(f: &LaurentMatrix, nblocks: usize) -> CMat {
    toeplitz_section(f, nblocks).to_dense()
}

fn coeff(f: &LaurentMatrix, k: i32) -> Option<&CMat> {
    f.coeff(&[k])
}

fn solve_section(f: &LaurentMatrix, nblocks: usize) -> Result<Vec<CMat>> {
    let n = f.size();
    let lu = toeplitz_section(f, nblocks)
        .factor()
        .map_err(|_| Error::NonCanonical(format!("block Toeplitz section of size {nblocks} is singular")))?;
    let mut x = vec![zeros(n, n); nblocks];
    for col in 0..n {
        let mut rhs = vec![C64::new(0.0, 0.0); nblocks * n];
        rhs[col] = ONE;
        lu.solve_in_place(&mut rhs);
        for (b, xb) in x.iter_mut().enumerate() {
            for r in 0..n {
                xb[(r, col)] = rhs[b * n + r];
            }
        }
    }
    Ok(x)
}

fn plus_coeffs_by_dft(x: &[CMat], n: usize) -> Result<Vec<CMat>> {
    let nb = x.len();
    let grid = 4 * nb;
    let mut out = vec![zeros(n, n); nb];
    for g in 0..grid {
        let u = circle(g, grid);
        let hinv = inverse(&horner(x, u, n))
            .ok_or_else(|| Error::NonCanonical("inverse plus factor is singular on the circle".into()))?;
        // accumulate Σ_g hinv(u_g) u_g^{-k}
        let ubar = u.conj();
        let mut w = ONE;
        for c in out.iter_mut() {
            *c += &hinv * faer::Scale(w);
            w *= ubar;
        }
    }
    let s = 1.0 / grid as f64;
    Ok(out.into_iter().map(|c| c * faer::Scale(C64::new(s, 0.0))).collect())
}

fn right_factorization(f: &LaurentMatrix, cfg: &FactorConfig) -> Result<CanonicalFactorization> {
    require_one_var(f)?;
    let n = f.size();
    let w = winding_det(f, cfg)?;
    if w != 0 {
        return Err(Error::NonCanonical(format!("det winding number is {w}")));
    }
    let (lo, hi) = f.degree_range(0);
    let d = (-lo).max(0) as usize;
    let mut last_err = None;
    for &nb in &cfg.truncations {
        let x = solve_section(f, nb)?;
        let x0 = frobenius(&x[0]);
        if inverse(&x[0]).is_none() {
            return Err(Error::NonCanonical("leading block of the section solution is singular".into()));
        }
        let decay = frobenius(&x[nb - 1]);
        if decay >= cfg.decay_tol * x0 {
            last_err = Some(Error::NonCanonical(format!(
                "solution blocks do not decay at truncation {nb} (ratio {:.3e})",
                decay / x0
            )));
            continue;
        }
        // exact minus factor: M_m = Σ_k A_{-m-k} X_k
        let mut minus = vec![zeros(n, n); d + 1];
        for (m, mm) in minus.iter_mut().enumerate() {
            for (k, xk) in x.iter().enumerate().take(d - m + 1) {
                if let Some(a) = coeff(f, -((m + k) as i32)) {
                    *mm += a * xk;
                }
            }
        }
        // positive-index coefficients of f h must vanish
        let p = hi.max(0) as usize;
        let mut tail = 0.0f64;
        for m in 1..nb + p {
            let mut c = zeros(n, n);
            for (k, xk) in x.iter().enumerate() {
                let idx = m as i64 - k as i64;
                if idx < lo as i64 || idx > hi as i64 {
                    continue;
                }
                if let Some(a) = coeff(f, idx as i32) {
                    c += a * xk;
                }
            }
            tail = tail.max(frobenius(&c));
        }
        let plus = plus_coeffs_by_dft(&x, n)?;
        let mut residual = tail;
        for g in 0..cfg.residual_grid {
            let u = circle(g, cfg.residual_grid);
            let fm = horner(&minus, u.inv(), n);
            let fp = horner(&plus, u, n);
            let val = f.eval(&[u])?;
            residual = residual.max(frobenius(&(val - fm * fp)));
        }
        if residual >= cfg.residual_tol {
            last_err = Some(Error::IllConditioned { residual, tol: cfg.residual_tol });
            continue;
        }
        return Ok(CanonicalFactorization {
            handedness: Handedness::Right,
            series_coeffs: plus,
            poly_coeffs: minus,
            inv_series_coeffs: x,
            residual,
            decay: decay / x0,
            truncation: nb,
        });
    }
    Err(last_err.unwrap_or_else(|| Error::NonCanonical("no truncation sizes configured".into())))
}

/// Right canonical factorization `f = f_- f_+`.
pub fn factorize_right(f: &LaurentMatrix, cfg: &FactorConfig) -> Result<CanonicalFactorization> {
    right_factorization(f, cfg)
}

/// Left canonical factorization `f = f_+ f_-`.
pub fn factorize_left(f: &LaurentMatrix, cfg: &FactorConfig) -> Result<CanonicalFactorization> {
    let mut cf = right_factorization(&f.flip_variable(0)?, cfg)?;
    cf.handedness = Handedness::Left;
    Ok(cf)
}

/// Extension of `f` at `z`; on the circle this is `f(z)` itself.
pub fn extend_1var(f: &LaurentMatrix, cf: &CanonicalFactorization, z: C64) -> Result<CMat> {
    if (z.norm() - 1.0).abs() < 1e-14 {
        return f.eval(&[z]);
    }
    cf.extend(z)
}

/// Kernel/cokernel diagnostics of the half-line Toeplitz operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct PartialIndexReport {
    pub winding_det: i64,
    pub ker_dim: usize,
    pub coker_dim: usize,
    pub canonical: bool,
}

/// Counts columns of `v` whose span sits in the first half of the section,
/// via eigenvalues of the compressed localization operator.
fn count_localized_at_start(v: &CMat, half: usize) -> Result<usize> {
    let k = v.ncols();
    if k == 0 {
        return Ok(0);
    }
    let head = v.subrows(0, half).to_owned();
    let loc = head.adjoint() * &head;
    let (vals, _) = eigh(&loc)?;
    Ok(vals.iter().filter(|&&x| x >= 0.5).count())
}

/// Estimates `dim ker T_f` and `dim coker T_f` from an `nblocks` finite section.
pub fn partial_index_report(f: &LaurentMatrix, nblocks: usize, cfg: &FactorConfig) -> Result<PartialIndexReport> {
    let w = winding_det(f, cfg)?;
    let n = f.size();
    let t = toeplitz_dense(f, nblocks);
    let svd = t.svd().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|c| c.re).collect();
    let cutoff = 1e-6 * s[0].max(1.0);
    let small: Vec<usize> = (0..s.len()).filter(|&i| s[i] < cutoff).collect();
    let pick = |m: faer::MatRef<'_, C64>| CMat::from_fn(m.nrows(), small.len(), |r, c| m[(r, small[c])]);
    let half = nblocks * n / 2;
    let ker = count_localized_at_start(&pick(svd.V()), half)?;
    let coker = count_localized_at_start(&pick(svd.U()), half)?;
    Ok(PartialIndexReport { winding_det: w, ker_dim: ker, coker_dim: coker, canonical: w == 0 && ker == 0 && coker == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(terms: &[(i32, f64)]) -> LaurentMatrix {
        LaurentMatrix::from_terms(
            1,
            1,
            terms.iter().map(|&(k, v)| (vec![k], CMat::from_fn(1, 1, |_, _| C64::new(v, 0.0)))),
        )
        .unwrap()
    }

    #[test]
    fn scalar_windings() {
        let cfg = FactorConfig::default();
        assert_eq!(winding_det(&scalar(&[(1, 1.0)]), &cfg).unwrap(), 1);
        assert_eq!(winding_det(&scalar(&[(0, 2.0), (1, 1.0)]), &cfg).unwrap(), 0);
        assert_eq!(winding_det(&scalar(&[(-2, 1.0), (0, 0.1)]), &cfg).unwrap(), -2);
        assert!(matches!(
            winding_det(&scalar(&[(0, 1.0), (1, 1.0)]), &cfg),
            Err(Error::SingularOnCircle(_))
        ));
    }

    #[test]
    fn two_plus_z() {
        let cfg = FactorConfig::default();
        let f = scalar(&[(0, 2.0), (1, 1.0)]);
        let cf = factorize_right(&f, &cfg).unwrap();
        let at0 = extend_1var(&f, &cf, C64::new(0.0, 0.0)).unwrap();
        assert!((at0[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-12);
        let z = C64::new(0.3, -0.4);
        let v = cf.extend(z).unwrap();
        assert!((v[(0, 0)] - (C64::new(2.0, 0.0) + z)).norm() < 1e-12);
        assert!(matches!(factorize_right(&scalar(&[(1, 1.0)]), &cfg), Err(Error::NonCanonical(_))));
    }

    #[test]
    fn two_plus_z_inverse_left() {
        let cfg = FactorConfig::default();
        let f = scalar(&[(0, 2.0), (-1, 1.0)]);
        let cf = factorize_left(&f, &cfg).unwrap();
        // the plus factor is constant
        assert_eq!(cf.plus_coeffs().len(), 1);
        let z = C64::new(2.0, 1.0);
        let v = cf.extend(z).unwrap();
        assert!((v[(0, 0)] - (C64::new(2.0, 0.0) + z.inv())).norm() < 1e-12);
        assert!(matches!(factorize_left(&scalar(&[(-1, 1.0)]), &cfg), Err(Error::NonCanonical(_))));
    }

    #[test]
    fn shift_has_cokernel() {
        let cfg = FactorConfig::default();
        let r = partial_index_report(&scalar(&[(1, 1.0)]), 32, &cfg).unwrap();
        assert_eq!((r.winding_det, r.ker_dim, r.coker_dim), (1, 0, 1));
        let r = partial_index_report(&scalar(&[(-1, 1.0)]), 32, &cfg).unwrap();
        assert_eq!((r.winding_det, r.ker_dim, r.coker_dim), (-1, 1, 0));
    }
}
