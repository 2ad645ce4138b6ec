//! Dense helpers over `faer` plus a banded LU used by the Toeplitz sections.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = Mat<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn zeros(r: usize, c: usize) -> CMat {
    Mat::zeros(r, c)
}

/// Unit-modulus complex number at angle `theta`.
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm_l2()
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint().to_owned()
}

pub fn scale(m: &CMat, s: C64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

/// Max entry defect of `m - m^*`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let mut out = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out = out.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let vals = evd.S().column_vector().iter().map(|c| c.re).collect();
    Ok((vals, evd.U().to_owned()))
}

pub fn eigvalsh(m: &CMat) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Linalg(format!("{e:?}")))
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    m.singular_values().map_err(|e| Error::Linalg(format!("{e:?}")))
}

pub fn min_singular(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// Determinant by Gaussian elimination with partial pivoting; cheaper than
/// the general routine for the small blocks used here.
pub fn determinant(m: &CMat) -> C64 {
    let n = m.nrows();
    let mut a: Vec<C64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    det_in_place(&mut a, n)
}

/// Determinant of a row-major `n x n` buffer, destroying it.
pub fn det_in_place(a: &mut [C64], n: usize) -> C64 {
    let mut det = ONE;
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i * n + k].norm_sqr() > a[p * n + k].norm_sqr() {
                p = i;
            }
        }
        if a[p * n + k] == ZERO {
            return ZERO;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        let inv = piv.inv();
        for i in k + 1..n {
            let l = a[i * n + k] * inv;
            if l != ZERO {
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= l * u;
                }
            }
        }
    }
    det
}

/// Inverse of a small dense matrix; `None` when numerically singular.
pub fn inverse(m: &CMat) -> Option<CMat> {
    use faer::linalg::solvers::DenseSolveCore;
    let n = m.nrows();
    if n == 0 {
        return Some(zeros(0, 0));
    }
    let scale = max_abs(m);
    if scale == 0.0 {
        return None;
    }
    let sv = singular_values(m).ok()?;
    if sv[n - 1] <= 1e-14 * sv[0] {
        return None;
    }
    let inv = m.partial_piv_lu().inverse();
    Some(inv)
}

/// `a^* b` for two column sets stored as matrices.
pub fn inner(a: &CMat, b: &CMat) -> CMat {
    a.adjoint() * b
}

/// Complex LU with partial pivoting for a matrix with `kl` sub- and `ku`
/// super-diagonals. Rows are stored with `kl` extra columns for pivot fill.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
    piv: Vec<usize>,
    /// Column `k` of the unit lower factor, `kl` entries per column.
    lower: Vec<C64>,
    inv_diag: Vec<C64>,
}

/// Row-band storage builder for [`BandedLu`].
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![ZERO; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Largest declared distance `|i - j|` of a stored entry.
    pub fn half_bandwidth(&self) -> usize {
        self.kl.max(self.ku)
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    /// Adds `v` at `(i, j)`; panics outside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i},{j}) outside band");
        self.data[i * self.width + j + self.kl - i] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j + self.kl < i || j > i + self.ku {
            return ZERO;
        }
        self.slot(i, j).map(|s| self.data[s]).unwrap_or(ZERO)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = ZERO;
            let row = i * self.width + self.kl - i;
            for (j, xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                acc += self.data[row + j] * xj;
            }
            *yi = acc;
        }
        y
    }

    pub fn to_dense(&self) -> CMat {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn factor(self) -> Result<BandedLu> {
        let BandMatrix { n, kl, ku, width, mut data } = self;
        let mut piv = vec![0usize; n];
        let reach = kl + ku;
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = data[at(k, k)].norm();
            for i in k + 1..=last_row {
                let v = data[at(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if best == 0.0 {
                return Err(Error::Linalg(format!("banded LU: zero pivot at column {k}")));
            }
            let last_col = (k + reach).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    data.swap(at(k, j), at(p, j));
                }
            }
            let inv_pivot = data[at(k, k)].inv();
            for i in k + 1..=last_row {
                let l = data[at(i, k)] * inv_pivot;
                if l == ZERO {
                    continue;
                }
                data[at(i, k)] = l;
                for j in k + 1..=last_col {
                    let u = data[at(k, j)];
                    data[at(i, j)] -= l * u;
                }
            }
        }
        let mut lower = vec![ZERO; n * kl];
        for k in 0..n {
            for i in k + 1..=(k + kl).min(n - 1) {
                lower[k * kl + (i - k - 1)] = data[at(i, k)];
            }
        }
        let inv_diag = (0..n).map(|k| data[at(k, k)].inv()).collect();
        Ok(BandedLu { n, kl, ku, width, data, piv, lower, inv_diag })
    }
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.width + (j + self.kl - i)]
    }

    /// Smallest pivot modulus; a cheap singularity hint.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n).map(|k| self.at(k, k).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == ZERO {
                continue;
            }
            let m = self.kl.min(n - 1 - k);
            let col = &self.lower[k * self.kl..k * self.kl + m];
            for (bi, l) in b[k + 1..k + 1 + m].iter_mut().zip(col) {
                *bi -= l * bk;
            }
        }
        let reach = self.kl + self.ku;
        for k in (0..n).rev() {
            let m = reach.min(n - 1 - k);
            let start = k * self.width + 1 + self.kl;
            let row = &self.data[start..start + m];
            let mut acc = b[k];
            for (u, bj) in row.iter().zip(&b[k + 1..k + 1 + m]) {
                acc -= u * bj;
            }
            b[k] = acc * self.inv_diag[k];
        }
    }

    /// Solves `A^* x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        let reach = self.kl + self.ku;
        // U^* z = b (forward)
        for k in 0..n {
            let lo = k.saturating_sub(reach);
            let mut acc = b[k];
            for j in lo..k {
                acc -= self.at(j, k).conj() * b[j];
            }
            b[k] = acc / self.at(k, k).conj();
        }
        // L^* and the row swaps, in reverse order
        for k in (0..n).rev() {
            let mut acc = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                acc -= self.at(i, k).conj() * b[i];
            }
            b[k] = acc;
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
        }
    }
}

/// Smallest singular value of a banded matrix by inverse iteration on
/// `(A^* A)^{-1}`. Returns 0 when the factorization hits an exact zero pivot.
pub fn banded_min_singular(a: &BandMatrix, max_iter: usize, rel_tol: f64) -> f64 {
    banded_min_singular_from(a, None, max_iter, rel_tol).0
}

/// As [`banded_min_singular`], optionally warm-started; also returns the
/// final right singular vector estimate.
pub fn banded_min_singular_from(
    a: &BandMatrix,
    start: Option<&[C64]>,
    max_iter: usize,
    rel_tol: f64,
) -> (f64, Vec<C64>) {
    let n = a.dim();
    let lu = match a.clone().factor() {
        Ok(lu) => lu,
        Err(_) => return (0.0, vec![ZERO; n]),
    };
    // deterministic start vector with no special alignment
    let mut x: Vec<C64> = (0..n)
        .map(|i| {
            let t = i as f64 * 0.618_033_988_749_895;
            C64::new((t * 7.0).sin() + 1.1, (t * 3.0).cos())
        })
        .collect();
    if let Some(s) = start {
        for (xi, si) in x.iter_mut().zip(s) {
            *xi = *si + *xi * 1e-3;
        }
    }
    normalize(&mut x);
    let mut est = f64::INFINITY;
    for _ in 0..max_iter {
        lu.solve_adjoint_in_place(&mut x);
        lu.solve_in_place(&mut x);
        let nx = norm(&x);
        if !nx.is_finite() || nx == 0.0 {
            return (0.0, x);
        }
        for v in x.iter_mut() {
            *v /= nx;
        }
        let next = norm(&a.mul_vec(&x));
        if (est - next).abs() <= rel_tol * next {
            return (next, x);
        }
        est = next;
    }
    (est, x)
}

/// Smallest `|eigenvalue|` of a Hermitian banded matrix by Lanczos on its
/// inverse (one LU, full reorthogonalization). Returns 0 on an exact zero pivot.
pub fn hermitian_band_min_abs_eig(a: &BandMatrix, max_steps: usize, rel_tol: f64) -> f64 {
    let n = a.dim();
    let lu = match a.clone().factor() {
        Ok(lu) => lu,
        Err(_) => return 0.0,
    };
    let steps = max_steps.min(n).max(1);
    let mut q: Vec<C64> = (0..n)
        .map(|i| {
            let t = i as f64 * 0.618_033_988_749_895;
            C64::new((t * 7.0).sin() + 1.1, (t * 3.0).cos())
        })
        .collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut last = 0.0f64;
    for k in 0..steps {
        let mut v = q.clone();
        lu.solve_in_place(&mut v);
        if v.iter().any(|x| !x.is_finite()) {
            return 0.0;
        }
        let a_k = dot(&q, &v).re;
        alpha.push(a_k);
        basis.push(q);
        // full reorthogonalization (one classical Gram-Schmidt pass)
        let coeffs: Vec<C64> = basis.iter().map(|b| dot(b, &v)).collect();
        for (b, c) in basis.iter().zip(coeffs) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let b_k = norm(&v);
        let ritz = tridiagonal_extreme(&alpha, &beta);
        if k > 2 && ((ritz - last).abs() <= rel_tol * ritz || b_k <= 1e-14 * ritz) {
            return 1.0 / ritz;
        }
        last = ritz;
        if b_k <= 1e-300 {
            return 1.0 / ritz;
        }
        beta.push(b_k);
        q = v.into_iter().map(|x| x / b_k).collect();
    }
    if last > 0.0 {
        1.0 / last
    } else {
        0.0
    }
}

/// Largest `|eigenvalue|` of the real symmetric tridiagonal matrix with
/// diagonal `alpha` and off-diagonal `beta`, by Sturm bisection.
fn tridiagonal_extreme(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let radius = (0..k)
        .map(|i| {
            let l = if i > 0 { beta[i - 1].abs() } else { 0.0 };
            let r = if i < beta.len() { beta[i].abs() } else { 0.0 };
            alpha[i].abs() + l + r
        })
        .fold(0.0f64, f64::max);
    if radius == 0.0 {
        return 0.0;
    }
    // number of eigenvalues below x
    let count_below = |x: f64| {
        let mut c = 0;
        let mut d = 1.0f64;
        for i in 0..k {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                c += 1;
            }
        }
        c
    };
    let bisect = |target: usize| {
        // smallest x with count_below(x) > target
        let (mut lo, mut hi) = (-radius, radius);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if count_below(mid) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    bisect(0).abs().max(bisect(k - 1).abs())
}

/// Eigenpairs of a Hermitian banded matrix with `|λ| < cutoff`, by subspace
/// iteration on `(A - shift)^-1` with Rayleigh-Ritz extraction.
///
/// The block grows until it holds a margin of vectors beyond the cutoff, so a
/// cluster of unknown multiplicity is captured whole. Eigenvalues ascend.
pub fn hermitian_band_eigs_near_zero(a: &BandMatrix, cutoff: f64, shift: f64) -> Result<(Vec<f64>, CMat)> {
    const MARGIN: usize = 4;
    const MAX_ITER: usize = 200;
    let n = a.dim();
    let mut shifted = a.clone();
    for i in 0..n {
        shifted.add(i, i, C64::new(-shift, 0.0));
    }
    let lu = shifted.factor()?;
    let scale = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(a.kl);
            let hi = (i + a.ku).min(n - 1);
            (lo..=hi).map(|j| a.get(i, j).norm()).sum::<f64>()
        })
        .fold(0.0f64, f64::max)
        .max(1.0);
    let tol = 1e-10 * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut k = 16.min(n);
    loop {
        let start = Mat::from_fn(n, k, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let mut q = start.qr().compute_thin_Q();
        let mut done = None;
        for iter in 0..MAX_ITER {
            let mut y = q.clone();
            for j in 0..k {
                let mut col: Vec<C64> = (0..n).map(|i| y[(i, j)]).collect();
                lu.solve_in_place(&mut col);
                for (i, v) in col.into_iter().enumerate() {
                    y[(i, j)] = v;
                }
            }
            // Ritz pairs of the inverted operator: spurious values can only
            // appear far from the shift, never inside the cutoff.
            let g = adjoint(&q) * &y;
            let g = Mat::from_fn(k, k, |i, j| 0.5 * (g[(i, j)] + g[(j, i)].conj()));
            let (mu, s) = eigh(&g)?;
            let lam: Vec<f64> = mu.iter().map(|&m| if m == 0.0 { f64::INFINITY } else { shift + 1.0 / m }).collect();
            let x = &q * &s;
            let inside: Vec<usize> = (0..k).filter(|&i| lam[i].abs() < cutoff).collect();
            let residual = |i: usize| {
                let col: Vec<C64> = (0..n).map(|r| x[(r, i)]).collect();
                let ax = a.mul_vec(&col);
                ax.iter().zip(&col).map(|(p, v)| (p - v * lam[i]).norm_sqr()).sum::<f64>().sqrt()
            };
            // A missed eigenvalue inside the cutoff would be amplified against
            // the nearest outside Ritz value by at least (d_in / d_out)^iter.
            let d_in = cutoff + shift.abs();
            let d_out = (0..k)
                .filter(|&i| lam[i].abs() >= cutoff)
                .map(|i| (lam[i] - shift).abs())
                .fold(f64::INFINITY, f64::min);
            let separated = d_out.is_finite() && (d_in / d_out).powi(iter as i32 + 1) < 1e-12;
            if separated && inside.iter().all(|&i| residual(i) < tol) {
                done = Some((lam, inside, x));
                break;
            }
            q = (&y * &s).qr().compute_thin_Q();
        }
        let (lam, mut inside, x) = done.ok_or_else(|| Error::Linalg("subspace iteration did not converge".into()))?;
        if inside.len() + MARGIN <= k || k == n {
            inside.sort_by(|&i, &j| lam[i].total_cmp(&lam[j]));
            let vals = inside.iter().map(|&i| lam[i]).collect();
            let vecs = Mat::from_fn(n, inside.len(), |r, c| x[(r, inside[c])]);
            return Ok((vals, vecs));
        }
        k = (2 * k).min(n);
    }
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(x: &mut [C64]) {
    let n = norm(x);
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandMatrix {
        let mut b = BandMatrix::new(n, kl, ku);
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                b.add(i, j, C64::new(next(), next()));
            }
        }
        b
    }

    #[test]
    fn banded_solves_match_dense() {
        let a = random_band(40, 3, 5, 11);
        let dense = a.to_dense();
        let lu = a.clone().factor().unwrap();
        let rhs: Vec<C64> = (0..40).map(|i| C64::new(i as f64, 1.0 - i as f64 * 0.3)).collect();

        let mut x = rhs.clone();
        lu.solve_in_place(&mut x);
        let ax = a.mul_vec(&x);
        let err: f64 = ax.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "A x residual {err}");

        let mut y = rhs.clone();
        lu.solve_adjoint_in_place(&mut y);
        let ystar = Mat::from_fn(40, 1, |i, _| y[i]);
        let ahy = dense.adjoint() * &ystar;
        let err: f64 = (0..40).map(|i| (ahy[(i, 0)] - rhs[i]).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "A^* y residual {err}");
    }

    #[test]
    fn lanczos_min_abs_eig_matches_dense() {
        let a = random_band(80, 3, 3, 9);
        let d = a.to_dense();
        let herm = &d + d.adjoint();
        let mut b = BandMatrix::new(80, 3, 3);
        for i in 0..80usize {
            for j in i.saturating_sub(3)..=(i + 3).min(79) {
                b.add(i, j, herm[(i, j)]);
            }
        }
        let exact = eigvalsh(&herm).unwrap().iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        let est = hermitian_band_min_abs_eig(&b, 80, 1e-10);
        assert!((est - exact).abs() < 1e-6 * exact.max(1.0), "{est} vs {exact}");
    }

    #[test]
    fn near_zero_eigenpairs_match_dense() {
        // a gapped spectrum with a planted cluster of seven small eigenvalues
        let a = random_band(120, 4, 4, 3);
        let d = a.to_dense();
        let mut herm = (&d + d.adjoint()) * faer::Scale(C64::new(0.02, 0.0));
        for i in 0..120 {
            let v = if i % 17 == 3 { 1e-3 * i as f64 } else if i % 2 == 0 { 1.0 + i as f64 / 120.0 } else { -1.0 };
            herm[(i, i)] += C64::new(v, 0.0);
        }
        let mut b = BandMatrix::new(120, 4, 4);
        for i in 0..120usize {
            for j in i.saturating_sub(4)..=(i + 4).min(119) {
                b.add(i, j, herm[(i, j)]);
            }
        }
        let mut exact: Vec<f64> = eigvalsh(&herm).unwrap();
        exact.retain(|x| x.abs() < 0.4);
        assert_eq!(exact.len(), 7);
        let (vals, vecs) = hermitian_band_eigs_near_zero(&b, 0.4, 0.01).unwrap();
        assert_eq!(vals.len(), exact.len());
        for (v, e) in vals.iter().zip(&exact) {
            assert!((v - e).abs() < 1e-9, "{v} vs {e}");
        }
        let res = &herm * &vecs - &vecs * Mat::from_fn(7, 7, |i, j| if i == j { C64::new(vals[i], 0.0) } else { ZERO });
        assert!(max_abs(&res) < 1e-8);
    }

    #[test]
    fn banded_min_singular_matches_dense() {
        let a = random_band(60, 2, 2, 5);
        let dense = a.to_dense();
        let exact = min_singular(&dense).unwrap();
        let est = banded_min_singular(&a, 500, 1e-12);
        assert!((est - exact).abs() < 1e-6 * exact.max(1.0), "{est} vs {exact}");
    }
}
