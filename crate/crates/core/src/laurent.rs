//! Matrix-valued Laurent polynomials in one to three torus variables.
//!
//! Coefficients follow the hopping convention: the term `A_k z^k` of a symbol
//! is the block `T_{r, r-k}` of the lattice operator it defines.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{adjoint, cis, identity, max_abs, zeros, CMat, C64, ONE};

/// Coefficients with max-entry modulus below this are dropped.
pub const DROP_TOL: f64 = 1e-14;
/// Tolerance for coefficient-level symmetry checks.
pub const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LaurentMatrix {
    size: usize,
    nvars: usize,
    terms: BTreeMap<Vec<i32>, CMat>,
}

/// Outcome of a coefficient-level symmetry test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SymmetryCheck {
    pub ok: bool,
    pub defect: f64,
}

impl SymmetryCheck {
    fn from_defect(defect: f64) -> Self {
        SymmetryCheck { ok: defect <= COEFF_TOL, defect }
    }
}

impl PartialEq for LaurentMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.nvars == other.nvars
            && self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|((ka, a), (kb, b))| ka == kb && a == b)
    }
}

impl LaurentMatrix {
    pub fn zero(size: usize, nvars: usize) -> Self {
        assert!((1..=3).contains(&nvars), "nvars must be 1, 2 or 3");
        LaurentMatrix { size, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(m: CMat, nvars: usize) -> Result<Self> {
        Self::from_terms(m.nrows(), nvars, [(vec![0; nvars], m)])
    }

    /// Builds a symbol from `(exponent, coefficient)` pairs. Repeated exponents add up.
    pub fn from_terms<I>(size: usize, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, CMat)>,
    {
        if !(1..=3).contains(&nvars) {
            return Err(Error::DimensionMismatch(format!("nvars = {nvars}, expected 1..=3")));
        }
        let mut out = LaurentMatrix::zero(size, nvars);
        for (k, a) in terms {
            out.add_term(k, a)?;
        }
        out.normalize();
        Ok(out)
    }

    fn add_term(&mut self, k: Vec<i32>, a: CMat) -> Result<()> {
        if k.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "exponent {k:?} has length {}, symbol has {} variables",
                k.len(),
                self.nvars
            )));
        }
        if a.nrows() != self.size || a.ncols() != self.size {
            return Err(Error::DimensionMismatch(format!(
                "coefficient at {k:?} is {}x{}, expected {n}x{n}",
                a.nrows(),
                a.ncols(),
                n = self.size
            )));
        }
        match self.terms.get_mut(&k) {
            Some(b) => *b = &*b + &a,
            None => {
                self.terms.insert(k, a);
            }
        }
        Ok(())
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, a| max_abs(a) >= DROP_TOL);
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &CMat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k: &[i32]) -> Option<&CMat> {
        self.terms.get(k)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|&e| e == 0))
    }

    /// Smallest and largest exponent of variable `var` (both 0 for the zero symbol).
    pub fn degree_range(&self, var: usize) -> (i32, i32) {
        let mut lo = 0;
        let mut hi = 0;
        for k in self.terms.keys() {
            lo = lo.min(k[var]);
            hi = hi.max(k[var]);
        }
        (lo, hi)
    }

    /// Largest `|k_i|` over all terms and variables.
    pub fn hopping_range(&self) -> i32 {
        self.terms.keys().flat_map(|k| k.iter().map(|e| e.abs())).max().unwrap_or(0)
    }

    /// `Σ A_k p^k`. Points off the unit circle are allowed as long as they are nonzero.
    pub fn eval(&self, point: &[C64]) -> Result<CMat> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, symbol has {} variables",
                point.len(),
                self.nvars
            )));
        }
        let mut out = zeros(self.size, self.size);
        for (k, a) in &self.terms {
            let mut c = ONE;
            for (p, &e) in point.iter().zip(k) {
                c *= p.powi(e);
            }
            for j in 0..self.size {
                for i in 0..self.size {
                    out[(i, j)] += a[(i, j)] * c;
                }
            }
        }
        Ok(out)
    }

    pub fn check_hermitian_on_torus(&self) -> SymmetryCheck {
        let mut defect = 0.0f64;
        for (k, a) in &self.terms {
            let neg: Vec<i32> = k.iter().map(|e| -e).collect();
            let d = match self.terms.get(&neg) {
                Some(b) => max_abs(&(b - a.adjoint())),
                None => max_abs(a),
            };
            defect = defect.max(d);
        }
        SymmetryCheck::from_defect(defect)
    }

    /// `I A_k I^* = A_{-k}` for every `k`.
    pub fn check_inversion(&self, s: &SymmetryData) -> SymmetryCheck {
        let i = &s.inversion;
        let mut defect = 0.0f64;
        for (k, a) in &self.terms {
            let neg: Vec<i32> = k.iter().map(|e| -e).collect();
            let lhs = i * a * i.adjoint();
            let d = match self.terms.get(&neg) {
                Some(b) => max_abs(&(&lhs - b)),
                None => max_abs(&lhs),
            };
            defect = defect.max(d);
        }
        SymmetryCheck::from_defect(defect)
    }

    /// `Π A_k Π^* = -A_k` for every `k`.
    pub fn check_chiral(&self, s: &SymmetryData) -> Result<SymmetryCheck> {
        let p = s.chiral.as_ref().ok_or(Error::MissingChiral)?;
        let defect = self
            .terms
            .values()
            .map(|a| max_abs(&(p * a * p.adjoint() + a)))
            .fold(0.0, f64::max);
        Ok(SymmetryCheck::from_defect(defect))
    }

    /// Substitutes `value` for variable `var`, leaving a symbol in the remaining variables.
    pub fn fix_variable(&self, var: usize, value: C64) -> Result<LaurentMatrix> {
        if var >= self.nvars || self.nvars < 2 {
            return Err(Error::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let mut out = LaurentMatrix::zero(self.size, self.nvars - 1);
        for (k, a) in &self.terms {
            let mut rest = k.clone();
            let e = rest.remove(var);
            out.add_term(rest, a * faer::Scale(value.powi(e)))?;
        }
        out.normalize();
        Ok(out)
    }

    /// Negates the exponent of `var`: on the circle this is `z -> z^{-1}`.
    pub fn flip_variable(&self, var: usize) -> Result<LaurentMatrix> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| {
                let mut k = k.clone();
                k[var] = -k[var];
                (k, a.clone())
            })
            .collect();
        Ok(LaurentMatrix { size: self.size, nvars: self.nvars, terms })
    }

    /// Swaps two variables.
    pub fn swap_variables(&self, a: usize, b: usize) -> Result<LaurentMatrix> {
        for v in [a, b] {
            if v >= self.nvars {
                return Err(Error::IndexOutOfRange { index: v, nvars: self.nvars });
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, m)| {
                let mut k = k.clone();
                k.swap(a, b);
                (k, m.clone())
            })
            .collect();
        Ok(LaurentMatrix { size: self.size, nvars: self.nvars, terms })
    }

    fn check_compatible(&self, other: &LaurentMatrix) -> Result<()> {
        if self.size != other.size || self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "({}x{}, {} vars) vs ({}x{}, {} vars)",
                self.size, self.size, self.nvars, other.size, other.size, other.nvars
            )));
        }
        Ok(())
    }

    /// Product by coefficient convolution.
    pub fn mul(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        self.check_compatible(other)?;
        let mut out = LaurentMatrix::zero(self.size, self.nvars);
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                let k: Vec<i32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                out.add_term(k, a * b)?;
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn add(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, a) in &other.terms {
            out.add_term(k.clone(), a.clone())?;
        }
        out.normalize();
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> LaurentMatrix {
        let mut out = LaurentMatrix {
            size: self.size,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.clone(), a * faer::Scale(c))).collect(),
        };
        out.normalize();
        out
    }

    /// The symbol `z -> f(z)^*` on the torus: `A_k -> A_{-k}^*`.
    pub fn dagger(&self) -> LaurentMatrix {
        let terms = self
            .terms
            .iter()
            .map(|(k, a)| (k.iter().map(|e| -e).collect(), adjoint(a)))
            .collect();
        LaurentMatrix { size: self.size, nvars: self.nvars, terms }
    }

    /// `U A_k V` for every coefficient; `U`, `V` may be rectangular.
    pub fn sandwich(&self, u: &CMat, v: &CMat) -> Result<LaurentMatrix> {
        if u.ncols() != self.size || v.nrows() != self.size || u.nrows() != v.ncols() {
            return Err(Error::DimensionMismatch("sandwich factors do not fit".into()));
        }
        let mut out = LaurentMatrix::zero(u.nrows(), self.nvars);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), u * a * v)?;
        }
        out.normalize();
        Ok(out)
    }

    /// Block chiral Hamiltonian `[[0, h^*], [h, 0]]`.
    pub fn chiral_hamiltonian(h: &LaurentMatrix) -> LaurentMatrix {
        let n = h.size;
        let hd = h.dagger();
        let mut out = LaurentMatrix::zero(2 * n, h.nvars);
        for (k, a) in &h.terms {
            let mut m = zeros(2 * n, 2 * n);
            m.as_mut().submatrix_mut(n, 0, n, n).copy_from(a);
            out.add_term(k.clone(), m).expect("shape");
        }
        for (k, a) in &hd.terms {
            let mut m = zeros(2 * n, 2 * n);
            m.as_mut().submatrix_mut(0, n, n, n).copy_from(a);
            out.add_term(k.clone(), m).expect("shape");
        }
        out.normalize();
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch("direct sum of symbols in different variables".into()));
        }
        let (n, m) = (self.size, other.size);
        let mut out = LaurentMatrix::zero(n + m, self.nvars);
        for (k, a) in &self.terms {
            let mut b = zeros(n + m, n + m);
            b.as_mut().submatrix_mut(0, 0, n, n).copy_from(a);
            out.add_term(k.clone(), b)?;
        }
        for (k, a) in &other.terms {
            let mut b = zeros(n + m, n + m);
            b.as_mut().submatrix_mut(n, n, m, m).copy_from(a);
            out.add_term(k.clone(), b)?;
        }
        Ok(out)
    }
}

/// Block-diagonal matrix sum used alongside [`LaurentMatrix::direct_sum`].
pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = zeros(n + m, n + m);
    out.as_mut().submatrix_mut(0, 0, n, n).copy_from(a);
    out.as_mut().submatrix_mut(n, n, m, m).copy_from(b);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryData {
    pub inversion: CMat,
    pub chiral: Option<CMat>,
}

impl SymmetryData {
    /// Checks that `I` (and `Π`) are Hermitian unitaries and that `ΠI = -IΠ`.
    pub fn validate(&self) -> Result<()> {
        let n = self.inversion.nrows();
        check_hermitian_unitary(&self.inversion, "inversion")?;
        if let Some(p) = &self.chiral {
            if p.nrows() != n {
                return Err(Error::DimensionMismatch("chiral and inversion sizes differ".into()));
            }
            check_hermitian_unitary(p, "chiral")?;
            let d = max_abs(&(p * &self.inversion + &self.inversion * p));
            if d > COEFF_TOL {
                return Err(Error::SymmetryViolation(format!(
                    "chiral and inversion operators do not anticommute (defect {d:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.inversion.nrows()
    }

    pub fn direct_sum(&self, other: &SymmetryData) -> SymmetryData {
        let chiral = match (&self.chiral, &other.chiral) {
            (Some(a), Some(b)) => Some(block_diag(a, b)),
            _ => None,
        };
        SymmetryData { inversion: block_diag(&self.inversion, &other.inversion), chiral }
    }
}

fn check_hermitian_unitary(m: &CMat, what: &str) -> Result<()> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch(format!("{what} operator is not square")));
    }
    let herm = max_abs(&(m - m.adjoint()));
    let unit = max_abs(&(m * m - identity(n)));
    if herm > COEFF_TOL || unit > COEFF_TOL {
        return Err(Error::SymmetryViolation(format!(
            "{what} operator is not a Hermitian unitary (defects {herm:.3e}, {unit:.3e})"
        )));
    }
    Ok(())
}

/// A one-parameter family `θ -> H_θ(z, w)` describing a 3D model.
#[derive(Debug, Clone)]
pub enum Family3D {
    /// Three-variable symbol in `(z, w, t)`, sliced at `t = e^{iθ}`.
    Laurent3(LaurentMatrix),
    /// `H cos θ - Π sin θ` for `|θ| <= π/2` and `ε cos θ - Π sin θ` otherwise.
    Suspension { h: LaurentMatrix, epsilon: CMat, chiral: CMat },
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

impl Family3D {
    pub fn size(&self) -> usize {
        match self {
            Family3D::Laurent3(m) => m.size(),
            Family3D::Suspension { h, .. } => h.size(),
        }
    }

    pub fn slice(&self, theta: f64) -> Result<LaurentMatrix> {
        match self {
            Family3D::Laurent3(m) => m.fix_variable(2, cis(theta)),
            Family3D::Suspension { h, epsilon, chiral } => {
                let t = wrap_angle(theta);
                let (c, s) = (C64::new(t.cos(), 0.0), C64::new(-t.sin(), 0.0));
                let mass = LaurentMatrix::constant(chiral * faer::Scale(s), 2)?;
                let base = if t.abs() <= FRAC_PI_2 {
                    h.scale(c)
                } else {
                    LaurentMatrix::constant(epsilon * faer::Scale(c), 2)?
                };
                base.add(&mass)
            }
        }
    }

    /// Whether the slice at `theta` is independent of `(z, w)`.
    pub fn slice_is_constant(&self, theta: f64) -> bool {
        match self {
            Family3D::Laurent3(m) => m.terms().all(|(k, _)| k[0] == 0 && k[1] == 0),
            Family3D::Suspension { h, .. } => {
                let t = wrap_angle(theta);
                t.abs() > FRAC_PI_2 || h.is_constant() || t.cos().abs() < DROP_TOL
            }
        }
    }

    /// Inversion-fixed angles.
    pub fn fixed_thetas(&self) -> [f64; 2] {
        [0.0, PI]
    }

    /// Validates the symmetry constraints a family must meet.
    pub fn validate(&self, s: &SymmetryData) -> Result<()> {
        match self {
            Family3D::Laurent3(m) => {
                let h = m.check_hermitian_on_torus();
                if !h.ok {
                    return Err(Error::NotHermitian(h.defect));
                }
                let i = m.check_inversion(s);
                if !i.ok {
                    return Err(Error::SymmetryViolation(format!(
                        "inversion defect {:.3e}",
                        i.defect
                    )));
                }
                Ok(())
            }
            Family3D::Suspension { h, epsilon, chiral } => {
                let sym = SymmetryData { inversion: s.inversion.clone(), chiral: Some(chiral.clone()) };
                sym.validate()?;
                let eps = LaurentMatrix::constant(epsilon.clone(), 2)?;
                for (what, m) in [("H", h), ("epsilon", &eps)] {
                    let herm = m.check_hermitian_on_torus();
                    if !herm.ok {
                        return Err(Error::NotHermitian(herm.defect));
                    }
                    let c = m.check_chiral(&sym)?;
                    if !c.ok {
                        return Err(Error::SymmetryViolation(format!(
                            "{what} does not anticommute with the chiral operator (defect {:.3e})",
                            c.defect
                        )));
                    }
                    let i = m.check_inversion(&sym);
                    if !i.ok {
                        return Err(Error::SymmetryViolation(format!(
                            "{what} inversion defect {:.3e}",
                            i.defect
                        )));
                    }
                }
                if crate::linalg::inverse(epsilon).is_none() {
                    return Err(Error::SymmetryViolation("epsilon is singular".into()));
                }
                Ok(())
            }
        }
    }
}

/// Builds the suspension family of a chiral 2D model.
pub fn suspend(h: &LaurentMatrix, s: &SymmetryData, epsilon: &LaurentMatrix) -> Result<Family3D> {
    if !epsilon.is_constant() || epsilon.nvars() != 2 {
        return Err(Error::SymmetryViolation("epsilon must be a constant 2-variable symbol".into()));
    }
    let chiral = s.chiral.clone().ok_or(Error::MissingChiral)?;
    let eps = epsilon.coeff(&[0, 0]).cloned().unwrap_or_else(|| zeros(h.size(), h.size()));
    let fam = Family3D::Suspension { h: h.clone(), epsilon: eps, chiral };
    fam.validate(s)?;
    Ok(fam)
}
