//! Model files, the built-in model zoo and seeded random models.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::laurent::{Family3D, LaurentMatrix, SymmetryCheck, SymmetryData};
use crate::linalg::{identity, zeros, CMat, C64, ONE, ZERO};
use crate::report::round_value;

type MatJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i32>,
    matrix: MatJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SymmetryJson {
    inversion: MatJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chiral: Option<MatJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilyJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<MatJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<Vec<TermJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
    size: usize,
    vars: Vec<String>,
    terms: Vec<TermJson>,
    symmetry: SymmetryJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<FamilyJson>,
}

/// What a model file describes.
#[derive(Debug, Clone)]
pub enum ModelKind {
    /// A 2D Hamiltonian symbol.
    Planar(LaurentMatrix),
    /// The straight path `r -> H + r Δ`, `r ∈ [0, 1]`; the model proper is `r = 0`.
    LinearPath { base: LaurentMatrix, delta: LaurentMatrix },
    /// A 3D family over the hinge angle.
    Family(Family3D),
    /// A map used only as a winding-number reference; not a Hamiltonian.
    Reference(LaurentMatrix),
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub model: String,
    pub kind: &'static str,
    pub hermitian: Option<SymmetryCheck>,
    pub inversion: Option<SymmetryCheck>,
    pub chiral: Option<SymmetryCheck>,
    /// Problem with the symmetry operators themselves, if any.
    pub operators: Option<String>,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub name: String,
    pub provenance: String,
    pub kind: ModelKind,
    pub symmetry: SymmetryData,
}

impl ModelBundle {
    pub fn dim(&self) -> usize {
        match &self.kind {
            ModelKind::Family(_) => 3,
            _ => 2,
        }
    }

    pub fn size(&self) -> usize {
        self.symmetry.size()
    }

    /// The 2D Hamiltonian, if this is a 2D model.
    pub fn planar(&self) -> Option<&LaurentMatrix> {
        match &self.kind {
            ModelKind::Planar(h) | ModelKind::LinearPath { base: h, .. } => Some(h),
            _ => None,
        }
    }

    pub fn family(&self) -> Option<&Family3D> {
        match &self.kind {
            ModelKind::Family(f) => Some(f),
            _ => None,
        }
    }

    pub fn family_kind(&self) -> &'static str {
        match &self.kind {
            ModelKind::Planar(_) => "planar",
            ModelKind::LinearPath { .. } => "linear-path",
            ModelKind::Family(Family3D::Laurent3(_)) => "laurent3",
            ModelKind::Family(Family3D::Suspension { .. }) => "suspension",
            ModelKind::Reference(_) => "reference-map",
        }
    }

    /// Point on the linear path; `None` for other kinds.
    pub fn path_at(&self, r: f64) -> Option<Result<LaurentMatrix>> {
        match &self.kind {
            ModelKind::LinearPath { base, delta } => Some(base.add(&delta.scale(C64::new(r, 0.0)))),
            _ => None,
        }
    }

    /// Runs the load-time symmetry validation.
    pub fn validate(&self) -> Result<()> {
        if let ModelKind::Reference(_) = self.kind {
            return Ok(());
        }
        self.symmetry.validate()?;
        match &self.kind {
            ModelKind::Planar(h) => validate_planar(h, &self.symmetry, "H"),
            ModelKind::LinearPath { base, delta } => {
                validate_planar(base, &self.symmetry, "H")?;
                validate_planar(delta, &self.symmetry, "path direction")
            }
            ModelKind::Family(f) => f.validate(&self.symmetry),
            ModelKind::Reference(_) => Ok(()),
        }
    }

    /// Every symmetry defect of the model, without failing on the first.
    pub fn symmetry_report(&self) -> SymmetryReport {
        let operators = self.symmetry.validate().err().map(|e| e.to_string());
        let symbol = match &self.kind {
            ModelKind::Planar(h) | ModelKind::LinearPath { base: h, .. } => Some(h),
            ModelKind::Family(Family3D::Laurent3(m)) => Some(m),
            ModelKind::Family(Family3D::Suspension { h, .. }) => Some(h),
            ModelKind::Reference(_) => None,
        };
        let (hermitian, inversion, chiral) = match symbol {
            Some(h) => (
                Some(h.check_hermitian_on_torus()),
                Some(h.check_inversion(&self.symmetry)),
                h.check_chiral(&self.symmetry).ok(),
            ),
            None => (None, None, None),
        };
        let ok = operators.is_none()
            && [hermitian, inversion, chiral].iter().flatten().all(|c| c.ok)
            && self.validate().is_ok();
        SymmetryReport { model: self.name.clone(), kind: self.family_kind(), hermitian, inversion, chiral, operators, ok }
    }

    pub fn to_json(&self) -> Value {
        let (vars, terms, family) = match &self.kind {
            ModelKind::Planar(h) => (2, terms_json(h), None),
            ModelKind::Reference(h) => (
                h.nvars(),
                terms_json(h),
                Some(FamilyJson { kind: "reference-map".into(), epsilon: None, delta: None }),
            ),
            ModelKind::LinearPath { base, delta } => (
                2,
                terms_json(base),
                Some(FamilyJson {
                    kind: "linear-path".into(),
                    epsilon: None,
                    delta: Some(terms_json(delta)),
                }),
            ),
            ModelKind::Family(Family3D::Laurent3(m)) => (3, terms_json(m), None),
            ModelKind::Family(Family3D::Suspension { h, epsilon, .. }) => (
                2,
                terms_json(h),
                Some(FamilyJson {
                    kind: "suspension".into(),
                    epsilon: Some(mat_json(epsilon)),
                    delta: None,
                }),
            ),
        };
        let file = ModelFile {
            name: Some(self.name.clone()),
            provenance: Some(self.provenance.clone()),
            size: self.size(),
            vars: ["z", "w", "t"][..vars].iter().map(|s| s.to_string()).collect(),
            terms,
            symmetry: SymmetryJson {
                inversion: mat_json(&self.symmetry.inversion),
                chiral: self.symmetry.chiral.as_ref().map(mat_json),
            },
            family,
        };
        round_value(serde_json::to_value(file).expect("model serializes"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn validate_planar(h: &LaurentMatrix, s: &SymmetryData, what: &str) -> Result<()> {
    let herm = h.check_hermitian_on_torus();
    if !herm.ok {
        return Err(Error::NotHermitian(herm.defect));
    }
    let inv = h.check_inversion(s);
    if !inv.ok {
        return Err(Error::SymmetryViolation(format!(
            "{what}: inversion defect {:.3e} (I A_k I* != A_-k)",
            inv.defect
        )));
    }
    if s.chiral.is_some() {
        let ch = h.check_chiral(s)?;
        if !ch.ok {
            return Err(Error::SymmetryViolation(format!(
                "{what}: chiral defect {:.3e} (P A_k P* != -A_k)",
                ch.defect
            )));
        }
    }
    Ok(())
}

/// A matrix in the model-file encoding: rows of `[re, im]` pairs.
pub fn mat_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn mat_from_json(rows: &MatJson, n: usize, what: &str) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Schema(format!("{what}: expected a {n}x{n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn terms_json(m: &LaurentMatrix) -> Vec<TermJson> {
    m.terms().map(|(k, a)| TermJson { exp: k.clone(), matrix: mat_json(a) }).collect()
}

fn terms_from_json(terms: &[TermJson], n: usize, nvars: usize) -> Result<LaurentMatrix> {
    let mut parsed = Vec::with_capacity(terms.len());
    for t in terms {
        if t.exp.len() != nvars {
            return Err(Error::Schema(format!("term exponent {:?} does not have {nvars} entries", t.exp)));
        }
        parsed.push((t.exp.clone(), mat_from_json(&t.matrix, n, &format!("term {:?}", t.exp))?));
    }
    LaurentMatrix::from_terms(n, nvars, parsed)
}

/// Parses and validates a model from JSON text.
pub fn parse_model(text: &str, fallback_name: &str) -> Result<ModelBundle> {
    let bundle = parse_model_unchecked(text, fallback_name)?;
    bundle.validate()?;
    Ok(bundle)
}

/// Parses a model without the symmetry validation.
pub fn parse_model_unchecked(text: &str, fallback_name: &str) -> Result<ModelBundle> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let n = file.size;
    if n == 0 {
        return Err(Error::Schema("size must be positive".into()));
    }
    let nvars = file.vars.len();
    let expected = ["z", "w", "t"];
    if !(1..=3).contains(&nvars) || file.vars.iter().zip(expected).any(|(v, e)| v != e) {
        return Err(Error::Schema(format!("vars must be a prefix of [z, w, t], got {:?}", file.vars)));
    }
    let sym = SymmetryData {
        inversion: mat_from_json(&file.symmetry.inversion, n, "inversion")?,
        chiral: file.symmetry.chiral.as_ref().map(|c| mat_from_json(c, n, "chiral")).transpose()?,
    };
    let m = terms_from_json(&file.terms, n, nvars)?;
    let kind = match (&file.family, nvars) {
        (None, 2) => ModelKind::Planar(m),
        (None, 3) => ModelKind::Family(Family3D::Laurent3(m)),
        (Some(f), _) => match f.kind.as_str() {
            "reference-map" => ModelKind::Reference(m),
            "suspension" if nvars == 2 => {
                let eps = f
                    .epsilon
                    .as_ref()
                    .ok_or_else(|| Error::Schema("suspension family needs epsilon".into()))?;
                let chiral = sym.chiral.clone().ok_or(Error::MissingChiral)?;
                ModelKind::Family(Family3D::Suspension {
                    h: m,
                    epsilon: mat_from_json(eps, n, "epsilon")?,
                    chiral,
                })
            }
            "linear-path" if nvars == 2 => {
                let delta = f
                    .delta
                    .as_ref()
                    .ok_or_else(|| Error::Schema("linear-path family needs delta".into()))?;
                ModelKind::LinearPath { base: m, delta: terms_from_json(delta, n, 2)? }
            }
            other => {
                return Err(Error::Schema(format!("unsupported family kind {other:?} for {nvars} variables")))
            }
        },
        (None, _) => return Err(Error::Schema("a 1-variable symbol is not a model".into())),
    };
    let bundle = ModelBundle {
        name: file.name.unwrap_or_else(|| fallback_name.to_string()),
        provenance: file.provenance.unwrap_or_default(),
        kind,
        symmetry: sym,
    };
    Ok(bundle)
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    parse_model(&text, stem)
}

fn real(n: usize, entries: &[(usize, usize, f64)]) -> CMat {
    let mut m = zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = C64::new(v, 0.0);
    }
    m
}

/// `diag(1_n, -1_n)`.
pub fn block_sign(n: usize) -> CMat {
    CMat::from_fn(2 * n, 2 * n, |i, j| match (i == j, i < n) {
        (true, true) => ONE,
        (true, false) => -ONE,
        _ => ZERO,
    })
}

/// `[[0, 1_n], [1_n, 0]]`.
pub fn block_swap(n: usize) -> CMat {
    CMat::from_fn(2 * n, 2 * n, |i, j| if i + n == j || j + n == i { ONE } else { ZERO })
}

/// Chiral and inversion operators shared by all block models.
pub fn block_symmetry(n: usize) -> SymmetryData {
    SymmetryData { inversion: block_swap(n), chiral: Some(block_sign(n)) }
}

/// The 3x3 off-diagonal block `h(z, w)` of the worked 2D example.
pub fn example_h() -> LaurentMatrix {
    LaurentMatrix::from_terms(
        3,
        2,
        [
            (vec![1, 1], real(3, &[(0, 0, 1.0)])),
            (vec![0, 1], real(3, &[(0, 0, 1.0)])),
            (vec![1, 0], real(3, &[(0, 1, 1.0), (1, 0, 1.0)])),
            (vec![0, 0], real(3, &[(0, 1, -0.5), (1, 0, -0.5), (1, 2, 1.0), (2, 1, 1.0)])),
            (vec![1, -1], real(3, &[(1, 1, 1.0)])),
            (vec![0, -1], real(3, &[(1, 1, 0.5)])),
            (vec![-1, 0], real(3, &[(2, 2, 1.0)])),
        ],
    )
    .expect("example block")
}

/// `h_1 - h_0` for the deformation used to read off parities.
pub fn example_h_delta() -> LaurentMatrix {
    LaurentMatrix::from_terms(
        3,
        2,
        [
            (vec![0, 0], real(3, &[(0, 1, -0.5), (1, 0, -0.5), (1, 1, 1.0)])),
            (vec![0, -1], real(3, &[(1, 1, 0.5)])),
        ],
    )
    .expect("example deformation")
}

pub fn example_2d() -> ModelBundle {
    ModelBundle {
        name: "example-2d".into(),
        provenance: "worked 2D chiral inversion-symmetric example".into(),
        kind: ModelKind::Planar(LaurentMatrix::chiral_hamiltonian(&example_h())),
        symmetry: block_symmetry(3),
    }
}

pub fn example_2d_path() -> ModelBundle {
    ModelBundle {
        name: "example-2d-r".into(),
        provenance: "gapped deformation H_r = H + r (H_1 - H_0) of the worked 2D example".into(),
        kind: ModelKind::LinearPath {
            base: LaurentMatrix::chiral_hamiltonian(&example_h()),
            delta: LaurentMatrix::chiral_hamiltonian(&example_h_delta()),
        },
        symmetry: block_symmetry(3),
    }
}

pub fn example_3d() -> ModelBundle {
    let sym = block_symmetry(3);
    ModelBundle {
        name: "example-3d".into(),
        provenance: "suspension of the worked 2D example with epsilon = I".into(),
        kind: ModelKind::Family(Family3D::Suspension {
            h: LaurentMatrix::chiral_hamiltonian(&example_h()),
            epsilon: sym.inversion.clone(),
            chiral: sym.chiral.clone().expect("chiral"),
        }),
        symmetry: sym,
    }
}

pub fn trivial_eps() -> ModelBundle {
    let sym = block_symmetry(3);
    ModelBundle {
        name: "trivial-eps".into(),
        provenance: "constant symbol epsilon = I".into(),
        kind: ModelKind::Planar(LaurentMatrix::constant(sym.inversion.clone(), 2).expect("constant")),
        symmetry: sym,
    }
}

/// `g(z, w) = [[z, -w^{-1}], [w, z^{-1}]]`; negative powers are read as
/// conjugates off the torus, giving the standard degree-one map on the 3-sphere.
pub fn winding_reference() -> ModelBundle {
    let e = |i, j, v| real(2, &[(i, j, v)]);
    let g = LaurentMatrix::from_terms(
        2,
        2,
        [
            (vec![1, 0], e(0, 0, 1.0)),
            (vec![0, -1], e(0, 1, -1.0)),
            (vec![0, 1], e(1, 0, 1.0)),
            (vec![-1, 0], e(1, 1, 1.0)),
        ],
    )
    .expect("reference map");
    ModelBundle {
        name: "winding-ref".into(),
        provenance: "degree-one reference map for the 3-sphere winding integrator".into(),
        kind: ModelKind::Reference(g),
        symmetry: SymmetryData { inversion: identity(2), chiral: None },
    }
}

/// Random chiral block model `[[0, h^*], [h, 0]]`, symmetric under the block
/// inversion `[[0, 1], [1, 0]]` because every coefficient of `h` is Hermitian.
///
/// `h = V h_0 V^* + s δ` with `V` a random unitary, `δ` random Hermitian
/// hoppings at exponents in `{-1, 0, 1}^2` and `s` small. For `n >= 3` the
/// base `h_0` is the worked example's block plus an on-site gapped remainder,
/// so corner modes survive; for `n < 3` it is on-site only.
pub fn random_block_model(n: usize, seed: u64) -> ModelBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut herm = |scale: f64| {
        let mut m = zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(scale * rng.random_range(-1.0..1.0), 0.0);
            for j in 0..i {
                let v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    };
    let (_, v) = crate::linalg::eigh(&herm(1.0)).expect("eigh of a random Hermitian matrix");
    let mut onsite = herm(0.0);
    let (lo, hi) = if n >= 3 { (3, n) } else { (0, n) };
    let masses = herm(1.0);
    for i in lo..hi {
        // |m| in [0.8, 1.5], random sign
        let m = masses[(i, i)].re;
        onsite[(i, i)] = C64::new(m.signum() * (0.8 + 0.7 * m.abs()), 0.0);
    }
    let noise_scale = 0.02 + 0.04 * herm(1.0)[(0, 0)].re.abs();
    let mut base = LaurentMatrix::constant(onsite, 2).expect("on-site");
    if n >= 3 {
        let ex = example_h();
        let padded = LaurentMatrix::from_terms(
            n,
            2,
            ex.terms().map(|(k, a)| (k.clone(), CMat::from_fn(n, n, |i, j| if i < 3 && j < 3 { a[(i, j)] } else { ZERO }))),
        )
        .expect("padded block");
        base = base.add(&padded).expect("same size");
    }
    let base = base.sandwich(&v, &crate::linalg::adjoint(&v)).expect("unitary conjugation");
    let mut terms = Vec::new();
    for kz in -1..=1 {
        for kw in -1..=1 {
            terms.push((vec![kz, kw], herm(noise_scale)));
        }
    }
    let noise = LaurentMatrix::from_terms(n, 2, terms).expect("random block");
    let h = base.add(&noise).expect("same size");
    ModelBundle {
        name: format!("random-{}-{seed}", 2 * n),
        provenance: format!("ChaCha8 seed {seed}, block size {n}"),
        kind: ModelKind::Planar(LaurentMatrix::chiral_hamiltonian(&h)),
        symmetry: block_symmetry(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zoo_models_validate() {
        for m in [example_2d(), example_2d_path(), example_3d(), trivial_eps(), winding_reference()] {
            m.validate().unwrap_or_else(|e| panic!("{}: {e}", m.name));
        }
        for seed in 0..5 {
            random_block_model(2, seed).validate().unwrap();
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        for m in [example_2d(), example_2d_path(), example_3d(), trivial_eps(), winding_reference()] {
            let text = serde_json::to_string(&m.to_json()).unwrap();
            let back = parse_model(&text, "x").unwrap();
            assert_eq!(back.to_json(), m.to_json());
            assert_eq!(back.family_kind(), m.family_kind());
        }
    }

    #[test]
    fn anticommutation_is_enforced() {
        let mut m = example_2d();
        m.symmetry.chiral = Some(identity(6));
        let text = serde_json::to_string(&m.to_json()).unwrap();
        assert!(matches!(parse_model(&text, "x"), Err(Error::SymmetryViolation(_))));
    }
}
