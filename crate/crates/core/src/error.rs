use std::fmt;

/// Which piece of the glued space `X` a failing factorization belonged to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Patch {
    /// `D+ x T`: `w` frozen on the circle, `z` in the unit disk.
    ZPlus,
    /// `D- x T`: `w` frozen, `z` outside the unit disk.
    ZMinus,
    /// `T x D+`: `z` frozen, `w` in the unit disk.
    WPlus,
    /// `T x D-`: `z` frozen, `w` outside the unit disk.
    WMinus,
}

impl fmt::Display for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Patch::ZPlus => "D+xT",
            Patch::ZMinus => "D-xT",
            Patch::WPlus => "TxD+",
            Patch::WMinus => "TxD-",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variable index {index} out of range for a {nvars}-variable symbol")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("symbol has no chiral operator")]
    MissingChiral,
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("symbol is not Hermitian on the torus (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("determinant vanishes on the unit circle (min |det| = {0:.3e})")]
    SingularOnCircle(f64),
    #[error("phase increment of det exceeds pi/2 after grid refinement")]
    PhaseJump,
    #[error("no canonical factorization: {0}")]
    NonCanonical(String),
    #[error("factorization residual {residual:.3e} above tolerance {tol:.3e}")]
    IllConditioned { residual: f64, tol: f64 },
    #[error("extension on patch {patch} at frozen angle {frozen:.6}: {source}")]
    Patch {
        patch: Patch,
        frozen: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("point ({0}) is not in the glued space X")]
    OutsideX(String),
    #[error("gap certification undecided: {0}")]
    Undecided(String),

    #[error("gapless at fixed point {label} (|E| = {energy:.3e})")]
    GaplessAtFixedPoint { label: String, energy: f64 },
    #[error("H does not commute with I at fixed point {label} (defect {defect:.3e})")]
    NonCommuting { label: String, defect: f64 },
    #[error("indicator mu = {0} is odd; inversion data inconsistent")]
    OddIndicator(u8),

    #[error("hopping range {range} too large for side length {side}")]
    RangeTooLarge { range: i32, side: usize },
    #[error("gap assumption violated: {0}")]
    GapViolation(String),
    #[error("corner count changed with system size: {0}")]
    UnstableCount(String),
    #[error("lost track of a hinge branch near theta = {theta:.4}")]
    TrackingLost { theta: f64 },
    #[error("winding quadrature unresolved (raw value {raw:.4})")]
    QuadratureUnresolved { raw: f64 },

    #[error("model schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("linear algebra: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
