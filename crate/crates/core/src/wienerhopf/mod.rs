//! Canonical Wiener-Hopf factorization of 1-variable symbols, half-plane gap
//! certification and the gap-preserving extension of 2-variable symbols.

mod extension;
mod factor;
mod gap;

pub use extension::{extend_bulk, ExtendedSymbol, CIRCLE_TOL};
pub use factor::{
    extend_1var, factorize_left, factorize_right, partial_index_report, toeplitz_dense, toeplitz_section,
    winding_det, CanonicalFactorization, Handedness, PartialIndexReport,
};
pub use gap::{
    assumption_check_2d, assumption_check_3d, edge_symbol, half_plane_gap, GapEntry, GapReport, GapStatus,
};
