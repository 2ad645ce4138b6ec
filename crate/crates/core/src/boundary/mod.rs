//! Corner and hinge invariants: quarter-plane truncations, chiral zero-mode
//! counts, hinge spectral flow and the 3-sphere winding oracle.

mod corner;
mod flow;
mod theorem;
mod truncation;
mod winding;

pub use corner::{corner_index, corner_index_at, corner_indices, corner_indices_at, zero_modes, CornerCount, CornerOptions, CornerReport, ZeroModes};
pub use theorem::{
    theorem_check, BoundaryDiagnostics, BoundaryInvariants, CorrespondenceReport, Identities, Method, TheoremCheck, Timings,
    WindingAgreement,
};
pub use truncation::{truncate, Corner, QuarterTruncation};
pub use flow::{
    flow_options, spectral_flow, spectral_flows, spectral_flows_of, theta_grid, BranchPoint, Crossing, FlowOptions,
    FlowReport, HingeReport,
};
pub use winding::{
    chiral_basis, corner_windings, eval_conjugate_reading, off_diagonal_block, winding3, winding_raw, CornerWinding,
    WindingReport, WindingResult, CORNER_SIGN, ORIENTATION,
};
