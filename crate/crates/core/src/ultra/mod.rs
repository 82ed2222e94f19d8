//! Tracial ultraproducts at finite truncation: representative sequences,
//! tail behaviour, and per-index lifting of projections, partial
//! isometries and matrix units.

mod extend;
mod lift;
mod seq;

pub use extend::{bratteli_lift, extend_matrix_units, extend_units, unit_generator, Inclusion};
pub use lift::{
    dyadic_grid, lift_chain, lift_partial_isometry, lift_projection_trace, SpectralChain,
    POLAR_CUTOFF,
};
pub use seq::{diagonal_completion, tail_p_norm, RepSequence, TailFilter, TailProfile};
