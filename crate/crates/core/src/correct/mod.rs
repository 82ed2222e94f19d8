//! Correctors: approximate solutions in, exact solutions nearby out.

mod basic;
mod compose;
mod family;
mod normals;
mod two_proj;
mod units;

pub use basic::{
    correct_partial_isometry, correct_projection, correct_resolution, correct_unitary,
    partial_isometry_defect, resolution_defect, unitary_defect,
};
pub use compose::{
    assemble_blocks, correct_blockwise, correct_direct_sum, extract_blocks, glue, DirectSum,
};
pub use family::{rel_resolution, CorrectorFamily};
pub use normals::{
    commutation_defect, correct_commuting_normals, correct_haar, joint_diagonalize,
    single_generator, CommutingNormals, Interpolant, JointDiagonalization,
};
pub use two_proj::{correct_two_projections, rel_two_projections};
pub use units::{
    correct_matrix_units, correct_tensor, matrix_generator, units_from_generator,
    MatrixUnitSystem,
};
