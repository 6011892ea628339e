//! Matrix exponential via double-exponential quadrature of a resolvent
//! integral representation, with Talbot contour and Padé references.

pub mod autoquad;
pub mod eigen;
pub mod error;
pub mod lu;
pub mod matgen;
pub mod matrix;
pub mod mm;
pub mod quadrature;
pub mod reference;
pub mod talbot;
pub mod transform;
pub mod truncation;

pub use autoquad::{
    estimate_rate, expm_auto, next_mesh, predict_error, AutoQuadConfig, AutoQuadOutcome,
    AutoQuadReport, RoundRecord,
};
pub use eigen::{eigenvalues, rightmost_eigenvalue, Spectrum};
pub use error::{Error, Result};
pub use lu::{lu_factor, lu_solve, LuFactors};
pub use matgen::{
    convection_diffusion, randsvd, test_matrix, test_matrix_parts, ConvDiffSpec, RandSvdSpec,
    TestMatrixParts,
};
pub use matrix::{ComplexMatrix, Norm2Estimate};
pub use mm::{
    format_array_complex, format_coordinate_real, read_matrix, read_matrix_str,
    write_array_complex, write_coordinate_real,
};
pub use quadrature::{
    expm_de, expm_de_core, expm_de_scalar, quad_term, EvalMode, QuadResult, DEFAULT_SIGMA,
};
pub use reference::{expm_pade, expm_taylor, PadeConfig, DEFAULT_TAYLOR_TERMS};
pub use talbot::{contour_deriv, contour_point, expm_talbot, TalbotParams};
pub use transform::{make_params, phi, phi_deriv, u_dev, DeParams, TransformVariant};
pub use truncation::{
    get_interval, get_interval_with_terms, left_tail, right_tail, small_x_precondition_holds,
    verify_prop1_bound, TruncationInterval, DEFAULT_TAIL_TERMS,
};
