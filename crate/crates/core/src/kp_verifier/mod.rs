//! Operator-level verification of the determinant formulas and bilinear
//! identities satisfied by the Gaudin T-operators.
//!
//! Every check is generic over the scalar ring. Over [`Rational`](crate::scalar::Rational)
//! a check passes only when the residual operator is literally zero; over
//! `f64` the largest residual entry is compared with a relative tolerance.

pub mod fay;
pub mod identities;
pub mod master;
pub mod result;
pub mod suite;

pub use fay::{check_fay, check_fay_general, check_masterdet, check_sign_flip, ShiftedFamily};
pub use identities::{
    check_cbr, check_cbr_leading, check_closed_forms, check_commutativity, check_exchange, check_giambelli,
    check_limit_lemma, check_plucker, check_rank1, operator_det, rank1_matrix,
};
pub use master::{
    check_derivative_oracle, check_master_commutativity, check_master_diff, check_master_expansion,
    check_master_generating, check_shift_covariance,
};
pub use result::{CheckResult, Component, Recorder, FLOAT_TOLERANCE};
pub use suite::{run_check, run_suite, Sampler, SuiteOptions, KP_CHECKS};
