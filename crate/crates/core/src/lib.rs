//! Lattice search for large values of damped sums over zeta zeros.
//!
//! The pipeline: ingest zero data ([`zeros`]), build the lattice and target
//! ([`mertens`]), reduce the basis ([`reduction`]), enumerate lattice points
//! near the target ([`enumeration`]), and evaluate each recovered `y` with
//! certified error bounds ([`evaluator`]).

pub mod ball;
pub mod enumeration;
pub mod error;
pub mod evaluator;
pub mod lattice;
pub mod mertens;
pub mod reduction;
pub mod zeros;

pub use enumeration::{
    enumerate_bdd, enumerate_svp, gaussian_estimate, linear_beta_profile, BddEnumeration, BddOptions, EnumCandidate,
    EnumStats, EnumTarget, PruningProfile,
};
pub use error::{Error, Result};
pub use evaluator::{
    correlation_report, eval_h, eval_partial, eval_qn, to_bound, CandidateReport, CorrelationInput, CorrelationReport,
    IntervalValue, QnTruncation,
};
pub use lattice::{determinant, exact_gram_schmidt, gram_schmidt, profile, BasisProfile, ExactGso, GramSchmidtData, LatticeBasis};
pub use mertens::{build_instance, predict_ranges, CandidateY, MertensInstance, MertensParams, PredictedRanges, Sign};
pub use reduction::{bkz_progressive, lll, size_reduce, BkzOutput, ReductionParams, SvpPruning, TransformationLog};
pub use zeros::{parse_zero_file, take_top, weight_dataset, Mode, WeightedZero, ZeroDataset, ZetaZero};

pub use rug;
