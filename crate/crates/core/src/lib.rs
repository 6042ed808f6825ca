//! Exact nonlinear filtering for finite-state hidden Markov models, the
//! signal conditioned on its observations, and filter stability experiments.
//!
//! All recursions are exact (no sampling); [`oracle`] recomputes the same
//! quantities by brute-force path enumeration for cross-checking.

pub mod acceptance;
pub mod config;
pub mod environment;
pub mod error;
pub mod filtering;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod stability;

pub use environment::{
    backward_table, beta_curve, conditional_kernels, conditioned_marginal, irreducibility_check,
    merge_distance, pinned_smoother, submartingale_check, BackwardTable, BetaCurve, CoupledKernel,
    EnvironmentKernel, EnvironmentKernelSequence, PinnedSmoother,
};
pub use error::{Error, Result};
pub use filtering::{
    filter_init, filter_run, filter_step, obs_log_likelihood_ratio, path_log_likelihood, predictor,
    relative_entropy, FilterTrajectory,
};
pub use model::{
    Distribution, HmmModel, Observation, ObservationChannel, ObservationPath, TransitionKernel,
};
pub use oracle::{expectation, joint_table, oracle_conditional, JointTable};
pub use scenario::{run_scenario, ScenarioOutcome, ScenarioSpec};
pub use stability::{
    lebesgue_split, rn_derivative, singular_mass, split_filter_identity_check, stability_curve,
    tv_identity_check, LebesgueSplit, StabilityCurve,
};
