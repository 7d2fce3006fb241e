//! Monte Carlo for the Feynman–Kac semigroup `p^μ_t f(x) = E_x[e^{A_t} f(X_t)]`
//! with bounded potentials, and its matrix counterpart on finite models.

pub mod estimate;
pub mod sampler;
pub mod semigroup;
pub mod walks;

pub use estimate::{
    batch_estimate, excessiveness_check, feynman_kac_estimate, simulate_batch, ExcessivenessReport,
    FkEstimate, PathBatch,
};
pub use sampler::{
    sample_componentwise_increment, sample_positive_stable, sample_stable_increment,
    sample_symmetric_stable,
};
pub use semigroup::{semigroup_apply, Semigroup};
pub use walks::{
    ChainWalk, PathSampler, StableWalk, TruncatedPower, DEFAULT_DT_FRACTION, WEIGHT_GUARD,
};
