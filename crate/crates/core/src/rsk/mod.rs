//! Monte Carlo realization of coupled height functions through RSK.

pub mod field;
pub mod identity;
pub mod insertion;
pub mod sampler;
pub mod stats;

pub use field::PoissonField;
pub use identity::{moment_identity, moment_identity_check, MomentIdentity};
pub use insertion::{rsk_shape, RskTableau};
pub use sampler::{
    sample_batch, sample_field, sample_joint, shape_for_subset, to_ndjson, HeightSample, ReplicaRecord,
    SamplerConfig,
};
pub use stats::{empirical_covariance, Centering, CovarianceEstimate, Estimate, MomentEstimator, Observable, ObservationTable};
