//! DOA estimation for mixtures of single-transmission (SST) and
//! dual-transmission (DST) polarized sources received by a uniform linear
//! array of tripole sensors.
//!
//! An SST source emits one signal with one polarization state; a DST source
//! emits two sub-signals from the same direction with two distinct
//! polarization states. Classic subspace search over the joint
//! direction-polarization manifold can locate SST sources but is inherently
//! ambiguous for DST sources: every polarization at a DST direction produces
//! a spectral peak. This crate implements the two-step workaround: a
//! determinant (rank-reduction) spectrum locates directions where the 2x2
//! projected test matrix drops rank (SST and DST alike), while a norm
//! spectrum peaks only where the test matrix vanishes entirely, which singles
//! out DST directions and misses SST ones. Combining the two yields labeled
//! direction estimates, plus closed-form polarization recovery for the SST
//! peaks.
//!
//! Modules:
//! - [`manifold`]: steering vectors, angular matrices, joint manifold vectors.
//! - [`synthesis`]: scenario description, snapshot generation, exact covariance.
//! - [`subspace`]: sample covariance and signal/noise eigenstructure split.
//! - [`estimators`]: spectral cost functions, peak finding, two-step pipeline.
//! - [`evaluation`]: Monte-Carlo RMSE sweeps and the numeric Cramer-Rao bound.
//! - [`io`]: scenario files (TOML) and snapshot matrix files (binary/CSV).

pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod io;
pub mod manifold;
pub mod subspace;
pub mod synthesis;

pub use error::{Error, Result};
pub use estimators::{
    dst_spectrum, find_peaks, music4d_slice, music4d_value, sst_polarization,
    sst_polarization_grid, sst_spectrum, test_matrix, two_step_estimate,
    two_step_estimate_with, two_step_from_covariance, GridSpec, LabeledPeak, MatrixNorm,
    MusicValue, PeakList, PeakSet, SpectrumGrid, TestMatrix2x2, TwoStepConfig,
};
pub use evaluation::{
    covariance_gradient, crb_sweep, fisher_information, numeric_crb, run_sweep, CrbTable,
    ParamId, ParamKind, RmseTable, SweepConfig,
};
pub use manifold::{
    angular_matrix, angular_polarization_vector, direction_matrix, joint_steering_matrix,
    joint_steering_vector, polarization_vector, steering_vector, ArrayGeometry, Dir, Pol,
};
pub use subspace::{decompose, sample_covariance, SubspacePair};
pub use synthesis::{
    exact_covariance, generate_snapshots, Scenario, SignalModel, SnapshotMatrix,
    SourceDescriptor,
};

/// Transmission mode of a source, or the classification label of a peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SourceKind {
    /// Single signal transmission: one signal, one polarization state.
    #[serde(rename = "SST")]
    Sst,
    /// Dual signal transmission: two sub-signals, same direction, distinct
    /// polarization states.
    #[serde(rename = "DST")]
    Dst,
}

impl std::fmt::Display for SourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourceKind::Sst => write!(f, "SST"),
            SourceKind::Dst => write!(f, "DST"),
        }
    }
}

/// Convert a power ratio from decibels to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
