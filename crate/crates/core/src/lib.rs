//! Depth-based goodness-of-fit and two-sample tests.
//!
//! Multivariate data are reduced to univariate quantities through a
//! statistical depth function (Tukey half-space or zonoid depth). For the
//! one-sample problem the depth of each observation is transformed by the
//! empirical depth distribution of a large reference sample from the null,
//! which is uniform on `[0, 1]` under the null; classical uniformity
//! statistics then apply. For the two-sample problem the ranks of the joint
//! sample depths feed two-sample KS, CvM and AD statistics.

pub mod datasets;
pub mod depth;
pub mod distributions;
pub mod error;
pub mod gof;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod seed;
pub mod two_sample;
pub mod uniformity;

pub use depth::{depth_profile, gn_transform, gn_transform_many, DepthFamily, DepthKind, DepthVector, Strategy, UnitSample};
pub use error::{Error, Result};
pub use matrix::DataMatrix;
pub use seed::Seed;
