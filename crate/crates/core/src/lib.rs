//! Hyperbox-based mixture regression for fed-batch culture time series.
//!
//! The crate clusters scaled inputs into axis-aligned hyperboxes, fits one
//! affine expert per box with a single least-squares solve, and blends the
//! experts by normalized fuzzy membership. Around that model it provides
//! culture-grouped cross-validation, θ tuning, correlation-ordered feature
//! selection, windowing of long-format culture tables and a synthetic
//! culture generator.

pub mod data;
pub mod error;
pub mod hyperbox;
pub mod parallel;
pub mod regressor;
pub mod selection;

pub use error::{HmrError, Result};
pub use hyperbox::{cluster, ClusterConfig, Hyperbox, MembershipParams};
pub use parallel::Jobs;
pub use regressor::{HmrModel, LocalExpert};
