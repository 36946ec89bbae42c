//! Exact and Monte Carlo analysis of a two-stage selection pipeline: an
//! algorithm ranks `n` items and shows its top `k`; a human, independent of or
//! anchored on the algorithm, picks one of them.
//!
//! - [`perm`]: permutations, Kendall-tau distance, enumeration.
//! - [`mallows`]: Mallows and anchored Mallows models.
//! - [`rum`]: Gaussian random utility model.
//! - [`pipeline`]: the selection protocol, exact oracle and Monte Carlo.
//! - [`events`]: good/bad pair classification and the best-item bijection.
//! - [`closed_form`]: three-item closed forms and complementarity regions.
//! - [`experiment`]: figure runners, verification suite, config and output.

pub mod closed_form;
pub mod error;
pub mod events;
pub mod experiment;
pub mod mallows;
pub mod perm;
pub mod pipeline;
pub mod rum;

pub use error::{Error, Result};
pub use mallows::{AnchorWeight, MallowsSpec};
pub use perm::{ItemId, KendallDistance, Permutation};
pub use pipeline::{NoiseModel, PipelineConfig, SuccessEstimate};
