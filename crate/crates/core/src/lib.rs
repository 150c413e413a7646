//! Hardware-aware architecture search for analog in-memory computing.
//!
//! The crate is organized in five layers:
//!
//! * [`space`] — the block-wise convolutional search space: genome codec,
//!   Latin hypercube sampling, mutation, and static accounting (parameters,
//!   depth, tile mapping).
//! * [`imc`] — a simulated analog crossbar: differential conductance
//!   mapping, programming noise, conductance drift, converter quantization,
//!   and tiled matrix-vector products.
//! * [`eval`] — fitness backends producing per-architecture accuracy at
//!   drift time points across trials, plus the derived robustness metrics.
//! * [`surrogate`] — a gradient-boosted tree ensemble trained with a
//!   pairwise hinge ranking loss, plus regressors for the robustness
//!   metrics, used in place of full evaluations during search.
//! * [`search`] — the constrained evolutionary loop: LHS initialization,
//!   surrogate-ranked selection, mutation, and periodic ground-truth
//!   checkpoints with surrogate fine-tuning.

pub mod error;
pub mod eval;
pub mod imc;
pub mod search;
pub mod seeds;
pub mod space;
pub mod surrogate;

pub use error::{Error, Result};
pub use space::SCHEMA_VERSION;
