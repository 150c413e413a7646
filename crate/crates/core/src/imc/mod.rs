//! Analog in-memory-computing simulation: differential conductance mapping,
//! programming noise, stochastic conductance drift, converter quantization,
//! and tiled matrix-vector multiplication.

pub mod config;
pub mod forward;
pub mod quant;
pub mod tile;

pub use config::{MappingScheme, RpuConfig};
pub use forward::{linear_forward, MappedLayer};
pub use quant::quantize;
pub use tile::{drift, map_weights, mvm, ProgrammedTile};
