//! The block-wise convolutional search space: types, codec, sampling,
//! mutation, and static accounting.

pub mod count;
pub mod fixtures;
pub mod lhs;
pub mod mutate;
pub mod types;

pub use count::{
    column_utilization, depth, layer_matrices, network_plan, param_count, tile_count,
    weight_count, CountContext, InputShape, LayerKind, LayerMatrix, NetworkPlan,
};
pub use lhs::{latin_latents, sample_lhs, sample_lhs_detailed, LhsSample};
pub use mutate::{mutate, mutate_with_report, MutationKind, MutationProbs, MutationReport};
pub use types::{
    decode, decode_in, encode, Architecture, ArchitectureDoc, ConvBlockType, Genome,
    MainBlockSpec, SpaceBounds, GENOME_LEN, MAX_MAIN_BLOCKS, SCHEMA_VERSION, SENTINEL,
    SLOTS_PER_BLOCK, STEM_SLOTS,
};
