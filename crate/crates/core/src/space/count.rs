//! Static accounting: layer unrolling, parameter counts, depth, and tiles.
//!
//! Structural conventions used by every function here:
//!
//! * Main block `m` (1-based) has external width `W_m = oc0 * 2^(m-1) * wf_m`;
//!   the first residual block of each main block after the first downsamples
//!   spatially with stride 2.
//! * Bottleneck blocks (A/C) use a shared 1x1 reduction to the internal width
//!   `d = max(1, W_m * wf_m / 4)`, `b` parallel 3x3 convolutions at width `d`
//!   whose outputs are summed, and a shared 1x1 expansion back to `W_m`.
//! * Basic blocks (B/D) use `b` parallel branches of two 3x3 convolutions
//!   through the internal width `W_m * wf_m`.
//! * A 1x1 projection is inserted on the identity path whenever channel or
//!   spatial dimensions differ, or unconditionally when the block's skip
//!   policy (`st`) is set. Projections are weight-bearing but do not count
//!   towards depth.
//! * Convolutions carry no bias; each is followed by batch norm (2 parameters
//!   per channel). The classifier is a biased dense layer fed by global
//!   average pooling, so spatial input size never changes the counts.
//! * Depth is the number of weighted layers on the main path: the stem, every
//!   branch convolution, and the classifier.

use serde::{Deserialize, Serialize};

use super::types::Architecture;
use crate::imc::MappingScheme;

/// Input tensor shape (channels, height, width).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputShape {
    pub channels: u32,
    pub height: u32,
    pub width: u32,
}

impl Default for InputShape {
    fn default() -> Self {
        InputShape {
            channels: 3,
            height: 32,
            width: 32,
        }
    }
}

/// Task context for static accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountContext {
    pub input: InputShape,
    pub num_classes: u32,
}

impl Default for CountContext {
    fn default() -> Self {
        CountContext {
            input: InputShape::default(),
            num_classes: 10,
        }
    }
}

/// Role of a weight-bearing layer inside the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    Stem,
    Reduce,
    Branch,
    Expand,
    Projection,
    Classifier,
}

/// One weight-bearing layer unrolled to crossbar geometry.
///
/// Convolutions of shape `k x k, c_in -> c_out` unroll to
/// `rows = c_in * k^2`, `cols = c_out`; dense layers keep their dimensions.
/// `count` aggregates consecutive identical occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerMatrix {
    pub rows: u32,
    pub cols: u32,
    pub count: u32,
    pub kind: LayerKind,
}

impl LayerMatrix {
    pub fn weights(&self) -> u64 {
        self.rows as u64 * self.cols as u64 * self.count as u64
    }
}

/// Full static plan of a network: mapped layers plus digital-side parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkPlan {
    /// Weight-bearing layers in network order.
    pub layers: Vec<LayerMatrix>,
    /// Total batch-norm channels (2 parameters each, kept digital).
    pub bn_channels: u64,
    /// Bias parameters (classifier only).
    pub bias_params: u64,
}

impl NetworkPlan {
    /// Parameters mapped onto analog tiles (conv + dense weights).
    pub fn mapped_weights(&self) -> u64 {
        self.layers.iter().map(LayerMatrix::weights).sum()
    }

    /// All trainable parameters including batch norm and biases.
    pub fn total_params(&self) -> u64 {
        self.mapped_weights() + 2 * self.bn_channels + self.bias_params
    }
}

/// External width of main block `m` (1-based).
fn block_width(arch: &Architecture, m: usize) -> u32 {
    arch.oc0 * (1 << (m - 1)) * arch.blocks[m - 1].wf
}

fn push(layers: &mut Vec<LayerMatrix>, rows: u32, cols: u32, count: u32, kind: LayerKind) {
    if let Some(last) = layers.last_mut() {
        if last.rows == rows && last.cols == cols && last.kind == kind {
            last.count += count;
            return;
        }
    }
    layers.push(LayerMatrix {
        rows,
        cols,
        count,
        kind,
    });
}

/// Builds the full layer plan of an architecture.
pub fn network_plan(arch: &Architecture, ctx: &CountContext) -> NetworkPlan {
    let mut layers = Vec::new();
    let mut bn = 0u64;

    let k0 = arch.ks0;
    push(
        &mut layers,
        ctx.input.channels * k0 * k0,
        arch.oc0,
        1,
        LayerKind::Stem,
    );
    bn += arch.oc0 as u64;

    let mut prev = arch.oc0;
    for (mi, blk) in arch.blocks.iter().enumerate() {
        let m = mi + 1;
        let w_ext = block_width(arch, m);
        for i in 1..=blk.r {
            let c_in = if i == 1 { prev } else { w_ext };
            if blk.ct.is_bottleneck() {
                let d = ((w_ext * blk.wf) / 4).max(1);
                push(&mut layers, c_in, d, 1, LayerKind::Reduce);
                push(&mut layers, 9 * d, d, blk.b, LayerKind::Branch);
                push(&mut layers, d, w_ext, 1, LayerKind::Expand);
                bn += d as u64 + (blk.b as u64) * d as u64 + w_ext as u64;
            } else {
                let w_int = w_ext * blk.wf;
                push(&mut layers, 9 * c_in, w_int, blk.b, LayerKind::Branch);
                push(&mut layers, 9 * w_int, w_ext, blk.b, LayerKind::Branch);
                bn += (blk.b as u64) * (w_int as u64 + w_ext as u64);
            }
            // Stride-2 at the first block of every main block after the
            // first; channel mismatch also forces a projection.
            let needs_proj = (i == 1 && (m > 1 || c_in != w_ext)) || blk.st;
            if needs_proj {
                push(&mut layers, c_in, w_ext, 1, LayerKind::Projection);
                bn += w_ext as u64;
            }
        }
        prev = w_ext;
    }

    push(&mut layers, prev, ctx.num_classes, 1, LayerKind::Classifier);
    NetworkPlan {
        layers,
        bn_channels: bn,
        bias_params: ctx.num_classes as u64,
    }
}

/// Exact number of trainable parameters (weights + batch norm + biases).
pub fn param_count(arch: &Architecture, ctx: &CountContext) -> u64 {
    network_plan(arch, ctx).total_params()
}

/// Unrolled weight matrices of every weight-bearing layer, network order.
pub fn layer_matrices(arch: &Architecture, ctx: &CountContext) -> Vec<LayerMatrix> {
    network_plan(arch, ctx).layers
}

/// Σ rows x cols over a layer list: the weights mapped onto analog tiles.
pub fn weight_count(layers: &[LayerMatrix]) -> u64 {
    layers.iter().map(LayerMatrix::weights).sum()
}

/// Number of weighted layers on the main path (stem, branch convolutions,
/// classifier). Projection shortcuts are excluded.
pub fn depth(arch: &Architecture) -> u32 {
    let body: u32 = arch
        .blocks
        .iter()
        .map(|blk| {
            let per_block = if blk.ct.is_bottleneck() {
                blk.b + 2
            } else {
                2 * blk.b
            };
            blk.r * per_block
        })
        .sum();
    1 + body + 1
}

fn div_ceil(a: u64, b: u64) -> u64 {
    (a + b - 1) / b
}

/// Number of crossbar tiles needed to map the given layers.
///
/// Layers never share a tile. Column-differential mapping stores the
/// positive and negative weight planes in alternate columns (doubling the
/// column demand); tile-differential replicates every tile instead. Tile
/// sizes of 256 and 512 model the supported arrays; other sizes are
/// accepted for what-if accounting.
pub fn tile_count(layers: &[LayerMatrix], tile_size: u32, mapping: MappingScheme) -> u64 {
    let t = tile_size.max(1) as u64;
    layers
        .iter()
        .map(|l| {
            let row_tiles = div_ceil(l.rows as u64, t);
            let per = match mapping {
                MappingScheme::ColumnDifferential => row_tiles * div_ceil(2 * l.cols as u64, t),
                MappingScheme::TileDifferential => 2 * row_tiles * div_ceil(l.cols as u64, t),
            };
            per * l.count as u64
        })
        .sum()
}

/// Fraction of mapped tile columns actually occupied by weights.
///
/// Unused columns contribute read noise without signal, so higher is
/// better. Weighted over all tiles of all layers.
pub fn column_utilization(layers: &[LayerMatrix], tile_size: u32, mapping: MappingScheme) -> f64 {
    let t = tile_size.max(1) as u64;
    let mut used = 0u64;
    let mut capacity = 0u64;
    for l in layers {
        let row_tiles = div_ceil(l.rows as u64, t);
        let cols_eff = 2 * l.cols as u64;
        let col_tiles = match mapping {
            MappingScheme::ColumnDifferential => div_ceil(cols_eff, t),
            MappingScheme::TileDifferential => 2 * div_ceil(l.cols as u64, t),
        };
        used += row_tiles * cols_eff * l.count as u64;
        capacity += row_tiles * col_tiles * t * l.count as u64;
    }
    if capacity == 0 {
        0.0
    } else {
        used as f64 / capacity as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures;
    use crate::space::types::{Architecture, ConvBlockType, MainBlockSpec};

    fn minimal() -> Architecture {
        Architecture {
            oc0: 8,
            ks0: 3,
            blocks: vec![MainBlockSpec {
                r: 1,
                b: 1,
                ct: ConvBlockType::B,
                wf: 1,
                st: false,
            }],
        }
    }

    #[test]
    fn stem_unrolls_to_cin_k_squared() {
        let arch = Architecture {
            oc0: 64,
            ks0: 7,
            ..fixtures::analognas_t500()
        };
        let layers = layer_matrices(&arch, &CountContext::default());
        assert_eq!(layers[0].rows, 3 * 49);
        assert_eq!(layers[0].cols, 64);
    }

    #[test]
    fn t500_has_a_64_to_128_projection() {
        let layers = layer_matrices(&fixtures::analognas_t500(), &CountContext::default());
        let proj: Vec<_> = layers
            .iter()
            .filter(|l| l.kind == LayerKind::Projection)
            .collect();
        assert_eq!(proj.len(), 1);
        assert_eq!((proj[0].rows, proj[0].cols), (64, 128));
    }

    #[test]
    fn minimal_architecture_param_golden() {
        // Frozen from the symbolic per-layer oracle in tests/oracle.rs:
        // 216 + 576 + 576 + 80 weights, 24 BN channels, 10 biases.
        assert_eq!(param_count(&minimal(), &CountContext::default()), 1506);
    }

    #[test]
    fn classifier_term_scales_with_classes() {
        let arch = minimal();
        let base = CountContext::default();
        let doubled = CountContext {
            num_classes: 20,
            ..base
        };
        let delta = param_count(&arch, &doubled) - param_count(&arch, &base);
        // Biased classifier: (in_features + 1) per extra class.
        assert_eq!(delta, (8 + 1) * 10);
    }

    #[test]
    fn weights_equal_params_minus_bn_and_bias() {
        let plan = network_plan(&fixtures::analognas_t500(), &CountContext::default());
        assert_eq!(
            plan.mapped_weights(),
            plan.total_params() - 2 * plan.bn_channels - plan.bias_params
        );
    }

    #[test]
    fn depth_counts_main_path_layers() {
        assert_eq!(depth(&fixtures::analognas_t500()), 17);
        assert_eq!(depth(&fixtures::resnet32_table()), 32);
        assert_eq!(depth(&minimal()), 4);
    }

    #[test]
    fn adding_a_basic_block_adds_two_convs_per_branch() {
        let mut arch = fixtures::resnet32_table();
        let before = depth(&arch);
        arch.blocks[0].r += 1;
        assert_eq!(depth(&arch), before + 2 * arch.blocks[0].b);
    }

    #[test]
    fn tile_count_examples() {
        let exact = [LayerMatrix {
            rows: 512,
            cols: 256,
            count: 1,
            kind: LayerKind::Branch,
        }];
        assert_eq!(tile_count(&exact, 512, MappingScheme::ColumnDifferential), 1);

        let ceil = [LayerMatrix {
            rows: 513,
            cols: 256,
            count: 1,
            kind: LayerKind::Branch,
        }];
        assert_eq!(tile_count(&ceil, 512, MappingScheme::ColumnDifferential), 2);
    }

    #[test]
    fn tile_count_non_increasing_in_tile_size() {
        let layers = layer_matrices(&fixtures::resnet32_cifar(), &CountContext::default());
        let mut prev = u64::MAX;
        for t in [64, 128, 256, 512, 1024] {
            let n = tile_count(&layers, t, MappingScheme::ColumnDifferential);
            assert!(n <= prev, "tiles grew from {prev} to {n} at size {t}");
            prev = n;
        }
    }

    #[test]
    fn utilization_is_a_fraction_and_improves_with_fit() {
        let snug = [LayerMatrix {
            rows: 512,
            cols: 256,
            count: 1,
            kind: LayerKind::Branch,
        }];
        let loose = [LayerMatrix {
            rows: 512,
            cols: 10,
            count: 1,
            kind: LayerKind::Branch,
        }];
        let u_snug = column_utilization(&snug, 512, MappingScheme::ColumnDifferential);
        let u_loose = column_utilization(&loose, 512, MappingScheme::ColumnDifferential);
        assert!((u_snug - 1.0).abs() < 1e-12);
        assert!(u_loose < u_snug && u_loose > 0.0);
    }
}
