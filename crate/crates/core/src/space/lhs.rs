//! Latin hypercube sampling over the architecture space.
//!
//! Sampling stratifies the continuous relaxation of every genome dimension:
//! with `n` samples, each dimension's unit interval is split into `n` equal
//! strata and every stratum receives exactly one latent value. Integer and
//! categorical dimensions round the latent into their range afterwards.
//! All five main-block slots are sampled; a sample's architecture keeps the
//! first `m` blocks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::count::{param_count, CountContext};
use super::types::{
    Architecture, MainBlockSpec, SpaceBounds, GENOME_LEN, MAX_MAIN_BLOCKS,
    SLOTS_PER_BLOCK, STEM_SLOTS,
};
use crate::seeds::{derive_rng, tag};

/// One LHS draw: the architecture plus the latent point it came from.
#[derive(Debug, Clone)]
pub struct LhsSample {
    pub arch: Architecture,
    /// Per-dimension latent in [0, 1), one per genome slot.
    pub latents: Vec<f64>,
    /// Per-dimension stratum index in [0, n).
    pub strata: Vec<usize>,
    /// Set when the parameter constraint was met only by clamping the
    /// sample out of its hypercube cell.
    pub clamped: bool,
}

/// Stratified latent matrix: `n` rows over `n_dims` dimensions, each
/// dimension holding exactly one value per stratum `[k/n, (k+1)/n)`.
pub fn latin_latents(n: usize, n_dims: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n_dims);
    for _ in 0..n_dims {
        let mut col: Vec<f64> = (0..n)
            .map(|k| (k as f64 + rng.gen::<f64>()) / n as f64)
            .collect();
        // Fisher-Yates over the stratified values.
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            col.swap(i, j);
        }
        columns.push(col);
    }
    (0..n)
        .map(|row| columns.iter().map(|c| c[row]).collect())
        .collect()
}

fn int_from_latent(u: f64, lo: u32, hi: u32) -> u32 {
    let span = (hi - lo + 1) as f64;
    lo + ((u * span) as u32).min(hi - lo)
}

fn choice_index(u: f64, len: usize) -> usize {
    ((u * len as f64) as usize).min(len - 1)
}

fn arch_from_latents(latents: &[f64], bounds: &SpaceBounds) -> Architecture {
    let oc0 = int_from_latent(latents[0], bounds.oc0.0, bounds.oc0.1);
    let ks0 = bounds.ks0[choice_index(latents[1], bounds.ks0.len())];
    let m = int_from_latent(latents[2], bounds.m.0, bounds.m.1) as usize;
    let mut blocks = Vec::with_capacity(m);
    for i in 0..m {
        let base = STEM_SLOTS + i * SLOTS_PER_BLOCK;
        blocks.push(MainBlockSpec {
            r: int_from_latent(latents[base], bounds.r.0, bounds.r.1),
            b: int_from_latent(latents[base + 1], bounds.b.0, bounds.b.1),
            ct: bounds.ct[choice_index(latents[base + 2], bounds.ct.len())],
            wf: int_from_latent(latents[base + 3], bounds.wf.0, bounds.wf.1),
            st: bounds.st[choice_index(latents[base + 4], bounds.st.len())],
        });
    }
    Architecture { oc0, ks0, blocks }
}

/// Redraws every latent uniformly within the sample's own strata.
pub fn redraw_within_cell(
    strata: &[usize],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    strata
        .iter()
        .map(|&k| (k as f64 + rng.gen::<f64>()) / n as f64)
        .collect()
}

/// Shrinks an architecture towards the lower corner of the space until the
/// parameter budget is met (or the minimal architecture is reached).
fn clamp_downward(
    mut arch: Architecture,
    t_p: u64,
    bounds: &SpaceBounds,
    ctx: &CountContext,
) -> Architecture {
    let steps: [&dyn Fn(&mut Architecture); 5] = [
        &|a| a.blocks.iter_mut().for_each(|b| b.wf = bounds.wf.0),
        &|a| a.blocks.iter_mut().for_each(|b| b.b = bounds.b.0),
        &|a| a.blocks.iter_mut().for_each(|b| b.r = bounds.r.0),
        &|a| a.blocks.truncate(bounds.m.0 as usize),
        &|a| a.oc0 = bounds.oc0.0,
    ];
    for step in steps {
        if param_count(&arch, ctx) < t_p {
            return arch;
        }
        step(&mut arch);
    }
    arch
}

const CELL_RETRIES: usize = 50;

/// Latin-hypercube sample of `n` architectures.
///
/// With `t_p` set, any sample at or above the parameter budget is redrawn
/// within its own hypercube cell up to a bounded retry count; if the cell
/// admits no feasible point, widening and depth are clamped downward (the
/// sample is then flagged as leaving its cell).
pub fn sample_lhs_detailed(
    n: usize,
    seed: u64,
    t_p: Option<u64>,
    bounds: &SpaceBounds,
    ctx: &CountContext,
) -> Vec<LhsSample> {
    assert!(n >= 1, "sample count must be at least 1");
    let mut rng = derive_rng(seed, &[tag::LHS]);
    let latents = latin_latents(n, GENOME_LEN, &mut rng);
    latents
        .into_iter()
        .enumerate()
        .map(|(idx, lat)| {
            let strata: Vec<usize> = lat.iter().map(|u| ((u * n as f64) as usize).min(n - 1)).collect();
            let mut latents = lat;
            let mut arch = arch_from_latents(&latents, bounds);
            let mut clamped = false;
            if let Some(budget) = t_p {
                let mut retry_rng = derive_rng(seed, &[tag::LHS, 1 + idx as u64]);
                let mut tries = 0;
                while param_count(&arch, ctx) >= budget && tries < CELL_RETRIES {
                    latents = redraw_within_cell(&strata, n, &mut retry_rng);
                    arch = arch_from_latents(&latents, bounds);
                    tries += 1;
                }
                if param_count(&arch, ctx) >= budget {
                    arch = clamp_downward(arch, budget, bounds, ctx);
                    clamped = true;
                }
            }
            LhsSample {
                arch,
                latents,
                strata,
                clamped,
            }
        })
        .collect()
}

/// Latin-hypercube sample returning only the architectures.
pub fn sample_lhs(
    n: usize,
    seed: u64,
    t_p: Option<u64>,
    bounds: &SpaceBounds,
    ctx: &CountContext,
) -> Vec<Architecture> {
    sample_lhs_detailed(n, seed, t_p, bounds, ctx)
        .into_iter()
        .map(|s| s.arch)
        .collect()
}

/// Builds an architecture from a latent point; used when replacing culled
/// individuals "within the same hypercube cell" during search init.
pub fn arch_at(latents: &[f64], bounds: &SpaceBounds) -> Architecture {
    arch_from_latents(latents, bounds)
}

/// Genome dimension count used by the sampler (one per slot).
pub fn lhs_dims() -> usize {
    GENOME_LEN
}

/// Upper bound of block slots, re-exported for stratification checks.
pub fn block_slot_count() -> usize {
    MAX_MAIN_BLOCKS * SLOTS_PER_BLOCK
}
