//! Mutation operators over architectures.
//!
//! Mutations are grouped into three classes, each triggered independently:
//! depth-related (main blocks, residual blocks, convolution type), width-
//! related (widening factor, branches, stem channels), and other (stem
//! kernel, skip policy). Within a triggered class one operator is chosen
//! uniformly. Results are always clamped to the bounds, and a parameter
//! budget is enforced by bounded redraws followed by shrinking steps.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::count::{param_count, CountContext};
use super::types::{Architecture, MainBlockSpec, SpaceBounds};

/// Per-class trigger probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationProbs {
    pub depth: f64,
    pub width: f64,
    pub other: f64,
    /// When set, a step that would raise the widening factor, residual
    /// count, or main-block count to its maximum is accepted with
    /// probability 0.2 instead (used under tight parameter budgets).
    pub damp_max_increase: bool,
}

impl Default for MutationProbs {
    fn default() -> Self {
        MutationProbs {
            depth: 0.8,
            width: 0.8,
            other: 0.5,
            damp_max_increase: false,
        }
    }
}

/// Individual mutation operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationKind {
    MainBlocks,
    ResidualBlocks,
    ConvType,
    WideningFactor,
    Branches,
    OutputChannels,
    KernelSize,
    SkipToggle,
    Shrink,
}

impl MutationKind {
    pub fn name(self) -> &'static str {
        match self {
            MutationKind::MainBlocks => "main_blocks",
            MutationKind::ResidualBlocks => "residual_blocks",
            MutationKind::ConvType => "conv_type",
            MutationKind::WideningFactor => "widening_factor",
            MutationKind::Branches => "branches",
            MutationKind::OutputChannels => "output_channels",
            MutationKind::KernelSize => "kernel_size",
            MutationKind::SkipToggle => "skip_toggle",
            MutationKind::Shrink => "shrink",
        }
    }
}

/// What a single mutation call did.
#[derive(Debug, Clone, Default)]
pub struct MutationReport {
    pub depth_triggered: bool,
    pub width_triggered: bool,
    pub other_triggered: bool,
    pub applied: Vec<MutationKind>,
    /// Redraw attempts consumed by the parameter budget.
    pub retries: usize,
    /// Shrinking steps applied after the retries were exhausted.
    pub shrink_steps: usize,
}

const BUDGET_RETRIES: usize = 16;
const OC0_STEP: u32 = 8;

fn random_block(bounds: &SpaceBounds, rng: &mut ChaCha8Rng) -> MainBlockSpec {
    MainBlockSpec {
        r: rng.gen_range(bounds.r.0..=bounds.r.1),
        b: rng.gen_range(bounds.b.0..=bounds.b.1),
        ct: bounds.ct[rng.gen_range(0..bounds.ct.len())],
        wf: rng.gen_range(bounds.wf.0..=bounds.wf.1),
        st: bounds.st[rng.gen_range(0..bounds.st.len())],
    }
}

/// Applies the damping rule: an increase that lands on `max` is kept with
/// probability 0.2 when damping is active.
fn accept_increase(lands_on_max: bool, probs: &MutationProbs, rng: &mut ChaCha8Rng) -> bool {
    if probs.damp_max_increase && lands_on_max {
        rng.gen_bool(0.2)
    } else {
        true
    }
}

/// Steps an integer field up or down within its range, preferring the drawn
/// direction and falling back to the other one.
fn step_value(
    value: u32,
    range: (u32, u32),
    up_first: bool,
    probs: &MutationProbs,
    damped: bool,
    rng: &mut ChaCha8Rng,
) -> u32 {
    let try_dir = |up: bool, rng: &mut ChaCha8Rng| -> Option<u32> {
        if up && value < range.1 {
            let next = value + 1;
            if !damped || accept_increase(next == range.1, probs, rng) {
                return Some(next);
            }
            // Damping rejected the increase; treat as applied no-op.
            return Some(value);
        }
        if !up && value > range.0 {
            return Some(value - 1);
        }
        None
    };
    try_dir(up_first, rng)
        .or_else(|| try_dir(!up_first, rng))
        .unwrap_or(value)
}

fn apply_depth(
    arch: &mut Architecture,
    probs: &MutationProbs,
    bounds: &SpaceBounds,
    rng: &mut ChaCha8Rng,
) -> MutationKind {
    match rng.gen_range(0..3) {
        0 => {
            let grow = rng.gen_bool(0.5);
            let m = arch.blocks.len() as u32;
            if grow && m < bounds.m.1 {
                if accept_increase(m + 1 == bounds.m.1, probs, rng) {
                    let blk = random_block(bounds, rng);
                    arch.blocks.push(blk);
                }
            } else if m > bounds.m.0 {
                arch.blocks.pop();
            } else if m < bounds.m.1 && accept_increase(m + 1 == bounds.m.1, probs, rng) {
                let blk = random_block(bounds, rng);
                arch.blocks.push(blk);
            }
            MutationKind::MainBlocks
        }
        1 => {
            let j = rng.gen_range(0..arch.blocks.len());
            let up = rng.gen_bool(0.5);
            arch.blocks[j].r = step_value(arch.blocks[j].r, bounds.r, up, probs, true, rng);
            MutationKind::ResidualBlocks
        }
        _ => {
            let j = rng.gen_range(0..arch.blocks.len());
            let others: Vec<_> = bounds
                .ct
                .iter()
                .copied()
                .filter(|&c| c != arch.blocks[j].ct)
                .collect();
            if !others.is_empty() {
                arch.blocks[j].ct = others[rng.gen_range(0..others.len())];
            }
            MutationKind::ConvType
        }
    }
}

fn apply_width(
    arch: &mut Architecture,
    probs: &MutationProbs,
    bounds: &SpaceBounds,
    rng: &mut ChaCha8Rng,
) -> MutationKind {
    match rng.gen_range(0..3) {
        0 => {
            let j = rng.gen_range(0..arch.blocks.len());
            let up = rng.gen_bool(0.5);
            arch.blocks[j].wf = step_value(arch.blocks[j].wf, bounds.wf, up, probs, true, rng);
            MutationKind::WideningFactor
        }
        1 => {
            let j = rng.gen_range(0..arch.blocks.len());
            let up = rng.gen_bool(0.5);
            arch.blocks[j].b = step_value(arch.blocks[j].b, bounds.b, up, probs, false, rng);
            MutationKind::Branches
        }
        _ => {
            let up = rng.gen_bool(0.5);
            let next = if up {
                (arch.oc0 + OC0_STEP).min(bounds.oc0.1)
            } else {
                arch.oc0.saturating_sub(OC0_STEP).max(bounds.oc0.0)
            };
            arch.oc0 = if next == arch.oc0 {
                // Stuck at an edge: reflect.
                if up {
                    arch.oc0.saturating_sub(OC0_STEP).max(bounds.oc0.0)
                } else {
                    (arch.oc0 + OC0_STEP).min(bounds.oc0.1)
                }
            } else {
                next
            };
            MutationKind::OutputChannels
        }
    }
}

fn apply_other(
    arch: &mut Architecture,
    bounds: &SpaceBounds,
    rng: &mut ChaCha8Rng,
) -> MutationKind {
    if rng.gen_range(0..2) == 0 {
        let idx = bounds
            .ks0
            .iter()
            .position(|&k| k == arch.ks0)
            .unwrap_or(0);
        let up = rng.gen_bool(0.5);
        let next = if up && idx + 1 < bounds.ks0.len() {
            idx + 1
        } else if !up && idx > 0 {
            idx - 1
        } else if idx + 1 < bounds.ks0.len() {
            idx + 1
        } else if idx > 0 {
            idx - 1
        } else {
            idx
        };
        arch.ks0 = bounds.ks0[next];
        MutationKind::KernelSize
    } else {
        let j = rng.gen_range(0..arch.blocks.len());
        if bounds.st.len() > 1 {
            arch.blocks[j].st = !arch.blocks[j].st;
        }
        MutationKind::SkipToggle
    }
}

/// One shrinking step towards the minimal architecture; false when already
/// minimal.
fn shrink_step(arch: &mut Architecture, bounds: &SpaceBounds) -> bool {
    if let Some(j) = (0..arch.blocks.len()).max_by_key(|&j| arch.blocks[j].wf) {
        if arch.blocks[j].wf > bounds.wf.0 {
            arch.blocks[j].wf -= 1;
            return true;
        }
    }
    if let Some(j) = (0..arch.blocks.len()).max_by_key(|&j| arch.blocks[j].r) {
        if arch.blocks[j].r > bounds.r.0 {
            arch.blocks[j].r -= 1;
            return true;
        }
    }
    if let Some(j) = (0..arch.blocks.len()).max_by_key(|&j| arch.blocks[j].b) {
        if arch.blocks[j].b > bounds.b.0 {
            arch.blocks[j].b -= 1;
            return true;
        }
    }
    if arch.blocks.len() as u32 > bounds.m.0 {
        arch.blocks.pop();
        return true;
    }
    if arch.oc0 > bounds.oc0.0 {
        arch.oc0 = arch.oc0.saturating_sub(OC0_STEP).max(bounds.oc0.0);
        return true;
    }
    false
}

fn mutate_once(
    parent: &Architecture,
    probs: &MutationProbs,
    bounds: &SpaceBounds,
    rng: &mut ChaCha8Rng,
    report: &mut MutationReport,
) -> Architecture {
    let mut child = parent.clone();
    report.depth_triggered = rng.gen_bool(probs.depth);
    if report.depth_triggered {
        let kind = apply_depth(&mut child, probs, bounds, rng);
        report.applied.push(kind);
    }
    report.width_triggered = rng.gen_bool(probs.width);
    if report.width_triggered {
        let kind = apply_width(&mut child, probs, bounds, rng);
        report.applied.push(kind);
    }
    report.other_triggered = rng.gen_bool(probs.other);
    if report.other_triggered {
        let kind = apply_other(&mut child, bounds, rng);
        report.applied.push(kind);
    }
    child
}

/// Mutates a parent, reporting which classes fired and what was applied.
pub fn mutate_with_report(
    parent: &Architecture,
    probs: &MutationProbs,
    t_p: Option<u64>,
    bounds: &SpaceBounds,
    ctx: &CountContext,
    rng: &mut ChaCha8Rng,
) -> (Architecture, MutationReport) {
    let mut report = MutationReport::default();
    let mut child = mutate_once(parent, probs, bounds, rng, &mut report);
    if let Some(budget) = t_p {
        let mut tries = 0;
        while param_count(&child, ctx) >= budget && tries < BUDGET_RETRIES {
            report = MutationReport::default();
            child = mutate_once(parent, probs, bounds, rng, &mut report);
            tries += 1;
        }
        report.retries = tries;
        while param_count(&child, ctx) >= budget {
            if !shrink_step(&mut child, bounds) {
                break;
            }
            report.shrink_steps += 1;
        }
        if report.shrink_steps > 0 {
            report.applied.push(MutationKind::Shrink);
        }
    }
    (child, report)
}

/// Mutates a parent into a valid child within the bounds and budget.
pub fn mutate(
    parent: &Architecture,
    probs: &MutationProbs,
    t_p: Option<u64>,
    bounds: &SpaceBounds,
    ctx: &CountContext,
    rng: &mut ChaCha8Rng,
) -> Architecture {
    mutate_with_report(parent, probs, t_p, bounds, ctx, rng).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::derive_rng;
    use crate::space::fixtures;

    fn mid_parent() -> Architecture {
        fixtures::analognas_t1m()
    }

    #[test]
    fn zero_probs_is_identity() {
        let probs = MutationProbs {
            depth: 0.0,
            width: 0.0,
            other: 0.0,
            damp_max_increase: false,
        };
        let mut rng = derive_rng(1, &[9]);
        let parent = mid_parent();
        let child = mutate(
            &parent,
            &probs,
            None,
            &SpaceBounds::default(),
            &CountContext::default(),
            &mut rng,
        );
        assert_eq!(child, parent);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let bounds = SpaceBounds::default();
        let ctx = CountContext::default();
        let parent = mid_parent();
        let a = mutate(&parent, &MutationProbs::default(), Some(500_000), &bounds, &ctx, &mut derive_rng(11, &[2]));
        let b = mutate(&parent, &MutationProbs::default(), Some(500_000), &bounds, &ctx, &mut derive_rng(11, &[2]));
        assert_eq!(a, b);
    }

    #[test]
    fn class_frequencies_match_probabilities() {
        let bounds = SpaceBounds::default();
        let ctx = CountContext::default();
        let parent = mid_parent();
        let probs = MutationProbs::default();
        let n = 10_000;
        let (mut d, mut w, mut o) = (0usize, 0usize, 0usize);
        for i in 0..n {
            let mut rng = derive_rng(77, &[i as u64]);
            let (_, rep) = mutate_with_report(&parent, &probs, None, &bounds, &ctx, &mut rng);
            d += rep.depth_triggered as usize;
            w += rep.width_triggered as usize;
            o += rep.other_triggered as usize;
        }
        let f = |c: usize| c as f64 / n as f64;
        assert!((f(d) - 0.8).abs() < 0.02, "depth rate {}", f(d));
        assert!((f(w) - 0.8).abs() < 0.02, "width rate {}", f(w));
        assert!((f(o) - 0.5).abs() < 0.02, "other rate {}", f(o));
    }

    #[test]
    fn budget_is_enforced() {
        let bounds = SpaceBounds::default();
        let ctx = CountContext::default();
        let parent = mid_parent();
        for i in 0..200 {
            let mut rng = derive_rng(3, &[i]);
            let child = mutate(&parent, &MutationProbs::default(), Some(200_000), &bounds, &ctx, &mut rng);
            assert!(param_count(&child, &ctx) < 200_000);
            child.validate(&bounds).unwrap();
        }
    }

    #[test]
    fn children_stay_within_restricted_bounds() {
        let bounds = SpaceBounds {
            oc0: (64, 64),
            ks0: vec![5],
            m: (1, 1),
            r: (1, 3),
            b: (1, 2),
            ct: vec![crate::space::types::ConvBlockType::A, crate::space::types::ConvBlockType::B],
            wf: (1, 2),
            st: vec![false],
        };
        let ctx = CountContext::default();
        let parent = bounds.minimal();
        for i in 0..200 {
            let mut rng = derive_rng(8, &[i]);
            let child = mutate(&parent, &MutationProbs::default(), None, &bounds, &ctx, &mut rng);
            child.validate(&bounds).unwrap();
        }
    }
}
