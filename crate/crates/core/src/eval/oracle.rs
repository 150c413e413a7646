//! Synthetic fitness oracle.
//!
//! A closed-form, desk-scale stand-in for hardware-aware trained accuracy.
//! Accuracy is `clamp(base - drift_penalty + trial_jitter, 0, 1)` where:
//!
//! * `base` is a smooth function of depth (peaking at moderate depth),
//!   mean widening factor, parameter count, and branch count;
//! * `drift_penalty` grows with `log10(t / t0)`, scales with the drift
//!   exponent and programming noise, and shrinks with tile column
//!   utilization and width;
//! * `trial_jitter` is Gaussian with a std that decreases in width.
//!
//! All coefficients are fixed, versioned constants; changing them
//! invalidates golden fixtures by design.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::imc::RpuConfig;
use crate::space::{column_utilization, depth, layer_matrices, param_count, Architecture, CountContext};

/// Coefficients of the synthetic oracle (version 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleCoefficients {
    pub version: u32,
    /// Accuracy floor of the base term.
    pub base_floor: f64,
    /// Peak bonus for architectures at the preferred depth.
    pub depth_gain: f64,
    pub depth_peak: f64,
    pub depth_sigma: f64,
    /// Bonus per unit of mean widening factor above 1 (scaled by 1/3).
    pub width_gain: f64,
    /// Saturating parameter-count bonus.
    pub param_gain: f64,
    pub param_scale: f64,
    /// Cost per mean branch above 1.
    pub branch_cost: f64,
    /// Drift penalty per decade of `t / t0` at the reference exponent 0.06.
    pub drift_gain: f64,
    /// Penalty amplification per unit of programming noise std.
    pub noise_gain: f64,
    /// Penalty relief from tile column utilization, in [0, 1).
    pub util_relief: f64,
    /// Penalty divisor growth per unit of mean widening factor above 1.
    pub width_relief: f64,
    /// Trial jitter std at zero noise and width 1.
    pub jitter_base: f64,
    /// Extra jitter std per unit of programming noise std.
    pub jitter_noise: f64,
    /// Jitter divisor growth per unit of mean widening factor above 1.
    pub jitter_width_relief: f64,
    /// Jitter divisor growth per mean branch above 1.
    pub jitter_branch_relief: f64,
}

impl Default for OracleCoefficients {
    fn default() -> Self {
        OracleCoefficients {
            version: 1,
            base_floor: 0.50,
            depth_gain: 0.22,
            depth_peak: 14.0,
            depth_sigma: 10.0,
            width_gain: 0.10,
            param_gain: 0.08,
            param_scale: 200_000.0,
            branch_cost: 0.008,
            drift_gain: 0.011,
            noise_gain: 0.5,
            util_relief: 0.30,
            width_relief: 1.2,
            jitter_base: 0.004,
            jitter_noise: 0.01,
            jitter_width_relief: 1.0,
            jitter_branch_relief: 0.5,
        }
    }
}

/// Architecture summary the oracle is driven by.
#[derive(Debug, Clone, Copy)]
pub struct OracleFeatures {
    pub depth: f64,
    pub mean_wf: f64,
    pub mean_branches: f64,
    pub params: f64,
    pub utilization: f64,
}

pub fn oracle_features(arch: &Architecture, rpu: &RpuConfig, ctx: &CountContext) -> OracleFeatures {
    let layers = layer_matrices(arch, ctx);
    OracleFeatures {
        depth: depth(arch) as f64,
        mean_wf: arch.mean_wf(),
        mean_branches: arch.mean_branches(),
        params: param_count(arch, ctx) as f64,
        utilization: column_utilization(&layers, rpu.tile_size, rpu.mapping),
    }
}

/// Noise-free base accuracy of an architecture.
pub fn base_accuracy(f: &OracleFeatures, c: &OracleCoefficients) -> f64 {
    let depth_term = c.depth_gain
        * (-((f.depth - c.depth_peak).powi(2)) / (2.0 * c.depth_sigma.powi(2))).exp();
    let width_term = c.width_gain * (f.mean_wf - 1.0) / 3.0;
    let param_term = c.param_gain * (1.0 - (-f.params / c.param_scale).exp());
    let branch_term = c.branch_cost * (f.mean_branches - 1.0);
    c.base_floor + depth_term + width_term + param_term - branch_term
}

/// Deterministic drift penalty at read time `t`; zero at `t <= t0`.
pub fn drift_penalty(f: &OracleFeatures, rpu: &RpuConfig, t: f64, c: &OracleCoefficients) -> f64 {
    let log_decades = (t.max(rpu.t0) / rpu.t0).log10();
    let nu_hat = rpu.nu_mean / 0.06;
    let noise_amp = 1.0 + c.noise_gain * rpu.prog_noise_std;
    let relief = (1.0 - c.util_relief * f.utilization)
        / (1.0 + c.width_relief * (f.mean_wf - 1.0));
    c.drift_gain * nu_hat * log_decades * noise_amp * relief
}

/// Trial jitter std for an architecture under a hardware configuration.
pub fn jitter_std(f: &OracleFeatures, rpu: &RpuConfig, c: &OracleCoefficients) -> f64 {
    (c.jitter_base + c.jitter_noise * rpu.prog_noise_std)
        / (1.0
            + c.jitter_width_relief * (f.mean_wf - 1.0)
            + c.jitter_branch_relief * (f.mean_branches - 1.0))
}

/// Expected (jitter-free) accuracy at read time `t`.
pub fn expected_accuracy(
    arch: &Architecture,
    rpu: &RpuConfig,
    t: f64,
    ctx: &CountContext,
    c: &OracleCoefficients,
) -> f64 {
    let f = oracle_features(arch, rpu, ctx);
    (base_accuracy(&f, c) - drift_penalty(&f, rpu, t, c)).clamp(0.0, 1.0)
}

/// Expected accuracy variation from the short horizon to one month.
pub fn expected_avm(
    arch: &Architecture,
    rpu: &RpuConfig,
    ctx: &CountContext,
    c: &OracleCoefficients,
) -> f64 {
    let f = oracle_features(arch, rpu, ctx);
    let times = super::record::eval_times(rpu.t0);
    drift_penalty(&f, rpu, times[2], c) - drift_penalty(&f, rpu, times[0], c)
}

/// One trial draw of the oracle: expected accuracy plus trial jitter.
pub fn synthetic_oracle(
    arch: &Architecture,
    rpu: &RpuConfig,
    t: f64,
    ctx: &CountContext,
    c: &OracleCoefficients,
    trial_rng: &mut ChaCha8Rng,
) -> f64 {
    let f = oracle_features(arch, rpu, ctx);
    let sigma = jitter_std(&f, rpu, c);
    let jitter = if sigma > 0.0 {
        Normal::new(0.0, sigma).expect("positive std").sample(trial_rng)
    } else {
        0.0
    };
    (base_accuracy(&f, c) - drift_penalty(&f, rpu, t, c) + jitter).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures;

    fn setup() -> (RpuConfig, CountContext, OracleCoefficients) {
        (
            RpuConfig::default(),
            CountContext::default(),
            OracleCoefficients::default(),
        )
    }

    #[test]
    fn penalty_vanishes_at_t0() {
        let (rpu, ctx, c) = setup();
        let f = oracle_features(&fixtures::analognas_t500(), &rpu, &ctx);
        assert_eq!(drift_penalty(&f, &rpu, rpu.t0, &c), 0.0);
    }

    #[test]
    fn zero_drift_exponent_makes_accuracy_time_independent() {
        let (mut rpu, ctx, c) = setup();
        rpu.nu_mean = 0.0;
        let arch = fixtures::analognas_t500();
        let a1 = expected_accuracy(&arch, &rpu, rpu.t0, &ctx, &c);
        let a2 = expected_accuracy(&arch, &rpu, 2_592_000.0, &ctx, &c);
        assert_eq!(a1, a2);
    }

    #[test]
    fn wider_same_param_architecture_has_lower_month_penalty() {
        let (rpu, ctx, c) = setup();
        // Same stem; the wide one trades residual blocks for widening factor
        // at a comparable parameter count.
        let mut narrow = fixtures::analognas_t100();
        narrow.blocks[0] = crate::space::MainBlockSpec {
            r: 6,
            b: 1,
            ct: crate::space::ConvBlockType::B,
            wf: 1,
            st: false,
        };
        let mut wide = narrow.clone();
        wide.blocks[0].r = 1;
        wide.blocks[0].wf = 2;
        let p_narrow = crate::space::param_count(&narrow, &ctx) as f64;
        let p_wide = crate::space::param_count(&wide, &ctx) as f64;
        assert!((p_narrow / p_wide).ln().abs() < 0.7, "{p_narrow} vs {p_wide}");
        let f_n = oracle_features(&narrow, &rpu, &ctx);
        let f_w = oracle_features(&wide, &rpu, &ctx);
        let month = 2_592_000.0;
        assert!(
            drift_penalty(&f_w, &rpu, month, &c) < drift_penalty(&f_n, &rpu, month, &c)
        );
    }

    #[test]
    fn t500_is_more_drift_robust_than_resnet32() {
        let (rpu, ctx, c) = setup();
        let avm_t500 = expected_avm(&fixtures::analognas_t500(), &rpu, &ctx, &c);
        let avm_rn32 = expected_avm(&fixtures::resnet32_table(), &rpu, &ctx, &c);
        assert!(avm_t500 < avm_rn32, "{avm_t500} vs {avm_rn32}");
    }

    #[test]
    fn mean_day_accuracy_non_increasing_in_noise() {
        let (mut rpu, ctx, c) = setup();
        let arch = fixtures::analognas_t300();
        let mut prev = f64::INFINITY;
        for noise in [0.1, 1.0, 5.0] {
            rpu.prog_noise_std = noise;
            let a = expected_accuracy(&arch, &rpu, 86_400.0, &ctx, &c);
            assert!(a <= prev);
            prev = a;
        }
    }
}
