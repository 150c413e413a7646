//! Ground-truth fitness signals: accuracy at drift time points across
//! trials, accuracy variation over one month, and trial dispersion.

pub mod oracle;
pub mod record;
pub mod tinynet;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imc::RpuConfig;
use crate::seeds::{derive_rng, derive_seed, tag};
use crate::space::{Architecture, CountContext};

pub use oracle::{
    base_accuracy, drift_penalty, expected_accuracy, expected_avm, jitter_std, oracle_features,
    synthetic_oracle, OracleCoefficients, OracleFeatures,
};
pub use record::{eval_times, sample_std, EvalRecord, ONE_DAY, ONE_MONTH};
pub use tinynet::{hidden_width, tiny_net_eval, train_tiny_net, TinyNetParams, TrainedTinyNet};

/// Pluggable fitness backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Backend {
    /// Closed-form desk-scale oracle.
    SyntheticOracle(OracleCoefficients),
    /// Noise-injected training of a small dense network, inference through
    /// the analog pipeline.
    TinyNet(TinyNetParams),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::SyntheticOracle(_) => "synthetic-oracle",
            Backend::TinyNet(_) => "tiny-net",
        }
    }
}

/// Evaluates an architecture: accuracy at the three drift horizons across
/// `n_trials` independent hardware instances.
///
/// Each trial derives its own generator from `(seed, architecture, trial)`;
/// every time point of a trial re-reads the same instance (the generator
/// state is cloned per read), so a trial's perturbation is consistent
/// across its drift curve. Results are independent of evaluation order.
pub fn evaluate(
    arch: &Architecture,
    rpu: &RpuConfig,
    backend: &Backend,
    n_trials: usize,
    seed: u64,
    ctx: &CountContext,
) -> Result<EvalRecord> {
    let arch_id = arch.arch_id();
    if n_trials == 0 {
        return Err(Error::EvalError {
            arch_id,
            reason: "n_trials must be at least 1".into(),
        });
    }
    let times = eval_times(rpu.t0);
    let arch_tag = arch.seed_tag();

    let trained = match backend {
        Backend::TinyNet(params) => Some(train_tiny_net(
            arch,
            rpu,
            params,
            derive_seed(seed, &[tag::TRAIN, arch_tag]),
        )),
        Backend::SyntheticOracle(_) => None,
    };

    let mut acc = Vec::with_capacity(n_trials);
    for trial in 0..n_trials {
        let trial_rng: ChaCha8Rng = derive_rng(seed, &[tag::EVAL_TRIAL, arch_tag, trial as u64]);
        let mut row = Vec::with_capacity(times.len());
        for &t in &times {
            let mut rng = trial_rng.clone();
            let a = match backend {
                Backend::SyntheticOracle(coeffs) => {
                    synthetic_oracle(arch, rpu, t, ctx, coeffs, &mut rng)
                }
                Backend::TinyNet(_) => {
                    let net = trained.as_ref().expect("trained above");
                    tiny_net_eval(net, rpu, t, &mut rng).map_err(|e| Error::EvalError {
                        arch_id: arch_id.clone(),
                        reason: e.to_string(),
                    })?
                }
            };
            row.push(a);
        }
        acc.push(row);
    }
    Ok(EvalRecord::from_acc(
        arch_id,
        times.to_vec(),
        acc,
        backend.name().to_string(),
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures;

    #[test]
    fn oracle_record_is_deterministic_and_in_range() {
        let rpu = RpuConfig::default();
        let ctx = CountContext::default();
        let backend = Backend::SyntheticOracle(OracleCoefficients::default());
        let arch = fixtures::analognas_t300();
        let a = evaluate(&arch, &rpu, &backend, 5, 11, &ctx).unwrap();
        let b = evaluate(&arch, &rpu, &backend, 5, 11, &ctx).unwrap();
        assert_eq!(a, b);
        assert!(a.acc.iter().flatten().all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(a.times.len(), 3);
        assert_eq!(a.acc.len(), 5);
    }

    #[test]
    fn trial_jitter_cancels_in_avm() {
        // Per-trial perturbations are constant across the drift curve, so
        // the measured variation equals the expected penalty difference.
        let rpu = RpuConfig::default();
        let ctx = CountContext::default();
        let coeffs = OracleCoefficients::default();
        let backend = Backend::SyntheticOracle(coeffs);
        let arch = fixtures::analognas_t500();
        let rec = evaluate(&arch, &rpu, &backend, 7, 5, &ctx).unwrap();
        let expected = expected_avm(&arch, &rpu, &ctx, &coeffs);
        assert!((rec.avm - expected).abs() < 1e-9, "{} vs {expected}", rec.avm);
    }

    #[test]
    fn t500_beats_resnet32_on_measured_avm() {
        let rpu = RpuConfig::default();
        let ctx = CountContext::default();
        let backend = Backend::SyntheticOracle(OracleCoefficients::default());
        let t500 = evaluate(&fixtures::analognas_t500(), &rpu, &backend, 5, 3, &ctx).unwrap();
        let rn32 = evaluate(&fixtures::resnet32_table(), &rpu, &backend, 5, 3, &ctx).unwrap();
        assert!(t500.avm < rn32.avm, "{} vs {}", t500.avm, rn32.avm);
    }

    #[test]
    fn zero_trials_is_an_eval_error() {
        let rpu = RpuConfig::default();
        let ctx = CountContext::default();
        let backend = Backend::SyntheticOracle(OracleCoefficients::default());
        assert!(matches!(
            evaluate(&fixtures::analognas_t100(), &rpu, &backend, 0, 1, &ctx),
            Err(Error::EvalError { .. })
        ));
    }
}
