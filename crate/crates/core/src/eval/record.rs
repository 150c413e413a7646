//! Per-architecture evaluation records.

use serde::{Deserialize, Serialize};

use crate::space::SCHEMA_VERSION;

/// Drift read-out horizons in seconds.
pub const ONE_DAY: f64 = 86_400.0;
/// One month is taken as 30 days.
pub const ONE_MONTH: f64 = 2_592_000.0;

/// The three evaluation horizons: 1 second (clamped up to the programming
/// reference time `t0`), 1 day, and 1 month.
pub fn eval_times(t0: f64) -> [f64; 3] {
    [t0.max(1.0), ONE_DAY, ONE_MONTH]
}

/// Measured accuracies of one architecture across trials and time points,
/// plus the derived fitness statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub arch_id: String,
    /// Seconds after programming, ascending; index 1 is the 1-day horizon.
    pub times: Vec<f64>,
    /// Accuracies in [0, 1], indexed `[trial][time]`.
    pub acc: Vec<Vec<f64>>,
    pub acc_1day_mean: f64,
    pub acc_1day_std: f64,
    /// Accuracy variation over one month: mean short-horizon accuracy minus
    /// mean 1-month accuracy (positive = degradation).
    pub avm: f64,
    pub backend: String,
    pub seed: u64,
    pub schema_version: u32,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in xs {
        sum += x;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two
/// samples.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs.iter().copied());
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

impl EvalRecord {
    /// Assembles a record from the raw accuracy matrix.
    pub fn from_acc(
        arch_id: String,
        times: Vec<f64>,
        acc: Vec<Vec<f64>>,
        backend: String,
        seed: u64,
    ) -> Self {
        let day_idx = 1.min(times.len().saturating_sub(1));
        let last_idx = times.len().saturating_sub(1);
        let day_col: Vec<f64> = acc.iter().map(|row| row[day_idx]).collect();
        let acc_1day_mean = mean(day_col.iter().copied());
        let acc_1day_std = sample_std(&day_col);
        let avm = mean(acc.iter().map(|row| row[0])) - mean(acc.iter().map(|row| row[last_idx]));
        EvalRecord {
            arch_id,
            times,
            acc,
            acc_1day_mean,
            acc_1day_std,
            avm,
            backend,
            seed,
            schema_version: SCHEMA_VERSION,
        }
    }
}
