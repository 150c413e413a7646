//! Batched analog linear layers: mapping, drift, tiled MVM, accumulation.

use ndarray::{Array2, ArrayView2};
use rand_chacha::ChaCha8Rng;

use super::config::RpuConfig;
use super::tile::{drift, map_weights, mvm, ProgrammedTile};
use crate::error::{Error, Result};

/// A dense layer programmed onto tiles, ready for inference at any time.
#[derive(Debug, Clone)]
pub struct MappedLayer {
    tiles: Vec<ProgrammedTile>,
    in_dim: usize,
    out_dim: usize,
    tile_size: usize,
}

impl MappedLayer {
    /// Programs `w` (out x in, standard dense orientation) onto tiles.
    pub fn program(w: ArrayView2<'_, f64>, cfg: &RpuConfig, rng: &mut ChaCha8Rng) -> Self {
        let crossbar = w.t();
        let tiles = map_weights(crossbar.view(), cfg, rng);
        MappedLayer {
            tiles,
            in_dim: w.ncols(),
            out_dim: w.nrows(),
            tile_size: cfg.tile_size as usize,
        }
    }

    /// Tile states drifted to time `t`.
    pub fn at_time(&self, t: f64, cfg: &RpuConfig) -> Result<Self> {
        let tiles = self
            .tiles
            .iter()
            .map(|tile| drift(tile, t, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(MappedLayer { tiles, ..self.clone() })
    }

    /// Runs a batch through the tiles; partial sums across row tiles are
    /// accumulated digitally at full precision.
    pub fn forward(&self, x_batch: ArrayView2<'_, f64>, cfg: &RpuConfig) -> Result<Array2<f64>> {
        if x_batch.ncols() != self.in_dim {
            return Err(Error::ShapeError {
                expected: format!("batch with {} features", self.in_dim),
                got: format!("{} features", x_batch.ncols()),
            });
        }
        let mut out = Array2::zeros((x_batch.nrows(), self.out_dim));
        for tile in &self.tiles {
            let r0 = tile.row_block * self.tile_size;
            let c0 = tile.col_block * self.tile_size;
            for (bi, row) in x_batch.outer_iter().enumerate() {
                let x_chunk: Vec<f64> = row
                    .iter()
                    .skip(r0)
                    .take(tile.rows())
                    .copied()
                    .collect();
                let y = mvm(tile, &x_chunk, cfg)?;
                for (j, v) in y.iter().enumerate() {
                    out[[bi, c0 + j]] += v;
                }
            }
        }
        Ok(out)
    }
}

/// Full analog pipeline for one dense layer: program `w` (out x in), drift
/// to time `t`, and run the batch through the tiles.
pub fn linear_forward(
    w: ArrayView2<'_, f64>,
    x_batch: ArrayView2<'_, f64>,
    cfg: &RpuConfig,
    t: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Array2<f64>> {
    let layer = MappedLayer::program(w, cfg, rng);
    let drifted = layer.at_time(t, cfg)?;
    drifted.forward(x_batch, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::derive_rng;
    use ndarray::Array2;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = derive_rng(seed, &[100]);
        Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn ideal_path_matches_dense_product() {
        let cfg = RpuConfig::ideal();
        let w = random_matrix(200, 300, 1);
        let x = random_matrix(4, 300, 2);
        let y = linear_forward(w.view(), x.view(), &cfg, cfg.t0, &mut derive_rng(0, &[1])).unwrap();
        let exact = x.dot(&w.t());
        for (a, b) in y.iter().zip(exact.iter()) {
            let denom = b.abs().max(1e-9);
            assert!((a - b).abs() / denom < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn same_seed_reproduces_noisy_output() {
        let cfg = RpuConfig::default();
        let w = random_matrix(50, 40, 3);
        let x = random_matrix(2, 40, 4);
        let a = linear_forward(w.view(), x.view(), &cfg, 86_400.0, &mut derive_rng(9, &[7])).unwrap();
        let b = linear_forward(w.view(), x.view(), &cfg, 86_400.0, &mut derive_rng(9, &[7])).unwrap();
        let c = linear_forward(w.view(), x.view(), &cfg, 86_400.0, &mut derive_rng(10, &[7])).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn degradation_grows_with_time_on_average() {
        let cfg = RpuConfig {
            prog_noise_std: 0.02,
            ..RpuConfig::default()
        };
        let w = random_matrix(60, 60, 5);
        let x = random_matrix(4, 60, 6);
        let exact = x.dot(&w.t());
        let mse_at = |t: f64| -> f64 {
            let mut total = 0.0;
            for seed in 0..32u64 {
                // Same programming per seed; only the read time varies.
                let y = linear_forward(w.view(), x.view(), &cfg, t, &mut derive_rng(seed, &[55]))
                    .unwrap();
                total += (&y - &exact).mapv(|d| d * d).mean().unwrap();
            }
            total / 32.0
        };
        let m_t0 = mse_at(cfg.t0);
        let m_day = mse_at(86_400.0);
        let m_month = mse_at(2_592_000.0);
        assert!(m_t0 <= m_day && m_day <= m_month, "{m_t0} {m_day} {m_month}");
    }
}
