//! Programmed crossbar tiles: differential mapping, drift, and MVM.
//!
//! Weights arrive in crossbar orientation (rows = inputs, columns =
//! outputs). Signed values are split into non-negative planes
//! `W+ = max(W, 0)` and `W- = -min(W, 0)`, scaled so the layer's max
//! magnitude maps to `g_max`, and programmed with additive Gaussian noise.
//! Each device draws its own drift exponent; conductances decay as
//! `G(t) = G(t0) * (t / t0)^-nu`.
//!
//! A tile is immutable once programmed: [`drift`] returns a new tile and
//! always starts from the stored programming-time state.

use ndarray::{Array2, ArrayView2};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::RpuConfig;
use super::quant::quantize;
use crate::error::{Error, Result};

/// One programmed crossbar tile holding a differential weight pair.
#[derive(Debug, Clone)]
pub struct ProgrammedTile {
    /// Tile position in the layer's row partition.
    pub row_block: usize,
    /// Tile position in the layer's column partition.
    pub col_block: usize,
    /// Positive-plane conductances, microsiemens.
    pub g_plus: Array2<f64>,
    /// Negative-plane conductances, microsiemens.
    pub g_minus: Array2<f64>,
    /// Per-device drift exponents of the positive plane.
    pub nu_plus: Array2<f64>,
    /// Per-device drift exponents of the negative plane.
    pub nu_minus: Array2<f64>,
    /// Weight-to-conductance scale factor (0 for an all-zero layer).
    pub scale: f64,
}

impl ProgrammedTile {
    pub fn rows(&self) -> usize {
        self.g_plus.nrows()
    }

    pub fn cols(&self) -> usize {
        self.g_plus.ncols()
    }
}

fn programmed_plane(
    w_plane: &Array2<f64>,
    scale: f64,
    cfg: &RpuConfig,
    noise: Option<&Normal<f64>>,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let mut g = w_plane.mapv(|w| w * scale);
    if let Some(dist) = noise {
        for v in g.iter_mut() {
            *v += dist.sample(rng);
        }
    }
    g.mapv_inplace(|v| v.clamp(0.0, cfg.g_max));
    g
}

fn drift_exponents(
    shape: (usize, usize),
    cfg: &RpuConfig,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    if cfg.nu_std == 0.0 {
        Array2::from_elem(shape, cfg.nu_mean.max(0.0))
    } else {
        let dist = Normal::new(cfg.nu_mean, cfg.nu_std).expect("validated std");
        let mut nu = Array2::zeros(shape);
        for v in nu.iter_mut() {
            *v = dist.sample(rng).max(0.0);
        }
        nu
    }
}

/// Programs a weight matrix (crossbar orientation) onto tiles.
///
/// The matrix is partitioned into `tile_size` chunks row-major; tiles are
/// programmed in that order from the given generator. An all-zero matrix
/// maps to zero conductances with a zero scale.
pub fn map_weights(
    w: ArrayView2<'_, f64>,
    cfg: &RpuConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<ProgrammedTile> {
    let t = cfg.tile_size as usize;
    let max_abs = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if max_abs > 0.0 { cfg.g_max / max_abs } else { 0.0 };
    let noise = if cfg.prog_noise_std > 0.0 {
        Some(Normal::new(0.0, cfg.prog_noise_std * cfg.g_max).expect("validated std"))
    } else {
        None
    };

    let row_tiles = w.nrows().div_ceil(t);
    let col_tiles = w.ncols().div_ceil(t);
    let mut tiles = Vec::with_capacity(row_tiles * col_tiles);
    for rb in 0..row_tiles {
        for cb in 0..col_tiles {
            let r0 = rb * t;
            let c0 = cb * t;
            let r1 = (r0 + t).min(w.nrows());
            let c1 = (c0 + t).min(w.ncols());
            let chunk = w.slice(ndarray::s![r0..r1, c0..c1]);
            let w_plus = chunk.mapv(|v| v.max(0.0));
            let w_minus = chunk.mapv(|v| (-v).max(0.0));
            let g_plus = programmed_plane(&w_plus, scale, cfg, noise.as_ref(), rng);
            let g_minus = programmed_plane(&w_minus, scale, cfg, noise.as_ref(), rng);
            let nu_plus = drift_exponents(g_plus.dim(), cfg, rng);
            let nu_minus = drift_exponents(g_minus.dim(), cfg, rng);
            tiles.push(ProgrammedTile {
                row_block: rb,
                col_block: cb,
                g_plus,
                g_minus,
                nu_plus,
                nu_minus,
                scale,
            });
        }
    }
    tiles
}

/// Conductance state of a tile after drifting to time `t`.
///
/// Always drifts from the stored programming-time state; the parent tile is
/// unmodified. Requires `t >= t0`.
pub fn drift(tile: &ProgrammedTile, t: f64, cfg: &RpuConfig) -> Result<ProgrammedTile> {
    if t < cfg.t0 {
        return Err(Error::InvalidTime { t, t0: cfg.t0 });
    }
    let ratio = t / cfg.t0;
    let decay = |g: &Array2<f64>, nu: &Array2<f64>| {
        let mut out = g.clone();
        out.zip_mut_with(nu, |gv, &nuv| *gv *= ratio.powf(-nuv));
        out
    };
    Ok(ProgrammedTile {
        g_plus: decay(&tile.g_plus, &tile.nu_plus),
        g_minus: decay(&tile.g_minus, &tile.nu_minus),
        nu_plus: tile.nu_plus.clone(),
        nu_minus: tile.nu_minus.clone(),
        ..*tile
    })
}

/// Analog matrix-vector product of one tile: `y_j = sum_i (G+ - G-)_ij x_i`,
/// rescaled to weight units and passed through the converters.
pub fn mvm(tile: &ProgrammedTile, x: &[f64], cfg: &RpuConfig) -> Result<Vec<f64>> {
    if x.len() != tile.rows() {
        return Err(Error::ShapeError {
            expected: format!("input of length {}", tile.rows()),
            got: format!("length {}", x.len()),
        });
    }
    let mut xq = x.to_vec();
    quantize(&mut xq, cfg.dac_bits, cfg.dac_bound);

    let mut y = vec![0.0f64; tile.cols()];
    for (i, &xi) in xq.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let gp = tile.g_plus.row(i);
        let gm = tile.g_minus.row(i);
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += (gp[j] - gm[j]) * xi;
        }
    }
    if tile.scale != 0.0 {
        for v in y.iter_mut() {
            *v /= tile.scale;
        }
    } else {
        y.iter_mut().for_each(|v| *v = 0.0);
    }
    quantize(&mut y, cfg.adc_bits, cfg.adc_bound);
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::derive_rng;
    use ndarray::array;

    #[test]
    fn sign_split_maps_extremes_to_gmax() {
        let cfg = RpuConfig::ideal();
        let w = array![[1.0, -1.0]];
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[0]));
        assert_eq!(tiles.len(), 1);
        let t = &tiles[0];
        assert_eq!(t.g_plus[[0, 0]], cfg.g_max);
        assert_eq!(t.g_plus[[0, 1]], 0.0);
        assert_eq!(t.g_minus[[0, 0]], 0.0);
        assert_eq!(t.g_minus[[0, 1]], cfg.g_max);
    }

    #[test]
    fn zero_matrix_has_zero_scale_and_output() {
        let cfg = RpuConfig::ideal();
        let w = Array2::zeros((4, 3));
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[1]));
        assert_eq!(tiles[0].scale, 0.0);
        let y = mvm(&tiles[0], &[1.0; 4], &cfg).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn six_hundred_square_splits_into_four_tiles() {
        let cfg = RpuConfig::ideal();
        let w = Array2::from_elem((600, 600), 0.5);
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[2]));
        assert_eq!(tiles.len(), 4);
        assert_eq!((tiles[3].rows(), tiles[3].cols()), (88, 88));
    }

    #[test]
    fn drift_is_identity_at_t0_and_for_zero_nu() {
        let mut cfg = RpuConfig::ideal();
        let w = array![[0.5, -0.25], [1.0, 0.0]];
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[3]));
        let at_t0 = drift(&tiles[0], cfg.t0, &cfg).unwrap();
        assert_eq!(at_t0.g_plus, tiles[0].g_plus);

        cfg.nu_mean = 0.0;
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[3]));
        let later = drift(&tiles[0], 1e6, &cfg).unwrap();
        assert_eq!(later.g_plus, tiles[0].g_plus);
        assert_eq!(later.g_minus, tiles[0].g_minus);
    }

    #[test]
    fn drift_follows_the_power_law() {
        let cfg = RpuConfig {
            nu_mean: 0.1,
            nu_std: 0.0,
            prog_noise_std: 0.0,
            t0: 1.0,
            g_max: 10.0,
            ..RpuConfig::default()
        };
        let w = array![[1.0]];
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[4]));
        let drifted = drift(&tiles[0], 10.0, &cfg).unwrap();
        // 10 uS after one decade at nu = 0.1: 10 * 10^-0.1.
        let expected = 10.0 * 10f64.powf(-0.1);
        assert!((drifted.g_plus[[0, 0]] - expected).abs() < 1e-12);
        assert!((expected - 7.943282347242816).abs() < 1e-12);
    }

    #[test]
    fn drift_before_t0_is_rejected() {
        let cfg = RpuConfig::ideal();
        let w = array![[1.0]];
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[5]));
        assert!(matches!(
            drift(&tiles[0], 1.0, &cfg),
            Err(Error::InvalidTime { .. })
        ));
    }

    #[test]
    fn identity_tile_reproduces_input() {
        let cfg = RpuConfig::ideal();
        let w = Array2::from_shape_fn((5, 5), |(i, j)| if i == j { 1.0 } else { 0.0 });
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[6]));
        let x = [0.1, -0.4, 0.9, 0.0, 2.5];
        let y = mvm(&tiles[0], &x, &cfg).unwrap();
        for (a, b) in y.iter().zip(x.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mvm_uses_the_crossbar_transpose_convention() {
        let cfg = RpuConfig::ideal();
        // Stored matrix [[1, 2], [3, -4]]; y_j = sum_i W_ij x_i.
        let w = array![[1.0, 2.0], [3.0, -4.0]];
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[7]));
        let y = mvm(&tiles[0], &[1.0, 1.0], &cfg).unwrap();
        assert!((y[0] - 4.0).abs() < 1e-10);
        assert!((y[1] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn conductances_stay_in_range_under_noise_and_drift() {
        let cfg = RpuConfig {
            prog_noise_std: 0.5,
            ..RpuConfig::default()
        };
        let w = Array2::from_shape_fn((40, 40), |(i, j)| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        for tile in map_weights(w.view(), &cfg, &mut derive_rng(0, &[8])) {
            let drifted = drift(&tile, 86_400.0, &cfg).unwrap();
            for plane in [&tile.g_plus, &tile.g_minus, &drifted.g_plus, &drifted.g_minus] {
                assert!(plane.iter().all(|&g| (0.0..=cfg.g_max).contains(&g)));
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let cfg = RpuConfig::ideal();
        let w = array![[1.0, 2.0], [3.0, -4.0]];
        let tiles = map_weights(w.view(), &cfg, &mut derive_rng(0, &[9]));
        assert!(matches!(
            mvm(&tiles[0], &[1.0], &cfg),
            Err(Error::ShapeError { .. })
        ));
    }
}
