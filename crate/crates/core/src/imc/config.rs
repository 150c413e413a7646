//! Analog hardware model parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How signed weights are laid out on non-negative conductance arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingScheme {
    /// Positive and negative planes in alternate columns of one tile.
    ColumnDifferential,
    /// Positive and negative planes on separate tiles.
    TileDifferential,
}

/// Resistive-processing-unit configuration: tile geometry, conductance
/// range, programming noise, drift statistics, and converter resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RpuConfig {
    /// Crossbar tile rows = columns.
    pub tile_size: u32,
    /// Conductance ceiling in microsiemens.
    pub g_max: f64,
    /// Additive programming noise, std as a fraction of `g_max`.
    pub prog_noise_std: f64,
    /// Mean drift exponent.
    pub nu_mean: f64,
    /// Per-device drift exponent std (clipped at zero).
    pub nu_std: f64,
    /// Reference read time after programming, seconds.
    pub t0: f64,
    /// Input converter resolution in bits; 0 disables quantization.
    pub dac_bits: u32,
    /// Output converter resolution in bits; 0 disables quantization.
    pub adc_bits: u32,
    /// Input clipping bound; 0 means auto (per-call max magnitude).
    pub dac_bound: f64,
    /// Output clipping bound; 0 means auto (per-call max magnitude).
    pub adc_bound: f64,
    pub mapping: MappingScheme,
}

impl Default for RpuConfig {
    fn default() -> Self {
        RpuConfig {
            tile_size: 512,
            g_max: 25.0,
            prog_noise_std: 0.1,
            nu_mean: 0.06,
            nu_std: 0.02,
            t0: 20.0,
            dac_bits: 0,
            adc_bits: 0,
            dac_bound: 0.0,
            adc_bound: 0.0,
            mapping: MappingScheme::ColumnDifferential,
        }
    }
}

impl RpuConfig {
    /// Configuration with every non-ideality disabled.
    pub fn ideal() -> Self {
        RpuConfig {
            prog_noise_std: 0.0,
            nu_mean: 0.0,
            nu_std: 0.0,
            ..RpuConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tile_size < 1 {
            return Err(Error::Config("rpu.tile_size must be >= 1".into()));
        }
        if self.g_max <= 0.0 {
            return Err(Error::Config("rpu.g_max must be positive".into()));
        }
        if self.prog_noise_std < 0.0 || self.nu_std < 0.0 {
            return Err(Error::Config("rpu noise parameters must be >= 0".into()));
        }
        if self.t0 <= 0.0 {
            return Err(Error::Config("rpu.t0 must be positive".into()));
        }
        Ok(())
    }

    /// Stable fingerprint used to key dataset rows per hardware configuration.
    pub fn fingerprint(&self) -> String {
        format!(
            "t{}_g{}_n{}_nu{}_{}_t0{}_d{}a{}_{}",
            self.tile_size,
            self.g_max,
            self.prog_noise_std,
            self.nu_mean,
            self.nu_std,
            self.t0,
            self.dac_bits,
            self.adc_bits,
            match self.mapping {
                MappingScheme::ColumnDifferential => "cd",
                MappingScheme::TileDifferential => "td",
            }
        )
    }
}
