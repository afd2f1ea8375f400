//! Rayleigh block-fading channels with log-distance path loss and lognormal
//! shadowing, and their reduction to per-subarray effective gains.
//!
//! Every realization is a pure function of `(seed, trial)`: the generator is
//! ChaCha8 seeded from `seed` with the stream selected by `trial`, so sweeps
//! reproduce bit-for-bit regardless of how trials are scheduled.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::model::{BeamformingMode, ChannelRealization, EffectiveChannel, PaModel, SystemConfig};

/// `PL(dB) = intercept + slope·log10(d) + ξ`, `ξ ~ N(0, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    /// Link distance in meters.
    pub distance: f64,
    /// Shadowing standard deviation in dB.
    pub shadowing_sigma_db: f64,
    pub intercept_db: f64,
    /// dB per decade of distance.
    pub slope_db: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            distance: 200.0,
            shadowing_sigma_db: 5.8,
            intercept_db: 61.4,
            slope_db: 20.0,
        }
    }
}

impl PathLossModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(invalid(
                "distance",
                format!("must be > 0, got {}", self.distance),
            ));
        }
        if !(self.shadowing_sigma_db.is_finite() && self.shadowing_sigma_db >= 0.0) {
            return Err(invalid("shadowing_sigma_db", "must be >= 0"));
        }
        if !self.intercept_db.is_finite() || !self.slope_db.is_finite() {
            return Err(invalid("path_loss", "intercept and slope must be finite"));
        }
        Ok(())
    }

    /// Deterministic part of the path loss in dB.
    pub fn mean_loss_db(&self) -> f64 {
        self.intercept_db + self.slope_db * self.distance.log10()
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws one realization keyed by `(seed, trial)`.
///
/// A single shadowing value is shared by the whole array; each antenna gets an
/// independent unit-variance circularly-symmetric complex Gaussian fade.
pub fn sample_channels(
    cfg: &SystemConfig,
    pl: &PathLossModel,
    seed: u64,
    trial: u64,
) -> ChannelRealization {
    let mut rng = trial_rng(seed, trial);
    let xi: f64 = rng.sample::<f64, _>(StandardNormal) * pl.shadowing_sigma_db;
    let amplitude = 10f64.powf(-(pl.mean_loss_db() + xi) / 20.0);
    let n = cfg.num_subarrays * cfg.antennas_per_subarray;
    let coefficients = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * (amplitude * std::f64::consts::FRAC_1_SQRT_2)
        })
        .collect();
    ChannelRealization {
        num_subarrays: cfg.num_subarrays,
        antennas_per_subarray: cfg.antennas_per_subarray,
        coefficients,
        distance: pl.distance,
        shadowing_db: xi,
    }
}

/// Per-subarray effective amplitude:
/// non-coherent `|Σ_k h_m^k|/√K`, coherent `Σ_k |h_m^k|/√K`.
pub fn effective_amplitudes(real: &ChannelRealization, mode: BeamformingMode) -> Vec<f64> {
    let norm = (real.antennas_per_subarray as f64).sqrt();
    (0..real.num_subarrays)
        .map(|m| {
            let row = real.subarray(m);
            match mode {
                BeamformingMode::NonCoherent => row.iter().sum::<Complex64>().norm() / norm,
                BeamformingMode::Coherent => row.iter().map(|c| c.norm()).sum::<f64>() / norm,
            }
        })
        .collect()
}

pub fn effective_gains(
    real: &ChannelRealization,
    mode: BeamformingMode,
    pa: &PaModel,
) -> Result<EffectiveChannel> {
    EffectiveChannel::from_gains(effective_amplitudes(real, mode), mode, pa)
}

/// Writes realizations as CSV rows `trial,m,k,re,im`.
pub fn write_channel_dump<W: Write>(
    out: W,
    realizations: &[(u64, ChannelRealization)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::ChannelDump(e.to_string());
    w.write_record(["trial", "m", "k", "re", "im"])
        .map_err(err)?;
    for (trial, real) in realizations {
        for m in 0..real.num_subarrays {
            for (k, c) in real.subarray(m).iter().enumerate() {
                w.write_record([
                    trial.to_string(),
                    m.to_string(),
                    k.to_string(),
                    c.re.to_string(),
                    c.im.to_string(),
                ])
                .map_err(err)?;
            }
        }
    }
    w.flush().map_err(|e| Error::ChannelDump(e.to_string()))
}

/// Reads a `trial,m,k,re,im` dump. Every trial must cover a full `M×K` grid;
/// distance and shadowing are not part of the format and read back as zero.
pub fn read_channel_dump<R: Read>(input: R) -> Result<Vec<(u64, ChannelRealization)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut by_trial: BTreeMap<u64, BTreeMap<(usize, usize), Complex64>> = BTreeMap::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::ChannelDump(e.to_string()))?;
        if rec.len() != 5 {
            return Err(Error::ChannelDump(format!(
                "row {}: expected 5 columns",
                line + 2
            )));
        }
        let bad = |what: &str| Error::ChannelDump(format!("row {}: bad {what}", line + 2));
        let trial: u64 = rec[0].trim().parse().map_err(|_| bad("trial"))?;
        let m: usize = rec[1].trim().parse().map_err(|_| bad("m"))?;
        let k: usize = rec[2].trim().parse().map_err(|_| bad("k"))?;
        let re: f64 = rec[3].trim().parse().map_err(|_| bad("re"))?;
        let im: f64 = rec[4].trim().parse().map_err(|_| bad("im"))?;
        if by_trial
            .entry(trial)
            .or_default()
            .insert((m, k), Complex64::new(re, im))
            .is_some()
        {
            return Err(Error::ChannelDump(format!(
                "row {}: duplicate entry",
                line + 2
            )));
        }
    }
    by_trial
        .into_iter()
        .map(|(trial, cells)| {
            let m_count = cells.keys().map(|(m, _)| m + 1).max().unwrap_or(0);
            let k_count = cells.keys().map(|(_, k)| k + 1).max().unwrap_or(0);
            if cells.len() != m_count * k_count {
                return Err(Error::ChannelDump(format!(
                    "trial {trial}: {} entries do not fill a {m_count}x{k_count} grid",
                    cells.len()
                )));
            }
            let coefficients = cells.into_values().collect();
            let real = ChannelRealization::new(m_count, k_count, coefficients, 0.0, 0.0)?;
            Ok((trial, real))
        })
        .collect()
}
