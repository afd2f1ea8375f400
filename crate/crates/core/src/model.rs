//! Domain types and the energy/rate bookkeeping shared by every solver.
//!
//! Everything is in SI units: W, Hz, s and bit. Logarithmic units (dBm, dB)
//! only appear in the conversion helpers used at configuration boundaries.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Largest admissible rate exponent `r_dl·T/(t·W)` in bits.
pub const DEFAULT_EXPONENT_CAP: f64 = 1024.0;

/// Relative slack accepted when checking `t ≤ T` and amplifier drive limits.
const BOUND_SLACK: f64 = 1e-12;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// How the subarrays combine at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BeamformingMode {
    /// Per-antenna CSI available; antenna amplitudes add constructively.
    Coherent,
    /// Only subarray-level combining; each subarray sees the magnitude of its complex sum.
    NonCoherent,
}

impl BeamformingMode {
    pub const ALL: [BeamformingMode; 2] = [BeamformingMode::Coherent, BeamformingMode::NonCoherent];

    pub fn as_str(self) -> &'static str {
        match self {
            BeamformingMode::Coherent => "coherent",
            BeamformingMode::NonCoherent => "noncoherent",
        }
    }
}

impl fmt::Display for BeamformingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BeamformingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coherent" => Ok(BeamformingMode::Coherent),
            "noncoherent" | "non-coherent" => Ok(BeamformingMode::NonCoherent),
            other => Err(invalid(
                "mode",
                format!("unknown beamforming mode `{other}`"),
            )),
        }
    }
}

/// Slot, bandwidth, rate and array geometry of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// System bandwidth `W` in Hz.
    pub bandwidth: f64,
    /// Slot duration `T` in seconds.
    pub slot: f64,
    /// Noise power spectral density `N0` in W/Hz.
    pub noise_psd: f64,
    /// Target average rate `r_dl` in bit/s.
    pub target_rate: f64,
    /// Number of analog subarrays `M`.
    pub num_subarrays: usize,
    /// Antennas per subarray `K`.
    pub antennas_per_subarray: usize,
    pub mode: BeamformingMode,
}

impl Default for SystemConfig {
    /// Reference scenario: 10 MHz, 10 ms slots, -174 dBm/Hz noise, 60 Mbps, 16x16 array.
    fn default() -> Self {
        SystemConfig {
            bandwidth: 10e6,
            slot: 10e-3,
            noise_psd: dbm_to_watts(-174.0),
            target_rate: 60e6,
            num_subarrays: 16,
            antennas_per_subarray: 16,
            mode: BeamformingMode::Coherent,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        positive("bandwidth", self.bandwidth)?;
        positive("slot", self.slot)?;
        positive("noise_psd", self.noise_psd)?;
        positive("target_rate", self.target_rate)?;
        if self.num_subarrays == 0 {
            return Err(invalid("num_subarrays", "must be at least 1"));
        }
        if self.antennas_per_subarray == 0 {
            return Err(invalid("antennas_per_subarray", "must be at least 1"));
        }
        Ok(())
    }

    /// Bits delivered per slot, `r_dl·T`.
    pub fn bits_per_slot(&self) -> f64 {
        self.target_rate * self.slot
    }

    pub fn with_mode(&self, mode: BeamformingMode) -> Self {
        SystemConfig {
            mode,
            ..self.clone()
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

/// Traditional power amplifier of one subarray: consumed power grows with the
/// square root of the radiated power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaModel {
    /// Maximum output power of a subarray (`K` times the per-antenna maximum), W.
    pub p_max: f64,
    /// Maximum drain efficiency, in (0, 1].
    pub eta_max: f64,
}

impl Default for PaModel {
    /// 46 dBm subarray output, 35 % peak efficiency.
    fn default() -> Self {
        PaModel {
            p_max: dbm_to_watts(46.0),
            eta_max: 0.35,
        }
    }
}

impl PaModel {
    pub fn new(p_max: f64, eta_max: f64) -> Result<Self> {
        let pa = PaModel { p_max, eta_max };
        pa.validate()?;
        Ok(pa)
    }

    /// Builds the subarray-level model from per-antenna limits.
    pub fn from_per_antenna(p_max_antenna: f64, eta_max: f64, antennas: usize) -> Result<Self> {
        PaModel::new(p_max_antenna * antennas as f64, eta_max)
    }

    pub fn validate(&self) -> Result<()> {
        positive("p_max", self.p_max)?;
        if !(self.eta_max > 0.0 && self.eta_max <= 1.0) {
            return Err(invalid(
                "eta_max",
                format!("must lie in (0, 1], got {}", self.eta_max),
            ));
        }
        Ok(())
    }

    /// Largest admissible transmit power `P_max·η_max²`, at which the amplifier draws `P_max`.
    pub fn full_drive_input(&self) -> f64 {
        self.p_max * self.eta_max * self.eta_max
    }

    /// Consumed power `√(p·P_max)/η_max` without a domain check.
    pub fn consumption(&self, p: f64) -> f64 {
        (p.max(0.0) * self.p_max).sqrt() / self.eta_max
    }

    /// Auxiliary variable `x = (P_max/η_max²)·p`, whose square root is the consumed power.
    pub fn to_aux(&self, p: f64) -> f64 {
        p * self.p_max / (self.eta_max * self.eta_max)
    }

    pub fn from_aux(&self, x: f64) -> f64 {
        x * self.eta_max * self.eta_max / self.p_max
    }

    /// Upper bound of the auxiliary variable, `P_max²`.
    pub fn aux_max(&self) -> f64 {
        self.p_max * self.p_max
    }
}

/// Rate-dependent part of the circuit power, as a function of the instantaneous rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DynamicPower {
    /// `ε·R_a`, with `ε` in J/bit.
    Linear { per_bit: f64 },
    /// `c·R_a^γ` with `γ ≥ 1`; convex in `R_a`.
    PowerLaw { coefficient: f64, exponent: f64 },
}

impl DynamicPower {
    pub fn eval(&self, rate: f64) -> f64 {
        match *self {
            DynamicPower::Linear { per_bit } => per_bit * rate,
            DynamicPower::PowerLaw {
                coefficient,
                exponent,
            } => coefficient * rate.max(0.0).powf(exponent),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, DynamicPower::Linear { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            DynamicPower::Linear { per_bit } => non_negative("epsilon", per_bit),
            DynamicPower::PowerLaw {
                coefficient,
                exponent,
            } => {
                non_negative("dynamic_coefficient", coefficient)?;
                if !(exponent.is_finite() && exponent >= 1.0) {
                    return Err(invalid(
                        "dynamic_exponent",
                        format!("must be >= 1, got {exponent}"),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Static, idle and rate-dependent circuit power of one subarray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitModel {
    /// Drawn while transmitting, independent of rate (W).
    pub p_base: f64,
    /// Drawn while idle (W).
    pub p_idle: f64,
    pub dynamic: DynamicPower,
}

impl Default for CircuitModel {
    /// 50 mW static, 30 mW idle, 5 mW/Mbps dynamic.
    fn default() -> Self {
        CircuitModel {
            p_base: 50e-3,
            p_idle: 30e-3,
            dynamic: DynamicPower::Linear {
                per_bit: 5e-3 / 1e6,
            },
        }
    }
}

impl CircuitModel {
    pub fn validate(&self) -> Result<()> {
        non_negative("p_base", self.p_base)?;
        non_negative("p_idle", self.p_idle)?;
        self.dynamic.validate()
    }

    pub fn dynamic_power(&self, rate: f64) -> f64 {
        self.dynamic.eval(rate)
    }
}

/// One block-fading draw of the per-antenna channel coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub num_subarrays: usize,
    pub antennas_per_subarray: usize,
    /// Row-major `M×K` coefficients, path loss included.
    pub coefficients: Vec<Complex64>,
    pub distance: f64,
    /// Shadowing draw in dB.
    pub shadowing_db: f64,
}

impl ChannelRealization {
    pub fn new(
        num_subarrays: usize,
        antennas_per_subarray: usize,
        coefficients: Vec<Complex64>,
        distance: f64,
        shadowing_db: f64,
    ) -> Result<Self> {
        if num_subarrays == 0 || antennas_per_subarray == 0 {
            return Err(invalid("coefficients", "empty array"));
        }
        if coefficients.len() != num_subarrays * antennas_per_subarray {
            return Err(invalid(
                "coefficients",
                format!(
                    "expected {}x{} = {} entries, got {}",
                    num_subarrays,
                    antennas_per_subarray,
                    num_subarrays * antennas_per_subarray,
                    coefficients.len()
                ),
            ));
        }
        if coefficients
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(invalid("coefficients", "non-finite channel coefficient"));
        }
        Ok(ChannelRealization {
            num_subarrays,
            antennas_per_subarray,
            coefficients,
            distance,
            shadowing_db,
        })
    }

    pub fn subarray(&self, m: usize) -> &[Complex64] {
        let k = self.antennas_per_subarray;
        &self.coefficients[m * k..(m + 1) * k]
    }

    pub fn matches(&self, cfg: &SystemConfig) -> bool {
        self.num_subarrays == cfg.num_subarrays
            && self.antennas_per_subarray == cfg.antennas_per_subarray
    }
}

/// Per-subarray effective amplitudes `h_m`, rescaled gains `κ_m` and the
/// descending-`κ` activation order.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub mode: BeamformingMode,
    pub h: Vec<f64>,
    pub kappa: Vec<f64>,
    /// `order[i]` is the original index of the subarray ranked `i` (0-based) by `κ`.
    pub order: Vec<usize>,
}

impl EffectiveChannel {
    /// Builds `κ_m = (η_max/√P_max)·h_m` and the activation order. Ties keep the lower index first.
    pub fn from_gains(h: Vec<f64>, mode: BeamformingMode, pa: &PaModel) -> Result<Self> {
        if h.is_empty() {
            return Err(invalid("h", "no subarrays"));
        }
        if h.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid(
                "h",
                "effective gains must be finite and non-negative",
            ));
        }
        let scale = pa.eta_max / pa.p_max.sqrt();
        let kappa: Vec<f64> = h.iter().map(|v| v * scale).collect();
        let mut order: Vec<usize> = (0..h.len()).collect();
        order.sort_by(|&a, &b| kappa[b].total_cmp(&kappa[a]));
        Ok(EffectiveChannel {
            mode,
            h,
            kappa,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `κ` of the subarray ranked `rank` (0-based).
    pub fn ranked_kappa(&self, rank: usize) -> f64 {
        self.kappa[self.order[rank]]
    }

    /// Received power delivered by per-subarray transmit powers `p` (W).
    pub fn received_power(&self, p: &[f64]) -> f64 {
        match self.mode {
            BeamformingMode::NonCoherent => p.iter().zip(&self.h).map(|(p, h)| p * h * h).sum(),
            BeamformingMode::Coherent => {
                let amp: f64 = p
                    .iter()
                    .zip(&self.h)
                    .map(|(p, h)| p.max(0.0).sqrt() * h)
                    .sum();
                amp * amp
            }
        }
    }

    /// Received power expressed through the auxiliary variables `x`.
    pub fn received_power_aux(&self, x: &[f64]) -> f64 {
        match self.mode {
            BeamformingMode::NonCoherent => x.iter().zip(&self.kappa).map(|(x, k)| x * k * k).sum(),
            BeamformingMode::Coherent => {
                let amp: f64 = x
                    .iter()
                    .zip(&self.kappa)
                    .map(|(x, k)| x.max(0.0).sqrt() * k)
                    .sum();
                amp * amp
            }
        }
    }
}

/// Energy spent in one slot, split by consumer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub pa: f64,
    pub static_circuit: f64,
    pub dynamic_circuit: f64,
    pub idle: f64,
    pub total: f64,
}

/// Optimal duration, active count and powers for one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationSolution {
    /// Transmit duration in seconds.
    pub t_star: f64,
    /// Number of subarrays powered for transmission.
    pub m_star: usize,
    /// Per-subarray transmit powers in original subarray order (W).
    pub powers: Vec<f64>,
    pub energy: EnergyBreakdown,
    /// Energy efficiency in bit/J.
    pub ee: f64,
}

pub fn noise_power(cfg: &SystemConfig) -> f64 {
    cfg.noise_psd * cfg.bandwidth
}

/// Spectral efficiency `r_dl·T/(t·W)` required when transmitting for `t` seconds.
pub fn rate_exponent(t: f64, cfg: &SystemConfig) -> f64 {
    cfg.bits_per_slot() / (t * cfg.bandwidth)
}

/// Received power needed to deliver the slot's bits in `t` seconds,
/// `(2^{r_dl·T/(t·W)} − 1)·σ²`.
pub fn theta(t: f64, cfg: &SystemConfig) -> Result<f64> {
    theta_capped(t, cfg, DEFAULT_EXPONENT_CAP)
}

pub fn theta_capped(t: f64, cfg: &SystemConfig, cap: f64) -> Result<f64> {
    if !(t > 0.0 && t <= cfg.slot * (1.0 + BOUND_SLACK)) {
        return Err(invalid(
            "t",
            format!("duration {t} outside (0, {}]", cfg.slot),
        ));
    }
    let exponent = rate_exponent(t, cfg);
    if !(exponent <= cap) {
        return Err(Error::ExponentOverflow { exponent, cap });
    }
    let sigma2 = noise_power(cfg);
    let direct = sigma2 * (exponent * LN_2).exp_m1();
    if direct.is_finite() {
        return Ok(direct);
    }
    // 2^e overflows on its own; fold σ² into the exponent first.
    let v = (exponent * LN_2 + sigma2.ln()).exp() * -(-exponent * LN_2).exp_m1();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::ExponentOverflow { exponent, cap })
    }
}

/// Average rate achieved over the slot when receiving power `s` for `t` seconds.
pub fn achieved_rate(t: f64, s: f64, cfg: &SystemConfig) -> f64 {
    t / cfg.slot * cfg.bandwidth * (s / noise_power(cfg)).ln_1p() / LN_2
}

/// Consumed amplifier power for transmit power `p`.
pub fn pa_power(p: f64, pa: &PaModel) -> Result<f64> {
    let max = pa.full_drive_input();
    if !(p >= 0.0 && p <= max * (1.0 + BOUND_SLACK)) {
        return Err(Error::AmplifierDomain { input: p, max });
    }
    Ok(pa.consumption(p.min(max)))
}

/// Slot energy with every subarray carrying `p > 0` counted as active.
pub fn total_energy(
    t: f64,
    powers: &[f64],
    circuit: &CircuitModel,
    pa: &PaModel,
    cfg: &SystemConfig,
) -> EnergyBreakdown {
    let active = powers.iter().filter(|p| **p > 0.0).count();
    total_energy_with_active(t, powers, active, circuit, pa, cfg)
}

/// Slot energy with an explicit number of active subarrays.
///
/// Active subarrays pay amplifier, static and dynamic circuit power for `t`
/// and idle power for `T − t`; the rest idle for the whole slot.
pub fn total_energy_with_active(
    t: f64,
    powers: &[f64],
    active: usize,
    circuit: &CircuitModel,
    pa: &PaModel,
    cfg: &SystemConfig,
) -> EnergyBreakdown {
    let m = active as f64;
    let inactive = cfg.num_subarrays.saturating_sub(active) as f64;
    let pa_energy: f64 = powers.iter().map(|&p| pa.consumption(p)).sum::<f64>() * t;
    let static_circuit = m * circuit.p_base * t;
    let dynamic_circuit = if active == 0 {
        0.0
    } else {
        m * circuit.dynamic_power(cfg.bits_per_slot() / t) * t
    };
    let idle = m * circuit.p_idle * (cfg.slot - t) + inactive * circuit.p_idle * cfg.slot;
    EnergyBreakdown {
        pa: pa_energy,
        static_circuit,
        dynamic_circuit,
        idle,
        total: pa_energy + static_circuit + dynamic_circuit + idle,
    }
}

/// Bits per Joule, `r_dl·T / E_total`.
pub fn energy_efficiency(energy: &EnergyBreakdown, cfg: &SystemConfig) -> f64 {
    cfg.bits_per_slot() / energy.total
}
