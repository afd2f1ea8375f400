//! Flat `key = value` scenario files.
//!
//! Keys carry their units in the name (`p_max_dbm`, `slot_ms`, ...). Missing
//! keys fall back to the reference scenario; unknown keys are rejected so a
//! typo cannot silently leave a default in place.

use std::path::Path;

use hybrid_ee::model::dbm_to_watts;
use hybrid_ee::{
    BeamformingMode, CircuitModel, DynamicPower, PaModel, PathLossModel, SchemeId, SystemConfig,
};
use ini::Ini;

use crate::SimError;

/// Default Monte Carlo trials per sweep point.
pub const DEFAULT_TRIALS: usize = 200;

/// Parameter varied by a sweep, with the unit its values are given in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    /// Target rate, Mbps.
    Rate,
    /// Number of subarrays.
    Subarrays,
    /// Antennas per subarray.
    Antennas,
    /// Subarray amplifier maximum, dBm.
    PMax,
    EtaMax,
    /// Dynamic circuit coefficient, mW/Mbps.
    Epsilon,
    /// Static circuit power, mW.
    PBase,
    /// Slot duration, ms.
    Slot,
    /// Link distance, m.
    Distance,
}

impl SweptParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParameter::Rate => "r_dl",
            SweptParameter::Subarrays => "M",
            SweptParameter::Antennas => "K",
            SweptParameter::PMax => "P_max",
            SweptParameter::EtaMax => "eta_max",
            SweptParameter::Epsilon => "epsilon",
            SweptParameter::PBase => "P_base",
            SweptParameter::Slot => "T",
            SweptParameter::Distance => "distance",
        }
    }

    /// Axis label with units.
    pub fn label(self) -> &'static str {
        match self {
            SweptParameter::Rate => "r_dl (Mbps)",
            SweptParameter::Subarrays => "M (subarrays)",
            SweptParameter::Antennas => "K (antennas per subarray)",
            SweptParameter::PMax => "P_max (dBm)",
            SweptParameter::EtaMax => "eta_max",
            SweptParameter::Epsilon => "epsilon (mW/Mbps)",
            SweptParameter::PBase => "P_base (mW)",
            SweptParameter::Slot => "T (ms)",
            SweptParameter::Distance => "distance (m)",
        }
    }

    pub fn parse(s: &str) -> Result<Self, SimError> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "r_dl" | "rate" | "rate_mbps" => SweptParameter::Rate,
            "m" | "num_subarrays" => SweptParameter::Subarrays,
            "k" | "antennas_per_subarray" => SweptParameter::Antennas,
            "p_max" | "p_max_dbm" => SweptParameter::PMax,
            "eta_max" => SweptParameter::EtaMax,
            "epsilon" | "epsilon_mw_per_mbps" => SweptParameter::Epsilon,
            "p_base" | "p_base_mw" => SweptParameter::PBase,
            "t" | "slot" | "slot_ms" => SweptParameter::Slot,
            "distance" | "distance_m" => SweptParameter::Distance,
            other => {
                return Err(SimError::config(
                    "sweep_parameter",
                    format!("unknown parameter '{other}'"),
                ))
            }
        })
    }

    fn is_integer(self) -> bool {
        matches!(self, SweptParameter::Subarrays | SweptParameter::Antennas)
    }
}

/// Physical scenario in user-facing units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub p_max_dbm: f64,
    pub eta_max: f64,
    pub n0_dbm_per_hz: f64,
    pub bandwidth_mhz: f64,
    pub slot_ms: f64,
    pub rate_mbps: f64,
    pub num_subarrays: usize,
    pub antennas_per_subarray: usize,
    pub distance_m: f64,
    pub shadowing_sigma_db: f64,
    pub pl_intercept_db: f64,
    pub pl_slope_db: f64,
    pub p_idle_mw: f64,
    pub p_base_mw: f64,
    pub epsilon_mw_per_mbps: f64,
    /// `1` selects the linear dynamic term; larger values a convex power law.
    pub dynamic_exponent: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            p_max_dbm: 46.0,
            eta_max: 0.35,
            n0_dbm_per_hz: -174.0,
            bandwidth_mhz: 10.0,
            slot_ms: 10.0,
            rate_mbps: 60.0,
            num_subarrays: 16,
            antennas_per_subarray: 16,
            distance_m: 200.0,
            shadowing_sigma_db: 5.8,
            pl_intercept_db: 61.4,
            pl_slope_db: 20.0,
            p_idle_mw: 30.0,
            p_base_mw: 50.0,
            epsilon_mw_per_mbps: 5.0,
            dynamic_exponent: 1.0,
        }
    }
}

/// Solver-facing models built from a [`Scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct Models {
    pub system: SystemConfig,
    pub pa: PaModel,
    pub circuit: CircuitModel,
    pub path_loss: PathLossModel,
}

impl Scenario {
    pub fn models(&self, mode: BeamformingMode) -> Result<Models, SimError> {
        let system = SystemConfig {
            bandwidth: self.bandwidth_mhz * 1e6,
            slot: self.slot_ms * 1e-3,
            noise_psd: dbm_to_watts(self.n0_dbm_per_hz),
            target_rate: self.rate_mbps * 1e6,
            num_subarrays: self.num_subarrays,
            antennas_per_subarray: self.antennas_per_subarray,
            mode,
        };
        system.validate()?;
        let pa = PaModel::new(dbm_to_watts(self.p_max_dbm), self.eta_max)?;
        // ε in mW/Mbps is numerically W per (Mbit/s)·1e-3
        let eps = self.epsilon_mw_per_mbps * 1e-3;
        let dynamic = if self.dynamic_exponent == 1.0 {
            DynamicPower::Linear { per_bit: eps / 1e6 }
        } else {
            DynamicPower::PowerLaw {
                coefficient: eps / 1e6f64.powf(self.dynamic_exponent),
                exponent: self.dynamic_exponent,
            }
        };
        let circuit = CircuitModel {
            p_base: self.p_base_mw * 1e-3,
            p_idle: self.p_idle_mw * 1e-3,
            dynamic,
        };
        circuit.validate()?;
        let path_loss = PathLossModel {
            distance: self.distance_m,
            shadowing_sigma_db: self.shadowing_sigma_db,
            intercept_db: self.pl_intercept_db,
            slope_db: self.pl_slope_db,
        };
        path_loss.validate()?;
        Ok(Models {
            system,
            pa,
            circuit,
            path_loss,
        })
    }

    /// Copy with one parameter replaced. With `fixed_total_bits` set the rate
    /// follows the slot so that `r_dl·T` stays constant.
    pub fn with_value(
        &self,
        p: SweptParameter,
        v: f64,
        fixed_total_bits: Option<f64>,
    ) -> Result<Scenario, SimError> {
        let mut s = self.clone();
        if p.is_integer() && (v.fract() != 0.0 || v < 1.0) {
            return Err(SimError::config(
                "sweep_values",
                format!("{} needs positive integers, got {v}", p.as_str()),
            ));
        }
        match p {
            SweptParameter::Rate => s.rate_mbps = v,
            SweptParameter::Subarrays => s.num_subarrays = v as usize,
            SweptParameter::Antennas => s.antennas_per_subarray = v as usize,
            SweptParameter::PMax => s.p_max_dbm = v,
            SweptParameter::EtaMax => s.eta_max = v,
            SweptParameter::Epsilon => s.epsilon_mw_per_mbps = v,
            SweptParameter::PBase => s.p_base_mw = v,
            SweptParameter::Slot => s.slot_ms = v,
            SweptParameter::Distance => s.distance_m = v,
        }
        if let Some(bits) = fixed_total_bits {
            s.rate_mbps = bits / (s.slot_ms * 1e-3) / 1e6;
        }
        Ok(s)
    }
}

/// Everything a sweep needs besides the base scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    /// Strictly monotone values in the parameter's unit.
    pub values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub schemes: Vec<SchemeId>,
    pub modes: Vec<BeamformingMode>,
    /// Bits per slot held fixed while the slot is swept.
    pub fixed_total_bits: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.values.is_empty() {
            return Err(SimError::config(
                "sweep_values",
                "at least one value required",
            ));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(SimError::config("sweep_values", "values must be finite"));
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(SimError::config(
                "sweep_values",
                "values must be strictly monotone",
            ));
        }
        if self.trials == 0 {
            return Err(SimError::config("trials", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(SimError::config("schemes", "at least one scheme required"));
        }
        if self.modes.is_empty() {
            return Err(SimError::config("modes", "at least one mode required"));
        }
        if let Some(b) = self.fixed_total_bits {
            if !(b.is_finite() && b > 0.0) {
                return Err(SimError::config("fixed_total_kbits", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub sweep: SweepSpec,
}

impl Default for SimConfig {
    fn default() -> Self {
        let scenario = Scenario::default();
        SimConfig {
            sweep: SweepSpec {
                parameter: SweptParameter::Rate,
                values: vec![scenario.rate_mbps],
                trials: DEFAULT_TRIALS,
                seed: 1,
                schemes: SchemeId::ALL.to_vec(),
                modes: BeamformingMode::ALL.to_vec(),
                fixed_total_bits: None,
            },
            scenario,
        }
    }
}

fn parse_f64(key: &'static str, v: &str) -> Result<f64, SimError> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| SimError::config(key, format!("expected a number, got '{v}'")))
}

fn parse_usize(key: &'static str, v: &str) -> Result<usize, SimError> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| SimError::config(key, format!("expected a non-negative integer, got '{v}'")))
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// `coherent`, `noncoherent` or `both`.
pub fn parse_modes(v: &str) -> Result<Vec<BeamformingMode>, SimError> {
    if v.trim().eq_ignore_ascii_case("both") {
        return Ok(BeamformingMode::ALL.to_vec());
    }
    split_list(v)
        .map(|s| s.parse::<BeamformingMode>().map_err(SimError::from))
        .collect()
}

/// Scheme names or `all`.
pub fn parse_schemes(v: &str) -> Result<Vec<SchemeId>, SimError> {
    if v.trim().eq_ignore_ascii_case("all") {
        return Ok(SchemeId::ALL.to_vec());
    }
    split_list(v)
        .map(|s| s.parse::<SchemeId>().map_err(SimError::from))
        .collect()
}

impl SimConfig {
    pub fn from_path(path: &Path) -> Result<SimConfig, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::ConfigIo {
            path: path.display().to_string(),
            source: e,
        })?;
        SimConfig::from_ini_str(&text)
    }

    pub fn from_ini_str(text: &str) -> Result<SimConfig, SimError> {
        let ini =
            Ini::load_from_str(text).map_err(|e| SimError::config("config", e.to_string()))?;
        if let Some(name) = ini.sections().flatten().next() {
            return Err(SimError::config(
                "config",
                format!("sections are not supported, found [{name}]"),
            ));
        }
        let mut cfg = SimConfig::default();
        let mut sweep_values: Option<Vec<f64>> = None;
        let Some(props) = ini.section(None::<String>) else {
            return Ok(cfg);
        };
        let s = &mut cfg.scenario;
        for (key, v) in props.iter() {
            match key.trim() {
                "p_max_dbm" => s.p_max_dbm = parse_f64("p_max_dbm", v)?,
                "eta_max" => s.eta_max = parse_f64("eta_max", v)?,
                "n0_dbm_per_hz" => s.n0_dbm_per_hz = parse_f64("n0_dbm_per_hz", v)?,
                "bandwidth_mhz" => s.bandwidth_mhz = parse_f64("bandwidth_mhz", v)?,
                "slot_ms" => s.slot_ms = parse_f64("slot_ms", v)?,
                "rate_mbps" => s.rate_mbps = parse_f64("rate_mbps", v)?,
                "num_subarrays" => s.num_subarrays = parse_usize("num_subarrays", v)?,
                "antennas_per_subarray" => {
                    s.antennas_per_subarray = parse_usize("antennas_per_subarray", v)?
                }
                "distance_m" => s.distance_m = parse_f64("distance_m", v)?,
                "shadowing_sigma_db" => s.shadowing_sigma_db = parse_f64("shadowing_sigma_db", v)?,
                "pl_intercept_db" => s.pl_intercept_db = parse_f64("pl_intercept_db", v)?,
                "pl_slope_db" => s.pl_slope_db = parse_f64("pl_slope_db", v)?,
                "p_idle_mw" => s.p_idle_mw = parse_f64("p_idle_mw", v)?,
                "p_base_mw" => s.p_base_mw = parse_f64("p_base_mw", v)?,
                "epsilon_mw_per_mbps" => {
                    s.epsilon_mw_per_mbps = parse_f64("epsilon_mw_per_mbps", v)?
                }
                "dynamic_exponent" => s.dynamic_exponent = parse_f64("dynamic_exponent", v)?,
                "trials" => cfg.sweep.trials = parse_usize("trials", v)?,
                "seed" => {
                    cfg.sweep.seed = v.trim().parse().map_err(|_| {
                        SimError::config("seed", format!("expected a 64-bit integer, got '{v}'"))
                    })?
                }
                "sweep_parameter" => cfg.sweep.parameter = SweptParameter::parse(v)?,
                "sweep_values" => {
                    sweep_values = Some(
                        split_list(v)
                            .map(|x| parse_f64("sweep_values", x))
                            .collect::<Result<_, _>>()?,
                    )
                }
                "fixed_total_kbits" => {
                    let kb = parse_f64("fixed_total_kbits", v)?;
                    cfg.sweep.fixed_total_bits = Some(kb * 1e3);
                }
                "modes" => cfg.sweep.modes = parse_modes(v)?,
                "schemes" => cfg.sweep.schemes = parse_schemes(v)?,
                other => return Err(SimError::config("config", format!("unknown key '{other}'"))),
            }
        }
        cfg.sweep.values = match sweep_values {
            Some(v) => v,
            None => vec![match cfg.sweep.parameter {
                SweptParameter::Rate => s.rate_mbps,
                SweptParameter::Subarrays => s.num_subarrays as f64,
                SweptParameter::Antennas => s.antennas_per_subarray as f64,
                SweptParameter::PMax => s.p_max_dbm,
                SweptParameter::EtaMax => s.eta_max,
                SweptParameter::Epsilon => s.epsilon_mw_per_mbps,
                SweptParameter::PBase => s.p_base_mw,
                SweptParameter::Slot => s.slot_ms,
                SweptParameter::Distance => s.distance_m,
            }],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the sweep and every scenario it will visit.
    pub fn validate(&self) -> Result<(), SimError> {
        self.sweep.validate()?;
        for &v in &self.sweep.values {
            let sc =
                self.scenario
                    .with_value(self.sweep.parameter, v, self.sweep.fixed_total_bits)?;
            sc.models(BeamformingMode::Coherent)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_reference_table() {
        let m = Scenario::default()
            .models(BeamformingMode::Coherent)
            .unwrap();
        assert_eq!(m.system, SystemConfig::default());
        assert_eq!(m.pa, PaModel::default());
        assert_eq!(m.path_loss, PathLossModel::default());
        let c = CircuitModel::default();
        assert!((m.circuit.p_base - c.p_base).abs() < 1e-15);
        assert!((m.circuit.p_idle - c.p_idle).abs() < 1e-15);
        let (DynamicPower::Linear { per_bit: a }, DynamicPower::Linear { per_bit: b }) =
            (m.circuit.dynamic, c.dynamic)
        else {
            panic!("expected linear dynamic power");
        };
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parses_flat_file() {
        let cfg = SimConfig::from_ini_str(
            "# comment\np_max_dbm = 40\nrate_mbps=30\ntrials = 5\nseed=9\nmodes=coherent\nschemes = proposed, fixed\n\
             sweep_parameter = r_dl\nsweep_values = 10, 20, 30\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario.p_max_dbm, 40.0);
        assert_eq!(cfg.sweep.trials, 5);
        assert_eq!(cfg.sweep.seed, 9);
        assert_eq!(cfg.sweep.modes, vec![BeamformingMode::Coherent]);
        assert_eq!(cfg.sweep.schemes, vec![SchemeId::Proposed, SchemeId::Fixed]);
        assert_eq!(cfg.sweep.values, vec![10.0, 20.0, 30.0]);
    }

    #[test]
    fn rejects_bad_input_with_field_names() {
        let cases = [
            ("p_max_dbm = loud", "p_max_dbm"),
            ("colour = red", "config"),
            ("sweep_values = 1, 3, 2", "sweep_values"),
            ("trials = 0", "trials"),
            ("eta_max = 1.5", "eta_max"),
            ("[extra]\nk = 1", "config"),
            ("sweep_parameter = M\nsweep_values = 2, 2.5", "sweep_values"),
        ];
        for (text, field) in cases {
            match SimConfig::from_ini_str(text) {
                Err(SimError::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn fixed_total_bits_sets_rate_from_slot() {
        let cfg = SimConfig::from_ini_str(
            "sweep_parameter = T\nsweep_values = 4, 8\nfixed_total_kbits = 400\n",
        )
        .unwrap();
        let s = cfg
            .scenario
            .with_value(SweptParameter::Slot, 8.0, cfg.sweep.fixed_total_bits)
            .unwrap();
        assert!((s.rate_mbps - 50.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_units() {
        let s = Scenario {
            dynamic_exponent: 2.0,
            ..Scenario::default()
        };
        let m = s.models(BeamformingMode::Coherent).unwrap();
        // 5 mW at 1 Mbps, 20 mW at 2 Mbps
        assert!((m.circuit.dynamic_power(1e6) - 5e-3).abs() < 1e-15);
        assert!((m.circuit.dynamic_power(2e6) - 20e-3).abs() < 1e-15);
    }
}
