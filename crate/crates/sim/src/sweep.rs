//! Monte Carlo sweeps over one scenario parameter.

use hybrid_ee::{
    effective_gains, sample_channels, solve_scheme, AllocationSolution, BeamformingMode,
    ChannelRealization, Error, SchemeId,
};
use rayon::prelude::*;

use crate::config::{Models, Scenario, SweepSpec};
use crate::SimError;

/// One (mode, scheme, swept value, trial) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub mode: BeamformingMode,
    pub scheme: SchemeId,
    pub value: f64,
    pub trial: u64,
    /// Transmit duration in seconds.
    pub t_star: Option<f64>,
    pub m_star: Option<usize>,
    /// Slot energy in J.
    pub energy: Option<f64>,
    /// Bits per Joule.
    pub ee: Option<f64>,
    pub feasible: bool,
    /// Per-subarray transmit powers in W; empty when infeasible.
    pub powers: Vec<f64>,
}

impl ResultRow {
    pub fn from_outcome(
        mode: BeamformingMode,
        scheme: SchemeId,
        value: f64,
        trial: u64,
        outcome: &Result<AllocationSolution, Error>,
    ) -> ResultRow {
        match outcome {
            Ok(s) => ResultRow {
                mode,
                scheme,
                value,
                trial,
                t_star: Some(s.t_star),
                m_star: Some(s.m_star),
                energy: Some(s.energy.total),
                ee: Some(s.ee),
                feasible: true,
                powers: s.powers.clone(),
            },
            Err(_) => ResultRow {
                mode,
                scheme,
                value,
                trial,
                t_star: None,
                m_star: None,
                energy: None,
                ee: None,
                feasible: false,
                powers: Vec::new(),
            },
        }
    }
}

/// Errors that mark a trial infeasible rather than abort the sweep.
pub fn is_infeasible(e: &Error) -> bool {
    matches!(e, Error::Infeasible(_) | Error::ExponentOverflow { .. })
}

/// Solves every requested (mode, scheme) pair on one realization, in request order.
pub fn solve_realization(
    real: &ChannelRealization,
    scenario: &Scenario,
    modes: &[BeamformingMode],
    schemes: &[SchemeId],
    value: f64,
    trial: u64,
) -> Result<Vec<ResultRow>, SimError> {
    let mut rows = Vec::with_capacity(modes.len() * schemes.len());
    for &mode in modes {
        let Models {
            system,
            pa,
            circuit,
            ..
        } = scenario.models(mode)?;
        let eff = effective_gains(real, mode, &pa)?;
        for &scheme in schemes {
            let out = match solve_scheme(scheme, &eff, &pa, &circuit, &system) {
                Err(e) if !is_infeasible(&e) => return Err(e.into()),
                out => out,
            };
            rows.push(ResultRow::from_outcome(mode, scheme, value, trial, &out));
        }
    }
    Ok(rows)
}

/// Runs the sweep. Rows come out ordered by mode, scheme, value and trial
/// whatever the thread count; every scheme and mode at a given (value, trial)
/// sees the same channel realization.
pub fn run_sweep(spec: &SweepSpec, base: &Scenario) -> Result<Vec<ResultRow>, SimError> {
    spec.validate()?;
    let scenarios: Vec<Scenario> = spec
        .values
        .iter()
        .map(|&v| base.with_value(spec.parameter, v, spec.fixed_total_bits))
        .collect::<Result<_, _>>()?;
    let units: Vec<(usize, u64)> = (0..scenarios.len())
        .flat_map(|vi| (0..spec.trials as u64).map(move |t| (vi, t)))
        .collect();
    let per_unit: Vec<Vec<ResultRow>> = units
        .par_iter()
        .map(|&(vi, trial)| {
            let sc = &scenarios[vi];
            let models = sc.models(spec.modes[0])?;
            let real = sample_channels(&models.system, &models.path_loss, spec.seed, trial);
            solve_realization(
                &real,
                sc,
                &spec.modes,
                &spec.schemes,
                spec.values[vi],
                trial,
            )
        })
        .collect::<Result<_, _>>()?;

    let (nm, ns) = (spec.modes.len(), spec.schemes.len());
    let mut rows = Vec::with_capacity(per_unit.len() * nm * ns);
    for mi in 0..nm {
        for si in 0..ns {
            for unit in &per_unit {
                rows.push(unit[mi * ns + si].clone());
            }
        }
    }
    Ok(rows)
}

/// Normal-approximation 95% half-width multiplier.
pub const Z95: f64 = 1.96;

/// Sample mean and 95% confidence half-width; the half-width is 0 for fewer than two samples.
pub fn mean_half_width(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, Z95 * (var / n as f64).sqrt())
}

/// Per-point means over the feasible trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub mode: BeamformingMode,
    pub scheme: SchemeId,
    pub value: f64,
    pub trials: usize,
    pub feasible: usize,
    /// Infeasible trials left out of the means.
    pub excluded: usize,
    pub mean_ee: Option<f64>,
    pub ee_half_width: Option<f64>,
    pub mean_t_star: Option<f64>,
    pub t_star_half_width: Option<f64>,
    pub mean_m_star: Option<f64>,
    pub m_star_half_width: Option<f64>,
    /// Set when only one feasible trial backs the means, so no interval exists.
    pub single_trial: bool,
}

/// Groups rows by (mode, scheme, value) in first-appearance order.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(BeamformingMode, SchemeId, u64)> = Vec::new();
    let mut groups: Vec<Vec<&ResultRow>> = Vec::new();
    for r in rows {
        let key = (r.mode, r.scheme, r.value.to_bits());
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(r),
            None => {
                keys.push(key);
                groups.push(vec![r]);
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let ok: Vec<&&ResultRow> = g.iter().filter(|r| r.feasible).collect();
            let stat = |f: &dyn Fn(&ResultRow) -> Option<f64>| -> (Option<f64>, Option<f64>) {
                let v: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
                if v.is_empty() {
                    (None, None)
                } else {
                    let (m, h) = mean_half_width(&v);
                    (Some(m), Some(h))
                }
            };
            let (mean_ee, ee_half_width) = stat(&|r| r.ee);
            let (mean_t_star, t_star_half_width) = stat(&|r| r.t_star);
            let (mean_m_star, m_star_half_width) = stat(&|r| r.m_star.map(|m| m as f64));
            SummaryRow {
                mode: g[0].mode,
                scheme: g[0].scheme,
                value: g[0].value,
                trials: g.len(),
                feasible: ok.len(),
                excluded: g.len() - ok.len(),
                mean_ee,
                ee_half_width,
                mean_t_star,
                t_star_half_width,
                mean_m_star,
                m_star_half_width,
                single_trial: ok.len() == 1,
            }
        })
        .collect()
}
