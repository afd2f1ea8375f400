//! Benchmark schemes: fixed full-slot transmission, uniform powers with an
//! optimized duration, and water-filling powers with an optimized duration.
//!
//! All three keep every subarray active. The water-filling shape maximizes
//! the received power for a given sum power (maximum-ratio weights under
//! coherent combining, greedy fill of the strongest subarrays otherwise); the
//! scheme runs it at the smallest sum power that meets the rate target, which
//! never exceeds the uniform scheme's sum power at the same duration.

use std::fmt;
use std::str::FromStr;

use crate::duration::{solve, t_min, DURATION_TOL};
use crate::error::{invalid, Error, Result};
use crate::model::{
    energy_efficiency, theta, total_energy_with_active, AllocationSolution, BeamformingMode,
    CircuitModel, EffectiveChannel, PaModel, SystemConfig,
};
use crate::search::grid_then_golden;

/// Grid size of the duration search used by the optimized-duration baselines.
pub const BASELINE_GRID_POINTS: usize = 1024;

/// Relative tolerance for treating two effective gains as equal.
const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    Proposed,
    Fixed,
    UniformDuration,
    WaterFilling,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::Proposed,
        SchemeId::Fixed,
        SchemeId::UniformDuration,
        SchemeId::WaterFilling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Proposed => "proposed",
            SchemeId::Fixed => "fixed",
            SchemeId::UniformDuration => "uniform-duration",
            SchemeId::WaterFilling => "water-filling",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Ok(SchemeId::Proposed),
            "fixed" => Ok(SchemeId::Fixed),
            "uniform-duration" | "uniform" => Ok(SchemeId::UniformDuration),
            "water-filling" | "waterfilling" => Ok(SchemeId::WaterFilling),
            other => Err(invalid("scheme", format!("unknown scheme '{other}'"))),
        }
    }
}

/// Runs one scheme on one realization.
pub fn solve_scheme(
    id: SchemeId,
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    match id {
        SchemeId::Proposed => solve(eff, pa, circuit, cfg),
        SchemeId::Fixed => fixed_scheme(eff, pa, circuit, cfg),
        SchemeId::UniformDuration => uniform_optimized_duration(eff, pa, circuit, cfg),
        SchemeId::WaterFilling => water_filling_scheme(eff, pa, circuit, cfg),
    }
}

/// Common auxiliary value `x` that meets `θ` with all subarrays equally driven.
pub fn uniform_aux(theta: f64, eff: &EffectiveChannel) -> f64 {
    match eff.mode {
        BeamformingMode::NonCoherent => theta / eff.kappa.iter().map(|k| k * k).sum::<f64>(),
        BeamformingMode::Coherent => {
            let s: f64 = eff.kappa.iter().sum();
            theta / (s * s)
        }
    }
}

fn uniform_powers(
    t: f64,
    eff: &EffectiveChannel,
    pa: &PaModel,
    cfg: &SystemConfig,
) -> Result<Vec<f64>> {
    let x = uniform_aux(theta(t, cfg)?, eff).min(pa.aux_max());
    Ok(vec![pa.from_aux(x); eff.len()])
}

fn solution_at(
    t: f64,
    powers: Vec<f64>,
    circuit: &CircuitModel,
    pa: &PaModel,
    cfg: &SystemConfig,
) -> AllocationSolution {
    let m = powers.len();
    let energy = total_energy_with_active(t, &powers, m, circuit, pa, cfg);
    AllocationSolution {
        t_star: t,
        m_star: m,
        powers,
        ee: energy_efficiency(&energy, cfg),
        energy,
    }
}

fn check_feasible(eff: &EffectiveChannel, pa: &PaModel, cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    pa.validate()?;
    let lo = t_min(eff.len(), eff, pa, cfg);
    if !(lo <= cfg.slot) {
        return Err(Error::Infeasible(format!(
            "all {} subarrays at full drive need {lo:.6e} s, slot is {:.6e} s",
            eff.len(),
            cfg.slot
        )));
    }
    Ok(lo)
}

/// Transmits for the whole slot with equal powers on every subarray.
pub fn fixed_scheme(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    cfg.validate()?;
    circuit.validate()?;
    let x = uniform_aux(theta(cfg.slot, cfg)?, eff);
    if !(x <= pa.aux_max() * (1.0 + 1e-12)) {
        return Err(Error::Infeasible(format!(
            "equal drive needs x = {x:.6e} W², cap is {:.6e} W²",
            pa.aux_max()
        )));
    }
    let powers = vec![pa.from_aux(x.min(pa.aux_max())); eff.len()];
    Ok(solution_at(cfg.slot, powers, circuit, pa, cfg))
}

/// Equal powers on every subarray, duration chosen by grid search plus golden refinement.
pub fn uniform_optimized_duration(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    circuit.validate()?;
    let lo = check_feasible(eff, pa, cfg)?;
    let (t, _) = optimize_duration(lo, cfg, |t| uniform_powers(t, eff, pa, cfg), circuit, pa);
    Ok(solution_at(
        t,
        uniform_powers(t, eff, pa, cfg)?,
        circuit,
        pa,
        cfg,
    ))
}

fn optimize_duration<F>(
    lo: f64,
    cfg: &SystemConfig,
    powers: F,
    circuit: &CircuitModel,
    pa: &PaModel,
) -> (f64, f64)
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let energy = |t: f64| match powers(t) {
        Ok(p) => total_energy_with_active(t, &p, p.len(), circuit, pa, cfg).total,
        Err(_) => f64::INFINITY,
    };
    grid_then_golden(
        energy,
        lo,
        cfg.slot,
        BASELINE_GRID_POINTS,
        DURATION_TOL * cfg.slot,
    )
}

/// Maximum-ratio weights `p_m ∝ h_m²` for sum power `total`, capped at `cap`
/// with the excess redistributed over the uncapped subarrays.
pub fn max_ratio_allocation(h: &[f64], total: f64, cap: f64) -> Vec<f64> {
    let mut p = vec![0.0; h.len()];
    let mut free: Vec<usize> = (0..h.len()).filter(|&i| h[i] > 0.0).collect();
    let mut left = total.min(cap * free.len() as f64);
    while !free.is_empty() && left > 0.0 {
        let w: f64 = free.iter().map(|&i| h[i] * h[i]).sum();
        let lambda = left / w;
        let over: Vec<usize> = free
            .iter()
            .copied()
            .filter(|&i| lambda * h[i] * h[i] > cap)
            .collect();
        if over.is_empty() {
            for &i in &free {
                p[i] = lambda * h[i] * h[i];
            }
            break;
        }
        for &i in &over {
            p[i] = cap;
            left -= cap;
        }
        free.retain(|i| !over.contains(i));
    }
    p
}

/// Indices grouped by equal gain, strongest group first.
fn tie_groups(h: &[f64]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..h.len()).collect();
    idx.sort_by(|&a, &b| h[b].total_cmp(&h[a]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some(g) if (h[g[0]] - h[i]).abs() <= TIE_REL * h[g[0]] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Sum power `total` poured into the strongest subarrays up to `cap` each;
/// subarrays with equal gain share their level evenly.
pub fn greedy_allocation(h: &[f64], total: f64, cap: f64) -> Vec<f64> {
    let mut p = vec![0.0; h.len()];
    let mut left = total;
    for g in tie_groups(h) {
        if left <= 0.0 {
            break;
        }
        let each = (left / g.len() as f64).min(cap);
        for &i in &g {
            p[i] = each;
        }
        left -= each * g.len() as f64;
    }
    p
}

/// Water-filling powers of the smallest sum power whose received power equals `theta`.
pub fn water_filling_powers(theta: f64, eff: &EffectiveChannel, pa: &PaModel) -> Vec<f64> {
    let cap = pa.full_drive_input();
    let h = &eff.h;
    match eff.mode {
        BeamformingMode::NonCoherent => {
            let mut p = vec![0.0; h.len()];
            let mut left = theta;
            for g in tie_groups(h) {
                if left <= 0.0 {
                    break;
                }
                let g2 = h[g[0]] * h[g[0]];
                if g2 <= 0.0 {
                    break;
                }
                let each = (left / (g.len() as f64 * g2)).min(cap);
                for &i in &g {
                    p[i] = each;
                }
                left -= each * g2 * g.len() as f64;
            }
            p
        }
        BeamformingMode::Coherent => {
            // amplitude √θ = √cap·Σ_{capped} h + √λ·Σ_{free} h²
            let order = &eff.order;
            let amp = theta.sqrt();
            let sc = cap.sqrt();
            let mut p = vec![cap; h.len()];
            for j in 0..h.len() {
                let capped: f64 = order[..j].iter().map(|&i| sc * h[i]).sum();
                let free: f64 = order[j..].iter().map(|&i| h[i] * h[i]).sum();
                if free <= 0.0 {
                    break;
                }
                let sl = ((amp - capped) / free).max(0.0);
                if sl * h[order[j]] <= sc * (1.0 + TIE_REL) {
                    for &i in &order[j..] {
                        p[i] = (sl * sl * h[i] * h[i]).min(cap);
                    }
                    break;
                }
            }
            p
        }
    }
}

/// All subarrays active with water-filling powers; duration chosen like the uniform scheme.
pub fn water_filling_scheme(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    circuit.validate()?;
    let lo = check_feasible(eff, pa, cfg)?;
    let powers = |t: f64| -> Result<Vec<f64>> { Ok(water_filling_powers(theta(t, cfg)?, eff, pa)) };
    let (mut t, mut e) = optimize_duration(lo, cfg, powers, circuit, pa);
    // The uniform optimum is a candidate too: water-filling never costs more at the same duration.
    let u = uniform_optimized_duration(eff, pa, circuit, cfg)?;
    let p_u = powers(u.t_star)?;
    let e_u = total_energy_with_active(u.t_star, &p_u, p_u.len(), circuit, pa, cfg).total;
    if e_u < e {
        t = u.t_star;
        e = e_u;
    }
    debug_assert!(e.is_finite());
    Ok(solution_at(t, powers(t)?, circuit, pa, cfg))
}
