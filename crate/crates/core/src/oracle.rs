//! Brute-force reference optimizer and solution checker for small arrays.
//!
//! The oracle grids the duration over `[t_min^M, T]` and, at every duration,
//! enumerates a uniform grid of auxiliary power vectors in `[0, P_max²]^M`,
//! keeping the vectors whose received power lies within a relative slack band
//! around the rate target. It assumes nothing about which subarrays carry
//! power. For each grid value of the leading coordinates only the last
//! coordinate's indices that can land inside the band are visited, which
//! yields the same minimum as visiting all of them.

use rayon::prelude::*;

use crate::duration::t_min;
use crate::error::{Error, Result};
use crate::model::{
    energy_efficiency, theta, total_energy, AllocationSolution, BeamformingMode, CircuitModel,
    EffectiveChannel, PaModel, SystemConfig,
};

/// Grid resolution of the brute-force search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    /// Duration grid points over `[t_min^M, T]`.
    pub n_t: usize,
    /// Power grid points per coordinate for `M ≤ 2`.
    pub n_p: usize,
    /// Power grid points per coordinate for `M = 3`.
    pub n_p3: usize,
    /// Relative half-width of the accepted band around the rate target.
    pub slack: f64,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            n_t: 2000,
            n_p: 400,
            n_p3: 100,
            slack: 1e-3,
        }
    }
}

impl OracleGrid {
    /// The nested grid with every spacing halved.
    pub fn refined(&self) -> Self {
        OracleGrid {
            n_t: 2 * self.n_t - 1,
            n_p: 2 * self.n_p - 1,
            n_p3: 2 * self.n_p3 - 1,
            slack: self.slack,
        }
    }
}

/// Largest supported array size.
pub const ORACLE_MAX_SUBARRAYS: usize = 3;

struct Best {
    energy: f64,
    x: Vec<f64>,
}

/// Energy of a slot with auxiliary powers `x`, written out from the definition.
fn slot_energy(t: f64, x: &[f64], circuit: &CircuitModel, cfg: &SystemConfig) -> f64 {
    let dynamic = circuit.dynamic_power(cfg.bits_per_slot() / t);
    let mut e = 0.0;
    for &v in x {
        if v > 0.0 {
            e += (v.sqrt() + circuit.p_base + dynamic) * t + circuit.p_idle * (cfg.slot - t);
        } else {
            e += circuit.p_idle * cfg.slot;
        }
    }
    e
}

/// Index range of the last coordinate whose received power can fall in `[lo, hi]`
/// given the contribution `head` of the other coordinates.
fn band_indices(
    head: f64,
    k: f64,
    lo: f64,
    hi: f64,
    step: f64,
    n: usize,
    mode: BeamformingMode,
) -> (usize, usize) {
    if k <= 0.0 {
        return (0, n - 1);
    }
    // bounds on x of the last coordinate
    let (xa, xb) = match mode {
        BeamformingMode::NonCoherent => ((lo - head) / (k * k), (hi - head) / (k * k)),
        BeamformingMode::Coherent => {
            let a = ((lo.sqrt() - head) / k).max(0.0);
            let b = (hi.sqrt() - head) / k;
            if b < 0.0 {
                return (1, 0);
            }
            (a * a, b * b)
        }
    };
    if xb < 0.0 {
        return (1, 0);
    }
    let first = ((xa / step).floor().max(0.0) as usize).saturating_sub(1);
    let last = ((xb / step).ceil() as usize + 1).min(n - 1);
    (first, last)
}

fn in_band(eff: &EffectiveChannel, x: &[f64], lo: f64, hi: f64) -> bool {
    let s = eff.received_power_aux(x);
    s >= lo && s <= hi
}

fn best_at_t(
    t: f64,
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
    grid: &OracleGrid,
) -> Option<Best> {
    let th = theta(t, cfg).ok()?;
    let (lo, hi) = (th * (1.0 - grid.slack), th * (1.0 + grid.slack));
    let m = eff.len();
    let n = if m <= 2 { grid.n_p } else { grid.n_p3 };
    let step = pa.aux_max() / (n - 1) as f64;
    let k = &eff.kappa;
    let head_of = |xs: &[f64]| -> f64 {
        match eff.mode {
            BeamformingMode::NonCoherent => xs.iter().zip(k).map(|(x, k)| x * k * k).sum(),
            BeamformingMode::Coherent => xs.iter().zip(k).map(|(x, k)| x.sqrt() * k).sum(),
        }
    };
    let mut best: Option<Best> = None;
    let mut consider = |x: &[f64]| {
        if in_band(eff, x, lo, hi) {
            let e = slot_energy(t, x, circuit, cfg);
            if best.as_ref().is_none_or(|b| e < b.energy) {
                best = Some(Best {
                    energy: e,
                    x: x.to_vec(),
                });
            }
        }
    };
    let mut x = vec![0.0; m];
    let mut visit_last = |x: &mut Vec<f64>| {
        let head = head_of(&x[..m - 1]);
        let (a, b) = band_indices(head, k[m - 1], lo, hi, step, n, eff.mode);
        for j in a..=b.min(n - 1) {
            if a > b {
                break;
            }
            x[m - 1] = step * j as f64;
            consider(x);
        }
    };
    match m {
        1 => {
            // no power freedom: the rate target fixes x in either mode
            let need = th / (k[0] * k[0]);
            if need <= pa.aux_max() * (1.0 + 1e-12) {
                consider(&[need.min(pa.aux_max())]);
            }
        }
        2 => {
            for i in 0..n {
                x[0] = step * i as f64;
                visit_last(&mut x);
            }
        }
        3 => {
            for i in 0..n {
                x[0] = step * i as f64;
                for j in 0..n {
                    x[1] = step * j as f64;
                    visit_last(&mut x);
                }
            }
        }
        _ => return None,
    }
    best
}

/// Exhaustive grid minimum of the slot energy subject to the rate target.
pub fn brute_force_solve(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
    grid: &OracleGrid,
) -> Result<AllocationSolution> {
    let m = eff.len();
    if m == 0 || m > ORACLE_MAX_SUBARRAYS {
        return Err(Error::Unsupported(format!(
            "oracle supports 1..={ORACLE_MAX_SUBARRAYS} subarrays, got {m}"
        )));
    }
    if grid.n_t < 2 || grid.n_p < 2 || grid.n_p3 < 2 {
        return Err(crate::error::invalid(
            "grid",
            "at least two points per axis",
        ));
    }
    cfg.validate()?;
    let lo = t_min(m, eff, pa, cfg);
    if !(lo <= cfg.slot) {
        return Err(Error::Infeasible(format!(
            "shortest duration {lo:.6e} s exceeds the slot"
        )));
    }
    let step = (cfg.slot - lo) / (grid.n_t - 1) as f64;
    let per_t: Vec<Option<(f64, Best)>> = (0..grid.n_t)
        .into_par_iter()
        .map(|i| {
            let t = if i + 1 == grid.n_t {
                cfg.slot
            } else {
                lo + step * i as f64
            };
            best_at_t(t, eff, pa, circuit, cfg, grid).map(|b| (t, b))
        })
        .collect();
    let (t, best) = per_t
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, Best)>, cand| match acc {
            Some(a) if a.1.energy <= cand.1.energy => Some(a),
            _ => Some(cand),
        })
        .ok_or_else(|| Error::Infeasible("no rate-feasible grid point".into()))?;
    let powers: Vec<f64> = best.x.iter().map(|&x| pa.from_aux(x)).collect();
    let energy = total_energy(t, &powers, circuit, pa, cfg);
    Ok(AllocationSolution {
        t_star: t,
        m_star: powers.iter().filter(|p| **p > 0.0).count(),
        powers,
        ee: energy_efficiency(&energy, cfg),
        energy,
    })
}

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tolerances of [`verify_solution`].
pub const RATE_TOL: f64 = 1e-9;
pub const BOUND_TOL: f64 = 1e-12;
pub const ENERGY_TOL: f64 = 1e-12;

/// Re-checks a solver output: rate equality, power bounds, saturation order,
/// duration bounds and the reported energy.
pub fn verify_solution(
    sol: &AllocationSolution,
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> VerificationReport {
    let mut checks = Vec::new();
    let x: Vec<f64> = sol.powers.iter().map(|&p| pa.to_aux(p)).collect();
    let full = pa.aux_max();

    let rate = match theta(sol.t_star, cfg) {
        Ok(th) => (eff.received_power(&sol.powers) / th - 1.0).abs(),
        Err(_) => f64::INFINITY,
    };
    checks.push(Check {
        name: "rate",
        passed: rate <= RATE_TOL,
        residual: rate,
    });

    let bound = x
        .iter()
        .map(|&v| {
            if v < 0.0 {
                -v / full
            } else {
                (v / full - 1.0).max(0.0)
            }
        })
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "bounds",
        passed: x.len() == eff.len() && bound <= BOUND_TOL,
        residual: bound,
    });

    // ranked by κ: full drive, then at most one partial, then zeros
    let ranked: Vec<f64> = eff
        .order
        .iter()
        .map(|&i| x.get(i).copied().unwrap_or(f64::NAN) / full)
        .collect();
    let mut order_residual: f64 = 0.0;
    let mut seen_partial = false;
    for &v in &ranked {
        if !(v.is_finite()) {
            order_residual = f64::INFINITY;
            break;
        }
        let at_full = (v - 1.0).abs() <= 1e-9;
        if seen_partial {
            order_residual = order_residual.max(v);
        } else if !at_full {
            seen_partial = true;
        }
    }
    checks.push(Check {
        name: "ordering",
        passed: order_residual <= BOUND_TOL,
        residual: order_residual,
    });

    let lo = t_min(eff.len(), eff, pa, cfg);
    let dur = (lo - sol.t_star).max(sol.t_star - cfg.slot).max(0.0) / cfg.slot;
    checks.push(Check {
        name: "duration",
        passed: dur <= BOUND_TOL,
        residual: dur,
    });

    let recomputed = total_energy(sol.t_star, &sol.powers, circuit, pa, cfg);
    let e_res = (recomputed.total / sol.energy.total - 1.0).abs();
    let ee_res = (energy_efficiency(&recomputed, cfg) / sol.ee - 1.0).abs();
    checks.push(Check {
        name: "energy",
        passed: e_res <= ENERGY_TOL && ee_res <= ENERGY_TOL,
        residual: e_res.max(ee_res),
    });

    VerificationReport { checks }
}
