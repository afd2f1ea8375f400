//! Most energy-efficient subarray powers for a given transmit duration.
//!
//! For a fixed `t` the rate target pins the received power to `θ(t)`. The
//! amplifier energy `Σ√x_m` is minimized by saturating the subarrays in
//! descending-`κ` order and leaving a single partially driven subarray:
//!
//! ```text
//! x_π(1) = … = x_π(m*−1) = P_max² ≥ x_π(m*) > 0 = x_π(m*+1) = … = x_π(M)
//! ```
//!
//! Non-coherent combining compares `θ` with prefix sums of `P_max²κ²`, coherent
//! combining compares `√θ` with prefix sums of `P_max·κ`.

use crate::error::{Error, Result};
use crate::model::{theta, BeamformingMode, EffectiveChannel, PaModel, SystemConfig};

/// Relative tolerance used when comparing the rate target with a prefix capacity.
const BOUNDARY_REL_TOL: f64 = 1e-12;

/// Smallest admissible residual, relative to `P_max²`.
const RESIDUAL_FLOOR: f64 = 1e-18;

/// Per-subarray powers in original subarray order.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub m_star: usize,
    /// Auxiliary variables `x_m = (P_max/η_max²)·p_m`, in W².
    pub x: Vec<f64>,
    /// Transmit powers in W.
    pub p: Vec<f64>,
}

impl PowerAllocation {
    fn from_aux(x: Vec<f64>, pa: &PaModel) -> Self {
        let p = x.iter().map(|&v| pa.from_aux(v)).collect();
        let m_star = x.iter().filter(|v| **v > 0.0).count();
        PowerAllocation { m_star, x, p }
    }

    /// Amplifier power `Σ√x_m` in W.
    pub fn amplifier_power(&self) -> f64 {
        aux_cost(&self.x)
    }
}

pub fn aux_cost(x: &[f64]) -> f64 {
    x.iter().map(|v| v.max(0.0).sqrt()).sum()
}

/// Rate target in the comparison domain of the mode: `θ` or `√θ`.
fn target(theta: f64, mode: BeamformingMode) -> f64 {
    match mode {
        BeamformingMode::NonCoherent => theta,
        BeamformingMode::Coherent => theta.sqrt(),
    }
}

/// Contribution of the subarray ranked `rank` at full drive, in the comparison domain.
fn full_contribution(eff: &EffectiveChannel, pa: &PaModel, rank: usize) -> f64 {
    let k = eff.ranked_kappa(rank);
    match eff.mode {
        BeamformingMode::NonCoherent => pa.aux_max() * k * k,
        BeamformingMode::Coherent => pa.p_max * k,
    }
}

/// `caps[m]` is the comparison-domain capacity of the best `m` subarrays at full drive.
pub fn prefix_capacities(eff: &EffectiveChannel, pa: &PaModel) -> Vec<f64> {
    let mut caps = Vec::with_capacity(eff.len() + 1);
    caps.push(0.0);
    let mut acc = 0.0;
    for rank in 0..eff.len() {
        acc += full_contribution(eff, pa, rank);
        caps.push(acc);
    }
    caps
}

/// Full-drive received power of the best `m` subarrays.
pub fn max_received_power(m: usize, eff: &EffectiveChannel, pa: &PaModel) -> f64 {
    let c: f64 = (0..m).map(|r| full_contribution(eff, pa, r)).sum();
    match eff.mode {
        BeamformingMode::NonCoherent => c,
        BeamformingMode::Coherent => c * c,
    }
}

/// Number of subarrays that must transmit to deliver received power `theta`.
pub fn active_count_for_theta(theta: f64, eff: &EffectiveChannel, pa: &PaModel) -> Result<usize> {
    let goal = target(theta, eff.mode);
    let caps = prefix_capacities(eff, pa);
    (1..caps.len())
        .find(|&m| goal <= caps[m] * (1.0 + BOUNDARY_REL_TOL))
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "all {} subarrays at full drive deliver {:.6e}, need {:.6e}",
                eff.len(),
                caps[caps.len() - 1],
                goal
            ))
        })
}

/// Active subarray count `m*` for duration `t`; non-increasing in `t`.
pub fn active_count(
    t: f64,
    eff: &EffectiveChannel,
    pa: &PaModel,
    cfg: &SystemConfig,
) -> Result<usize> {
    active_count_for_theta(theta(t, cfg)?, eff, pa)
}

/// Saturating allocation with exactly `m` ranked subarrays carrying power.
///
/// The residual of the `m`-th subarray is clamped to `[1e-18·P_max², P_max²]`.
pub fn allocation_for_count(
    theta: f64,
    m: usize,
    eff: &EffectiveChannel,
    pa: &PaModel,
) -> PowerAllocation {
    let full = pa.aux_max();
    let caps = prefix_capacities(eff, pa);
    let mut x = vec![0.0; eff.len()];
    if m == 0 {
        return PowerAllocation::from_aux(x, pa);
    }
    for rank in 0..m - 1 {
        x[eff.order[rank]] = full;
    }
    let k = eff.ranked_kappa(m - 1);
    let left = target(theta, eff.mode) - caps[m - 1];
    let residual = if k > 0.0 {
        match eff.mode {
            BeamformingMode::NonCoherent => left / (k * k),
            BeamformingMode::Coherent => {
                let s = left.max(0.0) / k;
                s * s
            }
        }
    } else {
        full
    };
    x[eff.order[m - 1]] = residual.clamp(RESIDUAL_FLOOR * full, full);
    PowerAllocation::from_aux(x, pa)
}

/// Closed-form optimal powers for duration `t`.
pub fn optimal_powers(
    t: f64,
    eff: &EffectiveChannel,
    pa: &PaModel,
    cfg: &SystemConfig,
) -> Result<PowerAllocation> {
    let th = theta(t, cfg)?;
    let m = active_count_for_theta(th, eff, pa)?;
    Ok(allocation_for_count(th, m, eff, pa))
}

/// Rearranges a rate-feasible allocation into the saturating order by the two
/// exchange moves: an idle stronger subarray takes over the rate share of the
/// weakest active one, and an out-of-order pair trades values with the
/// stronger one then backing off to the original rate. Neither move changes
/// the received power or increases `Σ√x`.
pub fn exchange_to_ordered(x: &[f64], eff: &EffectiveChannel, pa: &PaModel) -> PowerAllocation {
    let n = eff.len();
    let mut ranked: Vec<f64> = eff.order.iter().map(|&i| x[i].max(0.0)).collect();
    let kappa: Vec<f64> = (0..n).map(|r| eff.ranked_kappa(r)).collect();
    for _ in 0..(4 * n * n + 8) {
        if let Some(gap) =
            (0..n).find(|&i| ranked[i] == 0.0 && ranked[i + 1..].iter().any(|v| *v > 0.0))
        {
            let last = (0..n).rev().find(|&j| ranked[j] > 0.0).unwrap();
            let ratio = kappa[last] / kappa[gap];
            ranked[gap] = match eff.mode {
                BeamformingMode::NonCoherent => ranked[last] * ratio * ratio,
                BeamformingMode::Coherent => {
                    let s = ranked[last].sqrt() * ratio;
                    s * s
                }
            };
            ranked[last] = 0.0;
            continue;
        }
        let Some(i) = (0..n.saturating_sub(1)).find(|&i| ranked[i + 1] > ranked[i]) else {
            break;
        };
        let (lo, hi) = (ranked[i], ranked[i + 1]);
        let ratio = kappa[i + 1] / kappa[i];
        ranked[i] = match eff.mode {
            BeamformingMode::NonCoherent => lo + (hi - lo) * ratio * ratio,
            BeamformingMode::Coherent => {
                let s = lo.sqrt() + (hi.sqrt() - lo.sqrt()) * ratio;
                s * s
            }
        };
        ranked[i + 1] = lo;
    }
    let mut out = vec![0.0; n];
    for (rank, &idx) in eff.order.iter().enumerate() {
        out[idx] = ranked[rank];
    }
    PowerAllocation::from_aux(out, pa)
}

/// Rate-preserving perturbation that raises the subarray ranked `up` by
/// `alpha` and lowers the one ranked `down` by the matching `beta`.
///
/// Returns `None` when the move would exceed `P_max²` or drive `down` negative.
pub fn pump_up(
    x: &[f64],
    eff: &EffectiveChannel,
    pa: &PaModel,
    up: usize,
    down: usize,
    alpha: f64,
) -> Option<Vec<f64>> {
    let (iu, id) = (eff.order[up], eff.order[down]);
    let (ku, kd) = (eff.ranked_kappa(up), eff.ranked_kappa(down));
    let raised = x[iu] + alpha;
    if raised > pa.aux_max() || kd <= 0.0 {
        return None;
    }
    let lowered = match eff.mode {
        BeamformingMode::NonCoherent => x[id] - alpha * ku * ku / (kd * kd),
        BeamformingMode::Coherent => {
            let s = x[id].sqrt() - (raised.sqrt() - x[iu].sqrt()) * ku / kd;
            if s < 0.0 {
                return None;
            }
            s * s
        }
    };
    if lowered < 0.0 {
        return None;
    }
    let mut out = x.to_vec();
    out[iu] = raised;
    out[id] = lowered;
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Channel with the given κ and `P_max = 1`, `η_max = 1`, so `h = κ`.
    fn unit(kappa: Vec<f64>, mode: BeamformingMode) -> (EffectiveChannel, PaModel) {
        let pa = PaModel::new(1.0, 1.0).unwrap();
        (EffectiveChannel::from_gains(kappa, mode, &pa).unwrap(), pa)
    }

    /// Scans every `m` and returns the first whose full-drive capacity covers the target.
    fn scan_count(theta: f64, kappa: &[f64], mode: BeamformingMode) -> Option<usize> {
        let mut k = kappa.to_vec();
        k.sort_by(|a, b| b.total_cmp(a));
        (1..=k.len()).find(|&m| match mode {
            BeamformingMode::NonCoherent => theta <= k[..m].iter().map(|v| v * v).sum::<f64>(),
            BeamformingMode::Coherent => theta.sqrt() <= k[..m].iter().sum::<f64>(),
        })
    }

    #[test]
    fn single_subarray_boundary() {
        let (eff, pa) = unit(vec![2.0], BeamformingMode::NonCoherent);
        assert_eq!(active_count_for_theta(4.0, &eff, &pa).unwrap(), 1);
        assert!(matches!(
            active_count_for_theta(4.1, &eff, &pa),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn noncoherent_two_subarrays() {
        let (eff, pa) = unit(vec![2.0, 1.0], BeamformingMode::NonCoherent);
        assert_eq!(
            scan_count(4.5, &[2.0, 1.0], BeamformingMode::NonCoherent),
            Some(2)
        );
        assert_eq!(active_count_for_theta(4.5, &eff, &pa).unwrap(), 2);
        let a = allocation_for_count(4.5, 2, &eff, &pa);
        assert_eq!(a.x, vec![1.0, 0.5]);
        assert!((eff.received_power_aux(&a.x) - 4.5).abs() < 1e-15);
    }

    #[test]
    fn coherent_two_subarrays() {
        let (eff, pa) = unit(vec![2.0, 1.0], BeamformingMode::Coherent);
        let th = 2.5f64 * 2.5;
        assert_eq!(
            scan_count(th, &[2.0, 1.0], BeamformingMode::Coherent),
            Some(2)
        );
        assert_eq!(active_count_for_theta(th, &eff, &pa).unwrap(), 2);
        let a = allocation_for_count(th, 2, &eff, &pa);
        assert!((a.x[1] - 0.25).abs() < 1e-15);
        assert!((a.x[1].sqrt() - 0.5).abs() < 1e-15);
        assert!((eff.received_power_aux(&a.x).sqrt() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_assigns_smaller_count_at_full_drive() {
        let (eff, pa) = unit(vec![2.0, 1.0, 0.5], BeamformingMode::NonCoherent);
        assert_eq!(active_count_for_theta(5.0, &eff, &pa).unwrap(), 2);
        let a = allocation_for_count(5.0, 2, &eff, &pa);
        assert_eq!(a.x, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn order_follows_kappa_not_index() {
        let (eff, pa) = unit(vec![0.5, 3.0, 1.0], BeamformingMode::NonCoherent);
        let a = allocation_for_count(9.5, 2, &eff, &pa);
        assert_eq!(a.x[1], 1.0);
        assert!((a.x[2] - 0.5).abs() < 1e-15);
        assert_eq!(a.x[0], 0.0);
        assert_eq!(a.m_star, 2);
    }

    #[test]
    fn exchange_moves_share_to_stronger_idle_subarray() {
        let (eff, pa) = unit(vec![2.0, 1.0], BeamformingMode::NonCoherent);
        let before = [0.0, 4.0];
        let out = exchange_to_ordered(&before, &eff, &pa);
        assert_eq!(out.x, vec![1.0, 0.0]);
        assert!((eff.received_power_aux(&out.x) - eff.received_power_aux(&before)).abs() < 1e-15);
        assert!(out.amplifier_power() < aux_cost(&before));
    }

    #[test]
    fn exchange_equal_kappa_is_energy_neutral() {
        let (eff, pa) = unit(vec![1.0, 1.0], BeamformingMode::Coherent);
        let before = [0.25, 0.81];
        let out = exchange_to_ordered(&before, &eff, &pa);
        assert!((out.x[0] - 0.81).abs() < 1e-15 && (out.x[1] - 0.25).abs() < 1e-15);
        assert!((out.amplifier_power() - aux_cost(&before)).abs() < 1e-15);
    }

    #[test]
    fn exchange_fixed_point() {
        let (eff, pa) = unit(vec![2.0, 1.0, 0.5], BeamformingMode::NonCoherent);
        let before = vec![1.0, 0.3, 0.0];
        let out = exchange_to_ordered(&before, &eff, &pa);
        assert_eq!(out.x, before);
    }

    #[test]
    fn pump_up_preserves_rate_and_lowers_cost() {
        for mode in BeamformingMode::ALL {
            let (eff, pa) = unit(vec![2.0, 1.5, 1.0], mode);
            let x = vec![0.6, 0.5, 0.4];
            let moved = pump_up(&x, &eff, &pa, 0, 2, 0.1).unwrap();
            let r0 = eff.received_power_aux(&x);
            assert!((eff.received_power_aux(&moved) - r0).abs() < 1e-12 * r0);
            assert!(aux_cost(&moved) <= aux_cost(&x));
            assert!(pump_up(&x, &eff, &pa, 0, 2, 0.5).is_none());
        }
    }

    #[test]
    fn optimal_powers_meets_theta_on_reference_channel() {
        let pa = PaModel::default();
        let cfg = SystemConfig {
            num_subarrays: 3,
            ..SystemConfig::default()
        };
        let eff =
            EffectiveChannel::from_gains(vec![3e-6, 5e-6, 4e-6], BeamformingMode::NonCoherent, &pa)
                .unwrap();
        let a = optimal_powers(cfg.slot, &eff, &pa, &cfg).unwrap();
        let th = theta(cfg.slot, &cfg).unwrap();
        assert!((eff.received_power(&a.p) / th - 1.0).abs() < 1e-9);
        assert!((eff.received_power_aux(&a.x) / th - 1.0).abs() < 1e-9);
    }
}
