//! Transmit-duration optimization over the segmented feasible region.
//!
//! The feasible durations `[t_min^M, T]` split into segments
//! `[t_min^m, min(t_min^{m−1}, T))` on which the saturating power structure
//! keeps exactly `m` subarrays active. With `r_dl/W ≥ 1` and a linear dynamic
//! circuit term the slot energy is concave on non-coherent segments with
//! `m ≥ 2`, convex on the non-coherent `m = 1` segment and convex on every
//! coherent segment. Concave segments are settled at their endpoints, convex
//! ones by golden-section search. Anything else goes through a numerical
//! curvature scan that cuts the segment at sign changes of the second
//! difference.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{
    energy_efficiency, noise_power, theta, total_energy_with_active, AllocationSolution,
    BeamformingMode, CircuitModel, EffectiveChannel, EnergyBreakdown, PaModel, SystemConfig,
};
use crate::power::{active_count, allocation_for_count, max_received_power, PowerAllocation};
use crate::search::golden_section;

/// Duration tolerance of the convex searches, relative to `T`.
pub const DURATION_TOL: f64 = 1e-10;

/// Scan points used by the numerical curvature classification.
pub const DEFAULT_SCAN_POINTS: usize = 256;

/// A duration interval `[lo, hi)` (closed at `hi` when `hi = T`) with a fixed active count.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub m: usize,
    pub lo: f64,
    pub hi: f64,
    pub closed_right: bool,
}

impl Segment {
    /// Largest duration evaluated inside the segment.
    pub fn upper(&self, delta: f64) -> f64 {
        if self.closed_right {
            self.hi
        } else {
            (self.hi - delta).max(self.lo)
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && (t < self.hi || (self.closed_right && t <= self.hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Curvature {
    Convex,
    Concave,
    /// Sign changes of the second derivative at the listed durations.
    Mixed(Vec<f64>),
}

/// Slot energy on one segment as a function of the duration, with the
/// saturating power structure for `m` active subarrays.
#[derive(Debug, Clone, Copy)]
pub struct SegmentObjective<'a> {
    pub m: usize,
    pub eff: &'a EffectiveChannel,
    pub pa: &'a PaModel,
    pub circuit: &'a CircuitModel,
    pub cfg: &'a SystemConfig,
}

impl<'a> SegmentObjective<'a> {
    pub fn new(
        m: usize,
        eff: &'a EffectiveChannel,
        pa: &'a PaModel,
        circuit: &'a CircuitModel,
        cfg: &'a SystemConfig,
    ) -> Self {
        SegmentObjective {
            m,
            eff,
            pa,
            circuit,
            cfg,
        }
    }

    pub fn allocation(&self, t: f64) -> Result<PowerAllocation> {
        Ok(allocation_for_count(
            theta(t, self.cfg)?,
            self.m,
            self.eff,
            self.pa,
        ))
    }

    pub fn breakdown(&self, t: f64) -> Result<EnergyBreakdown> {
        let a = self.allocation(t)?;
        Ok(total_energy_with_active(
            t,
            &a.p,
            self.m,
            self.circuit,
            self.pa,
            self.cfg,
        ))
    }

    /// Total slot energy in J; `+∞` outside the domain of `θ`.
    pub fn energy(&self, t: f64) -> f64 {
        self.breakdown(t).map(|e| e.total).unwrap_or(f64::INFINITY)
    }

    /// The part of the energy that varies with `t` inside the segment. Drops
    /// the idle baseline `M·P_idle·T` and, for a linear dynamic term, the
    /// constant `m·ε·r_dl·T`; used for finite differences.
    pub fn varying_energy(&self, t: f64) -> f64 {
        let Ok(a) = self.allocation(t) else {
            return f64::INFINITY;
        };
        let m = self.m as f64;
        let mut e = (a.amplifier_power() + m * (self.circuit.p_base - self.circuit.p_idle)) * t;
        if !self.circuit.dynamic.is_linear() {
            e += m * self.circuit.dynamic_power(self.cfg.bits_per_slot() / t) * t;
        }
        e
    }
}

/// Shortest duration meeting the rate target with the best `m` subarrays at full drive.
pub fn t_min(m: usize, eff: &EffectiveChannel, pa: &PaModel, cfg: &SystemConfig) -> f64 {
    let snr = max_received_power(m, eff, pa) / noise_power(cfg);
    if snr <= 0.0 {
        return f64::INFINITY;
    }
    cfg.bits_per_slot() / (cfg.bandwidth * snr.ln_1p() / LN_2)
}

/// `t_min^m` for `m = 1..=M`; entry `0` holds `T`.
pub fn t_min_all(eff: &EffectiveChannel, pa: &PaModel, cfg: &SystemConfig) -> Vec<f64> {
    std::iter::once(cfg.slot)
        .chain((1..=eff.len()).map(|m| t_min(m, eff, pa, cfg)))
        .collect()
}

/// Non-empty segments ordered by increasing duration (decreasing `m`). The
/// last one holds the first non-empty active count `m̄` and ends at `T`.
pub fn build_segments(
    eff: &EffectiveChannel,
    pa: &PaModel,
    cfg: &SystemConfig,
) -> Result<Vec<Segment>> {
    let tm = t_min_all(eff, pa, cfg);
    let n = eff.len();
    let slot = cfg.slot;
    if !(tm[n] <= slot) {
        return Err(Error::Infeasible(format!(
            "shortest duration {:.6e} s with all {n} subarrays exceeds the slot {slot:.6e} s",
            tm[n]
        )));
    }
    let mut segs = Vec::new();
    for m in (1..=n).rev() {
        let lo = tm[m];
        let hi = if m == 1 { slot } else { tm[m - 1].min(slot) };
        if lo < hi {
            segs.push(Segment {
                m,
                lo,
                hi,
                closed_right: hi >= slot,
            });
        }
    }
    if segs.is_empty() {
        // t_min^M == T: only the full slot is feasible.
        let m = active_count(slot, eff, pa, cfg)?;
        segs.push(Segment {
            m,
            lo: slot,
            hi: slot,
            closed_right: true,
        });
    }
    Ok(segs)
}

/// Active count of the first non-empty segment.
pub fn first_nonempty(segments: &[Segment]) -> Option<usize> {
    segments.last().map(|s| s.m)
}

/// Curvature known in closed form, or `None` when a numerical scan is needed.
pub fn analytic_curvature(
    m: usize,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Option<Curvature> {
    if cfg.target_rate / cfg.bandwidth < 1.0 {
        return None;
    }
    match (cfg.mode, m) {
        (BeamformingMode::Coherent, _) | (BeamformingMode::NonCoherent, 1) => {
            Some(Curvature::Convex)
        }
        (BeamformingMode::NonCoherent, _) if circuit.dynamic.is_linear() => {
            Some(Curvature::Concave)
        }
        _ => None,
    }
}

pub fn classify_curvature(seg: &Segment, obj: &SegmentObjective, cfg: &SystemConfig) -> Curvature {
    analytic_curvature(seg.m, obj.circuit, cfg)
        .unwrap_or_else(|| scan_curvature(seg, obj, DEFAULT_SCAN_POINTS))
}

/// Centered second difference of the varying energy, with a step that stays inside `[lo, hi]`.
fn second_difference(obj: &SegmentObjective, t: f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let h = step.min(t - lo).min(hi - t);
    if h <= 0.0 {
        return (0.0, f64::INFINITY);
    }
    let (a, b, c) = (
        obj.varying_energy(t - h),
        obj.varying_energy(t),
        obj.varying_energy(t + h),
    );
    let d2 = (a - 2.0 * b + c) / (h * h);
    // rounding noise of the three evaluations
    let noise = 64.0 * f64::EPSILON * (a.abs() + 2.0 * b.abs() + c.abs()) / (h * h);
    (d2, noise)
}

fn sign_at(obj: &SegmentObjective, t: f64, lo: f64, hi: f64, step: f64) -> i8 {
    let (d2, noise) = second_difference(obj, t, lo, hi, step);
    if d2 > noise {
        1
    } else if d2 < -noise {
        -1
    } else {
        0
    }
}

/// Scans the sign of the second difference at `points` interior durations and
/// brackets every sign change by bisection.
pub fn scan_curvature(seg: &Segment, obj: &SegmentObjective, points: usize) -> Curvature {
    let hi = seg.upper(DURATION_TOL * obj.cfg.slot);
    let lo = seg.lo;
    if hi - lo <= 0.0 {
        return Curvature::Convex;
    }
    let n = points.max(3);
    let spacing = (hi - lo) / (n + 1) as f64;
    let step = 0.25 * spacing;
    let ts: Vec<f64> = (1..=n).map(|i| lo + spacing * i as f64).collect();
    let signs: Vec<i8> = ts.iter().map(|&t| sign_at(obj, t, lo, hi, step)).collect();

    let mut roots = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for (&t, &s) in ts.iter().zip(&signs) {
        if s == 0 {
            continue;
        }
        if let Some((tp, sp)) = last {
            if sp != s {
                let (mut a, mut b) = (tp, t);
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    if b - a <= 1e-13 * obj.cfg.slot {
                        break;
                    }
                    let sm = sign_at(obj, mid, lo, hi, step);
                    if sm == sp {
                        a = mid;
                    } else if sm == s {
                        b = mid;
                    } else {
                        a = mid;
                        b = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        last = Some((t, s));
    }
    if roots.is_empty() {
        if signs.iter().any(|&s| s < 0) {
            Curvature::Concave
        } else {
            Curvature::Convex
        }
    } else {
        Curvature::Mixed(roots)
    }
}

/// Best duration and energy on one segment.
pub fn minimize_segment(
    seg: &Segment,
    curvature: &Curvature,
    obj: &SegmentObjective,
) -> (f64, f64) {
    let slot = obj.cfg.slot;
    let tol = DURATION_TOL * slot;
    let hi = seg.upper(tol);
    let f = |t: f64| obj.energy(t);
    let endpoints = |a: f64, b: f64| {
        let (fa, fb) = (f(a), f(b));
        if fb < fa {
            (b, fb)
        } else {
            (a, fa)
        }
    };
    match curvature {
        Curvature::Concave => endpoints(seg.lo, hi),
        Curvature::Convex => golden_section(f, seg.lo, hi, tol),
        Curvature::Mixed(roots) => {
            let mut cuts = vec![seg.lo];
            cuts.extend(roots.iter().copied().filter(|r| *r > seg.lo && *r < hi));
            cuts.push(hi);
            let step = 0.25 * (hi - seg.lo) / (DEFAULT_SCAN_POINTS + 1) as f64;
            let mut best = (seg.lo, f64::INFINITY);
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let mid = 0.5 * (a + b);
                let cand = if sign_at(obj, mid, seg.lo, hi, step.min(0.25 * (b - a))) >= 0 {
                    golden_section(f, a, b, tol)
                } else {
                    endpoints(a, b)
                };
                if cand.1 < best.1 {
                    best = cand;
                }
            }
            best
        }
    }
}

/// Outcome of the search on one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentResult {
    pub segment: Segment,
    pub curvature: Curvature,
    pub t: f64,
    pub energy: f64,
}

fn check_inputs(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<()> {
    cfg.validate()?;
    pa.validate()?;
    circuit.validate()?;
    if eff.len() != cfg.num_subarrays {
        return Err(crate::error::invalid(
            "num_subarrays",
            format!(
                "channel has {} subarrays, config {}",
                eff.len(),
                cfg.num_subarrays
            ),
        ));
    }
    if eff.mode != cfg.mode {
        return Err(crate::error::invalid(
            "mode",
            "channel and config disagree on beamforming mode",
        ));
    }
    Ok(())
}

/// Minimizes every segment and returns the per-segment results in segment order.
pub fn segment_results(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<Vec<SegmentResult>> {
    check_inputs(eff, pa, circuit, cfg)?;
    let segs = build_segments(eff, pa, cfg)?;
    Ok(segs
        .into_iter()
        .map(|segment| {
            let obj = SegmentObjective::new(segment.m, eff, pa, circuit, cfg);
            let curvature = classify_curvature(&segment, &obj, cfg);
            let (t, energy) = minimize_segment(&segment, &curvature, &obj);
            SegmentResult {
                segment,
                curvature,
                t,
                energy,
            }
        })
        .collect())
}

/// Builds the full solution for `m` active subarrays transmitting for `t`.
pub fn assemble_solution(
    t: f64,
    m: usize,
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    let obj = SegmentObjective::new(m, eff, pa, circuit, cfg);
    let alloc = obj.allocation(t)?;
    let energy = total_energy_with_active(t, &alloc.p, m, circuit, pa, cfg);
    Ok(AllocationSolution {
        t_star: t,
        m_star: m,
        powers: alloc.p,
        ee: energy_efficiency(&energy, cfg),
        energy,
    })
}

fn pick_best(results: &[SegmentResult]) -> Option<&SegmentResult> {
    results
        .iter()
        .fold(None, |best: Option<&SegmentResult>, r| match best {
            Some(b) if b.energy <= r.energy => Some(b),
            _ => Some(r),
        })
}

fn solve_in_mode(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
    mode: BeamformingMode,
) -> Result<AllocationSolution> {
    if eff.mode != mode || cfg.mode != mode {
        return Err(crate::error::invalid(
            "mode",
            format!("expected {mode} channel and config"),
        ));
    }
    let results = segment_results(eff, pa, circuit, cfg)?;
    let best =
        pick_best(&results).ok_or_else(|| Error::Infeasible("no feasible segment".into()))?;
    if !best.energy.is_finite() {
        return Err(Error::Infeasible("no finite-energy duration".into()));
    }
    assemble_solution(best.t, best.segment.m, eff, pa, circuit, cfg)
}

/// Non-coherent solver: endpoints of the concave segments, a convex search on
/// `[t_min^1, T]` when it is non-empty, and the overall argmin.
pub fn solve_noncoherent(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    solve_in_mode(eff, pa, circuit, cfg, BeamformingMode::NonCoherent)
}

/// Coherent solver: a convex search on every non-empty segment and the overall argmin.
pub fn solve_coherent(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    solve_in_mode(eff, pa, circuit, cfg, BeamformingMode::Coherent)
}

/// Dispatches on the beamforming mode of `eff`.
pub fn solve(
    eff: &EffectiveChannel,
    pa: &PaModel,
    circuit: &CircuitModel,
    cfg: &SystemConfig,
) -> Result<AllocationSolution> {
    match eff.mode {
        BeamformingMode::NonCoherent => solve_noncoherent(eff, pa, circuit, cfg),
        BeamformingMode::Coherent => solve_coherent(eff, pa, circuit, cfg),
    }
}
