//! Solver-versus-oracle comparison on random small instances.

use hybrid_ee::{
    brute_force_solve, effective_gains, sample_channels, solve, verify_solution, BeamformingMode,
    OracleGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::Scenario;
use crate::sweep::is_infeasible;
use crate::SimError;

/// Relative slack the solver may exceed the oracle energy by.
pub const ORACLE_ENERGY_SLACK: f64 = 0.005;
pub const CHECK_SUBARRAYS: usize = 2;
pub const CHECK_ANTENNAS: usize = 4;
/// Rate range instances are drawn from, Mbps.
pub const CHECK_RATE_MBPS: (f64, f64) = (10.0, 80.0);

/// One compared instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub instance: u64,
    pub mode: BeamformingMode,
    pub rate_mbps: f64,
    pub solver_energy: Option<f64>,
    pub oracle_energy: Option<f64>,
    pub passed: bool,
    pub note: String,
}

/// Rate of instance `i`; its own stream so it does not disturb the channel draw.
pub fn instance_rate(seed: u64, instance: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f72_6163_6c65);
    rng.set_stream(instance);
    let (lo, hi) = CHECK_RATE_MBPS;
    rng.random_range(lo..=hi)
}

/// Runs `instances` comparisons per mode with `M = 2`, `K = 4` and the other
/// parameters from `base`.
pub fn oracle_check(
    base: &Scenario,
    modes: &[BeamformingMode],
    instances: u64,
    seed: u64,
    grid: &OracleGrid,
) -> Result<Vec<CheckOutcome>, SimError> {
    let units: Vec<(u64, BeamformingMode)> = (0..instances)
        .flat_map(|i| modes.iter().map(move |&m| (i, m)))
        .collect();
    units
        .par_iter()
        .map(|&(instance, mode)| {
            let rate_mbps = instance_rate(seed, instance);
            let sc = Scenario {
                num_subarrays: CHECK_SUBARRAYS,
                antennas_per_subarray: CHECK_ANTENNAS,
                rate_mbps,
                ..base.clone()
            };
            let m = sc.models(mode)?;
            let real = sample_channels(&m.system, &m.path_loss, seed, instance);
            let eff = effective_gains(&real, mode, &m.pa)?;
            let sol = solve(&eff, &m.pa, &m.circuit, &m.system);
            let orc = brute_force_solve(&eff, &m.pa, &m.circuit, &m.system, grid);
            let mut out = CheckOutcome {
                instance,
                mode,
                rate_mbps,
                solver_energy: sol.as_ref().ok().map(|s| s.energy.total),
                oracle_energy: orc.as_ref().ok().map(|s| s.energy.total),
                passed: true,
                note: String::new(),
            };
            match (&sol, &orc) {
                (Err(e), _) if !is_infeasible(e) => return Err(e.clone().into()),
                (_, Err(e)) if !is_infeasible(e) => return Err(e.clone().into()),
                (Ok(s), _) => {
                    let report = verify_solution(s, &eff, &m.pa, &m.circuit, &m.system);
                    if !report.passed() {
                        out.passed = false;
                        out.note = format!("verification failed: {:?}", report.checks);
                    } else if let Ok(o) = &orc {
                        if s.energy.total > o.energy.total * (1.0 + ORACLE_ENERGY_SLACK) {
                            out.passed = false;
                            out.note = "solver energy above oracle".into();
                        }
                    }
                }
                (Err(_), Ok(_)) => {
                    out.passed = false;
                    out.note = "solver infeasible where oracle found a point".into();
                }
                (Err(_), Err(_)) => out.note = "infeasible for both".into(),
            }
            Ok(out)
        })
        .collect()
}
