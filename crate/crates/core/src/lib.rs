//! Energy-efficient transmission for hybrid antenna arrays driven by
//! non-ideal power amplifiers.
//!
//! Each subarray's amplifier draws `√(p·P_max)/η_max` for transmit power `p`,
//! and every active subarray adds static and rate-dependent circuit power.
//! Given a per-slot bit budget, the solvers choose the transmit duration, the
//! number of active subarrays and their powers to maximize bits per Joule.
//!
//! ```
//! use hybrid_ee::{solve, BeamformingMode, CircuitModel, EffectiveChannel, PaModel, SystemConfig};
//!
//! let cfg = SystemConfig { num_subarrays: 3, ..SystemConfig::default() };
//! let pa = PaModel::default();
//! let eff = EffectiveChannel::from_gains(vec![4e-6, 2e-6, 3e-6], BeamformingMode::Coherent, &pa).unwrap();
//! let sol = solve(&eff, &pa, &CircuitModel::default(), &cfg).unwrap();
//! assert!(sol.t_star <= cfg.slot && sol.ee > 0.0);
//! ```

// `!(a <= b)` guards are written to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channel;
pub mod duration;
pub mod error;
pub mod model;
pub mod oracle;
pub mod power;
pub mod search;

pub use baselines::{solve_scheme, SchemeId};
pub use channel::{effective_gains, sample_channels, PathLossModel};
pub use duration::{build_segments, solve, solve_coherent, solve_noncoherent, Segment};
pub use error::{Error, Result};
pub use model::{
    AllocationSolution, BeamformingMode, ChannelRealization, CircuitModel, DynamicPower,
    EffectiveChannel, EnergyBreakdown, PaModel, SystemConfig,
};
pub use oracle::{brute_force_solve, verify_solution, OracleGrid};
pub use power::{optimal_powers, PowerAllocation};
