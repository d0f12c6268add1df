//! Verdict engines for weak-star continuity and compactness of `D_φ`.
//!
//! Compactness analyzers answer the question "is `D_φ` compact?": a
//! non-compactness witness therefore concludes [`Verdict::Fails`]. Every
//! decisive verdict is a hypothesis check on the grid, not a proof.
//!
//! [`Verdict::Fails`]: crate::Verdict::Fails

mod compactness;
mod nets;
mod weakstar;

pub use compactness::{
    compact_verdict, noncompact_witness_limit, noncompact_witness_step, omega_minus_one_bound,
    svd_decay,
};
pub use nets::{family_total_boundedness, greedy_epsilon_net, EpsilonNet};
pub use weakstar::{
    default_t_grid, measure_u, measure_u_profile, pairing_witness, range_c0_check,
    weakstar_condition_check, weakstar_counterexample_check,
};
