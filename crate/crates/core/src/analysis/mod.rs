// SPDX-License-Identifier: Apache-2.0

//! Bounds on negativity decay, separability thresholds and large-`N`
//! asymptotics.

mod bounds;
mod largen;
pub mod quadrature;
mod threshold;

pub use bounds::{
    check_decoherence_equality, check_dephasing_bound, check_loss_bound, dephasing_rates, loss_eta,
    negativity_trajectory, BoundTrace, BOUND_TOL,
};
pub use largen::{
    decay_regime_scan, derivative_integral, largen_asymptotic, largen_exact, log_grid, validity_window,
    AsymptoticEstimate, AsymptoticSpec, DecayFit, DecayModel, ValidityGate, DEFAULT_TERMS, FIT_WINDOW,
};
pub use threshold::{example_negativity, numerical_threshold, threshold_time, ExampleKind, CROSSING_TOL};
