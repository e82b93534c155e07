// SPDX-License-Identifier: Apache-2.0

//! Lindblad generators, their superoperators and time evolution.

mod evolve;
mod examples;
mod generator;
mod liouvillian;
mod stationary;

pub use evolve::{evolve_exact, evolve_rk4, evolve_trotter, Diagnostics, Propagator};
pub use examples::{
    analytic_dephasing_example, analytic_loss_example, dephasing_example_generator, loss_example_generator,
    pair_loss_operator,
};
pub use generator::{hopping_between, hopping_hamiltonian, number_operator_mode, Jump, LindbladGenerator};
pub use liouvillian::{Liouvillian, SectorLayout, WEIGHT_FLOOR};
pub use stationary::{stationary_states, StationarySpace, NULL_SPACE_TOL};

impl Liouvillian {
    pub fn propagator(&self) -> Propagator<'_> {
        Propagator::new(self)
    }
}
