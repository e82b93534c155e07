// SPDX-License-Identifier: Apache-2.0

//! Entanglement dynamics of `N` identical bosons in `M` modes.
//!
//! Entanglement is measured with respect to an *algebraic bipartition* of the
//! modes: the first `m` modes form subsystem A, the remaining `M - m` form B.
//! The crate provides
//!
//! * [`fock`]: fixed-`N` Fock bases, separable labels `(k, σ, σ')` and
//!   matrices of ladder-operator polynomials;
//! * [`states`]: sector density matrices, particle-number mixtures and the
//!   standard example states;
//! * [`dynamics`]: Lindblad generators, Liouvillian superoperators and
//!   exact / RK4 / Trotter propagation;
//! * [`entanglement`]: negativity by the block formula and by a direct
//!   partial-transpose eigenvalue computation;
//! * [`analysis`]: lower bounds on negativity decay, separability thresholds
//!   and the large-`N` algebraic decay asymptotics.
//!
//! Units: `ħ = 1`, rates and energies are in inverse time.

pub mod analysis;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod fock;
pub mod linalg;
pub mod par;
pub mod random;
pub mod states;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
