// SPDX-License-Identifier: Apache-2.0

pub mod evolve;
pub mod largen;
pub mod stationary;
pub mod threshold;
pub mod verify;

use bosent_core::analysis::{check_dephasing_bound, check_loss_bound, BoundTrace};
use bosent_core::fock::Bipartition;
use bosent_core::dynamics::LindbladGenerator;
use bosent_core::states::SectorDensityMatrix;
use bosent_core::Error as CoreError;

use crate::config::BoundKind;
use crate::error::{CliError, CliResult};
use crate::output::Table;

/// Run-wide settings from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Context {
    pub seed: u64,
    pub oracle: bool,
}

/// Tables to write plus any invariant violations found while producing
/// them. Violations turn into exit code 2 after the tables are written.
#[derive(Debug, Default)]
pub struct TaskOutput {
    pub tables: Vec<Table>,
    pub violations: Vec<String>,
}

/// Tolerance for formula and oracle negativities to agree.
pub const ORACLE_TOL: f64 = 1e-10;

/// Positivity tolerance on evolved states.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Which bound applies. For `Auto`, the loss bound when its preconditions
/// hold, otherwise the dephasing bound when every jump is a number
/// operator and the state qualifies, otherwise none.
pub fn bound_trace(
    kind: BoundKind,
    gen: &LindbladGenerator,
    rho0: Option<&SectorDensityMatrix>,
    bip: Bipartition,
    times: &[f64],
    base: &str,
) -> CliResult<Option<(BoundKind, BoundTrace)>> {
    let pointer = format!("{base}/task/bound");
    let Some(rho0) = rho0 else {
        return match kind {
            BoundKind::None | BoundKind::Auto => Ok(None),
            _ => Err(CliError::config(pointer, "bounds need a single-sector initial state")),
        };
    };
    let explicit = |k: BoundKind, r: bosent_core::Result<BoundTrace>| match r {
        Ok(t) => Ok(Some((k, t))),
        Err(e) => Err(CliError::from_core(e, &pointer)),
    };
    match kind {
        BoundKind::None => Ok(None),
        BoundKind::Loss => explicit(kind, check_loss_bound(gen, rho0, bip, times)),
        BoundKind::Dephasing => explicit(kind, check_dephasing_bound(gen, rho0, bip, times)),
        BoundKind::Auto => match check_loss_bound(gen, rho0, bip, times) {
            Ok(t) => Ok(Some((BoundKind::Loss, t))),
            Err(CoreError::PreconditionViolated(_)) if gen.is_pure_dephasing() => {
                match check_dephasing_bound(gen, rho0, bip, times) {
                    Ok(t) => Ok(Some((BoundKind::Dephasing, t))),
                    Err(CoreError::PreconditionViolated(_)) => Ok(None),
                    Err(e) => Err(CliError::from_core(e, &pointer)),
                }
            }
            Err(CoreError::PreconditionViolated(_)) => Ok(None),
            Err(e) => Err(CliError::from_core(e, &pointer)),
        },
    }
}

pub fn bound_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Loss => "loss",
        BoundKind::Dephasing => "dephasing",
        BoundKind::None | BoundKind::Auto => "none",
    }
}
