// SPDX-License-Identifier: Apache-2.0

//! Property suite for one configured system.

use bosent_core::analysis::check_decoherence_equality;
use bosent_core::dynamics::{evolve_rk4, stationary_states};
use bosent_core::entanglement::{negativity_mixture, negativity_mixture_oracle};
use bosent_core::linalg::{hermiticity_defect, max_abs};
use bosent_core::par;

use super::{bound_name, bound_trace, Context, TaskOutput, ORACLE_TOL, POSITIVITY_TOL};
use crate::build::{hamiltonian_is_diagonal, liouvillian, prepare};
use crate::config::{ExperimentConfig, TaskConfig, TaskKind};
use crate::error::{CliError, CliResult};
use crate::output::{column, float, Cell, ColumnType, Table};

/// One line of the report: passes when `value` is on the right side of
/// `tolerance`.
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    /// `true`: need `value ≤ tolerance`; `false`: need `value ≥ tolerance`.
    upper: bool,
}

impl Check {
    fn passed(&self) -> bool {
        if self.upper {
            self.value <= self.tolerance
        } else {
            self.value >= self.tolerance
        }
    }
}

fn upper(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        value,
        tolerance,
        upper: true,
    }
}

fn lower(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
    Check {
        name: name.into(),
        value,
        tolerance,
        upper: false,
    }
}

pub fn run(ctx: Context, cfg: &ExperimentConfig, base: &str) -> CliResult<TaskOutput> {
    let TaskConfig::Verify { bound } = cfg.task_for(TaskKind::Verify, base)? else {
        unreachable!("task kind checked by task_for")
    };
    let prep = prepare(cfg, ctx.seed, base)?;
    let rho0 = prep.rho0.expect("validated initial state");
    let times = cfg.time_grid.expect("validated time grid").times();
    let core = |e| CliError::from_core(e, base);
    let l = liouvillian(&prep.generator, &rho0, base)?;
    let states = l.propagator().evolve_grid(&rho0, &times).map_err(core)?;

    let mut checks = vec![upper("trace_preservation", l.trace_defect(), 1e-10)];
    let mut herm = 0.0_f64;
    let mut trace = 0.0_f64;
    let mut min_eig = f64::INFINITY;
    for s in &states {
        trace = trace.max((s.total_weight() - 1.0).abs());
        min_eig = min_eig.min(s.min_eigenvalue());
        for n in s.particle_numbers() {
            herm = herm.max(hermiticity_defect(&s.block(n).expect("listed sector")));
        }
    }
    checks.push(upper("max_hermiticity_defect", herm, 1e-10));
    checks.push(upper("max_trace_error", trace, 1e-10));
    checks.push(lower("min_eigenvalue", min_eig, -POSITIVITY_TOL));

    let formula = par::try_map(&states, |s| negativity_mixture(s, prep.bip)).map_err(core)?;
    let oracle = par::try_map(&states, |s| negativity_mixture_oracle(s, prep.bip)).map_err(core)?;
    let gap = formula.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(upper("formula_oracle_agreement", gap, ORACLE_TOL));

    if let Some((kind, trace)) = bound_trace(bound, &prep.generator, rho0.as_sector(), prep.bip, &times, base)? {
        checks.push(lower(format!("{}_bound_margin", bound_name(kind)), trace.margin, -bosent_core::analysis::BOUND_TOL));
    }

    if let Some(rho) = rho0.as_sector() {
        let n = rho.particles();
        if prep.generator.is_pure_dephasing() && hamiltonian_is_diagonal(&prep.generator, n, rho.modes()) {
            let t = *times.last().expect("nonempty grid");
            let dev = check_decoherence_equality(&prep.generator, rho, t).map_err(core)?;
            checks.push(upper("decoherence_equality", dev, 1e-9));
        }
    }

    let kernel = stationary_states(&l).dimension();
    checks.push(lower("stationary_dimension", kernel as f64, 1.0));

    if ctx.oracle {
        let t = *times.last().expect("nonempty grid");
        let exact = states.last().expect("nonempty grid");
        let rk4 = evolve_rk4(&l, &rho0, t, None).map_err(core)?;
        let diff = exact
            .particle_numbers()
            .iter()
            .map(|&n| max_abs(&(exact.block(n).unwrap() - rk4.block(n).unwrap())))
            .fold(0.0, f64::max);
        checks.push(upper("rk4_agreement", diff, 1e-6));
    }

    let mut table = Table::new(
        cfg.file_stem(TaskKind::Verify),
        vec![
            column("check", ColumnType::String, "", "property checked"),
            float("value", "", "measured value"),
            float("tolerance", "", "threshold the value is compared against"),
            column("comparison", ColumnType::String, "", "`le` when value must not exceed the tolerance, `ge` otherwise"),
            column("pass", ColumnType::Bool, "", "whether the check holds"),
        ],
    );
    let mut out = TaskOutput::default();
    for c in &checks {
        let pass = c.passed();
        if !pass {
            out.violations.push(format!("{}: {:e} vs {:e}", c.name, c.value, c.tolerance));
        }
        table.push(vec![
            Cell::Text(c.name.clone()),
            c.value.into(),
            c.tolerance.into(),
            if c.upper { "le" } else { "ge" }.into(),
            pass.into(),
        ]);
    }
    out.tables.push(table);
    Ok(out)
}
