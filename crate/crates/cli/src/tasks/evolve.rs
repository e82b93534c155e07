// SPDX-License-Identifier: Apache-2.0

use bosent_core::dynamics::{evolve_rk4, evolve_trotter, Liouvillian};
use bosent_core::entanglement::{negativity_mixture, negativity_mixture_oracle};
use bosent_core::par;
use bosent_core::states::NumberMixture;

use super::{bound_name, bound_trace, Context, TaskOutput, ORACLE_TOL, POSITIVITY_TOL};
use crate::build::{liouvillian, prepare};
use crate::config::{ExperimentConfig, Method, TaskConfig};
use crate::error::{CliError, CliResult};
use crate::output::{float, Cell, Table};

/// States on the grid with the configured integrator.
pub fn trajectory(
    l: &Liouvillian,
    rho0: &NumberMixture,
    times: &[f64],
    method: Method,
    rk4_step: Option<f64>,
    trotter_steps: Option<usize>,
    split: Option<(&Liouvillian, &Liouvillian)>,
) -> bosent_core::Result<Vec<NumberMixture>> {
    match method {
        Method::Exact => l.propagator().evolve_grid(rho0, times),
        Method::Rk4 => par::try_map(times, |&t| evolve_rk4(l, rho0, t, rk4_step)),
        Method::Trotter => {
            let (la, lb) = split.expect("split Liouvillians for Trotter");
            let steps = trotter_steps.unwrap_or(64);
            par::try_map(times, |&t| evolve_trotter(la, lb, rho0, t, steps))
        }
    }
}

pub fn run(ctx: Context, cfg: &ExperimentConfig, base: &str) -> CliResult<TaskOutput> {
    let TaskConfig::Evolve {
        method,
        bound,
        rk4_step,
        trotter_steps,
    } = cfg.task_for(crate::config::TaskKind::Evolve, base)?
    else {
        unreachable!("task kind checked by task_for")
    };
    let prep = prepare(cfg, ctx.seed, base)?;
    let rho0 = prep.rho0.expect("validated initial state");
    let times = cfg.time_grid.expect("validated time grid").times();
    let l = liouvillian(&prep.generator, &rho0, base)?;
    let split = match method {
        Method::Trotter => {
            let sectors = *l.layout().sectors().first().unwrap()..=*l.layout().sectors().last().unwrap();
            let la = Liouvillian::build_on(&prep.generator.hamiltonian_part(), sectors.clone(), rho0.modes())
                .map_err(|e| CliError::config(format!("{base}/hamiltonian"), e))?;
            let lb = Liouvillian::build_on(&prep.generator.dissipative_part(), sectors, rho0.modes())
                .map_err(|e| CliError::config(format!("{base}/noise"), e))?;
            Some((la, lb))
        }
        _ => None,
    };
    let states = trajectory(
        &l,
        &rho0,
        &times,
        method,
        rk4_step,
        trotter_steps,
        split.as_ref().map(|(a, b)| (a, b)),
    )
    .map_err(|e| CliError::from_core(e, base))?;
    let bound = bound_trace(bound, &prep.generator, rho0.as_sector(), prep.bip, &times, base)?;

    let sectors = l.layout().sectors().to_vec();
    let mut columns = vec![
        float("t", "time", "evolution time"),
        float("negativity_formula", "", "negativity from the block formula, trace-weighted over sectors"),
    ];
    if ctx.oracle {
        columns.push(float("negativity_oracle", "", "negativity from partial-transpose eigenvalues"));
    }
    columns.push(float("trace", "", "total trace of the evolved state"));
    columns.push(float("min_eigenvalue", "", "smallest eigenvalue of the block-diagonal state"));
    for n in &sectors {
        columns.push(float(format!("weight_n{n}"), "", format!("population of the {n}-particle sector")));
    }
    if let Some((kind, _)) = &bound {
        columns.push(float(
            "bound_rhs",
            "",
            format!("{} lower bound on the negativity", bound_name(*kind)),
        ));
    }
    let mut table = Table::new(cfg.file_stem(crate::config::TaskKind::Evolve), columns);
    let mut out = TaskOutput::default();

    let formula: Vec<f64> = par::try_map(&states, |s| negativity_mixture(s, prep.bip))
        .map_err(|e| CliError::from_core(e, base))?;
    let oracle: Option<Vec<f64>> = if ctx.oracle {
        Some(
            par::try_map(&states, |s| negativity_mixture_oracle(s, prep.bip))
                .map_err(|e| CliError::from_core(e, base))?,
        )
    } else {
        None
    };
    for (i, (t, s)) in times.iter().zip(&states).enumerate() {
        let mut row: Vec<Cell> = vec![(*t).into(), formula[i].into()];
        if let Some(o) = &oracle {
            row.push(o[i].into());
            if (o[i] - formula[i]).abs() > ORACLE_TOL {
                out.violations.push(format!(
                    "formula {} and oracle {} disagree at t = {t}",
                    formula[i], o[i]
                ));
            }
        }
        let min_eig = s.min_eigenvalue();
        if min_eig < -POSITIVITY_TOL {
            out.violations.push(format!("minimum eigenvalue {min_eig:e} at t = {t}"));
        }
        row.push(s.total_weight().into());
        row.push(min_eig.into());
        for &n in &sectors {
            row.push(s.weight(n).into());
        }
        if let Some((_, trace)) = &bound {
            row.push(trace.rhs[i].into());
        }
        table.push(row);
    }
    if let Some((kind, trace)) = &bound {
        if !trace.holds() {
            out.violations.push(format!(
                "{} bound violated: margin {:e}",
                bound_name(*kind),
                trace.margin
            ));
        }
    }
    out.tables.push(table);
    Ok(out)
}
