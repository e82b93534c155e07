// SPDX-License-Identifier: Apache-2.0

use bosent_core::dynamics::{stationary_states, Liouvillian};
use bosent_core::entanglement::{negativity_mixture, negativity_mixture_oracle};
use bosent_core::linalg::real_trace;

use super::{Context, TaskOutput};
use crate::build::{changes_number, liouvillian, prepare};
use crate::config::{ExperimentConfig, TaskConfig, TaskKind};
use crate::error::{CliError, CliResult};
use crate::output::{column, float, Cell, ColumnType, Table};

const RELAX_POINTS: usize = 51;

pub fn run(ctx: Context, cfg: &ExperimentConfig, base: &str) -> CliResult<TaskOutput> {
    let TaskConfig::Stationary { relax_time } = cfg.task_for(TaskKind::Stationary, base)? else {
        unreachable!("task kind checked by task_for")
    };
    let prep = prepare(cfg, ctx.seed, base)?;
    let sys = prep.system;
    let core = |e| CliError::from_core(e, base);
    let l = match &prep.rho0 {
        Some(rho0) => liouvillian(&prep.generator, rho0, base)?,
        None => {
            let n = sys.particles;
            let sectors = if changes_number(&prep.generator) { 0..=n } else { n..=n };
            Liouvillian::build_on(&prep.generator, sectors, sys.modes)
                .map_err(|e| CliError::config(format!("{base}/hamiltonian"), e))?
        }
    };
    let space = stationary_states(&l);
    let dim = space.dimension();
    let stem = cfg.file_stem(TaskKind::Stationary);

    let mut columns = vec![
        column("state", ColumnType::Integer, "", "index of the kernel basis element"),
        column("kernel_dimension", ColumnType::Integer, "", "dimension of the stationary space"),
        column("normalizable", ColumnType::Bool, "", "basis element has nonzero trace"),
        column("particles", ColumnType::Integer, "", "sector N"),
        float("weight", "", "population of sector N in the normalized state"),
        float("purity", "", "Tr ρ_N² of the normalized sector block"),
        float("negativity_formula", "", "negativity of the normalized stationary state"),
    ];
    if ctx.oracle {
        columns.push(float("negativity_oracle", "", "negativity from partial-transpose eigenvalues"));
    }
    let mut table = Table::new(stem.clone(), columns);
    for (i, state) in space.normalized().into_iter().enumerate() {
        match state {
            Ok(mix) => {
                let neg = negativity_mixture(&mix, prep.bip).map_err(core)?;
                let oracle = if ctx.oracle {
                    Some(negativity_mixture_oracle(&mix, prep.bip).map_err(core)?)
                } else {
                    None
                };
                for &(w, ref rho) in mix.components() {
                    let m = rho.matrix();
                    let mut row: Vec<Cell> = vec![
                        i.into(),
                        dim.into(),
                        true.into(),
                        rho.particles().into(),
                        w.into(),
                        real_trace(&(m * m)).into(),
                        neg.into(),
                    ];
                    if let Some(o) = oracle {
                        row.push(o.into());
                    }
                    table.push(row);
                }
            }
            Err(_) => {
                let mut row: Vec<Cell> = vec![i.into(), dim.into(), false.into()];
                row.extend(std::iter::repeat_n(Cell::Empty, table.columns.len() - 3));
                table.push(row);
            }
        }
    }
    let mut out = TaskOutput::default();
    out.tables.push(table);

    if let (1, Some(rho0)) = (dim, &prep.rho0) {
        let target = space.unique_state().map_err(core)?;
        let times = match &cfg.time_grid {
            Some(g) => g.times(),
            None => {
                let lam_min = prep
                    .generator
                    .jumps
                    .iter()
                    .map(|j| j.rate)
                    .filter(|r| *r > 0.0)
                    .fold(f64::INFINITY, f64::min);
                let horizon = relax_time.unwrap_or(50.0 / lam_min);
                if !horizon.is_finite() {
                    return Err(CliError::config(format!("{base}/task/relax_time"), "no positive rate; give relax_time"));
                }
                (0..RELAX_POINTS)
                    .map(|i| horizon * i as f64 / (RELAX_POINTS - 1) as f64)
                    .collect()
            }
        };
        let states = l.propagator().evolve_grid(rho0, &times).map_err(core)?;
        let mut relax = Table::new(
            format!("{stem}-relaxation"),
            vec![
                float("t", "time", "evolution time"),
                float("trace_distance", "", "½‖ρ(t) − ρ_ss‖₁ to the unique stationary state"),
            ],
        );
        for (t, s) in times.iter().zip(&states) {
            relax.push(vec![(*t).into(), s.trace_distance(&target).into()]);
        }
        out.tables.push(relax);
    }
    Ok(out)
}
