// SPDX-License-Identifier: Apache-2.0

use bosent_core::analysis::{numerical_threshold, threshold_time, ExampleKind};

use super::{Context, TaskOutput};
use crate::config::{ExampleName, ExperimentConfig, TaskConfig, TaskKind};
use crate::error::{CliError, CliResult};
use crate::output::{column, float, Cell, ColumnType, Table};

/// Relative agreement required between closed form and bisection.
pub const THRESHOLD_TOL: f64 = 1e-6;

pub fn run(ctx: Context, cfg: &ExperimentConfig, base: &str) -> CliResult<TaskOutput> {
    let TaskConfig::Threshold { example, p, rates, eps } = cfg.task_for(TaskKind::Threshold, base)? else {
        unreachable!("task kind checked by task_for")
    };
    let kind = match example {
        ExampleName::Loss => ExampleKind::Loss,
        ExampleName::Dephasing => ExampleKind::Dephasing,
    };
    let name = match example {
        ExampleName::Loss => "loss",
        ExampleName::Dephasing => "dephasing",
    };
    let rate: f64 = rates.iter().sum();
    let mut columns = vec![
        column("example", ColumnType::String, "", "`loss` (pair loss a1 a3) or `dephasing` (all four modes)"),
        float("p", "", "weight of the entangled component"),
        float("rate", "1/time", "λ0 for losses, Σλ_j for dephasing"),
        float("t_star", "time", "closed-form separability time; empty when separable at t = 0"),
    ];
    if ctx.oracle {
        columns.push(float("t_numerical", "time", "first zero of the oracle negativity, by bisection"));
        columns.push(float("relative_difference", "", "|t_numerical − t_star| / t_star"));
    }
    let mut table = Table::new(cfg.file_stem(TaskKind::Threshold), columns);
    let mut out = TaskOutput::default();
    for (i, &pi) in p.iter().enumerate() {
        let pointer = format!("{base}/task/p/{i}");
        let t_star = threshold_time(kind, pi, &rates).map_err(|e| CliError::from_core(e, &pointer))?;
        let mut row: Vec<Cell> = vec![name.into(), pi.into(), rate.into(), t_star.into()];
        if ctx.oracle {
            match t_star {
                Some(ts) if ts.is_finite() && ts > 0.0 => {
                    let found = numerical_threshold(kind, pi, &rates, &eps, 5.0 * ts)
                        .map_err(|e| CliError::from_core(e, &pointer))?;
                    match found {
                        Some(tn) => {
                            let rel = (tn - ts).abs() / ts;
                            if rel > THRESHOLD_TOL {
                                out.violations
                                    .push(format!("p = {pi}: bisection {tn} vs closed form {ts}"));
                            }
                            row.push(tn.into());
                            row.push(rel.into());
                        }
                        None => {
                            out.violations.push(format!("p = {pi}: no crossing before 5 t*"));
                            row.push(Cell::Empty);
                            row.push(Cell::Empty);
                        }
                    }
                }
                _ => {
                    row.push(Cell::Empty);
                    row.push(Cell::Empty);
                }
            }
        }
        table.push(row);
    }
    out.tables.push(table);
    Ok(out)
}
