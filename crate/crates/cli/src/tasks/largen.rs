// SPDX-License-Identifier: Apache-2.0

use bosent_core::analysis::{
    decay_regime_scan, largen_asymptotic, largen_exact, log_grid, validity_window, AsymptoticSpec, DecayModel,
    ValidityGate,
};
use bosent_core::dynamics::{LindbladGenerator, Liouvillian};
use bosent_core::entanglement::negativity_mixture_oracle;
use bosent_core::fock::Bipartition;
use bosent_core::par;
use bosent_core::states::{NumberMixture, SectorDensityMatrix};
use bosent_core::{CMatrix, C64};

use super::{Context, TaskOutput};
use crate::config::{ExperimentConfig, TableConfig, TaskConfig, TaskKind};
use crate::error::{CliError, CliResult};
use crate::output::{column, float, Cell, ColumnType, Table};

/// Largest `N` for which `--oracle` evolves the full two-mode sector.
pub const ORACLE_MAX_N: usize = 20;

const ORACLE_TOL: f64 = 1e-9;

pub fn coefficient_table(n: usize, table: TableConfig) -> CMatrix {
    match table {
        TableConfig::Flat => CMatrix::from_element(n + 1, n + 1, C64::new(1.0 / (n + 1) as f64, 0.0)),
        TableConfig::Gaussian { width } => {
            let sigma = width * n as f64;
            let amp: Vec<f64> = (0..=n)
                .map(|k| {
                    let d = k as f64 - n as f64 / 2.0;
                    (-d * d / (4.0 * sigma * sigma)).exp()
                })
                .collect();
            let norm: f64 = amp.iter().map(|a| a * a).sum();
            CMatrix::from_fn(n + 1, n + 1, |k, l| C64::new(amp[k] * amp[l] / norm, 0.0))
        }
    }
}

/// Negativity of the same state evolved by the full two-mode Liouvillian.
fn oracle_negativity(spec: &AsymptoticSpec, eps: &[f64; 2], times: &[f64]) -> bosent_core::Result<Vec<f64>> {
    let n = spec.n;
    let table = &spec.channels[0];
    let m = CMatrix::from_fn(n + 1, n + 1, |i, j| table[(n - i, n - j)]);
    let rho = SectorDensityMatrix::new(n, 2, m)?;
    let gen = LindbladGenerator::diagonal(eps).with_dephasing(&spec.rates);
    let l = Liouvillian::build_on(&gen, n..=n, 2)?;
    let bip = Bipartition::new(1, 2)?;
    let states = l.propagator().evolve_grid(&NumberMixture::single(rho), times)?;
    states.iter().map(|s| negativity_mixture_oracle(s, bip)).collect()
}

pub fn run(ctx: Context, cfg: &ExperimentConfig, base: &str) -> CliResult<TaskOutput> {
    let TaskConfig::LargeN {
        n: ns,
        rates,
        table,
        terms,
        eps,
        gate,
        points,
        strict,
    } = cfg.task_for(TaskKind::LargeN, base)?
    else {
        unreachable!("task kind checked by task_for")
    };
    let gate = gate.map_or_else(ValidityGate::default, |g| ValidityGate {
        min_tsn: g.min_tsn,
        max_ts: g.max_ts,
    });
    let mut cases = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let spec = AsymptoticSpec::two_mode(n, rates, coefficient_table(n, table))
            .map_err(|e| CliError::config(format!("{base}/task/n/{i}"), e))?
            .with_terms(terms)
            .with_gate(gate);
        let times = match &cfg.time_grid {
            Some(g) => g.times(),
            None => match validity_window(&spec) {
                Some((lo, hi)) => log_grid(lo, hi, points),
                None => {
                    return Err(CliError::config(
                        format!("{base}/time_grid"),
                        format!("the fit window is empty for N = {n}; give an explicit time_grid"),
                    ))
                }
            },
        };
        cases.push((spec, times));
    }

    let all_columns = |oracle: bool| {
        let mut c = vec![
            column("n", ColumnType::Integer, "", "particle number N"),
            float("t", "time", "evolution time"),
            float("ts", "", "t S with S = Σ λ_j c_j"),
            float("tsn", "", "t S N^(2α), the large-N scaling variable"),
            float("exact", "", "exact negativity from the coefficient sum"),
            float("asymptotic", "", "truncated asymptotic series"),
            float("leading", "", "leading term of the series"),
            float("relative_error", "", "|asymptotic − exact| / exact"),
            column("in_regime", ColumnType::Bool, "", "validity gate satisfied"),
        ];
        if oracle {
            c.push(float(
                "oracle",
                "",
                format!("negativity from full two-mode evolution; empty for N > {ORACLE_MAX_N}"),
            ));
        }
        c
    };
    let stem = cfg.file_stem(TaskKind::LargeN);
    let mut curve = Table::new(stem.clone(), all_columns(ctx.oracle));
    let mut out = TaskOutput::default();
    let core = |e| CliError::from_core(e, base);
    for (spec, times) in &cases {
        let s = spec.s();
        let scale = (spec.n as f64).powf(2.0 * spec.alpha);
        let exact = par::try_map(times, |&t| largen_exact(spec, &eps, t)).map_err(core)?;
        let approx = par::try_map(times, |&t| largen_asymptotic(spec, t)).map_err(core)?;
        let oracle = if ctx.oracle && spec.n <= ORACLE_MAX_N {
            Some(oracle_negativity(spec, &eps, times).map_err(core)?)
        } else {
            None
        };
        for (i, &t) in times.iter().enumerate() {
            let est = &approx[i];
            if strict && !est.in_regime {
                return Err(CliError::Numerical(format!(
                    "N = {}, t = {t}: {}",
                    spec.n,
                    est.gate_message.clone().unwrap_or_default()
                )));
            }
            let rel = if exact[i] > 0.0 {
                Some((est.value - exact[i]).abs() / exact[i])
            } else {
                None
            };
            let mut row: Vec<Cell> = vec![
                spec.n.into(),
                t.into(),
                (t * s).into(),
                (t * s * scale).into(),
                exact[i].into(),
                est.value.into(),
                est.leading.into(),
                rel.into(),
                est.in_regime.into(),
            ];
            if ctx.oracle {
                match &oracle {
                    Some(o) => {
                        if (o[i] - exact[i]).abs() > ORACLE_TOL {
                            out.violations.push(format!(
                                "N = {}, t = {t}: oracle {} vs exact {}",
                                spec.n, o[i], exact[i]
                            ));
                        }
                        row.push(o[i].into());
                    }
                    None => row.push(Cell::Empty),
                }
            }
            curve.push(row);
        }
    }

    let fits = decay_regime_scan(&cases).map_err(core)?;
    let mut fit_table = Table::new(
        format!("{stem}-fit"),
        vec![
            column("n", ColumnType::Integer, "", "particle number N"),
            float("algebraic_exponent", "", "slope of log negativity against log t"),
            float("algebraic_residual", "", "sum of squared residuals of the algebraic fit"),
            float("exponential_rate", "1/time", "minus the slope of log negativity against t"),
            float("exponential_residual", "", "sum of squared residuals of the exponential fit"),
            column("preferred", ColumnType::String, "", "`algebraic` or `exponential`: the lower residual"),
            column("monotone", ColumnType::Bool, "", "exact negativity non-increasing on the grid"),
        ],
    );
    for f in &fits {
        if !f.monotone {
            out.violations.push(format!("N = {}: negativity increases along the grid", f.n));
        }
        fit_table.push(vec![
            f.n.into(),
            f.algebraic.slope.into(),
            f.algebraic.residual.into(),
            (-f.exponential.slope).into(),
            f.exponential.residual.into(),
            match f.preferred {
                DecayModel::Algebraic => "algebraic",
                DecayModel::Exponential => "exponential",
            }
            .into(),
            f.monotone.into(),
        ]);
    }
    out.tables.push(curve);
    out.tables.push(fit_table);
    Ok(out)
}
