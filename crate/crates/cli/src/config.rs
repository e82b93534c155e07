// SPDX-License-Identifier: Apache-2.0

//! JSON experiment configuration.
//!
//! A config document is either one experiment object or an array of them.
//! Parsing reports the JSON pointer of the first offending field; semantic
//! checks ([`ExperimentConfig::validate`]) do the same.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Stem of the output files; defaults to the task name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hamiltonian: Vec<HamiltonianConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noise: Vec<NoiseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    /// Seed for random states; `--seed` overrides it, default 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Particle number `N` of single-sector states (mixture components may
    /// override it).
    pub particles: usize,
    pub modes: usize,
    /// Number `m` of modes in subsystem A.
    pub bipartition: usize,
}

/// Product of ladder operators: whitespace-separated tokens `c<j>` for
/// `a_j†` and `a<j>` for `a_j`, applied right to left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    /// `[re, im]`.
    #[serde(default = "unit_coefficient")]
    pub coefficient: [f64; 2],
    pub word: String,
}

fn unit_coefficient() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    /// `Σ_j ε_j a_j† a_j`.
    Diagonal { energies: Vec<f64> },
    /// Nearest-neighbour chain `−Σ_j τ_j (a_j† a_{j+1} + h.c.)`.
    Hopping { amplitudes: Vec<f64> },
    /// `−τ (a_i† a_j + a_j† a_i)`.
    Hop { i: usize, j: usize, tau: f64 },
    Operator { terms: Vec<TermConfig> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    /// Jumps `a_j† a_j` with rates `λ_j`.
    Dephasing { rates: Vec<f64> },
    /// Jumps `a_j` with rates `λ_j`.
    Loss { rates: Vec<f64> },
    Custom { rate: f64, operator: Vec<TermConfig> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub k: usize,
    pub l: usize,
    #[serde(default)]
    pub sigma: usize,
    #[serde(default)]
    pub sigma_prime: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particles: Option<usize>,
    pub state: StateConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    /// `p|ψ⟩⟨ψ| + (1−p)/2 (|1100⟩⟨1100| + |0011⟩⟨0011|)` on `N = 2, M = 4`.
    Example { p: f64 },
    DiagonalClass {
        alpha: f64,
        c: Vec<f64>,
        entries: Vec<ClassEntry>,
    },
    /// `P(a†_A) Q(a†_B)|0⟩` with `k` particles on A; polynomials drawn
    /// from the seed when omitted.
    SeparablePure {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        poly_a: Option<Vec<TermConfig>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        poly_b: Option<Vec<TermConfig>>,
    },
    /// Random density matrix of the given rank, drawn from the seed.
    Random { rank: usize },
    Fock { occupations: Vec<u32> },
    MaximallyMixed,
    /// Explicit matrix in the canonical Fock order.
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
    Mixture { components: Vec<MixtureComponent> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Exact,
    Rk4,
    /// Hamiltonian and dissipative parts split, first order.
    Trotter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    None,
    /// Loss bound if its preconditions hold, else the dephasing bound if
    /// the noise is pure dephasing, else none.
    #[default]
    Auto,
    Loss,
    Dephasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    Loss,
    Dephasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TableConfig {
    /// `ρ_{kl} = 1/(N+1)`.
    #[default]
    Flat,
    /// Pure state with amplitudes `∝ exp(−(k − N/2)² / (4 (wN)²))`.
    Gaussian { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub min_tsn: f64,
    pub max_ts: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    Evolve {
        #[serde(default)]
        method: Method,
        #[serde(default)]
        bound: BoundKind,
        /// RK4 step; default `t / 1000` per sample.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rk4_step: Option<f64>,
        /// Trotter steps per sample; default 64.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trotter_steps: Option<usize>,
    },
    Verify {
        #[serde(default)]
        bound: BoundKind,
    },
    Threshold {
        example: ExampleName,
        p: Vec<f64>,
        rates: Vec<f64>,
        #[serde(default)]
        eps: [f64; 4],
    },
    LargeN {
        n: Vec<usize>,
        rates: [f64; 2],
        #[serde(default)]
        table: TableConfig,
        #[serde(default = "default_terms")]
        terms: usize,
        #[serde(default)]
        eps: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gate: Option<GateConfig>,
        /// Points on the fit window when no `time_grid` is given.
        #[serde(default = "default_points")]
        points: usize,
        /// Fail (exit 3) instead of flagging estimates outside the gate.
        #[serde(default)]
        strict: bool,
    },
    Stationary {
        /// Relaxation horizon for the approach to the unique stationary
        /// state; default `50 / λ_min`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        relax_time: Option<f64>,
    },
}

fn default_terms() -> usize {
    bosent_core::analysis::DEFAULT_TERMS
}

fn default_points() -> usize {
    25
}

/// Task selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Evolve,
    Verify,
    Threshold,
    LargeN,
    Stationary,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Evolve => "evolve",
            TaskKind::Verify => "verify",
            TaskKind::Threshold => "threshold",
            TaskKind::LargeN => "large-n",
            TaskKind::Stationary => "stationary",
        }
    }
}

impl TaskConfig {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskConfig::Evolve { .. } => TaskKind::Evolve,
            TaskConfig::Verify { .. } => TaskKind::Verify,
            TaskConfig::Threshold { .. } => TaskKind::Threshold,
            TaskConfig::LargeN { .. } => TaskKind::LargeN,
            TaskConfig::Stationary { .. } => TaskKind::Stationary,
        }
    }

    /// Task with default parameters, where every parameter has one.
    pub fn default_for(kind: TaskKind) -> Option<Self> {
        match kind {
            TaskKind::Evolve => Some(TaskConfig::Evolve {
                method: Method::Exact,
                bound: BoundKind::Auto,
                rk4_step: None,
                trotter_steps: None,
            }),
            TaskKind::Verify => Some(TaskConfig::Verify { bound: BoundKind::Auto }),
            TaskKind::Stationary => Some(TaskConfig::Stationary { relax_time: None }),
            TaskKind::Threshold | TaskKind::LargeN => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        match (self.points, self.spacing) {
            (0, _) => Vec::new(),
            (1, _) => vec![self.start],
            (n, Spacing::Linear) => (0..n)
                .map(|i| {
                    if i + 1 == n {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
            (n, Spacing::Log) => bosent_core::analysis::log_grid(self.start, self.stop, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// Experiment paired with the JSON pointer of its object in the document.
#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub pointer: String,
    pub config: ExperimentConfig,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", escape(variant))),
            Segment::Unknown => {}
        }
    }
    out
}

/// Parses a config document (object or array of objects).
pub fn parse_document(text: &str) -> CliResult<Vec<Located>> {
    let fail = |e: serde_path_to_error::Error<serde_json::Error>| {
        CliError::config(pointer_of(e.path()), e.inner())
    };
    if text.trim_start().starts_with('[') {
        let de = &mut serde_json::Deserializer::from_str(text);
        let list: Vec<ExperimentConfig> = serde_path_to_error::deserialize(de).map_err(fail)?;
        if list.is_empty() {
            return Err(CliError::config("", "empty experiment list"));
        }
        Ok(list
            .into_iter()
            .enumerate()
            .map(|(i, config)| Located {
                pointer: format!("/{i}"),
                config,
            })
            .collect())
    } else {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(fail)?;
        Ok(vec![Located {
            pointer: String::new(),
            config,
        }])
    }
}

fn check_rate(value: f64, pointer: String) -> CliResult<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(pointer, format!("rate {value} must be finite and ≥ 0")))
    }
}

fn check_finite(values: &[f64], pointer: &str) -> CliResult<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(CliError::config(format!("{pointer}/{i}"), "value must be finite")),
        None => Ok(()),
    }
}

fn check_len(len: usize, expected: usize, pointer: String, what: &str) -> CliResult<()> {
    if len == expected {
        Ok(())
    } else {
        Err(CliError::config(pointer, format!("expected {expected} {what}, got {len}")))
    }
}

/// Parses a ladder word; `modes` bounds the mode indices.
pub fn parse_word(word: &str, modes: usize) -> Result<Vec<bosent_core::fock::LadderOp>, String> {
    use bosent_core::fock::LadderOp;
    word.split_whitespace()
        .map(|tok| {
            let (head, digits) = tok.split_at(1.min(tok.len()));
            let mode: usize = digits.parse().map_err(|_| format!("bad token `{tok}` (use a<j> or c<j>)"))?;
            if mode == 0 || mode > modes {
                return Err(format!("mode {mode} in `{tok}` out of range 1..={modes}"));
            }
            match head {
                "a" => Ok(LadderOp::annihilate(mode)),
                "c" => Ok(LadderOp::create(mode)),
                _ => Err(format!("bad token `{tok}` (use a<j> or c<j>)")),
            }
        })
        .collect()
}

fn check_terms(terms: &[TermConfig], modes: usize, pointer: &str) -> CliResult<()> {
    for (i, t) in terms.iter().enumerate() {
        check_finite(&t.coefficient, &format!("{pointer}/{i}/coefficient"))?;
        parse_word(&t.word, modes).map_err(|m| CliError::config(format!("{pointer}/{i}/word"), m))?;
    }
    Ok(())
}

impl TimeGrid {
    fn validate(&self, pointer: &str) -> CliResult<()> {
        if !self.start.is_finite() || self.start < 0.0 {
            return Err(CliError::config(format!("{pointer}/start"), "start must be finite and ≥ 0"));
        }
        if !self.stop.is_finite() {
            return Err(CliError::config(format!("{pointer}/stop"), "stop must be finite"));
        }
        if self.points == 0 {
            return Err(CliError::config(format!("{pointer}/points"), "need at least one point"));
        }
        if self.points > 1 && !(self.stop > self.start) {
            return Err(CliError::config(
                format!("{pointer}/stop"),
                "grid must be strictly increasing (stop > start)",
            ));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return Err(CliError::config(format!("{pointer}/start"), "log spacing needs start > 0"));
        }
        Ok(())
    }
}

impl ExperimentConfig {
    /// The task to run under subcommand `kind`: the configured one, which
    /// must match, or the default for `kind`.
    pub fn task_for(&self, kind: TaskKind, base: &str) -> CliResult<TaskConfig> {
        match &self.task {
            Some(t) if t.kind() == kind => Ok(t.clone()),
            Some(t) => Err(CliError::config(
                format!("{base}/task/kind"),
                format!("config describes task `{}`, not `{}`", t.kind().as_str(), kind.as_str()),
            )),
            None => TaskConfig::default_for(kind)
                .ok_or_else(|| CliError::config(format!("{base}/task"), format!("task `{}` needs parameters", kind.as_str()))),
        }
    }

    pub fn system_or_err(&self, base: &str) -> CliResult<SystemConfig> {
        self.system
            .ok_or_else(|| CliError::config(format!("{base}/system"), "this task needs a system"))
    }

    pub fn file_stem(&self, kind: TaskKind) -> String {
        self.name.clone().unwrap_or_else(|| kind.as_str().to_string())
    }

    /// Semantic checks for running under `kind`; `base` is the pointer of
    /// this experiment in its document.
    pub fn validate(&self, kind: TaskKind, base: &str) -> CliResult<()> {
        if let Some(name) = &self.name {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(CliError::config(format!("{base}/name"), "name must be non-empty [A-Za-z0-9_-]"));
            }
        }
        let task = self.task_for(kind, base)?;
        if let Some(grid) = &self.time_grid {
            grid.validate(&format!("{base}/time_grid"))?;
        }
        match &task {
            TaskConfig::Threshold { example, p, rates, eps } => {
                for (i, &pi) in p.iter().enumerate() {
                    if !(0.0..=1.0).contains(&pi) {
                        return Err(CliError::config(format!("{base}/task/p/{i}"), format!("p = {pi} not in [0, 1]")));
                    }
                }
                let expected = match example {
                    ExampleName::Loss => 1,
                    ExampleName::Dephasing => 4,
                };
                check_len(rates.len(), expected, format!("{base}/task/rates"), "rates")?;
                for (i, &r) in rates.iter().enumerate() {
                    check_rate(r, format!("{base}/task/rates/{i}"))?;
                }
                check_finite(eps, &format!("{base}/task/eps"))?;
                return Ok(());
            }
            TaskConfig::LargeN {
                n,
                rates,
                table,
                points,
                gate,
                eps,
                ..
            } => {
                if n.is_empty() {
                    return Err(CliError::config(format!("{base}/task/n"), "no particle numbers"));
                }
                if let Some(i) = n.iter().position(|&v| v == 0) {
                    return Err(CliError::config(format!("{base}/task/n/{i}"), "N must be ≥ 1"));
                }
                for (i, &r) in rates.iter().enumerate() {
                    check_rate(r, format!("{base}/task/rates/{i}"))?;
                }
                if rates.iter().sum::<f64>() <= 0.0 {
                    return Err(CliError::config(format!("{base}/task/rates"), "S = λ_1 + λ_2 must be positive"));
                }
                if let TableConfig::Gaussian { width } = table {
                    if !(*width > 0.0) || !width.is_finite() {
                        return Err(CliError::config(format!("{base}/task/table/width"), "width must be positive"));
                    }
                }
                if self.time_grid.is_none() && *points < 2 {
                    return Err(CliError::config(format!("{base}/task/points"), "need at least two points"));
                }
                if let Some(g) = gate {
                    if !(g.min_tsn >= 0.0) || !(g.max_ts > 0.0) {
                        return Err(CliError::config(format!("{base}/task/gate"), "gate limits must be positive"));
                    }
                }
                check_finite(eps, &format!("{base}/task/eps"))?;
                return Ok(());
            }
            TaskConfig::Evolve {
                rk4_step,
                trotter_steps,
                ..
            } => {
                if let Some(h) = rk4_step {
                    if !(*h > 0.0) || !h.is_finite() {
                        return Err(CliError::config(format!("{base}/task/rk4_step"), "step must be positive"));
                    }
                }
                if *trotter_steps == Some(0) {
                    return Err(CliError::config(format!("{base}/task/trotter_steps"), "need at least one step"));
                }
            }
            TaskConfig::Stationary { relax_time } => {
                if let Some(t) = relax_time {
                    if !(*t > 0.0) || !t.is_finite() {
                        return Err(CliError::config(format!("{base}/task/relax_time"), "must be positive"));
                    }
                }
            }
            TaskConfig::Verify { .. } => {}
        }
        let sys = self.system_or_err(base)?;
        if sys.modes < 2 {
            return Err(CliError::config(format!("{base}/system/modes"), "need at least two modes"));
        }
        if sys.bipartition == 0 || sys.bipartition >= sys.modes {
            return Err(CliError::config(
                format!("{base}/system/bipartition"),
                format!("need 1 ≤ m < M = {}, got m = {}", sys.modes, sys.bipartition),
            ));
        }
        let modes = sys.modes;
        for (i, h) in self.hamiltonian.iter().enumerate() {
            let p = format!("{base}/hamiltonian/{i}");
            match h {
                HamiltonianConfig::Diagonal { energies } => {
                    check_len(energies.len(), modes, format!("{p}/energies"), "energies")?;
                    check_finite(energies, &format!("{p}/energies"))?;
                }
                HamiltonianConfig::Hopping { amplitudes } => {
                    check_len(amplitudes.len(), modes - 1, format!("{p}/amplitudes"), "amplitudes")?;
                    check_finite(amplitudes, &format!("{p}/amplitudes"))?;
                }
                HamiltonianConfig::Hop { i, j, tau } => {
                    for (field, v) in [("i", *i), ("j", *j)] {
                        if v == 0 || v > modes {
                            return Err(CliError::config(format!("{p}/{field}"), format!("mode {v} out of range 1..={modes}")));
                        }
                    }
                    if i == j {
                        return Err(CliError::config(format!("{p}/j"), "hop needs two different modes"));
                    }
                    check_finite(&[*tau], &format!("{p}/tau"))?;
                }
                HamiltonianConfig::Operator { terms } => check_terms(terms, modes, &format!("{p}/terms"))?,
            }
        }
        for (i, n) in self.noise.iter().enumerate() {
            let p = format!("{base}/noise/{i}");
            match n {
                NoiseConfig::Dephasing { rates } | NoiseConfig::Loss { rates } => {
                    check_len(rates.len(), modes, format!("{p}/rates"), "rates")?;
                    for (j, &r) in rates.iter().enumerate() {
                        check_rate(r, format!("{p}/rates/{j}"))?;
                    }
                }
                NoiseConfig::Custom { rate, operator } => {
                    check_rate(*rate, format!("{p}/rate"))?;
                    if operator.is_empty() {
                        return Err(CliError::config(format!("{p}/operator"), "empty operator"));
                    }
                    check_terms(operator, modes, &format!("{p}/operator"))?;
                }
            }
        }
        if self.initial_state.is_none() && kind != TaskKind::Stationary {
            return Err(CliError::config(format!("{base}/initial_state"), "this task needs an initial state"));
        }
        if self.time_grid.is_none() && matches!(kind, TaskKind::Evolve | TaskKind::Verify) {
            return Err(CliError::config(format!("{base}/time_grid"), "this task needs a time grid"));
        }
        Ok(())
    }
}
