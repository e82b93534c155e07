// SPDX-License-Identifier: Apache-2.0

//! From validated config sections to core objects.

use std::collections::BTreeMap;

use bosent_core::dynamics::{hopping_between, hopping_hamiltonian, LindbladGenerator, Liouvillian};
use bosent_core::fock::{ladder_matrix, Bipartition, FockState, Ladder, OperatorSpec, Term};
use bosent_core::linalg::max_abs;
use bosent_core::random;
use bosent_core::states::{
    diagonal_class_state, example_state, separable_pure, ClassKey, NumberMixture, SectorDensityMatrix,
};
use bosent_core::{CMatrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{
    parse_word, ExperimentConfig, HamiltonianConfig, NoiseConfig, StateConfig, SystemConfig, TermConfig,
};
use crate::error::{CliError, CliResult};

pub fn operator(terms: &[TermConfig], modes: usize, pointer: &str) -> CliResult<OperatorSpec> {
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let word = parse_word(&t.word, modes).map_err(|m| CliError::config(format!("{pointer}/{i}/word"), m))?;
        out.push(Term {
            coefficient: C64::new(t.coefficient[0], t.coefficient[1]),
            word,
        });
    }
    Ok(OperatorSpec::new(out))
}

pub fn generator(cfg: &ExperimentConfig, sys: SystemConfig, base: &str) -> CliResult<LindbladGenerator> {
    let modes = sys.modes;
    let mut gen = LindbladGenerator::default();
    for (i, h) in cfg.hamiltonian.iter().enumerate() {
        let part = match h {
            HamiltonianConfig::Diagonal { energies } => LindbladGenerator::diagonal(energies).hamiltonian,
            HamiltonianConfig::Hopping { amplitudes } => hopping_hamiltonian(amplitudes),
            HamiltonianConfig::Hop { i, j, tau } => hopping_between(*i, *j, *tau),
            HamiltonianConfig::Operator { terms } => {
                operator(terms, modes, &format!("{base}/hamiltonian/{i}/terms"))?
            }
        };
        gen = gen.with_hamiltonian(part);
    }
    for (i, n) in cfg.noise.iter().enumerate() {
        gen = match n {
            NoiseConfig::Dephasing { rates } => gen.with_dephasing(rates),
            NoiseConfig::Loss { rates } => gen.with_loss(rates),
            NoiseConfig::Custom { rate, operator: terms } => {
                let pointer = format!("{base}/noise/{i}/operator");
                let op = operator(terms, modes, &pointer)?;
                match op.particle_change() {
                    Ok(d) if d > 0 => {
                        return Err(CliError::config(pointer, "jump operators may not create net particles"))
                    }
                    Ok(_) => {}
                    Err(e) => return Err(CliError::config(pointer, e)),
                }
                gen.with_jump(*rate, op)
            }
        };
    }
    gen.validate().map_err(|e| CliError::config(format!("{base}/hamiltonian"), e))?;
    Ok(gen)
}

/// True when some jump lowers the particle number.
pub fn changes_number(gen: &LindbladGenerator) -> bool {
    gen.jumps.iter().any(|j| j.operator.particle_change().is_ok_and(|d| d != 0))
}

/// True when `H` is diagonal in the Fock basis of sector `n`.
pub fn hamiltonian_is_diagonal(gen: &LindbladGenerator, n: usize, modes: usize) -> bool {
    match ladder_matrix(&gen.hamiltonian, n, modes) {
        Ok(Some(op)) => {
            let mut off = op.matrix.clone();
            off.fill_diagonal(C64::new(0.0, 0.0));
            max_abs(&off) == 0.0
        }
        _ => false,
    }
}

fn side_polynomial(terms: &[TermConfig], modes: usize, degree: usize, on_a: bool, bip: Bipartition, pointer: &str) -> CliResult<OperatorSpec> {
    let op = operator(terms, modes, pointer)?;
    for (i, t) in op.terms.iter().enumerate() {
        let ok = t.word.len() == degree
            && t.word.iter().all(|o| o.kind == Ladder::Create && bip.in_a(o.mode) == on_a);
        if !ok {
            return Err(CliError::config(
                format!("{pointer}/{i}/word"),
                format!(
                    "expected {degree} creation operators on side {}",
                    if on_a { "A" } else { "B" }
                ),
            ));
        }
    }
    Ok(op)
}

fn sector_state(
    state: &StateConfig,
    n: usize,
    sys: SystemConfig,
    rng: &mut ChaCha8Rng,
    pointer: &str,
) -> CliResult<SectorDensityMatrix> {
    let modes = sys.modes;
    let bip = Bipartition::new(sys.bipartition, modes).map_err(|e| CliError::config(pointer, e))?;
    let core = |e: bosent_core::Error| CliError::config(pointer, e);
    match state {
        StateConfig::Example { p } => {
            if n != 2 || modes != 4 {
                return Err(CliError::config(pointer, "the example state lives on N = 2, M = 4"));
            }
            example_state(*p).map_err(|e| CliError::config(format!("{pointer}/p"), e))
        }
        StateConfig::DiagonalClass { alpha, c, entries } => {
            let mut table = BTreeMap::new();
            for e in entries {
                table.insert(
                    ClassKey {
                        k: e.k,
                        l: e.l,
                        sigma: e.sigma,
                        sigma_prime: e.sigma_prime,
                    },
                    C64::new(e.re, e.im),
                );
            }
            diagonal_class_state(n, bip, &table, *alpha, c).map_err(core)
        }
        StateConfig::SeparablePure { k, poly_a, poly_b } => {
            if *k > n {
                return Err(CliError::config(format!("{pointer}/k"), format!("k = {k} exceeds N = {n}")));
            }
            let p = match poly_a {
                Some(t) => side_polynomial(t, modes, *k, true, bip, &format!("{pointer}/poly_a"))?,
                None => random::creation_polynomial(*k, 1, bip.m(), rng),
            };
            let q = match poly_b {
                Some(t) => side_polynomial(t, modes, n - k, false, bip, &format!("{pointer}/poly_b"))?,
                None => random::creation_polynomial(n - k, bip.m() + 1, bip.modes_b(), rng),
            };
            separable_pure(&p, &q, bip).map_err(core)
        }
        StateConfig::Random { rank } => {
            if *rank == 0 {
                return Err(CliError::config(format!("{pointer}/rank"), "rank must be ≥ 1"));
            }
            Ok(random::density_matrix(n, modes, *rank, rng))
        }
        StateConfig::Fock { occupations } => {
            if occupations.len() != modes {
                return Err(CliError::config(
                    format!("{pointer}/occupations"),
                    format!("expected {modes} occupations, got {}", occupations.len()),
                ));
            }
            let state = FockState::new(occupations.clone());
            if state.total() != n {
                return Err(CliError::config(
                    format!("{pointer}/occupations"),
                    format!("occupations sum to {}, expected N = {n}", state.total()),
                ));
            }
            Ok(SectorDensityMatrix::fock(&state))
        }
        StateConfig::MaximallyMixed => Ok(SectorDensityMatrix::maximally_mixed(n, modes)),
        StateConfig::Matrix { re, im } => {
            let dim = bosent_core::fock::sector_dimension(n, modes);
            let read = |rows: &Vec<Vec<f64>>, field: &str| -> CliResult<CMatrix> {
                if rows.len() != dim {
                    return Err(CliError::config(
                        format!("{pointer}/{field}"),
                        format!("expected {dim} rows, got {}", rows.len()),
                    ));
                }
                for (i, r) in rows.iter().enumerate() {
                    if r.len() != dim {
                        return Err(CliError::config(
                            format!("{pointer}/{field}/{i}"),
                            format!("expected {dim} columns, got {}", r.len()),
                        ));
                    }
                }
                Ok(CMatrix::from_fn(dim, dim, |i, j| C64::new(rows[i][j], 0.0)))
            };
            let mut m = read(re, "re")?;
            if let Some(im) = im {
                m += read(im, "im")? * C64::new(0.0, 1.0);
            }
            SectorDensityMatrix::new(n, modes, m).map_err(core)
        }
        StateConfig::Mixture { .. } => Err(CliError::config(pointer, "mixtures cannot be nested")),
    }
}

/// Initial state; random parts are drawn from `seed`.
pub fn initial_state(cfg: &ExperimentConfig, sys: SystemConfig, seed: u64, base: &str) -> CliResult<NumberMixture> {
    let pointer = format!("{base}/initial_state");
    let state = cfg
        .initial_state
        .as_ref()
        .ok_or_else(|| CliError::config(&pointer, "missing initial state"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match state {
        StateConfig::Mixture { components } => {
            let mut parts = Vec::with_capacity(components.len());
            for (i, c) in components.iter().enumerate() {
                let p = format!("{pointer}/components/{i}");
                if !(c.weight >= 0.0) || !c.weight.is_finite() {
                    return Err(CliError::config(format!("{p}/weight"), "weight must be ≥ 0"));
                }
                let n = c.particles.unwrap_or(sys.particles);
                parts.push((c.weight, sector_state(&c.state, n, sys, &mut rng, &format!("{p}/state"))?));
            }
            NumberMixture::new(parts).map_err(|e| CliError::config(format!("{pointer}/components"), e))
        }
        other => Ok(NumberMixture::single(sector_state(other, sys.particles, sys, &mut rng, &pointer)?)),
    }
}

/// Liouvillian on the sectors reachable from `rho0`: `0 ..= N_max` when
/// some jump removes particles, otherwise the occupied range.
pub fn liouvillian(gen: &LindbladGenerator, rho0: &NumberMixture, base: &str) -> CliResult<Liouvillian> {
    let ns = rho0.particle_numbers();
    let (lo, hi) = (ns[0], *ns.last().expect("nonempty mixture"));
    let result = if changes_number(gen) {
        Liouvillian::build(gen, hi, rho0.modes())
    } else {
        Liouvillian::build_on(gen, lo..=hi, rho0.modes())
    };
    result.map_err(|e| CliError::config(format!("{base}/hamiltonian"), e))
}

/// Everything a system-level task needs.
pub struct Prepared {
    pub system: SystemConfig,
    pub bip: Bipartition,
    pub generator: LindbladGenerator,
    pub rho0: Option<NumberMixture>,
}

pub fn prepare(cfg: &ExperimentConfig, seed: u64, base: &str) -> CliResult<Prepared> {
    let system = cfg.system_or_err(base)?;
    let bip = Bipartition::new(system.bipartition, system.modes)
        .map_err(|e| CliError::config(format!("{base}/system/bipartition"), e))?;
    let generator = generator(cfg, system, base)?;
    let rho0 = match cfg.initial_state {
        Some(_) => Some(initial_state(cfg, system, seed, base)?),
        None => None,
    };
    Ok(Prepared {
        system,
        bip,
        generator,
        rho0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_document;

    fn cfg(text: &str) -> ExperimentConfig {
        parse_document(text).unwrap().remove(0).config
    }

    #[test]
    fn builds_generator_and_state() {
        let c = cfg(r#"{
            "system": {"particles": 2, "modes": 3, "bipartition": 1},
            "hamiltonian": [{"kind": "hop", "i": 1, "j": 2, "tau": 0.5},
                            {"kind": "operator", "terms": [{"coefficient": [0.3, 0], "word": "c3 a3"}]}],
            "noise": [{"kind": "loss", "rates": [0.1, 0.0, 0.2]},
                      {"kind": "custom", "rate": 0.4, "operator": [{"word": "a1 a3"}]}],
            "initial_state": {"kind": "mixture", "components": [
                {"weight": 0.25, "particles": 1, "state": {"kind": "random", "rank": 1}},
                {"weight": 0.75, "state": {"kind": "fock", "occupations": [1, 0, 1]}}]}
        }"#);
        let p = prepare(&c, 0, "").unwrap();
        assert!(changes_number(&p.generator));
        let rho = p.rho0.unwrap();
        assert_eq!(rho.particle_numbers(), vec![1, 2]);
        let l = liouvillian(&p.generator, &rho, "").unwrap();
        assert_eq!(l.layout().sectors(), &[0, 1, 2]);
    }

    #[test]
    fn seeded_states_repeat() {
        let text = r#"{"system": {"particles": 2, "modes": 4, "bipartition": 2},
                       "initial_state": {"kind": "separable_pure", "k": 1}}"#;
        let a = prepare(&cfg(text), 7, "").unwrap().rho0.unwrap();
        let b = prepare(&cfg(text), 7, "").unwrap().rho0.unwrap();
        let c = prepare(&cfg(text), 8, "").unwrap().rho0.unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn state_errors_point_into_the_state() {
        let bad = r#"{"system": {"particles": 2, "modes": 4, "bipartition": 2},
                      "initial_state": {"kind": "separable_pure", "k": 1, "poly_a": [{"word": "c3"}]}}"#;
        match prepare(&cfg(bad), 0, "") {
            Err(CliError::Config { pointer, .. }) => assert_eq!(pointer, "/initial_state/poly_a/0/word"),
            other => panic!("{:?}", other.err()),
        }
        let bad = r#"{"system": {"particles": 2, "modes": 4, "bipartition": 2},
                      "initial_state": {"kind": "example", "p": 1.5}}"#;
        match prepare(&cfg(bad), 0, "") {
            Err(CliError::Config { pointer, .. }) => assert_eq!(pointer, "/initial_state/p"),
            other => panic!("{:?}", other.err()),
        }
    }

    #[test]
    fn diagonal_detection() {
        let gen = LindbladGenerator::diagonal(&[0.1, 0.2, 0.3]);
        assert!(hamiltonian_is_diagonal(&gen, 2, 3));
        let gen = gen.with_hamiltonian(hopping_between(1, 2, 0.1));
        assert!(!hamiltonian_is_diagonal(&gen, 2, 3));
    }
}
