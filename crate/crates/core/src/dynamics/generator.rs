// SPDX-License-Identifier: Apache-2.0

use crate::fock::{Bipartition, Ladder, LadderOp, OperatorSpec};
use crate::{Error, Result, C64};

/// One dissipative channel `λ (A ρ A† − ½{A†A, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub rate: f64,
    pub operator: OperatorSpec,
}

/// `L[ρ] = −i[H, ρ] + Σ_j λ_j (A_j ρ A_j† − ½{A_j†A_j, ρ})`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LindbladGenerator {
    pub hamiltonian: OperatorSpec,
    pub jumps: Vec<Jump>,
}

impl LindbladGenerator {
    /// Checks rates and particle-number structure. Hermiticity of `H` is
    /// checked per sector when the Liouvillian is assembled.
    pub fn new(hamiltonian: OperatorSpec, jumps: Vec<Jump>) -> Result<Self> {
        let gen = Self { hamiltonian, jumps };
        gen.validate()?;
        Ok(gen)
    }

    pub fn validate(&self) -> Result<()> {
        let dh = self.hamiltonian.particle_change()?;
        if dh != 0 {
            return Err(Error::InvalidOperator(format!(
                "Hamiltonian changes the particle number by {dh}"
            )));
        }
        for (i, j) in self.jumps.iter().enumerate() {
            if !(j.rate >= 0.0) || !j.rate.is_finite() {
                return Err(Error::InvalidArgument(format!("rate λ_{i} = {} must be ≥ 0", j.rate)));
            }
            j.operator.particle_change()?;
        }
        Ok(())
    }

    /// `H = Σ_j ε_j a_j† a_j`, no noise.
    pub fn diagonal(energies: &[f64]) -> Self {
        let mut h = OperatorSpec::zero();
        for (j, &e) in energies.iter().enumerate() {
            if e != 0.0 {
                h = h.add(OperatorSpec::number(j + 1).scale(C64::new(e, 0.0)));
            }
        }
        Self {
            hamiltonian: h,
            jumps: Vec::new(),
        }
    }

    /// `H = −Σ_j τ_j (a_j† a_{j+1} + a_{j+1}† a_j)`, no noise.
    pub fn hopping(amplitudes: &[f64]) -> Self {
        Self {
            hamiltonian: hopping_hamiltonian(amplitudes),
            jumps: Vec::new(),
        }
    }

    pub fn with_hamiltonian(mut self, extra: OperatorSpec) -> Self {
        self.hamiltonian = self.hamiltonian.add(extra);
        self
    }

    pub fn with_jump(mut self, rate: f64, operator: OperatorSpec) -> Self {
        self.jumps.push(Jump { rate, operator });
        self
    }

    /// Adds `A_j = a_j† a_j` with rate `λ_j` for every mode.
    pub fn with_dephasing(mut self, rates: &[f64]) -> Self {
        for (j, &r) in rates.iter().enumerate() {
            self.jumps.push(Jump {
                rate: r,
                operator: OperatorSpec::number(j + 1),
            });
        }
        self
    }

    /// Adds `A_j = a_j` with rate `λ_j` for every mode.
    pub fn with_loss(mut self, rates: &[f64]) -> Self {
        for (j, &r) in rates.iter().enumerate() {
            self.jumps.push(Jump {
                rate: r,
                operator: OperatorSpec::annihilation(j + 1),
            });
        }
        self
    }

    /// Same Hamiltonian, no jumps.
    pub fn hamiltonian_part(&self) -> Self {
        Self {
            hamiltonian: self.hamiltonian.clone(),
            jumps: Vec::new(),
        }
    }

    /// Same jumps, `H = 0`.
    pub fn dissipative_part(&self) -> Self {
        Self {
            hamiltonian: OperatorSpec::zero(),
            jumps: self.jumps.clone(),
        }
    }

    /// Union of Hamiltonian terms and jumps.
    pub fn combine(&self, other: &Self) -> Self {
        let mut jumps = self.jumps.clone();
        jumps.extend(other.jumps.iter().cloned());
        Self {
            hamiltonian: self.hamiltonian.clone().add(other.hamiltonian.clone()),
            jumps,
        }
    }

    /// Largest rate or Hamiltonian coefficient modulus.
    pub fn max_rate(&self) -> f64 {
        let h = self
            .hamiltonian
            .terms
            .iter()
            .map(|t| t.coefficient.norm())
            .fold(0.0, f64::max);
        self.jumps.iter().map(|j| j.rate).fold(h, f64::max)
    }

    /// `1 / max_rate`, infinite for the zero generator.
    pub fn characteristic_time(&self) -> f64 {
        1.0 / self.max_rate()
    }

    /// Largest mode index appearing anywhere.
    pub fn max_mode(&self) -> usize {
        let mut m = self.hamiltonian.modes_used().last().copied().unwrap_or(0);
        for j in &self.jumps {
            m = m.max(j.operator.modes_used().last().copied().unwrap_or(0));
        }
        m
    }

    /// True when every Hamiltonian term and every jump operator acts on one
    /// side of `bip` only.
    pub fn is_local_to_sides(&self, bip: Bipartition) -> bool {
        std::iter::once(&self.hamiltonian)
            .chain(self.jumps.iter().map(|j| &j.operator))
            .all(|op| {
                op.terms.iter().all(|t| {
                    let mut sides = t.word.iter().map(|o| bip.in_a(o.mode));
                    match sides.next() {
                        None => true,
                        Some(first) => sides.all(|s| s == first),
                    }
                })
            })
    }

    /// True when every jump is a single number operator `c a_j† a_j`.
    pub fn is_pure_dephasing(&self) -> bool {
        self.jumps.iter().all(|j| number_operator_mode(&j.operator).is_some())
    }
}

/// Mode and squared coefficient modulus if `op` is `c a_j† a_j`.
pub fn number_operator_mode(op: &OperatorSpec) -> Option<(usize, f64)> {
    match op.terms.as_slice() {
        [t] => match t.word.as_slice() {
            [LadderOp {
                mode: i,
                kind: Ladder::Create,
            }, LadderOp {
                mode: j,
                kind: Ladder::Annihilate,
            }] if i == j => Some((*i, t.coefficient.norm_sqr())),
            _ => None,
        },
        _ => None,
    }
}

/// `−Σ_j τ_j (a_j† a_{j+1} + a_{j+1}† a_j)` over a chain of modes.
pub fn hopping_hamiltonian(amplitudes: &[f64]) -> OperatorSpec {
    let mut h = OperatorSpec::zero();
    for (j, &tau) in amplitudes.iter().enumerate() {
        if tau == 0.0 {
            continue;
        }
        let c = C64::new(-tau, 0.0);
        h = h
            .add(OperatorSpec::hop(j + 1, j + 2).scale(c))
            .add(OperatorSpec::hop(j + 2, j + 1).scale(c));
    }
    h
}

/// `−τ (a_i† a_j + a_j† a_i)` between two arbitrary modes.
pub fn hopping_between(i: usize, j: usize, tau: f64) -> OperatorSpec {
    let c = C64::new(-tau, 0.0);
    OperatorSpec::hop(i, j).scale(c).add(OperatorSpec::hop(j, i).scale(c))
}
