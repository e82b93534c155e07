// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use crate::dynamics::{number_operator_mode, LindbladGenerator, Liouvillian};
use crate::entanglement::negativity_mixture;
use crate::fock::{ladder_matrix, Bipartition, Ladder, LadderOp, OperatorSpec, SectorBasis};
use crate::linalg::hermitian_eigenvalues;
use crate::states::{is_block_diagonal, NumberMixture, SectorDensityMatrix};
use crate::{CMatrix, Error, Result, C64};

/// Pointwise slack accepted on `lhs ≥ rhs`.
pub const BOUND_TOL: f64 = 1e-9;

/// `𝒩(ρ_t)` against an exponentially damped Hamiltonian-only negativity.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTrace {
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Damping rate of the bound: `η` for losses, `N²Σλ_j/2` for dephasing.
    pub rate: f64,
    /// `min_t (lhs − rhs)`; `+∞` on an empty grid.
    pub margin: f64,
}

impl BoundTrace {
    fn new(times: &[f64], lhs: Vec<f64>, rhs: Vec<f64>, rate: f64) -> Self {
        let margin = lhs.iter().zip(&rhs).map(|(l, r)| l - r).fold(f64::INFINITY, f64::min);
        Self {
            times: times.to_vec(),
            lhs,
            rhs,
            rate,
            margin,
        }
    }

    pub fn holds(&self) -> bool {
        self.margin >= -BOUND_TOL
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite and ≥ 0".into()));
    }
    Ok(())
}

fn check_state(gen: &LindbladGenerator, rho0: &SectorDensityMatrix, bip: Bipartition) -> Result<()> {
    if rho0.modes() != bip.modes() {
        return Err(Error::DimensionMismatch(format!(
            "state on {} modes, bipartition of {}",
            rho0.modes(),
            bip.modes()
        )));
    }
    gen.validate()
}

/// Coherence below which a `(k, l ≠ k)` block counts as empty.
pub const BLOCK_TOL: f64 = 1e-12;

/// Both bounds are stated for non-block-diagonal states; block-diagonal
/// ones can disentangle at finite times.
fn check_non_block_diagonal(rho0: &SectorDensityMatrix, bip: Bipartition) -> Result<()> {
    if is_block_diagonal(rho0, bip, BLOCK_TOL)? {
        return Err(Error::PreconditionViolated(
            "initial state is block-diagonal; the bound covers non-block-diagonal states only".into(),
        ));
    }
    Ok(())
}

/// True when the matrix of `H` on the sector never couples different `k`.
fn conserves_local_number(h: &CMatrix, basis: &SectorBasis, bip: Bipartition) -> bool {
    let local: Vec<u32> = basis
        .states()
        .iter()
        .map(|s| s.occupations()[..bip.m()].iter().sum())
        .collect();
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    (0..basis.dim()).all(|i| {
        (0..basis.dim()).all(|j| local[i] == local[j] || h[(i, j)].norm() <= 1e-12 * scale)
    })
}

/// True when `op` is a product `P_A · Q_B` of one-sided factors.
fn factorizes(op: &OperatorSpec, bip: Bipartition) -> bool {
    // Different modes commute, so each word can be sorted into an A part
    // and a B part; the operator factorizes iff the coefficient matrix
    // indexed by (A word, B word) has rank ≤ 1.
    let mut a_words: BTreeMap<Vec<LadderOp>, usize> = BTreeMap::new();
    let mut b_words: BTreeMap<Vec<LadderOp>, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for t in &op.terms {
        let mut wa: Vec<LadderOp> = t.word.iter().copied().filter(|o| bip.in_a(o.mode)).collect();
        let mut wb: Vec<LadderOp> = t.word.iter().copied().filter(|o| !bip.in_a(o.mode)).collect();
        // Stable per-mode order keeps words acting on the same mode intact.
        wa.sort_by_key(|o| o.mode);
        wb.sort_by_key(|o| o.mode);
        let na = a_words.len();
        let ia = *a_words.entry(wa).or_insert(na);
        let nb = b_words.len();
        let ib = *b_words.entry(wb).or_insert(nb);
        entries.push((ia, ib, t.coefficient));
    }
    if a_words.len() <= 1 || b_words.len() <= 1 {
        return true;
    }
    let mut c = CMatrix::zeros(a_words.len(), b_words.len());
    for (i, j, z) in entries {
        c[(i, j)] += z;
    }
    let sv = c.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > 1e-12 * top.max(1e-300)).count() <= 1
}

fn is_annihilation_only(op: &OperatorSpec) -> bool {
    op.terms
        .iter()
        .all(|t| t.word.iter().all(|o| o.kind == Ladder::Annihilate))
}

fn hamiltonian_negativities(
    gen: &LindbladGenerator,
    rho0: &SectorDensityMatrix,
    bip: Bipartition,
    times: &[f64],
) -> Result<Vec<f64>> {
    let n = rho0.particles();
    let l = Liouvillian::build_on(&gen.hamiltonian_part(), n..=n, rho0.modes())?;
    let states = l.propagator().evolve_grid(&NumberMixture::single(rho0.clone()), times)?;
    states.iter().map(|s| negativity_mixture(s, bip)).collect()
}

fn full_negativities(
    l: &Liouvillian,
    rho0: &SectorDensityMatrix,
    bip: Bipartition,
    times: &[f64],
) -> Result<Vec<f64>> {
    let states = l.propagator().evolve_grid(&NumberMixture::single(rho0.clone()), times)?;
    states.iter().map(|s| negativity_mixture(s, bip)).collect()
}

/// Largest eigenvalue of `Σ_j λ_j A_j† A_j` on the `n`-particle sector.
pub fn loss_eta(gen: &LindbladGenerator, n: usize, modes: usize) -> Result<f64> {
    let dim = SectorBasis::new(n, modes).dim();
    let mut k = CMatrix::zeros(dim, dim);
    for j in &gen.jumps {
        let ada = j.operator.adjoint().mul(&j.operator);
        if let Some(op) = ladder_matrix(&ada, n, modes)? {
            k += op.matrix * C64::new(j.rate, 0.0);
        }
    }
    Ok(hermitian_eigenvalues(&k).last().copied().unwrap_or(0.0).max(0.0))
}

/// Lower bound for particle losses:
/// `𝒩(ρ_t) ≥ e^{−tη} 𝒩(e^{tL_ham}[ρ])`, with `𝒩(ρ_t)` taken over every
/// sector the losses feed.
///
/// Preconditions: every jump is a polynomial in annihilation operators that
/// factorizes into an A-side and a B-side part, and `H` does not couple
/// different local particle numbers.
pub fn check_loss_bound(
    gen: &LindbladGenerator,
    rho0: &SectorDensityMatrix,
    bip: Bipartition,
    times: &[f64],
) -> Result<BoundTrace> {
    check_state(gen, rho0, bip)?;
    check_non_block_diagonal(rho0, bip)?;
    check_times(times)?;
    for (i, j) in gen.jumps.iter().enumerate() {
        if !is_annihilation_only(&j.operator) {
            return Err(Error::PreconditionViolated(format!(
                "jump {i} is not a polynomial in annihilation operators"
            )));
        }
        if !factorizes(&j.operator, bip) {
            return Err(Error::PreconditionViolated(format!(
                "jump {i} straddles the bipartition: it is not a product of one-sided factors"
            )));
        }
    }
    let n = rho0.particles();
    let modes = rho0.modes();
    let basis = SectorBasis::new(n, modes);
    let h = ladder_matrix(&gen.hamiltonian, n, modes)?.expect("number-conserving").matrix;
    if !conserves_local_number(&h, &basis, bip) {
        return Err(Error::PreconditionViolated(
            "Hamiltonian couples different local particle numbers (eigenvectors not block-diagonal)".into(),
        ));
    }
    let eta = loss_eta(gen, n, modes)?;
    let l = Liouvillian::build(gen, n, modes)?;
    let lhs = full_negativities(&l, rho0, bip, times)?;
    let ham = hamiltonian_negativities(gen, rho0, bip, times)?;
    let rhs = times.iter().zip(ham).map(|(t, v)| (-t * eta).exp() * v).collect();
    Ok(BoundTrace::new(times, lhs, rhs, eta))
}

/// Per-mode dephasing rates of a generator whose jumps are all number
/// operators; several jumps on one mode add up.
pub fn dephasing_rates(gen: &LindbladGenerator, modes: usize) -> Result<Vec<f64>> {
    let mut rates = vec![0.0; modes];
    for (i, j) in gen.jumps.iter().enumerate() {
        let Some((mode, c2)) = number_operator_mode(&j.operator) else {
            return Err(Error::PreconditionViolated(format!("jump {i} is not a number operator a_j†a_j")));
        };
        if mode > modes {
            return Err(Error::ModeOutOfRange { mode, modes });
        }
        rates[mode - 1] += j.rate * c2;
    }
    Ok(rates)
}

/// Lower bound for dephasing: `𝒩(ρ_t) ≥ e^{−tN²Σλ_j/2} 𝒩(e^{tL_ham}[ρ])`.
pub fn check_dephasing_bound(
    gen: &LindbladGenerator,
    rho0: &SectorDensityMatrix,
    bip: Bipartition,
    times: &[f64],
) -> Result<BoundTrace> {
    check_state(gen, rho0, bip)?;
    check_non_block_diagonal(rho0, bip)?;
    check_times(times)?;
    let n = rho0.particles();
    let rates = dephasing_rates(gen, rho0.modes())?;
    let rate = (n * n) as f64 * rates.iter().sum::<f64>() / 2.0;
    let l = Liouvillian::build_on(gen, n..=n, rho0.modes())?;
    let lhs = full_negativities(&l, rho0, bip, times)?;
    let ham = hamiltonian_negativities(gen, rho0, bip, times)?;
    let rhs = times.iter().zip(ham).map(|(t, v)| (-t * rate).exp() * v).collect();
    Ok(BoundTrace::new(times, lhs, rhs, rate))
}

/// Largest absolute deviation, over all Fock pairs `(k, k̄)`, between
/// `|⟨k|ρ_t|k̄⟩|` and `e^{−tΣ_jλ_j(k_j−k̄_j)²/2} |⟨k|ρ_0|k̄⟩|`.
///
/// The equality holds when `H` is diagonal in the Fock basis; any Hamiltonian
/// is accepted so that its failure under hopping can be measured.
pub fn check_decoherence_equality(gen: &LindbladGenerator, rho0: &SectorDensityMatrix, t: f64) -> Result<f64> {
    check_times(&[t])?;
    let n = rho0.particles();
    let modes = rho0.modes();
    let rates = dephasing_rates(gen, modes)?;
    let l = Liouvillian::build_on(gen, n..=n, modes)?;
    let rho_t = l.propagator().evolve(&NumberMixture::single(rho0.clone()), t)?;
    let mt = rho_t.block(n).expect("sector kept by a number-conserving flow");
    let basis = rho0.basis();
    let mut worst = 0.0_f64;
    for (i, a) in basis.states().iter().enumerate() {
        for (j, b) in basis.states().iter().enumerate() {
            let mut expo = 0.0;
            for m in 0..modes {
                let d = f64::from(a.occupations()[m]) - f64::from(b.occupations()[m]);
                expo += rates[m] * d * d;
            }
            let expect = (-0.5 * t * expo).exp() * rho0.matrix()[(i, j)].norm();
            worst = worst.max((mt[(i, j)].norm() - expect).abs());
        }
    }
    Ok(worst)
}

/// `𝒩(ρ_t)` on a time grid under the full flow on sectors `0..=N`.
pub fn negativity_trajectory(
    gen: &LindbladGenerator,
    rho0: &SectorDensityMatrix,
    bip: Bipartition,
    times: &[f64],
) -> Result<Vec<f64>> {
    check_state(gen, rho0, bip)?;
    check_times(times)?;
    let l = Liouvillian::build(gen, rho0.particles(), rho0.modes())?;
    full_negativities(&l, rho0, bip, times)
}
