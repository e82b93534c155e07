// SPDX-License-Identifier: Apache-2.0

//! Fixed-particle-number Fock bases and second-quantized operators.
//!
//! A sector is the span of all Fock states `|k_1, …, k_M⟩` with
//! `Σ k_j = N`. Sector states are ordered lexicographically *decreasing* in
//! the occupation vector, e.g. `(2,0), (1,1), (0,2)`. The same order ranks
//! the sub-occupations of each side of a [`Bipartition`], which fixes the
//! separable labels `(k, σ, σ')` used everywhere else in the crate.

use std::collections::HashMap;
use std::fmt;

use crate::{CMatrix, Error, Result, C64};

/// Occupation numbers of `M` modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState(Vec<u32>);

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// Total particle number.
    pub fn total(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    /// Occupation of mode `j` (1-based).
    pub fn occupation(&self, mode: usize) -> u32 {
        self.0[mode - 1]
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "⟩")
    }
}

impl From<Vec<u32>> for FockState {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// `C(n, k)` as `usize`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of ways to put `n` bosons in `modes` modes.
pub fn sector_dimension(n: usize, modes: usize) -> usize {
    if modes == 0 {
        return usize::from(n == 0);
    }
    binomial(n + modes - 1, n)
}

/// All Fock states of `n` particles in `modes` modes, canonical order.
pub fn enumerate_sector(n: usize, modes: usize) -> Vec<FockState> {
    let mut out = Vec::with_capacity(sector_dimension(n, modes));
    let mut current = vec![0u32; modes];
    fill(n, 0, &mut current, &mut out);
    out
}

fn fill(remaining: usize, pos: usize, current: &mut Vec<u32>, out: &mut Vec<FockState>) {
    let modes = current.len();
    if modes == 0 {
        if remaining == 0 {
            out.push(FockState(Vec::new()));
        }
        return;
    }
    if pos == modes - 1 {
        current[pos] = remaining as u32;
        out.push(FockState(current.clone()));
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k as u32;
        fill(remaining - k, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// Enumerated sector with reverse lookup.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n: usize,
    modes: usize,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl SectorBasis {
    pub fn new(n: usize, modes: usize) -> Self {
        let states = enumerate_sector(n, modes);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            n,
            modes,
            states,
            index,
        }
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &FockState {
        &self.states[i]
    }

    /// Canonical rank of `state`, if it belongs to this sector.
    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Split of modes `1..=M` into A = `1..=m` and B = `m+1..=M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    m: usize,
    modes: usize,
}

impl Bipartition {
    pub fn new(m: usize, modes: usize) -> Result<Self> {
        if m == 0 || m >= modes {
            return Err(Error::InvalidBipartition { m, modes });
        }
        Ok(Self { m, modes })
    }

    /// Modes in subsystem A.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Total number of modes.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Modes in subsystem B.
    pub fn modes_b(&self) -> usize {
        self.modes - self.m
    }

    /// True when the 1-based `mode` lies in subsystem A.
    pub fn in_a(&self, mode: usize) -> bool {
        mode <= self.m
    }

    /// Number of labels σ for `k` particles on A.
    pub fn dim_a(&self, k: usize) -> usize {
        sector_dimension(k, self.m)
    }

    /// Number of labels σ' for `k` particles on B.
    pub fn dim_b(&self, k: usize) -> usize {
        sector_dimension(k, self.modes_b())
    }
}

/// Separable label `(k, σ; N − k, σ')` of a Fock state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparableLabel {
    /// Particles in subsystem A.
    pub k: usize,
    /// Rank of the A-side occupations among `k`-particle states of A.
    pub sigma: usize,
    /// Rank of the B-side occupations among `(N − k)`-particle states of B.
    pub sigma_prime: usize,
}

/// Precomputed separable labelling of one sector.
///
/// The side bases for every local particle number are built once so that the
/// map and its inverse are table lookups.
#[derive(Debug, Clone)]
pub struct LabelMap {
    bip: Bipartition,
    n: usize,
    side_a: Vec<SectorBasis>,
    side_b: Vec<SectorBasis>,
}

impl LabelMap {
    pub fn new(n: usize, bip: Bipartition) -> Self {
        let side_a = (0..=n).map(|k| SectorBasis::new(k, bip.m())).collect();
        let side_b = (0..=n).map(|k| SectorBasis::new(k, bip.modes_b())).collect();
        Self {
            bip,
            n,
            side_a,
            side_b,
        }
    }

    pub fn bipartition(&self) -> Bipartition {
        self.bip
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    /// A-side basis for `k` particles.
    pub fn side_a(&self, k: usize) -> &SectorBasis {
        &self.side_a[k]
    }

    /// B-side basis for `k` particles.
    pub fn side_b(&self, k: usize) -> &SectorBasis {
        &self.side_b[k]
    }

    pub fn label(&self, state: &FockState) -> SeparableLabel {
        let occ = state.occupations();
        debug_assert_eq!(occ.len(), self.bip.modes());
        let a = FockState(occ[..self.bip.m()].to_vec());
        let b = FockState(occ[self.bip.m()..].to_vec());
        let k = a.total();
        let kb = b.total();
        SeparableLabel {
            k,
            sigma: self.side_a[k].index_of(&a).expect("A side in range"),
            sigma_prime: self.side_b[kb].index_of(&b).expect("B side in range"),
        }
    }

    pub fn state(&self, label: SeparableLabel) -> FockState {
        let mut occ = self.side_a[label.k].state(label.sigma).occupations().to_vec();
        occ.extend_from_slice(self.side_b[self.n - label.k].state(label.sigma_prime).occupations());
        FockState(occ)
    }

    /// Number of labels `(σ, σ')` with `k` particles on A.
    pub fn block_dim(&self, k: usize) -> usize {
        self.side_a[k].dim() * self.side_b[self.n - k].dim()
    }
}

/// Separable label of `state` with respect to `bip`.
pub fn separable_label(state: &FockState, bip: Bipartition) -> Result<SeparableLabel> {
    if state.modes() != bip.modes() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} modes, bipartition {}",
            state.modes(),
            bip.modes()
        )));
    }
    Ok(LabelMap::new(state.total(), bip).label(state))
}

/// Ladder operator kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// One ladder operator on a 1-based mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderOp {
    pub mode: usize,
    pub kind: Ladder,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        Self {
            mode,
            kind: Ladder::Create,
        }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            kind: Ladder::Annihilate,
        }
    }
}

/// `coefficient × word`, the word being applied right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: C64,
    pub word: Vec<LadderOp>,
}

impl Term {
    /// Net change in particle number.
    pub fn particle_change(&self) -> i64 {
        self.word
            .iter()
            .map(|op| match op.kind {
                Ladder::Create => 1,
                Ladder::Annihilate => -1,
            })
            .sum()
    }
}

/// Polynomial in creation and annihilation operators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorSpec {
    pub terms: Vec<Term>,
}

impl OperatorSpec {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial(C64::new(1.0, 0.0), Vec::new())
    }

    pub fn monomial(coefficient: C64, word: Vec<LadderOp>) -> Self {
        Self {
            terms: vec![Term { coefficient, word }],
        }
    }

    /// `a_j`.
    pub fn annihilation(mode: usize) -> Self {
        Self::monomial(C64::new(1.0, 0.0), vec![LadderOp::annihilate(mode)])
    }

    /// `a_j†`.
    pub fn creation(mode: usize) -> Self {
        Self::monomial(C64::new(1.0, 0.0), vec![LadderOp::create(mode)])
    }

    /// `a_j† a_j`.
    pub fn number(mode: usize) -> Self {
        Self::monomial(
            C64::new(1.0, 0.0),
            vec![LadderOp::create(mode), LadderOp::annihilate(mode)],
        )
    }

    /// `a_i† a_j`.
    pub fn hop(to: usize, from: usize) -> Self {
        Self::monomial(
            C64::new(1.0, 0.0),
            vec![LadderOp::create(to), LadderOp::annihilate(from)],
        )
    }

    /// Product `self · other` (other acts first).
    pub fn mul(&self, other: &OperatorSpec) -> OperatorSpec {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut word = a.word.clone();
                word.extend_from_slice(&b.word);
                terms.push(Term {
                    coefficient: a.coefficient * b.coefficient,
                    word,
                });
            }
        }
        OperatorSpec { terms }
    }

    pub fn add(mut self, other: OperatorSpec) -> OperatorSpec {
        self.terms.extend(other.terms);
        self
    }

    pub fn scale(mut self, factor: C64) -> OperatorSpec {
        for t in &mut self.terms {
            t.coefficient *= factor;
        }
        self
    }

    /// Formal adjoint: conjugated coefficients, reversed words with
    /// creation ↔ annihilation.
    pub fn adjoint(&self) -> OperatorSpec {
        OperatorSpec {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coefficient: t.coefficient.conj(),
                    word: t
                        .word
                        .iter()
                        .rev()
                        .map(|op| LadderOp {
                            mode: op.mode,
                            kind: match op.kind {
                                Ladder::Create => Ladder::Annihilate,
                                Ladder::Annihilate => Ladder::Create,
                            },
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Common net particle change of all terms. An empty polynomial counts
    /// as number conserving.
    pub fn particle_change(&self) -> Result<i64> {
        let mut it = self.terms.iter().map(Term::particle_change);
        let Some(first) = it.next() else {
            return Ok(0);
        };
        for d in it {
            if d != first {
                return Err(Error::MixedParticleChange(first, d));
            }
        }
        Ok(first)
    }

    /// Modes touched by any term.
    pub fn modes_used(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|t| t.word.iter().map(|op| op.mode))
            .collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    pub fn check_modes(&self, modes: usize) -> Result<()> {
        for t in &self.terms {
            for op in &t.word {
                if op.mode == 0 || op.mode > modes {
                    return Err(Error::ModeOutOfRange {
                        mode: op.mode,
                        modes,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Matrix of an operator between two fixed-`N` sectors.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub from: usize,
    pub to: usize,
    pub matrix: CMatrix,
}

/// Applies a word to a Fock state. Returns `None` when the state is
/// annihilated, otherwise the image state and its amplitude.
fn apply_word(word: &[LadderOp], state: &FockState) -> Option<(FockState, f64)> {
    let mut occ = state.0.clone();
    let mut amp = 1.0;
    for op in word.iter().rev() {
        let k = &mut occ[op.mode - 1];
        match op.kind {
            Ladder::Annihilate => {
                if *k == 0 {
                    return None;
                }
                amp *= f64::from(*k).sqrt();
                *k -= 1;
            }
            Ladder::Create => {
                *k += 1;
                amp *= f64::from(*k).sqrt();
            }
        }
    }
    Some((FockState(occ), amp))
}

/// Matrix of `spec` from the `n_from` sector to `n_from + Δ`.
///
/// Returns `Ok(None)` when the target sector would have negative particle
/// number (the operator annihilates the whole sector).
pub fn ladder_matrix(
    spec: &OperatorSpec,
    n_from: usize,
    modes: usize,
) -> Result<Option<SectorOperator>> {
    spec.check_modes(modes)?;
    let delta = spec.particle_change()?;
    let target = n_from as i64 + delta;
    if target < 0 {
        return Ok(None);
    }
    let target = target as usize;
    let from = SectorBasis::new(n_from, modes);
    let to = SectorBasis::new(target, modes);
    Ok(Some(ladder_matrix_in(spec, &from, &to)))
}

/// As [`ladder_matrix`] with prebuilt bases; `to` must be the target sector.
pub fn ladder_matrix_in(spec: &OperatorSpec, from: &SectorBasis, to: &SectorBasis) -> SectorOperator {
    let mut m = CMatrix::zeros(to.dim(), from.dim());
    for (col, state) in from.states().iter().enumerate() {
        for term in &spec.terms {
            if let Some((image, amp)) = apply_word(&term.word, state) {
                let row = to.index_of(&image).expect("image in target sector");
                m[(row, col)] += term.coefficient * amp;
            }
        }
    }
    SectorOperator {
        from: from.particles(),
        to: to.particles(),
        matrix: m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(v: &[u32]) -> FockState {
        FockState::new(v.to_vec())
    }

    #[test]
    fn small_sectors() {
        assert_eq!(enumerate_sector(1, 2), vec![occ(&[1, 0]), occ(&[0, 1])]);
        assert_eq!(
            enumerate_sector(2, 2),
            vec![occ(&[2, 0]), occ(&[1, 1]), occ(&[0, 2])]
        );
        assert_eq!(enumerate_sector(3, 4).len(), 20);
        assert_eq!(enumerate_sector(0, 3), vec![occ(&[0, 0, 0])]);
    }

    #[test]
    fn dimensions_match_binomials() {
        for n in 0..=6 {
            for m in 1..=5 {
                let states = enumerate_sector(n, m);
                assert_eq!(states.len(), binomial(n + m - 1, n));
                assert!(states.iter().all(|s| s.total() == n));
                assert!(states.windows(2).all(|w| w[0] > w[1]), "strictly decreasing");
            }
        }
    }

    #[test]
    fn label_examples() {
        let bip = Bipartition::new(2, 4).unwrap();
        let l = separable_label(&occ(&[0, 1, 0, 1]), bip).unwrap();
        let one_in_two = SectorBasis::new(1, 2);
        assert_eq!(l.k, 1);
        assert_eq!(l.sigma, one_in_two.index_of(&occ(&[0, 1])).unwrap());
        assert_eq!(l.sigma_prime, 1);

        let l = separable_label(&occ(&[2, 0, 0, 0]), bip).unwrap();
        assert_eq!((l.k, l.sigma, l.sigma_prime), (2, 0, 0));
    }

    #[test]
    fn labels_are_a_bijection() {
        for (n, modes) in [(4, 4), (3, 5), (2, 3)] {
            for m in 1..modes {
                let bip = Bipartition::new(m, modes).unwrap();
                let map = LabelMap::new(n, bip);
                let mut seen = std::collections::HashSet::new();
                let mut per_k = vec![0usize; n + 1];
                for s in enumerate_sector(n, modes) {
                    let l = map.label(&s);
                    assert!(l.sigma < bip.dim_a(l.k));
                    assert!(l.sigma_prime < bip.dim_b(n - l.k));
                    assert_eq!(map.state(l), s);
                    assert!(seen.insert(l));
                    per_k[l.k] += 1;
                }
                // Vandermonde: Σ_k C(k+m-1,k) C(N-k+M-m-1,N-k) = C(N+M-1,N)
                for (k, &c) in per_k.iter().enumerate() {
                    assert_eq!(c, bip.dim_a(k) * bip.dim_b(n - k));
                }
                assert_eq!(per_k.iter().sum::<usize>(), sector_dimension(n, modes));
            }
        }
    }

    #[test]
    fn ladder_elements() {
        let a = ladder_matrix(&OperatorSpec::annihilation(1), 1, 1).unwrap().unwrap();
        assert_eq!((a.from, a.to), (1, 0));
        assert!((a.matrix[(0, 0)].re - 1.0).abs() < 1e-15);

        let ad = ladder_matrix(&OperatorSpec::creation(1), 1, 1).unwrap().unwrap();
        assert!((ad.matrix[(0, 0)].re - 2f64.sqrt()).abs() < 1e-15);

        let num = ladder_matrix(&OperatorSpec::number(1), 2, 2).unwrap().unwrap();
        for (i, expect) in [2.0, 1.0, 0.0].into_iter().enumerate() {
            for j in 0..3 {
                let want = if i == j { expect } else { 0.0 };
                assert!((num.matrix[(i, j)].re - want).abs() < 1e-15);
            }
        }
        assert!(ladder_matrix(&OperatorSpec::annihilation(1), 0, 2).unwrap().is_none());
    }

    #[test]
    fn ladder_errors() {
        let mixed = OperatorSpec::annihilation(1).add(OperatorSpec::creation(2));
        assert_eq!(
            ladder_matrix(&mixed, 1, 2).unwrap_err(),
            Error::MixedParticleChange(-1, 1)
        );
        assert!(matches!(
            ladder_matrix(&OperatorSpec::number(3), 1, 2),
            Err(Error::ModeOutOfRange { mode: 3, modes: 2 })
        ));
    }

    #[test]
    fn commutator_and_number_identity() {
        // a_j a_j† − a_j† a_j = 1 on sector N computed as products through
        // N ± 1, which are exact (no truncation inside a fixed-N sector).
        for (n, modes) in [(0, 2), (2, 3), (3, 2)] {
            for j in 1..=modes {
                let a_dn = ladder_matrix(&OperatorSpec::annihilation(j), n + 1, modes).unwrap().unwrap();
                let a_up = ladder_matrix(&OperatorSpec::creation(j), n, modes).unwrap().unwrap();
                let aad = &a_dn.matrix * &a_up.matrix;
                let ada = if n > 0 {
                    let a = ladder_matrix(&OperatorSpec::annihilation(j), n, modes).unwrap().unwrap();
                    let ad = ladder_matrix(&OperatorSpec::creation(j), n - 1, modes).unwrap().unwrap();
                    &ad.matrix * &a.matrix
                } else {
                    CMatrix::zeros(1, 1)
                };
                let comm = aad - &ada;
                let id = CMatrix::identity(comm.nrows(), comm.ncols());
                assert!((comm - id).norm() < 1e-12);
                let basis = SectorBasis::new(n, modes);
                for (i, s) in basis.states().iter().enumerate() {
                    assert!((ada[(i, i)].re - f64::from(s.occupation(j))).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn adjoint_matrix_is_conjugate_transpose() {
        let spec = OperatorSpec::monomial(
            C64::new(0.3, -1.2),
            vec![LadderOp::annihilate(1), LadderOp::annihilate(3)],
        )
        .add(OperatorSpec::monomial(
            C64::new(-0.5, 0.25),
            vec![LadderOp::annihilate(2), LadderOp::annihilate(2)],
        ));
        let fwd = ladder_matrix(&spec, 3, 3).unwrap().unwrap();
        let back = ladder_matrix(&spec.adjoint(), fwd.to, 3).unwrap().unwrap();
        assert_eq!(back.to, 3);
        assert!((back.matrix - fwd.matrix.adjoint()).norm() < 1e-14);
    }
}
