// SPDX-License-Identifier: Apache-2.0

//! Density matrices on fixed-`N` sectors and mixtures over particle number.
//!
//! A [`NumberMixture`] stores one normalized sector matrix per particle
//! number together with its weight, so coherences between different total
//! particle numbers cannot be represented at all.

use std::collections::BTreeMap;

use crate::fock::{
    ladder_matrix, Bipartition, FockState, Ladder, LabelMap, OperatorSpec, SectorBasis,
    SeparableLabel,
};
use crate::linalg::{hermitian_trace_norm, hermiticity_defect, hermitize, min_eigenvalue, real_trace};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Maximum `|ρ − ρ†|` element accepted for a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Maximum `|Tr ρ − 1|` accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted for a user-supplied density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted after numerical propagation.
pub const EVOLVED_POSITIVITY_TOL: f64 = 1e-8;

/// Density matrix on the `N`-particle sector of `M` modes, indexed in the
/// canonical Fock order of [`crate::fock::enumerate_sector`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectorDensityMatrix {
    n: usize,
    modes: usize,
    matrix: CMatrix,
}

impl SectorDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n: usize, modes: usize, matrix: CMatrix) -> Result<Self> {
        Self::with_positivity_tolerance(n, modes, matrix, POSITIVITY_TOL)
    }

    pub fn with_positivity_tolerance(
        n: usize,
        modes: usize,
        matrix: CMatrix,
        positivity_tol: f64,
    ) -> Result<Self> {
        let dim = SectorBasis::new(n, modes).dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "sector N={n}, M={modes} has dimension {dim}, matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = min_eigenvalue(&matrix);
        if min < -positivity_tol {
            return Err(Error::PositivityViolation(min));
        }
        Ok(Self { n, modes, matrix })
    }

    /// Normalizes a Hermitian, positive, but not necessarily unit-trace block.
    pub(crate) fn from_unnormalized(n: usize, modes: usize, block: &CMatrix) -> Result<Self> {
        let w = real_trace(block);
        if w <= 0.0 {
            return Err(Error::InvalidState(format!("non-positive trace {w:e}")));
        }
        let matrix = hermitize(block).unscale(w);
        let min = min_eigenvalue(&matrix);
        if min * w < -EVOLVED_POSITIVITY_TOL {
            return Err(Error::PositivityViolation(min * w));
        }
        Ok(Self { n, modes, matrix })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(n: usize, modes: usize, psi: &CVector) -> Result<Self> {
        let norm2 = psi.norm_squared();
        if norm2 == 0.0 {
            return Err(Error::EmptyState);
        }
        let m = (psi * psi.adjoint()).unscale(norm2);
        Self::new(n, modes, m)
    }

    /// Projector on a single Fock state.
    pub fn fock(state: &FockState) -> Self {
        let basis = SectorBasis::new(state.total(), state.modes());
        let mut m = CMatrix::zeros(basis.dim(), basis.dim());
        let i = basis.index_of(state).expect("state in its own sector");
        m[(i, i)] = C64::new(1.0, 0.0);
        Self {
            n: state.total(),
            modes: state.modes(),
            matrix: m,
        }
    }

    /// `1_N / dim`.
    pub fn maximally_mixed(n: usize, modes: usize) -> Self {
        let d = SectorBasis::new(n, modes).dim();
        Self {
            n,
            modes,
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn basis(&self) -> SectorBasis {
        SectorBasis::new(self.n, self.modes)
    }

    /// `⟨a|ρ|b⟩` between two Fock states of the sector.
    pub fn element(&self, a: &FockState, b: &FockState) -> Option<C64> {
        let basis = self.basis();
        Some(self.matrix[(basis.index_of(a)?, basis.index_of(b)?)])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    /// Convex combination `w ρ + (1 − w) σ`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.n != other.n || self.modes != other.modes {
            return Err(Error::DimensionMismatch("mixing different sectors".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidProbability(w));
        }
        Ok(Self {
            n: self.n,
            modes: self.modes,
            matrix: self.matrix.scale(w) + other.matrix.scale(1.0 - w),
        })
    }

    /// `U ρ U†` for a unitary (or any) matrix on the sector.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self {
            n: self.n,
            modes: self.modes,
            matrix: hermitize(&(u * &self.matrix * u.adjoint())),
        }
    }
}

/// `P = Σ_N p_N ρ^{(N)}` with one component per particle number.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberMixture {
    components: Vec<(f64, SectorDensityMatrix)>,
}

/// Accepted deviation of `Σ p_N` from one.
pub const WEIGHT_TOL: f64 = 1e-12;

impl NumberMixture {
    pub fn new(components: Vec<(f64, SectorDensityMatrix)>) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Self::unchecked_total(components)
    }

    /// Same checks as [`NumberMixture::new`] except the weight sum, which
    /// drifts slightly under numerical propagation.
    pub(crate) fn unchecked_total(mut components: Vec<(f64, SectorDensityMatrix)>) -> Result<Self> {
        if let Some((w, _)) = components.iter().find(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidProbability(*w));
        }
        components.sort_by_key(|(_, r)| r.particles());
        if components.windows(2).any(|w| w[0].1.particles() == w[1].1.particles()) {
            return Err(Error::InvalidState("repeated particle number".into()));
        }
        if components.windows(2).any(|w| w[0].1.modes() != w[1].1.modes()) {
            return Err(Error::InvalidState("components with different mode counts".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidState("empty mixture".into()));
        }
        Ok(Self { components })
    }

    pub fn single(rho: SectorDensityMatrix) -> Self {
        Self {
            components: vec![(1.0, rho)],
        }
    }

    pub fn components(&self) -> &[(f64, SectorDensityMatrix)] {
        &self.components
    }

    pub fn modes(&self) -> usize {
        self.components[0].1.modes()
    }

    pub fn particle_numbers(&self) -> Vec<usize> {
        self.components.iter().map(|(_, r)| r.particles()).collect()
    }

    /// Weight of the `n`-particle component (zero if absent).
    pub fn weight(&self, n: usize) -> f64 {
        self.component(n).map_or(0.0, |(w, _)| w)
    }

    pub fn component(&self, n: usize) -> Option<(f64, &SectorDensityMatrix)> {
        self.components
            .iter()
            .find(|(_, r)| r.particles() == n)
            .map(|(w, r)| (*w, r))
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|(w, _)| *w).sum()
    }

    /// `p_N ρ^{(N)}`, the unnormalized sector block.
    pub fn block(&self, n: usize) -> Option<CMatrix> {
        self.component(n).map(|(w, r)| r.matrix().scale(w))
    }

    /// Smallest eigenvalue of the full block-diagonal operator.
    pub fn min_eigenvalue(&self) -> f64 {
        self.components
            .iter()
            .map(|(w, r)| w * r.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }

    /// `½ ‖P − Q‖₁`, summed over sectors (a sector missing on one side
    /// counts as zero).
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let mut ns = self.particle_numbers();
        ns.extend(other.particle_numbers());
        ns.sort_unstable();
        ns.dedup();
        ns.iter()
            .map(|&n| match (self.block(n), other.block(n)) {
                (Some(a), Some(b)) => 0.5 * hermitian_trace_norm(&(a - b)),
                (Some(a), None) | (None, Some(a)) => 0.5 * hermitian_trace_norm(&a),
                (None, None) => 0.0,
            })
            .sum()
    }

    /// The single component of a one-sector mixture.
    pub fn as_sector(&self) -> Option<&SectorDensityMatrix> {
        match self.components.as_slice() {
            [(_, r)] => Some(r),
            _ => None,
        }
    }
}

impl From<SectorDensityMatrix> for NumberMixture {
    fn from(rho: SectorDensityMatrix) -> Self {
        Self::single(rho)
    }
}

/// Coefficients `ρ_{kσσ', lττ'}` grouped into `(k, l)` blocks.
///
/// Block `(k, l)` has rows indexed by `σ · dim_B(N−k) + σ'` and columns by
/// `τ · dim_B(N−l) + τ'`.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    labels: LabelMap,
    modes: usize,
    blocks: BTreeMap<(usize, usize), CMatrix>,
}

impl BlockDecomposition {
    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    pub fn particles(&self) -> usize {
        self.labels.particles()
    }

    pub fn block(&self, k: usize, l: usize) -> &CMatrix {
        &self.blocks[&(k, l)]
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), CMatrix> {
        &self.blocks
    }

    /// Coefficient `ρ_{kσσ', lττ'}`.
    pub fn coefficient(&self, row: SeparableLabel, col: SeparableLabel) -> C64 {
        let n = self.particles();
        let r = row.sigma * self.labels.side_b(n - row.k).dim() + row.sigma_prime;
        let c = col.sigma * self.labels.side_b(n - col.k).dim() + col.sigma_prime;
        self.blocks[&(row.k, col.k)][(r, c)]
    }

    /// Rebuilds the Fock-ordered matrix.
    pub fn reassemble(&self) -> CMatrix {
        let n = self.particles();
        let basis = SectorBasis::new(n, self.modes);
        let mut m = CMatrix::zeros(basis.dim(), basis.dim());
        for (i, a) in basis.states().iter().enumerate() {
            let la = self.labels.label(a);
            for (j, b) in basis.states().iter().enumerate() {
                m[(i, j)] = self.coefficient(la, self.labels.label(b));
            }
        }
        m
    }
}

/// Expands `rho` in the separable basis of `bip`.
pub fn to_separable_basis(rho: &SectorDensityMatrix, bip: Bipartition) -> Result<BlockDecomposition> {
    decompose_matrix(rho.matrix(), rho.particles(), rho.modes(), bip)
}

/// As [`to_separable_basis`] for an arbitrary sector matrix.
pub fn decompose_matrix(
    matrix: &CMatrix,
    n: usize,
    modes: usize,
    bip: Bipartition,
) -> Result<BlockDecomposition> {
    if bip.modes() != modes {
        return Err(Error::DimensionMismatch(format!(
            "state on {modes} modes, bipartition of {}",
            bip.modes()
        )));
    }
    let labels = LabelMap::new(n, bip);
    let basis = SectorBasis::new(n, modes);
    let mut blocks = BTreeMap::new();
    for k in 0..=n {
        for l in 0..=n {
            blocks.insert((k, l), CMatrix::zeros(labels.block_dim(k), labels.block_dim(l)));
        }
    }
    let offsets: Vec<(usize, usize)> = basis
        .states()
        .iter()
        .map(|s| {
            let lab = labels.label(s);
            (lab.k, lab.sigma * labels.side_b(n - lab.k).dim() + lab.sigma_prime)
        })
        .collect();
    for (i, &(k, r)) in offsets.iter().enumerate() {
        for (j, &(l, c)) in offsets.iter().enumerate() {
            blocks.get_mut(&(k, l)).expect("block allocated")[(r, c)] = matrix[(i, j)];
        }
    }
    Ok(BlockDecomposition {
        labels,
        modes,
        blocks,
    })
}

/// True iff every coefficient between different local particle numbers has
/// modulus at most `tol`.
pub fn is_block_diagonal(rho: &SectorDensityMatrix, bip: Bipartition, tol: f64) -> Result<bool> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    matrix_is_block_diagonal(rho.matrix(), rho.particles(), rho.modes(), bip, tol)
}

pub(crate) fn matrix_is_block_diagonal(
    matrix: &CMatrix,
    n: usize,
    modes: usize,
    bip: Bipartition,
    tol: f64,
) -> Result<bool> {
    if bip.modes() != modes {
        return Err(Error::DimensionMismatch("bipartition/state mode count".into()));
    }
    let basis = SectorBasis::new(n, modes);
    let local: Vec<usize> = basis
        .states()
        .iter()
        .map(|s| s.occupations()[..bip.m()].iter().map(|&x| x as usize).sum())
        .collect();
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            if local[i] != local[j] && matrix[(i, j)].norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Fock states `|0,1,0,1⟩, |1,0,1,0⟩, |0,1,1,0⟩, |1,0,0,1⟩` of the
/// four-mode two-particle example.
pub(crate) fn example_fock_states() -> [FockState; 4] {
    [
        FockState::new(vec![0, 1, 0, 1]),
        FockState::new(vec![1, 0, 1, 0]),
        FockState::new(vec![0, 1, 1, 0]),
        FockState::new(vec![1, 0, 0, 1]),
    ]
}

/// `p |ψ1⟩⟨ψ1| + (1−p)/2 (|ψ2⟩⟨ψ2| + |ψ3⟩⟨ψ3|)` on two particles in four
/// modes, with `ψ1 = (|0,1,0,1⟩ + |1,0,1,0⟩)/√2`, `ψ2 = |0,1,1,0⟩` and
/// `ψ3 = |1,0,0,1⟩`. Entangled across the 2|2 split iff `p > ½`.
pub fn example_state(p: f64) -> Result<SectorDensityMatrix> {
    check_probability(p)?;
    let basis = SectorBasis::new(2, 4);
    let [s0101, s1010, s0110, s1001] = example_fock_states().map(|s| basis.index_of(&s).unwrap());
    let mut m = CMatrix::zeros(basis.dim(), basis.dim());
    let half_p = C64::new(p / 2.0, 0.0);
    for &(i, j) in &[(s0101, s0101), (s0101, s1010), (s1010, s0101), (s1010, s1010)] {
        m[(i, j)] = half_p;
    }
    m[(s0110, s0110)] = C64::new((1.0 - p) / 2.0, 0.0);
    m[(s1001, s1001)] = C64::new((1.0 - p) / 2.0, 0.0);
    SectorDensityMatrix::new(2, 4, m)
}

/// Normalized `P(a†_A) Q(a†_B)|0⟩`.
pub fn separable_pure(
    poly_a: &OperatorSpec,
    poly_b: &OperatorSpec,
    bip: Bipartition,
) -> Result<SectorDensityMatrix> {
    let modes = bip.modes();
    for (poly, side_a) in [(poly_a, true), (poly_b, false)] {
        for term in &poly.terms {
            for op in &term.word {
                if op.kind != Ladder::Create {
                    return Err(Error::InvalidOperator(
                        "separable polynomials contain creation operators only".into(),
                    ));
                }
                if op.mode == 0 || op.mode > modes {
                    return Err(Error::ModeOutOfRange { mode: op.mode, modes });
                }
                if bip.in_a(op.mode) != side_a {
                    return Err(Error::InvalidOperator(format!(
                        "mode {} is on the wrong side of the bipartition",
                        op.mode
                    )));
                }
            }
        }
    }
    let vacuum = CVector::from_element(1, C64::new(1.0, 0.0));
    let q = ladder_matrix(poly_b, 0, modes)?.expect("creation only");
    let after_q = &q.matrix * vacuum;
    let p = ladder_matrix(poly_a, q.to, modes)?.expect("creation only");
    let psi = &p.matrix * after_q;
    if psi.norm() < 1e-300 {
        return Err(Error::EmptyState);
    }
    SectorDensityMatrix::pure(p.to, modes, &psi)
}

/// Key `(k, l, σ, σ')` of a diagonal-class coefficient: the row Fock state
/// has separable label `(k, σ, σ')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey {
    pub k: usize,
    pub l: usize,
    pub sigma: usize,
    pub sigma_prime: usize,
}

/// Column partner of a diagonal-class coefficient.
///
/// The row state `K` has `k` particles on A; the partner `L` has `l`. Mode
/// occupations shift by `c_j |k − l|^α`, A-side modes in the direction of
/// `l − k` and B-side modes opposite to it.
pub fn class_partner(
    row: &FockState,
    l: usize,
    bip: Bipartition,
    alpha: f64,
    c: &[f64],
) -> Result<FockState> {
    let occ = row.occupations();
    if c.len() != occ.len() {
        return Err(Error::ConstraintViolation(format!(
            "{} coefficients for {} modes",
            c.len(),
            occ.len()
        )));
    }
    let k: usize = occ[..bip.m()].iter().map(|&x| x as usize).sum();
    if k == l {
        return Ok(row.clone());
    }
    let gap = (k as f64 - l as f64).abs().powf(alpha);
    let dir: i64 = if l > k { 1 } else { -1 };
    let mut out = Vec::with_capacity(occ.len());
    for (j, (&kj, &cj)) in occ.iter().zip(c).enumerate() {
        if cj < 0.0 {
            return Err(Error::ConstraintViolation(format!("c_{} = {cj} < 0", j + 1)));
        }
        let shift = cj * gap;
        let rounded = shift.round();
        if (shift - rounded).abs() > 1e-9 {
            return Err(Error::ConstraintViolation(format!(
                "c_{} |k-l|^α = {shift} is not an integer",
                j + 1
            )));
        }
        let signed = if bip.in_a(j + 1) { dir } else { -dir } * rounded as i64;
        let lj = i64::from(kj) + signed;
        if lj < 0 {
            return Err(Error::ConstraintViolation(format!(
                "negative occupation for mode {} (k={k}, l={l})",
                j + 1
            )));
        }
        out.push(lj as u32);
    }
    let partner = FockState::new(out);
    let la: usize = partner.occupations()[..bip.m()].iter().map(|&x| x as usize).sum();
    if la != l || partner.total() != row.total() {
        return Err(Error::ConstraintViolation(format!(
            "shift by c|k-l|^α does not reach l={l} particles on A with fixed N (got {la})"
        )));
    }
    Ok(partner)
}

/// Builds a state of the diagonal class `ρ_{kσσ', lττ'} ∝ δ_{στ} δ_{σ'τ'}`.
///
/// `table` maps `(k, l, σ, σ')` to `ρ_{kσσ', lσσ'}`; the column Fock state
/// is obtained with [`class_partner`]. Missing mirrored entries are filled
/// by Hermiticity; mirrored entries that disagree are rejected.
pub fn diagonal_class_state(
    n: usize,
    bip: Bipartition,
    table: &BTreeMap<ClassKey, C64>,
    alpha: f64,
    c: &[f64],
) -> Result<SectorDensityMatrix> {
    if alpha <= 0.0 {
        return Err(Error::ConstraintViolation(format!("α = {alpha} must be positive")));
    }
    let modes = bip.modes();
    let labels = LabelMap::new(n, bip);
    let basis = SectorBasis::new(n, modes);
    let mut m = CMatrix::zeros(basis.dim(), basis.dim());
    let mut set = vec![vec![false; basis.dim()]; basis.dim()];
    for (key, &value) in table {
        if key.k > n || key.l > n {
            return Err(Error::ConstraintViolation(format!("k or l exceeds N in {key:?}")));
        }
        if key.sigma >= labels.side_a(key.k).dim() || key.sigma_prime >= labels.side_b(n - key.k).dim() {
            return Err(Error::ConstraintViolation(format!("label out of range in {key:?}")));
        }
        let row = labels.state(SeparableLabel {
            k: key.k,
            sigma: key.sigma,
            sigma_prime: key.sigma_prime,
        });
        let col = class_partner(&row, key.l, bip, alpha, c)?;
        let i = basis.index_of(&row).expect("row in sector");
        let j = basis.index_of(&col).expect("partner in sector");
        if set[i][j] && (m[(i, j)] - value).norm() > HERMITICITY_TOL {
            return Err(Error::ConstraintViolation(format!(
                "entry {key:?} conflicts with its Hermitian mirror"
            )));
        }
        m[(i, j)] = value;
        set[i][j] = true;
        if !set[j][i] {
            m[(j, i)] = value.conj();
            set[j][i] = true;
        }
    }
    SectorDensityMatrix::new(n, modes, m)
}

/// Two-mode (`m = 1`) diagonal-class state with `ρ_{k,l}` supplied by
/// `coefficient(k, l)` for `k ≤ l` (the rest by Hermiticity).
pub fn two_mode_state<F>(n: usize, coefficient: F) -> Result<SectorDensityMatrix>
where
    F: Fn(usize, usize) -> C64,
{
    let bip = Bipartition::new(1, 2)?;
    let mut table = BTreeMap::new();
    for k in 0..=n {
        for l in k..=n {
            table.insert(
                ClassKey {
                    k,
                    l,
                    sigma: 0,
                    sigma_prime: 0,
                },
                coefficient(k, l),
            );
        }
    }
    diagonal_class_state(n, bip, &table, 1.0, &[1.0, 1.0])
}
