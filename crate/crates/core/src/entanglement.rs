// SPDX-License-Identifier: Apache-2.0

//! Negativity with respect to a mode bipartition.
//!
//! Two independent routes are provided:
//!
//! * [`negativity_formula`] works on the `(k, l)` blocks of the separable
//!   expansion. Partial transposition sends block `(k, l)` from the
//!   `(k, N−l)` tensor sector to the `(l, N−k)` one, so
//!   `‖ρ^{T_A}‖₁ = Σ_{k,l} Tr √R_{k,l}` with `R_{k,l} = C_{kl}† C_{kl}`
//!   built from the block coefficients.
//! * [`negativity_oracle`] forms `ρ^{T_A}` explicitly on the tensor space
//!   `⊕_{a,b} A_a ⊗ B_b` (which is larger than the `N`-particle sector) and
//!   sums the negative eigenvalues.

use std::collections::{BTreeMap, BTreeSet};

use crate::fock::{Bipartition, LabelMap, SectorBasis};
use crate::linalg::hermitian_eigenvalues;
use crate::states::{decompose_matrix, NumberMixture, SectorDensityMatrix};
use crate::{CMatrix, Error, Result, C64};

/// Eigenvalues of `R_{k,l}` above `-R_CLIP_TOL` are clipped to zero.
pub const R_CLIP_TOL: f64 = 1e-12;
/// Eigenvalues of `R_{k,l}` below `-R_ERROR_TOL` are reported as errors.
pub const R_ERROR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Formula,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    pub value: f64,
    /// `Tr √R_{k,l}` per block (formula route only).
    pub per_block: BTreeMap<(usize, usize), f64>,
    pub method: Method,
}

/// Negativity of `rho` by the block formula.
pub fn negativity_formula(rho: &SectorDensityMatrix, bip: Bipartition) -> Result<NegativityReport> {
    let report = formula_unnormalized(rho.matrix(), rho.particles(), rho.modes(), bip)?;
    Ok(report)
}

/// `½(Σ Tr √R_{k,l} − Tr X)` for a positive, not necessarily normalized,
/// sector matrix `X`. Linear in the weight of `X`.
pub(crate) fn formula_unnormalized(
    matrix: &CMatrix,
    n: usize,
    modes: usize,
    bip: Bipartition,
) -> Result<NegativityReport> {
    let dec = decompose_matrix(matrix, n, modes, bip)?;
    let labels = dec.labels();
    let mut per_block = BTreeMap::new();
    let mut total = 0.0;
    for (&(k, l), block) in dec.blocks() {
        if block.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let c = transposed_block(block, labels, k, l);
        let r = c.adjoint() * c;
        let mut tr_sqrt = 0.0;
        for ev in hermitian_eigenvalues(&r) {
            if ev < -R_ERROR_TOL {
                return Err(Error::NegativeEigenvalueInR { k, l, value: ev });
            }
            if ev > R_CLIP_TOL {
                tr_sqrt += ev.sqrt();
            }
        }
        per_block.insert((k, l), tr_sqrt);
        total += tr_sqrt;
    }
    let trace = matrix.trace().re;
    Ok(NegativityReport {
        value: (0.5 * (total - trace)).max(0.0),
        per_block,
        method: Method::Formula,
    })
}

/// Partial transpose of block `(k, l)`: rows `(τ ∈ A_l, σ ∈ B_{N−k})`,
/// columns `(σ'' ∈ A_k, τ'' ∈ B_{N−l})`, entries `ρ_{kσ''σ, lττ''}`.
fn transposed_block(block: &CMatrix, labels: &LabelMap, k: usize, l: usize) -> CMatrix {
    let n = labels.particles();
    let (ak, al) = (labels.side_a(k).dim(), labels.side_a(l).dim());
    let (bk, bl) = (labels.side_b(n - k).dim(), labels.side_b(n - l).dim());
    let mut c = CMatrix::zeros(al * bk, ak * bl);
    for s2 in 0..ak {
        for s in 0..bk {
            for t in 0..al {
                for t2 in 0..bl {
                    c[(t * bk + s, s2 * bl + t2)] = block[(s2 * bk + s, t * bl + t2)];
                }
            }
        }
    }
    c
}

/// The partial transpose of a sector matrix on the tensor host space.
#[derive(Debug, Clone)]
pub struct PartialTranspose {
    pub matrix: CMatrix,
    /// `(a, b)` local particle numbers of each host sub-block, in order.
    pub sectors: Vec<(usize, usize)>,
}

/// Builds `X^{T_A}` on `⊕ A_a ⊗ B_b`, keeping only the `(a, b)` pairs that
/// can receive an entry: `a` and `N − b` range over the local particle
/// numbers present in `X`.
pub fn partial_transpose(matrix: &CMatrix, n: usize, modes: usize, bip: Bipartition) -> Result<PartialTranspose> {
    if bip.modes() != modes {
        return Err(Error::DimensionMismatch("bipartition/state mode count".into()));
    }
    let basis = SectorBasis::new(n, modes);
    let labels = LabelMap::new(n, bip);
    let lab: Vec<_> = basis.states().iter().map(|s| labels.label(s)).collect();

    let mut present = BTreeSet::new();
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            if matrix[(i, j)].norm() != 0.0 {
                present.insert(lab[i].k);
                present.insert(lab[j].k);
            }
        }
    }
    let mut sectors = Vec::new();
    let mut offset = BTreeMap::new();
    let mut dim = 0;
    for &a in &present {
        for &l in &present {
            let b = n - l;
            offset.insert((a, b), dim);
            sectors.push((a, b));
            dim += labels.side_a(a).dim() * labels.side_b(b).dim();
        }
    }
    let host = |a: usize, sigma: usize, b: usize, sigma_b: usize| -> usize {
        offset[&(a, b)] + sigma * labels.side_b(b).dim() + sigma_b
    };
    let mut pt = CMatrix::zeros(dim, dim);
    for i in 0..basis.dim() {
        let r = lab[i];
        for j in 0..basis.dim() {
            let z = matrix[(i, j)];
            if z.norm() == 0.0 {
                continue;
            }
            let c = lab[j];
            // |σ_A⟩⟨τ_A| ⊗ |σ_B⟩⟨τ_B|  ↦  |τ_A⟩⟨σ_A| ⊗ |σ_B⟩⟨τ_B|
            let row = host(c.k, c.sigma, n - r.k, r.sigma_prime);
            let col = host(r.k, r.sigma, n - c.k, c.sigma_prime);
            pt[(row, col)] += z;
        }
    }
    Ok(PartialTranspose { matrix: pt, sectors })
}

/// Negativity from the eigenvalues of the explicit partial transpose.
pub fn negativity_oracle(rho: &SectorDensityMatrix, bip: Bipartition) -> Result<NegativityReport> {
    let value = oracle_unnormalized(rho.matrix(), rho.particles(), rho.modes(), bip)?;
    Ok(NegativityReport {
        value,
        per_block: BTreeMap::new(),
        method: Method::Oracle,
    })
}

pub(crate) fn oracle_unnormalized(matrix: &CMatrix, n: usize, modes: usize, bip: Bipartition) -> Result<f64> {
    let pt = partial_transpose(matrix, n, modes, bip)?;
    Ok(hermitian_eigenvalues(&pt.matrix)
        .into_iter()
        .filter(|&x| x < 0.0)
        .map(|x| -x)
        .sum())
}

/// Smallest eigenvalue of `ρ^{T_A}`.
pub fn min_partial_transpose_eigenvalue(rho: &SectorDensityMatrix, bip: Bipartition) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), rho.particles(), rho.modes(), bip)?;
    Ok(hermitian_eigenvalues(&pt.matrix).first().copied().unwrap_or(0.0))
}

/// True iff `ρ^{T_A} ≥ −tol`.
///
/// For states whose only block is two-qubit-like (as in the four-mode
/// examples) this decides separability; otherwise it only certifies PPT.
pub fn is_ppt(rho: &SectorDensityMatrix, bip: Bipartition, tol: f64) -> Result<bool> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    Ok(min_partial_transpose_eigenvalue(rho, bip)? >= -tol)
}

/// `Σ_N p_N 𝒩(ρ^{(N)})` by the block formula.
pub fn negativity_mixture(mixture: &NumberMixture, bip: Bipartition) -> Result<f64> {
    let mut total = 0.0;
    for (w, rho) in mixture.components() {
        total += w * negativity_formula(rho, bip)?.value;
    }
    Ok(total)
}

/// As [`negativity_mixture`] through the oracle.
pub fn negativity_mixture_oracle(mixture: &NumberMixture, bip: Bipartition) -> Result<f64> {
    let mut total = 0.0;
    for (w, rho) in mixture.components() {
        total += w * negativity_oracle(rho, bip)?.value;
    }
    Ok(total)
}

/// `e^{−iθ a_j† a_j}` on a sector, as a diagonal matrix.
pub fn phase_rotation(n: usize, modes: usize, mode: usize, theta: f64) -> CMatrix {
    let basis = SectorBasis::new(n, modes);
    let mut u = CMatrix::zeros(basis.dim(), basis.dim());
    for (i, s) in basis.states().iter().enumerate() {
        u[(i, i)] = C64::from_polar(1.0, -theta * f64::from(s.occupation(mode)));
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockState;
    use crate::states::{example_state, separable_pure};
    use crate::fock::OperatorSpec;
    use crate::CVector;

    fn bip(m: usize, modes: usize) -> Bipartition {
        Bipartition::new(m, modes).unwrap()
    }

    #[test]
    fn fock_projector_has_zero_negativity() {
        let rho = SectorDensityMatrix::fock(&FockState::new(vec![2, 0, 1]));
        for m in 1..3 {
            assert_eq!(negativity_formula(&rho, bip(m, 3)).unwrap().value, 0.0);
            assert_eq!(negativity_oracle(&rho, bip(m, 3)).unwrap().value, 0.0);
        }
    }

    #[test]
    fn example_state_negativity() {
        // Oracle reference values: the (1,1) block is a two-qubit
        // Werner-like state whose partial transpose has eigenvalues
        // p/2, p/2, (1−p)/2 ± p/2.
        let b = bip(2, 4);
        for p in [0.0, 0.25, 0.5, 0.6, 0.9, 1.0] {
            let rho = example_state(p).unwrap();
            let expect = ((2.0 * p - 1.0) / 2.0).max(0.0);
            let f = negativity_formula(&rho, b).unwrap();
            let o = negativity_oracle(&rho, b).unwrap();
            assert!((f.value - expect).abs() < 1e-13, "p={p}: {}", f.value);
            assert!((o.value - expect).abs() < 1e-13, "p={p}: {}", o.value);
            let sum: f64 = f.per_block.values().sum();
            assert!((0.5 * (sum - 1.0)).max(0.0) - f.value < 1e-12);
        }
        assert!(is_ppt(&example_state(0.5).unwrap(), b, 1e-9).unwrap());
        assert!(!is_ppt(&example_state(0.51).unwrap(), b, 1e-9).unwrap());
    }

    #[test]
    fn cat_state_is_not_ppt() {
        // (|2,0⟩ + |0,2⟩)/√2 across 1|1: R blocks give negativity 1/2.
        let psi = CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        let rho = SectorDensityMatrix::pure(2, 2, &psi).unwrap();
        let f = negativity_formula(&rho, bip(1, 2)).unwrap().value;
        let o = negativity_oracle(&rho, bip(1, 2)).unwrap().value;
        assert!((f - 0.5).abs() < 1e-14 && (o - 0.5).abs() < 1e-14);
        assert!(!is_ppt(&rho, bip(1, 2), 1e-9).unwrap());
    }

    #[test]
    fn separable_across_declared_split() {
        let b = bip(2, 4);
        let p = OperatorSpec::creation(1).add(OperatorSpec::creation(2));
        let rho = separable_pure(&p, &OperatorSpec::creation(3), b).unwrap();
        assert!(negativity_formula(&rho, b).unwrap().value < 1e-14);
        assert!(negativity_oracle(&rho, b).unwrap().value < 1e-14);
        // but a single-particle superposition over modes 1 and 2 is
        // entangled across the 1|3 split
        assert!(negativity_oracle(&rho, bip(1, 4)).unwrap().value > 0.1);
    }

    #[test]
    fn mixture_with_vacuum() {
        let vac = SectorDensityMatrix::fock(&FockState::vacuum(4));
        let mix = NumberMixture::new(vec![(0.5, vac), (0.5, example_state(1.0).unwrap())]).unwrap();
        let v = negativity_mixture(&mix, bip(2, 4)).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
        assert!((negativity_mixture_oracle(&mix, bip(2, 4)).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn host_space_is_larger_than_sector() {
        let psi = CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        let rho = SectorDensityMatrix::pure(2, 2, &psi).unwrap();
        let pt = partial_transpose(rho.matrix(), 2, 2, bip(1, 2)).unwrap();
        // present k ∈ {0, 2}: host pairs (0,2),(0,0),(2,2),(2,0)
        assert_eq!(pt.sectors.len(), 4);
        assert_eq!(pt.matrix.nrows(), 4);
    }
}
