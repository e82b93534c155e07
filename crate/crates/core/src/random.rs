// SPDX-License-Identifier: Apache-2.0

//! Random states and operators for property suites.
//!
//! Every function takes the generator explicitly; callers seed it.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::fock::{enumerate_sector, Bipartition, LadderOp, OperatorSpec, SectorBasis, Term};
use crate::states::{separable_pure, SectorDensityMatrix};
use crate::{CMatrix, CVector, Result, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random complex vector with i.i.d. Gaussian entries.
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    CVector::from_fn(dim, |_, _| gaussian(rng))
}

/// `G G† / Tr` with `G` a `dim × rank` Ginibre matrix.
pub fn density_matrix<R: Rng + ?Sized>(n: usize, modes: usize, rank: usize, rng: &mut R) -> SectorDensityMatrix {
    let dim = SectorBasis::new(n, modes).dim();
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    from_gram(n, modes, &g)
}

fn from_gram(n: usize, modes: usize, g: &CMatrix) -> SectorDensityMatrix {
    let gg = g * g.adjoint();
    let tr = gg.trace().re;
    let m = crate::linalg::hermitize(&gg.unscale(tr));
    SectorDensityMatrix::new(n, modes, m).expect("Gram matrices are states")
}

/// Random pure state of the sector.
pub fn pure_state<R: Rng + ?Sized>(n: usize, modes: usize, rng: &mut R) -> SectorDensityMatrix {
    density_matrix(n, modes, 1, rng)
}

/// Random state supported on the blocks `(k, k)` only.
pub fn block_diagonal_state<R: Rng + ?Sized>(
    n: usize,
    bip: Bipartition,
    rank: usize,
    rng: &mut R,
) -> SectorDensityMatrix {
    let modes = bip.modes();
    let states = enumerate_sector(n, modes);
    let local: Vec<usize> = states
        .iter()
        .map(|s| s.occupations()[..bip.m()].iter().map(|&x| x as usize).sum())
        .collect();
    let dim = states.len();
    let mut g = CMatrix::zeros(dim, rank.max(1) * (n + 1));
    for k in 0..=n {
        for r in 0..rank.max(1) {
            let col = k * rank.max(1) + r;
            for i in 0..dim {
                if local[i] == k {
                    g[(i, col)] = gaussian(rng);
                }
            }
        }
    }
    from_gram(n, modes, &g)
}

/// Random homogeneous polynomial of degree `degree` in the creation
/// operators of modes `first_mode .. first_mode + side_modes`.
pub fn creation_polynomial<R: Rng + ?Sized>(
    degree: usize,
    first_mode: usize,
    side_modes: usize,
    rng: &mut R,
) -> OperatorSpec {
    let mut terms = Vec::new();
    for s in enumerate_sector(degree, side_modes) {
        let mut word = Vec::new();
        for (j, &k) in s.occupations().iter().enumerate() {
            for _ in 0..k {
                word.push(LadderOp::create(first_mode + j));
            }
        }
        terms.push(Term {
            coefficient: gaussian(rng),
            word,
        });
    }
    OperatorSpec::new(terms)
}

/// Random pure separable state `P(a†_A) Q(a†_B)|0⟩` with `k` particles on A.
pub fn separable_pure_state<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    bip: Bipartition,
    rng: &mut R,
) -> Result<SectorDensityMatrix> {
    let p = creation_polynomial(k, 1, bip.m(), rng);
    let q = creation_polynomial(n - k, bip.m() + 1, bip.modes_b(), rng);
    separable_pure(&p, &q, bip)
}

/// Random unitary on `dim` dimensions (QR of a Ginibre matrix).
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    g.qr().q()
}
