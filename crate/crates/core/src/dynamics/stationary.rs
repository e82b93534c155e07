// SPDX-License-Identifier: Apache-2.0

use crate::dynamics::{Liouvillian, SectorLayout};
use crate::linalg::null_space;
use crate::states::NumberMixture;
use crate::{CVector, Error, Result, C64};

/// Relative singular-value cut for `ker L`.
pub const NULL_SPACE_TOL: f64 = 1e-9;

/// Kernel of a Liouvillian, as an orthonormal basis of Hermitian elements.
///
/// Each basis vector is a vectorized direct sum of sector blocks (see
/// [`SectorLayout`]) with every block Hermitian. Orthonormality is with
/// respect to `⟨X, Y⟩ = Σ_N Tr(X_N Y_N)`.
#[derive(Debug, Clone)]
pub struct StationarySpace {
    layout: SectorLayout,
    basis: Vec<CVector>,
}

impl StationarySpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    pub fn layout(&self) -> &SectorLayout {
        &self.layout
    }

    /// Basis elements with nonzero trace, each rescaled to unit trace.
    /// Only elements that are also positive come back as states; the rest
    /// are reported as errors.
    pub fn normalized(&self) -> Vec<Result<NumberMixture>> {
        self.basis
            .iter()
            .filter(|v| self.layout.trace(v).norm() > 1e-8)
            .map(|v| normalize(&self.layout, v))
            .collect()
    }

    /// The stationary state when the kernel is one-dimensional.
    pub fn unique_state(&self) -> Result<NumberMixture> {
        match self.basis.as_slice() {
            [v] => normalize(&self.layout, v),
            _ => Err(Error::InvalidState(format!(
                "stationary space has dimension {}, not 1",
                self.basis.len()
            ))),
        }
    }
}

fn normalize(layout: &SectorLayout, v: &CVector) -> Result<NumberMixture> {
    let tr = layout.trace(v);
    if tr.norm() < 1e-12 {
        return Err(Error::InvalidState("traceless stationary element".into()));
    }
    layout.unvectorize(&v.unscale(tr.re))
}

/// `v ↦ vec(X†)` blockwise.
fn adjoint_vector(layout: &SectorLayout, v: &CVector) -> CVector {
    let mut out = CVector::zeros(v.len());
    for &n in layout.sectors() {
        let (off, d) = (layout.offset(n), layout.dim(n));
        for i in 0..d {
            for j in 0..d {
                out[off + i * d + j] = v[off + j * d + i].conj();
            }
        }
    }
    out
}

/// Orthonormal Hermitian basis of `ker L`.
///
/// `L` commutes with the adjoint involution, so the kernel is spanned by
/// the Hermitian and anti-Hermitian parts of any basis of it.
pub fn stationary_states(l: &Liouvillian) -> StationarySpace {
    let layout = l.layout().clone();
    let kernel = null_space(l.matrix(), NULL_SPACE_TOL);
    let dim = kernel.ncols();
    let half_i = C64::new(0.0, 0.5);
    let mut basis: Vec<CVector> = Vec::with_capacity(dim);
    for c in 0..dim {
        if basis.len() == dim {
            break;
        }
        let v = kernel.column(c).into_owned();
        let va = adjoint_vector(&layout, &v);
        let herm = (&v + &va).scale(0.5);
        let anti = (&v - &va) * (-half_i);
        for mut cand in [herm, anti] {
            for b in &basis {
                let proj = b.dotc(&cand).re;
                cand -= b * C64::new(proj, 0.0);
            }
            let norm = cand.norm();
            if norm > 1e-6 && basis.len() < dim {
                // Fix the overall sign so that traces come out non-negative.
                let s = if layout.trace(&cand).re < 0.0 { -1.0 } else { 1.0 };
                basis.push(cand.scale(s / norm));
            }
        }
    }
    StationarySpace { layout, basis }
}
