// SPDX-License-Identifier: Apache-2.0

use std::ops::RangeInclusive;

use crate::dynamics::LindbladGenerator;
use crate::fock::{ladder_matrix_in, SectorBasis};
use crate::linalg::{hermiticity_defect, kron, max_abs, real_trace};
use crate::states::{NumberMixture, SectorDensityMatrix, EVOLVED_POSITIVITY_TOL};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Weights below this are dropped when a propagated vector is split back
/// into sector components.
pub const WEIGHT_FLOOR: f64 = 1e-14;

/// Offsets of vectorized sector blocks inside the direct sum.
///
/// Block `N` occupies `offset(N) .. offset(N) + dim(N)²`, row-major
/// (`ρ_{ij}` at `offset + i·dim + j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorLayout {
    modes: usize,
    sectors: Vec<usize>,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl SectorLayout {
    pub fn new(sectors: RangeInclusive<usize>, modes: usize) -> Self {
        let sectors: Vec<usize> = sectors.collect();
        let dims: Vec<usize> = sectors.iter().map(|&n| SectorBasis::new(n, modes).dim()).collect();
        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for &d in &dims {
            offsets.push(total);
            total += d * d;
        }
        Self {
            modes,
            sectors,
            dims,
            offsets,
            total,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    /// Length of the vectorized direct sum.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn position(&self, n: usize) -> Option<usize> {
        self.sectors.iter().position(|&s| s == n)
    }

    pub fn contains(&self, n: usize) -> bool {
        self.position(n).is_some()
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims[self.position(n).expect("sector in layout")]
    }

    pub fn offset(&self, n: usize) -> usize {
        self.offsets[self.position(n).expect("sector in layout")]
    }

    /// Stacks `p_N ρ^{(N)}` into one vector.
    pub fn vectorize(&self, rho: &NumberMixture) -> Result<CVector> {
        if rho.modes() != self.modes {
            return Err(Error::DimensionMismatch(format!(
                "state on {} modes, Liouvillian on {}",
                rho.modes(),
                self.modes
            )));
        }
        let mut v = CVector::zeros(self.total);
        for (w, r) in rho.components() {
            let n = r.particles();
            if !self.contains(n) {
                return Err(Error::DimensionMismatch(format!(
                    "sector N={n} outside the Liouvillian domain {:?}",
                    self.sectors
                )));
            }
            let (off, d) = (self.offset(n), self.dim(n));
            for i in 0..d {
                for j in 0..d {
                    v[off + i * d + j] = r.matrix()[(i, j)] * *w;
                }
            }
        }
        Ok(v)
    }

    /// Unnormalized block of sector `n`.
    pub fn block(&self, v: &CVector, n: usize) -> CMatrix {
        let (off, d) = (self.offset(n), self.dim(n));
        CMatrix::from_fn(d, d, |i, j| v[off + i * d + j])
    }

    /// Splits a vectorized direct sum into a mixture, dropping sectors whose
    /// weight is below [`WEIGHT_FLOOR`].
    pub fn unvectorize(&self, v: &CVector) -> Result<NumberMixture> {
        let mut comps = Vec::new();
        for &n in &self.sectors {
            let block = self.block(v, n);
            let w = real_trace(&block);
            if w.abs() < WEIGHT_FLOOR {
                let stray = max_abs(&block);
                if stray > EVOLVED_POSITIVITY_TOL {
                    return Err(Error::PositivityViolation(-stray));
                }
                continue;
            }
            if w < 0.0 {
                return Err(Error::PositivityViolation(w));
            }
            comps.push((w, SectorDensityMatrix::from_unnormalized(n, self.modes, &block)?));
        }
        NumberMixture::unchecked_total(comps)
    }

    /// Vectorized trace functional: `⟨tr, v⟩ = Σ_N Tr X_N`.
    pub fn trace(&self, v: &CVector) -> C64 {
        let mut t = C64::new(0.0, 0.0);
        for &n in &self.sectors {
            let (off, d) = (self.offset(n), self.dim(n));
            for i in 0..d {
                t += v[off + i * d + i];
            }
        }
        t
    }
}

/// Superoperator of a Lindblad generator on the direct sum of sectors.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    layout: SectorLayout,
    matrix: CMatrix,
    characteristic_time: f64,
}

/// Relative tolerance for the Hermiticity check of `H` on each sector.
const HAMILTONIAN_HERMITICITY_TOL: f64 = 1e-12;

impl Liouvillian {
    /// Builds `L` on sectors `0..=n_max`.
    pub fn build(gen: &LindbladGenerator, n_max: usize, modes: usize) -> Result<Self> {
        Self::build_on(gen, 0..=n_max, modes)
    }

    /// Builds `L` on an arbitrary contiguous range of sectors. Fails if a
    /// jump feeds a sector outside the range.
    pub fn build_on(gen: &LindbladGenerator, sectors: RangeInclusive<usize>, modes: usize) -> Result<Self> {
        gen.validate()?;
        gen.hamiltonian.check_modes(modes)?;
        for j in &gen.jumps {
            j.operator.check_modes(modes)?;
        }
        let layout = SectorLayout::new(sectors, modes);
        let mut matrix = CMatrix::zeros(layout.len(), layout.len());
        let bases: Vec<SectorBasis> = layout.sectors().iter().map(|&n| SectorBasis::new(n, modes)).collect();
        let i_unit = C64::new(0.0, 1.0);

        for (pos, &n) in layout.sectors().iter().enumerate() {
            let basis = &bases[pos];
            let d = basis.dim();
            let id = CMatrix::identity(d, d);
            let off = layout.offset(n);

            let h = ladder_matrix_in(&gen.hamiltonian, basis, basis).matrix;
            let herm = hermiticity_defect(&h);
            if herm > HAMILTONIAN_HERMITICITY_TOL * max_abs(&h).max(1.0) {
                return Err(Error::InvalidOperator(format!(
                    "Hamiltonian is not Hermitian on sector N={n} (defect {herm:e})"
                )));
            }
            let mut diag = (kron(&h, &id) - kron(&id, &h.transpose())) * (-i_unit);

            for jump in &gen.jumps {
                if jump.rate == 0.0 {
                    continue;
                }
                let delta = jump.operator.particle_change()?;
                let target = n as i64 + delta;
                if target < 0 {
                    continue;
                }
                let target = target as usize;
                let Some(tpos) = layout.sectors().iter().position(|&s| s == target) else {
                    return Err(Error::DimensionMismatch(format!(
                        "jump maps sector N={n} to N={target}, outside the domain {:?}",
                        layout.sectors()
                    )));
                };
                let a = ladder_matrix_in(&jump.operator, basis, &bases[tpos]).matrix;
                let lam = C64::new(jump.rate, 0.0);
                let ada = a.adjoint() * &a;
                diag -= (kron(&ada, &id) + kron(&id, &ada.transpose())) * (lam * 0.5);
                let feed = kron(&a, &a.map(|z| z.conj())) * lam;
                let (toff, td) = (layout.offset(target), bases[tpos].dim());
                let mut view = matrix.view_mut((toff, off), (td * td, d * d));
                view += &feed;
            }
            let mut view = matrix.view_mut((off, off), (d * d, d * d));
            view += &diag;
        }
        Ok(Self {
            layout,
            matrix,
            characteristic_time: gen.characteristic_time(),
        })
    }

    pub fn layout(&self) -> &SectorLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.layout.modes()
    }

    /// Inverse of the largest rate or energy scale of the generator.
    pub fn characteristic_time(&self) -> f64 {
        self.characteristic_time
    }

    /// Superoperator block from sector `from` to sector `to`.
    pub fn block(&self, from: usize, to: usize) -> CMatrix {
        let (fo, fd) = (self.layout.offset(from), self.layout.dim(from));
        let (to_off, td) = (self.layout.offset(to), self.layout.dim(to));
        self.matrix.view((to_off, fo), (td * td, fd * fd)).into_owned()
    }

    /// `L[ρ]` as unnormalized sector blocks `(N, dρ_N/dt)`.
    pub fn apply(&self, rho: &NumberMixture) -> Result<Vec<(usize, CMatrix)>> {
        let v = self.layout.vectorize(rho)?;
        let dv = &self.matrix * v;
        Ok(self
            .layout
            .sectors()
            .iter()
            .map(|&n| (n, self.layout.block(&dv, n)))
            .collect())
    }

    /// `self + other` on the same layout.
    pub fn sum(&self, other: &Liouvillian) -> Result<Liouvillian> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch("Liouvillians on different domains".into()));
        }
        Ok(Liouvillian {
            layout: self.layout.clone(),
            matrix: &self.matrix + &other.matrix,
            characteristic_time: self.characteristic_time.min(other.characteristic_time),
        })
    }

    /// Largest modulus of the trace functional applied after `L`
    /// (zero for a trace-preserving generator).
    pub fn trace_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for col in 0..self.matrix.ncols() {
            let c = self.matrix.column(col).into_owned();
            worst = worst.max(self.layout.trace(&c).norm());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{LadderOp, OperatorSpec};
    use crate::states::example_state;

    #[test]
    fn zero_generator() {
        let l = Liouvillian::build(&LindbladGenerator::default(), 2, 3).unwrap();
        assert_eq!(max_abs(l.matrix()), 0.0);
    }

    #[test]
    fn dephasing_coherence_rate() {
        let eps = [0.3, -1.1, 0.7];
        let lam = [0.2, 0.5, 1.3];
        let gen = LindbladGenerator::diagonal(&eps).with_dephasing(&lam);
        let l = Liouvillian::build_on(&gen, 2..=2, 3).unwrap();
        let basis = SectorBasis::new(2, 3);
        let d = basis.dim();
        assert!(l.trace_defect() < 1e-14);
        for (i, k) in basis.states().iter().enumerate() {
            for (j, kb) in basis.states().iter().enumerate() {
                let mut phase = 0.0;
                let mut damp = 0.0;
                for m in 0..3 {
                    let dk = f64::from(k.occupations()[m]) - f64::from(kb.occupations()[m]);
                    phase += eps[m] * dk;
                    damp += lam[m] * dk * dk;
                }
                let expect = C64::new(-0.5 * damp, -phase);
                let idx = i * d + j;
                assert!((l.matrix()[(idx, idx)] - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn loss_feeds_lower_sector() {
        let a13 = OperatorSpec::monomial(
            C64::new(1.0, 0.0),
            vec![LadderOp::annihilate(1), LadderOp::annihilate(3)],
        );
        let gen = LindbladGenerator::default().with_jump(0.5, a13.clone());
        let l = Liouvillian::build(&gen, 2, 4).unwrap();
        assert!(l.trace_defect() < 1e-14);
        assert_eq!(l.block(2, 0).shape(), (1, 100));
        assert_eq!(l.block(2, 1).iter().map(|z| z.norm()).sum::<f64>(), 0.0);
        // outside domain
        assert!(matches!(
            Liouvillian::build_on(&gen, 1..=2, 4),
            Err(Error::DimensionMismatch(_))
        ));
        let rho = NumberMixture::single(example_state(1.0).unwrap());
        let d = l.apply(&rho).unwrap();
        let vac = &d.iter().find(|(n, _)| *n == 0).unwrap().1;
        assert!((vac[(0, 0)].re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let gen = LindbladGenerator::new(OperatorSpec::hop(1, 2), vec![]).unwrap();
        assert!(matches!(Liouvillian::build(&gen, 1, 2), Err(Error::InvalidOperator(_))));
    }
}
