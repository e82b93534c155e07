// SPDX-License-Identifier: Apache-2.0

use crate::dynamics::Liouvillian;
use crate::linalg::{ExpMethod, MatrixExponential};
use crate::par;
use crate::states::NumberMixture;
use crate::{CVector, Error, Result};

/// How a propagator evaluates `e^{tL}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub method: ExpMethod,
    /// Inverse of the generator's largest rate or energy.
    pub characteristic_time: f64,
}

/// `t ↦ e^{tL}` for a fixed Liouvillian, reusable across times.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    liouvillian: &'a Liouvillian,
    exp: MatrixExponential,
}

impl<'a> Propagator<'a> {
    pub fn new(liouvillian: &'a Liouvillian) -> Self {
        Self {
            liouvillian,
            exp: MatrixExponential::new(liouvillian.matrix()),
        }
    }

    /// Always uses scaling and squaring.
    pub fn scaling_squaring(liouvillian: &'a Liouvillian) -> Self {
        Self {
            liouvillian,
            exp: MatrixExponential::scaling_squaring(liouvillian.matrix()),
        }
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            method: self.exp.method(),
            characteristic_time: self.liouvillian.characteristic_time(),
        }
    }

    pub fn liouvillian(&self) -> &Liouvillian {
        self.liouvillian
    }

    /// `e^{tL}` applied to a vectorized state.
    pub fn apply_vector(&self, t: f64, v: &CVector) -> CVector {
        self.exp.apply(t, v)
    }

    pub fn evolve(&self, rho0: &NumberMixture, t: f64) -> Result<NumberMixture> {
        check_time(t)?;
        let layout = self.liouvillian.layout();
        let v = layout.vectorize(rho0)?;
        layout.unvectorize(&self.exp.apply(t, &v))
    }

    /// Evolves to every time of `times`, in parallel, preserving order.
    pub fn evolve_grid(&self, rho0: &NumberMixture, times: &[f64]) -> Result<Vec<NumberMixture>> {
        for &t in times {
            check_time(t)?;
        }
        let layout = self.liouvillian.layout();
        let v = layout.vectorize(rho0)?;
        par::try_map(times, |&t| layout.unvectorize(&self.exp.apply(t, &v)))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time {t} must be finite and ≥ 0")))
    }
}

/// `e^{tL}[ρ₀]`.
pub fn evolve_exact(l: &Liouvillian, rho0: &NumberMixture, t: f64) -> Result<NumberMixture> {
    Propagator::new(l).evolve(rho0, t)
}

/// Classical fourth-order Runge–Kutta with step `dt` (default `t / 1000`).
/// The last step is shortened so that the final time is hit exactly.
pub fn evolve_rk4(l: &Liouvillian, rho0: &NumberMixture, t: f64, dt: Option<f64>) -> Result<NumberMixture> {
    check_time(t)?;
    let layout = l.layout();
    let mut v = layout.vectorize(rho0)?;
    if t == 0.0 {
        return layout.unvectorize(&v);
    }
    let dt = dt.unwrap_or(t / 1000.0);
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("step {dt} must be positive")));
    }
    let m = l.matrix();
    let mut elapsed = 0.0;
    while elapsed < t {
        let h = dt.min(t - elapsed);
        if h <= t * 1e-14 {
            break;
        }
        let k1 = m * &v;
        let k2 = m * (&v + k1.scale(h / 2.0));
        let k3 = m * (&v + k2.scale(h / 2.0));
        let k4 = m * (&v + k3.scale(h));
        v += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
        elapsed += h;
    }
    layout.unvectorize(&v)
}

/// `(e^{tL_A/n} e^{tL_B/n})^n [ρ₀]`: each step applies the `L_B` flow first.
pub fn evolve_trotter(
    la: &Liouvillian,
    lb: &Liouvillian,
    rho0: &NumberMixture,
    t: f64,
    steps: usize,
) -> Result<NumberMixture> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("Trotter step count must be ≥ 1".into()));
    }
    if la.layout() != lb.layout() {
        return Err(Error::DimensionMismatch("Trotter factors on different domains".into()));
    }
    let pa = Propagator::new(la);
    let pb = Propagator::new(lb);
    let h = t / steps as f64;
    let ea = pa.exp.matrix(h);
    let eb = pb.exp.matrix(h);
    let step = ea * eb;
    let layout = la.layout();
    let mut v = layout.vectorize(rho0)?;
    for _ in 0..steps {
        v = &step * v;
    }
    layout.unvectorize(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::LindbladGenerator;
    use crate::linalg::max_abs;
    use crate::random;
    use rand::SeedableRng;

    fn max_diff(a: &NumberMixture, b: &NumberMixture) -> f64 {
        let mut worst = 0.0_f64;
        for n in a.particle_numbers().into_iter().chain(b.particle_numbers()) {
            let x = a.block(n).unwrap_or_else(|| crate::CMatrix::zeros(0, 0));
            let y = b.block(n).unwrap_or_else(|| crate::CMatrix::zeros(0, 0));
            let d = if x.shape() == y.shape() {
                max_abs(&(x - y))
            } else {
                max_abs(&x).max(max_abs(&y))
            };
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn zero_time_is_identity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let rho = NumberMixture::single(random::density_matrix(2, 3, 2, &mut rng));
        let gen = LindbladGenerator::hopping(&[1.0, 0.4]).with_dephasing(&[0.3, 0.2, 0.1]);
        let l = Liouvillian::build_on(&gen, 2..=2, 3).unwrap();
        assert!(max_diff(&evolve_exact(&l, &rho, 0.0).unwrap(), &rho) < 1e-14);
        assert!(max_diff(&evolve_rk4(&l, &rho, 0.0, None).unwrap(), &rho) < 1e-14);
        assert!(evolve_exact(&l, &rho, -1.0).is_err());
        assert!(evolve_rk4(&l, &rho, 1.0, Some(0.0)).is_err());
        assert!(evolve_trotter(&l, &l, &rho, 1.0, 0).is_err());
    }

    #[test]
    fn semigroup_and_rk4_agree() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let rho = NumberMixture::single(random::density_matrix(2, 3, 3, &mut rng));
        let gen = LindbladGenerator::hopping(&[1.0, 0.4])
            .with_dephasing(&[0.3, 0.2, 0.1])
            .with_loss(&[0.05, 0.0, 0.2]);
        let l = Liouvillian::build(&gen, 2, 3).unwrap();
        let p = Propagator::new(&l);
        let direct = p.evolve(&rho, 1.7).unwrap();
        let two = p.evolve(&p.evolve(&rho, 0.5).unwrap(), 1.2).unwrap();
        assert!(max_diff(&direct, &two) < 1e-9);
        assert!((direct.total_weight() - 1.0).abs() < 1e-9);
        let rk = evolve_rk4(&l, &rho, 1.7, None).unwrap();
        assert!(max_diff(&direct, &rk) < 1e-6);
        // Both exponential routes agree.
        let ss = Propagator::scaling_squaring(&l).evolve(&rho, 1.7).unwrap();
        assert!(max_diff(&direct, &ss) < 1e-10);
    }

    #[test]
    fn commuting_split_is_exact() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let rho = NumberMixture::single(random::density_matrix(2, 3, 2, &mut rng));
        let ham = LindbladGenerator::diagonal(&[0.4, -0.9, 1.3]);
        let deph = LindbladGenerator::default().with_dephasing(&[0.2, 0.5, 0.1]);
        let la = Liouvillian::build_on(&ham, 2..=2, 3).unwrap();
        let lb = Liouvillian::build_on(&deph, 2..=2, 3).unwrap();
        let full = la.sum(&lb).unwrap();
        let exact = evolve_exact(&full, &rho, 2.0).unwrap();
        for n in [1, 3, 7] {
            let tr = evolve_trotter(&la, &lb, &rho, 2.0, n).unwrap();
            assert!(max_diff(&exact, &tr) < 1e-12);
        }
    }

    #[test]
    fn single_trotter_step_is_sequential_flow() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let rho = NumberMixture::single(random::density_matrix(2, 3, 2, &mut rng));
        let la = Liouvillian::build_on(&LindbladGenerator::hopping(&[1.0, 0.5]), 2..=2, 3).unwrap();
        let lb = Liouvillian::build_on(&LindbladGenerator::default().with_dephasing(&[0.3, 0.6, 0.9]), 2..=2, 3).unwrap();
        let seq = evolve_exact(&la, &evolve_exact(&lb, &rho, 0.8).unwrap(), 0.8).unwrap();
        let tr = evolve_trotter(&la, &lb, &rho, 0.8, 1).unwrap();
        assert!(max_diff(&seq, &tr) < 1e-12);
    }

    #[test]
    fn grid_matches_pointwise() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let rho = NumberMixture::single(random::density_matrix(1, 3, 2, &mut rng));
        let gen = LindbladGenerator::hopping(&[0.7, 0.2]).with_loss(&[0.1, 0.2, 0.3]);
        let l = Liouvillian::build(&gen, 1, 3).unwrap();
        let p = Propagator::new(&l);
        let times = [0.0, 0.5, 1.0, 4.0];
        let grid = p.evolve_grid(&rho, &times).unwrap();
        for (t, r) in times.iter().zip(&grid) {
            assert!(max_diff(r, &p.evolve(&rho, *t).unwrap()) < 1e-15);
        }
    }
}
