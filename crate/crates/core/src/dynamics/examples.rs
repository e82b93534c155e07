// SPDX-License-Identifier: Apache-2.0

//! Closed-form evolutions of the four-mode example state under a single
//! pair-loss channel and under dephasing.

use crate::dynamics::LindbladGenerator;
use crate::fock::{LadderOp, OperatorSpec, SectorBasis};
use crate::states::{check_probability, example_fock_states, NumberMixture, SectorDensityMatrix};
use crate::{CMatrix, Error, Result, C64};

/// `A_0 = a_1 a_3`.
pub fn pair_loss_operator() -> OperatorSpec {
    OperatorSpec::monomial(
        C64::new(1.0, 0.0),
        vec![LadderOp::annihilate(1), LadderOp::annihilate(3)],
    )
}

/// `H = Σ ε_j a_j†a_j` with the single jump `a_1 a_3` at rate `λ0`.
pub fn loss_example_generator(lambda0: f64, eps: &[f64; 4]) -> LindbladGenerator {
    LindbladGenerator::diagonal(eps).with_jump(lambda0, pair_loss_operator())
}

/// `H = Σ ε_j a_j†a_j` with dephasing `a_j†a_j` at rates `λ_j`.
pub fn dephasing_example_generator(lambda: &[f64; 4], eps: &[f64; 4]) -> LindbladGenerator {
    LindbladGenerator::diagonal(eps).with_dephasing(lambda)
}

fn check_inputs(p: f64, rates: &[f64], t: f64) -> Result<()> {
    check_probability(p)?;
    if let Some(r) = rates.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate {r} must be ≥ 0")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be ≥ 0")));
    }
    Ok(())
}

/// Two-particle block with populations `pop` on `(0101, 1010)`,
/// coherence `c = ρ_{0101,1010}` and `(1−p)/2` on the other two states.
fn two_particle_block(p: f64, pop: [f64; 2], c: C64) -> CMatrix {
    let basis = SectorBasis::new(2, 4);
    let [s0101, s1010, s0110, s1001] = example_fock_states().map(|s| basis.index_of(&s).unwrap());
    let mut m = CMatrix::zeros(basis.dim(), basis.dim());
    m[(s0101, s0101)] = C64::new(pop[0], 0.0);
    m[(s1010, s1010)] = C64::new(pop[1], 0.0);
    m[(s0101, s1010)] = c;
    m[(s1010, s0101)] = c.conj();
    m[(s0110, s0110)] = C64::new((1.0 - p) / 2.0, 0.0);
    m[(s1001, s1001)] = C64::new((1.0 - p) / 2.0, 0.0);
    m
}

/// `γ_t[ρ]` for the pair-loss example: the vacuum carries weight
/// `p/2 (1 − e^{−tλ0})`, the pair `|1,0,1,0⟩` decays with amplitude
/// `e^{−tλ0/2}` and every Fock state picks up the phase `e^{−itE}`.
pub fn analytic_loss_example(p: f64, lambda0: f64, eps: &[f64; 4], t: f64) -> Result<NumberMixture> {
    check_inputs(p, &[lambda0], t)?;
    let decay = (-t * lambda0).exp();
    let vacuum = 0.5 * p * (1.0 - decay);
    // ψ1(t) = (e^{−it(ε2+ε4)}|0101⟩ + e^{−tλ0/2 − it(ε1+ε3)}|1010⟩)/√2
    let phase = C64::from_polar(1.0, t * ((eps[0] + eps[2]) - (eps[1] + eps[3])));
    let c = phase * (0.5 * p * (-0.5 * t * lambda0).exp());
    let block = two_particle_block(p, [0.5 * p, 0.5 * p * decay], c);
    let w2 = 1.0 - vacuum;
    let rho2 = SectorDensityMatrix::new(2, 4, block.unscale(w2))?;
    let mut comps = vec![(w2, rho2)];
    if vacuum > 0.0 {
        let vac = SectorDensityMatrix::maximally_mixed(0, 4);
        comps.push((vacuum, vac));
    }
    NumberMixture::new(comps)
}

/// `γ_t[ρ]` for the dephasing example: only the `|0101⟩⟨1010|` coherence
/// evolves, with factor `e^{−tΣλ_j/2} e^{−it(ε2+ε4−ε1−ε3)}`.
pub fn analytic_dephasing_example(p: f64, lambda: &[f64; 4], eps: &[f64; 4], t: f64) -> Result<SectorDensityMatrix> {
    check_inputs(p, lambda, t)?;
    let total: f64 = lambda.iter().sum();
    let phase = C64::from_polar(1.0, t * ((eps[0] + eps[2]) - (eps[1] + eps[3])));
    let c = phase * (0.5 * p * (-0.5 * t * total).exp());
    SectorDensityMatrix::new(2, 4, two_particle_block(p, [0.5 * p, 0.5 * p], c))
}
