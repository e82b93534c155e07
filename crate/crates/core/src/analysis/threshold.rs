// SPDX-License-Identifier: Apache-2.0

use crate::dynamics::{analytic_dephasing_example, analytic_loss_example};
use crate::entanglement::{negativity_mixture_oracle, negativity_oracle};
use crate::fock::Bipartition;
use crate::states::check_probability;
use crate::{Error, Result};

/// Which closed-form example a threshold refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleKind {
    /// Single pair-loss channel `a_1 a_3` at rate `λ0`.
    Loss,
    /// Dephasing on all four modes.
    Dephasing,
}

fn example_rate(kind: ExampleKind, rates: &[f64]) -> Result<f64> {
    if let Some(r) = rates.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate {r} must be ≥ 0")));
    }
    match kind {
        ExampleKind::Loss => match rates {
            [l0] => Ok(*l0),
            _ => Err(Error::InvalidArgument(format!(
                "loss example takes one rate, got {}",
                rates.len()
            ))),
        },
        ExampleKind::Dephasing => match rates.len() {
            4 => Ok(rates.iter().sum()),
            n => Err(Error::InvalidArgument(format!("dephasing example takes four rates, got {n}"))),
        },
    }
}

/// Separability time `t* = (2/r) ln(p/(1−p))` of the example state, with
/// `r = λ0` for losses and `r = Σλ_j` for dephasing.
///
/// `None` when the state is separable from the start (`p ≤ ½`);
/// `Some(∞)` when it is entangled and the rate vanishes.
pub fn threshold_time(kind: ExampleKind, p: f64, rates: &[f64]) -> Result<Option<f64>> {
    check_probability(p)?;
    let r = example_rate(kind, rates)?;
    if p <= 0.5 {
        return Ok(None);
    }
    if p == 1.0 || r == 0.0 {
        return Ok(Some(f64::INFINITY));
    }
    Ok(Some(2.0 / r * (p / (1.0 - p)).ln()))
}

/// Oracle negativity of the closed-form evolved example at time `t`.
pub fn example_negativity(kind: ExampleKind, p: f64, rates: &[f64], eps: &[f64; 4], t: f64) -> Result<f64> {
    let bip = Bipartition::new(2, 4)?;
    match kind {
        ExampleKind::Loss => {
            let l0 = example_rate(kind, rates)?;
            negativity_mixture_oracle(&analytic_loss_example(p, l0, eps, t)?, bip)
        }
        ExampleKind::Dephasing => {
            example_rate(kind, rates)?;
            let lam = [rates[0], rates[1], rates[2], rates[3]];
            Ok(negativity_oracle(&analytic_dephasing_example(p, &lam, eps, t)?, bip)?.value)
        }
    }
}

/// Negativity below this counts as zero when locating the crossing.
pub const CROSSING_TOL: f64 = 1e-12;

/// First time in `[0, t_max]` at which the oracle negativity of the evolved
/// example drops to zero, located by bisection to relative precision
/// `1e−10`. `None` if it is still positive at `t_max`.
pub fn numerical_threshold(kind: ExampleKind, p: f64, rates: &[f64], eps: &[f64; 4], t_max: f64) -> Result<Option<f64>> {
    let entangled = |t: f64| -> Result<bool> { Ok(example_negativity(kind, p, rates, eps, t)? > CROSSING_TOL) };
    if !entangled(0.0)? {
        return Ok(Some(0.0));
    }
    if entangled(t_max)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, t_max);
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if entangled(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: [f64; 4] = [0.3, -0.2, 1.1, 0.5];

    #[test]
    fn closed_forms() {
        assert_eq!(threshold_time(ExampleKind::Loss, 0.5, &[0.5]).unwrap(), None);
        let t = threshold_time(ExampleKind::Loss, 0.7, &[0.5]).unwrap().unwrap();
        assert!((t - 4.0 * (7.0_f64 / 3.0).ln()).abs() < 1e-14);
        // The quoted 3.3890 is the closed form truncated, not rounded.
        assert!((t - 3.3890).abs() < 5e-4);
        let t = threshold_time(ExampleKind::Dephasing, 0.8, &[0.3; 4]).unwrap().unwrap();
        assert!((t - 2.3105).abs() < 1e-4);
        assert!(threshold_time(ExampleKind::Loss, 1.5, &[0.5]).is_err());
        assert!(threshold_time(ExampleKind::Dephasing, 0.8, &[0.3; 3]).is_err());
        assert_eq!(threshold_time(ExampleKind::Loss, 0.9, &[0.0]).unwrap(), Some(f64::INFINITY));
    }

    #[test]
    fn bisection_matches_closed_form() {
        for &(kind, ref rates) in &[(ExampleKind::Loss, vec![0.5]), (ExampleKind::Dephasing, vec![0.1, 0.2, 0.3, 0.6])] {
            for p in [0.6, 0.8, 0.95] {
                let exact = threshold_time(kind, p, rates).unwrap().unwrap();
                let num = numerical_threshold(kind, p, rates, &EPS, 4.0 * exact).unwrap().unwrap();
                assert!((num - exact).abs() < 1e-6 * exact, "{kind:?} p={p}: {num} vs {exact}");
            }
        }
        assert_eq!(numerical_threshold(ExampleKind::Loss, 0.4, &[0.5], &EPS, 1.0).unwrap(), Some(0.0));
    }
}
