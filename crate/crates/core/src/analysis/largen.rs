// SPDX-License-Identifier: Apache-2.0

//! Negativity of the diagonal class under diagonal-`H` dephasing, exactly
//! and through the large-`N` asymptotic series.
//!
//! A spec stores one coefficient table per channel `(σ, σ')`: entry
//! `(k, l)` is `ρ_{kσσ', lσσ'}`, where along a channel mode `j` carries
//! `k_j − l_j = ±c_j |k − l|^α` (plus sign on A when `k > l`, the opposite
//! sign on B).

use crate::analysis::quadrature::{central_weights, fit_line, simpson, LineFit};
use crate::linalg::hermiticity_defect;
use crate::par;
use crate::states::SectorDensityMatrix;
use crate::{CMatrix, Error, Result, C64};

/// Regime in which [`largen_asymptotic`] is trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityGate {
    /// Lower limit on `t S N^{2α}`.
    pub min_tsn: f64,
    /// Upper limit on `t S`.
    pub max_ts: f64,
}

impl Default for ValidityGate {
    fn default() -> Self {
        Self {
            min_tsn: 10.0,
            max_ts: 1.0,
        }
    }
}

/// Fit window `10 ≤ tSN^{2α}`, `tS ≤ ½` used by [`validity_window`].
pub const FIT_WINDOW: ValidityGate = ValidityGate {
    min_tsn: 10.0,
    max_ts: 0.5,
};

pub const DEFAULT_TERMS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSpec {
    pub alpha: f64,
    pub c: Vec<f64>,
    pub rates: Vec<f64>,
    pub n: usize,
    /// Modes in subsystem A.
    pub m: usize,
    pub channels: Vec<CMatrix>,
    pub n_terms: usize,
    pub gate: ValidityGate,
}

impl AsymptoticSpec {
    pub fn new(alpha: f64, c: Vec<f64>, rates: Vec<f64>, n: usize, m: usize, channels: Vec<CMatrix>) -> Result<Self> {
        let spec = Self {
            alpha,
            c,
            rates,
            n,
            m,
            channels,
            n_terms: DEFAULT_TERMS,
            gate: ValidityGate::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Two modes, `α = c_1 = c_2 = 1`, one channel.
    pub fn two_mode(n: usize, rates: [f64; 2], table: CMatrix) -> Result<Self> {
        Self::new(1.0, vec![1.0, 1.0], rates.to_vec(), n, 1, vec![table])
    }

    /// Two modes with `ρ_{kl} = 1/(N+1)`: the flat superposition of all
    /// `|k, N−k⟩`.
    pub fn two_mode_flat(n: usize, rates: [f64; 2]) -> Result<Self> {
        let v = C64::new(1.0 / (n + 1) as f64, 0.0);
        Self::two_mode(n, rates, CMatrix::from_element(n + 1, n + 1, v))
    }

    /// Reads the table of a two-mode state (`k` = occupation of mode 1).
    pub fn from_two_mode_state(rho: &SectorDensityMatrix, rates: [f64; 2]) -> Result<Self> {
        if rho.modes() != 2 {
            return Err(Error::ConstraintViolation(format!(
                "two-mode table from a {}-mode state",
                rho.modes()
            )));
        }
        let n = rho.particles();
        // Canonical order puts |k, N−k⟩ at index N − k.
        let table = CMatrix::from_fn(n + 1, n + 1, |k, l| rho.matrix()[(n - k, n - l)]);
        Self::two_mode(n, rates, table)
    }

    pub fn with_terms(mut self, n_terms: usize) -> Self {
        self.n_terms = n_terms;
        self
    }

    pub fn with_gate(mut self, gate: ValidityGate) -> Self {
        self.gate = gate;
        self
    }

    pub fn modes(&self) -> usize {
        self.c.len()
    }

    /// `S = Σ_j λ_j c_j`.
    pub fn s(&self) -> f64 {
        self.rates.iter().zip(&self.c).map(|(l, c)| l * c).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let modes = self.c.len();
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("α = {} must be positive", self.alpha)));
        }
        if self.rates.len() != modes {
            return Err(Error::DimensionMismatch(format!(
                "{} rates for {modes} coefficients c_j",
                self.rates.len()
            )));
        }
        if self.c.iter().any(|c| !(*c >= 0.0)) || self.rates.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidArgument("c_j and λ_j must be ≥ 0".into()));
        }
        if self.m == 0 || self.m >= modes {
            return Err(Error::InvalidBipartition { m: self.m, modes });
        }
        if modes == 2 && (self.alpha != 1.0 || self.c != [1.0, 1.0]) {
            return Err(Error::ConstraintViolation("two modes force α = c_1 = c_2 = 1".into()));
        }
        if !(self.s() > 0.0) {
            return Err(Error::InvalidArgument("S = Σ λ_j c_j must be positive".into()));
        }
        let dim = self.n + 1;
        let mut trace = 0.0;
        for (i, ch) in self.channels.iter().enumerate() {
            if ch.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "channel {i} has shape {:?}, expected {dim}×{dim}",
                    ch.shape()
                )));
            }
            if hermiticity_defect(ch) > 1e-12 {
                return Err(Error::InvalidState(format!("channel {i} is not Hermitian")));
            }
            trace += ch.trace().re;
        }
        if (trace - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("diagonal sums to {trace}")));
        }
        Ok(())
    }

    /// `|k_j − l_j|` along a channel at `|k − l| = d`.
    fn shift(&self, j: usize, d: usize) -> f64 {
        self.c[j] * (d as f64).powf(self.alpha)
    }

    /// Checks the occupation sum rules for every `|k − l|` that carries a
    /// nonzero coherence.
    fn check_sum_rules(&self) -> Result<()> {
        let dim = self.n + 1;
        let mut seen = vec![false; dim];
        for ch in &self.channels {
            for k in 0..dim {
                for l in 0..dim {
                    if ch[(k, l)].norm() > 0.0 {
                        seen[k.abs_diff(l)] = true;
                    }
                }
            }
        }
        for d in (1..dim).filter(|&d| seen[d]) {
            let a: f64 = (0..self.m).map(|j| self.shift(j, d)).sum();
            let b: f64 = (self.m..self.modes()).map(|j| self.shift(j, d)).sum();
            let df = d as f64;
            if (a - df).abs() > 1e-9 * df || (b - df).abs() > 1e-9 * df {
                return Err(Error::ConstraintViolation(format!(
                    "α = {}, c = {:?} give A/B shifts ({a}, {b}) at |k−l| = {d}",
                    self.alpha, self.c
                )));
            }
        }
        Ok(())
    }
}

/// `𝒩(ρ_t) = ½(Σ |(ρ_t)_{kσσ',lσσ'}| − 1)` with every coefficient evolved
/// by `e^{−itΣε_j(k_j−l_j) − (t/2)Σλ_j(k_j−l_j)²}`.
pub fn largen_exact(spec: &AsymptoticSpec, eps: &[f64], t: f64) -> Result<f64> {
    spec.validate()?;
    spec.check_sum_rules()?;
    if eps.len() != spec.modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} energies for {} modes",
            eps.len(),
            spec.modes()
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be ≥ 0")));
    }
    let dim = spec.n + 1;
    let modes = spec.modes();
    // Per |k − l|: damping exponent and the phase for k > l.
    let per_d: Vec<(f64, f64)> = (0..dim)
        .map(|d| {
            let mut damp = 0.0;
            let mut phase = 0.0;
            for j in 0..modes {
                let s = spec.shift(j, d);
                let signed = if j < spec.m { s } else { -s };
                damp += spec.rates[j] * s * s;
                phase += eps[j] * signed;
            }
            (0.5 * t * damp, t * phase)
        })
        .collect();
    let rows = par::map_range(dim, |k| {
        let mut acc = 0.0;
        for ch in &spec.channels {
            for l in 0..dim {
                let z = ch[(k, l)];
                if z.norm() == 0.0 {
                    continue;
                }
                let (damp, phase) = per_d[k.abs_diff(l)];
                let phase = if k >= l { phase } else { -phase };
                acc += (z * C64::from_polar((-damp).exp(), -phase)).norm();
            }
        }
        acc
    });
    Ok(0.5 * (rows.iter().sum::<f64>() - 1.0))
}

/// One evaluation of the truncated asymptotic series.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticEstimate {
    pub value: f64,
    /// `2^{1/2α} Γ(1 + 1/2α) / (tS)^{1/2α}`.
    pub leading: f64,
    /// Terms `n = 1 ..= n_terms`.
    pub corrections: Vec<f64>,
    /// `Σ_ch ∫ |∂²ⁿ_y R|_{y=0} dx` for each correction.
    pub derivative_integrals: Vec<f64>,
    pub in_regime: bool,
    /// Why the gate failed, if it did.
    pub gate_message: Option<String>,
}

impl AsymptoticEstimate {
    /// The estimate, or [`Error::ValidityGateFailed`] outside the regime.
    pub fn checked(self) -> Result<Self> {
        match self.gate_message {
            Some(msg) => Err(Error::ValidityGateFailed(msg)),
            None => Ok(self),
        }
    }
}

/// `Σ_ch ∫_0^1 |∂^{2n}_y R(x + y/2, x − y/2)|_{y=0} dx` from the table.
///
/// `R = N ρ_{kl}` with `x = (k+l)/2N`, `y = (k−l)/N`. At `x = i/N` the
/// samples along `y` are `N ρ_{i+j, i−j}` with spacing `2/N`; the central
/// stencil has half-width `2n` (accuracy order `2n + 2`). Points near the
/// edges where the stencil does not fit contribute zero.
pub fn derivative_integral(spec: &AsymptoticSpec, order: usize) -> f64 {
    let n = spec.n;
    if order == 0 {
        return spec.channels.iter().map(|ch| ch.trace().re).sum();
    }
    let hw = order;
    let nf = n as f64;
    let weights = central_weights(order, hw, 2.0 / nf);
    let mut total = 0.0;
    for ch in &spec.channels {
        let samples: Vec<f64> = (0..=n)
            .map(|i| {
                if i < hw || i + hw > n {
                    return 0.0;
                }
                let mut d = C64::new(0.0, 0.0);
                for (idx, w) in weights.iter().enumerate() {
                    let j = idx as i64 - hw as i64;
                    let k = (i as i64 + j) as usize;
                    let l = (i as i64 - j) as usize;
                    d += ch[(k, l)] * (w * nf);
                }
                d.norm()
            })
            .collect();
        total += simpson(&samples, 1.0 / nf);
    }
    total
}

/// Truncated series
/// `−½ + 2^{1/2α}Γ(1+1/2α)/(tS)^{1/2α} +
///  Σ_n 2^{(2n+1)/2α}Γ(1+(2n+1)/2α) / ((2n+1)! N^{2n} (tS)^{(2n+1)/2α}) · I_n`
/// with `I_n` from [`derivative_integral`]. Always evaluated; the gate
/// outcome is recorded in the estimate.
pub fn largen_asymptotic(spec: &AsymptoticSpec, t: f64) -> Result<AsymptoticEstimate> {
    spec.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be positive")));
    }
    let a2 = 2.0 * spec.alpha;
    let ts = t * spec.s();
    let nf = spec.n as f64;
    let leading = 2f64.powf(1.0 / a2) * libm::tgamma(1.0 + 1.0 / a2) / ts.powf(1.0 / a2);
    let mut corrections = Vec::with_capacity(spec.n_terms);
    let mut integrals = Vec::with_capacity(spec.n_terms);
    let mut factorial = 1.0;
    for n in 1..=spec.n_terms {
        let p = (2 * n + 1) as f64;
        factorial *= (2 * n) as f64 * p;
        let integral = derivative_integral(spec, 2 * n);
        let coeff = 2f64.powf(p / a2) * libm::tgamma(1.0 + p / a2) / (factorial * nf.powi(2 * n as i32) * ts.powf(p / a2));
        corrections.push(coeff * integral);
        integrals.push(integral);
    }
    let tsn = ts * nf.powf(a2);
    let gate_message = if tsn < spec.gate.min_tsn {
        Some(format!("tSN^{{2α}} = {tsn} below {}", spec.gate.min_tsn))
    } else if ts > spec.gate.max_ts {
        Some(format!("tS = {ts} above {}", spec.gate.max_ts))
    } else {
        None
    };
    Ok(AsymptoticEstimate {
        value: -0.5 + leading + corrections.iter().sum::<f64>(),
        leading,
        corrections,
        derivative_integrals: integrals,
        in_regime: gate_message.is_none(),
        gate_message,
    })
}

/// Times with `10 ≤ tSN^{2α}` and `tS ≤ ½`; `None` when empty.
pub fn validity_window(spec: &AsymptoticSpec) -> Option<(f64, f64)> {
    let s = spec.s();
    let lo = FIT_WINDOW.min_tsn / (s * (spec.n as f64).powf(2.0 * spec.alpha));
    let hi = FIT_WINDOW.max_ts / s;
    (lo < hi).then_some((lo, hi))
}

/// `points` logarithmically spaced times from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..points)
                .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `log 𝒩` linear in `log t`.
    Algebraic,
    /// `log 𝒩` linear in `t`.
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub n: usize,
    pub times: Vec<f64>,
    pub negativity: Vec<f64>,
    /// Slope is the algebraic exponent.
    pub algebraic: LineFit,
    /// Slope is minus the decay rate.
    pub exponential: LineFit,
    pub preferred: DecayModel,
    /// Exact negativity non-increasing along the grid (to 1e−12).
    pub monotone: bool,
}

/// Fits `log 𝒩_exact` against `log t` and against `t` for each case, on
/// the supplied grids, and reports the model with the lower residual.
/// Cases run in parallel; output order follows the input.
pub fn decay_regime_scan(cases: &[(AsymptoticSpec, Vec<f64>)]) -> Result<Vec<DecayFit>> {
    par::try_map(cases, |(spec, times)| {
        let zeros = vec![0.0; spec.modes()];
        let neg = par::try_map(times, |&t| largen_exact(spec, &zeros, t))?;
        let (mut lx, mut tx, mut ly) = (Vec::new(), Vec::new(), Vec::new());
        for (&t, &v) in times.iter().zip(&neg) {
            if t > 0.0 && v > 0.0 {
                lx.push(t.ln());
                tx.push(t);
                ly.push(v.ln());
            }
        }
        let too_few = || Error::InvalidArgument(format!("N = {}: fewer than 3 usable grid points", spec.n));
        if ly.len() < 3 {
            return Err(too_few());
        }
        let algebraic = fit_line(&lx, &ly).ok_or_else(too_few)?;
        let exponential = fit_line(&tx, &ly).ok_or_else(too_few)?;
        let preferred = if algebraic.residual <= exponential.residual {
            DecayModel::Algebraic
        } else {
            DecayModel::Exponential
        };
        let monotone = neg.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        Ok(DecayFit {
            n: spec.n,
            times: times.clone(),
            negativity: neg,
            algebraic,
            exponential,
            preferred,
            monotone,
        })
    })
}
