// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria, one line per criterion. Exits nonzero if any fail.

use std::process::ExitCode;
use std::time::Instant;

use bosent_core::analysis::{
    check_decoherence_equality, check_dephasing_bound, check_loss_bound, decay_regime_scan, largen_asymptotic,
    largen_exact, log_grid, numerical_threshold, threshold_time, validity_window, AsymptoticSpec, DecayModel,
    ExampleKind,
};
use bosent_core::dynamics::{
    analytic_dephasing_example, analytic_loss_example, dephasing_example_generator, evolve_exact, evolve_rk4,
    evolve_trotter, hopping_between, loss_example_generator, stationary_states, LindbladGenerator, Liouvillian,
};
use bosent_core::entanglement::{
    is_ppt, negativity_formula, negativity_mixture, negativity_oracle, negativity_mixture_oracle,
};
use bosent_core::fock::{Bipartition, OperatorSpec};
use bosent_core::linalg::max_abs;
use bosent_core::random;
use bosent_core::states::{example_state, is_block_diagonal, NumberMixture, SectorDensityMatrix};
use bosent_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bip(m: usize, modes: usize) -> Bipartition {
    Bipartition::new(m, modes).expect("valid split")
}

fn max_block_diff(a: &NumberMixture, b: &NumberMixture) -> f64 {
    let mut ns = a.particle_numbers();
    ns.extend(b.particle_numbers());
    ns.sort_unstable();
    ns.dedup();
    ns.iter()
        .map(|&n| match (a.block(n), b.block(n)) {
            (Some(x), Some(y)) => max_abs(&(x - y)),
            (Some(x), None) | (None, Some(x)) => max_abs(&x),
            (None, None) => 0.0,
        })
        .fold(0.0, f64::max)
}

fn uniform_grid(t_max: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect()
}

/// Ginibre state that is not block-diagonal for the split (generic).
fn non_block_diagonal_state(n: usize, b: Bipartition, r: &mut ChaCha8Rng) -> SectorDensityMatrix {
    loop {
        let rank = r.random_range(1..=3);
        let rho = random::density_matrix(n, b.modes(), rank, r);
        if !is_block_diagonal(&rho, b, 1e-3).unwrap() {
            return rho;
        }
    }
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0_f64;
    let mut count = 0;
    for n in 1..=3 {
        for modes in 2..=4 {
            for m in 1..modes {
                let b = bip(m, modes);
                for i in 0..12 {
                    let rho = match i % 3 {
                        0 => random::pure_state(n, modes, &mut r),
                        1 => random::density_matrix(n, modes, 2, &mut r),
                        _ => random::block_diagonal_state(n, b, 2, &mut r),
                    };
                    let f = negativity_formula(&rho, b)?.value;
                    let o = negativity_oracle(&rho, b)?.value;
                    worst = worst.max((f - o).abs());
                    count += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        count >= 200 && worst <= 1e-10 && secs < 60.0,
        format!("{count} states, max |formula − oracle| = {worst:.2e}, {secs:.2}s"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let b = bip(2, 4);
    let below = is_ppt(&example_state(0.5 - 1e-6)?, b, 1e-9)?;
    let above = is_ppt(&example_state(0.5 + 1e-6)?, b, 1e-9)?;
    let mut iff = true;
    for i in 0..=40 {
        let p = i as f64 / 40.0;
        let neg = negativity_oracle(&example_state(p)?, b)?.value;
        iff &= (neg > 1e-12) == (p > 0.5);
    }
    let eps = [0.3, -0.7, 1.2, 0.4];
    let cases = [
        (ExampleKind::Loss, vec![0.5]),
        (ExampleKind::Dephasing, vec![0.1, 0.2, 0.4, 0.5]),
    ];
    let mut worst_rel = 0.0_f64;
    let mut brackets = true;
    for (kind, rates) in &cases {
        for p in [0.6, 0.8, 0.95] {
            let t_star = threshold_time(*kind, p, rates)?.expect("entangled start");
            let found = numerical_threshold(*kind, p, rates, &eps, 5.0 * t_star)?.expect("crossing");
            worst_rel = worst_rel.max((found - t_star).abs() / t_star);
            let after = bosent_core::analysis::example_negativity(*kind, p, rates, &eps, 1.01 * t_star)?;
            let before = bosent_core::analysis::example_negativity(*kind, p, rates, &eps, 0.9 * t_star)?;
            brackets &= after < 1e-10 && before > 1e-6;
        }
    }
    outcome(
        below && !above && iff && worst_rel <= 0.01 && brackets,
        format!(
            "PPT at p=½−1e−6: {below}, at p=½+1e−6: {above}; max |t_num − t*|/t* = {worst_rel:.1e}; brackets at 0.9/1.01 t*: {brackets}"
        ),
    )
}

fn random_eps(r: &mut ChaCha8Rng) -> [f64; 4] {
    [(); 4].map(|_| r.random_range(-1.0..1.0))
}

fn criterion_3() -> Result<Outcome> {
    let mut r = rng(3);
    let (mut exact_err, mut rk4_err) = (0.0_f64, 0.0_f64);
    for _ in 0..10 {
        let p = r.random_range(0.0..1.0);
        let l0 = r.random_range(0.1..1.0);
        let eps = random_eps(&mut r);
        let t = r.random_range(0.1..3.0);
        let l = Liouvillian::build(&loss_example_generator(l0, &eps), 2, 4)?;
        let rho0 = NumberMixture::single(example_state(p)?);
        let ana = analytic_loss_example(p, l0, &eps, t)?;
        exact_err = exact_err.max(max_block_diff(&evolve_exact(&l, &rho0, t)?, &ana));
        rk4_err = rk4_err.max(max_block_diff(&evolve_rk4(&l, &rho0, t, None)?, &ana));
    }
    for _ in 0..10 {
        let p = r.random_range(0.0..1.0);
        let lam = [(); 4].map(|_| r.random_range(0.0..1.0));
        let eps = random_eps(&mut r);
        let t = r.random_range(0.1..3.0);
        let l = Liouvillian::build_on(&dephasing_example_generator(&lam, &eps), 2..=2, 4)?;
        let rho0 = NumberMixture::single(example_state(p)?);
        let ana = NumberMixture::single(analytic_dephasing_example(p, &lam, &eps, t)?);
        exact_err = exact_err.max(max_block_diff(&evolve_exact(&l, &rho0, t)?, &ana));
        rk4_err = rk4_err.max(max_block_diff(&evolve_rk4(&l, &rho0, t, None)?, &ana));
    }
    outcome(
        exact_err <= 1e-9 && rk4_err <= 1e-6,
        format!("max element error: exact {exact_err:.2e}, RK4(dt=t/1000) {rk4_err:.2e}"),
    )
}

fn criterion_4() -> Result<Outcome> {
    let mut r = rng(4);
    let (mut diag_worst, mut hop_least) = (0.0_f64, f64::INFINITY);
    for i in 0..20 {
        let (n, modes) = [(1, 3), (2, 2), (2, 3), (3, 2), (2, 4)][i % 5];
        let rho = random::density_matrix(n, modes, 3, &mut r);
        let eps: Vec<f64> = (0..modes).map(|_| r.random_range(-1.0..1.0)).collect();
        let lam: Vec<f64> = (0..modes).map(|_| r.random_range(0.05..1.0)).collect();
        let t = r.random_range(0.2..2.0);
        let gen = LindbladGenerator::diagonal(&eps).with_dephasing(&lam);
        diag_worst = diag_worst.max(check_decoherence_equality(&gen, &rho, t)?);
        let hop = gen.with_hamiltonian(hopping_between(1, 2, 1.0));
        hop_least = hop_least.min(check_decoherence_equality(&hop, &rho, t)?);
    }
    outcome(
        diag_worst <= 1e-9 && hop_least > 1e-3,
        format!("diagonal H: max deviation {diag_worst:.2e}; with hopping: min deviation {hop_least:.2e}"),
    )
}

/// Diagonal energies plus hopping inside each side: block-preserving.
fn local_hamiltonian(b: Bipartition, r: &mut ChaCha8Rng) -> LindbladGenerator {
    let modes = b.modes();
    let eps: Vec<f64> = (0..modes).map(|_| r.random_range(-1.0..1.0)).collect();
    let mut gen = LindbladGenerator::diagonal(&eps);
    for j in 1..modes {
        if b.in_a(j) == b.in_a(j + 1) {
            gen = gen.with_hamiltonian(hopping_between(j, j + 1, r.random_range(0.2..1.0)));
        }
    }
    gen
}

fn criterion_5() -> Result<Outcome> {
    let mut r = rng(5);
    let b = bip(2, 4);
    let (mut loss_margin, mut deph_margin) = (f64::INFINITY, f64::INFINITY);
    let mut min_neg = f64::INFINITY;
    for i in 0..20 {
        let mut gen = local_hamiltonian(b, &mut r);
        let rates: Vec<f64> = (0..4).map(|_| r.random_range(0.05..0.6)).collect();
        gen = gen.with_loss(&rates);
        if i % 2 == 0 {
            let pair = OperatorSpec::annihilation(1).mul(&OperatorSpec::annihilation(3));
            gen = gen.with_jump(r.random_range(0.1..0.6), pair);
        }
        let rho = non_block_diagonal_state(2, b, &mut r);
        let times = uniform_grid(10.0 / gen.max_rate(), 41);
        let tr = check_loss_bound(&gen, &rho, b, &times)?;
        loss_margin = loss_margin.min(tr.margin);
        min_neg = tr.lhs.iter().copied().fold(min_neg, f64::min);
    }
    for _ in 0..20 {
        let lam: Vec<f64> = (0..4).map(|_| r.random_range(0.05..0.6)).collect();
        let gen = local_hamiltonian(b, &mut r).with_dephasing(&lam);
        let rho = non_block_diagonal_state(2, b, &mut r);
        let times = uniform_grid(10.0 / gen.max_rate(), 41);
        let tr = check_dephasing_bound(&gen, &rho, b, &times)?;
        deph_margin = deph_margin.min(tr.margin);
        min_neg = tr.lhs.iter().copied().fold(min_neg, f64::min);
    }
    outcome(
        loss_margin >= -1e-9 && deph_margin >= -1e-9 && min_neg > 1e-12,
        format!(
            "min margin: loss {loss_margin:.2e}, dephasing {deph_margin:.2e}; min 𝒩(ρ_t) {min_neg:.2e} over 40 trajectories"
        ),
    )
}

fn criterion_6() -> Result<Outcome> {
    let mut r = rng(6);
    let modes = 3;
    let rates: Vec<f64> = (0..modes).map(|_| r.random_range(0.2..1.0)).collect();
    let lam_min = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let gen = LindbladGenerator::hopping(&[0.7, 0.4]).with_loss(&rates);
    let l = Liouvillian::build(&gen, 2, modes)?;
    let loss_kernel = stationary_states(&l).dimension();
    let rho0 = NumberMixture::single(random::density_matrix(2, modes, 3, &mut r));
    let late = evolve_exact(&l, &rho0, 50.0 / lam_min)?;
    let vacuum = NumberMixture::single(SectorDensityMatrix::maximally_mixed(0, modes));
    let loss_dist = late.trace_distance(&vacuum);

    let lam = [0.3, 0.5, 0.4, 0.6];
    let gen = LindbladGenerator::hopping(&[1.0, 0.8, 0.6]).with_dephasing(&lam);
    let l = Liouvillian::build_on(&gen, 2..=2, 4)?;
    let deph_kernel = stationary_states(&l).dimension();
    let rho0 = NumberMixture::single(random::density_matrix(2, 4, 2, &mut r));
    let late = evolve_exact(&l, &rho0, 50.0 / 0.3)?;
    let identity = NumberMixture::single(SectorDensityMatrix::maximally_mixed(2, 4));
    let deph_dist = late.trace_distance(&identity);
    outcome(
        loss_kernel == 1 && deph_kernel == 1 && loss_dist <= 1e-6 && deph_dist <= 1e-6,
        format!(
            "loss: dim ker L = {loss_kernel}, D(ρ_t, |0⟩⟨0|) = {loss_dist:.1e}; dephasing+hopping: dim ker L = {deph_kernel}, D(ρ_t, 1_N/d) = {deph_dist:.1e}"
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let rates = [0.5, 0.5];
    let mut worst: Vec<(usize, f64, f64, f64)> = Vec::new();
    let mut rel_ok = true;
    for n in [50, 200] {
        let spec = AsymptoticSpec::two_mode_flat(n, rates)?;
        let (lo, hi) = validity_window(&spec).expect("nonempty window");
        let mut w = (0.0_f64, 0.0_f64);
        for t in log_grid(lo, hi, 25) {
            let exact = largen_exact(&spec, &[0.0, 0.0], t)?;
            let approx = largen_asymptotic(&spec, t)?.value;
            let rel = (approx - exact).abs() / exact;
            if rel > w.0 {
                w = (rel, t);
            }
        }
        rel_ok &= w.0 <= 0.05;
        let t_ref = 0.01 / spec.s();
        let exact = largen_exact(&spec, &[0.0, 0.0], t_ref)?;
        let at_ref = (largen_asymptotic(&spec, t_ref)?.value - exact).abs() / exact;
        worst.push((n, w.0, w.1 * spec.s(), at_ref));
    }
    let spec500 = AsymptoticSpec::two_mode_flat(500, rates)?;
    let (lo, hi) = validity_window(&spec500).expect("nonempty window");
    let spec2 = AsymptoticSpec::two_mode_flat(2, rates)?;
    let grid2: Vec<f64> = (0..30).map(|i| 0.5 + 9.5 * i as f64 / 29.0).collect();
    let fits = decay_regime_scan(&[(spec500, log_grid(lo, hi, 30)), (spec2, grid2)])?;
    let slope = fits[0].algebraic.slope;
    let slope_ok = (slope + 0.5).abs() <= 0.05;
    let n2_ok = fits[1].preferred == DecayModel::Exponential;
    let rel_text: Vec<String> = worst
        .iter()
        .map(|(n, e, ts, r)| {
            format!(
                "N={n}: max rel err {:.1}% at tS={ts:.1e} ({:.1}% at tS=0.01)",
                e * 100.0,
                r * 100.0
            )
        })
        .collect();
    outcome(
        rel_ok && slope_ok && n2_ok,
        format!(
            "{}; N=500 exponent {slope:.3}; N=2 residuals exp {:.3} vs alg {:.3}",
            rel_text.join(", "),
            fits[1].exponential.residual,
            fits[1].algebraic.residual
        ),
    )
}

fn criterion_8() -> Result<Outcome> {
    let mut r = rng(8);
    let la = Liouvillian::build_on(&LindbladGenerator::hopping(&[1.0, 0.7]), 2..=2, 3)?;
    let lb = Liouvillian::build_on(&LindbladGenerator::default().with_dephasing(&[0.4, 0.6, 0.3]), 2..=2, 3)?;
    let full = la.sum(&lb)?;
    let rho0 = NumberMixture::single(random::density_matrix(2, 3, 2, &mut r));
    let t = 1.5;
    let exact = evolve_exact(&full, &rho0, t)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in [4usize, 8, 16, 32, 64] {
        let tr = evolve_trotter(&la, &lb, &rho0, t, n)?;
        xs.push((n as f64).ln());
        ys.push(tr.trace_distance(&exact).ln());
    }
    let fit = bosent_core::analysis::quadrature::fit_line(&xs, &ys).expect("five points");
    outcome(
        (fit.slope + 1.0).abs() <= 0.1,
        format!("log-log slope of trace-distance error vs n over n∈{{4..64}}: {:.3}", fit.slope),
    )
}

fn criterion_9() -> Result<Outcome> {
    let mut r = rng(9);
    let b = bip(2, 4);
    let tau = 1.0;
    let mut min_peak = f64::INFINITY;
    let mut max_local = 0.0_f64;
    for i in 0..10 {
        let k = i % 3;
        let rho = random::separable_pure_state(2, k, b, &mut r)?;
        let mix = NumberMixture::single(rho.clone());
        let cross = LindbladGenerator::diagonal(&[0.2, -0.1, 0.3, 0.5]).with_hamiltonian(hopping_between(2, 3, tau));
        let l = Liouvillian::build_on(&cross, 2..=2, 4)?;
        let states = l.propagator().evolve_grid(&mix, &uniform_grid(1.0 / tau, 21))?;
        let peak = states
            .iter()
            .map(|s| negativity_mixture(s, b))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        min_peak = min_peak.min(peak);

        let lam: Vec<f64> = (0..4).map(|_| r.random_range(0.05..0.8)).collect();
        let local = local_hamiltonian(b, &mut r).with_dephasing(&lam).with_loss(&lam);
        let l = Liouvillian::build(&local, 2, 4)?;
        let states = l.propagator().evolve_grid(&mix, &uniform_grid(10.0 / local.max_rate(), 21))?;
        for s in &states {
            max_local = max_local.max(negativity_mixture_oracle(s, b)?);
        }
    }
    outcome(
        min_peak > 1e-6 && max_local <= 1e-12,
        format!("cross hopping: min over states of max 𝒩 on t≤1/τ = {min_peak:.2e}; local generators: max 𝒩 = {max_local:.1e}"),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("formula–oracle equivalence", criterion_1),
        ("example separability thresholds", criterion_2),
        ("analytic vs numeric evolution", criterion_3),
        ("decoherence equality", criterion_4),
        ("loss and dephasing lower bounds", criterion_5),
        ("asymptotic and stationary states", criterion_6),
        ("large-N algebraic decay", criterion_7),
        ("Trotter convergence", criterion_8),
        ("tunneling and entanglement", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(o) if o.pass => ("PASS", o.detail),
            Ok(o) => ("FAIL", o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "[{tag}] criterion {}: {name}: {detail} ({:.2}s)",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
