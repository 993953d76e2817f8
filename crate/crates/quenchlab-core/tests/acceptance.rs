//! Acceptance gate: ten end-to-end checks, one test each, at their stated
//! tolerances. Every test prints a single `criterion NN: PASS — ...` line
//! with the measured margins (visible under `--nocapture`); a failed assert
//! marks the criterion red in the harness summary.

use quenchlab_core::dispersion::{
    equilibrium_eta, exponents, exponents_hyperbolic, DispersionProfile, PotentialSpec,
};
use quenchlab_core::finitesize::{mode_current, mode_density, thermo_gap_ladder, FiniteSetup};
use quenchlab_core::gology::{current_coefficient, gology_conductance, gology_dispersion};
use quenchlab_core::observables::{
    current, density, equilibrium_correlator, equilibrium_log_modulus, log_modulus_s,
    Chirality, QuenchSetup,
};
use quenchlab_core::steady::{conductance_universal, convergence_rate, steady_values};
use quenchlab_core::{GologySpec, QuadratureSpec, WallProfile};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

fn sech_setup(lambda: f64, lambda_prime: f64, delta: f64, mu: f64) -> QuenchSetup {
    QuenchSetup::new(
        PotentialSpec::sech(1.0, FRAC_PI_2),
        lambda,
        lambda_prime,
        1.0,
        WallProfile::infinite(delta, mu),
        QuadratureSpec::default(),
    )
    .unwrap()
}

/// The Fig. 3/4 parameter point: free initial state, strong attractive
/// evolution coupling, interaction range a = 0.0025ℓ, wall width 0.005ℓ.
fn fig3_setup() -> QuenchSetup {
    QuenchSetup::new(
        PotentialSpec::sech(0.0025, FRAC_PI_2),
        0.0,
        -0.96,
        1.0,
        WallProfile::infinite(0.005, 1.0),
        QuadratureSpec::default(),
    )
    .unwrap()
}

fn report(number: u8, name: &str, detail: &str) {
    println!("criterion {number:02} ({name}): PASS — {detail}");
}

fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

#[test]
fn criterion_01_universal_conductance() {
    let start = Instant::now();
    let couplings = [-0.9, -0.45, 0.0, 0.45, 0.9];
    let pairs: Vec<(f64, f64)> = couplings
        .iter()
        .flat_map(|&a| couplings.iter().map(move |&b| (a, b)))
        .collect();
    let devs: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(lambda, lambda_prime)| {
            let setup = sech_setup(lambda, lambda_prime, 0.05, 1.0);
            let g = conductance_universal(&setup).unwrap();
            let closed = (g - 1.0 / (2.0 * PI)).abs();
            let gap = steady_values(&setup).mu_plus_minus_gap;
            let i_t = current(&setup, 0.0, 100.0).unwrap();
            let quadrature = (i_t / gap - 1.0 / (2.0 * PI)).abs();
            (closed, quadrature)
        })
        .collect();
    let worst_closed = devs.iter().map(|d| d.0).fold(0.0, f64::max);
    let worst_quad = devs.iter().map(|d| d.1).fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst_closed <= 1e-14, "closed-form deviation {worst_closed:.3e}");
    assert!(worst_quad <= 1e-3, "quadrature deviation {worst_quad:.3e}");
    assert!(elapsed < 60.0, "took {elapsed:.1} s");
    report(
        1,
        "universal conductance",
        &format!(
            "5×5 grid: closed-form dev ≤ {worst_closed:.2e} (tol 1e-14), \
             |I(0,100)/gap − 1/2π| ≤ {worst_quad:.2e} (tol 1e-3), {elapsed:.1} s"
        ),
    );
}

#[test]
fn criterion_02_front_propagation_and_settled_values() {
    let setup = fig3_setup();
    let i_ref = 0.2 / (2.0 * PI);

    let mut worst_current = 0.0f64;
    let mut worst_density = 0.0f64;
    for &t in &[50.0, 100.0] {
        let i_t = current(&setup, 0.0, t).unwrap();
        worst_current = worst_current.max((i_t - i_ref).abs() / i_ref);
        worst_density = worst_density.max(density(&setup, 0.0, t).unwrap().abs());
    }
    assert!(worst_current <= 0.01, "current relative error {worst_current:.3e}");
    assert!(worst_density <= 1e-2, "density residual {worst_density:.3e}");

    // Density profile at t = 2: the front sits where the profile recovers
    // half the unrelaxed plateau μ/2π, and dispersive ripples run ahead.
    let n = 401;
    let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let rows: Vec<f64> = xs.par_iter().map(|&x| density(&setup, x, 2.0).unwrap()).collect();
    let plateau = setup.mu() / (2.0 * PI);
    let positive: Vec<(f64, f64)> = xs
        .iter()
        .zip(&rows)
        .filter(|(x, _)| **x >= 0.0)
        .map(|(x, r)| (*x, *r))
        .collect();
    let mut front = None;
    for window in positive.windows(5) {
        if window.iter().all(|(_, r)| r.abs() >= 0.5 * plateau) {
            front = Some(window[0].0);
            break;
        }
    }
    let front = front.expect("no front crossing found in [0, 1]");
    let target = 0.4;
    assert!(
        (front - target).abs() <= 0.15 * target,
        "front at {front} vs v^g(0)·t = {target} ± 15%"
    );

    let ahead: Vec<f64> =
        positive.iter().filter(|(x, _)| *x > front + 0.05).map(|(_, r)| *r).collect();
    let mut extrema = 0;
    for w in ahead.windows(3) {
        if (w[1] - w[0]).signum() != (w[2] - w[1]).signum() {
            extrema += 1;
        }
    }
    assert!(extrema >= 5, "only {extrema} extrema ahead of the front");
    report(
        2,
        "front propagation",
        &format!(
            "I(0,t≥50) within {worst_current:.2e} of 0.0318310 (tol 1e-2), \
             |R(0,t)| ≤ {worst_density:.1e}, front at {front:.3} (target 0.4 ± 15%), \
             {extrema} oscillation extrema ahead"
        ),
    );
}

#[test]
fn criterion_03_free_case_oracle_equivalence() {
    let start = Instant::now();
    let setup = sech_setup(0.0, 0.0, 0.1, 1.0);
    let n = 401;
    let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let ts = [0.0, 0.3, 0.7, 1.1, 1.9];
    let worst = ts
        .par_iter()
        .flat_map(|&t| xs.par_iter().map(move |&x| (x, t)))
        .map(|(x, t)| {
            let dr = (density(&setup, x, t).unwrap()
                - quenchlab_core::observables::density_free(&setup, x, t).unwrap())
            .abs();
            let di = (current(&setup, x, t).unwrap()
                - quenchlab_core::observables::current_free(&setup, x, t).unwrap())
            .abs();
            dr.max(di)
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst < 1e-8, "max abs error {worst:.3e}");
    assert!(elapsed < 30.0, "took {elapsed:.1} s");
    report(
        3,
        "free-case oracle",
        &format!("401×5 grid max |quadrature − closed| = {worst:.2e} (tol 1e-8), {elapsed:.1} s"),
    );
}

#[test]
fn criterion_04_exponent_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ec7);
    let potential = PotentialSpec::sech(1.0, FRAC_PI_2);
    let mut worst_split = 0.0f64;
    let mut worst_dual = 0.0f64;
    for _ in 0..1000 {
        let lambda = rng.gen_range(-0.95..0.95);
        let lambda_prime = rng.gen_range(-0.95..0.95);
        let p = rng.gen_range(-10.0..10.0);
        let init = DispersionProfile::new(potential.clone(), lambda, 1.0).unwrap();
        let evol = DispersionProfile::new(potential.clone(), lambda_prime, 1.0).unwrap();
        let (eta, gamma) = exponents(&init, &evol, p);
        worst_split = worst_split.max((eta - (equilibrium_eta(&init, p) + gamma)).abs());
        let (eta_h, gamma_h) = exponents_hyperbolic(&init, &evol, p);
        worst_dual = worst_dual.max((eta - eta_h).abs().max((gamma - gamma_h).abs()));
    }
    assert!(worst_split <= 1e-12, "η = η_λ + γ residual {worst_split:.3e}");
    assert!(worst_dual <= 1e-12, "K-form vs hyperbolic residual {worst_dual:.3e}");

    let mut worst_t0 = 0.0f64;
    let quadrature = QuadratureSpec::default();
    for &(lambda, lambda_prime) in &[(-0.5, -0.8), (0.6, -0.3), (-0.9, 0.4)] {
        let setup = sech_setup(lambda, lambda_prime, 0.2, 1.0);
        for &s in &[0.1, 1.0, 10.0] {
            let quench = log_modulus_s(&setup, s, 0.0).unwrap();
            let equilibrium =
                equilibrium_log_modulus(&setup.initial, s, &quadrature).unwrap();
            worst_t0 = worst_t0.max((quench - equilibrium).abs());
        }
    }
    assert!(worst_t0 <= 1e-9, "t = 0 reduction residual {worst_t0:.3e}");
    report(
        4,
        "exponent identities",
        &format!(
            "10³ samples: split ≤ {worst_split:.2e}, dual-route ≤ {worst_dual:.2e} \
             (tol 1e-12); t=0 reduction ≤ {worst_t0:.2e} (tol 1e-9)"
        ),
    );
}

#[test]
fn criterion_05_steady_correlator_is_shifted_equilibrium() {
    let setup = sech_setup(-0.5, -0.5, 0.2, 1.0);
    let k0 = setup.initial.luttinger_k(0.0);
    let v0 = setup.initial.velocity(0.0);
    let ve0 = setup.evolution.velocity(0.0);
    let slope_target = setup.mu() * k0 * ve0 / (2.0 * v0) / setup.v_f();

    let mut worst_log = 0.0f64;
    let mut worst_slope = 0.0f64;
    for &s in &[0.7, 3.0, 10.0] {
        let ness = quenchlab_core::steady::steady_correlator(&setup, Chirality::Plus, s).unwrap();
        let equilibrium = equilibrium_correlator(
            &setup.initial.potential,
            setup.lambda(),
            setup.v_f(),
            Chirality::Plus,
            s,
            ness.phase,
            &setup.quadrature,
        )
        .unwrap();
        let rel = ((ness.log_modulus_exponent - equilibrium.log_modulus_exponent)
            / equilibrium.log_modulus_exponent)
            .abs();
        worst_log = worst_log.max(rel);
        worst_slope = worst_slope.max((ness.phase_slope() - slope_target).abs());
    }
    assert!(worst_log <= 1e-9, "log-modulus relative gap {worst_log:.3e}");
    assert!(worst_slope <= 1e-12, "phase-slope gap {worst_slope:.3e}");
    report(
        5,
        "steady vs equilibrium correlator",
        &format!(
            "log-modulus rel ≤ {worst_log:.2e} (tol 1e-9), \
             slope −{slope_target:.6}·r·s/v_F matched to {worst_slope:.2e} (tol 1e-12)"
        ),
    );
}

#[test]
fn criterion_06_decay_bound_and_rate() {
    let setup = fig3_setup();
    let times = [10.0, 20.0, 50.0, 100.0];
    let fit = convergence_rate(&setup, 0.0, &times).unwrap();
    for &(t, dev) in &fit.samples {
        assert!(
            t * dev <= fit.bound_constant,
            "bound violated at t = {t}: t·|ΔI| = {} > C = {}",
            t * dev,
            fit.bound_constant
        );
    }
    let rate_line = if fit.converged {
        "settled below quadrature tolerance before t = 10 (rate fit not meaningful)".to_string()
    } else {
        assert!(
            (fit.slope + 1.0).abs() <= 0.3,
            "decay slope {} outside −1.0 ± 0.3",
            fit.slope
        );
        format!("log-log slope {:.3} within −1.0 ± 0.3", fit.slope)
    };
    report(
        6,
        "decay bound",
        &format!(
            "t·|I(0,t) − I_inf| ≤ C = {:.3e} at t ∈ {{10,20,50,100}} \
             (sup {:.3e}); {rate_line}",
            fit.bound_constant, fit.sup_t_deviation
        ),
    );
}

#[test]
fn criterion_07_continuity_equation_residual_is_second_order() {
    let setup = fig3_setup();
    let residual = |x: f64, t: f64, h: f64| -> f64 {
        let dt_r = (density(&setup, x, t + h).unwrap() - density(&setup, x, t - h).unwrap())
            / (2.0 * h);
        let dx_i = (current(&setup, x + h, t).unwrap() - current(&setup, x - h, t).unwrap())
            / (2.0 * h);
        dt_r + dx_i
    };
    let mut ratios = Vec::new();
    for &(x, t) in &[(0.1, 1.0), (0.3, 1.5), (0.05, 0.6)] {
        let coarse = residual(x, t, 0.004);
        let fine = residual(x, t, 0.002);
        let ratio = coarse / fine;
        assert!(
            (3.0..5.0).contains(&ratio),
            "residual ratio {ratio:.3} at ({x}, {t}) is not second order"
        );
        ratios.push(ratio);
    }
    report(
        7,
        "continuity equation",
        &format!(
            "central-difference residual drops by {:.2}/{:.2}/{:.2} when steps halve \
             (second order = 4)",
            ratios[0], ratios[1], ratios[2]
        ),
    );
}

#[test]
fn criterion_08_finite_size_convergence_and_revival() {
    // Wall width 6ℓ: wide enough that the periodization defect e^{−L/δ} is
    // the visible convergence scale on every ring. Thinner walls converge so
    // fast that the gap sits at the f64 rounding floor from L = 50 on.
    let base = sech_setup(0.0, -0.5, 6.0, 1.0);
    let rings = [25.0, 50.0, 100.0, 200.0];
    let n_max = 20_000;
    let ladder = thermo_gap_ladder(&base, &rings, n_max, 0.3, 0.5).unwrap();
    for pair in ladder.windows(2) {
        assert!(
            pair[1].gap_density < pair[0].gap_density,
            "density gap did not shrink from L = {} to L = {}",
            pair[0].l,
            pair[1].l
        );
        assert!(
            pair[1].gap_current < pair[0].gap_current,
            "current gap did not shrink from L = {} to L = {}",
            pair[0].l,
            pair[1].l
        );
    }
    let shrink = ladder[3].gap_density / ladder[0].gap_density;
    assert!(shrink < 0.2, "end-to-start gap ratio {shrink:.3e}");
    assert!(ladder.iter().all(|g| !g.recurrence_regime));

    // Linear evolution dispersion: the ring state revives exactly after one
    // wrap time L/v_F.
    let free_evolution = sech_setup(-0.5, 0.0, 6.0, 1.0);
    let fs = FiniteSetup::new(free_evolution, 25.0, 1100).unwrap();
    let (x, t) = (0.3, 0.5);
    let revival_r =
        (mode_density(&fs, x, t).unwrap() - mode_density(&fs, x, t + 25.0).unwrap()).abs();
    let revival_i =
        (mode_current(&fs, x, t).unwrap() - mode_current(&fs, x, t + 25.0).unwrap()).abs();
    assert!(revival_r <= 1e-10 && revival_i <= 1e-10);
    report(
        8,
        "finite-size convergence",
        &format!(
            "density gaps {:.2e} → {:.2e} → {:.2e} → {:.2e} over L ∈ {{25,50,100,200}} \
             (end/start {shrink:.1e} < 0.2); revival defect ≤ {:.1e} (tol 1e-10)",
            ladder[0].gap_density,
            ladder[1].gap_density,
            ladder[2].gap_density,
            ladder[3].gap_density,
            revival_r.max(revival_i)
        ),
    );
}

#[test]
fn criterion_09_two_coupling_generalization() {
    // Reduction: equal couplings and shared potential collapse to the
    // single-coupling dispersion.
    let mut worst_reduction = 0.0f64;
    for &lambda in &[-0.5, 0.7] {
        let pot = PotentialSpec::sech(1.0, FRAC_PI_2);
        let spec =
            GologySpec::new(lambda, lambda, pot.clone(), pot.clone(), 1.0, 0.5, -0.5, 50.0)
                .unwrap();
        let single = DispersionProfile::new(pot, lambda, 1.0).unwrap();
        for i in 0..50 {
            let p = -10.0 + 20.0 * i as f64 / 49.0;
            let (v, k) = gology_dispersion(&spec, p).unwrap();
            worst_reduction = worst_reduction
                .max((v - single.velocity(p)).abs())
                .max((k - single.luttinger_k(p)).abs());
        }
    }
    assert!(worst_reduction <= 1e-13, "reduction residual {worst_reduction:.3e}");

    let mut rng = ChaCha8Rng::seed_from_u64(0x90109);
    let mut worst_g = 0.0f64;
    let mut worst_kv = 0.0f64;
    for _ in 0..9 {
        let family = |which: u8, a: f64, c: f64| match which % 3 {
            0 => PotentialSpec::sech(a, c * FRAC_PI_2),
            1 => PotentialSpec::gaussian(a, c * FRAC_PI_2),
            _ => PotentialSpec::exp_decay(a, c * FRAC_PI_2),
        };
        let offset = rng.gen_range(0.05..2.0);
        let spec = GologySpec::new(
            rng.gen_range(-1.2..1.2),
            rng.gen_range(-0.5..1.5),
            family(rng.gen_range(0..3u8), rng.gen_range(0.3..3.0), rng.gen_range(0.2..1.0)),
            family(rng.gen_range(0..3u8), rng.gen_range(0.3..3.0), rng.gen_range(0.2..1.0)),
            1.0,
            offset,
            -offset,
            rng.gen_range(5.0..500.0),
        )
        .unwrap();
        let g = gology_conductance(&spec).unwrap().conductance;
        worst_g = worst_g.max((g - 1.0 / (2.0 * PI)).abs());
        for i in 0..7 {
            let p = -9.0 + 3.0 * i as f64;
            let product = current_coefficient(&spec, p).unwrap();
            let linear = spec.v_f * (1.0 + spec.g4_tilde(p) - spec.g2_tilde(p));
            worst_kv = worst_kv.max((product - linear).abs());
        }
    }
    assert!(worst_g <= 1e-14, "conductance deviation {worst_g:.3e}");
    assert!(worst_kv <= 1e-13, "Kv identity residual {worst_kv:.3e}");
    report(
        9,
        "g-ology",
        &format!(
            "reduction ≤ {worst_reduction:.2e} (tol 1e-13), conductance dev ≤ {worst_g:.2e} \
             across 9 random specs (tol 1e-14), Kv identity ≤ {worst_kv:.2e} (tol 1e-13)"
        ),
    );
}

#[test]
fn criterion_10_equilibrium_decay_exponent() {
    let quadrature = QuadratureSpec::default();
    let mut lines = Vec::new();
    for &(lambda, k_target) in &[(-0.75, 2.0), (-0.96, 5.0)] {
        let potential = PotentialSpec::sech(1.0, FRAC_PI_2);
        let profile = DispersionProfile::new(potential.clone(), lambda, 1.0).unwrap();
        assert!((profile.luttinger_k(0.0) - k_target).abs() < 1e-12);
        let eta0 = equilibrium_eta(&profile, 0.0);

        let n = 25;
        let (log_s, log_mod): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|i| {
                let s = 10.0 * (100.0f64).powf(i as f64 / (n - 1) as f64);
                let value = equilibrium_correlator(
                    &potential,
                    lambda,
                    1.0,
                    Chirality::Plus,
                    s,
                    0.0,
                    &quadrature,
                )
                .unwrap();
                (s.ln(), value.modulus().ln())
            })
            .unzip();
        let (slope, _) = fit_line(&log_s, &log_mod);
        let target = -(1.0 + eta0);
        let rel = ((slope - target) / target).abs();
        assert!(
            rel <= 0.02,
            "K = {k_target}: fitted decay {slope:.4} vs −(1+η₀) = {target:.4}"
        );
        lines.push(format!("K={k_target}: {slope:.4} vs {target:.4} ({:.2}%)", 100.0 * rel));
    }
    report(
        10,
        "equilibrium decay exponent",
        &format!("large-s modulus fits: {} (tol 2%)", lines.join("; ")),
    );
}
