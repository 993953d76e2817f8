//! Property tests for the closed-form identities: every invariant here is
//! algebraic (no quadrature), so it can be hammered over random inputs.

use proptest::prelude::*;
use quenchlab_core::dispersion::{
    equilibrium_eta, exponents, exponents_hyperbolic, u_coefficients, DispersionProfile,
    PotentialSpec,
};
use quenchlab_core::field::{wall_kernel, wall_position};
use quenchlab_core::gology::{current_coefficient, gology_conductance, gology_dispersion};
use quenchlab_core::observables::QuenchSetup;
use quenchlab_core::steady::{conductance_bare, steady_values};
use quenchlab_core::{GologySpec, QuadratureSpec, WallProfile};
use std::f64::consts::PI;

/// One of the analytic families at momentum scale `a`, with a prefactor
/// scaled off πv_F/2 so that λ ∈ (−0.95, 0.95) is always stable.
fn potential(family: u8, a: f64, strength: f64, v_f: f64) -> PotentialSpec {
    let prefactor = strength * PI * v_f / 2.0;
    match family % 3 {
        0 => PotentialSpec::sech(a, prefactor),
        1 => PotentialSpec::gaussian(a, prefactor),
        _ => PotentialSpec::exp_decay(a, prefactor),
    }
}

fn profile(family: u8, a: f64, strength: f64, lambda: f64, v_f: f64) -> DispersionProfile {
    DispersionProfile::new(potential(family, a, strength, v_f), lambda, v_f)
        .expect("couplings are restricted to the stable range")
}

prop_compose! {
    fn coupling()(lambda in -0.9f64..0.9) -> f64 { lambda }
}

prop_compose! {
    fn shape()(family in 0u8..3, a in 0.3f64..3.0, strength in 0.2f64..1.0) -> (u8, f64, f64) {
        (family, a, strength)
    }
}

proptest! {
    /// K_λ(p)·v_λ(p) = v_F: the renormalizations are exact inverses.
    #[test]
    fn luttinger_parameter_times_velocity_is_fermi_velocity(
        (family, a, strength) in shape(),
        lambda in coupling(),
        v_f in 0.5f64..3.0,
        p in -20.0f64..20.0,
    ) {
        let d = profile(family, a, strength, lambda, v_f);
        let product = d.luttinger_k(p) * d.velocity(p);
        prop_assert!((product - v_f).abs() <= 1e-13 * v_f);
    }

    /// η_{λ,λ'} = η_λ + γ_{λ,λ'} pointwise in p.
    #[test]
    fn quench_exponent_splits_into_equilibrium_plus_transient(
        (family, a, strength) in shape(),
        lambda in coupling(),
        lambda_prime in coupling(),
        p in -10.0f64..10.0,
    ) {
        let init = profile(family, a, strength, lambda, 1.0);
        let evol = profile(family, a, strength, lambda_prime, 1.0);
        let (eta, gamma) = exponents(&init, &evol, p);
        let eta_eq = equilibrium_eta(&init, p);
        prop_assert!((eta - (eta_eq + gamma)).abs() <= 1e-12);
    }

    /// The K-form and the hyperbolic-angle form of (η, γ) are the same
    /// function computed two ways.
    #[test]
    fn exponent_routes_agree(
        (family, a, strength) in shape(),
        lambda in coupling(),
        lambda_prime in coupling(),
        p in -10.0f64..10.0,
    ) {
        let init = profile(family, a, strength, lambda, 1.0);
        let evol = profile(family, a, strength, lambda_prime, 1.0);
        let (eta_k, gamma_k) = exponents(&init, &evol, p);
        let (eta_h, gamma_h) = exponents_hyperbolic(&init, &evol, p);
        prop_assert!((eta_k - eta_h).abs() <= 1e-12);
        prop_assert!((gamma_k - gamma_h).abs() <= 1e-12);
    }

    /// u_pp² + u_mm² − u_pm² − u_mp² = 1 (Bogoliubov normalization).
    #[test]
    fn mixing_coefficients_are_normalized(
        (family, a, strength) in shape(),
        lambda in coupling(),
        lambda_prime in coupling(),
        p in -10.0f64..10.0,
    ) {
        let init = profile(family, a, strength, lambda, 1.0);
        let evol = profile(family, a, strength, lambda_prime, 1.0);
        prop_assert!(u_coefficients(&init, &evol, p).hyperbolic_defect().abs() <= 1e-12);
    }

    /// Every dispersion output is even in p.
    #[test]
    fn dispersion_is_even_in_momentum(
        (family, a, strength) in shape(),
        lambda in coupling(),
        p in 0.0f64..20.0,
    ) {
        let d = profile(family, a, strength, lambda, 1.0);
        prop_assert_eq!(d.velocity(p), d.velocity(-p));
        prop_assert_eq!(d.luttinger_k(p), d.luttinger_k(-p));
        prop_assert_eq!(d.group_velocity(p), d.group_velocity(-p));
        prop_assert_eq!(d.angle(p), d.angle(-p));
    }

    /// Group velocity stays positive everywhere in the stable range.
    #[test]
    fn group_velocity_is_positive(
        (family, a, strength) in shape(),
        lambda in coupling(),
        p in -40.0f64..40.0,
    ) {
        let d = profile(family, a, strength, lambda, 1.0);
        prop_assert!(d.group_velocity(p) > 0.0);
    }

    /// The universal conductance is 1/2π for every stable coupling pair,
    /// and the steady phase levels are the symmetric split of the gap.
    #[test]
    fn universal_conductance_and_symmetric_gap(
        (family, a, strength) in shape(),
        lambda in coupling(),
        lambda_prime in coupling(),
        mu in 0.1f64..3.0,
        v_f in 0.5f64..2.0,
    ) {
        let setup = QuenchSetup::new(
            potential(family, a, strength, v_f),
            lambda,
            lambda_prime,
            v_f,
            WallProfile::infinite(0.1, mu),
            QuadratureSpec::default(),
        ).unwrap();
        let state = steady_values(&setup);
        prop_assert!((state.g_universal - 1.0 / (2.0 * PI)).abs() <= 1e-14);
        prop_assert!((state.a_plus + state.a_minus).abs() <= 1e-14 * state.a_plus.abs());
        prop_assert!(
            (state.mu_plus_minus_gap - 2.0 * state.a_plus).abs()
                <= 1e-14 * state.mu_plus_minus_gap.abs()
        );
    }

    /// The bare conductance sees only the p = 0 dispersion values: two
    /// different potential shapes with the same zero-momentum strength give
    /// the same number.
    #[test]
    fn bare_conductance_depends_only_on_zero_momentum(
        lambda in coupling(),
        lambda_prime in coupling(),
        a1 in 0.3f64..3.0,
        a2 in 0.3f64..3.0,
        strength in 0.2f64..1.0,
    ) {
        let make = |spec: PotentialSpec| {
            QuenchSetup::new(
                spec,
                lambda,
                lambda_prime,
                1.0,
                WallProfile::infinite(0.1, 1.0),
                QuadratureSpec::default(),
            ).unwrap()
        };
        let sech = make(PotentialSpec::sech(a1, strength * PI / 2.0));
        let gauss = make(PotentialSpec::gaussian(a2, strength * PI / 2.0));
        let g1 = conductance_bare(&sech).unwrap();
        let g2 = conductance_bare(&gauss).unwrap();
        prop_assert!((g1 - g2).abs() <= 1e-14 * g1.abs());
    }

    /// g₂ = g₄ = λ with a shared potential collapses the two-coupling
    /// dispersion onto the single-coupling one.
    #[test]
    fn two_coupling_dispersion_reduces_at_equal_couplings(
        (family, a, strength) in shape(),
        lambda in coupling(),
        p in -10.0f64..10.0,
    ) {
        let pot = potential(family, a, strength, 1.0);
        let spec = GologySpec::new(lambda, lambda, pot.clone(), pot.clone(), 1.0, 0.5, -0.5, 50.0)
            .unwrap();
        let single = DispersionProfile::new(pot, lambda, 1.0).unwrap();
        let (v, k) = gology_dispersion(&spec, p).unwrap();
        prop_assert!((v - single.velocity(p)).abs() <= 1e-13);
        prop_assert!((k - single.luttinger_k(p)).abs() <= 1e-13);
    }

    /// K(p)·v(p) = v_F(1 + g̃₄ − g̃₂): the product route and the linear form
    /// agree without either substituting for the other.
    #[test]
    fn two_coupling_product_identity(
        g2 in -1.2f64..1.2,
        g4 in -0.5f64..1.5,
        a2 in 0.3f64..3.0,
        a4 in 0.3f64..3.0,
        c2 in 0.2f64..1.0,
        c4 in 0.2f64..1.0,
        v_f in 0.5f64..2.0,
        p in -10.0f64..10.0,
    ) {
        let spec = GologySpec::new(
            g2,
            g4,
            PotentialSpec::gaussian(a2, c2 * PI * v_f / 2.0),
            PotentialSpec::sech(a4, c4 * PI * v_f / 2.0),
            v_f,
            0.5,
            -0.5,
            50.0,
        ).unwrap();
        let product = current_coefficient(&spec, p).unwrap();
        let linear = v_f * (1.0 + spec.g4_tilde(p) - spec.g2_tilde(p));
        prop_assert!((product - linear).abs() <= 1e-13 * linear.abs());
    }

    /// gology conductance is 1/2π whatever the couplings, shapes, offsets,
    /// and ring size.
    #[test]
    fn two_coupling_conductance_is_universal(
        g2 in -1.2f64..1.2,
        g4 in -0.5f64..1.5,
        a2 in 0.3f64..3.0,
        a4 in 0.3f64..3.0,
        c2 in 0.2f64..1.0,
        c4 in 0.2f64..1.0,
        offset in 0.05f64..2.0,
        l in 5.0f64..500.0,
    ) {
        let spec = GologySpec::new(
            g2,
            g4,
            PotentialSpec::sech(a2, c2 * PI / 2.0),
            PotentialSpec::gaussian(a4, c4 * PI / 2.0),
            1.0,
            offset,
            -offset,
            l,
        ).unwrap();
        let report = gology_conductance(&spec).unwrap();
        prop_assert!((report.conductance - 1.0 / (2.0 * PI)).abs() <= 1e-14);
    }

    /// Wall shape: odd, bounded by 1/2, zero at the origin, and independent
    /// of the height μ; the Fourier-side kernel lives in (0, 1].
    #[test]
    fn wall_shape_properties(
        delta in 0.01f64..5.0,
        mu1 in 0.1f64..3.0,
        mu2 in 0.1f64..3.0,
        x in -50.0f64..50.0,
        p in -100.0f64..100.0,
    ) {
        let wall = WallProfile::infinite(delta, mu1);
        let w = wall_position(&wall, x).unwrap();
        let w_neg = wall_position(&wall, -x).unwrap();
        prop_assert!((w + w_neg).abs() <= 1e-15);
        prop_assert!(w.abs() <= 0.5);
        prop_assert_eq!(wall_position(&wall, 0.0).unwrap(), 0.0);

        let other_height = WallProfile::infinite(delta, mu2);
        prop_assert_eq!(w, wall_position(&other_height, x).unwrap());
        let kernel = wall_kernel(&wall, p);
        prop_assert_eq!(kernel, wall_kernel(&other_height, p));
        prop_assert!(kernel > 0.0 && kernel <= 1.0);
    }
}
