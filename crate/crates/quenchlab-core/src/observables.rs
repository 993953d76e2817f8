//! Physical observables of the domain-wall quench: total density, current,
//! correlator phase and log-modulus, the assembled two-point function, and
//! the free and equilibrium closed forms they reduce to.
//!
//! Every momentum integral shares the weight a(p) = (K_λ/v_λ)(p)·w(p) built
//! from the initial-state dispersion and the wall kernel, and oscillates
//! with the evolution velocity v_λ'(p). Lengths, times, and energies are in
//! the units fixed by δ, v_F, and μ.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::dispersion::{
    equilibrium_eta, exponents, DispersionError, DispersionProfile, PotentialSpec,
};
use crate::field::{wall_antiderivative, wall_kernel, FieldError, WallMode, WallProfile};
use crate::quad::{
    oscillatory_halfline, pv_oscillatory, KernelSymmetry, OscillatoryKernel, QuadError,
    QuadratureSpec, Trig,
};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("closed form needs lambda = lambda' = 0, got lambda = {lambda}, lambda' = {lambda_prime}")]
    NotFreeCase { lambda: f64, lambda_prime: f64 },
    #[error("two-point function is singular at coincident points x = y = {x}")]
    CoincidentPoints { x: f64 },
    #[error("wall height must be nonnegative, got mu = {mu}")]
    NegativeWallHeight { mu: f64 },
    #[error("momentum integrals need a smooth wall (delta > 0)")]
    SharpWall,
    #[error("thermodynamic-limit observables take an infinite-volume wall; periodized walls feed the finite-size sums")]
    PeriodicWall,
}

/// Fermion branch r = ±: right movers `Plus`, left movers `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Plus => 1.0,
            Chirality::Minus => -1.0,
        }
    }
}

/// A validated quench: initial-state coupling λ, evolution coupling λ', the
/// wall field, and the quadrature tolerances every observable runs under.
/// The wall's height is the μ of the quench; `new` is the validated path.
#[derive(Debug, Clone)]
pub struct QuenchSetup {
    /// Dispersion at the initial-state coupling λ.
    pub initial: DispersionProfile,
    /// Dispersion at the evolution coupling λ'.
    pub evolution: DispersionProfile,
    pub wall: WallProfile,
    pub quadrature: QuadratureSpec,
}

impl QuenchSetup {
    pub fn new(
        potential: PotentialSpec,
        lambda: f64,
        lambda_prime: f64,
        v_f: f64,
        wall: WallProfile,
        quadrature: QuadratureSpec,
    ) -> Result<Self, ObservableError> {
        if wall.mu < 0.0 || wall.mu.is_nan() {
            return Err(ObservableError::NegativeWallHeight { mu: wall.mu });
        }
        if matches!(wall.mode, WallMode::Periodic { .. }) {
            return Err(ObservableError::PeriodicWall);
        }
        let initial = DispersionProfile::new(potential.clone(), lambda, v_f)?;
        let evolution = DispersionProfile::new(potential, lambda_prime, v_f)?;
        Ok(Self { initial, evolution, wall, quadrature })
    }

    pub fn lambda(&self) -> f64 {
        self.initial.lambda
    }

    pub fn lambda_prime(&self) -> f64 {
        self.evolution.lambda
    }

    /// Wall height μ; linear prefactor of density, current, and phase.
    pub fn mu(&self) -> f64 {
        self.wall.mu
    }

    pub fn v_f(&self) -> f64 {
        self.initial.v_f
    }

    /// The even weight a(p) = (K_λ/v_λ)(p)·w(p) shared by every kernel.
    fn weight(&self, p: f64) -> f64 {
        self.initial.k_over_v(p) * wall_kernel(&self.wall, p)
    }

    /// Panel-sizing scale: the tighter of the potential's momentum scale
    /// and the wall kernel's decay scale 2/(πδ).
    fn momentum_scale(&self) -> f64 {
        let pot = self.initial.potential.momentum_scale();
        pot.min(2.0 / (PI * self.wall.delta))
    }

    fn require_smooth_wall(&self) -> Result<(), ObservableError> {
        if self.wall.delta > 0.0 {
            Ok(())
        } else {
            Err(ObservableError::SharpWall)
        }
    }

    fn require_free(&self) -> Result<(), ObservableError> {
        if self.lambda() == 0.0 && self.lambda_prime() == 0.0 {
            Ok(())
        } else {
            Err(ObservableError::NotFreeCase {
                lambda: self.lambda(),
                lambda_prime: self.lambda_prime(),
            })
        }
    }
}

/// sin(z)/z continued through z = 0.
fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sin() / z
    }
}

/// cos(z) − 1 = −2sin²(z/2); the direct subtraction cancels at small z.
fn cos_m1(z: f64) -> f64 {
    let h = (0.5 * z).sin();
    -2.0 * h * h
}

/// Total density R(x,t) = −(μ/π²)∫₀^∞ a(p)·cos(p·v_λ'(p)·t)·sin(px)/p dp,
/// the odd channel of the folded principal value. Odd in x; zero at λ=λ'=0
/// once both wall fronts have passed.
pub fn density(setup: &QuenchSetup, x: f64, t: f64) -> Result<f64, ObservableError> {
    setup.require_smooth_wall()?;
    let amplitude = |p: f64| setup.weight(p) * (p * x).sin();
    let velocity = |p: f64| setup.evolution.velocity(p);
    let group = |p: f64| setup.evolution.group_velocity(p);
    let kernel = OscillatoryKernel::new(&amplitude, &velocity, &group, t)
        .with_symmetry(KernelSymmetry::Odd)
        .with_amplitude_scale(setup.momentum_scale())
        .with_amplitude_frequency(x.abs());
    let f = pv_oscillatory(&kernel, &setup.quadrature)?;
    Ok(-(setup.mu() / PI) * f.re)
}

/// Current I(x,t) = (μ/π²)∫₀^∞ a(p)·v_λ'(p)·cos(px)·sin(p·v_λ'(p)·t)/p dp,
/// the even channel of the folded principal value. Even in x; identically
/// zero at t = 0.
pub fn current(setup: &QuenchSetup, x: f64, t: f64) -> Result<f64, ObservableError> {
    setup.require_smooth_wall()?;
    let amplitude = |p: f64| setup.weight(p) * setup.evolution.velocity(p) * (p * x).cos();
    let velocity = |p: f64| setup.evolution.velocity(p);
    let group = |p: f64| setup.evolution.group_velocity(p);
    let kernel = OscillatoryKernel::new(&amplitude, &velocity, &group, t)
        .with_symmetry(KernelSymmetry::Even)
        .with_amplitude_scale(setup.momentum_scale())
        .with_amplitude_frequency(x.abs());
    let f = pv_oscillatory(&kernel, &setup.quadrature)?;
    Ok(setup.mu() / PI * f.im)
}

/// Free-fermion density (μ/2πv_F)(W(x−v_Ft) + W(x+v_Ft)): two counter-
/// propagating copies of the wall, no quadrature.
pub fn density_free(setup: &QuenchSetup, x: f64, t: f64) -> Result<f64, ObservableError> {
    setup.require_free()?;
    let v = setup.v_f();
    let left = wall_position(setup, x - v * t)?;
    let right = wall_position(setup, x + v * t)?;
    Ok(setup.mu() / (2.0 * PI * v) * (left + right))
}

/// Free-fermion current (μ/2π)(W(x−v_Ft) − W(x+v_Ft)); tends to μ/2π at
/// fixed x as both fronts pass.
pub fn current_free(setup: &QuenchSetup, x: f64, t: f64) -> Result<f64, ObservableError> {
    setup.require_free()?;
    let v = setup.v_f();
    let left = wall_position(setup, x - v * t)?;
    let right = wall_position(setup, x + v * t)?;
    Ok(setup.mu() / (2.0 * PI) * (left - right))
}

fn wall_position(setup: &QuenchSetup, x: f64) -> Result<f64, ObservableError> {
    Ok(crate::field::wall_position(&setup.wall, x)?)
}

/// Correlator phase level A_r(x,y,t) = (μ/π)(T1 + r·IA), the energy in the
/// factor e^{−irA(x−y)/v_F}. T1 carries v_F·cos(p·v_λ'·t) against the even
/// difference kernel, IA carries v_λ'·sin(p·v_λ'·t) against the odd one;
/// both difference kernels are evaluated in product form, so no small-p
/// cancellation occurs. Real by construction.
pub fn phase_a(
    setup: &QuenchSetup,
    r: Chirality,
    x: f64,
    y: f64,
    t: f64,
) -> Result<f64, ObservableError> {
    setup.require_smooth_wall()?;
    if x == y {
        return Err(ObservableError::CoincidentPoints { x });
    }
    if setup.mu() == 0.0 {
        return Ok(0.0);
    }
    let half_sum = 0.5 * (x + y);
    let half_diff = 0.5 * (x - y);
    let freq = x.abs().max(y.abs());
    let scale = setup.momentum_scale();
    let velocity = |p: f64| setup.evolution.velocity(p);
    let group = |p: f64| setup.evolution.group_velocity(p);

    // (cos px − cos py)/(p²(x−y)) = −(x+y)/2·sinc(p(x+y)/2)·sinc(p(x−y)/2).
    let t1_amp = |p: f64| {
        -setup.weight(p) * setup.v_f() * half_sum * sinc(p * half_sum) * sinc(p * half_diff)
    };
    let t1_kernel = OscillatoryKernel::new(&t1_amp, &velocity, &group, t)
        .with_amplitude_scale(scale)
        .with_amplitude_frequency(freq);
    let t1 = oscillatory_halfline(&t1_kernel, Trig::Cos, &setup.quadrature)?;

    // (sin px − sin py)/(p(x−y)) = cos(p(x+y)/2)·sinc(p(x−y)/2); the 1/p
    // pole this kernel keeps is the principal-value sine channel.
    let ia_amp = |p: f64| {
        setup.weight(p)
            * setup.evolution.velocity(p)
            * (p * half_sum).cos()
            * sinc(p * half_diff)
    };
    let ia_kernel = OscillatoryKernel::new(&ia_amp, &velocity, &group, t)
        .with_symmetry(KernelSymmetry::Even)
        .with_amplitude_scale(scale)
        .with_amplitude_frequency(freq);
    let ia = PI * pv_oscillatory(&ia_kernel, &setup.quadrature)?.im;

    Ok(setup.mu() / PI * (t1 + r.sign() * ia))
}

/// Log-modulus exponent E(s,t) = ∫₀^∞ [η(p) − γ(p)cos(2p·v_λ'(p)·t)]·
/// (cos(ps) − 1)/p dp of the zero-field correlator S_r = pole·e^E. The
/// static η term and the oscillatory γ term are integrated separately; at
/// t = 0 the weight collapses to the equilibrium η_λ through η − γ = η_λ.
pub fn log_modulus_s(setup: &QuenchSetup, s: f64, t: f64) -> Result<f64, ObservableError> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let scale = setup.initial.potential.momentum_scale();
    let eta_amp = |p: f64| {
        if p == 0.0 {
            return 0.0;
        }
        let (eta, _) = exponents(&setup.initial, &setup.evolution, p);
        eta * cos_m1(p * s) / p
    };
    let unit = |_: f64| 1.0;
    let eta_kernel = OscillatoryKernel::new(&eta_amp, &unit, &unit, 0.0)
        .with_amplitude_scale(scale)
        .with_amplitude_frequency(s.abs());
    let static_part = oscillatory_halfline(&eta_kernel, Trig::Cos, &setup.quadrature)?;

    let gamma_amp = |p: f64| {
        if p == 0.0 {
            return 0.0;
        }
        let (_, gamma) = exponents(&setup.initial, &setup.evolution, p);
        gamma * cos_m1(p * s) / p
    };
    let velocity = |p: f64| 2.0 * setup.evolution.velocity(p);
    let group = |p: f64| 2.0 * setup.evolution.group_velocity(p);
    let gamma_kernel = OscillatoryKernel::new(&gamma_amp, &velocity, &group, t)
        .with_amplitude_scale(scale)
        .with_amplitude_frequency(s.abs());
    let oscillatory_part = oscillatory_halfline(&gamma_kernel, Trig::Cos, &setup.quadrature)?;

    Ok(static_part - oscillatory_part)
}

/// Equilibrium exponent ∫₀^∞ η_λ(p)(cos(ps) − 1)/p dp; decays like
/// −(η_λ(0))·ln|s| at large separation.
pub fn equilibrium_log_modulus(
    profile: &DispersionProfile,
    s: f64,
    quadrature: &QuadratureSpec,
) -> Result<f64, ObservableError> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let amp = |p: f64| {
        if p == 0.0 {
            return 0.0;
        }
        equilibrium_eta(profile, p) * cos_m1(p * s) / p
    };
    let unit = |_: f64| 1.0;
    let kernel = OscillatoryKernel::new(&amp, &unit, &unit, 0.0)
        .with_amplitude_scale(profile.potential.momentum_scale())
        .with_amplitude_frequency(s.abs());
    Ok(oscillatory_halfline(&kernel, Trig::Cos, quadrature)?)
}

/// One equal-time two-point value, factored. The distributional pole
/// i/(2πr(x−y) + i0⁺) stays symbolic as (chirality, separation); the phase
/// level A and modulus exponent are the regular factors. `assembled`
/// combines them only at an explicit regulator ε.
#[derive(Debug, Clone, Copy)]
pub struct CorrelatorValue {
    pub chirality: Chirality,
    /// Separation x − y carried by the pole and the phase factor.
    pub separation: f64,
    /// Phase level A (energy): the factor is e^{−irA(x−y)/v_F}.
    pub phase: f64,
    /// ln of the modulus factor beyond the pole: S = e^{exponent}·pole.
    pub log_modulus_exponent: f64,
    /// Fermi velocity the phase convention divides by.
    pub v_f: f64,
}

impl CorrelatorValue {
    /// Pole factor i/(2πr(x−y) + iε) at a caller-chosen regulator ε > 0.
    pub fn pole(&self, epsilon: f64) -> Complex64 {
        assert!(epsilon > 0.0, "pole regulator must be positive");
        Complex64::i()
            / Complex64::new(2.0 * PI * self.chirality.sign() * self.separation, epsilon)
    }

    /// Full complex value pole(ε)·e^{−irA(x−y)/v_F}·e^{E}.
    pub fn assembled(&self, epsilon: f64) -> Complex64 {
        let arg = -self.chirality.sign() * self.phase * self.separation / self.v_f;
        self.pole(epsilon) * Complex64::from_polar(self.log_modulus_exponent.exp(), arg)
    }

    /// Modulus with the ε → 0⁺ pole: e^{E}/(2π|x−y|).
    pub fn modulus(&self) -> f64 {
        self.log_modulus_exponent.exp() / (2.0 * PI * self.separation.abs())
    }

    /// Wavenumber A/v_F of the phase factor (the argument is −r·(A/v_F)·(x−y)).
    pub fn phase_slope(&self) -> f64 {
        self.phase / self.v_f
    }
}

/// Two-point function ⟨ψ⁺_r(x)ψ⁻_r(y)⟩ at time t, factored into pole,
/// phase, and modulus.
pub fn correlator(
    setup: &QuenchSetup,
    r: Chirality,
    x: f64,
    y: f64,
    t: f64,
) -> Result<CorrelatorValue, ObservableError> {
    if x == y {
        return Err(ObservableError::CoincidentPoints { x });
    }
    let phase = phase_a(setup, r, x, y, t)?;
    let log_modulus_exponent = log_modulus_s(setup, x - y, t)?;
    Ok(CorrelatorValue {
        chirality: r,
        separation: x - y,
        phase,
        log_modulus_exponent,
        v_f: setup.v_f(),
    })
}

/// Free two-point function: pole × exp(−irμ/v_F·∫_{y−rv_Ft}^{x−rv_Ft}W dz),
/// with the W-integral in log-cosh closed form. The phase level tends to
/// rμ/2 once both endpoints ride outside the wall.
pub fn free_correlator(
    setup: &QuenchSetup,
    r: Chirality,
    x: f64,
    y: f64,
    t: f64,
) -> Result<CorrelatorValue, ObservableError> {
    setup.require_free()?;
    if x == y {
        return Err(ObservableError::CoincidentPoints { x });
    }
    let shift = r.sign() * setup.v_f() * t;
    let integral = wall_antiderivative(&setup.wall, x - shift)?
        - wall_antiderivative(&setup.wall, y - shift)?;
    Ok(CorrelatorValue {
        chirality: r,
        separation: x - y,
        phase: setup.mu() * integral / (x - y),
        log_modulus_exponent: 0.0,
        v_f: setup.v_f(),
    })
}

/// Equal-coupling ground-state two-point function at separation s: pole ×
/// e^{∫η_λ(cos ps−1)/p dp}, with an optional constant phase level (the
/// effective chemical potential μ_r − μ₀; 0 recovers the zero-field form).
pub fn equilibrium_correlator(
    potential: &PotentialSpec,
    lambda: f64,
    v_f: f64,
    r: Chirality,
    s: f64,
    phase: f64,
    quadrature: &QuadratureSpec,
) -> Result<CorrelatorValue, ObservableError> {
    if s == 0.0 {
        return Err(ObservableError::CoincidentPoints { x: 0.0 });
    }
    let profile = DispersionProfile::new(potential.clone(), lambda, v_f)?;
    let log_modulus_exponent = equilibrium_log_modulus(&profile, s, quadrature)?;
    Ok(CorrelatorValue { chirality: r, separation: s, phase, log_modulus_exponent, v_f })
}

/// Which field a bulk sweep evaluates.
#[derive(Debug, Clone, Copy)]
pub enum GridObservable {
    Density,
    Current,
    /// Correlator at fixed y against the sweeping x; rows carry the whole
    /// factored value.
    CorrelatorSlice { r: Chirality, y: f64 },
}

#[derive(Debug, Clone, Copy)]
pub enum GridValue {
    Scalar(f64),
    Correlator(CorrelatorValue),
}

/// One sweep row; quadrature failures stay in the row instead of aborting
/// the sweep.
#[derive(Debug)]
pub struct GridRow {
    pub x: f64,
    pub t: f64,
    pub value: Result<GridValue, ObservableError>,
}

/// Evaluate one observable over the (t, x) product grid, t-major. Points
/// fan out across workers; each is a pure function of (setup, x, t), so the
/// table is identical for every worker count.
pub fn grid_evaluate(
    setup: &QuenchSetup,
    x_grid: &[f64],
    t_list: &[f64],
    which: GridObservable,
) -> Vec<GridRow> {
    let points: Vec<(f64, f64)> = t_list
        .iter()
        .flat_map(|&t| x_grid.iter().map(move |&x| (x, t)))
        .collect();
    points
        .into_par_iter()
        .map(|(x, t)| GridRow { x, t, value: grid_point(setup, x, t, which) })
        .collect()
}

fn grid_point(
    setup: &QuenchSetup,
    x: f64,
    t: f64,
    which: GridObservable,
) -> Result<GridValue, ObservableError> {
    match which {
        GridObservable::Density => density(setup, x, t).map(GridValue::Scalar),
        GridObservable::Current => current(setup, x, t).map(GridValue::Scalar),
        GridObservable::CorrelatorSlice { r, y } => {
            correlator(setup, r, x, y, t).map(GridValue::Correlator)
        }
    }
}
