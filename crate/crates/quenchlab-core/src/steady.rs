//! Steady-state limits of the quench: the t → ∞ density, current, and phase
//! levels, the universal and bare conductances, the translation-invariant
//! correlator, and empirical decay fits toward those limits.
//!
//! Every limit is a closed form in the p = 0 dispersion data K_λ(0), v_λ(0),
//! v_λ'(0); quadrature appears only in the correlator exponent and in the
//! decay fits.

use thiserror::Error;

use crate::dispersion::exponents;
use crate::observables::{
    current, Chirality, CorrelatorValue, ObservableError, QuenchSetup,
};
use crate::quad::{
    decay_constant, oscillatory_halfline, KernelSymmetry, OscillatoryKernel, Trig,
};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum SteadyError {
    #[error("wall height mu = 0 leaves the conductance ratio undefined")]
    ZeroWallHeight,
    #[error("decay fit needs at least 4 times, got {got}")]
    TooFewTimes { got: usize },
    #[error("decay-fit times must be strictly increasing at index {index}")]
    NonIncreasingTimes { index: usize },
    #[error("t = {t} has not cleared the front-passage time {front} at x = {x}")]
    BeforeFront { t: f64, front: f64, x: f64 },
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

/// The t → ∞ limits. The density limit is identically zero; the current and
/// phase limits are the p = 0 closed forms; the conductances are their
/// ratios. At μ = 0 both ratios are 0/0: they are reported as NaN with
/// `conductance_defined` lowered.
#[derive(Debug, Clone, Copy)]
pub struct SteadyState {
    /// lim R(x,t) = 0 for every x.
    pub r_inf: f64,
    /// lim I(x,t) = μK_λ(0)v_λ'(0)/(2πv_λ(0)).
    pub i_inf: f64,
    /// lim A_+ = μK_λ(0)v_λ'(0)/(2v_λ(0)).
    pub a_plus: f64,
    /// lim A_− = −A_+.
    pub a_minus: f64,
    /// Effective chemical-potential split μ₊ − μ₋ = 2A_+.
    pub mu_plus_minus_gap: f64,
    /// I_inf/(μ₊ − μ₋); algebraically 1/2π for every stable setup.
    pub g_universal: f64,
    /// I_inf/μ = K_λ(0)v_λ'(0)/(2πv_λ(0)).
    pub g_bare: f64,
    /// False exactly when μ = 0 and the conductance ratios are 0/0.
    pub conductance_defined: bool,
}

/// Closed-form steady values at p = 0; no quadrature.
pub fn steady_values(setup: &QuenchSetup) -> SteadyState {
    let mu = setup.mu();
    let k0 = setup.initial.luttinger_k(0.0);
    let v0 = setup.initial.velocity(0.0);
    let ve0 = setup.evolution.velocity(0.0);
    let a_plus = 0.5 * mu * k0 * ve0 / v0;
    let i_inf = a_plus / PI;
    let gap = 2.0 * a_plus;
    let defined = mu > 0.0;
    SteadyState {
        r_inf: 0.0,
        i_inf,
        a_plus,
        a_minus: -a_plus,
        mu_plus_minus_gap: gap,
        g_universal: if defined { i_inf / gap } else { f64::NAN },
        g_bare: if defined { i_inf / mu } else { f64::NAN },
        conductance_defined: defined,
    }
}

/// G = I_inf/(μ₊ − μ₋), the ratio of the two closed forms. The dispersion
/// factors cancel algebraically, so the result is 1/2π to rounding for any
/// stable couplings.
pub fn conductance_universal(setup: &QuenchSetup) -> Result<f64, SteadyError> {
    let state = steady_values(setup);
    if !state.conductance_defined {
        return Err(SteadyError::ZeroWallHeight);
    }
    Ok(state.g_universal)
}

/// G_bare = I_inf/μ = K_λ(0)v_λ'(0)/(2πv_λ(0)); the coupling-dependent
/// conductance against the bare wall height rather than the effective gap.
pub fn conductance_bare(setup: &QuenchSetup) -> Result<f64, SteadyError> {
    let state = steady_values(setup);
    if !state.conductance_defined {
        return Err(SteadyError::ZeroWallHeight);
    }
    Ok(state.g_bare)
}

/// The t → ∞ exponent of the zero-field correlator: the γ oscillation dies
/// and only ∫₀^∞ η_{λ,λ'}(p)(cos ps − 1)/p dp survives.
pub fn log_modulus_s_limit(setup: &QuenchSetup, s: f64) -> Result<f64, ObservableError> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let amp = |p: f64| {
        if p == 0.0 {
            return 0.0;
        }
        let (eta, _) = exponents(&setup.initial, &setup.evolution, p);
        let h = (0.5 * p * s).sin();
        eta * (-2.0 * h * h) / p
    };
    let unit = |_: f64| 1.0;
    let kernel = OscillatoryKernel::new(&amp, &unit, &unit, 0.0)
        .with_amplitude_scale(setup.initial.potential.momentum_scale())
        .with_amplitude_frequency(s.abs());
    Ok(oscillatory_halfline(&kernel, Trig::Cos, &setup.quadrature)?)
}

/// Steady two-point function: pole × e^{−ir(±A_+)s/v_F} × e^{η-only
/// exponent}. Translation invariant (depends on x − y alone); for λ = λ' it
/// reproduces the equilibrium correlator at the effective potentials
/// μ_± − μ₀ = ±μK_λ/2·(v_λ'/v_λ).
pub fn steady_correlator(
    setup: &QuenchSetup,
    r: Chirality,
    s: f64,
) -> Result<CorrelatorValue, SteadyError> {
    if s == 0.0 {
        return Err(SteadyError::Observable(ObservableError::CoincidentPoints { x: 0.0 }));
    }
    let state = steady_values(setup);
    let log_modulus_exponent = log_modulus_s_limit(setup, s)?;
    Ok(CorrelatorValue {
        chirality: r,
        separation: s,
        phase: r.sign() * state.a_plus,
        log_modulus_exponent,
        v_f: setup.v_f(),
    })
}

/// Lemma-2 constant for the current at x: the bound is
/// |I(x,t) − I_inf| ≤ constant/t for every t > 0.
pub fn current_decay_bound(setup: &QuenchSetup, x: f64) -> Result<f64, SteadyError> {
    let amplitude = |p: f64| {
        setup.initial.k_over_v(p)
            * crate::field::wall_kernel(&setup.wall, p)
            * setup.evolution.velocity(p)
            * (p * x).cos()
    };
    let velocity = |p: f64| setup.evolution.velocity(p);
    let group = |p: f64| setup.evolution.group_velocity(p);
    let scale = setup
        .initial
        .potential
        .momentum_scale()
        .min(2.0 / (PI * setup.wall.delta));
    let kernel = OscillatoryKernel::new(&amplitude, &velocity, &group, 1.0)
        .with_symmetry(KernelSymmetry::Even)
        .with_amplitude_scale(scale)
        .with_amplitude_frequency(x.abs());
    let c = decay_constant(&kernel, &setup.quadrature).map_err(ObservableError::from)?;
    Ok(setup.mu() / PI * c)
}

/// Empirical approach of the current to its steady value.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// Least-squares slope of ln|I(x,t) − I_inf| against ln t; −1 is the
    /// generic bound rate. NaN when `converged`.
    pub slope: f64,
    /// Fit intercept: ln|ΔI| ≈ intercept + slope·ln t. NaN when `converged`.
    pub intercept: f64,
    /// Lemma-2 constant: t·|ΔI| ≤ bound_constant for all t > 0.
    pub bound_constant: f64,
    /// Empirical sup of t·|ΔI| over the sampled times.
    pub sup_t_deviation: f64,
    /// The sampled (t, |I(x,t) − I_inf|) pairs, in time order.
    pub samples: Vec<(f64, f64)>,
    /// True when fewer than two deviations clear the quadrature abs_tol:
    /// the observable has already settled and a rate fit is meaningless.
    pub converged: bool,
}

impl ConvergenceReport {
    /// e^intercept, the fitted constant comparable against `bound_constant`
    /// when the slope is near −1.
    pub fn fitted_constant(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Fit the decay of |I(x,t) − I_inf| over `t_list`. Times must be strictly
/// increasing, at least four, and past the front-passage time |x|/v_λ'(0).
/// Deviations below the quadrature abs_tol are excluded from the fit; if
/// fewer than two remain, the report carries `converged` instead of a rate.
pub fn convergence_rate(
    setup: &QuenchSetup,
    x: f64,
    t_list: &[f64],
) -> Result<ConvergenceReport, SteadyError> {
    if t_list.len() < 4 {
        return Err(SteadyError::TooFewTimes { got: t_list.len() });
    }
    for (i, pair) in t_list.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(SteadyError::NonIncreasingTimes { index: i + 1 });
        }
    }
    let front = x.abs() / setup.evolution.velocity(0.0);
    if let Some(&t) = t_list.iter().find(|&&t| t <= front) {
        return Err(SteadyError::BeforeFront { t, front, x });
    }

    let i_inf = steady_values(setup).i_inf;
    let mut samples = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let dev = (current(setup, x, t)? - i_inf).abs();
        samples.push((t, dev));
    }
    let bound_constant = current_decay_bound(setup, x)?;
    let sup_t_deviation = samples.iter().map(|&(t, d)| t * d).fold(0.0, f64::max);

    let floor = setup.quadrature.abs_tol;
    let usable: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(_, d)| d > floor)
        .map(|&(t, d)| (t.ln(), d.ln()))
        .collect();
    if usable.len() < 2 {
        return Ok(ConvergenceReport {
            slope: f64::NAN,
            intercept: f64::NAN,
            bound_constant,
            sup_t_deviation,
            samples,
            converged: true,
        });
    }

    let n = usable.len() as f64;
    let (sx, sy) = usable.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = usable.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = usable.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(ConvergenceReport {
        slope,
        intercept: my - slope * mx,
        bound_constant,
        sup_t_deviation,
        samples,
        converged: false,
    })
}
