//! Oscillatory and principal-value integration on the momentum half-line:
//! adaptive Gauss–Kronrod panels sized by both oscillation period and
//! amplitude scale, a Dirichlet tail for slowly decaying principal-value
//! remainders, a change-of-variables route for very large times, and the
//! total-variation constant bounding the approach to the steady value.

use num_complex::Complex64;
use thiserror::Error;

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: error estimate {achieved:e} above target {target:e}")]
    NoConvergence { achieved: f64, target: f64 },
    #[error("integrand tail at p = {at} is not decaying; cannot bound the truncation")]
    TailNotDecaying { at: f64 },
    #[error("group velocity d(pu)/dp = {value} at p = {p} is not positive; phase not monotone")]
    GroupVelocityNonpositive { p: f64, value: f64 },
    #[error("decay-bound total variation kept growing (last {last:e}, previous {prev:e})")]
    DivergentBoundIntegral { last: f64, prev: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatoryMethod {
    /// Gauss–Kronrod panels of at most half an oscillation period each.
    /// Delegates to ChangeOfVariables beyond 10⁴ accumulated oscillations.
    PanelPerPeriod,
    /// Substitute p̃ = p·u(p)/u(0) so the phase becomes exactly linear.
    ChangeOfVariables,
}

/// Tolerances and cutoffs shared by every integral in the crate.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Momentum cutoff. `None` finds the point where the amplitude has
    /// decayed below abs_tol/100 and stays there.
    pub p_max: Option<f64>,
    /// Subdivision budget: worklist splits for regular integrals, bisection
    /// depth for oscillatory panels.
    pub max_subdivisions: u32,
    pub oscillatory_method: OscillatoryMethod,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            p_max: None,
            max_subdivisions: 256,
            oscillatory_method: OscillatoryMethod::PanelPerPeriod,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) {
        assert!(self.rel_tol > 0.0, "rel_tol must be positive");
        assert!(self.abs_tol > 0.0, "abs_tol must be positive");
        if let Some(p) = self.p_max {
            assert!(p > 0.0, "p_max must be positive");
        }
    }
}

/// Parity of the amplitude under p → −p. Even amplitudes feed the imaginary
/// (sine) channel of the principal value, odd ones the real (cosine)
/// channel; General is split numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSymmetry {
    Even,
    Odd,
    General,
}

/// The integrand data of F(t) = ⨍ dp/2π (f(p)/p)·e^{ip·u(p)·t}: amplitude
/// f, phase velocity u, its group form u^g = d(pu)/dp, and the time.
#[derive(Clone, Copy)]
pub struct OscillatoryKernel<'a> {
    pub amplitude: &'a (dyn Fn(f64) -> f64 + Sync),
    pub velocity: &'a (dyn Fn(f64) -> f64 + Sync),
    pub group_velocity: &'a (dyn Fn(f64) -> f64 + Sync),
    pub t: f64,
    pub symmetry: KernelSymmetry,
    /// Momentum scale on which the amplitude varies; panels never exceed a
    /// quarter of it, so narrow amplitudes cannot slip between nodes.
    pub amplitude_scale: f64,
    /// Fastest oscillation frequency carried by the amplitude itself (a
    /// spatial point x puts cos(px) into f); panels resolve it like the
    /// phase.
    pub amplitude_frequency: f64,
}

impl<'a> OscillatoryKernel<'a> {
    pub fn new(
        amplitude: &'a (dyn Fn(f64) -> f64 + Sync),
        velocity: &'a (dyn Fn(f64) -> f64 + Sync),
        group_velocity: &'a (dyn Fn(f64) -> f64 + Sync),
        t: f64,
    ) -> Self {
        assert!(t >= 0.0, "quench time must be nonnegative");
        Self {
            amplitude,
            velocity,
            group_velocity,
            t,
            symmetry: KernelSymmetry::General,
            amplitude_scale: 1.0,
            amplitude_frequency: 0.0,
        }
    }

    pub fn with_symmetry(mut self, symmetry: KernelSymmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn with_amplitude_scale(mut self, scale: f64) -> Self {
        assert!(scale > 0.0);
        self.amplitude_scale = scale;
        self
    }

    pub fn with_amplitude_frequency(mut self, freq: f64) -> Self {
        assert!(freq >= 0.0);
        self.amplitude_frequency = freq;
        self
    }
}

// Gauss–Kronrod 7–15 nodes and weights on [−1, 1], kept at reference-table
// precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate with the embedded 7-point Gauss difference as
/// the error estimate. Never evaluates the endpoints.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Bisect one panel until the Gauss–Kronrod defect meets the budget.
fn panel_adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    budget: f64,
    depth: u32,
) -> Result<f64, QuadError> {
    let (val, err) = gk15(f, a, b);
    // Rounding noise floor: never split in pursuit of error below it.
    let floor = (32.0 * f64::EPSILON * val.abs()).max(5e-17);
    if err <= budget.max(floor) || b - a <= 1e-14 * (a.abs() + 1.0) {
        return Ok(val);
    }
    if depth == 0 {
        return Err(QuadError::NoConvergence { achieved: err, target: budget });
    }
    let m = 0.5 * (a + b);
    Ok(panel_adaptive(f, a, m, 0.5 * budget, depth - 1)?
        + panel_adaptive(f, m, b, 0.5 * budget, depth - 1)?)
}

/// Find a cutoff beyond which f has settled to its large-p limit within
/// `floor`: march geometrically from `scale` and require three consecutive
/// quiet steps. Constant amplitudes settle immediately.
fn auto_cutoff(f: &dyn Fn(f64) -> f64, scale: f64, floor: f64) -> Result<f64, QuadError> {
    let probe = f(1e7 * scale);
    let settled = if probe.is_finite() { probe } else { 0.0 };
    let mut p = 4.0 * scale;
    let mut quiet = 0;
    for _ in 0..200 {
        // Probe a few points per step so a zero crossing cannot fake decay.
        let noisy = [1.0, 1.13, 1.29]
            .iter()
            .any(|&m| (f(p * m) - settled).abs() > floor);
        if noisy {
            quiet = 0;
        } else {
            quiet += 1;
            if quiet >= 3 {
                return Ok(p);
            }
        }
        p *= 1.5;
    }
    Err(QuadError::NoConvergence { achieved: f64::INFINITY, target: floor })
}

/// ∫₀^∞ f(p) dp for a regular, absolutely integrable f: adaptive
/// Gauss–Kronrod on [0, p_max] plus an exponential-fit tail model.
pub fn halfline_regular_integral(
    f: impl Fn(f64) -> f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    spec.validate();
    let fd: &dyn Fn(f64) -> f64 = &f;
    let p_max = match spec.p_max {
        Some(p) => p,
        None => auto_cutoff(fd, 1.0, 0.01 * spec.abs_tol)?,
    };

    // Worklist adaptive integration, splitting the worst panel first.
    let seed = 16usize;
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(seed);
    for i in 0..seed {
        let a = p_max * i as f64 / seed as f64;
        let b = p_max * (i + 1) as f64 / seed as f64;
        let (v, e) = gk15(fd, a, b);
        panels.push((a, b, v, e));
    }
    let mut splits = 0;
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= tol {
            break;
        }
        if splits >= spec.max_subdivisions {
            return Err(QuadError::NoConvergence { achieved: err, target: tol });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.partial_cmp(&b.1 .3).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let (a, b, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(fd, a, m);
        let (v2, e2) = gk15(fd, m, b);
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
        splits += 1;
    }
    let body: f64 = panels.iter().map(|p| p.2).sum();

    // Tail: log-linear fit over the last octave; refuse growing tails.
    let probes: Vec<(f64, f64)> = (0..=10)
        .map(|k| {
            let p = p_max * (0.5 + 0.05 * k as f64);
            (p, f(p))
        })
        .collect();
    let peak = probes.iter().map(|&(_, v)| v.abs()).fold(0.0f64, f64::max);
    let tail = if peak <= 0.01 * spec.abs_tol {
        0.0
    } else {
        let pts: Vec<(f64, f64)> = probes
            .iter()
            .filter(|&&(_, v)| v.abs() > 0.0)
            .map(|&(p, v)| (p, v.abs().ln()))
            .collect();
        let n = pts.len() as f64;
        let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, &(x, y)| (a.0 + x, a.1 + y));
        let (sxx, sxy): (f64, f64) = pts
            .iter()
            .fold((0.0, 0.0), |a, &(x, y)| (a.0 + x * x, a.1 + x * y));
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if slope.is_nan() || slope >= 0.0 {
            return Err(QuadError::TailNotDecaying { at: p_max });
        }
        -f(p_max) / slope
    };
    Ok(body + tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

/// ∫₀^{p_max} g(p)·trig(p·u(p)·t) dp for a regular decaying amplitude g.
/// Panels are capped by half the oscillation period (phase plus amplitude
/// frequency) and a quarter of the amplitude scale, then bisected until the
/// Gauss–Kronrod defect meets the shared budget.
#[allow(clippy::too_many_arguments)]
fn oscillatory_body(
    g: &dyn Fn(f64) -> f64,
    u: &dyn Fn(f64) -> f64,
    ug: &dyn Fn(f64) -> f64,
    t: f64,
    trig: Trig,
    omega_amp: f64,
    amp_scale: f64,
    p_max: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    let integrand = move |p: f64| {
        let theta = p * u(p) * t;
        let osc = match trig {
            Trig::Sin => theta.sin(),
            Trig::Cos => theta.cos(),
        };
        g(p) * osc
    };

    // Panel edges: march by half-periods of the total phase, capped by the
    // amplitude scale so narrow amplitudes stay resolved.
    let amp_cap = amp_scale / 4.0;
    let mut edges = vec![0.0f64];
    let mut p = 0.0;
    while p < p_max {
        let vg = ug(p);
        if vg <= 0.0 {
            return Err(QuadError::GroupVelocityNonpositive { p, value: vg });
        }
        let rate = vg * t + omega_amp;
        let step_phase = if rate > 0.0 { PI / rate } else { f64::INFINITY };
        let step = step_phase.min(amp_cap).min(p_max - p).max(p_max * 1e-9);
        p += step;
        edges.push(p.min(p_max));
    }

    let n = edges.len() - 1;
    let budget = (spec.abs_tol / n as f64).max(1e-18);
    let depth = spec.max_subdivisions.min(24);
    let mut sum = 0.0;
    for w in edges.windows(2) {
        sum += panel_adaptive(&integrand, w[0], w[1], budget, depth)?;
    }
    Ok(sum)
}

/// Public wrapper: ∫₀^∞ f(p)·trig(p·u(p)·t) dp for kernels whose amplitude
/// decays (no 1/p pole). The cutoff comes from the spec or amplitude decay.
pub fn oscillatory_halfline(
    kernel: &OscillatoryKernel,
    trig: Trig,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    spec.validate();
    let p_max = match spec.p_max {
        Some(p) => p,
        None => auto_cutoff(kernel.amplitude, kernel.amplitude_scale, 0.01 * spec.abs_tol)?,
    };
    oscillatory_body(
        kernel.amplitude,
        kernel.velocity,
        kernel.group_velocity,
        kernel.t,
        trig,
        kernel.amplitude_frequency,
        kernel.amplitude_scale,
        p_max,
        spec,
    )
}

/// Remainder of the Dirichlet integral: ∫_{p_cut}^∞ sin(frequency·p)/p dp
/// = π/2 − Si(frequency·p_cut). Asymptotic series for large arguments,
/// half-period panels below.
pub fn dirichlet_tail(frequency: f64, p_cut: f64) -> f64 {
    assert!(frequency > 0.0 && p_cut > 0.0);
    let z = frequency * p_cut;
    si_remainder(z)
}

fn si_remainder(z: f64) -> f64 {
    const SWITCH: f64 = 100.0;
    if z >= SWITCH {
        return si_remainder_asymptotic(z);
    }
    // ∫_z^SWITCH sin s/s ds by half-period panels, then the asymptotic tail.
    let f = |s: f64| if s == 0.0 { 1.0 } else { s.sin() / s };
    let mut acc = 0.0;
    let mut a = z;
    while a < SWITCH {
        let b = (a + PI).min(SWITCH);
        acc += gk15(&f, a, b).0;
        a = b;
    }
    acc + si_remainder_asymptotic(SWITCH)
}

/// ∫_z^∞ sin s/s ds ≈ cos z·(1/z − 2/z³ + 24/z⁵ − 720/z⁷)
///                  + sin z·(1/z² − 6/z⁴ + 120/z⁶ − 5040/z⁸), error < 8!/z⁹.
fn si_remainder_asymptotic(z: f64) -> f64 {
    let inv = 1.0 / z;
    let i2 = inv * inv;
    let c = inv * (1.0 - i2 * (2.0 - i2 * (24.0 - i2 * 720.0)));
    let s = i2 * (1.0 - i2 * (6.0 - i2 * (120.0 - i2 * 5040.0)));
    z.cos() * c + z.sin() * s
}

/// F(t) = ⨍ dp/2π (f(p)/p)·e^{ip·u(p)·t}, folded onto the half-line:
/// Re F = (1/π)∫₀^∞ (f_odd/p)·cos(pu t) dp and
/// Im F = (1/π)∫₀^∞ f_even·sin(pu t)/p dp, the latter split into the
/// regular part, a Dirichlet tail with coefficient f(p_max) − f(0), and
/// f(0)·(π/2 − ∫₀^∞ (u′/u)sin(pu t) dp) for the pole.
pub fn pv_oscillatory(
    kernel: &OscillatoryKernel,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    spec.validate();
    let f = kernel.amplitude;
    let even: Box<dyn Fn(f64) -> f64 + Sync> = match kernel.symmetry {
        KernelSymmetry::Even => Box::new(move |p: f64| f(p)),
        KernelSymmetry::Odd => Box::new(|_| 0.0),
        KernelSymmetry::General => Box::new(move |p: f64| 0.5 * (f(p) + f(-p))),
    };
    let odd: Box<dyn Fn(f64) -> f64 + Sync> = match kernel.symmetry {
        KernelSymmetry::Even => Box::new(|_| 0.0),
        KernelSymmetry::Odd => Box::new(move |p: f64| f(p)),
        KernelSymmetry::General => Box::new(move |p: f64| 0.5 * (f(p) - f(-p))),
    };

    if kernel.t == 0.0 {
        // cos ≡ 1, sin ≡ 0: only the regular odd channel survives the
        // symmetric principal value.
        let re = match kernel.symmetry {
            KernelSymmetry::Even => 0.0,
            _ => {
                let g = |p: f64| odd(p) / p;
                halfline_regular_integral(g, spec)? / PI
            }
        };
        return Ok(Complex64::new(re, 0.0));
    }

    let u = kernel.velocity;
    let ug = kernel.group_velocity;
    let vg0 = ug(0.0);
    if vg0 <= 0.0 {
        return Err(QuadError::GroupVelocityNonpositive { p: 0.0, value: vg0 });
    }

    // Shared cutoff: beyond it both the amplitude and the phase-velocity
    // variation must be quiet.
    let floor = 0.01 * spec.abs_tol;
    let p_max = match spec.p_max {
        Some(p) => p,
        None => {
            let du = |p: f64| (ug(p) - u(p)) / (p * u(p)).max(f64::MIN_POSITIVE);
            let pf = auto_cutoff(f, kernel.amplitude_scale, floor)?;
            let pu = auto_cutoff(&du, kernel.amplitude_scale, floor)?;
            pf.max(pu)
        }
    };

    let oscillations = (u(p_max).abs() * kernel.t * p_max) / (2.0 * PI);
    let delegate = oscillations > 1e4;
    let use_cov = matches!(spec.oscillatory_method, OscillatoryMethod::ChangeOfVariables)
        || (matches!(spec.oscillatory_method, OscillatoryMethod::PanelPerPeriod) && delegate);

    if use_cov {
        pv_change_of_variables(kernel, &*even, &*odd, p_max, spec)
    } else {
        pv_panel_per_period(kernel, &*even, &*odd, p_max, spec)
    }
}

fn pv_panel_per_period(
    kernel: &OscillatoryKernel,
    even: &(dyn Fn(f64) -> f64 + Sync),
    odd: &(dyn Fn(f64) -> f64 + Sync),
    p_max: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    let u = kernel.velocity;
    let ug = kernel.group_velocity;
    let t = kernel.t;

    let re = if matches!(kernel.symmetry, KernelSymmetry::Even) {
        0.0
    } else {
        let g = move |p: f64| odd(p) / p;
        oscillatory_body(
            &g,
            u,
            ug,
            t,
            Trig::Cos,
            kernel.amplitude_frequency,
            kernel.amplitude_scale,
            p_max,
            spec,
        )? / PI
    };

    let im = if matches!(kernel.symmetry, KernelSymmetry::Odd) {
        0.0
    } else {
        let f0 = even(0.0);
        let regular = move |p: f64| (even(p) - f0) / p;
        let a1 = oscillatory_body(
            &regular,
            u,
            ug,
            t,
            Trig::Sin,
            kernel.amplitude_frequency,
            kernel.amplitude_scale,
            p_max,
            spec,
        )?;
        let tail = (even(p_max) - f0) * dirichlet_tail(u(p_max) * t, p_max);
        let pole = if f0 == 0.0 {
            0.0
        } else {
            // ∫₀^∞ sin(pu(p)t)/p dp = π/2 − ∫₀^∞ (u′/u)·sin(pu(p)t) dp.
            let du_over_u = move |p: f64| {
                if p == 0.0 {
                    0.0
                } else {
                    (ug(p) - u(p)) / (p * u(p))
                }
            };
            let a2 = oscillatory_body(
                &du_over_u,
                u,
                ug,
                t,
                Trig::Sin,
                0.0,
                kernel.amplitude_scale,
                p_max,
                spec,
            )?;
            f0 * (0.5 * PI - a2)
        };
        (a1 + tail + pole) / PI
    };

    Ok(Complex64::new(re, im))
}

/// Invert s = p·u(p)/u0 by Newton iteration; monotone because u^g > 0.
fn invert_phase(
    s: f64,
    u0: f64,
    u: &(dyn Fn(f64) -> f64 + Sync),
    ug: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<f64, QuadError> {
    let target = s * u0;
    let mut p = s;
    for _ in 0..60 {
        let vg = ug(p);
        if vg <= 0.0 {
            return Err(QuadError::GroupVelocityNonpositive { p, value: vg });
        }
        let resid = p * u(p) - target;
        if resid.abs() <= 1e-14 * (target.abs() + 1.0) {
            return Ok(p);
        }
        p = (p - resid / vg).max(0.25 * p);
    }
    Err(QuadError::NoConvergence { achieved: f64::NAN, target: 1e-14 })
}

fn pv_change_of_variables(
    kernel: &OscillatoryKernel,
    even: &(dyn Fn(f64) -> f64 + Sync),
    odd: &(dyn Fn(f64) -> f64 + Sync),
    p_max: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    let u = kernel.velocity;
    let ug = kernel.group_velocity;
    let t = kernel.t;
    let u0 = u(0.0);
    if u0 <= 0.0 {
        return Err(QuadError::GroupVelocityNonpositive { p: 0.0, value: u0 });
    }
    let q_max = p_max * u(p_max) / u0;

    // After p̃ = p·u(p)/u0 the phase is exactly p̃·u0·t; the Jacobian folds
    // into the amplitude, f̃ = f·u/u^g, and the pole identity needs no
    // separate velocity integral.
    let tilde = move |s: f64, part: &(dyn Fn(f64) -> f64 + Sync)| -> Result<f64, QuadError> {
        let p = invert_phase(s, u0, u, ug)?;
        Ok(part(p) * u(p) / ug(p))
    };

    let lin_u = move |_s: f64| u0;
    let lin_ug = move |_s: f64| u0;

    let re = if matches!(kernel.symmetry, KernelSymmetry::Even) {
        0.0
    } else {
        let g = move |s: f64| match tilde(s, odd) {
            Ok(v) => v / s,
            Err(_) => f64::NAN,
        };
        oscillatory_body(
            &g,
            &lin_u,
            &lin_ug,
            t,
            Trig::Cos,
            kernel.amplitude_frequency,
            kernel.amplitude_scale,
            q_max,
            spec,
        )? / PI
    };

    let im = if matches!(kernel.symmetry, KernelSymmetry::Odd) {
        0.0
    } else {
        let f0 = even(0.0);
        let g = move |s: f64| match tilde(s, even) {
            Ok(v) => (v - f0) / s,
            Err(_) => f64::NAN,
        };
        let a1 = oscillatory_body(
            &g,
            &lin_u,
            &lin_ug,
            t,
            Trig::Sin,
            kernel.amplitude_frequency,
            kernel.amplitude_scale,
            q_max,
            spec,
        )?;
        let f_end = tilde(q_max, even)?;
        let tail = (f_end - f0) * dirichlet_tail(u0 * t, q_max);
        (a1 + tail + f0 * 0.5 * PI) / PI
    };

    if re.is_nan() || im.is_nan() {
        return Err(QuadError::NoConvergence { achieved: f64::NAN, target: spec.abs_tol });
    }
    Ok(Complex64::new(re, im))
}

/// Closed-form steady value F₀(t) = i·f0/2 for t > 0 (and 0 at t = 0): the
/// constant-kernel principal value needs no quadrature.
pub fn steady_reference(f0: f64, u0: f64, t: f64) -> Complex64 {
    assert!(u0 > 0.0, "phase velocity must be positive");
    if t == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, 0.5 * f0)
    }
}

/// The constant C in |F(t) − F₀(t)| ≤ C/t: (1/π) times the total variation
/// on (0, ∞) of H(p) = (f(p) − f(0))/(p·u^g) − f(0)·u′/(u·u^g), which is the
/// phase-linearized amplitude derivative pulled back to p. Sampled on a
/// refining grid; the |H(p_max)| endpoint bounds the monotone tail.
pub fn decay_constant(
    kernel: &OscillatoryKernel,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    spec.validate();
    let f = kernel.amplitude;
    let u = kernel.velocity;
    let ug = kernel.group_velocity;
    let f0 = match kernel.symmetry {
        KernelSymmetry::Odd => 0.0,
        _ => f(0.0),
    };
    let h = move |p: f64| {
        let vg = ug(p);
        let vel = u(p);
        let du = (vg - vel) / p;
        ((f(p) - f0) / p - f0 * du / vel) / vg
    };

    let scale = kernel.amplitude_scale;
    let p_max = match spec.p_max {
        Some(p) => p,
        None => auto_cutoff(f, scale, 0.01 * spec.abs_tol)?.max(100.0 * scale),
    };

    let tv = |n: usize| -> f64 {
        // Linear block through the amplitude structure, geometric beyond.
        let knee = (8.0 * scale).min(p_max);
        let mut prev = h(1e-9 * scale);
        let mut acc = 0.0;
        for i in 1..=n {
            let p = knee * i as f64 / n as f64;
            let cur = h(p);
            acc += (cur - prev).abs();
            prev = cur;
        }
        if knee < p_max {
            let ratio = (p_max / knee).powf(1.0 / n as f64);
            let mut p = knee;
            for _ in 0..n {
                p *= ratio;
                let cur = h(p);
                acc += (cur - prev).abs();
                prev = cur;
            }
        }
        acc + prev.abs()
    };

    let mut n = 4096;
    let mut last = tv(n);
    for _ in 0..6 {
        n *= 2;
        let next = tv(n);
        let diff = (next - last).abs();
        if diff <= 1e-6 * next.abs() + 1e-12 {
            return Ok(next / PI);
        }
        last = next;
    }
    let final_tv = tv(2 * n);
    if (final_tv - last).abs() <= 1e-4 * final_tv.abs() + 1e-10 {
        return Ok(final_tv / PI);
    }
    Err(QuadError::DivergentBoundIntegral { last: final_tv, prev: last })
}
