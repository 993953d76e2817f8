//! The domain-wall external field W(x): position-space tanh profiles, the
//! infinite-volume Fourier transform, and discrete Fourier coefficients of
//! the periodized wall.

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    /// The sharp wall δ = 0 exists only in Fourier form.
    #[error("sharp wall (δ = 0) has no position-space representation; use the Fourier form")]
    SharpWallRealSpace,
    /// The periodic transform grid cannot resolve the wall width.
    #[error("wall width δ/L = {delta_over_l:e} needs {required} grid points, above the cap {cap}")]
    ResolutionInsufficient { delta_over_l: f64, required: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallMode {
    InfiniteVolume,
    /// Periodized on [−L/2, L/2) by a pair of image anti-walls at ±L/2.
    Periodic { l: f64 },
}

/// Domain-wall field: height μ (energy), width δ (length), and volume mode.
/// μ multiplies observables downstream; nothing in this module depends on it.
#[derive(Debug, Clone, Copy)]
pub struct WallProfile {
    pub delta: f64,
    pub mu: f64,
    pub mode: WallMode,
}

impl WallProfile {
    pub fn infinite(delta: f64, mu: f64) -> Self {
        Self { delta, mu, mode: WallMode::InfiniteVolume }
    }

    pub fn periodic(delta: f64, mu: f64, l: f64) -> Self {
        assert!(l > 0.0, "period must be positive");
        Self { delta, mu, mode: WallMode::Periodic { l } }
    }

    /// Wall width used when a run leaves δ unset: 0.0025 of the x window.
    pub fn default_delta(window_width: f64) -> f64 {
        0.0025 * window_width
    }
}

/// W(x). Infinite volume: −½tanh(x/δ). Periodic: the three-tanh form
/// −½(tanh(x/δ) − tanh((2x+L)/2δ) − tanh((2x−L)/2δ)), periodic up to terms
/// exponentially small in L/δ.
pub fn wall_position(profile: &WallProfile, x: f64) -> Result<f64, FieldError> {
    let d = profile.delta;
    if d <= 0.0 {
        return Err(FieldError::SharpWallRealSpace);
    }
    Ok(match profile.mode {
        WallMode::InfiniteVolume => -0.5 * (x / d).tanh(),
        WallMode::Periodic { l } => {
            -0.5 * ((x / d).tanh() - ((2.0 * x + l) / (2.0 * d)).tanh() - ((2.0 * x - l) / (2.0 * d)).tanh())
        }
    })
}

/// ∫₀^x W(z) dz in closed form (each tanh integrates to a log-cosh).
pub fn wall_antiderivative(profile: &WallProfile, x: f64) -> Result<f64, FieldError> {
    let d = profile.delta;
    if d <= 0.0 {
        return Err(FieldError::SharpWallRealSpace);
    }
    Ok(match profile.mode {
        WallMode::InfiniteVolume => -0.5 * d * ln_cosh(x / d),
        WallMode::Periodic { l } => {
            let half = l / (2.0 * d);
            -0.5 * d
                * (ln_cosh(x / d) - (ln_cosh(x / d + half) - ln_cosh(half))
                    - (ln_cosh(x / d - half) - ln_cosh(half)))
        }
    })
}

/// ln cosh(u) without overflow: |u| − ln2 + ln(1+e^{−2|u|}).
fn ln_cosh(u: f64) -> f64 {
    u.abs() - std::f64::consts::LN_2 + (-2.0 * u.abs()).exp().ln_1p()
}

/// Infinite-volume transform Ŵ(p) = iπδ/(2 sinh(πδp/2)); the δ → 0 limit is
/// i/p. Purely imaginary and odd, with a simple pole at p = 0.
pub fn wall_fourier(profile: &WallProfile, p: f64) -> Complex64 {
    Complex64::new(0.0, wall_kernel(profile, p) / p)
}

/// The regular odd-pole residue w(p) = Im(p·Ŵ(p)) = πδp/(2 sinh(πδp/2)),
/// even with w(0) = 1; identically 1 for the sharp wall.
pub fn wall_kernel(profile: &WallProfile, p: f64) -> f64 {
    let z = 0.5 * std::f64::consts::PI * profile.delta * p.abs();
    if z == 0.0 {
        return 1.0;
    }
    // z/sinh z = 2z·e^{−z}/(1 − e^{−2z}), stable for both tiny and huge z.
    2.0 * z * (-z).exp() / (-(-2.0 * z).exp_m1())
}

/// Fourier coefficients Ŵ_L(p_n) = ∫_{−L/2}^{L/2} W(x)e^{−ip_n x} dx of the
/// periodized wall at p_n = 2πn/L, computed once by FFT and indexed by n.
#[derive(Debug, Clone)]
pub struct WallSpectrum {
    pub l: f64,
    coeffs: Vec<Complex64>,
}

impl WallSpectrum {
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Ŵ_L(2πn/L); odd in n, zero at n = 0 (the wall has zero mean), and
    /// zero beyond the computed range (the spectrum decays exponentially).
    pub fn coeff(&self, n: i64) -> Complex64 {
        let a = n.unsigned_abs() as usize;
        if a >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        if n >= 0 {
            self.coeffs[a]
        } else {
            -self.coeffs[a]
        }
    }

    /// Im Ŵ_L(2πn/L) for n ≥ 0, the only part mode sums consume.
    pub fn imag(&self, n: usize) -> f64 {
        if n >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[n].im
        }
    }
}

const FFT_CAP: usize = 1 << 24;

/// Compute the periodic wall spectrum up to mode `n_max`. The FFT grid is
/// sized so both the wall width and the requested modes are resolved.
pub fn wall_spectrum(profile: &WallProfile, n_max: usize) -> Result<WallSpectrum, FieldError> {
    let l = match profile.mode {
        WallMode::Periodic { l } => l,
        WallMode::InfiniteVolume => {
            panic!("wall_spectrum requires a Periodic profile")
        }
    };
    if profile.delta <= 0.0 {
        return Err(FieldError::SharpWallRealSpace);
    }
    let needed = (32.0 * l / profile.delta).max(8.0 * n_max as f64).max(16384.0);
    // NaN-safe: treat an undefined size as over the cap.
    if needed.partial_cmp(&(FFT_CAP as f64)) != Some(std::cmp::Ordering::Less) {
        return Err(FieldError::ResolutionInsufficient {
            delta_over_l: profile.delta / l,
            required: needed as usize,
            cap: FFT_CAP,
        });
    }
    let n = (needed as usize).next_power_of_two().min(FFT_CAP);

    let h = l / n as f64;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let x = -0.5 * l + j as f64 * h;
            Complex64::new(wall_position(profile, x).expect("delta checked above"), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    // Ŵ_L(p_k) = h·(−1)^k·Σ_j W(x_j)e^{−2πijk/N}; the sign shifts the grid
    // origin from −L/2 to 0. The n = 0 coefficient is exactly 0 by the
    // zero-mean condition; pin it to drop rounding residue.
    let coeffs: Vec<Complex64> = (0..=n_max.min(n / 2))
        .map(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                // The wall is real and odd: keep only the imaginary part.
                Complex64::new(0.0, sign * h * buf[k].im)
            }
        })
        .collect();
    Ok(WallSpectrum { l, coeffs })
}

/// Spec-level op: single periodic Fourier coefficient at mode n.
pub fn wall_fourier_periodic(profile: &WallProfile, n: i64) -> Result<Complex64, FieldError> {
    let spectrum = wall_spectrum(profile, n.unsigned_abs() as usize)?;
    Ok(spectrum.coeff(n))
}
