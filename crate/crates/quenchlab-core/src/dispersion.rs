//! Interaction potentials and every momentum-dependent scalar derived from
//! them: renormalized velocity, Luttinger parameter, Bogoliubov angle, group
//! velocity, quench exponents, and Bogoliubov mixing coefficients.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DispersionError {
    /// The stability condition λV̂(p) > −πv_F/2 fails somewhere.
    #[error("unstable potential at p = {p}: 1 + 2λV̂(p)/πv_F = {radicand} ≤ 0")]
    UnstablePotential { p: f64, radicand: f64 },
    /// Tabulated potential queried outside its sampled range.
    #[error("tabulated potential queried at |p| = {p}, beyond table end {max}")]
    TabulatedOutOfRange { p: f64, max: f64 },
    /// Tabulated samples must be strictly increasing in p and finite.
    #[error("malformed potential table: {reason}")]
    MalformedTable { reason: String },
    /// Group velocity v^g(p) = d(p·v(p))/dp must stay positive.
    #[error("nonpositive group velocity at p = {p}: v^g = {vg}")]
    NonpositiveGroupVelocity { p: f64, vg: f64 },
}

/// Potential family. `a` is the interaction range (length); V̂ has units of
/// energy·length and is even in p.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialFamily {
    /// V̂(p) = prefactor·sech(a·p).
    Sech { a: f64 },
    /// V̂(p) = prefactor·exp(−(a·p)²).
    Gaussian { a: f64 },
    /// V̂(p) = prefactor·exp(−a·|p|). Marginal against the C² condition at
    /// p = 0; the validator flags rather than rejects it.
    ExpDecay { a: f64 },
    /// Samples (p, V̂(p)) on p ≥ 0, strictly increasing in p, mirrored to
    /// p < 0. Monotone cubic interpolation between samples, zero beyond the
    /// table end (evaluation through [`potential_value`] errors there
    /// instead).
    Tabulated { samples: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    /// Overall strength, energy·length. A prefactor of πv_F/2 makes
    /// 2λV̂(0)/(πv_F) = λ, so λ alone sets the zero-momentum coupling.
    pub prefactor: f64,
}

impl PotentialSpec {
    pub fn sech(a: f64, prefactor: f64) -> Self {
        Self { family: PotentialFamily::Sech { a }, prefactor }
    }

    pub fn gaussian(a: f64, prefactor: f64) -> Self {
        Self { family: PotentialFamily::Gaussian { a }, prefactor }
    }

    pub fn exp_decay(a: f64, prefactor: f64) -> Self {
        Self { family: PotentialFamily::ExpDecay { a }, prefactor }
    }

    pub fn tabulated(samples: Vec<(f64, f64)>, prefactor: f64) -> Result<Self, DispersionError> {
        if samples.len() < 2 {
            return Err(DispersionError::MalformedTable { reason: "need at least 2 samples".into() });
        }
        for w in samples.windows(2) {
            // NaN-safe: anything but a strict increase is malformed.
            if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
                return Err(DispersionError::MalformedTable {
                    reason: format!("p samples not strictly increasing at p = {}", w[1].0),
                });
            }
        }
        if samples.iter().any(|&(p, v)| !p.is_finite() || !v.is_finite()) {
            return Err(DispersionError::MalformedTable { reason: "non-finite sample".into() });
        }
        if samples[0].0 < 0.0 {
            return Err(DispersionError::MalformedTable {
                reason: "samples must cover p ≥ 0 only; negative p is mirrored".into(),
            });
        }
        Ok(Self { family: PotentialFamily::Tabulated { samples }, prefactor })
    }

    /// V̂(p). Infallible: Tabulated evaluates the monotone cubic on |p| and
    /// returns 0 beyond the table end (setups validate coverage up front, so
    /// the integration engine never actually lands there).
    pub fn value(&self, p: f64) -> f64 {
        let q = p.abs();
        match &self.family {
            PotentialFamily::Sech { a } => self.prefactor * sech(a * q),
            PotentialFamily::Gaussian { a } => self.prefactor * (-(a * q) * (a * q)).exp(),
            PotentialFamily::ExpDecay { a } => self.prefactor * (-a * q).exp(),
            PotentialFamily::Tabulated { samples } => {
                if q > samples[samples.len() - 1].0 {
                    0.0
                } else {
                    self.prefactor * pchip_eval(samples, q)
                }
            }
        }
    }

    /// dV̂/dp, defined a.e. (ExpDecay takes the symmetric value 0 at p = 0).
    pub fn derivative(&self, p: f64) -> f64 {
        let q = p.abs();
        let sign = if p >= 0.0 { 1.0 } else { -1.0 };
        match &self.family {
            PotentialFamily::Sech { a } => {
                -sign * self.prefactor * a * sech(a * q) * (a * q).tanh()
            }
            PotentialFamily::Gaussian { a } => {
                -sign * self.prefactor * 2.0 * a * a * q * (-(a * q) * (a * q)).exp()
            }
            PotentialFamily::ExpDecay { a } => {
                if p == 0.0 {
                    0.0
                } else {
                    -sign * self.prefactor * a * (-a * q).exp()
                }
            }
            PotentialFamily::Tabulated { samples } => {
                // Central difference of the interpolant; h tied to the local
                // sample spacing so steep tables stay resolved.
                let h = min_spacing(samples) / 8.0;
                sign * (self.value(q + h) - self.value((q - h).max(0.0)))
                    / (h + q.min(h))
            }
        }
    }

    /// Characteristic momentum scale 1/range, used to size validation grids
    /// and automatic integration cutoffs.
    pub fn momentum_scale(&self) -> f64 {
        match &self.family {
            PotentialFamily::Sech { a }
            | PotentialFamily::Gaussian { a }
            | PotentialFamily::ExpDecay { a } => 1.0 / a,
            PotentialFamily::Tabulated { samples } => {
                let end = samples[samples.len() - 1].0;
                if end > 0.0 {
                    end / 10.0
                } else {
                    1.0
                }
            }
        }
    }

    fn table_end(&self) -> Option<f64> {
        match &self.family {
            PotentialFamily::Tabulated { samples } => Some(samples[samples.len() - 1].0),
            _ => None,
        }
    }
}

/// Spec-level evaluation of V̂(p): like [`PotentialSpec::value`] but errors
/// when a tabulated potential is queried beyond its range.
pub fn potential_value(spec: &PotentialSpec, p: f64) -> Result<f64, DispersionError> {
    if let Some(end) = spec.table_end() {
        if p.abs() > end {
            return Err(DispersionError::TabulatedOutOfRange { p: p.abs(), max: end });
        }
    }
    Ok(spec.value(p))
}

fn sech(x: f64) -> f64 {
    // 2e^{-|x|}/(1+e^{-2|x|}) avoids overflow of cosh for large |x|.
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

fn min_spacing(samples: &[(f64, f64)]) -> f64 {
    samples
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min)
}

/// Monotone cubic (Fritsch–Carlson) interpolation on a strictly increasing
/// table. Overshoot-free, so validation on the sample grid bounds the
/// interpolant everywhere.
fn pchip_eval(samples: &[(f64, f64)], x: f64) -> f64 {
    if x <= samples[0].0 {
        return samples[0].1;
    }
    let i = match samples.binary_search_by(|&(p, _)| p.partial_cmp(&x).unwrap()) {
        Ok(i) => return samples[i].1,
        Err(i) => i - 1,
    };
    let (x0, y0) = samples[i];
    let (x1, y1) = samples[i + 1];
    let h = x1 - x0;
    let (d0, d1) = (pchip_slope(samples, i), pchip_slope(samples, i + 1));
    let s = (x - x0) / h;
    let (s2, s3) = (s * s, s * s * s);
    y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + d0 * h * (s3 - 2.0 * s2 + s)
        + y1 * (-2.0 * s3 + 3.0 * s2)
        + d1 * h * (s3 - s2)
}

fn pchip_slope(samples: &[(f64, f64)], i: usize) -> f64 {
    let n = samples.len();
    let sec = |j: usize| (samples[j + 1].1 - samples[j].1) / (samples[j + 1].0 - samples[j].0);
    let gap = |j: usize| samples[j + 1].0 - samples[j].0;
    // Shape-preserving three-point endpoint formula.
    let endpoint = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let mut d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d * d0 <= 0.0 {
            d = 0.0;
        } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
            d = 3.0 * d0;
        }
        d
    };
    if i == 0 {
        if n == 2 {
            return sec(0);
        }
        return endpoint(gap(0), gap(1), sec(0), sec(1));
    }
    if i == n - 1 {
        if n == 2 {
            return sec(n - 2);
        }
        return endpoint(gap(n - 2), gap(n - 3), sec(n - 2), sec(n - 3));
    }
    let (dl, dr) = (sec(i - 1), sec(i));
    if dl * dr <= 0.0 {
        return 0.0;
    }
    let hl = samples[i].0 - samples[i - 1].0;
    let hr = samples[i + 1].0 - samples[i].0;
    let (wl, wr) = (2.0 * hr + hl, hr + 2.0 * hl);
    (wl + wr) / (wl / dl + wr / dr)
}

/// One coupling's renormalized dispersion. Construction validates stability
/// on a potential-scaled grid; the evaluation methods are then total.
#[derive(Debug, Clone)]
pub struct DispersionProfile {
    pub potential: PotentialSpec,
    pub lambda: f64,
    pub v_f: f64,
}

impl DispersionProfile {
    pub fn new(potential: PotentialSpec, lambda: f64, v_f: f64) -> Result<Self, DispersionError> {
        assert!(v_f > 0.0, "v_F must be positive");
        let profile = Self { potential, lambda, v_f };
        let report = validate_potential(&profile.potential, lambda, v_f, &profile.default_grid());
        if let Some((p, radicand)) = report.first_instability {
            return Err(DispersionError::UnstablePotential { p, radicand });
        }
        if let Some((p, vg)) = report.first_nonpositive_vg {
            return Err(DispersionError::NonpositiveGroupVelocity { p, vg });
        }
        Ok(profile)
    }

    /// Validation grid: symmetric, dense on the potential scale with a tail
    /// out to 50 scales (or the table end).
    pub fn default_grid(&self) -> Vec<f64> {
        let hi = match self.potential.table_end() {
            Some(end) => end,
            None => 50.0 * self.potential.momentum_scale(),
        };
        let n = 400;
        let mut grid: Vec<f64> = (0..=n).map(|i| hi * i as f64 / n as f64).collect();
        let mut neg: Vec<f64> = grid.iter().skip(1).map(|&p| -p).rev().collect();
        neg.append(&mut grid);
        neg
    }

    /// 1 + 2λV̂(p)/πv_F, the radicand of the velocity formula.
    fn radicand(&self, p: f64) -> f64 {
        1.0 + 2.0 * self.lambda * self.potential.value(p) / (std::f64::consts::PI * self.v_f)
    }

    /// v_λ(p) = v_F·√(1 + 2λV̂(p)/πv_F).
    pub fn velocity(&self, p: f64) -> f64 {
        self.v_f * self.radicand(p).sqrt()
    }

    /// K_λ(p) = 1/√(1 + 2λV̂(p)/πv_F); K·v = v_F identically.
    pub fn luttinger_k(&self, p: f64) -> f64 {
        1.0 / self.radicand(p).sqrt()
    }

    /// K_λ(p)/v_λ(p) = 1/(v_F·(1 + 2λV̂/πv_F)), the density-kernel weight.
    pub fn k_over_v(&self, p: f64) -> f64 {
        1.0 / (self.v_f * self.radicand(p))
    }

    /// Bogoliubov angle φ_λ(p), from tanh2φ = −λV̂/(πv_F+λV̂), extended by
    /// continuity to p = 0. Equal to ½ln K_λ(p).
    pub fn angle(&self, p: f64) -> f64 {
        0.5 * self.luttinger_k(p).ln()
    }

    /// dv_λ/dp = λV̂′(p)/(π·√(1+2λV̂/πv_F)).
    pub fn velocity_derivative(&self, p: f64) -> f64 {
        self.lambda * self.potential.derivative(p) / (std::f64::consts::PI * self.radicand(p).sqrt())
    }

    /// Group velocity v^g_λ(p) = d(p·v_λ(p))/dp = v + p·dv/dp.
    pub fn group_velocity(&self, p: f64) -> f64 {
        self.velocity(p) + p * self.velocity_derivative(p)
    }
}

/// Validation report for one (potential, λ, v_F) combination. Carries every
/// failure; `pass()` is the aggregate.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// max |V̂(p) − V̂(−p)| over the grid.
    pub evenness_defect: f64,
    /// First grid point where 1 + 2λV̂/πv_F ≤ 0, with the radicand.
    pub first_instability: Option<(f64, f64)>,
    /// Empirical tail decay exponent d ln|V̂|/d ln p (−∞ for exponential
    /// families that underflow); must be < −1 unless the tail is already 0.
    pub decay_exponent: f64,
    pub decay_ok: bool,
    /// ExpDecay's second derivative is discontinuous at p = 0: allowed
    /// ("C² a.e.") but flagged.
    pub c2_marginal: bool,
    /// First grid point where v^g ≤ 0, with the value.
    pub first_nonpositive_vg: Option<(f64, f64)>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.evenness_defect == 0.0
            && self.first_instability.is_none()
            && self.decay_ok
            && self.first_nonpositive_vg.is_none()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.evenness_defect != 0.0 {
            out.push(format!("V̂ not even: defect {}", self.evenness_defect));
        }
        if let Some((p, r)) = self.first_instability {
            out.push(format!("stability fails at p = {p}: radicand {r}"));
        }
        if !self.decay_ok {
            out.push(format!("tail decay exponent {} ≥ -1", self.decay_exponent));
        }
        if let Some((p, vg)) = self.first_nonpositive_vg {
            out.push(format!("group velocity nonpositive at p = {p}: {vg}"));
        }
        out
    }
}

/// Check the admissibility conditions on (V̂, λ) over `grid`: evenness, stability
/// λV̂ > −πv_F/2, tail decay faster than 1/p, and positivity of
/// πv_F + 2λV̂ + λpV̂′ (equivalent to v^g > 0).
pub fn validate_potential(
    spec: &PotentialSpec,
    lambda: f64,
    v_f: f64,
    grid: &[f64],
) -> ValidationReport {
    let pi = std::f64::consts::PI;
    let mut evenness_defect = 0.0f64;
    let mut first_instability = None;
    let mut first_nonpositive_vg = None;
    for &p in grid {
        evenness_defect = evenness_defect.max((spec.value(p) - spec.value(-p)).abs());
        let radicand = 1.0 + 2.0 * lambda * spec.value(p) / (pi * v_f);
        if radicand <= 0.0 && first_instability.is_none() {
            first_instability = Some((p, radicand));
        }
        // v^g = (πv_F + 2λV̂ + λpV̂′) / (π√radicand); the numerator carries
        // the sign.
        let vg_numerator = pi * v_f + 2.0 * lambda * spec.value(p) + lambda * p * spec.derivative(p);
        if vg_numerator <= 0.0 && first_nonpositive_vg.is_none() {
            first_nonpositive_vg = Some((p, vg_numerator / pi));
        }
    }

    let hi = grid.iter().cloned().fold(0.0f64, f64::max);
    let (p1, p2) = (0.4 * hi, 0.8 * hi);
    let (v1, v2) = (spec.value(p1).abs(), spec.value(p2).abs());
    let decay_exponent = if v2 == 0.0 || v1 == 0.0 {
        f64::NEG_INFINITY
    } else {
        (v2 / v1).ln() / (p2 / p1).ln()
    };
    let decay_ok = decay_exponent < -1.0 || v2 < 1e-280;

    ValidationReport {
        evenness_defect,
        first_instability,
        decay_exponent,
        decay_ok,
        c2_marginal: matches!(spec.family, PotentialFamily::ExpDecay { .. }),
        first_nonpositive_vg,
    }
}

/// Spec-level op: v_λ(p), erroring instead of producing NaN when unstable.
pub fn renormalized_velocity(
    spec: &PotentialSpec,
    lambda: f64,
    v_f: f64,
    p: f64,
) -> Result<f64, DispersionError> {
    let radicand = 1.0 + 2.0 * lambda * potential_value(spec, p)? / (std::f64::consts::PI * v_f);
    if radicand <= 0.0 {
        return Err(DispersionError::UnstablePotential { p, radicand });
    }
    Ok(v_f * radicand.sqrt())
}

/// Spec-level op: K_λ(p).
pub fn luttinger_parameter(
    spec: &PotentialSpec,
    lambda: f64,
    v_f: f64,
    p: f64,
) -> Result<f64, DispersionError> {
    renormalized_velocity(spec, lambda, v_f, p).map(|v| v_f / v)
}

/// Spec-level op: Bogoliubov angle φ_λ(p) from tanh2φ = −λV̂/(πv_F+λV̂),
/// continuously extended to p = 0.
pub fn bogoliubov_angle(
    spec: &PotentialSpec,
    lambda: f64,
    v_f: f64,
    p: f64,
) -> Result<f64, DispersionError> {
    let lam_v = lambda * potential_value(spec, p)?;
    let arg = -lam_v / (std::f64::consts::PI * v_f + lam_v);
    if arg.abs() >= 1.0 {
        return Err(DispersionError::UnstablePotential { p, radicand: 1.0 - arg.abs() });
    }
    Ok(0.5 * arg.atanh())
}

/// Spec-level op: v^g_λ(p).
pub fn group_velocity(
    spec: &PotentialSpec,
    lambda: f64,
    v_f: f64,
    p: f64,
) -> Result<f64, DispersionError> {
    let pi = std::f64::consts::PI;
    let v = renormalized_velocity(spec, lambda, v_f, p)?;
    let dv = lambda * spec.derivative(p) * v_f / (pi * v);
    Ok(v + p * dv)
}

/// Quench exponent pair η_{λ,λ'}(p), γ_{λ,λ'}(p) in the K-form. `init` and
/// `evol` must share the potential and v_F.
pub fn exponents(init: &DispersionProfile, evol: &DispersionProfile, p: f64) -> (f64, f64) {
    let k = init.luttinger_k(p);
    let kp = evol.luttinger_k(p);
    let (kp2, kp2i) = (kp * kp, 1.0 / (kp * kp));
    let eta = 0.25 * (k * (1.0 + kp2i) + (1.0 + kp2) / k) - 1.0;
    let gamma = 0.25 * (k * (kp2i - 1.0) + (kp2 - 1.0) / k);
    (eta, gamma)
}

/// Equilibrium exponent η_λ(p) = (K_λ + 1/K_λ)/2 − 1 (the λ' = λ case).
pub fn equilibrium_eta(profile: &DispersionProfile, p: f64) -> f64 {
    let k = profile.luttinger_k(p);
    0.5 * (k + 1.0 / k) - 1.0
}

/// Bogoliubov mixing coefficients u^{±±}_{λ,λ'}(p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoefficients {
    pub u_pp: f64,
    pub u_mm: f64,
    pub u_pm: f64,
    pub u_mp: f64,
}

impl BogoliubovCoefficients {
    /// cosh²-type identity u_pp² + u_mm² − u_pm² − u_mp² = 1.
    pub fn hyperbolic_defect(&self) -> f64 {
        self.u_pp * self.u_pp + self.u_mm * self.u_mm
            - self.u_pm * self.u_pm
            - self.u_mp * self.u_mp
            - 1.0
    }
}

/// u_pp = coshφ'·cosh(φ'−φ), u_mm = sinhφ'·sinh(φ'−φ),
/// u_pm = coshφ'·sinh(φ'−φ), u_mp = sinhφ'·cosh(φ'−φ).
pub fn u_coefficients(
    init: &DispersionProfile,
    evol: &DispersionProfile,
    p: f64,
) -> BogoliubovCoefficients {
    let phi = init.angle(p);
    let phi_p = evol.angle(p);
    let d = phi_p - phi;
    BogoliubovCoefficients {
        u_pp: phi_p.cosh() * d.cosh(),
        u_mm: phi_p.sinh() * d.sinh(),
        u_pm: phi_p.cosh() * d.sinh(),
        u_mp: phi_p.sinh() * d.cosh(),
    }
}

/// (η, γ) from the hyperbolic forms cosh2φ'·cosh2(φ'−φ) − 1 and
/// sinh2φ'·sinh2(φ'−φ); the dual route to [`exponents`].
pub fn exponents_hyperbolic(
    init: &DispersionProfile,
    evol: &DispersionProfile,
    p: f64,
) -> (f64, f64) {
    let phi = init.angle(p);
    let phi_p = evol.angle(p);
    let d2 = 2.0 * (phi_p - phi);
    let eta = (2.0 * phi_p).cosh() * d2.cosh() - 1.0;
    let gamma = (2.0 * phi_p).sinh() * d2.sinh();
    (eta, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    fn fig3_potential() -> PotentialSpec {
        PotentialSpec::sech(0.0025, PI / 2.0)
    }

    #[test]
    fn sech_value_at_zero_is_prefactor() {
        let spec = fig3_potential();
        assert_relative_eq!(spec.value(0.0), PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn sech_value_at_large_argument() {
        // (π/2)·sech(10) from direct high-precision evaluation.
        let spec = PotentialSpec::sech(1.0, PI / 2.0);
        assert_relative_eq!(spec.value(10.0), 1.4262808552133662e-4, max_relative = 1e-12);
    }

    #[test]
    fn potentials_are_even() {
        for spec in [
            PotentialSpec::sech(0.3, 1.2),
            PotentialSpec::gaussian(0.5, 0.7),
            PotentialSpec::exp_decay(1.1, 0.4),
        ] {
            for p in [0.1, 0.77, 2.5, 13.0] {
                assert_eq!(spec.value(p), spec.value(-p));
            }
        }
    }

    #[test]
    fn fig3_dispersion_values_at_zero() {
        let profile = DispersionProfile::new(fig3_potential(), -0.96, 1.0).unwrap();
        // √(1+λ') = 0.2 and its reciprocal.
        assert_relative_eq!(profile.velocity(0.0), 0.2, max_relative = 1e-14);
        assert_relative_eq!(profile.luttinger_k(0.0), 5.0, max_relative = 1e-14);
        assert_relative_eq!(profile.angle(0.0), 0.5 * 5.0f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(profile.group_velocity(0.0), 0.2, max_relative = 1e-14);
    }

    #[test]
    fn free_profile_is_trivial() {
        let profile = DispersionProfile::new(fig3_potential(), 0.0, 1.0).unwrap();
        for p in [0.0, 0.5, 3.0, 100.0] {
            assert_eq!(profile.velocity(p), 1.0);
            assert_eq!(profile.luttinger_k(p), 1.0);
            assert_eq!(profile.group_velocity(p), 1.0);
            assert_eq!(profile.angle(p), 0.0);
        }
    }

    #[test]
    fn velocity_approaches_v_f_at_large_p() {
        let profile = DispersionProfile::new(PotentialSpec::sech(1.0, PI / 2.0), -0.96, 1.0).unwrap();
        assert!((profile.velocity(60.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unstable_coupling_rejected() {
        // λV̂(0) = −1.01·π/2 < −π/2.
        let err = DispersionProfile::new(PotentialSpec::sech(1.0, PI / 2.0), -1.01, 1.0);
        assert!(matches!(err, Err(DispersionError::UnstablePotential { .. })));
    }

    #[test]
    fn validator_passes_fig3_setup() {
        let spec = fig3_potential();
        let profile = DispersionProfile::new(spec.clone(), -0.96, 1.0).unwrap();
        let report = validate_potential(&spec, -0.96, 1.0, &profile.default_grid());
        assert!(report.pass(), "failures: {:?}", report.failures());
    }

    #[test]
    fn validator_reports_instability_at_zero() {
        let spec = PotentialSpec::sech(1.0, PI / 2.0);
        let grid: Vec<f64> = (-200..=200).map(|i| i as f64 * 0.05).collect();
        let report = validate_potential(&spec, -1.01, 1.0, &grid);
        assert!(!report.pass());
        let (p, _) = report.first_instability.unwrap();
        assert!(p.abs() < 0.35, "instability should appear near p = 0, got {p}");
    }

    #[test]
    fn group_velocity_analytic_vs_central_difference() {
        let spec = PotentialSpec::sech(0.7, PI / 2.0);
        let profile = DispersionProfile::new(spec.clone(), -0.6, 1.0).unwrap();
        // Deterministic pseudo-random p values.
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..50 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let p = (state >> 11) as f64 / (1u64 << 53) as f64 * 8.0;
            let h = 1e-5;
            let fd = ((p + h) * profile.velocity(p + h) - (p - h) * profile.velocity(p - h)) / (2.0 * h);
            assert_relative_eq!(profile.group_velocity(p), fd, max_relative = 1e-8, epsilon = 1e-8);
        }
    }

    #[test]
    fn k_times_v_is_v_f() {
        let profile = DispersionProfile::new(PotentialSpec::gaussian(0.8, 1.3), -0.4, 1.7).unwrap();
        for p in [0.0, 0.3, 1.0, 4.0, 20.0] {
            assert_relative_eq!(
                profile.luttinger_k(p) * profile.velocity(p),
                1.7,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn angle_consistent_with_velocity() {
        let spec = PotentialSpec::sech(1.0, PI / 2.0);
        let profile = DispersionProfile::new(spec.clone(), -0.8, 1.0).unwrap();
        for p in [0.0, 0.2, 1.0, 3.0] {
            let phi = bogoliubov_angle(&spec, -0.8, 1.0, p).unwrap();
            assert_relative_eq!((-2.0 * phi).exp(), profile.velocity(p), max_relative = 1e-14);
            assert_relative_eq!((2.0 * phi).exp(), profile.luttinger_k(p), max_relative = 1e-14);
            assert_relative_eq!(profile.angle(p), phi, max_relative = 1e-13);
        }
    }

    #[test]
    fn fig3_exponents_at_zero() {
        let pot = fig3_potential();
        let init = DispersionProfile::new(pot.clone(), 0.0, 1.0).unwrap();
        let evol = DispersionProfile::new(pot, -0.96, 1.0).unwrap();
        let (eta, gamma) = exponents(&init, &evol, 0.0);
        assert_relative_eq!(eta, 5.76, max_relative = 1e-13);
        assert_relative_eq!(gamma, 5.76, max_relative = 1e-13);
    }

    #[test]
    fn fig3_u_coefficients_at_zero() {
        let pot = fig3_potential();
        let init = DispersionProfile::new(pot.clone(), 0.0, 1.0).unwrap();
        let evol = DispersionProfile::new(pot, -0.96, 1.0).unwrap();
        let u = u_coefficients(&init, &evol, 0.0);
        assert_relative_eq!(u.u_pp, 1.8, max_relative = 1e-13);
        assert_relative_eq!(u.u_mm, 0.8, max_relative = 1e-13);
        assert_relative_eq!(u.u_pm, 1.2, max_relative = 1e-13);
        assert_relative_eq!(u.u_mp, 1.2, max_relative = 1e-13);
        assert!(u.hyperbolic_defect().abs() < 1e-13);
    }

    #[test]
    fn equal_couplings_have_zero_gamma_and_eq9_eta() {
        let pot = PotentialSpec::sech(1.0, PI / 2.0);
        let profile = DispersionProfile::new(pot.clone(), -0.96, 1.0).unwrap();
        let (eta, gamma) = exponents(&profile, &profile, 0.0);
        assert!(gamma.abs() < 1e-15);
        // η_λ = (K+1/K)/2−1 with K = 5 versus the closed form
        // (1−[λV̂/(πv_F+λV̂)]²)^{−1/2} − 1.
        assert_relative_eq!(eta, 1.6, max_relative = 1e-13);
        let lam_v = -0.96 * (PI / 2.0);
        let tanh2phi = -lam_v / (PI + lam_v);
        assert_relative_eq!(eta, 1.0 / (1.0 - tanh2phi * tanh2phi).sqrt() - 1.0, max_relative = 1e-12);
    }

    #[test]
    fn tabulated_matches_sech_between_samples() {
        let a = 1.0;
        let samples: Vec<(f64, f64)> = (0..=400).map(|i| {
            let p = i as f64 * 0.05;
            (p, sech(a * p))
        }).collect();
        let table = PotentialSpec::tabulated(samples, PI / 2.0).unwrap();
        let exact = PotentialSpec::sech(a, PI / 2.0);
        // Monotone (shape-preserving) slopes are least accurate next to the
        // flat maximum at p = 0; elsewhere the interpolant is much tighter.
        for p in [0.013, 0.77, 3.21, 9.87] {
            assert_relative_eq!(table.value(p), exact.value(p), max_relative = 1e-4);
        }
        for p in [0.77, 3.21, 9.87] {
            assert_relative_eq!(table.value(p), exact.value(p), max_relative = 3e-6);
        }
    }

    #[test]
    fn tabulated_out_of_range_errors() {
        let table = PotentialSpec::tabulated(vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.1)], 1.0).unwrap();
        assert!(matches!(
            potential_value(&table, 2.5),
            Err(DispersionError::TabulatedOutOfRange { .. })
        ));
        assert!(potential_value(&table, -1.5).is_ok());
    }

    #[test]
    fn malformed_table_rejected() {
        assert!(PotentialSpec::tabulated(vec![(0.0, 1.0), (0.0, 0.5)], 1.0).is_err());
        assert!(PotentialSpec::tabulated(vec![(0.0, 1.0)], 1.0).is_err());
        assert!(PotentialSpec::tabulated(vec![(0.0, f64::NAN), (1.0, 0.0)], 1.0).is_err());
    }
}
