//! Subcommand implementations: each builds core inputs from a validated
//! config, evaluates, and emits one deterministic artifact.

use crate::config::{
    FamilyName, FormatName, GridSection, OutputSection, PotentialSection, QuadratureSection,
    QuenchSection, RunConfig,
};
use crate::error::CliError;
use crate::output::{emit, emit_table, render_json, Cell, Table};
use quenchlab_core::dispersion::{validate_potential, DispersionProfile};
use quenchlab_core::gology::{gology_conductance, gology_dispersion, gology_phase_slope, winding_numbers};
use quenchlab_core::finitesize::thermo_gap_ladder;
use quenchlab_core::observables::{grid_evaluate, Chirality, GridObservable, GridValue, QuenchSetup};
use quenchlab_core::steady::{convergence_rate, steady_values};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

const SCALAR_COLUMNS: &[&str] = &["x", "t", "value"];
const CORRELATOR_COLUMNS: &[&str] = &["s", "t", "r", "phase_slope", "log_modulus"];

/// Shared runner for the grid observables; rows arrive t-major from the
/// deterministic parallel sweep.
fn grid_command(
    config: &RunConfig,
    which: GridObservable,
    command: &str,
    extras: &[(&str, String)],
) -> Result<(), CliError> {
    let setup = config.setup()?;
    let columns = match which {
        GridObservable::CorrelatorSlice { .. } => CORRELATOR_COLUMNS,
        _ => SCALAR_COLUMNS,
    };
    let mut table = Table::new(columns);
    for row in grid_evaluate(&setup, &config.x_grid(), &config.grid.t_values, which) {
        match row.value {
            Ok(GridValue::Scalar(value)) => {
                table.push(vec![Cell::Num(row.x), Cell::Num(row.t), Cell::Num(value)]);
            }
            Ok(GridValue::Correlator(c)) => {
                let log_modulus = c.log_modulus_exponent - (2.0 * PI * c.separation.abs()).ln();
                table.push(vec![
                    Cell::Num(c.separation),
                    Cell::Num(row.t),
                    Cell::Int(c.chirality.sign() as i64),
                    Cell::Num(c.phase_slope()),
                    Cell::Num(log_modulus),
                ]);
            }
            Err(e) => {
                return Err(CliError::Numerical(format!(
                    "{command} at x = {}, t = {}: {e}",
                    row.x, row.t
                )));
            }
        }
    }
    emit_table(config, command, extras, &table)
}

pub fn density(config: &RunConfig) -> Result<(), CliError> {
    grid_command(config, GridObservable::Density, "density", &[])
}

pub fn current(config: &RunConfig) -> Result<(), CliError> {
    grid_command(config, GridObservable::Current, "current", &[])
}

pub fn correlator(config: &RunConfig, r: Chirality, y: f64) -> Result<(), CliError> {
    if !y.is_finite() {
        return Err(CliError::Validation(vec![format!("--y must be finite, got {y}")]));
    }
    if config.x_grid().contains(&y) {
        return Err(CliError::Validation(vec![format!(
            "--y = {y} lies on the x grid; the separation would vanish there"
        )]));
    }
    let branch = if r == Chirality::Plus { "plus" } else { "minus" };
    let extras = [("chirality", format!("\"{branch}\"")), ("y", format!("{y}"))];
    grid_command(config, GridObservable::CorrelatorSlice { r, y }, "correlator", &extras)
}

#[derive(Serialize)]
struct SteadyArtifact {
    #[serde(rename = "I_inf")]
    i_inf: f64,
    gap: f64,
    #[serde(rename = "G")]
    g: Option<f64>,
}

/// Closed-form steady values; `G` is null when μ = 0 leaves it undefined.
pub fn steady(config: &RunConfig) -> Result<(), CliError> {
    let setup = config.setup()?;
    let state = steady_values(&setup);
    let artifact = SteadyArtifact {
        i_inf: state.i_inf,
        gap: state.mu_plus_minus_gap,
        g: state.conductance_defined.then_some(state.g_universal),
    };
    emit(config.output.path.as_deref(), &render_json(&artifact))
}

pub fn sweep(config: &RunConfig, lambdas: &[f64], lambda_primes: &[f64]) -> Result<(), CliError> {
    let potential = config.potential_spec()?;
    let mut violations = Vec::new();
    if lambdas.is_empty() {
        violations.push("--lambda-values must not be empty".into());
    }
    if lambda_primes.is_empty() {
        violations.push("--lambda-prime-values must not be empty".into());
    }
    for &coupling in lambdas.iter().chain(lambda_primes) {
        if let Err(e) = DispersionProfile::new(potential.clone(), coupling, config.quench.v_fermi) {
            violations.push(format!("sweep coupling {coupling}: {e}"));
        }
    }
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }

    let mut table =
        Table::new(&["lambda", "lambda_prime", "i_inf", "gap", "g_universal", "g_bare"]);
    for &lambda in lambdas {
        for &lambda_prime in lambda_primes {
            let setup = QuenchSetup::new(
                potential.clone(),
                lambda,
                lambda_prime,
                config.quench.v_fermi,
                config.wall(),
                config.quadrature_spec(),
            )?;
            let state = steady_values(&setup);
            table.push(vec![
                Cell::Num(lambda),
                Cell::Num(lambda_prime),
                Cell::Num(state.i_inf),
                Cell::Num(state.mu_plus_minus_gap),
                Cell::Num(state.g_universal),
                Cell::Num(state.g_bare),
            ]);
        }
    }
    let extras = [
        ("lambda_values", join_floats(lambdas)),
        ("lambda_prime_values", join_floats(lambda_primes)),
    ];
    emit_table(config, "sweep", &extras, &table)
}

pub fn finite_size(
    config: &RunConfig,
    rings: &[f64],
    n_max: usize,
    x: f64,
    t: f64,
) -> Result<(), CliError> {
    let mut violations = Vec::new();
    if rings.is_empty() {
        violations.push("--rings must not be empty".into());
    }
    for &l in rings {
        if !(l > 0.0 && l.is_finite()) {
            violations.push(format!("--rings entries must be positive and finite, got {l}"));
        }
    }
    if rings.windows(2).any(|w| w[1] <= w[0]) {
        violations.push("--rings must be strictly ascending".into());
    }
    if n_max == 0 {
        violations.push("--n-max must be at least 1".into());
    }
    if !x.is_finite() {
        violations.push(format!("--x must be finite, got {x}"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        violations.push(format!("--t must be nonnegative and finite, got {t}"));
    }
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }

    let base = config.setup()?;
    let ladder = thermo_gap_ladder(&base, rings, n_max, x, t)?;
    let mut table = Table::new(&["l", "gap_density", "gap_current", "recurrence_regime"]);
    for gap in &ladder {
        table.push(vec![
            Cell::Num(gap.l),
            Cell::Num(gap.gap_density),
            Cell::Num(gap.gap_current),
            Cell::Bool(gap.recurrence_regime),
        ]);
    }
    let extras = [
        ("rings", join_floats(rings)),
        ("n_max", n_max.to_string()),
        ("x", format!("{x}")),
        ("t", format!("{t}")),
    ];
    emit_table(config, "finite-size", &extras, &table)
}

#[derive(Serialize)]
struct ReductionArtifact {
    lambda: f64,
    max_velocity_deviation: f64,
    max_luttinger_deviation: f64,
}

#[derive(Serialize)]
struct GologyArtifact {
    velocity_at_zero: f64,
    luttinger_k_at_zero: f64,
    kv_at_zero: f64,
    gap: f64,
    current: Option<f64>,
    conductance: Option<f64>,
    conductance_deviation: Option<f64>,
    w_plus: f64,
    w_minus: f64,
    winding_integral: bool,
    phase_slope_plus: f64,
    phase_slope_minus: f64,
    reduction: Option<ReductionArtifact>,
}

/// Two-coupling report: dispersion at p = 0, conductance through the
/// winding-number route, and, when g2 = g4 with one shared potential, the
/// deviation from the single-coupling dispersion it must collapse to.
pub fn gology_check(config: &RunConfig) -> Result<(), CliError> {
    let spec = config.gology_spec()?;
    let (v0, k0) = gology_dispersion(&spec, 0.0)?;
    let winding = winding_numbers(&spec)?;
    let (current, conductance) = if spec.gap() == 0.0 {
        (None, None)
    } else {
        let report = gology_conductance(&spec)?;
        (Some(report.current), Some(report.conductance))
    };

    let reduction = match spec.reduced_coupling() {
        None => None,
        Some((lambda, potential)) => {
            let profile = DispersionProfile::new(potential.clone(), lambda, spec.v_f)?;
            let scale = spec.v2.momentum_scale().max(spec.v4.momentum_scale());
            let (mut dv, mut dk) = (0.0f64, 0.0f64);
            for j in 0..=32 {
                let p = 8.0 * scale * j as f64 / 32.0;
                let (v, k) = gology_dispersion(&spec, p)?;
                dv = dv.max((v - profile.velocity(p)).abs() / spec.v_f);
                dk = dk.max((k - profile.luttinger_k(p)).abs());
            }
            Some(ReductionArtifact {
                lambda,
                max_velocity_deviation: dv,
                max_luttinger_deviation: dk,
            })
        }
    };

    let artifact = GologyArtifact {
        velocity_at_zero: v0,
        luttinger_k_at_zero: k0,
        kv_at_zero: k0 * v0,
        gap: spec.gap(),
        current,
        conductance,
        conductance_deviation: conductance.map(|g| (g - 1.0 / (2.0 * PI)).abs()),
        w_plus: winding.w_plus,
        w_minus: winding.w_minus,
        winding_integral: winding.integral,
        phase_slope_plus: gology_phase_slope(&spec, Chirality::Plus)?,
        phase_slope_minus: gology_phase_slope(&spec, Chirality::Minus)?,
        reduction,
    };
    emit(config.output.path.as_deref(), &render_json(&artifact))
}

#[derive(Serialize)]
struct SamplePoint {
    t: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct DecayFitArtifact {
    x: f64,
    #[serde(rename = "I_inf")]
    i_inf: f64,
    bound_constant: f64,
    sup_t_deviation: f64,
    converged: bool,
    slope: Option<f64>,
    intercept: Option<f64>,
    fitted_constant: Option<f64>,
    samples: Vec<SamplePoint>,
}

/// Fit |I(x,t) − I_inf| against t. When the current settles below the
/// quadrature tolerance before the first sample, the rate fields are null
/// and `converged` is set instead.
pub fn decay_fit(config: &RunConfig, x: f64, times: &[f64]) -> Result<(), CliError> {
    let mut violations = Vec::new();
    if times.len() < 4 {
        violations.push(format!("--times needs at least 4 entries, got {}", times.len()));
    }
    for &t in times {
        if !(t > 0.0 && t.is_finite()) {
            violations.push(format!("--times entries must be positive and finite, got {t}"));
        }
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        violations.push("--times must be strictly ascending".into());
    }
    if !x.is_finite() {
        violations.push(format!("--x must be finite, got {x}"));
    }
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }

    let setup = config.setup()?;
    let report = convergence_rate(&setup, x, times)?;
    let fitted = (!report.converged).then(|| report.fitted_constant());
    let artifact = DecayFitArtifact {
        x,
        i_inf: steady_values(&setup).i_inf,
        bound_constant: report.bound_constant,
        sup_t_deviation: report.sup_t_deviation,
        converged: report.converged,
        slope: (!report.converged).then_some(report.slope),
        intercept: (!report.converged).then_some(report.intercept),
        fitted_constant: fitted,
        samples: report.samples.iter().map(|&(t, deviation)| SamplePoint { t, deviation }).collect(),
    };
    emit(config.output.path.as_deref(), &render_json(&artifact))
}

#[derive(Serialize)]
struct CheckRow {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct ValidateArtifact<'a> {
    pass: bool,
    checks: Vec<CheckRow>,
    config: &'a RunConfig,
}

/// Full admissibility report over the dispersion's validation grid,
/// echoing the resolved config. Exit 0 only when every check passes.
pub fn validate(config: &RunConfig) -> Result<(), CliError> {
    let spec = config.potential_spec()?;
    let setup = config.setup()?;
    let grid = setup.initial.default_grid();
    let initial = validate_potential(&spec, config.quench.lambda, config.quench.v_fermi, &grid);
    let evolution =
        validate_potential(&spec, config.quench.lambda_prime, config.quench.v_fermi, &grid);

    let mut checks = vec![
        CheckRow {
            name: "potential_even",
            pass: initial.evenness_defect == 0.0,
            detail: format!("max |V̂(p) − V̂(−p)| = {:e}", initial.evenness_defect),
        },
        stability_row("initial_stability", initial.first_instability),
        stability_row("evolution_stability", evolution.first_instability),
        CheckRow {
            name: "tail_decay",
            pass: initial.decay_ok,
            detail: format!("tail exponent {}", initial.decay_exponent),
        },
        group_velocity_row("initial_group_velocity", initial.first_nonpositive_vg),
        group_velocity_row("evolution_group_velocity", evolution.first_nonpositive_vg),
        CheckRow {
            name: "smoothness",
            pass: true,
            detail: if initial.c2_marginal {
                "second derivative discontinuous at p = 0 (marginal, allowed)".into()
            } else {
                "smooth on the grid".into()
            },
        },
    ];
    if config.gology.is_some() {
        checks.push(match config.gology_spec() {
            Ok(_) => CheckRow {
                name: "gology_admissible",
                pass: true,
                detail: "couplings stable and offsets balanced".into(),
            },
            Err(e) => CheckRow { name: "gology_admissible", pass: false, detail: e.to_string() },
        });
    }

    let pass = checks.iter().all(|check| check.pass);
    let failures: Vec<String> = checks
        .iter()
        .filter(|check| !check.pass)
        .map(|check| format!("{}: {}", check.name, check.detail))
        .collect();
    let artifact = ValidateArtifact { pass, checks, config };
    emit(config.output.path.as_deref(), &render_json(&artifact))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Validation(failures))
    }
}

fn stability_row(name: &'static str, first_instability: Option<(f64, f64)>) -> CheckRow {
    match first_instability {
        None => CheckRow {
            name,
            pass: true,
            detail: "1 + 2λV̂(p)/πv_F positive on the grid".into(),
        },
        Some((p, radicand)) => CheckRow {
            name,
            pass: false,
            detail: format!("fails at p = {p}: radicand {radicand}"),
        },
    }
}

fn group_velocity_row(name: &'static str, first_nonpositive: Option<(f64, f64)>) -> CheckRow {
    match first_nonpositive {
        None => CheckRow { name, pass: true, detail: "positive on the grid".into() },
        Some((p, vg)) => {
            CheckRow { name, pass: false, detail: format!("nonpositive at p = {p}: v^g = {vg}") }
        }
    }
}

/// Which preset dataset a `fig` invocation emits.
#[derive(Debug, Clone, Copy)]
pub enum FigKind {
    Density,
    Current,
}

#[derive(Serialize)]
struct FigManifest {
    dir: String,
    files: Vec<String>,
}

/// Preset reference datasets: the domain-wall quench from the free ground
/// state at interaction range a = 0.0025ℓ, v_F = 1, μ = 1. The main file
/// holds λ′ = −0.96 at t ∈ {0, 2, 4, 6}; the companion files scan
/// λ′ ∈ {−0.80, −0.90, −0.95, −0.99} at t = 2.
pub fn fig(kind: FigKind, out: &Path, nx: u32) -> Result<(), CliError> {
    if nx < 2 {
        return Err(CliError::Validation(vec![format!("--nx must be at least 2, got {nx}")]));
    }
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    let (prefix, label, which) = match kind {
        FigKind::Density => ("fig3", "density", GridObservable::Density),
        FigKind::Current => ("fig4", "current", GridObservable::Current),
    };

    let mut files = Vec::new();
    let main_name = format!("{prefix}_{label}.csv");
    let config = preset_config(-0.96, vec![0.0, 2.0, 4.0, 6.0], nx, out.join(&main_name));
    grid_command(&config, which, prefix, &[])?;
    files.push(main_name);

    for lambda_prime in [-0.80f64, -0.90, -0.95, -0.99] {
        let tag = (-lambda_prime * 100.0).round() as i64;
        let name = format!("{prefix}_{label}_lp{tag}.csv");
        let config = preset_config(lambda_prime, vec![2.0], nx, out.join(&name));
        grid_command(&config, which, prefix, &[])?;
        files.push(name);
    }

    let manifest = FigManifest { dir: out.display().to_string(), files };
    emit(None, &render_json(&manifest))
}

fn preset_config(lambda_prime: f64, t_values: Vec<f64>, nx: u32, path: PathBuf) -> RunConfig {
    RunConfig {
        potential: PotentialSection {
            family: FamilyName::Sech,
            a: Some(0.0025),
            prefactor: Some(FRAC_PI_2),
            table: None,
        },
        quench: QuenchSection {
            lambda: 0.0,
            lambda_prime,
            mu: 1.0,
            v_fermi: 1.0,
            delta: 0.005,
        },
        grid: GridSection { x_min: -1.5, x_max: 1.5, nx, t_values },
        // The t = 0 panel needs more bisections than the default cap at
        // this interaction range; the extra headroom costs nothing later.
        quadrature: QuadratureSection { max_subdivisions: 4096, ..QuadratureSection::default() },
        output: OutputSection { format: FormatName::Csv, path: Some(path), precision: 17 },
        gology: None,
    }
}

fn join_floats(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
