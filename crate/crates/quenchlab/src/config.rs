//! TOML run configuration: section types with documented defaults, strict
//! unknown-key rejection, and the validation pass that turns the file into
//! core setups. Positions are in units of the interaction length ℓ, times
//! in ℓ/v_fermi.

use crate::error::CliError;
use quenchlab_core::observables::QuenchSetup;
use quenchlab_core::quad::OscillatoryMethod;
use quenchlab_core::{GologySpec, PotentialSpec, QuadratureSpec, WallProfile};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Interaction potential V̂(p), even in p.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub family: FamilyName,
    /// Interaction range in units of ℓ; required for the analytic families,
    /// unused for `tabulated`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Strength in energy·ℓ; defaults to πv_fermi/2, the normalization for
    /// which 2λV̂(0)/(πv_F) = λ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefactor: Option<f64>,
    /// Sample file for family = "tabulated": lines `p,value` with p ≥ 0
    /// strictly increasing, `#` comments allowed. Relative paths resolve
    /// against the config file's directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Sech,
    Gaussian,
    ExpDecay,
    Tabulated,
}

/// Couplings and the domain-wall field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuenchSection {
    /// Coupling of the prepared state.
    pub lambda: f64,
    /// Coupling driving the evolution.
    pub lambda_prime: f64,
    /// Domain-wall height μ; observables are exactly linear in it.
    pub mu: f64,
    /// Bare Fermi velocity.
    pub v_fermi: f64,
    /// Wall smoothing width δ in units of ℓ.
    pub delta: f64,
}

impl Default for QuenchSection {
    fn default() -> Self {
        Self { lambda: 0.0, lambda_prime: 0.0, mu: 1.0, v_fermi: 1.0, delta: 0.05 }
    }
}

/// Evaluation grid; x in units of ℓ, t in ℓ/v_fermi.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    /// Number of x samples, endpoints included.
    pub nx: u32,
    /// Times, ascending and nonnegative; empty emits a header-only table.
    pub t_values: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { x_min: -5.0, x_max: 5.0, nx: 201, t_values: Vec::new() }
    }
}

/// Oscillatory quadrature controls; defaults mirror the engine's.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard momentum cutoff; omitted means automatic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    pub max_subdivisions: u32,
    pub oscillatory_method: MethodName,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let spec = QuadratureSpec::default();
        Self {
            rel_tol: spec.rel_tol,
            abs_tol: spec.abs_tol,
            p_max: spec.p_max,
            max_subdivisions: spec.max_subdivisions,
            oscillatory_method: MethodName::PanelPerPeriod,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    PanelPerPeriod,
    ChangeOfVariables,
}

/// Artifact format and destination.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub format: FormatName,
    /// Output file; omitted writes to stdout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Significant digits for CSV cells, 1 to 17.
    pub precision: u8,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { format: FormatName::Csv, path: None, precision: 17 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatName {
    Csv,
    Json,
}

/// Optional two-coupling model for `gology-check`. Scalar keys come before
/// the `v2`/`v4` sub-tables, as TOML requires.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GologySection {
    /// Coupling between opposite chiralities.
    pub g2: f64,
    /// Coupling within one chirality.
    pub g4: f64,
    /// Ring circumference in units of ℓ.
    pub l: f64,
    /// Right-mover chemical-potential offset; must balance mu_minus.
    #[serde(default)]
    pub mu_plus: f64,
    /// Left-mover chemical-potential offset; must equal −mu_plus.
    #[serde(default)]
    pub mu_minus: f64,
    /// Momentum profile of the g2 interaction.
    pub v2: PotentialSection,
    /// Momentum profile of the g4 interaction.
    pub v4: PotentialSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSection,
    pub quench: QuenchSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gology: Option<GologySection>,
}

/// Parse and validate config text with table paths anchored at the working
/// directory.
#[cfg(test)]
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_in(text, Path::new("."))
}

/// Parse and validate config text; relative table paths resolve against
/// `base`. Unknown keys are parse errors, inadmissible values are collected
/// into one validation error.
pub fn parse_config_in(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let mut config: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    config.anchor_tables(base);
    config.resolve();
    let violations = config.violations();
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(CliError::Validation(violations))
    }
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    parse_config_in(&text, base)
}

impl RunConfig {
    fn anchor_tables(&mut self, base: &Path) {
        self.potential.anchor_table(base);
        if let Some(gology) = &mut self.gology {
            gology.v2.anchor_table(base);
            gology.v4.anchor_table(base);
        }
    }

    /// Fill documented defaults that depend on other fields, so the config
    /// echo shows every value actually used.
    fn resolve(&mut self) {
        let v_f = self.quench.v_fermi;
        self.potential.resolve(v_f);
        if let Some(gology) = &mut self.gology {
            gology.v2.resolve(v_f);
            gology.v4.resolve(v_f);
        }
    }

    /// Every rule violation in one pass; an empty list means admissible.
    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();

        let spec = self.potential.build("potential", &mut out);
        let quench_ok = self.quench.check(&mut out);
        if let (Some(spec), true) = (&spec, quench_ok) {
            for (label, coupling) in [
                ("quench.lambda", self.quench.lambda),
                ("quench.lambda_prime", self.quench.lambda_prime),
            ] {
                if let Err(e) =
                    quenchlab_core::dispersion::DispersionProfile::new(spec.clone(), coupling, self.quench.v_fermi)
                {
                    out.push(format!("{label} = {coupling}: {e}"));
                }
            }
        }

        self.grid.check(&mut out);
        self.quadrature.check(&mut out);
        self.output.check(&mut out);
        if let Some(gology) = &self.gology {
            gology.check(self.quench.v_fermi, quench_ok, &mut out);
        }
        out
    }

    /// Resolved-config echo for provenance headers; formatting is stable
    /// across runs.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec, CliError> {
        let mut violations = Vec::new();
        self.potential
            .build("potential", &mut violations)
            .ok_or(CliError::Validation(violations))
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.quadrature.rel_tol,
            abs_tol: self.quadrature.abs_tol,
            p_max: self.quadrature.p_max,
            max_subdivisions: self.quadrature.max_subdivisions,
            oscillatory_method: match self.quadrature.oscillatory_method {
                MethodName::PanelPerPeriod => OscillatoryMethod::PanelPerPeriod,
                MethodName::ChangeOfVariables => OscillatoryMethod::ChangeOfVariables,
            },
        }
    }

    pub fn wall(&self) -> WallProfile {
        WallProfile::infinite(self.quench.delta, self.quench.mu)
    }

    pub fn setup(&self) -> Result<QuenchSetup, CliError> {
        let setup = QuenchSetup::new(
            self.potential_spec()?,
            self.quench.lambda,
            self.quench.lambda_prime,
            self.quench.v_fermi,
            self.wall(),
            self.quadrature_spec(),
        )?;
        Ok(setup)
    }

    /// The two-coupling spec; a missing `[gology]` section is a validation
    /// failure of this command, not of the config.
    pub fn gology_spec(&self) -> Result<GologySpec, CliError> {
        let section = self.gology.as_ref().ok_or_else(|| {
            CliError::Validation(vec!["gology-check needs a [gology] section".into()])
        })?;
        let mut violations = Vec::new();
        let v2 = section.v2.build("gology.v2", &mut violations);
        let v4 = section.v4.build("gology.v4", &mut violations);
        if let (Some(v2), Some(v4)) = (v2, v4) {
            match GologySpec::new(
                section.g2,
                section.g4,
                v2,
                v4,
                self.quench.v_fermi,
                section.mu_plus,
                section.mu_minus,
                section.l,
            ) {
                Ok(spec) => return Ok(spec),
                Err(e) => violations.push(format!("gology: {e}")),
            }
        }
        Err(CliError::Validation(violations))
    }

    /// Evenly spaced x samples, endpoints included.
    pub fn x_grid(&self) -> Vec<f64> {
        let n = self.grid.nx as usize;
        let (lo, hi) = (self.grid.x_min, self.grid.x_max);
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

impl PotentialSection {
    fn anchor_table(&mut self, base: &Path) {
        if let Some(table) = &self.table {
            if table.is_relative() {
                self.table = Some(base.join(table));
            }
        }
    }

    fn resolve(&mut self, v_fermi: f64) {
        if self.prefactor.is_none() {
            self.prefactor = Some(0.5 * PI * v_fermi);
        }
    }

    /// Build the core spec, pushing violations under the `context` key
    /// prefix ("potential", "gology.v2", ...) instead of failing early.
    fn build(&self, context: &str, violations: &mut Vec<String>) -> Option<PotentialSpec> {
        let before = violations.len();
        let prefactor = self.prefactor.unwrap_or(0.0);
        if !prefactor.is_finite() {
            violations.push(format!("{context}.prefactor must be finite"));
        }

        let spec = match self.family {
            FamilyName::Tabulated => {
                if self.a.is_some() {
                    violations.push(format!("{context}.a is not used by the tabulated family"));
                }
                match &self.table {
                    None => {
                        violations.push(format!("{context}.table is required for the tabulated family"));
                        None
                    }
                    Some(path) => match load_table(path) {
                        Ok(samples) => match PotentialSpec::tabulated(samples, prefactor) {
                            Ok(spec) => Some(spec),
                            Err(e) => {
                                violations.push(format!("{context}.table: {e}"));
                                None
                            }
                        },
                        Err(message) => {
                            violations.push(format!("{context}.table: {message}"));
                            None
                        }
                    },
                }
            }
            analytic => {
                if self.table.is_some() {
                    violations.push(format!("{context}.table is only valid for the tabulated family"));
                }
                match self.a {
                    None => {
                        violations.push(format!("{context}.a is required for this family"));
                        None
                    }
                    Some(a) if !(a > 0.0 && a.is_finite()) => {
                        violations.push(format!("{context}.a must be positive and finite, got {a}"));
                        None
                    }
                    Some(a) => Some(match analytic {
                        FamilyName::Sech => PotentialSpec::sech(a, prefactor),
                        FamilyName::Gaussian => PotentialSpec::gaussian(a, prefactor),
                        FamilyName::ExpDecay => PotentialSpec::exp_decay(a, prefactor),
                        FamilyName::Tabulated => unreachable!("handled above"),
                    }),
                }
            }
        };
        if violations.len() > before {
            return None;
        }
        spec
    }
}

impl QuenchSection {
    fn check(&self, out: &mut Vec<String>) -> bool {
        let before = out.len();
        for (name, value) in [
            ("quench.lambda", self.lambda),
            ("quench.lambda_prime", self.lambda_prime),
            ("quench.mu", self.mu),
            ("quench.v_fermi", self.v_fermi),
            ("quench.delta", self.delta),
        ] {
            if !value.is_finite() {
                out.push(format!("{name} must be finite, got {value}"));
            }
        }
        if self.v_fermi <= 0.0 {
            out.push(format!("quench.v_fermi must be positive, got {}", self.v_fermi));
        }
        if self.delta <= 0.0 {
            out.push(format!("quench.delta must be positive, got {}", self.delta));
        }
        if self.mu < 0.0 {
            out.push(format!("quench.mu must be nonnegative, got {}", self.mu));
        }
        out.len() == before
    }
}

impl GridSection {
    fn check(&self, out: &mut Vec<String>) {
        if !self.x_min.is_finite() || !self.x_max.is_finite() {
            out.push("grid.x_min and grid.x_max must be finite".into());
        } else if self.x_min >= self.x_max {
            out.push(format!("grid.x_min = {} must be below grid.x_max = {}", self.x_min, self.x_max));
        }
        if self.nx < 2 {
            out.push(format!("grid.nx must be at least 2, got {}", self.nx));
        }
        for (i, &t) in self.t_values.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                out.push(format!("grid.t_values[{i}] must be finite and nonnegative, got {t}"));
            }
        }
        if self.t_values.windows(2).any(|w| w[1] < w[0]) {
            out.push("grid.t_values must be sorted ascending".into());
        }
    }
}

impl QuadratureSection {
    fn check(&self, out: &mut Vec<String>) {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            out.push(format!("quadrature.rel_tol must be positive and finite, got {}", self.rel_tol));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            out.push(format!("quadrature.abs_tol must be positive and finite, got {}", self.abs_tol));
        }
        if let Some(p_max) = self.p_max {
            if !(p_max > 0.0 && p_max.is_finite()) {
                out.push(format!("quadrature.p_max must be positive and finite, got {p_max}"));
            }
        }
        if self.max_subdivisions == 0 {
            out.push("quadrature.max_subdivisions must be at least 1".into());
        }
    }
}

impl OutputSection {
    fn check(&self, out: &mut Vec<String>) {
        if !(1..=17).contains(&self.precision) {
            out.push(format!("output.precision must be between 1 and 17, got {}", self.precision));
        }
    }
}

impl GologySection {
    fn check(&self, v_fermi: f64, quench_ok: bool, out: &mut Vec<String>) {
        for (name, value) in [
            ("gology.g2", self.g2),
            ("gology.g4", self.g4),
            ("gology.l", self.l),
            ("gology.mu_plus", self.mu_plus),
            ("gology.mu_minus", self.mu_minus),
        ] {
            if !value.is_finite() {
                out.push(format!("{name} must be finite, got {value}"));
            }
        }
        let v2 = self.v2.build("gology.v2", out);
        let v4 = self.v4.build("gology.v4", out);
        // GologySpec::new asserts v_f > 0, which quench.check already vets.
        if let (Some(v2), Some(v4), true) = (v2, v4, quench_ok) {
            if let Err(e) = GologySpec::new(
                self.g2, self.g4, v2, v4, v_fermi, self.mu_plus, self.mu_minus, self.l,
            ) {
                out.push(format!("gology: {e}"));
            }
        }
    }
}

/// Read a `p,value` sample table; `#` comments and blank lines are skipped.
fn load_table(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut samples = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let (p, value) = match (fields.next(), fields.next(), fields.next()) {
            (Some(p), Some(value), None) => (p.trim(), value.trim()),
            _ => return Err(format!("line {}: expected `p,value`", index + 1)),
        };
        let p: f64 = p.parse().map_err(|_| format!("line {}: bad momentum `{p}`", index + 1))?;
        let value: f64 =
            value.parse().map_err(|_| format!("line {}: bad value `{value}`", index + 1))?;
        samples.push((p, value));
    }
    Ok(samples)
}
