//! Run configuration: flat TOML with dotted keys, plus `--set` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::bath::{BathGrid, BathOscillator, BathSpec};
use crate::damping::DampingModel;
use crate::dynamics::BathPreparation;
use crate::oscillator::{default_drude_cutoff, OscillatorSpec};
use crate::thermo::DosOptions;
use crate::units::ThermalParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub damping: DampingConfig,
    pub thermal: ThermalConfig,
    pub numeric: NumericConfig,
    pub spectrum: SpectrumConfig,
    pub correlation: CorrelationConfig,
    pub moments: SweepConfig,
    pub density_matrix: DensityMatrixConfig,
    pub partition: SweepConfig,
    pub dos: DosConfig,
    pub noise: NoiseConfig,
    pub simulate: SimulateConfig,
    pub decay: DecayConfig,
    pub action: ActionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(rename = "M")]
    pub mass: f64,
    pub omega0: f64,
    /// Length scale of the cubic potential.
    pub q0: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self { mass: 1.0, omega0: 1.0, q0: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DampingKind {
    #[default]
    Ohmic,
    Drude,
    Bath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct DampingConfig {
    pub kind: DampingKind,
    pub gamma: f64,
    pub cutoff: Option<f64>,
    /// CSV with columns mass, frequency, coupling.
    pub bath_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalConfig {
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    pub beta: Option<f64>,
    pub hbar: f64,
    pub kb: f64,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        Self { temperature: None, beta: None, hbar: 1.0, kb: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    #[default]
    Linear,
    Tangent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericConfig {
    /// Direct Matsubara terms before the tail correction.
    pub n_max: Option<u64>,
    /// Bath size for discretized continua.
    #[serde(rename = "N")]
    pub n_bath: usize,
    pub grid: GridKind,
    pub omega_max: Option<f64>,
    /// Samples per imaginary-time path.
    #[serde(rename = "J")]
    pub path_samples: usize,
    pub route_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self { n_max: None, n_bath: 2000, grid: GridKind::Linear, omega_max: None, path_samples: 64, route_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumTarget {
    #[default]
    Oscillator,
    Resistor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub target: SpectrumTarget,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub resistance: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { target: SpectrumTarget::Oscillator, omega_min: -5.0, omega_max: 5.0, points: 201, resistance: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationConfig {
    pub t_max: f64,
    pub points: usize,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self { t_max: 20.0, points: 201 }
    }
}

/// Temperatures to sweep; empty means the thermal section's value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub temperatures: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityMatrixConfig {
    /// Half-width of the grid in units of the position spread.
    pub extent: f64,
    pub points: usize,
}

impl Default for DensityMatrixConfig {
    fn default() -> Self {
        Self { extent: 3.0, points: 41 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DosConfig {
    /// Excitation-energy range in units of ħω₀.
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
    pub contour: f64,
    pub contour_shift: f64,
    pub step: f64,
    pub y_start: f64,
    pub y_cap: f64,
    pub tol: f64,
    pub resonances: usize,
    /// Residue-route cross-check; 0 disables it.
    pub poles_per_root: usize,
}

impl Default for DosConfig {
    fn default() -> Self {
        let o = DosOptions::default();
        Self {
            e_min: 0.05,
            e_max: 6.0,
            points: 400,
            contour: o.contour,
            contour_shift: o.contour_shift,
            step: o.step,
            y_start: o.y_start,
            y_cap: o.y_cap,
            tol: o.tol,
            resonances: 5,
            poles_per_root: 0,
        }
    }
}

impl DosConfig {
    pub fn options(&self) -> DosOptions {
        DosOptions {
            contour: self.contour,
            contour_shift: self.contour_shift,
            step: self.step,
            y_start: self.y_start,
            y_cap: self.y_cap,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub t_max: f64,
    pub points: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { t_max: 5.0, points: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(rename = "N")]
    pub n_bath: usize,
    pub t_max: f64,
    pub points: usize,
    pub preparation: BathPreparation,
    pub q_mean: f64,
    pub p_mean: f64,
    /// Defaults to the ground-state spreads ħ/2Mω₀ and ħMω₀/2.
    pub q_var: Option<f64>,
    pub p_var: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n_bath: 200,
            t_max: 10.0,
            points: 201,
            preparation: BathPreparation::Shifted,
            q_mean: 1.0,
            p_mean: 0.0,
            q_var: None,
            p_var: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    /// Temperature range; defaults bracket the crossover.
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: usize,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self { t_min: None, t_max: None, points: 41 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionConfig {
    /// CSV of path samples (last column used); otherwise a single cosine mode.
    pub path_file: Option<PathBuf>,
    pub amplitude: f64,
    pub mode: u32,
}

impl Default for ActionConfig {
    fn default() -> Self {
        Self { path_file: None, amplitude: 1.0, mode: 1 }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses the config text (if any), applies `key=value` overrides, and
/// deserializes with unknown-key rejection.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            // parse into the typed form first so diagnostics point into the user's file
            toml::from_str::<RunConfig>(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            toml::from_str::<toml::Table>(&text).map_err(|e| config_err(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    let text = toml::to_string(&table).map_err(|e| config_err(e.to_string()))?;
    toml::from_str::<RunConfig>(&text).map_err(|e| config_err(format!("after --set overrides: {e}")))
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item.split_once('=').ok_or_else(|| config_err(format!("--set expects key=value, got '{item}'")))?;
    let key = key.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(format!("malformed key '{key}'")));
    }
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| config_err(format!("'{part}' in '{key}' is not a section")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn oscillator(&self) -> Result<OscillatorSpec, CliError> {
        positive("system.M", self.system.mass)?;
        positive("system.omega0", self.system.omega0)?;
        OscillatorSpec::new(self.system.mass, self.system.omega0).map_err(|e| config_err(e.to_string()))
    }

    /// Thermal parameters; T = 1 when neither T nor beta is given.
    pub fn thermal(&self) -> Result<ThermalParams, CliError> {
        let t = &self.thermal;
        positive("thermal.hbar", t.hbar)?;
        positive("thermal.kb", t.kb)?;
        match (t.temperature, t.beta) {
            (Some(_), Some(_)) => Err(config_err("set only one of thermal.T and thermal.beta")),
            (_, Some(b)) => ThermalParams::from_beta(b, t.hbar, t.kb).map_err(|e| config_err(e.to_string())),
            (temp, None) => {
                ThermalParams::with_constants(temp.unwrap_or(1.0), t.hbar, t.kb).map_err(|e| config_err(e.to_string()))
            }
        }
    }

    pub fn thermal_at(&self, temperature: f64) -> Result<ThermalParams, CliError> {
        ThermalParams::with_constants(temperature, self.thermal.hbar, self.thermal.kb)
            .map_err(|e| config_err(e.to_string()))
    }

    /// Drude cutoff after defaulting.
    pub fn resolved_cutoff(&self) -> Result<Option<f64>, CliError> {
        let d = &self.damping;
        match d.kind {
            DampingKind::Drude => {
                let spec = self.oscillator()?;
                Ok(Some(d.cutoff.unwrap_or_else(|| default_drude_cutoff(&spec, d.gamma))))
            }
            _ => Ok(None),
        }
    }

    pub fn damping(&self) -> Result<DampingModel, CliError> {
        let d = &self.damping;
        if !(d.gamma >= 0.0) || !d.gamma.is_finite() {
            return Err(config_err(format!("damping.gamma must be >= 0, got {}", d.gamma)));
        }
        if d.kind != DampingKind::Drude && d.cutoff.is_some() {
            return Err(config_err("damping.cutoff only applies to kind = \"drude\""));
        }
        if d.kind != DampingKind::Bath && d.bath_file.is_some() {
            return Err(config_err("damping.bath_file only applies to kind = \"bath\""));
        }
        let model = match d.kind {
            DampingKind::Ohmic => DampingModel::ohmic(d.gamma),
            DampingKind::Drude => {
                let cutoff = self.resolved_cutoff()?.expect("drude cutoff");
                positive("damping.cutoff", cutoff)?;
                DampingModel::drude(d.gamma, cutoff)
            }
            DampingKind::Bath => {
                let path = d.bath_file.as_ref().ok_or_else(|| config_err("damping.kind = \"bath\" needs damping.bath_file"))?;
                let bath = read_bath(path)?;
                DampingModel::from_bath(bath, self.system.mass)
            }
        };
        model.map_err(|e| config_err(e.to_string()))
    }

    /// Grid for discretizing the continuum damping with `numeric.*`.
    pub fn bath_grid(&self) -> Result<BathGrid, CliError> {
        match self.numeric.grid {
            GridKind::Tangent => Ok(BathGrid::Tangent),
            GridKind::Linear => match self.numeric.omega_max {
                Some(w) => Ok(BathGrid::Linear { omega_max: positive("numeric.omega_max", w)? }),
                None => BathGrid::default_for(&self.damping()?).map_err(|e| config_err(format!("numeric.omega_max: {e}"))),
            },
        }
    }
}

pub fn read_bath(path: &Path) -> Result<BathSpec, CliError> {
    #[derive(Deserialize)]
    struct Row {
        mass: f64,
        frequency: f64,
        coupling: f64,
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let mut oscillators = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let r = row.map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        oscillators.push(BathOscillator { mass: r.mass, frequency: r.frequency, coupling: r.coupling });
    }
    BathSpec::new(oscillators).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// Path samples from the last column of a CSV file; a non-numeric first row is a header.
pub fn read_path_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let Some(field) = rec.iter().last() else { continue };
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(_) => return Err(config_err(format!("{}: line {}: '{field}' is not a number", path.display(), i + 1))),
        }
    }
    Ok(out)
}
