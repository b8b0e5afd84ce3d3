//! TOML run configuration: every section is optional and every field has a
//! default, so an empty file describes the standard caesium drop.  Unknown
//! or misspelled fields are rejected with the offending name.

use serde::{Deserialize, Serialize};

use gravphase::gravity::GravityEnvironment;
use gravphase::quantities::{
    Frequency, GravAccel, GravPotential, Length, Mass, Phase, Time, Velocity, Wavenumber,
};
use gravphase::scenario::{InternalModel, MzScenario};
use gravphase::species::AtomSpecies;

/// A whole run configuration, mirroring the TOML file.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub species: SpeciesConfig,
    pub environment: EnvironmentConfig,
    pub sequence: SequenceConfig,
    pub initial: InitialConfig,
    pub integration: IntegrationConfig,
    pub verify: VerifyConfig,
    pub scan: ScanConfig,
    pub fringes: FringesConfig,
    pub clock: ClockConfig,
    pub invert: InvertConfig,
    pub sweep: SweepConfig,
    pub sensitivity: SensitivityConfig,
}

/// Which atom falls, and with what equivalence ratio.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SpeciesConfig {
    /// Baseline preset: "cesium-133" or "rubidium-87".
    pub preset: String,
    /// Overrides the preset's display name.
    pub name: Option<String>,
    /// Overrides the inertial mass (kg).
    pub mass: Option<f64>,
    /// Equivalence ratio η = m_g/m_i.
    pub eta: f64,
    /// Overrides the hyperfine splitting (Hz).
    pub hyperfine_splitting: Option<f64>,
    /// Overrides the optical transition frequency (Hz).
    pub optical_frequency: Option<f64>,
}

impl Default for SpeciesConfig {
    fn default() -> Self {
        Self {
            preset: "cesium-133".into(),
            name: None,
            mass: None,
            eta: 1.0,
            hyperfine_splitting: None,
            optical_frequency: None,
        }
    }
}

/// The gravitational field the atom falls through.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentConfig {
    /// "uniform" or "point-mass".
    pub model: String,
    /// Field strength for the uniform model (m/s²).
    pub g: f64,
    /// Constant potential offset for the uniform model (J/kg).
    pub gauge_offset: f64,
    /// G·M for the point-mass model (m³/s²); positions become radii.
    pub gm: Option<f64>,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        Self {
            model: "uniform".into(),
            g: 9.8,
            gauge_offset: 0.0,
            gm: None,
        }
    }
}

/// The π/2 – π – π/2 pulse sequence.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SequenceConfig {
    /// Two-photon wavenumber κ (rad/m).  Omitted: derived from the
    /// species' optical frequency as 2·(2πν/c).
    pub kappa: Option<f64>,
    /// Pulse separation T (s).
    pub interrogation_time: f64,
    /// Laser phases [φ₁, φ₂, φ₃] (rad).
    pub pulse_phases: [f64; 3],
}

impl Default for SequenceConfig {
    fn default() -> Self {
        Self {
            kappa: None,
            interrogation_time: 0.1,
            pulse_phases: [0.0, 0.0, 0.0],
        }
    }
}

/// Where and how fast the atom is launched.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    /// Launch position (m).
    pub position: f64,
    /// Launch velocity (m/s).
    pub velocity: f64,
}

/// Numerical-integration controls.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrationConfig {
    /// Simpson subdivisions per trajectory segment (even, ≥ 2).
    pub steps_per_segment: usize,
    /// "hyperfine" splits the clock states; "none" ignores them.
    pub internal_energy: String,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            steps_per_segment: 1000,
            internal_energy: "hyperfine".into(),
        }
    }
}

/// Tolerance of the `verify` command.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Maximum allowed pairwise relative deviation.
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { tolerance: 1e-9 }
    }
}

/// Grid for the `scan` command.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// "pulse-phase", "interrogation-time", or "gravity".
    pub variable: String,
    /// First grid value.
    pub start: f64,
    /// Last grid value.
    pub stop: f64,
    /// Number of grid points (≥ 2).
    pub points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            variable: "pulse-phase".into(),
            start: -std::f64::consts::PI,
            stop: std::f64::consts::PI,
            points: 33,
        }
    }
}

/// Controls for the `fringes` command.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FringesConfig {
    /// Velocity of the unkicked wave (m/s); the kicked one adds the recoil.
    pub velocity_low: f64,
    /// Observation window width (m).  Omitted: 20 fringes.
    pub window: Option<f64>,
    /// Intensity samples across the window.
    pub samples: usize,
}

impl Default for FringesConfig {
    fn default() -> Self {
        Self {
            velocity_low: 0.0,
            window: None,
            samples: 4096,
        }
    }
}

/// Station layout for the `clock-compare` command.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ClockConfig {
    /// Station 1 position (m), or radius for the point-mass model.
    pub position_low: f64,
    /// Station 2 position (m), or radius for the point-mass model.
    pub position_high: f64,
    /// Comparison duration (s).
    pub duration: f64,
    /// Proper clock frequency (Hz).  Omitted: the species' hyperfine line.
    pub frequency: Option<f64>,
}

impl Default for ClockConfig {
    fn default() -> Self {
        Self {
            position_low: 0.0,
            position_high: 1.0,
            duration: 1.0,
            frequency: None,
        }
    }
}

/// Controls for the `invert` command.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct InvertConfig {
    /// Phase to invert (rad).  Omitted: the scenario's own integrated phase.
    pub delta_phase: Option<f64>,
    /// White population noise per scan point for the Monte Carlo.
    pub noise_sigma: f64,
    /// Noisy trials to run; 0 skips the Monte Carlo.
    pub trials: u64,
    /// Points in the synthetic fringe scan.
    pub scan_points: usize,
}

impl Default for InvertConfig {
    fn default() -> Self {
        Self {
            delta_phase: None,
            noise_sigma: 1e-3,
            trials: 100,
            scan_points: 16,
        }
    }
}

/// Grid for the `sweep-eta` command.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// First equivalence ratio.
    pub start: f64,
    /// Last equivalence ratio.
    pub stop: f64,
    /// Number of grid points (≥ 2).
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start: 0.9,
            stop: 1.1,
            points: 11,
        }
    }
}

/// Reference light for the `sensitivity` command.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivityConfig {
    /// Reference photon frequency (Hz).  Omitted: the species' optical line.
    pub reference_frequency: Option<f64>,
}

/// A configuration error: the offending field and why it is rejected.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn field_err<T>(field: &str, reason: impl std::fmt::Display) -> Result<T, ConfigError> {
    Err(ConfigError(format!("{field}: {reason}")))
}

impl Config {
    /// Parses a TOML document, rejecting unknown fields by name.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    /// The configured atom, with preset fields overridden as requested.
    pub fn species(&self) -> Result<AtomSpecies, ConfigError> {
        let preset = match self.species.preset.as_str() {
            "cesium-133" => AtomSpecies::cesium_133(),
            "rubidium-87" => AtomSpecies::rubidium_87(),
            other => {
                return field_err(
                    "species.preset",
                    format!("unknown preset {other:?}; expected \"cesium-133\" or \"rubidium-87\""),
                )
            }
        };
        let name = self
            .species
            .name
            .clone()
            .unwrap_or_else(|| preset.name().to_string());
        let mass = self.species.mass.unwrap_or(preset.inertial_mass().value());
        let hyperfine = self
            .species
            .hyperfine_splitting
            .unwrap_or(preset.hyperfine_splitting().value());
        let optical = self
            .species
            .optical_frequency
            .unwrap_or(preset.optical_frequency().value());

        let mass = Mass::new(mass).map_err(|e| ConfigError(format!("species.mass: {e}")))?;
        let hyperfine = Frequency::new(hyperfine)
            .map_err(|e| ConfigError(format!("species.hyperfine_splitting: {e}")))?;
        let optical = Frequency::new(optical)
            .map_err(|e| ConfigError(format!("species.optical_frequency: {e}")))?;
        AtomSpecies::custom(name, mass, self.species.eta, hyperfine, optical)
            .map_err(|e| ConfigError(format!("species: {e}")))
    }

    /// The configured gravitational environment.
    pub fn environment(&self) -> Result<GravityEnvironment, ConfigError> {
        match self.environment.model.as_str() {
            "uniform" => {
                let g = GravAccel::new(self.environment.g)
                    .map_err(|e| ConfigError(format!("environment.g: {e}")))?;
                let gauge = GravPotential::new(self.environment.gauge_offset)
                    .map_err(|e| ConfigError(format!("environment.gauge_offset: {e}")))?;
                Ok(GravityEnvironment::uniform_with_gauge(g, gauge))
            }
            "point-mass" => {
                let gm = match self.environment.gm {
                    Some(gm) => gm,
                    None => {
                        return field_err(
                            "environment.gm",
                            "required when environment.model = \"point-mass\"",
                        )
                    }
                };
                GravityEnvironment::point_mass(gm)
                    .map_err(|e| ConfigError(format!("environment.gm: {e}")))
            }
            other => field_err(
                "environment.model",
                format!("unknown model {other:?}; expected \"uniform\" or \"point-mass\""),
            ),
        }
    }

    /// The two-photon wavenumber: explicit, or derived from the species'
    /// optical frequency as 2·(2πν/c).
    pub fn kappa(&self, species: &AtomSpecies) -> Result<Wavenumber, ConfigError> {
        let value = self.sequence.kappa.unwrap_or_else(|| {
            2.0 * std::f64::consts::TAU * species.optical_frequency().value()
                / gravphase::constants::C
        });
        Wavenumber::new(value).map_err(|e| ConfigError(format!("sequence.kappa: {e}")))
    }

    /// The fully resolved interferometer scenario.
    pub fn scenario(&self) -> Result<MzScenario, ConfigError> {
        let species = self.species()?;
        let env = self.environment()?;
        if !env.is_uniform() {
            return field_err(
                "environment.model",
                "interferometer commands need the \"uniform\" model \
                 (\"point-mass\" serves clock-compare)",
            );
        }
        let kappa = self.kappa(&species)?;
        let interrogation = Time::new(self.sequence.interrogation_time)
            .map_err(|e| ConfigError(format!("sequence.interrogation_time: {e}")))?;

        let mut phases = [Phase::new(0.0).unwrap(); 3];
        for (slot, &value) in phases.iter_mut().zip(&self.sequence.pulse_phases) {
            *slot = Phase::new(value)
                .map_err(|e| ConfigError(format!("sequence.pulse_phases: {e}")))?;
        }
        let position = Length::new(self.initial.position)
            .map_err(|e| ConfigError(format!("initial.position: {e}")))?;
        let velocity = Velocity::new(self.initial.velocity)
            .map_err(|e| ConfigError(format!("initial.velocity: {e}")))?;
        let internal = match self.integration.internal_energy.as_str() {
            "hyperfine" => InternalModel::Hyperfine,
            "none" => InternalModel::None,
            other => {
                return field_err(
                    "integration.internal_energy",
                    format!("unknown value {other:?}; expected \"hyperfine\" or \"none\""),
                )
            }
        };

        let scenario = MzScenario::new(species, env, kappa, interrogation)
            .map_err(|e| ConfigError(format!("sequence: {e}")))?
            .with_pulse_phases(phases)
            .with_initial_conditions(position, velocity)
            .with_internal_model(internal);
        scenario
            .with_steps_per_segment(self.integration.steps_per_segment)
            .map_err(|e| ConfigError(format!("integration.steps_per_segment: {e}")))
    }

    /// An evenly spaced grid, validated for the named section.
    pub fn grid(section: &str, start: f64, stop: f64, points: usize) -> Result<Vec<f64>, ConfigError> {
        if points < 2 {
            return field_err(&format!("{section}.points"), "at least 2 points are needed");
        }
        if !(start.is_finite() && stop.is_finite()) {
            return field_err(section, "start and stop must be finite");
        }
        if stop <= start {
            return field_err(
                section,
                format!("stop ({stop}) must exceed start ({start})"),
            );
        }
        let step = (stop - start) / (points - 1) as f64;
        Ok((0..points).map(|i| start + i as f64 * step).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_standard_drop() {
        let config = Config::from_toml("").unwrap();
        let scenario = config.scenario().unwrap();
        assert_eq!(scenario.species().name(), "cesium-133");
        // κ is derived from the caesium optical line when not pinned.
        let derived = 2.0 * std::f64::consts::TAU * 3.52e14 / gravphase::constants::C;
        assert_eq!(scenario.kappa().value(), derived);
        assert_eq!(scenario.interrogation_time().value(), 0.1);
        assert_eq!(scenario.uniform_g().value(), 9.8);
    }

    #[test]
    fn unknown_fields_are_named() {
        let err = Config::from_toml("[sequence]\nkapa = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("kapa"), "message: {err}");
    }

    #[test]
    fn ill_typed_fields_are_rejected() {
        assert!(Config::from_toml("[sequence]\nkappa = \"fast\"\n").is_err());
    }

    #[test]
    fn kappa_derives_from_the_optical_line_when_omitted() {
        let config =
            Config::from_toml("[sequence]\nkappa = false\n").map(|_| ()).unwrap_err();
        assert!(config.to_string().contains("kappa"));
        let config = Config::from_toml("[sequence]\ninterrogation_time = 0.2\n").unwrap();
        let species = config.species().unwrap();
        let kappa = config.kappa(&species).unwrap().value();
        let expected = 2.0 * std::f64::consts::TAU * 3.52e14 / gravphase::constants::C;
        assert!((kappa - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn overrides_replace_preset_fields() {
        let config = Config::from_toml(
            "[species]\npreset = \"rubidium-87\"\nmass = 1.5e-25\neta = 1.1\n",
        )
        .unwrap();
        let species = config.species().unwrap();
        assert_eq!(species.name(), "rubidium-87");
        assert_eq!(species.inertial_mass().value(), 1.5e-25);
        assert_eq!(species.ep_ratio(), 1.1);
        assert_eq!(species.hyperfine_splitting().value(), 6.8347e9);
    }

    #[test]
    fn point_mass_model_is_refused_for_interferometry() {
        let config = Config::from_toml(
            "[environment]\nmodel = \"point-mass\"\ngm = 3.986e14\n",
        )
        .unwrap();
        assert!(config.environment().is_ok());
        let err = config.scenario().unwrap_err();
        assert!(err.to_string().contains("environment.model"), "message: {err}");
    }

    #[test]
    fn bad_field_values_name_the_field() {
        let cases = [
            ("[environment]\ng = nan\n", "environment.g"),
            ("[sequence]\ninterrogation_time = 0.0\n", "sequence"),
            ("[integration]\nsteps_per_segment = 1\n", "integration.steps_per_segment"),
            ("[species]\npreset = \"helium\"\n", "species.preset"),
            ("[integration]\ninternal_energy = \"all\"\n", "integration.internal_energy"),
        ];
        for (text, field) in cases {
            let config = Config::from_toml(text).unwrap();
            let err = config.scenario().unwrap_err();
            assert!(
                err.to_string().contains(field),
                "{text:?} produced {err}, expected it to name {field}"
            );
        }
    }

    #[test]
    fn grids_are_validated() {
        assert!(Config::grid("scan", 0.0, 1.0, 1).is_err());
        assert!(Config::grid("scan", 1.0, 0.0, 5).is_err());
        let grid = Config::grid("scan", 0.0, 1.0, 5).unwrap();
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[4], 1.0);
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = Config::from_toml("[species]\neta = 1.2\n").unwrap();
        let json = serde_json::to_string(&config).unwrap();
        let back: Config = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
    }
}
