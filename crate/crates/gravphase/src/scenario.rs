//! A complete interferometer scenario: species, field, sequence geometry,
//! launch conditions, and integration controls in one validated bundle.

use crate::gravity::GravityEnvironment;
use crate::phase::{
    integrate_mz_phases, verify_equivalence_chain_with_tolerance, EquivalenceReport,
    InternalEnergies, PhaseBreakdown, DEFAULT_STEPS_PER_SEGMENT,
};
use crate::quantities::{GravAccel, Length, Phase, Time, Velocity, Wavenumber};
use crate::sequence::{build_mz_arms, MzArms, PulseSequence};
use crate::species::AtomSpecies;
use crate::{Error, Result};

/// Which internal level structure enters the phase model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InternalModel {
    /// Structureless test mass: both states at zero internal energy.
    None,
    /// Ground at 0, excited at the species' hyperfine splitting.
    Hyperfine,
}

/// The canonical Mach–Zehnder gravimeter scenario.
#[derive(Clone, Debug)]
pub struct MzScenario {
    species: AtomSpecies,
    gravity: GravityEnvironment,
    kappa: Wavenumber,
    interrogation_time: Time,
    initial_position: Length,
    initial_velocity: Velocity,
    pulse_phases: [Phase; 3],
    steps_per_segment: usize,
    internal_model: InternalModel,
}

impl MzScenario {
    /// A new scenario; the environment must be uniform (the trajectory
    /// model is exact parabolas) and κ and T positive.
    pub fn new(
        species: AtomSpecies,
        gravity: GravityEnvironment,
        kappa: Wavenumber,
        interrogation_time: Time,
    ) -> Result<Self> {
        if !gravity.is_uniform() {
            return Err(Error::Domain {
                op: "MzScenario::new",
                reason: "interferometer scenarios require a uniform gravity environment".into(),
            });
        }
        if kappa.value() <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "Wavenumber",
                value: kappa.value(),
                reason: "effective wavevector must be positive",
            });
        }
        if interrogation_time.value() <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "Time",
                value: interrogation_time.value(),
                reason: "interrogation time must be positive",
            });
        }
        let zero = Phase::new(0.0).expect("zero phase");
        Ok(Self {
            species,
            gravity,
            kappa,
            interrogation_time,
            initial_position: Length::new(0.0).expect("zero length"),
            initial_velocity: Velocity::new(0.0).expect("zero velocity"),
            pulse_phases: [zero; 3],
            steps_per_segment: DEFAULT_STEPS_PER_SEGMENT,
            internal_model: InternalModel::Hyperfine,
        })
    }

    /// Caesium atoms, g = 9.8 m/s², κ = 1.4748×10⁷ rad/m, T = 0.1 s.
    pub fn cesium_default() -> Self {
        Self::new(
            AtomSpecies::cesium_133(),
            GravityEnvironment::uniform(GravAccel::new(9.8).expect("preset g")),
            Wavenumber::new(1.4748e7).expect("preset wavevector"),
            Time::new(0.1).expect("preset interrogation time"),
        )
        .expect("canonical scenario is valid")
    }

    /// Replaces the launch position and velocity.
    pub fn with_initial_conditions(mut self, position: Length, velocity: Velocity) -> Self {
        self.initial_position = position;
        self.initial_velocity = velocity;
        self
    }

    /// Replaces the three laser phases (φ₁, φ₂, φ₃).
    pub fn with_pulse_phases(mut self, phases: [Phase; 3]) -> Self {
        self.pulse_phases = phases;
        self
    }

    /// Replaces the quadrature resolution (must be ≥ 2).
    pub fn with_steps_per_segment(mut self, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Config(format!(
                "steps_per_segment must be at least 2, got {steps}"
            )));
        }
        self.steps_per_segment = steps;
        Ok(self)
    }

    /// Replaces the internal level structure.
    pub fn with_internal_model(mut self, model: InternalModel) -> Self {
        self.internal_model = model;
        self
    }

    /// Replaces the species' equivalence-principle ratio.
    pub fn with_ep_ratio(mut self, eta: f64) -> Result<Self> {
        self.species = self.species.with_ep_ratio(eta)?;
        Ok(self)
    }

    /// Replaces the field strength (keeps the gauge at zero).
    pub fn with_gravity(mut self, g: GravAccel) -> Self {
        self.gravity = GravityEnvironment::uniform(g);
        self
    }

    /// Replaces the interrogation time (must be positive).
    pub fn with_interrogation_time(mut self, interrogation: Time) -> Result<Self> {
        if interrogation.value() <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "Time",
                value: interrogation.value(),
                reason: "interrogation time must be positive",
            });
        }
        self.interrogation_time = interrogation;
        Ok(self)
    }

    /// The species under test.
    pub fn species(&self) -> &AtomSpecies {
        &self.species
    }

    /// The gravitational environment (always uniform).
    pub fn gravity(&self) -> &GravityEnvironment {
        &self.gravity
    }

    /// Effective two-photon wavevector.
    pub fn kappa(&self) -> Wavenumber {
        self.kappa
    }

    /// Interrogation time T.
    pub fn interrogation_time(&self) -> Time {
        self.interrogation_time
    }

    /// Launch position.
    pub fn initial_position(&self) -> Length {
        self.initial_position
    }

    /// Launch velocity.
    pub fn initial_velocity(&self) -> Velocity {
        self.initial_velocity
    }

    /// Laser phases (φ₁, φ₂, φ₃).
    pub fn pulse_phases(&self) -> [Phase; 3] {
        self.pulse_phases
    }

    /// Quadrature resolution per segment.
    pub fn steps_per_segment(&self) -> usize {
        self.steps_per_segment
    }

    /// Internal level structure entering the phase model.
    pub fn internal_model(&self) -> InternalModel {
        self.internal_model
    }

    /// Field strength of the uniform environment.
    pub fn uniform_g(&self) -> GravAccel {
        match self.gravity {
            GravityEnvironment::Uniform { g, .. } => g,
            GravityEnvironment::PointMass { .. } => unreachable!("validated at construction"),
        }
    }

    /// The internal energies selected by the scenario.
    pub fn internal_energies(&self) -> InternalEnergies {
        match self.internal_model {
            InternalModel::None => InternalEnergies::none(),
            InternalModel::Hyperfine => InternalEnergies::hyperfine(&self.species),
        }
    }

    /// The pulse sequence with this scenario's phases installed.
    pub fn sequence(&self) -> Result<PulseSequence> {
        PulseSequence::mach_zehnder(self.kappa, self.interrogation_time)?
            .with_pulse_phases(self.pulse_phases)
    }

    /// Builds both arm trajectories.
    pub fn build_arms(&self) -> Result<MzArms> {
        build_mz_arms(
            &self.species,
            &self.gravity,
            &self.sequence()?,
            self.initial_position,
            self.initial_velocity,
        )
    }

    /// Integrates the full phase breakdown.
    pub fn phase_breakdown(&self) -> Result<PhaseBreakdown> {
        integrate_mz_phases(
            &self.build_arms()?,
            &self.species,
            &self.gravity,
            &self.internal_energies(),
            self.steps_per_segment,
        )
    }

    /// The observable: total differential phase (upper − lower).
    pub fn differential_phase(&self) -> Result<Phase> {
        Ok(self.phase_breakdown()?.differential.total)
    }

    /// Closed-form prediction −η·κ·g·T² for this scenario.
    pub fn closed_form_phase(&self) -> Result<Phase> {
        crate::phase::closed_form_mz_phase(
            self.kappa,
            self.uniform_g(),
            self.interrogation_time,
            self.species.ep_ratio(),
        )
    }

    /// Runs the closed-form-versus-integrator chain on this scenario.
    pub fn verify(&self, tolerance: f64) -> Result<EquivalenceReport> {
        verify_equivalence_chain_with_tolerance(
            &self.species,
            &self.gravity,
            self.kappa,
            self.interrogation_time,
            self.species.ep_ratio(),
            self.steps_per_segment,
            tolerance,
        )
    }
}
