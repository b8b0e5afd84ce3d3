//! Phase accumulation along the interferometer arms, split into channels,
//! plus the chain of closed-form expressions the numerics must reproduce.
//!
//! Four channels add up to the phase of one arm:
//!
//! * **potential** — +(1/ħ)∫E_g dt with E_g = −(η·m_i + E_int/c²)·φ(x(t));
//! * **kinetic** — +(1/ħ)∫½·m_i·v² dt;
//! * **laser** — Σ ±(κ·x(t_kick) + φ_laser) over this arm's kicks, signed by
//!   the momentum transfer;
//! * **internal** — −(1/ħ)∫E_int(t) dt, the clock evolution of the internal
//!   state.
//!
//! The observable is the differential (upper − lower).  Subtracting two
//! ~10⁸ rad arm totals would lose nine digits, so the differential channels
//! are *integrated directly* over the relative kinematics (exact separation
//! products, stabilised velocity sums, kick displacements) with a
//! Neumaier-compensated composite Simpson rule.  For the canonical sequence
//! the kinetic and potential differentials cancel (free evolution is
//! stationary), the laser channel carries −η·κ·g·T², and the potential
//! channel alone also equals −η·κ·g·T² — the quantity every closed form in
//! [`verify_equivalence_chain`] must match.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::constants::{C_SQUARED, H, HBAR};
use crate::gravity::GravityEnvironment;
use crate::quantities::{
    Energy, GravAccel, GravPotential, Length, Phase, Time, Velocity, Wavenumber,
};
use crate::sequence::{ArmTrajectory, InternalState, MzArms};
use crate::species::AtomSpecies;
use crate::{Error, Result};

/// Default quadrature resolution per free-fall segment.
pub const DEFAULT_STEPS_PER_SEGMENT: usize = 1000;

/// Relative agreement demanded between the closed forms and the integrator.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

/// Radians per fringe in the wavelength-ratio form of the phase.
///
/// The ratio (E_g/2E_kin)·(l/λ_dB) counts fringes; multiplying by 2π
/// converts to radians.  The constant is validated against the transit-time
/// form across a parameter sweep in the tests.
pub const WAVELENGTH_RATIO_PREFACTOR: f64 = std::f64::consts::TAU;

/// Internal (clock) energies of the two states entering the phase model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InternalEnergies {
    ground: f64,
    excited: f64,
}

impl InternalEnergies {
    /// Both states at zero energy: a structureless test mass.
    pub fn none() -> Self {
        Self {
            ground: 0.0,
            excited: 0.0,
        }
    }

    /// Ground at 0, excited at h·ν_hf of the species' clock transition.
    pub fn hyperfine(species: &AtomSpecies) -> Self {
        Self {
            ground: 0.0,
            excited: species.hyperfine_energy().value(),
        }
    }

    /// Explicit level energies.
    pub fn custom(ground: Energy, excited: Energy) -> Self {
        Self {
            ground: ground.value(),
            excited: excited.value(),
        }
    }

    /// Energy of a state in joules.
    pub fn energy_of(&self, state: InternalState) -> f64 {
        match state {
            InternalState::Ground => self.ground,
            InternalState::Excited => self.excited,
        }
    }
}

/// Composite Simpson rule with Neumaier-compensated accumulation of the
/// weighted samples.  `n` is forced up to the next even count ≥ 2.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(2);
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    let mut compensation = 0.0;
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        let term = weight * f(a + i as f64 * h);
        let t = sum + term;
        compensation += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    }
    (sum + compensation) * (h / 3.0)
}

/// Phase of one arm (or of the differential) split by physical origin.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChannelPhases {
    /// Gravitational coupling of rest + internal energy (rad).
    pub potential: Phase,
    /// Kinetic action term (rad).
    pub kinetic: Phase,
    /// Phase imprinted by the laser kicks (rad).
    pub laser: Phase,
    /// Free evolution of the internal state (rad).
    pub internal: Phase,
    /// Sum of the four channels (rad).
    pub total: Phase,
}

impl ChannelPhases {
    fn from_values(potential: f64, kinetic: f64, laser: f64, internal: f64) -> Result<Self> {
        Ok(Self {
            potential: Phase::new(potential)?,
            kinetic: Phase::new(kinetic)?,
            laser: Phase::new(laser)?,
            internal: Phase::new(internal)?,
            total: Phase::new(potential + kinetic + laser + internal)?,
        })
    }
}

/// Channel phases for both arms plus the directly integrated differential.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhaseBreakdown {
    /// Channels of the arm kicked at t = 0.
    pub upper: ChannelPhases,
    /// Channels of the arm kicked at t = T.
    pub lower: ChannelPhases,
    /// Upper − lower, integrated over the relative kinematics (not formed
    /// by subtracting the arm totals).
    pub differential: ChannelPhases,
}

fn uniform_field(env: &GravityEnvironment, op: &'static str) -> Result<(f64, f64)> {
    match *env {
        GravityEnvironment::Uniform { g, gauge_offset } => Ok((g.value(), gauge_offset.value())),
        GravityEnvironment::PointMass { .. } => Err(Error::Domain {
            op,
            reason: "phase integration matches the uniform-field trajectories; \
                     use a uniform environment"
                .into(),
        }),
    }
}

fn check_steps(steps_per_segment: usize) -> Result<()> {
    if steps_per_segment < 2 {
        return Err(Error::Config(format!(
            "steps_per_segment must be at least 2, got {steps_per_segment}"
        )));
    }
    Ok(())
}

/// Integrates the four phase channels along a single arm.
///
/// The environment must be the uniform field the arm was built in.
pub fn integrate_arm_phase(
    arm: &ArmTrajectory,
    species: &AtomSpecies,
    env: &GravityEnvironment,
    energies: &InternalEnergies,
    steps_per_segment: usize,
) -> Result<ChannelPhases> {
    check_steps(steps_per_segment)?;
    let (g, gauge) = uniform_field(env, "integrate_arm_phase")?;
    let m = species.inertial_mass().value();
    let eta = species.ep_ratio();

    let mut potential = 0.0;
    let mut kinetic = 0.0;
    let mut internal = 0.0;
    for seg in arm.segments() {
        let length = seg.duration();
        let e_int = energies.energy_of(seg.state);
        // Constant per segment: the full gravitating weight of the state.
        let weight = -(eta * m + e_int / C_SQUARED);
        potential += simpson(
            |dt| weight * (g * seg.position_at(dt) + gauge),
            0.0,
            length,
            steps_per_segment,
        ) / HBAR;
        kinetic += simpson(
            |dt| {
                let v = seg.velocity_at(dt);
                0.5 * m * v * v
            },
            0.0,
            length,
            steps_per_segment,
        ) / HBAR;
        // The state is constant on the segment, so this integral is exact.
        internal -= e_int * length / HBAR;
    }

    let mut laser = 0.0;
    for kick in arm.kicks() {
        laser += kick.momentum_sign * (arm.kappa() * arm.position(kick.time)? + kick.phase);
    }

    ChannelPhases::from_values(potential, kinetic, laser, internal)
}

/// Directly integrates the differential channels over the relative
/// kinematics, avoiding the 10⁸-rad cancellation of the per-arm totals.
fn integrate_differential(
    arms: &MzArms,
    species: &AtomSpecies,
    env: &GravityEnvironment,
    energies: &InternalEnergies,
    steps_per_segment: usize,
) -> Result<ChannelPhases> {
    let (g, gauge) = uniform_field(env, "integrate_mz_phases")?;
    let m = species.inertial_mass().value();
    let eta = species.ep_ratio();

    let mut potential = 0.0;
    let mut kinetic = 0.0;
    let mut internal = 0.0;
    for ((rel, seg_u), seg_l) in arms
        .relative_segments()
        .iter()
        .zip(arms.upper.segments())
        .zip(arms.lower.segments())
    {
        let length = rel.t_end - rel.t_start;
        let e_u = energies.energy_of(seg_u.state);
        let e_l = energies.energy_of(seg_l.state);
        // Mass term over the exact separation; the internal-energy cross
        // term keeps the absolute potentials (it does not cancel, its two
        // states sit at different heights with different energies).
        potential += simpson(
            |dt| {
                let cross = (e_u * (g * seg_u.position_at(dt) + gauge)
                    - e_l * (g * seg_l.position_at(dt) + gauge))
                    / C_SQUARED;
                -(eta * m * (g * rel.separation_at(dt)) + cross) / HBAR
            },
            0.0,
            length,
            steps_per_segment,
        );
        // ½m(v_u² − v_l²) = ½m·Δv·(v_u + v_l) with Δv constant and exact.
        let factor = 0.5 * m * rel.dv / HBAR;
        kinetic += simpson(
            |dt| factor * (seg_u.velocity_at(dt) + seg_l.velocity_at(dt)),
            0.0,
            length,
            steps_per_segment,
        );
        internal -= (e_u - e_l) * length / HBAR;
    }

    // Each arm's kicks bracket exactly one of its segments with signs
    // (+, −), so the position part telescopes to −κ·(net displacement):
    // upper between t = 0 and T (its first segment), lower between T and 2T
    // (its second).  Displacements come from segment-local products, so the
    // launch position never enters.
    let disp_upper = arms.upper.segments()[0].displacement();
    let disp_lower = arms.lower.segments()[1].displacement();
    let phase_combo: f64 = arms
        .upper
        .kicks()
        .iter()
        .map(|k| k.momentum_sign * k.phase)
        .sum::<f64>()
        - arms
            .lower
            .kicks()
            .iter()
            .map(|k| k.momentum_sign * k.phase)
            .sum::<f64>();
    let laser = -arms.kappa() * (disp_upper - disp_lower) + phase_combo;

    ChannelPhases::from_values(potential, kinetic, laser, internal)
}

/// Integrates both arms and the differential channels.
pub fn integrate_mz_phases(
    arms: &MzArms,
    species: &AtomSpecies,
    env: &GravityEnvironment,
    energies: &InternalEnergies,
    steps_per_segment: usize,
) -> Result<PhaseBreakdown> {
    check_steps(steps_per_segment)?;
    Ok(PhaseBreakdown {
        upper: integrate_arm_phase(&arms.upper, species, env, energies, steps_per_segment)?,
        lower: integrate_arm_phase(&arms.lower, species, env, energies, steps_per_segment)?,
        differential: integrate_differential(arms, species, env, energies, steps_per_segment)?,
    })
}

/// Shared inputs of the closed-form phase expressions, derived once from a
/// species and geometry so the individual forms cannot drift apart.
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormInputs {
    m_i: f64,
    eta: f64,
    phi: f64,
    separation: f64,
    velocity: f64,
    lambda_db: f64,
    e_kinetic: f64,
    e_grav: f64,
    omega_c: f64,
}

impl ClosedFormInputs {
    /// Builds the inputs from first quantities.  `phi` is the potential
    /// difference across the path separation `l`, and `v` the relative
    /// velocity opening the paths (must be non-zero).
    pub fn new(
        species: &AtomSpecies,
        phi: GravPotential,
        separation: Length,
        velocity: Velocity,
    ) -> Result<Self> {
        let m_i = species.inertial_mass().value();
        let v = velocity.value();
        if v == 0.0 {
            return Err(Error::DivideByZero {
                op: "ClosedFormInputs::new",
                detail: "relative velocity is zero",
            });
        }
        Ok(Self {
            m_i,
            eta: species.ep_ratio(),
            phi: phi.value(),
            separation: separation.value(),
            velocity: v,
            lambda_db: H / (m_i * v.abs()),
            e_kinetic: 0.5 * m_i * v * v,
            e_grav: m_i * phi.value(),
            omega_c: m_i * C_SQUARED / HBAR,
        })
    }

    /// Inputs for the canonical Mach–Zehnder mapping: relative velocity
    /// v = v_r = ħκ/m_i, separation l = v_r·T, potential difference
    /// φ = g·l.
    pub fn for_mz(
        species: &AtomSpecies,
        kappa: Wavenumber,
        g: GravAccel,
        interrogation: Time,
    ) -> Result<Self> {
        let v = HBAR * kappa.value() / species.inertial_mass().value();
        let l = v * interrogation.value();
        Self::new(
            species,
            GravPotential::new(g.value() * l)?,
            Length::new(l)?,
            Velocity::new(v)?,
        )
    }

    /// de Broglie wavelength h/(m·|v|) of the inputs.
    pub fn de_broglie_wavelength(&self) -> f64 {
        self.lambda_db
    }

    /// Kinetic energy ½·m_i·v² of the relative motion.
    pub fn kinetic_energy(&self) -> f64 {
        self.e_kinetic
    }

    /// Gravitational energy scale m_i·φ across the separation.
    pub fn gravitational_energy(&self) -> f64 {
        self.e_grav
    }

    /// Angular Compton frequency m_i·c²/ħ.
    pub fn compton_frequency(&self) -> f64 {
        self.omega_c
    }
}

/// Transit-time form: δΔ = −m_g·φ·l/(v·ħ).
pub fn transit_time_phase(inputs: &ClosedFormInputs) -> Result<Phase> {
    Phase::new(-(inputs.eta * inputs.m_i) * inputs.phi * inputs.separation
        / (inputs.velocity * HBAR))
}

/// Wavelength-ratio form: δΔ = −η·(E_g/2E_kin)·(l/λ_dB)·2π.
pub fn wavelength_ratio_phase(inputs: &ClosedFormInputs) -> Result<Phase> {
    Phase::new(
        -inputs.eta
            * (inputs.e_grav / (2.0 * inputs.e_kinetic))
            * (inputs.separation / inputs.lambda_db)
            * WAVELENGTH_RATIO_PREFACTOR,
    )
}

/// Compton-clock form with the equivalence ratio kept: δΔ = −η·ω_c·φ·T/c².
pub fn compton_clock_phase(inputs: &ClosedFormInputs, interrogation: Time) -> Result<Phase> {
    Phase::new(-inputs.eta * inputs.omega_c * inputs.phi * interrogation.value() / C_SQUARED)
}

/// Compton-clock form assuming exact equivalence (η ≡ 1):
/// δΔ = −ω_c·φ·T/c².
pub fn compton_clock_phase_universal(
    inputs: &ClosedFormInputs,
    interrogation: Time,
) -> Result<Phase> {
    Phase::new(-inputs.omega_c * inputs.phi * interrogation.value() / C_SQUARED)
}

/// Laser-wavelength fall form (assumes equivalence): δΔ = −2π·g·T²/λ with
/// λ = 2π/κ the wavelength imprinted by the two-photon kick.
pub fn de_broglie_fall_phase(kappa: Wavenumber, g: GravAccel, interrogation: Time) -> Result<Phase> {
    if kappa.value() == 0.0 {
        return Err(Error::DivideByZero {
            op: "de_broglie_fall_phase",
            detail: "wavevector is zero",
        });
    }
    let lambda = std::f64::consts::TAU / kappa.value();
    let t = interrogation.value();
    Phase::new(-std::f64::consts::TAU * g.value() * t * t / lambda)
}

/// Standard Mach–Zehnder closed form with the equivalence ratio explicit:
/// δΔ = −η·κ·g·T².
pub fn closed_form_mz_phase(
    kappa: Wavenumber,
    g: GravAccel,
    interrogation: Time,
    eta: f64,
) -> Result<Phase> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "ep_ratio",
            value: eta,
            reason: "must be finite and non-negative",
        });
    }
    let t = interrogation.value();
    Phase::new(-(eta * kappa.value() * g.value() * t * t))
}

/// Parallel-wavefront form: δΔ = −m_g·φ·T/ħ, the phase picked up by letting
/// the potential difference across the fixed separation act for time T.
pub fn parallel_section_phase(inputs: &ClosedFormInputs, interrogation: Time) -> Result<Phase> {
    Phase::new(-(inputs.eta * inputs.m_i) * inputs.phi * interrogation.value() / HBAR)
}

/// Outcome of checking every phase expression against the integrator.
///
/// Forms that carry the equivalence ratio explicitly (`eq2`, `eq4`, `eq6`,
/// `eq9`, `parallel_section`, and the numeric integral) must agree with each
/// other for any η; the equivalence-assuming forms (`eq5`, `eq7`, `eq8`)
/// must agree among themselves, and with the first group exactly when
/// η = 1.  `passed` reflects that η-aware grouping.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    /// Equivalence-principle ratio used for the η-aware forms.
    pub eta: f64,
    /// Two-photon wavevector (rad/m).
    pub kappa: f64,
    /// Field strength (m/s²).
    pub g: f64,
    /// Interrogation time T (s).
    pub interrogation_time: f64,
    /// Quadrature resolution per segment.
    pub steps_per_segment: usize,
    /// Transit-time form −m_g·φ·l/(v·ħ) (rad).
    pub eq2: f64,
    /// Wavelength-ratio form −η·(E_g/2E_kin)(l/λ_dB)·2π (rad).
    pub eq4: f64,
    /// Compton-clock form at η ≡ 1 (rad).
    pub eq5: f64,
    /// Compton-clock form −η·ω_c·φ·T/c² (rad).
    pub eq6: f64,
    /// Laser-wavelength fall form −2π·g·T²/λ, λ = 2π/κ (rad).
    pub eq7: f64,
    /// Momentum-kick closed form −κ·g·T² (rad).
    pub eq8: f64,
    /// Momentum-kick closed form with η: −η·κ·g·T² (rad).
    pub eq9: f64,
    /// Differential potential-energy phase from the path integrator (rad).
    pub numeric: f64,
    /// Parallel-wavefront form −m_g·φ·T/ħ (rad).
    pub parallel_section: f64,
    /// Pairwise relative deviations: η-aware forms against `eq9`,
    /// equivalence-assuming forms against `eq8`, plus `eq8_vs_eq9`.
    pub pairwise_relative_deviations: BTreeMap<String, f64>,
    /// Largest deviation among the pairs that must agree at this η.
    pub max_relative_deviation: f64,
    /// Relative tolerance applied.
    pub tolerance: f64,
    /// Whether every required pair agreed within the tolerance.
    pub passed: bool,
}

fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Runs the full consistency chain at the given tolerance.
///
/// Integrates the differential potential-energy phase numerically (with the
/// species' hyperfine internal structure), evaluates every closed form, and
/// compares them as described on [`EquivalenceReport`].  A disagreement
/// yields `passed = false`, not an error.
pub fn verify_equivalence_chain_with_tolerance(
    species: &AtomSpecies,
    env: &GravityEnvironment,
    kappa: Wavenumber,
    interrogation: Time,
    eta: f64,
    steps_per_segment: usize,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::Config(format!(
            "verification tolerance must be finite and positive, got {tolerance}"
        )));
    }
    check_steps(steps_per_segment)?;
    let species = species.clone().with_ep_ratio(eta)?;
    let (g_value, _) = uniform_field(env, "verify_equivalence_chain")?;
    let g = GravAccel::new(g_value)?;

    let sequence = crate::sequence::PulseSequence::mach_zehnder(kappa, interrogation)?;
    let arms = crate::sequence::build_mz_arms(
        &species,
        env,
        &sequence,
        Length::new(0.0)?,
        Velocity::new(0.0)?,
    )?;
    let energies = InternalEnergies::hyperfine(&species);
    let breakdown = integrate_mz_phases(&arms, &species, env, &energies, steps_per_segment)?;
    let numeric = breakdown.differential.potential.value();

    let inputs = ClosedFormInputs::for_mz(&species, kappa, g, interrogation)?;
    let eq2 = transit_time_phase(&inputs)?.value();
    let eq4 = wavelength_ratio_phase(&inputs)?.value();
    let eq5 = compton_clock_phase_universal(&inputs, interrogation)?.value();
    let eq6 = compton_clock_phase(&inputs, interrogation)?.value();
    let eq7 = de_broglie_fall_phase(kappa, g, interrogation)?.value();
    let eq8 = closed_form_mz_phase(kappa, g, interrogation, 1.0)?.value();
    let eq9 = closed_form_mz_phase(kappa, g, interrogation, eta)?.value();
    let parallel_section = parallel_section_phase(&inputs, interrogation)?.value();

    let mut deviations = BTreeMap::new();
    for (key, value) in [
        ("eq2_vs_eq9", relative_deviation(eq2, eq9)),
        ("eq4_vs_eq9", relative_deviation(eq4, eq9)),
        ("eq6_vs_eq9", relative_deviation(eq6, eq9)),
        ("numeric_vs_eq9", relative_deviation(numeric, eq9)),
        (
            "parallel_section_vs_eq9",
            relative_deviation(parallel_section, eq9),
        ),
        ("eq5_vs_eq8", relative_deviation(eq5, eq8)),
        ("eq7_vs_eq8", relative_deviation(eq7, eq8)),
        ("eq8_vs_eq9", relative_deviation(eq8, eq9)),
    ] {
        deviations.insert(key.to_string(), value);
    }

    let mut required: Vec<&str> = vec![
        "eq2_vs_eq9",
        "eq4_vs_eq9",
        "eq6_vs_eq9",
        "numeric_vs_eq9",
        "parallel_section_vs_eq9",
        "eq5_vs_eq8",
        "eq7_vs_eq8",
    ];
    if (eta - 1.0).abs() <= tolerance {
        required.push("eq8_vs_eq9");
    }
    let max_relative_deviation = required
        .iter()
        .map(|key| deviations[*key])
        .fold(0.0_f64, f64::max);

    Ok(EquivalenceReport {
        eta,
        kappa: kappa.value(),
        g: g_value,
        interrogation_time: interrogation.value(),
        steps_per_segment,
        eq2,
        eq4,
        eq5,
        eq6,
        eq7,
        eq8,
        eq9,
        numeric,
        parallel_section,
        pairwise_relative_deviations: deviations,
        max_relative_deviation,
        tolerance,
        passed: max_relative_deviation <= tolerance,
    })
}

/// [`verify_equivalence_chain_with_tolerance`] at the standard 10⁻⁹.
pub fn verify_equivalence_chain(
    species: &AtomSpecies,
    env: &GravityEnvironment,
    kappa: Wavenumber,
    interrogation: Time,
    eta: f64,
    steps_per_segment: usize,
) -> Result<EquivalenceReport> {
    verify_equivalence_chain_with_tolerance(
        species,
        env,
        kappa,
        interrogation,
        eta,
        steps_per_segment,
        EQUIVALENCE_TOLERANCE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{build_mz_arms, build_mz_arms_with, MzBuildOptions, PulseSequence};
    use approx::assert_relative_eq;

    const KAPPA: f64 = 1.4748e7;
    const G: f64 = 9.8;
    const T: f64 = 0.1;
    /// −κ·g·T² at the canonical scenario, frozen from an independent
    /// high-precision evaluation.
    const CANONICAL_PHASE: f64 = -1445304.0;

    fn canonical_env() -> GravityEnvironment {
        GravityEnvironment::uniform(GravAccel::new(G).unwrap())
    }

    fn canonical_arms(species: &AtomSpecies) -> MzArms {
        let seq = PulseSequence::mach_zehnder(
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
        )
        .unwrap();
        build_mz_arms(
            species,
            &canonical_env(),
            &seq,
            Length::new(0.0).unwrap(),
            Velocity::new(0.0).unwrap(),
        )
        .unwrap()
    }

    fn canonical_inputs(eta: f64) -> ClosedFormInputs {
        let species = AtomSpecies::cesium_133().with_ep_ratio(eta).unwrap();
        ClosedFormInputs::for_mz(
            &species,
            Wavenumber::new(KAPPA).unwrap(),
            GravAccel::new(G).unwrap(),
            Time::new(T).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn every_closed_form_hits_the_frozen_value() {
        let inputs = canonical_inputs(1.0);
        let t = Time::new(T).unwrap();
        let kappa = Wavenumber::new(KAPPA).unwrap();
        let g = GravAccel::new(G).unwrap();
        let forms = [
            transit_time_phase(&inputs).unwrap().value(),
            wavelength_ratio_phase(&inputs).unwrap().value(),
            compton_clock_phase_universal(&inputs, t).unwrap().value(),
            compton_clock_phase(&inputs, t).unwrap().value(),
            de_broglie_fall_phase(kappa, g, t).unwrap().value(),
            closed_form_mz_phase(kappa, g, t, 1.0).unwrap().value(),
            parallel_section_phase(&inputs, t).unwrap().value(),
        ];
        for (i, form) in forms.iter().enumerate() {
            assert_relative_eq!(*form, CANONICAL_PHASE, max_relative = 1e-12);
            for other in &forms[i + 1..] {
                assert_relative_eq!(*form, *other, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn wavelength_ratio_prefactor_tracks_the_transit_form() {
        // The 2π prefactor must make the fringe-count form agree with the
        // transit-time form for arbitrary parameters, not just the default.
        for (mass, g, v, time) in [
            (2.207e-25, 9.8, 0.007, 0.1),
            (1.443e-25, 3.7, 0.011, 0.48),
            (1.675e-27, 9.81, 2.2e-4, 1.0),
        ] {
            let species = AtomSpecies::custom(
                "sweep",
                crate::quantities::Mass::new(mass).unwrap(),
                1.17,
                crate::quantities::Frequency::new(1e9).unwrap(),
                crate::quantities::Frequency::new(1e14).unwrap(),
            )
            .unwrap();
            let l = v * time;
            let inputs = ClosedFormInputs::new(
                &species,
                GravPotential::new(g * l).unwrap(),
                Length::new(l).unwrap(),
                Velocity::new(v).unwrap(),
            )
            .unwrap();
            assert_relative_eq!(
                wavelength_ratio_phase(&inputs).unwrap().value(),
                transit_time_phase(&inputs).unwrap().value(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn eta_rescales_only_the_eta_aware_forms() {
        let eta = 1.05;
        let inputs = canonical_inputs(eta);
        let t = Time::new(T).unwrap();
        let kappa = Wavenumber::new(KAPPA).unwrap();
        let g = GravAccel::new(G).unwrap();
        assert_relative_eq!(
            closed_form_mz_phase(kappa, g, t, eta).unwrap().value(),
            eta * CANONICAL_PHASE,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            transit_time_phase(&inputs).unwrap().value(),
            eta * CANONICAL_PHASE,
            max_relative = 1e-12
        );
        // Equivalence-assuming forms ignore η entirely.
        assert_relative_eq!(
            de_broglie_fall_phase(kappa, g, t).unwrap().value(),
            CANONICAL_PHASE,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            compton_clock_phase_universal(&inputs, t).unwrap().value(),
            CANONICAL_PHASE,
            max_relative = 1e-12
        );
    }

    #[test]
    fn numeric_differential_potential_matches_the_closed_form() {
        let species = AtomSpecies::cesium_133();
        let arms = canonical_arms(&species);
        let breakdown = integrate_mz_phases(
            &arms,
            &species,
            &canonical_env(),
            &InternalEnergies::hyperfine(&species),
            1000,
        )
        .unwrap();
        assert_relative_eq!(
            breakdown.differential.potential.value(),
            CANONICAL_PHASE,
            max_relative = 1e-9
        );
        // The laser channel carries the same observable.
        assert_relative_eq!(
            breakdown.differential.laser.value(),
            CANONICAL_PHASE,
            max_relative = 1e-9
        );
        // And the total differential is the laser value: kinetic+potential
        // cancel and the internal channel vanishes by the state swap.
        assert_relative_eq!(
            breakdown.differential.total.value(),
            CANONICAL_PHASE,
            max_relative = 1e-9
        );
    }

    #[test]
    fn free_evolution_is_stationary_for_a_structureless_atom() {
        let species = AtomSpecies::cesium_133();
        let arms = canonical_arms(&species);
        let breakdown = integrate_mz_phases(
            &arms,
            &species,
            &canonical_env(),
            &InternalEnergies::none(),
            1000,
        )
        .unwrap();
        let action_sum = breakdown.differential.kinetic.value()
            + breakdown.differential.potential.value();
        assert!(
            action_sum.abs() <= 1e-9,
            "kinetic + potential differential = {action_sum} rad, expected 0"
        );
    }

    #[test]
    fn zero_eta_decouples_gravity_exactly() {
        let species = AtomSpecies::cesium_133().with_ep_ratio(0.0).unwrap();
        let arms = canonical_arms(&species);
        let breakdown = integrate_mz_phases(
            &arms,
            &species,
            &canonical_env(),
            &InternalEnergies::none(),
            1000,
        )
        .unwrap();
        assert_eq!(breakdown.differential.potential.value(), 0.0);
    }

    #[test]
    fn gauge_offset_cannot_move_the_differential() {
        let species = AtomSpecies::cesium_133();
        let seq = PulseSequence::mach_zehnder(
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
        )
        .unwrap();
        let totals_for = |energies: &InternalEnergies| {
            let mut totals = Vec::new();
            for gauge in [0.0, 1.0e6] {
                let env = GravityEnvironment::uniform_with_gauge(
                    GravAccel::new(G).unwrap(),
                    GravPotential::new(gauge).unwrap(),
                );
                let arms = build_mz_arms(
                    &species,
                    &env,
                    &seq,
                    Length::new(0.0).unwrap(),
                    Velocity::new(0.0).unwrap(),
                )
                .unwrap();
                let b = integrate_mz_phases(&arms, &species, &env, energies, 1000).unwrap();
                totals.push(b.differential.total.value());
            }
            (totals[0], totals[1])
        };
        // Without internal structure the offset never enters the relative
        // integrand at all, so the totals must agree bit for bit.
        let (plain, shifted) = totals_for(&InternalEnergies::none());
        assert_eq!(plain, shifted, "gauge shift leaked into the differential");
        // With the clock states split, the offset couples to each arm's
        // internal energy and cancels between the two halves of the
        // sequence; numerically that holds to integrator rounding, which
        // is about one ulp of the ~1.4e6 rad channel magnitude.
        let (plain, shifted) = totals_for(&InternalEnergies::hyperfine(&species));
        assert!(
            (plain - shifted).abs() <= 1e-9,
            "gauge shift moved the differential by {} rad",
            (plain - shifted).abs()
        );
    }

    #[test]
    fn launch_conditions_cannot_move_the_differential() {
        let species = AtomSpecies::cesium_133();
        let seq = PulseSequence::mach_zehnder(
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
        )
        .unwrap();
        let energies = InternalEnergies::none();
        let reference = {
            let arms = canonical_arms(&species);
            integrate_mz_phases(&arms, &species, &canonical_env(), &energies, 1000)
                .unwrap()
                .differential
                .total
                .value()
        };
        for (x0, v0) in [(1.0, 0.0), (0.0, 0.1), (1.0, -0.1)] {
            let arms = build_mz_arms(
                &species,
                &canonical_env(),
                &seq,
                Length::new(x0).unwrap(),
                Velocity::new(v0).unwrap(),
            )
            .unwrap();
            let total = integrate_mz_phases(&arms, &species, &canonical_env(), &energies, 1000)
                .unwrap()
                .differential
                .total
                .value();
            assert!(
                (total - reference).abs() <= 1e-9,
                "launch (x0={x0}, v0={v0}) shifted the phase by {} rad",
                (total - reference).abs()
            );
        }
    }

    #[test]
    fn state_swap_cancels_the_internal_channel() {
        let species = AtomSpecies::cesium_133();
        let energies = InternalEnergies::hyperfine(&species);
        let arms = canonical_arms(&species);
        let swapped = integrate_mz_phases(&arms, &species, &canonical_env(), &energies, 1000)
            .unwrap()
            .differential
            .internal
            .value();
        assert_eq!(swapped, 0.0);

        let seq = PulseSequence::mach_zehnder(
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
        )
        .unwrap();
        let arms_noswap = build_mz_arms_with(
            &species,
            &canonical_env(),
            &seq,
            Length::new(0.0).unwrap(),
            Velocity::new(0.0).unwrap(),
            MzBuildOptions {
                swap_internal_states: false,
            },
        )
        .unwrap();
        let unswapped =
            integrate_mz_phases(&arms_noswap, &species, &canonical_env(), &energies, 1000)
                .unwrap()
                .differential
                .internal
                .value();
        // Without the swap the clock term is enormous: 2π·ν_hf·2T.
        assert_relative_eq!(
            unswapped,
            -species.hyperfine_splitting().value() * std::f64::consts::TAU * 2.0 * T,
            max_relative = 1e-12
        );
    }

    #[test]
    fn pulse_phases_enter_as_phi1_minus_2phi2_plus_phi3() {
        let species = AtomSpecies::cesium_133();
        let seq = PulseSequence::mach_zehnder(
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
        )
        .unwrap()
        .with_pulse_phases([
            Phase::new(0.3).unwrap(),
            Phase::new(0.1).unwrap(),
            Phase::new(0.25).unwrap(),
        ])
        .unwrap();
        let arms = build_mz_arms(
            &species,
            &canonical_env(),
            &seq,
            Length::new(0.0).unwrap(),
            Velocity::new(0.0).unwrap(),
        )
        .unwrap();
        let b = integrate_mz_phases(
            &arms,
            &species,
            &canonical_env(),
            &InternalEnergies::hyperfine(&species),
            1000,
        )
        .unwrap();
        let expected_combo = 0.3 - 2.0 * 0.1 + 0.25;
        assert_relative_eq!(
            b.differential.laser.value(),
            CANONICAL_PHASE + expected_combo,
            max_relative = 1e-12
        );
    }

    #[test]
    fn differential_agrees_with_arm_subtraction_coarsely() {
        // The per-arm totals are ~10⁸ rad, so their difference carries
        // rounding noise at the 10⁻⁷ rad level; the direct differential
        // must sit inside that noise band.
        let species = AtomSpecies::cesium_133();
        let arms = canonical_arms(&species);
        let b = integrate_mz_phases(
            &arms,
            &species,
            &canonical_env(),
            &InternalEnergies::hyperfine(&species),
            1000,
        )
        .unwrap();
        let subtracted = b.upper.total.value() - b.lower.total.value();
        assert!(
            (subtracted - b.differential.total.value()).abs() <= 1e-6,
            "direct and subtracted differentials disagree: {} vs {}",
            b.differential.total.value(),
            subtracted
        );
    }

    #[test]
    fn doubling_the_steps_does_not_move_the_answer() {
        let species = AtomSpecies::cesium_133();
        let arms = canonical_arms(&species);
        let energies = InternalEnergies::hyperfine(&species);
        let coarse = integrate_mz_phases(&arms, &species, &canonical_env(), &energies, 1000)
            .unwrap()
            .differential
            .total
            .value();
        let fine = integrate_mz_phases(&arms, &species, &canonical_env(), &energies, 2000)
            .unwrap()
            .differential
            .total
            .value();
        assert_relative_eq!(coarse, fine, max_relative = 1e-12);
    }

    #[test]
    fn too_few_steps_is_a_configuration_error() {
        let species = AtomSpecies::cesium_133();
        let arms = canonical_arms(&species);
        let result = integrate_mz_phases(
            &arms,
            &species,
            &canonical_env(),
            &InternalEnergies::none(),
            1,
        );
        assert!(matches!(result, Err(Error::Config(_))));
    }

    #[test]
    fn verify_chain_passes_at_unit_eta() {
        let report = verify_equivalence_chain(
            &AtomSpecies::cesium_133(),
            &canonical_env(),
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
            1.0,
            1000,
        )
        .unwrap();
        assert!(
            report.passed,
            "chain failed: max deviation {}",
            report.max_relative_deviation
        );
        assert!(report.max_relative_deviation <= 1e-9);
        assert_relative_eq!(report.numeric, CANONICAL_PHASE, max_relative = 1e-9);
        assert_relative_eq!(report.eq8, report.eq9, max_relative = 1e-15);
    }

    #[test]
    fn verify_chain_passes_for_violating_eta() {
        let report = verify_equivalence_chain(
            &AtomSpecies::cesium_133(),
            &canonical_env(),
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
            1.1,
            1000,
        )
        .unwrap();
        assert!(report.passed, "η-aware grouping must hold at η = 1.1");
        // The violation shows up as the eq8-vs-eq9 split.
        assert_relative_eq!(
            report.pairwise_relative_deviations["eq8_vs_eq9"],
            1.0 - 1.0 / 1.1,
            max_relative = 1e-9
        );
    }

    #[test]
    fn verify_chain_reports_failure_without_panicking() {
        let report = verify_equivalence_chain_with_tolerance(
            &AtomSpecies::cesium_133(),
            &canonical_env(),
            Wavenumber::new(KAPPA).unwrap(),
            Time::new(T).unwrap(),
            1.0,
            1000,
            1e-18,
        )
        .unwrap();
        assert!(!report.passed, "nothing agrees to 1e-18");
    }
}
