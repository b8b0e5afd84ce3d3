//! Interferometer observables: output-port populations, parameter scans,
//! spatial fringe patterns, and the wavelength sanity check.
//!
//! The two output ports split the atoms as
//! P_excited = ½(1 − cos δΔ), P_ground = 1 − P_excited,
//! where δΔ is the total differential phase.  Spatial fringes between two
//! velocity classes have period λ_dB = h/(m·Δv) — set by the de Broglie
//! wavelength of the centre of mass, *not* the (10⁹× smaller) Compton
//! wavelength; the extraction here exists to make that distinction an
//! executable fact.

use serde::Serialize;

use crate::quantities::{GravAccel, Length, Phase, Time, Velocity, Wavenumber};
use crate::scenario::MzScenario;
use crate::sequence::recoil_velocity;
use crate::species::AtomSpecies;
use crate::{Error, Result};

/// Detection probabilities at the two output ports.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PortPopulations {
    /// Probability of leaving through the excited-state port.
    pub excited: f64,
    /// Probability of the ground-state port; exactly 1 − excited.
    pub ground: f64,
}

/// Port populations for a total differential phase.
pub fn port_population(differential: Phase) -> PortPopulations {
    let excited = 0.5 * (1.0 - differential.value().cos());
    PortPopulations {
        excited,
        ground: 1.0 - excited,
    }
}

/// Which scenario parameter a fringe scan varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanVariable {
    /// Offset added to the final laser phase φ₃ (rad).
    PulsePhase,
    /// Interrogation time T (s).
    InterrogationTime,
    /// Field strength g (m/s²).
    Gravity,
}

/// One point of a parameter scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanPoint {
    /// The scanned value (rad, s, or m/s² depending on the variable).
    pub value: f64,
    /// Total differential phase at this value (rad).
    pub delta_phase: Phase,
    /// Output-port populations at this value.
    pub populations: PortPopulations,
}

/// Scans one parameter across a strictly increasing grid, integrating the
/// full differential phase at every point.
pub fn fringe_scan(
    scenario: &MzScenario,
    variable: ScanVariable,
    grid: &[f64],
) -> Result<Vec<ScanPoint>> {
    if grid.is_empty() {
        return Err(Error::Config(
            "scan grid must contain at least one value".into(),
        ));
    }
    for &value in grid {
        if !value.is_finite() {
            return Err(Error::Config(format!(
                "scan grid contains a non-finite value {value}"
            )));
        }
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Config(format!(
                "scan grid must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    grid.iter()
        .map(|&value| {
            let varied = match variable {
                ScanVariable::PulsePhase => {
                    let [p1, p2, p3] = scenario.pulse_phases();
                    scenario.clone().with_pulse_phases([
                        p1,
                        p2,
                        Phase::new(p3.value() + value)?,
                    ])
                }
                ScanVariable::InterrogationTime => scenario
                    .clone()
                    .with_interrogation_time(Time::new(value)?)?,
                ScanVariable::Gravity => scenario.clone().with_gravity(GravAccel::new(value)?),
            };
            let delta_phase = varied.differential_phase()?;
            Ok(ScanPoint {
                value,
                delta_phase,
                populations: port_population(delta_phase),
            })
        })
        .collect()
}

/// A sampled spatial interference pattern between two velocity classes.
#[derive(Clone, Debug, Serialize)]
pub struct FringePattern {
    /// Sample positions (m); serialized via the CSV dump, not the report.
    #[serde(skip_serializing)]
    pub positions: Vec<f64>,
    /// Normalised intensity at each position, in [0, 1].
    #[serde(skip_serializing)]
    pub intensities: Vec<f64>,
    /// Predicted spacing h/(m·|Δv|) (m).
    pub expected_spacing: f64,
    /// Spacing extracted from refined intensity maxima (m).
    pub extracted_spacing: f64,
    /// Extraction quality: |extracted − expected|/expected.
    pub relative_deviation: f64,
    /// Samples per fringe actually used.
    pub samples_per_fringe: f64,
}

/// Samples the interference pattern of two velocity classes over a window
/// centred on the origin and extracts the fringe spacing from its maxima.
///
/// Requires at least 16 samples per fringe and a window at least two
/// fringes wide, otherwise the extraction is refused as under-resolved.
pub fn spatial_fringes(
    species: &AtomSpecies,
    v1: Velocity,
    v2: Velocity,
    window: Length,
    samples: usize,
) -> Result<FringePattern> {
    if window.value() <= 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "Length",
            value: window.value(),
            reason: "window must be positive",
        });
    }
    if samples < 3 {
        return Err(Error::Config(format!(
            "fringe sampling needs at least 3 samples, got {samples}"
        )));
    }
    let dv = Velocity::new(v1.value() - v2.value())?;
    // h/(m·|Δv|); rejects Δv = 0 explicitly.
    let lambda = crate::quantities::de_broglie_wavelength(species.inertial_mass(), dv)?.value();
    let width = window.value();
    let step = width / (samples - 1) as f64;
    let samples_per_fringe = lambda / step;
    if samples_per_fringe < 16.0 {
        return Err(Error::Resolution(format!(
            "{samples_per_fringe:.1} samples per fringe; at least 16 are needed \
             (fringe spacing {lambda:.3e} m, sample step {step:.3e} m)"
        )));
    }
    if width < 2.0 * lambda {
        return Err(Error::Resolution(format!(
            "window {width:.3e} m spans fewer than two fringes of {lambda:.3e} m"
        )));
    }

    // Beat wavenumber of the two matter waves.
    let dk = std::f64::consts::TAU / lambda;
    let positions: Vec<f64> = (0..samples)
        .map(|i| -0.5 * width + i as f64 * step)
        .collect();
    let intensities: Vec<f64> = positions
        .iter()
        .map(|&x| 0.5 * (1.0 + (dk * x).cos()))
        .collect();

    // Parabolically refined interior maxima.  A maximum that falls exactly
    // halfway between two samples produces a two-sample tie; requiring a
    // strict rise on the left counts such a plateau once (the refinement
    // then places it at the midpoint, where it belongs).
    let mut peaks = Vec::new();
    for i in 1..samples - 1 {
        let (a, b, c) = (intensities[i - 1], intensities[i], intensities[i + 1]);
        if b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let offset = if denom == 0.0 { 0.0 } else { 0.5 * (a - c) / denom };
            peaks.push(positions[i] + offset * step);
        }
    }
    if peaks.len() < 2 {
        return Err(Error::Resolution(format!(
            "found {} intensity maxima; at least 2 are needed to measure a spacing",
            peaks.len()
        )));
    }
    let extracted = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;

    Ok(FringePattern {
        positions,
        intensities,
        expected_spacing: lambda,
        extracted_spacing: extracted,
        relative_deviation: (extracted - lambda).abs() / lambda,
        samples_per_fringe,
    })
}

/// Consistency check relating fringe counting to the momentum-kick phase.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FringeFallReport {
    /// Full free-fall drop over the 2T sequence: ½·g·(2T)² (m).
    pub fall_distance: f64,
    /// de Broglie wavelength of the recoil velocity, h/(m·v_r) (m).
    pub de_broglie_wavelength: f64,
    /// 2π × (g·T² expressed in de Broglie wavelengths) (rad).
    pub fringe_phase: f64,
    /// Momentum-kick magnitude κ·g·T² (rad).
    pub momentum_phase: f64,
    /// |fringe − momentum| / momentum.
    pub relative_deviation: f64,
    /// Whether the two agree within 10⁻¹².
    pub passed: bool,
}

/// Checks that counting the fall in de Broglie wavelengths reproduces the
/// momentum-kick phase: 2π·g·T²/λ_dB = κ·g·T², with λ_dB = h/(m·v_r).
pub fn fringe_fall_check(
    species: &AtomSpecies,
    kappa: Wavenumber,
    g: GravAccel,
    interrogation: Time,
) -> Result<FringeFallReport> {
    let vr = recoil_velocity(species, kappa)?;
    let lambda = crate::quantities::de_broglie_wavelength(species.inertial_mass(), vr)?.value();
    let t = interrogation.value();
    let fall_scale = g.value() * t * t;
    let fringe_phase = std::f64::consts::TAU * fall_scale / lambda;
    let momentum_phase = kappa.value() * g.value() * t * t;
    let relative_deviation = if momentum_phase == 0.0 {
        (fringe_phase - momentum_phase).abs()
    } else {
        (fringe_phase - momentum_phase).abs() / momentum_phase.abs()
    };
    Ok(FringeFallReport {
        fall_distance: 2.0 * g.value() * t * t,
        de_broglie_wavelength: lambda,
        fringe_phase,
        momentum_phase,
        relative_deviation,
        passed: relative_deviation <= 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn port_populations_always_sum_to_one() {
        for &phase in &[0.0, 0.5, -2.0, 1445304.0, 1e-12, 3.1] {
            let p = port_population(Phase::new(phase).unwrap());
            assert_eq!(p.excited + p.ground, 1.0, "at phase {phase}");
            assert!((0.0..=1.0).contains(&p.excited));
        }
    }

    #[test]
    fn dark_port_at_zero_phase() {
        let p = port_population(Phase::new(0.0).unwrap());
        assert_eq!(p.excited, 0.0);
        assert_eq!(p.ground, 1.0);
        let p = port_population(Phase::new(std::f64::consts::PI).unwrap());
        assert_relative_eq!(p.excited, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn populations_are_two_pi_periodic() {
        use std::f64::consts::TAU;
        for &phase in &[0.3, -1.2, 2.9] {
            let a = port_population(Phase::new(phase).unwrap()).excited;
            let b = port_population(Phase::new(phase + TAU).unwrap()).excited;
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn pulse_phase_scan_traces_the_expected_fringe() {
        let scenario = MzScenario::cesium_default();
        let theta = scenario.differential_phase().unwrap().value();
        let grid: Vec<f64> = (0..9).map(|i| -3.0 + 0.75 * i as f64).collect();
        let points = fringe_scan(&scenario, ScanVariable::PulsePhase, &grid).unwrap();
        for point in &points {
            let expected = 0.5 * (1.0 - (theta + point.value).cos());
            assert_relative_eq!(point.populations.excited, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn gravity_scan_phases_scale_linearly() {
        let scenario = MzScenario::cesium_default();
        let grid = [9.0, 9.5, 10.0];
        let points = fringe_scan(&scenario, ScanVariable::Gravity, &grid).unwrap();
        let slope01 = (points[1].delta_phase.value() - points[0].delta_phase.value()) / 0.5;
        let slope12 = (points[2].delta_phase.value() - points[1].delta_phase.value()) / 0.5;
        assert_relative_eq!(slope01, slope12, max_relative = 1e-9);
    }

    #[test]
    fn bad_scan_grids_are_rejected() {
        let scenario = MzScenario::cesium_default();
        assert!(matches!(
            fringe_scan(&scenario, ScanVariable::PulsePhase, &[]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            fringe_scan(&scenario, ScanVariable::PulsePhase, &[0.0, 1.0, 0.5]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn fringe_spacing_matches_the_recoil_wavelength() {
        let species = AtomSpecies::cesium_133();
        let kappa = Wavenumber::new(1.4748e7).unwrap();
        let vr = recoil_velocity(&species, kappa).unwrap();
        let lambda = 4.260364325454018e-7; // 2π/κ, frozen
        let pattern = spatial_fringes(
            &species,
            vr,
            Velocity::new(0.0).unwrap(),
            Length::new(20.0 * lambda).unwrap(),
            4096,
        )
        .unwrap();
        assert_relative_eq!(pattern.expected_spacing, lambda, max_relative = 1e-12);
        assert_relative_eq!(
            pattern.extracted_spacing,
            pattern.expected_spacing,
            max_relative = 1e-3
        );
        assert!(pattern.samples_per_fringe >= 16.0);
    }

    #[test]
    fn extraction_holds_over_three_decades_of_velocity() {
        let species = AtomSpecies::cesium_133();
        let base = 0.007047043573468742;
        for scale in [0.1, 1.0, 10.0] {
            let dv = base * scale;
            let lambda = 6.62607015e-34 / (2.207e-25 * dv);
            let pattern = spatial_fringes(
                &species,
                Velocity::new(dv).unwrap(),
                Velocity::new(0.0).unwrap(),
                Length::new(25.0 * lambda).unwrap(),
                4096,
            )
            .unwrap();
            assert!(
                pattern.relative_deviation < 1e-3,
                "deviation {} at Δv = {dv}",
                pattern.relative_deviation
            );
        }
    }

    #[test]
    fn under_sampling_is_refused() {
        let species = AtomSpecies::cesium_133();
        let vr = Velocity::new(0.007).unwrap();
        let lambda = 6.62607015e-34 / (2.207e-25 * 0.007);
        let result = spatial_fringes(
            &species,
            vr,
            Velocity::new(0.0).unwrap(),
            Length::new(100.0 * lambda).unwrap(),
            64,
        );
        assert!(matches!(result, Err(Error::Resolution(_))));
    }

    #[test]
    fn narrow_window_is_refused() {
        let species = AtomSpecies::cesium_133();
        let vr = Velocity::new(0.007).unwrap();
        let lambda = 6.62607015e-34 / (2.207e-25 * 0.007);
        let result = spatial_fringes(
            &species,
            vr,
            Velocity::new(0.0).unwrap(),
            Length::new(1.5 * lambda).unwrap(),
            4096,
        );
        assert!(matches!(result, Err(Error::Resolution(_))));
    }

    #[test]
    fn equal_velocity_classes_are_rejected() {
        let species = AtomSpecies::cesium_133();
        let v = Velocity::new(0.007).unwrap();
        let result = spatial_fringes(&species, v, v, Length::new(1e-5).unwrap(), 1024);
        assert!(matches!(result, Err(Error::DivideByZero { .. })));
    }

    #[test]
    fn fringes_do_not_depend_on_the_speed_of_light() {
        // The pattern is pure de Broglie physics: species with different
        // optical/clock structure (the only place c enters nearby scales)
        // produce bitwise identical patterns for the same mass and Δv.
        let a = AtomSpecies::cesium_133();
        let b = AtomSpecies::custom(
            "same-mass",
            crate::quantities::Mass::new(2.207e-25).unwrap(),
            1.0,
            crate::quantities::Frequency::new(1.0).unwrap(),
            crate::quantities::Frequency::new(1e20).unwrap(),
        )
        .unwrap();
        let vr = Velocity::new(0.007047043573468742).unwrap();
        let zero = Velocity::new(0.0).unwrap();
        let window = Length::new(1e-5).unwrap();
        let pa = spatial_fringes(&a, vr, zero, window, 2048).unwrap();
        let pb = spatial_fringes(&b, vr, zero, window, 2048).unwrap();
        assert_eq!(pa.extracted_spacing, pb.extracted_spacing);
    }

    #[test]
    fn fall_check_identity_holds() {
        let report = fringe_fall_check(
            &AtomSpecies::cesium_133(),
            Wavenumber::new(1.4748e7).unwrap(),
            GravAccel::new(9.8).unwrap(),
            Time::new(0.1).unwrap(),
        )
        .unwrap();
        assert!(report.passed, "deviation {}", report.relative_deviation);
        assert_relative_eq!(report.fall_distance, 0.19600000000000004, epsilon = 1e-18);
        assert_relative_eq!(report.momentum_phase, 1445304.0, max_relative = 1e-12);
    }
}
