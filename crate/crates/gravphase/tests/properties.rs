//! Property-based invariants: identities that must hold across the whole
//! parameter space, not just at the frozen reference points.

use gravphase::constants::{C, HBAR};
use gravphase::gravimeter::invert_g;
use gravphase::gravity::GravityEnvironment;
use gravphase::interferometer::port_population;
use gravphase::phase::closed_form_mz_phase;
use gravphase::quantities::{
    compton_frequency, compton_wavelength, de_broglie_wavelength, GravAccel, Length, Mass,
    Phase, Time, Velocity, Wavenumber,
};
use gravphase::sequence::{build_mz_arms, PulseSequence};
use gravphase::species::AtomSpecies;

use proptest::prelude::*;

// Physically wide but non-degenerate ranges: atoms to kilogram-scale test
// masses, laboratory-scale velocities and drops.
fn mass() -> impl Strategy<Value = f64> {
    1e-27..1.0f64
}

fn speed() -> impl Strategy<Value = f64> {
    prop_oneof![1e-6..1e3f64, (-1e3f64..-1e-6)]
}

proptest! {
    /// λ_dB · m·|v| = h for every mass and speed.
    #[test]
    fn de_broglie_wavelength_inverts_the_momentum(m in mass(), v in speed()) {
        let lambda = de_broglie_wavelength(
            Mass::new(m).unwrap(),
            Velocity::new(v).unwrap(),
        )
        .unwrap()
        .value();
        let h = lambda * m * v.abs();
        prop_assert!((h - gravphase::constants::H).abs() <= 1e-12 * gravphase::constants::H);
    }

    /// ħ·ω_C = m·c² for every mass.
    #[test]
    fn compton_frequency_carries_the_rest_energy(m in mass()) {
        let omega = compton_frequency(Mass::new(m).unwrap()).unwrap().value();
        let rest = m * gravphase::constants::C_SQUARED;
        prop_assert!((HBAR * omega - rest).abs() <= 1e-12 * rest);
    }

    /// λ_C / λ_dB = |v|/c: the de Broglie wave shrinks to the Compton wave
    /// exactly at the speed of light.
    #[test]
    fn wavelength_ratio_is_the_velocity_ratio(m in mass(), v in speed()) {
        let m = Mass::new(m).unwrap();
        let lc = compton_wavelength(m).unwrap().value();
        let ldb = de_broglie_wavelength(m, Velocity::new(v).unwrap())
            .unwrap()
            .value();
        let ratio = lc / ldb;
        let expected = v.abs() / C;
        prop_assert!((ratio - expected).abs() <= 1e-12 * expected);
    }

    /// Both arms return to the same position at the final pulse for any
    /// parameters: the interferometer closes by construction.
    #[test]
    fn interferometer_always_closes(
        kappa in 1e5..1e8f64,
        t in 1e-3..1.0f64,
        g in 0.1..30.0f64,
        eta in 0.5..1.5f64,
        x0 in -10.0..10.0f64,
        v0 in -1.0..1.0f64,
    ) {
        let species = AtomSpecies::cesium_133().with_ep_ratio(eta).unwrap();
        let env = GravityEnvironment::uniform(GravAccel::new(g).unwrap());
        let seq = PulseSequence::mach_zehnder(
            Wavenumber::new(kappa).unwrap(),
            Time::new(t).unwrap(),
        )
        .unwrap();
        let arms = build_mz_arms(
            &species,
            &env,
            &seq,
            Length::new(x0).unwrap(),
            Velocity::new(v0).unwrap(),
        )
        .unwrap();
        prop_assert!(arms.closure_error().abs() <= 1e-12);
    }

    /// Inverting the closed-form phase recovers the g that produced it.
    #[test]
    fn inversion_is_the_inverse_of_the_closed_form(
        kappa in 1e5..1e8f64,
        t in 1e-3..1.0f64,
        g in 0.1..30.0f64,
        eta in 0.1..2.0f64,
    ) {
        let kappa = Wavenumber::new(kappa).unwrap();
        let t = Time::new(t).unwrap();
        let phase = closed_form_mz_phase(kappa, GravAccel::new(g).unwrap(), t, eta).unwrap();
        let estimate = invert_g(phase, kappa, t, eta).unwrap();
        prop_assert!((estimate.g_hat.value() - g).abs() <= 1e-9 * g);
    }

    /// The two exit ports always share the atoms exactly.
    #[test]
    fn exit_ports_conserve_probability(theta in -1e7..1e7f64) {
        let ports = port_population(Phase::new(theta).unwrap());
        prop_assert_eq!(ports.excited + ports.ground, 1.0);
        prop_assert!((0.0..=1.0).contains(&ports.excited));
    }

    /// Shifting the phase by whole fringes leaves the populations intact
    /// to rounding.
    #[test]
    fn populations_are_fringe_periodic(theta in -100.0..100.0f64, k in -1000i64..1000) {
        let base = port_population(Phase::new(theta).unwrap());
        let shifted = port_population(
            Phase::new(theta + k as f64 * std::f64::consts::TAU).unwrap(),
        );
        prop_assert!((base.excited - shifted.excited).abs() <= 1e-9);
    }
}
