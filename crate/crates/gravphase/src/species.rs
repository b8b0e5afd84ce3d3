//! Atomic species: inertial mass, internal structure, and the
//! equivalence-principle ratio η = m_g / m_i.
//!
//! η multiplies every coupling of the atom's mass to the gravitational
//! potential while leaving inertia untouched; η = 1 recovers universal free
//! fall.  Presets carry the level data used by the bundled scenarios
//! (clock-transition splitting and the optical transition frequency that
//! supplies the Raman wavevector).

use serde::Serialize;

use crate::constants::H;
use crate::quantities::{Energy, Frequency, Mass};
use crate::{Error, Result};

/// An atom (or other test particle) with an explicit m_g/m_i ratio.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomSpecies {
    name: String,
    mass: Mass,
    ep_ratio: f64,
    hyperfine_splitting: Frequency,
    optical_frequency: Frequency,
}

impl AtomSpecies {
    /// Builds a species from raw data; `mass` must be positive and
    /// `ep_ratio` finite and non-negative.
    pub fn custom(
        name: impl Into<String>,
        mass: Mass,
        ep_ratio: f64,
        hyperfine_splitting: Frequency,
        optical_frequency: Frequency,
    ) -> Result<Self> {
        if mass.value() <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "Mass",
                value: mass.value(),
                reason: "species mass must be positive",
            });
        }
        if !ep_ratio.is_finite() || ep_ratio < 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "ep_ratio",
                value: ep_ratio,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            name: name.into(),
            mass,
            ep_ratio,
            hyperfine_splitting,
            optical_frequency,
        })
    }

    /// Caesium-133 with the clock transition at 9.1926 GHz and the D₂
    /// optical transition near 352 THz; η defaults to 1.
    pub fn cesium_133() -> Self {
        Self::custom(
            "cesium-133",
            Mass::new(2.207e-25).expect("preset mass"),
            1.0,
            Frequency::new(9.1926e9).expect("preset splitting"),
            Frequency::new(3.52e14).expect("preset optical frequency"),
        )
        .expect("cesium preset is valid")
    }

    /// Rubidium-87 with the 6.8347 GHz clock transition and the D₂ line
    /// near 384 THz; η defaults to 1.
    pub fn rubidium_87() -> Self {
        Self::custom(
            "rubidium-87",
            Mass::new(1.443e-25).expect("preset mass"),
            1.0,
            Frequency::new(6.8347e9).expect("preset splitting"),
            Frequency::new(3.8423e14).expect("preset optical frequency"),
        )
        .expect("rubidium preset is valid")
    }

    /// The same species with a different equivalence-principle ratio.
    pub fn with_ep_ratio(mut self, ep_ratio: f64) -> Result<Self> {
        if !ep_ratio.is_finite() || ep_ratio < 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "ep_ratio",
                value: ep_ratio,
                reason: "must be finite and non-negative",
            });
        }
        self.ep_ratio = ep_ratio;
        Ok(self)
    }

    /// Species name (presets use their isotope label).
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Inertial mass m_i.
    pub fn inertial_mass(&self) -> Mass {
        self.mass
    }

    /// Equivalence-principle ratio η = m_g/m_i.
    pub fn ep_ratio(&self) -> f64 {
        self.ep_ratio
    }

    /// Gravitational mass m_g = η·m_i.
    pub fn gravitational_mass(&self) -> Mass {
        Mass::new(self.ep_ratio * self.mass.value()).expect("finite mass times finite ratio")
    }

    /// Clock-transition splitting ν_hf.
    pub fn hyperfine_splitting(&self) -> Frequency {
        self.hyperfine_splitting
    }

    /// Optical transition frequency used to derive the Raman wavevector.
    pub fn optical_frequency(&self) -> Frequency {
        self.optical_frequency
    }

    /// Internal energy h·ν_hf of the upper clock state above the ground state.
    pub fn hyperfine_energy(&self) -> Energy {
        Energy::new(H * self.hyperfine_splitting.value()).expect("finite level energy")
    }
}
