//! Weak-field gravitational environments and mass–potential couplings.
//!
//! Two models are supported: a uniform field φ(x) = g·x (+ an optional gauge
//! offset, which must never affect observables) and a point mass
//! φ(r) = −GM/r.  Potential *differences* are computed in stabilised forms —
//! `g·(x₁−x₂)` and `GM·(r₁−r₂)/(r₁r₂)` — so that gauge terms cancel exactly
//! and nearby positions do not lose precision to cancellation.
//!
//! The coupling of matter to the potential carries the full internal energy:
//! E_g = −(η·m_i + E_internal/c²)·φ, i.e. the clock state of the atom weighs.

use serde::Serialize;

use crate::constants::C_SQUARED;
use crate::quantities::{Energy, GravAccel, GravPotential, Length};
use crate::species::AtomSpecies;
use crate::{Error, Result};

/// A background gravitational field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum GravityEnvironment {
    /// Uniform field: φ(x) = g·x + gauge_offset, with x measured upward.
    Uniform {
        /// Field strength g (m/s²).
        g: GravAccel,
        /// Constant added to the potential; physically unobservable.
        gauge_offset: GravPotential,
    },
    /// Point mass: φ(r) = −GM/r for r > 0.
    PointMass {
        /// Standard gravitational parameter GM (m³/s²).
        gm: f64,
    },
}

impl GravityEnvironment {
    /// Uniform field with zero gauge offset.
    pub fn uniform(g: GravAccel) -> Self {
        Self::Uniform {
            g,
            gauge_offset: GravPotential::new(0.0).expect("zero offset"),
        }
    }

    /// Uniform field with an explicit gauge offset.
    pub fn uniform_with_gauge(g: GravAccel, gauge_offset: GravPotential) -> Self {
        Self::Uniform { g, gauge_offset }
    }

    /// Point-mass field with standard gravitational parameter GM > 0.
    pub fn point_mass(gm: f64) -> Result<Self> {
        if !gm.is_finite() || gm <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "gm",
                value: gm,
                reason: "standard gravitational parameter must be finite and positive",
            });
        }
        Ok(Self::PointMass { gm })
    }

    /// Potential at a position (uniform: height; point mass: radius r > 0).
    pub fn potential_at(&self, x: Length) -> Result<GravPotential> {
        match *self {
            Self::Uniform { g, gauge_offset } => {
                GravPotential::new(g.value() * x.value() + gauge_offset.value())
            }
            Self::PointMass { gm } => {
                if x.value() <= 0.0 {
                    return Err(Error::Domain {
                        op: "potential_at",
                        reason: format!("point-mass potential needs radius > 0, got {} m", x.value()),
                    });
                }
                GravPotential::new(-gm / x.value())
            }
        }
    }

    /// Potential difference φ(x₁) − φ(x₂) in a stabilised form.
    ///
    /// For the uniform field this is exactly g·(x₁−x₂): the gauge offset is
    /// eliminated algebraically, not by subtraction at run time.
    pub fn potential_difference(&self, x1: Length, x2: Length) -> Result<GravPotential> {
        match *self {
            Self::Uniform { g, .. } => GravPotential::new(g.value() * (x1.value() - x2.value())),
            Self::PointMass { gm } => {
                if x1.value() <= 0.0 || x2.value() <= 0.0 {
                    return Err(Error::Domain {
                        op: "potential_difference",
                        reason: format!(
                            "point-mass potential needs radii > 0, got {} m and {} m",
                            x1.value(),
                            x2.value()
                        ),
                    });
                }
                GravPotential::new(gm * (x1.value() - x2.value()) / (x1.value() * x2.value()))
            }
        }
    }

    /// True for the uniform-field model.
    pub fn is_uniform(&self) -> bool {
        matches!(self, Self::Uniform { .. })
    }
}

/// Gravitational coupling energy of a bare energy content: −E·φ/c².
pub fn coupling_energy(energy: Energy, potential: GravPotential) -> Result<Energy> {
    Energy::new(-energy.value() * potential.value() / C_SQUARED)
}

/// Gravitational coupling energy of an atom in a given internal state:
/// E_g = −(η·m_i + E_internal/c²)·φ.
///
/// The first term is the rest mass weighed with the equivalence-principle
/// ratio; the second lets the internal (clock) energy gravitate at its mass
/// equivalent.
pub fn massive_coupling_energy(
    species: &AtomSpecies,
    internal_energy: Energy,
    potential: GravPotential,
) -> Result<Energy> {
    let weight = species.ep_ratio() * species.inertial_mass().value()
        + internal_energy.value() / C_SQUARED;
    Energy::new(-weight * potential.value())
}
