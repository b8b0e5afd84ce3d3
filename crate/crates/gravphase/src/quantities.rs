//! Validated scalar quantities and matter-wave conversions.
//!
//! Each quantity wraps a finite `f64` in SI units.  Constructors reject NaN
//! and infinities (and negative values where the quantity is a magnitude),
//! so downstream arithmetic can assume well-formed inputs.  The free
//! functions at the bottom implement the Compton / de Broglie bookkeeping
//! used throughout the interferometer model:
//!
//! * ω_c = m c²/ħ  — angular Compton frequency of a mass,
//! * λ_C = h/(m c) — Compton wavelength,
//! * λ_dB = h/(m|v|) — de Broglie wavelength of the centre of mass.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::constants::{C, C_SQUARED, H, HBAR};
use crate::{Error, Result};

fn ensure_finite(quantity: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidQuantity {
            quantity,
            value,
            reason: "must be finite",
        })
    }
}

fn ensure_non_negative(quantity: &'static str, value: f64) -> Result<f64> {
    let value = ensure_finite(quantity, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidQuantity {
            quantity,
            value,
            reason: "must be non-negative",
        })
    }
}

macro_rules! quantity {
    ($name:ident, $unit:literal, $check:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
        #[serde(transparent)]
        pub struct $name(f64);

        impl $name {
            /// Validated constructor.
            pub fn new(value: f64) -> Result<Self> {
                Ok(Self($check(stringify!($name), value)?))
            }

            /// Raw value in SI units.
            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} {}", self.0, $unit)
            }
        }
    };
}

quantity!(Mass, "kg", ensure_non_negative, "Mass in kilograms.");
quantity!(Length, "m", ensure_finite, "Length or position in metres.");
quantity!(Time, "s", ensure_finite, "Time or duration in seconds.");
quantity!(Velocity, "m/s", ensure_finite, "Velocity in metres per second.");
quantity!(
    Frequency,
    "Hz",
    ensure_non_negative,
    "Cyclic frequency in hertz."
);
quantity!(
    AngularFrequency,
    "rad/s",
    ensure_non_negative,
    "Angular frequency in radians per second."
);
quantity!(Energy, "J", ensure_finite, "Energy in joules.");
quantity!(Phase, "rad", ensure_finite, "Phase in radians (unwrapped).");
quantity!(
    Wavenumber,
    "rad/m",
    ensure_non_negative,
    "Angular wavenumber in radians per metre."
);
quantity!(
    GravAccel,
    "m/s^2",
    ensure_finite,
    "Gravitational acceleration in metres per second squared."
);
quantity!(
    GravPotential,
    "m^2/s^2",
    ensure_finite,
    "Gravitational potential (energy per unit mass) in m²/s²."
);

impl Frequency {
    /// The corresponding angular frequency 2πν.
    pub fn angular(self) -> AngularFrequency {
        AngularFrequency(std::f64::consts::TAU * self.0)
    }
}

impl AngularFrequency {
    /// The corresponding cyclic frequency ω/2π.
    pub fn cyclic(self) -> Frequency {
        Frequency(self.0 / std::f64::consts::TAU)
    }
}

impl Phase {
    /// The principal value in (−π, π].
    pub fn wrapped(self) -> Phase {
        let w = self.0.rem_euclid(std::f64::consts::TAU);
        Phase(if w > std::f64::consts::PI {
            w - std::f64::consts::TAU
        } else {
            w
        })
    }

    /// Number of whole fringes between this phase and its principal value.
    pub fn fringe_index(self) -> i64 {
        ((self.0 - self.wrapped().0) / std::f64::consts::TAU).round() as i64
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase(self.0 + rhs.0)
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        Phase(self.0 - rhs.0)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase(-self.0)
    }
}

/// Angular Compton frequency ω_c = m c²/ħ of a mass.
pub fn compton_frequency(mass: Mass) -> Result<AngularFrequency> {
    AngularFrequency::new(mass.value() * C_SQUARED / HBAR)
}

/// Compton wavelength λ_C = h/(m c); requires m > 0.
pub fn compton_wavelength(mass: Mass) -> Result<Length> {
    if mass.value() == 0.0 {
        return Err(Error::DivideByZero {
            op: "compton_wavelength",
            detail: "mass is zero",
        });
    }
    Length::new(H / (mass.value() * C))
}

/// de Broglie wavelength λ_dB = h/(m·|v|) of the centre of mass.
///
/// A vanishing velocity has an infinite wavelength, which is signalled
/// explicitly as a division by zero rather than returned as `inf`.
pub fn de_broglie_wavelength(mass: Mass, velocity: Velocity) -> Result<Length> {
    if mass.value() == 0.0 {
        return Err(Error::DivideByZero {
            op: "de_broglie_wavelength",
            detail: "mass is zero",
        });
    }
    if velocity.value() == 0.0 {
        return Err(Error::DivideByZero {
            op: "de_broglie_wavelength",
            detail: "velocity is zero (wavelength would be infinite)",
        });
    }
    Length::new(H / (mass.value() * velocity.value().abs()))
}

/// Mass equivalent m = ħω/c² of an angular frequency.
pub fn mass_from_compton_frequency(omega: AngularFrequency) -> Result<Mass> {
    Mass::new(omega.value() * HBAR / C_SQUARED)
}

/// Round trip m → ω_c → m; exercises the Compton bookkeeping end to end.
pub fn mass_frequency_roundtrip(mass: Mass) -> Result<Mass> {
    mass_from_compton_frequency(compton_frequency(mass)?)
}
