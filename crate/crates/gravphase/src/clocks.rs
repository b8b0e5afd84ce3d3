//! Gravitational time dilation, photon redshift, and clock-phase
//! bookkeeping.
//!
//! In the weak field a clock at potential φ runs fast relative to one at
//! potential 0 by the fractional rate φ/c².  Over a common duration T two
//! clocks at x₁ and x₂ therefore accumulate a time difference
//! δT = T·(φ(x₁)−φ(x₂))/c², positive when x₁ sits higher, and a clock of
//! frequency ν accumulates the phase deficit 2πν·δT.  A photon climbing the
//! same potential difference arrives shifted by the identical fraction —
//! dilation and redshift are one number viewed from two experiments.

use serde::Serialize;

use crate::constants::C_SQUARED;
use crate::gravity::GravityEnvironment;
use crate::quantities::{Frequency, Length, Phase, Time};
use crate::{Error, Result};

/// Fractional rate difference (φ(x₁) − φ(x₂))/c² between clocks at x₁ and x₂.
pub fn fractional_rate(env: &GravityEnvironment, x1: Length, x2: Length) -> Result<f64> {
    Ok(env.potential_difference(x1, x2)?.value() / C_SQUARED)
}

/// Elapsed-time difference δT = T·(φ(x₁) − φ(x₂))/c² over a common duration.
///
/// Positive when x₁ is higher in the field (the upper clock runs fast).
pub fn time_dilation(
    env: &GravityEnvironment,
    x1: Length,
    x2: Length,
    duration: Time,
) -> Result<Time> {
    Time::new(duration.value() * fractional_rate(env, x1, x2)?)
}

/// Fractional frequency shift (φ_emit − φ_receive)/c² of a photon sent from
/// `x_emit` to `x_receive`; negative when the photon climbs.
pub fn fractional_redshift(
    env: &GravityEnvironment,
    x_emit: Length,
    x_receive: Length,
) -> Result<f64> {
    Ok(env.potential_difference(x_emit, x_receive)?.value() / C_SQUARED)
}

/// Received frequency ν·(1 + (φ_emit − φ_receive)/c²) of a photon.
pub fn photon_redshift(
    env: &GravityEnvironment,
    x_emit: Length,
    x_receive: Length,
    nu: Frequency,
) -> Result<Frequency> {
    if nu.value() <= 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "Frequency",
            value: nu.value(),
            reason: "photon frequency must be positive",
        });
    }
    Frequency::new(nu.value() * (1.0 + fractional_redshift(env, x_emit, x_receive)?))
}

/// Phase deficit 2πν·δT accumulated by a clock of frequency ν over a time
/// offset δT.
pub fn clock_phase_deficit(nu: Frequency, delta_t: Time) -> Result<Phase> {
    if nu.value() <= 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "Frequency",
            value: nu.value(),
            reason: "clock frequency must be positive",
        });
    }
    Phase::new(nu.angular().value() * delta_t.value())
}

/// Smallest time offset resolvable from a phase at a given clock frequency:
/// δT = Δφ/(2πν).  Inverse of [`clock_phase_deficit`].
pub fn dilation_from_phase(nu: Frequency, phase: Phase) -> Result<Time> {
    if nu.value() <= 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "Frequency",
            value: nu.value(),
            reason: "clock frequency must be positive",
        });
    }
    Time::new(phase.value() / nu.angular().value())
}

/// A clock pinned at a position, ticking at a proper frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClockStation {
    position: Length,
    frequency: Frequency,
}

impl ClockStation {
    /// A station at `position` with proper frequency ν > 0.
    pub fn new(position: Length, frequency: Frequency) -> Result<Self> {
        if frequency.value() <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "Frequency",
                value: frequency.value(),
                reason: "clock frequency must be positive",
            });
        }
        Ok(Self {
            position,
            frequency,
        })
    }

    /// Station position.
    pub fn position(self) -> Length {
        self.position
    }

    /// Proper frequency of the clock.
    pub fn frequency(self) -> Frequency {
        self.frequency
    }
}

/// Side-by-side comparison of two clock stations over a common duration.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClockComparison {
    /// Fractional rate difference (φ₁−φ₂)/c² (dimensionless).
    pub fractional_rate: f64,
    /// Elapsed-time difference δT accumulated over the duration (s).
    pub delta_t: Time,
    /// Phase deficit 2πν₁·δT of station 1's clock (rad).
    pub phase_deficit: Phase,
    /// Fractional shift of a photon sent from station 1 to station 2.
    pub fractional_redshift: f64,
    /// Station-1 photon frequency as received at station 2 (Hz).
    pub received_frequency: Frequency,
}

/// Compares two stations: time dilation over `duration`, the phase deficit
/// of station 1's clock, and the shift of a photon sent from 1 to 2.
pub fn compare_clocks(
    env: &GravityEnvironment,
    station1: &ClockStation,
    station2: &ClockStation,
    duration: Time,
) -> Result<ClockComparison> {
    if duration.value() < 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "Time",
            value: duration.value(),
            reason: "comparison duration must be non-negative",
        });
    }
    let x1 = station1.position();
    let x2 = station2.position();
    let rate = fractional_rate(env, x1, x2)?;
    let delta_t = time_dilation(env, x1, x2, duration)?;
    Ok(ClockComparison {
        fractional_rate: rate,
        delta_t,
        phase_deficit: clock_phase_deficit(station1.frequency(), delta_t)?,
        fractional_redshift: fractional_redshift(env, x1, x2)?,
        received_frequency: photon_redshift(env, x1, x2, station1.frequency())?,
    })
}
