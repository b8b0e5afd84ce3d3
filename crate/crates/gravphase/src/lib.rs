//! Simulation library for light-pulse atom-interferometer gravimetry.
//!
//! The crate models a Mach–Zehnder atom interferometer (π/2 – π – π/2 laser
//! pulses at times 0, T, 2T) in which the gravitational mass of the atom is
//! allowed to differ from its inertial mass by an explicit ratio
//! η = m_g / m_i.  It provides:
//!
//! * validated scalar quantities and Compton/de Broglie conversions
//!   ([`quantities`]),
//! * weak-field gravitational environments and mass–potential couplings
//!   ([`gravity`]),
//! * gravitational time dilation, redshift, and clock-phase bookkeeping
//!   ([`clocks`]),
//! * exact piecewise-parabolic arm trajectories for the pulse sequence
//!   ([`sequence`]),
//! * a numerical path-phase integrator plus the chain of closed-form
//!   expressions it must reproduce ([`phase`]),
//! * fringe patterns, port populations, and parameter scans
//!   ([`interferometer`]),
//! * inversion of the phase for g, fringe fitting, noise Monte Carlo, and
//!   sensitivity comparisons ([`gravimeter`]),
//! * a bundled scenario type tying the above together ([`scenario`]).
//!
//! The flagship consistency check, [`phase::verify_equivalence_chain`],
//! integrates the differential potential-energy phase along the two arms and
//! compares it against every closed form; all of them must agree to a part
//! in 10⁹ for a valid configuration.

pub mod clocks;
pub mod constants;
mod error;
pub mod gravimeter;
pub mod gravity;
pub mod interferometer;
pub mod phase;
pub mod quantities;
pub mod scenario;
pub mod sequence;
pub mod species;

pub use error::{Error, Result};
