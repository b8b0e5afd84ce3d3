//! Pulse sequences and the exact piecewise-parabolic arm trajectories they
//! generate.
//!
//! The canonical Mach–Zehnder sequence is π/2 – π – π/2 at times 0, T, 2T.
//! Each two-photon interaction transfers momentum ±ħκ (recoil velocity
//! v_r = ħκ/m_i) and toggles the internal state.  Between pulses both arms
//! fall freely with acceleration −η·g, so every segment is an exact parabola
//! with segment-local initial conditions:
//!
//! * upper arm: kicked up at t = 0, kicked back at T (excited, then ground);
//! * lower arm: undisturbed until T, kicked up at T, readout kick at 2T
//!   (ground, then excited).
//!
//! Relative kinematics are carried separately: the arm separation obeys
//! Δx(t) = v_r·t on [0, T] and closes linearly on [T, 2T] *independently of
//! g, η, and the launch conditions*, which the differential phase integrator
//! exploits to avoid catastrophic cancellation.

use crate::constants::HBAR;
use crate::gravity::GravityEnvironment;
use crate::quantities::{Length, Phase, Time, Velocity, Wavenumber};
use crate::species::AtomSpecies;
use crate::{Error, Result};

/// Role of a laser pulse in the interferometer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseKind {
    /// π/2 pulse: coherent 50/50 splitter.
    BeamSplitter,
    /// π pulse: mirror, swaps the arms' momenta and internal states.
    Mirror,
}

/// One two-photon laser pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaserPulse {
    /// Firing time (s from launch).
    pub time: Time,
    /// Splitter or mirror.
    pub kind: PulseKind,
    /// Laser phase imprinted by this pulse (rad).
    pub phase: Phase,
}

/// An ordered pulse sequence sharing one effective two-photon wavevector.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    kappa: Wavenumber,
    pulses: Vec<LaserPulse>,
}

impl PulseSequence {
    /// Builds a sequence from explicit pulses; times must strictly increase
    /// and κ must be positive.
    pub fn new(kappa: Wavenumber, pulses: Vec<LaserPulse>) -> Result<Self> {
        if kappa.value() <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "Wavenumber",
                value: kappa.value(),
                reason: "effective wavevector must be positive",
            });
        }
        if pulses.is_empty() {
            return Err(Error::UnsupportedSequence("no pulses".into()));
        }
        for pair in pulses.windows(2) {
            if pair[1].time.value() <= pair[0].time.value() {
                return Err(Error::UnsupportedSequence(format!(
                    "pulse times must strictly increase, got {} s then {} s",
                    pair[0].time.value(),
                    pair[1].time.value()
                )));
            }
        }
        Ok(Self { kappa, pulses })
    }

    /// Canonical Mach–Zehnder sequence: π/2 – π – π/2 at 0, T, 2T with all
    /// laser phases zero.  Requires T > 0.
    pub fn mach_zehnder(kappa: Wavenumber, interrogation: Time) -> Result<Self> {
        let t = interrogation.value();
        if t <= 0.0 {
            return Err(Error::InvalidQuantity {
                quantity: "Time",
                value: t,
                reason: "interrogation time must be positive",
            });
        }
        let zero = Phase::new(0.0).expect("zero phase");
        Self::new(
            kappa,
            vec![
                LaserPulse {
                    time: Time::new(0.0).expect("launch time"),
                    kind: PulseKind::BeamSplitter,
                    phase: zero,
                },
                LaserPulse {
                    time: interrogation,
                    kind: PulseKind::Mirror,
                    phase: zero,
                },
                LaserPulse {
                    time: Time::new(2.0 * t).expect("finite time"),
                    kind: PulseKind::BeamSplitter,
                    phase: zero,
                },
            ],
        )
    }

    /// The same sequence with explicit laser phases (φ₁, φ₂, φ₃); only
    /// defined for three-pulse sequences.
    pub fn with_pulse_phases(mut self, phases: [Phase; 3]) -> Result<Self> {
        if self.pulses.len() != 3 {
            return Err(Error::UnsupportedSequence(format!(
                "three laser phases supplied for a {}-pulse sequence",
                self.pulses.len()
            )));
        }
        for (pulse, phase) in self.pulses.iter_mut().zip(phases) {
            pulse.phase = phase;
        }
        Ok(self)
    }

    /// Effective two-photon wavevector κ.
    pub fn kappa(&self) -> Wavenumber {
        self.kappa
    }

    /// The pulses in firing order.
    pub fn pulses(&self) -> &[LaserPulse] {
        &self.pulses
    }

    /// Checks that the sequence is the canonical Mach–Zehnder shape and
    /// returns the interrogation time T; anything else is unsupported.
    pub fn mach_zehnder_interval(&self) -> Result<Time> {
        if self.pulses.len() != 3 {
            return Err(Error::UnsupportedSequence(format!(
                "expected 3 pulses, got {}",
                self.pulses.len()
            )));
        }
        let kinds: Vec<PulseKind> = self.pulses.iter().map(|p| p.kind).collect();
        if kinds
            != [
                PulseKind::BeamSplitter,
                PulseKind::Mirror,
                PulseKind::BeamSplitter,
            ]
        {
            return Err(Error::UnsupportedSequence(
                "expected splitter-mirror-splitter pulse kinds".into(),
            ));
        }
        let t0 = self.pulses[0].time.value();
        let t1 = self.pulses[1].time.value();
        let t2 = self.pulses[2].time.value();
        if t0 != 0.0 {
            return Err(Error::UnsupportedSequence(format!(
                "first pulse must fire at t = 0, got {t0} s"
            )));
        }
        if (t2 - 2.0 * t1).abs() > 1e-12 * t2 {
            return Err(Error::UnsupportedSequence(format!(
                "pulses must be evenly spaced: got intervals {} s and {} s",
                t1,
                t2 - t1
            )));
        }
        Time::new(t1)
    }
}

/// Internal (clock) state of an arm between pulses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InternalState {
    /// Lower clock state.
    Ground,
    /// Upper clock state, h·ν_hf above ground.
    Excited,
}

impl InternalState {
    /// Single-letter label used in trajectory dumps.
    pub fn label(self) -> &'static str {
        match self {
            InternalState::Ground => "g",
            InternalState::Excited => "e",
        }
    }
}

/// One free-fall parabola with segment-local initial conditions.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    /// Segment start time (s from launch).
    pub t_start: f64,
    /// Segment end time (s from launch).
    pub t_end: f64,
    /// Position at `t_start` (m).
    pub x_start: f64,
    /// Velocity just after `t_start` (m/s).
    pub v_start: f64,
    /// Constant acceleration −η·g (m/s²).
    pub accel: f64,
    /// Internal state held throughout the segment.
    pub state: InternalState,
}

impl Segment {
    /// Segment length in time (s).
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// Position at local time dt ∈ [0, duration] past `t_start`.
    pub fn position_at(&self, dt: f64) -> f64 {
        self.x_start + dt * (self.v_start + 0.5 * self.accel * dt)
    }

    /// Velocity at local time dt past `t_start`.
    pub fn velocity_at(&self, dt: f64) -> f64 {
        self.v_start + self.accel * dt
    }

    /// Net displacement over the whole segment (m).
    pub fn displacement(&self) -> f64 {
        let l = self.duration();
        l * (self.v_start + 0.5 * self.accel * l)
    }
}

/// A laser interaction event on one arm.
#[derive(Clone, Copy, Debug)]
pub struct LaserKick {
    /// Kick time (s from launch).
    pub time: f64,
    /// +1 for momentum +ħκ (absorption), −1 for −ħκ.
    pub momentum_sign: f64,
    /// Laser phase imprinted with the same sign convention (rad).
    pub phase: f64,
}

/// One interferometer arm: parabolic segments joined by laser kicks.
#[derive(Clone, Debug)]
pub struct ArmTrajectory {
    segments: Vec<Segment>,
    kicks: Vec<LaserKick>,
    kappa: f64,
}

impl ArmTrajectory {
    /// The free-fall segments in time order.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// The laser kicks applied to this arm, in time order.
    pub fn kicks(&self) -> &[LaserKick] {
        &self.kicks
    }

    /// Effective two-photon wavevector κ (rad/m).
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Trajectory span (start, end) in seconds.
    pub fn span(&self) -> (f64, f64) {
        (
            self.segments.first().map_or(0.0, |s| s.t_start),
            self.segments.last().map_or(0.0, |s| s.t_end),
        )
    }

    /// Segment containing `t` plus the local offset into it.  An interior
    /// segment boundary belongs to the *later* segment (post-kick).
    fn segment_for(&self, t: f64) -> Result<(&Segment, f64)> {
        let (start, end) = self.span();
        if !(t >= start && t <= end) {
            return Err(Error::TimeOutOfRange { t, start, end });
        }
        // An interior `t == t_end` fails the `t < s.t_end` predicate and so
        // falls through to the following (post-kick) segment.
        let idx = self
            .segments
            .iter()
            .position(|s| t < s.t_end)
            .unwrap_or(self.segments.len() - 1);
        let seg = &self.segments[idx];
        Ok((seg, t - seg.t_start))
    }

    /// Position at time t ∈ [0, 2T].
    pub fn position(&self, t: f64) -> Result<f64> {
        let (seg, dt) = self.segment_for(t)?;
        Ok(seg.position_at(dt))
    }

    /// Velocity at time t (post-kick at segment boundaries).
    pub fn velocity(&self, t: f64) -> Result<f64> {
        let (seg, dt) = self.segment_for(t)?;
        Ok(seg.velocity_at(dt))
    }

    /// Internal state at time t (post-kick at segment boundaries).
    pub fn state_at(&self, t: f64) -> Result<InternalState> {
        let (seg, _) = self.segment_for(t)?;
        Ok(seg.state)
    }
}

/// Relative kinematics (upper − lower) over one segment; built from exact
/// products, never from differences of large positions.
#[derive(Clone, Copy, Debug)]
pub struct RelativeSegment {
    /// Segment start time (s).
    pub t_start: f64,
    /// Segment end time (s).
    pub t_end: f64,
    /// Separation at `t_start` (m).
    pub dx_start: f64,
    /// Relative velocity throughout the segment (m/s).
    pub dv: f64,
}

impl RelativeSegment {
    /// Arm separation at local time dt past `t_start`.
    pub fn separation_at(&self, dt: f64) -> f64 {
        self.dx_start + self.dv * dt
    }
}

/// Options for the trajectory builder.
#[derive(Clone, Copy, Debug)]
pub struct MzBuildOptions {
    /// Whether the mirror pulse swaps the arms' internal states (physical
    /// behaviour).  Disabling it is a diagnostic that breaks the internal-
    /// phase cancellation on purpose.
    pub swap_internal_states: bool,
}

impl Default for MzBuildOptions {
    fn default() -> Self {
        Self {
            swap_internal_states: true,
        }
    }
}

/// Both arms of a Mach–Zehnder interferometer plus their relative
/// kinematics.
#[derive(Clone, Debug)]
pub struct MzArms {
    /// Arm kicked at t = 0 (the spatially higher path).
    pub upper: ArmTrajectory,
    /// Arm kicked at t = T.
    pub lower: ArmTrajectory,
    relative: Vec<RelativeSegment>,
    kappa: f64,
    interrogation: f64,
    recoil: f64,
}

impl MzArms {
    /// Relative (upper − lower) kinematics per segment.
    pub fn relative_segments(&self) -> &[RelativeSegment] {
        &self.relative
    }

    /// Effective two-photon wavevector κ (rad/m).
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Interrogation time T (s).
    pub fn interrogation_time(&self) -> f64 {
        self.interrogation
    }

    /// Recoil velocity ħκ/m_i (m/s).
    pub fn recoil_velocity(&self) -> f64 {
        self.recoil
    }

    /// Total sequence duration 2T (s).
    pub fn total_time(&self) -> f64 {
        2.0 * self.interrogation
    }

    /// |x_upper(2T) − x_lower(2T)|: how well the loop closes (m).
    pub fn closure_error(&self) -> f64 {
        let t = self.total_time();
        let xu = self.upper.position(t).expect("end of span");
        let xl = self.lower.position(t).expect("end of span");
        (xu - xl).abs()
    }

    /// Samples both arms on `rows` evenly spaced times across [0, 2T].
    pub fn sample(&self, rows: usize) -> Result<Vec<TrajectorySample>> {
        if rows < 2 {
            return Err(Error::Config(
                "trajectory sampling needs at least 2 rows".into(),
            ));
        }
        let (start, end) = self.upper.span();
        let step = (end - start) / (rows - 1) as f64;
        (0..rows)
            .map(|i| {
                let t = if i + 1 == rows {
                    end
                } else {
                    start + i as f64 * step
                };
                Ok(TrajectorySample {
                    t,
                    x_upper: self.upper.position(t)?,
                    x_lower: self.lower.position(t)?,
                    state_upper: self.upper.state_at(t)?,
                    state_lower: self.lower.state_at(t)?,
                })
            })
            .collect()
    }
}

/// One row of a trajectory dump.
#[derive(Clone, Copy, Debug)]
pub struct TrajectorySample {
    /// Sample time (s).
    pub t: f64,
    /// Upper-arm position (m).
    pub x_upper: f64,
    /// Lower-arm position (m).
    pub x_lower: f64,
    /// Upper-arm internal state.
    pub state_upper: InternalState,
    /// Lower-arm internal state.
    pub state_lower: InternalState,
}

/// Recoil velocity v_r = ħκ/m_i from a two-photon kick.
pub fn recoil_velocity(species: &AtomSpecies, kappa: Wavenumber) -> Result<Velocity> {
    Velocity::new(HBAR * kappa.value() / species.inertial_mass().value())
}

/// Builds both Mach–Zehnder arms with physical state swapping.
pub fn build_mz_arms(
    species: &AtomSpecies,
    env: &GravityEnvironment,
    sequence: &PulseSequence,
    x0: Length,
    v0: Velocity,
) -> Result<MzArms> {
    build_mz_arms_with(species, env, sequence, x0, v0, MzBuildOptions::default())
}

/// Builds both Mach–Zehnder arms with explicit options.
///
/// The sequence must be canonical (splitter–mirror–splitter at 0, T, 2T)
/// and the environment uniform; anything else is rejected.
pub fn build_mz_arms_with(
    species: &AtomSpecies,
    env: &GravityEnvironment,
    sequence: &PulseSequence,
    x0: Length,
    v0: Velocity,
    options: MzBuildOptions,
) -> Result<MzArms> {
    let interrogation = sequence.mach_zehnder_interval()?.value();
    let GravityEnvironment::Uniform { g, .. } = env else {
        return Err(Error::Domain {
            op: "build_mz_arms",
            reason: "free-fall arm trajectories are modelled in a uniform field only".into(),
        });
    };
    let accel = -species.ep_ratio() * g.value();
    let kappa = sequence.kappa().value();
    let vr = recoil_velocity(species, sequence.kappa())?.value();
    let phases: Vec<f64> = sequence.pulses().iter().map(|p| p.phase.value()).collect();
    let (x0, v0) = (x0.value(), v0.value());
    let t = interrogation;

    let (upper_states, lower_states) = if options.swap_internal_states {
        (
            [InternalState::Excited, InternalState::Ground],
            [InternalState::Ground, InternalState::Excited],
        )
    } else {
        (
            [InternalState::Excited, InternalState::Excited],
            [InternalState::Ground, InternalState::Ground],
        )
    };

    let make_arm = |v_first: f64, kick_change_at_t: f64, states: [InternalState; 2]| {
        let first = Segment {
            t_start: 0.0,
            t_end: t,
            x_start: x0,
            v_start: v_first,
            accel,
            state: states[0],
        };
        let second = Segment {
            t_start: t,
            t_end: 2.0 * t,
            x_start: first.position_at(t - first.t_start),
            v_start: first.velocity_at(t - first.t_start) + kick_change_at_t,
            accel,
            state: states[1],
        };
        vec![first, second]
    };

    let upper = ArmTrajectory {
        segments: make_arm(v0 + vr, -vr, upper_states),
        kicks: vec![
            LaserKick {
                time: 0.0,
                momentum_sign: 1.0,
                phase: phases[0],
            },
            LaserKick {
                time: t,
                momentum_sign: -1.0,
                phase: phases[1],
            },
        ],
        kappa,
    };
    let lower = ArmTrajectory {
        segments: make_arm(v0, vr, lower_states),
        kicks: vec![
            LaserKick {
                time: t,
                momentum_sign: 1.0,
                phase: phases[1],
            },
            LaserKick {
                time: 2.0 * t,
                momentum_sign: -1.0,
                phase: phases[2],
            },
        ],
        kappa,
    };
    let relative = vec![
        RelativeSegment {
            t_start: 0.0,
            t_end: t,
            dx_start: 0.0,
            dv: vr,
        },
        RelativeSegment {
            t_start: t,
            t_end: 2.0 * t,
            dx_start: vr * t,
            dv: -vr,
        },
    ];

    Ok(MzArms {
        upper,
        lower,
        relative,
        kappa,
        interrogation,
        recoil: vr,
    })
}
