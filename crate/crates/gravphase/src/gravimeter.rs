//! Using the interferometer as a gravimeter: inverting the phase for g,
//! fitting fringe scans, propagating detection noise, and comparing the
//! matter-wave lever arm against an optical one.
//!
//! The observable δΔ = −η·κ·g·T² makes g identifiable whenever η·κ·T² ≠ 0.
//! A fringe scan varies the final laser phase φ and measures
//! P_excited(φ) = ½(1 − cos(θ + φ)); a scalar Gauss–Newton fit recovers θ
//! up to a whole number of fringes, reported explicitly as an ambiguity
//! rather than hidden.  The sensitivity ratio m_i·c²/(h·ν) says how many
//! times heavier the atom is than one photon of the reference light — the
//! lever arm a matter-wave clock has over an optical one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::constants::{C_SQUARED, H};
use crate::quantities::{Frequency, GravAccel, Phase, Time, Wavenumber};
use crate::scenario::MzScenario;
use crate::species::AtomSpecies;
use crate::{Error, Result};

/// Convergence threshold on the Gauss–Newton step (rad).
pub const FIT_STEP_TOLERANCE: f64 = 1e-10;

/// Iteration budget of the fringe fit.
pub const FIT_MAX_ITERATIONS: usize = 100;

/// One fringe-scan sample: final-laser-phase offset (rad) and measured
/// excited-port population.
pub type FringeSample = (f64, f64);

/// A recovered value of g with its estimation diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GravimeterEstimate {
    /// Recovered field strength (m/s²).
    pub g_hat: GravAccel,
    /// Recovered total differential phase, on its fringe branch (rad).
    pub phase: Phase,
    /// Principal value of the phase in (−π, π] (rad).
    pub wrapped_phase: Phase,
    /// Whole fringes between `phase` and `wrapped_phase`.
    pub fringe_ambiguity: i64,
    /// RMS excited-population residual of the fit (0 for direct inversion).
    pub rms_residual: f64,
    /// Gauss–Newton iterations used (0 for direct inversion).
    pub iterations: usize,
    /// Whether the estimator converged (always true for direct inversion).
    pub converged: bool,
}

fn phase_to_g(
    phase: f64,
    kappa: Wavenumber,
    interrogation: Time,
    eta: f64,
) -> Result<f64> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "ep_ratio",
            value: eta,
            reason: "must be finite and non-negative",
        });
    }
    let t = interrogation.value();
    let denom = eta * kappa.value() * t * t;
    if denom == 0.0 {
        return Err(Error::Unidentifiable(
            "g does not enter the phase when η·κ·T² = 0".into(),
        ));
    }
    Ok(-phase / denom)
}

/// Direct inversion g = −δΔ/(η·κ·T²) of a known differential phase.
pub fn invert_g(
    delta_phase: Phase,
    kappa: Wavenumber,
    interrogation: Time,
    eta: f64,
) -> Result<GravimeterEstimate> {
    let g_hat = phase_to_g(delta_phase.value(), kappa, interrogation, eta)?;
    Ok(GravimeterEstimate {
        g_hat: GravAccel::new(g_hat)?,
        phase: delta_phase,
        wrapped_phase: delta_phase.wrapped(),
        fringe_ambiguity: delta_phase.fringe_index(),
        rms_residual: 0.0,
        iterations: 0,
        converged: true,
    })
}

fn fit_sums(scan: &[FringeSample], theta: f64) -> (f64, f64, f64) {
    let mut jr = 0.0;
    let mut jj = 0.0;
    let mut rr = 0.0;
    for &(phi, y) in scan {
        let arg = theta + phi;
        let jacobian = 0.5 * arg.sin();
        let residual = y - 0.5 * (1.0 - arg.cos());
        jr += jacobian * residual;
        jj += jacobian * jacobian;
        rr += residual * residual;
    }
    (jr, jj, rr)
}

/// Fits θ in P_excited(φ) = ½(1 − cos(θ + φ)) to a fringe scan and inverts
/// it for g.  Contrast is fixed at one.
///
/// Without `initial_phase` the search starts from the best of 64 coarse
/// candidates in (−π, π], so the returned phase sits on the principal
/// branch (ambiguity 0).  Passing a hint selects the physical fringe branch
/// when it is known from the scenario.
pub fn fit_fringe_scan(
    scan: &[FringeSample],
    kappa: Wavenumber,
    interrogation: Time,
    eta: f64,
    initial_phase: Option<Phase>,
) -> Result<GravimeterEstimate> {
    if scan.len() < 5 {
        return Err(Error::Config(format!(
            "fringe fit needs at least 5 scan points, got {}",
            scan.len()
        )));
    }
    let mut phi_min = f64::INFINITY;
    let mut phi_max = f64::NEG_INFINITY;
    let mut p_min = f64::INFINITY;
    let mut p_max = f64::NEG_INFINITY;
    for &(phi, p) in scan {
        if !phi.is_finite() || !p.is_finite() {
            return Err(Error::Config(format!(
                "scan contains a non-finite sample ({phi}, {p})"
            )));
        }
        phi_min = phi_min.min(phi);
        phi_max = phi_max.max(phi);
        p_min = p_min.min(p);
        p_max = p_max.max(p);
    }
    if phi_max - phi_min < std::f64::consts::PI {
        return Err(Error::Config(format!(
            "scan spans {:.3} rad; at least half a fringe (π rad) is needed",
            phi_max - phi_min
        )));
    }
    if p_max == p_min {
        return Err(Error::Unidentifiable(
            "all scan points have the same population; the fringe phase is undetermined".into(),
        ));
    }

    // The model is exactly 2π-periodic in θ, so the iteration runs on the
    // principal branch where one ulp of θ is far below the step tolerance;
    // the hinted fringe branch is restored afterwards.  At θ ~ 10⁶ rad one
    // ulp alone is ~2×10⁻¹⁰ rad and the update could never settle.
    let (mut theta, branch) = match initial_phase {
        Some(hint) => (hint.wrapped().value(), hint.fringe_index()),
        None => {
            // Coarse SSE search over one period fixes the starting basin.
            let mut best = (f64::INFINITY, 0.0);
            for k in 0..64 {
                let candidate =
                    -std::f64::consts::PI + (k as f64 + 0.5) * std::f64::consts::TAU / 64.0;
                let (_, _, rr) = fit_sums(scan, candidate);
                if rr < best.0 {
                    best = (rr, candidate);
                }
            }
            (best.1, 0)
        }
    };

    let mut converged = false;
    let mut iterations = 0;
    let mut last_step = f64::NAN;
    while iterations < FIT_MAX_ITERATIONS {
        let (jr, jj, _) = fit_sums(scan, theta);
        if jj == 0.0 {
            return Err(Error::Unidentifiable(
                "every scan point sits at a fringe extremum; the fit has no gradient".into(),
            ));
        }
        let step = jr / jj;
        theta += step;
        iterations += 1;
        last_step = step;
        if step.abs() < FIT_STEP_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FitFailure {
            iterations,
            last_step,
        });
    }

    let (_, _, rr) = fit_sums(scan, theta);
    let full_phase = theta + std::f64::consts::TAU * branch as f64;
    let phase = Phase::new(full_phase)?;
    let g_hat = phase_to_g(full_phase, kappa, interrogation, eta)?;
    Ok(GravimeterEstimate {
        g_hat: GravAccel::new(g_hat)?,
        phase,
        wrapped_phase: phase.wrapped(),
        fringe_ambiguity: phase.fringe_index(),
        rms_residual: (rr / scan.len() as f64).sqrt(),
        iterations,
        converged,
    })
}

/// Linearised 1σ uncertainty of g for white population noise of size
/// `sigma` on a scan evaluated at the true phase.
pub fn linearized_g_sigma(
    scan_phases: &[f64],
    true_phase: Phase,
    sigma: f64,
    kappa: Wavenumber,
    interrogation: Time,
    eta: f64,
) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Config(format!(
            "noise level must be finite and positive, got {sigma}"
        )));
    }
    let jj: f64 = scan_phases
        .iter()
        .map(|&phi| {
            let j = 0.5 * (true_phase.value() + phi).sin();
            j * j
        })
        .sum();
    if jj == 0.0 {
        return Err(Error::Unidentifiable(
            "scan has no phase sensitivity at the true phase".into(),
        ));
    }
    let sigma_theta = sigma / jj.sqrt();
    let t = interrogation.value();
    let denom = (eta * kappa.value() * t * t).abs();
    if denom == 0.0 {
        return Err(Error::Unidentifiable(
            "g does not enter the phase when η·κ·T² = 0".into(),
        ));
    }
    Ok(sigma_theta / denom)
}

/// One noisy estimation trial.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NoiseTrial {
    /// Trial index (also the RNG stream).
    pub trial: u64,
    /// Recovered g (m/s²).
    pub g_hat: f64,
    /// g_hat − g_true (m/s²).
    pub error: f64,
}

/// Seeded Monte Carlo over noisy fringe scans.
#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloReport {
    /// Master seed of the run.
    pub seed: u64,
    /// White population-noise σ applied per scan point.
    pub sigma: f64,
    /// True field strength of the scenario (m/s²).
    pub true_g: f64,
    /// Mean |g_hat − g_true| across the trials (m/s²).
    pub mean_abs_error: f64,
    /// Linearised prediction σ_g·√(2/π) of that mean (m/s²).
    pub predicted_mean_abs_error: f64,
    /// Linearised 1σ of g (m/s²).
    pub predicted_sigma_g: f64,
    /// All trials, in index order.
    pub trials: Vec<NoiseTrial>,
}

/// Runs `n_trials` noisy fringe scans and fits each one.
///
/// The generator is counter-based: every trial draws from stream `trial`
/// of a ChaCha generator seeded with `seed`, so results are reproducible
/// and independent of trial order.  Fits start from the scenario's own
/// true phase, fixing the fringe branch; the Monte Carlo quantifies the
/// local estimation error, not fringe ambiguity.
pub fn monte_carlo_fringe_trials(
    scenario: &MzScenario,
    scan_phases: &[f64],
    sigma: f64,
    n_trials: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if n_trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Config(format!(
            "noise level must be finite and positive, got {sigma}"
        )));
    }
    let theta_true = scenario.differential_phase()?;
    let g_true = scenario.uniform_g().value();
    let kappa = scenario.kappa();
    let interrogation = scenario.interrogation_time();
    let eta = scenario.species().ep_ratio();

    let noiseless: Vec<FringeSample> = scan_phases
        .iter()
        .map(|&phi| {
            (
                phi,
                0.5 * (1.0 - (theta_true.value() + phi).cos()),
            )
        })
        .collect();

    let noise = Normal::new(0.0, sigma)
        .map_err(|e| Error::Config(format!("invalid noise distribution: {e}")))?;
    let mut trials = Vec::with_capacity(n_trials as usize);
    let mut abs_error_sum = 0.0;
    for trial in 0..n_trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let noisy: Vec<FringeSample> = noiseless
            .iter()
            .map(|&(phi, p)| (phi, p + noise.sample(&mut rng)))
            .collect();
        let estimate = fit_fringe_scan(&noisy, kappa, interrogation, eta, Some(theta_true))?;
        let error = estimate.g_hat.value() - g_true;
        abs_error_sum += error.abs();
        trials.push(NoiseTrial {
            trial,
            g_hat: estimate.g_hat.value(),
            error,
        });
    }

    let predicted_sigma_g =
        linearized_g_sigma(scan_phases, theta_true, sigma, kappa, interrogation, eta)?;
    Ok(MonteCarloReport {
        seed,
        sigma,
        true_g: g_true,
        mean_abs_error: abs_error_sum / n_trials as f64,
        predicted_mean_abs_error: predicted_sigma_g
            * (2.0 / std::f64::consts::PI).sqrt(),
        predicted_sigma_g,
        trials,
    })
}

/// How a matter-wave phase reference compares against an optical one.
#[derive(Clone, Debug, Serialize)]
pub struct SensitivityReport {
    /// Species providing the matter wave.
    pub species_name: String,
    /// Inertial mass of the atom (kg).
    pub matter_mass: f64,
    /// Reference optical frequency (Hz).
    pub optical_frequency: f64,
    /// Mass equivalent h·ν/c² of one reference photon (kg).
    pub photon_mass_equivalent: f64,
    /// m_i·c²/(h·ν): the matter-wave lever arm over the optical one.
    pub ratio: f64,
}

/// Ratio m_i·c²/(h·ν) of the atom's rest energy to one photon of the
/// reference light; requires ν > 0.
pub fn sensitivity_ratio(species: &AtomSpecies, optical: Frequency) -> Result<SensitivityReport> {
    if optical.value() <= 0.0 {
        return Err(Error::InvalidQuantity {
            quantity: "Frequency",
            value: optical.value(),
            reason: "reference frequency must be positive",
        });
    }
    let m = species.inertial_mass().value();
    let photon_mass = H * optical.value() / C_SQUARED;
    Ok(SensitivityReport {
        species_name: species.name().to_string(),
        matter_mass: m,
        optical_frequency: optical.value(),
        photon_mass_equivalent: photon_mass,
        ratio: m / photon_mass,
    })
}

/// One point of an equivalence-ratio sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpSweepPoint {
    /// Equivalence-principle ratio of this point.
    pub eta: f64,
    /// Numerically integrated total differential phase (rad).
    pub delta_phase: f64,
}

/// Linearity check of the phase in the equivalence ratio.
#[derive(Clone, Debug, Serialize)]
pub struct EpSweepReport {
    /// The sweep samples in grid order.
    pub points: Vec<EpSweepPoint>,
    /// Least-squares slope ∂(δΔ)/∂η (rad).
    pub slope: f64,
    /// Expected slope −κ·g·T² (rad).
    pub expected_slope: f64,
    /// |slope − expected|/|expected|.
    pub relative_deviation: f64,
    /// Whether the slope matches to 10⁻⁹.
    pub passed: bool,
}

/// Integrates the scenario across an η grid and checks that the phase is
/// linear in η with slope −κ·g·T².
pub fn ep_sweep(scenario: &MzScenario, etas: &[f64]) -> Result<EpSweepReport> {
    if etas.len() < 2 {
        return Err(Error::Config(
            "η sweep needs at least two grid values".into(),
        ));
    }
    if etas.windows(2).all(|pair| pair[0] == pair[1]) {
        return Err(Error::Config(
            "η sweep grid values are all identical".into(),
        ));
    }
    let mut points = Vec::with_capacity(etas.len());
    for &eta in etas {
        let phase = scenario
            .clone()
            .with_ep_ratio(eta)?
            .differential_phase()?
            .value();
        points.push(EpSweepPoint {
            eta,
            delta_phase: phase,
        });
    }

    let n = points.len() as f64;
    let mean_eta = points.iter().map(|p| p.eta).sum::<f64>() / n;
    let mean_phase = points.iter().map(|p| p.delta_phase).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for p in &points {
        num += (p.eta - mean_eta) * (p.delta_phase - mean_phase);
        den += (p.eta - mean_eta) * (p.eta - mean_eta);
    }
    let slope = num / den;
    let t = scenario.interrogation_time().value();
    let expected_slope = -(scenario.kappa().value() * scenario.uniform_g().value() * t * t);
    let relative_deviation = (slope - expected_slope).abs() / expected_slope.abs();
    Ok(EpSweepReport {
        points,
        slope,
        expected_slope,
        relative_deviation,
        passed: relative_deviation <= 1e-9,
    })
}
