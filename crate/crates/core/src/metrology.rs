//! Parity-readout phase estimation with heralded NOON states.
//!
//! The interferometer acts on the H and V modes of a single path: a phase
//! `φ` on V, a π/4 polarization rotation as the recombining splitter, and a
//! parity measurement `(−1)^{n_V}`. Sensitivity follows from error
//! propagation with `⟨Π²⟩ = 1`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::circuits::{ideal_noon4, noon4};
use crate::detection::DetectorModel;
use crate::error::{Error, Result};
use crate::fock::{Pol, StateEnsemble, TOLERANCE};
use crate::optics::{apply, compose, phase, rotator};

/// Step of the central difference used for `∂⟨Π⟩/∂φ`.
pub const DERIVATIVE_STEP: f64 = 1e-5;
/// Derivatives smaller than this make the sensitivity undefined.
pub const MIN_SLOPE: f64 = 1e-9;
/// Shot-noise limit for four photons.
pub const SHOT_NOISE_N4: f64 = 0.5;
/// Heisenberg limit for four photons.
pub const HEISENBERG_N4: f64 = 0.25;

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidEfficiency(eta))
    }
}

/// Fidelity of the on-off heralded 4004 state, `3 / ((2−η)²(4−4η+3η²))`.
pub fn fidelity_formula(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(3.0 / ((2.0 - eta).powi(2) * (4.0 - 4.0 * eta + 3.0 * eta * eta)))
}

/// Parity expectation after the interferometer.
pub fn mz_parity(ens: &StateEnsemble, phi: f64) -> Result<f64> {
    let modes = ens.register().modes();
    let path = match modes {
        [h, v] if h.path == v.path && h.pol == Pol::H && v.pol == Pol::V => h.path.clone(),
        _ => return Err(Error::NotSinglePath),
    };
    let tr = ens.trace();
    if tr <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let interferometer = compose(&[phase(&modes[1], phi)?, rotator(&path, FRAC_PI_4)?])?;
    let mut acc = 0.0;
    for b in ens.branches() {
        let out = apply(&b.state, &interferometer)?;
        let signed: f64 =
            out.amplitudes().map(|(occ, a)| if occ.counts()[1] % 2 == 0 { a.norm_sqr() } else { -a.norm_sqr() }).sum();
        acc += b.weight * signed;
    }
    let p = acc / tr;
    if p.abs() > 1.0 + TOLERANCE {
        return Err(Error::InvalidParameter(format!("parity {p} outside [-1, 1]")));
    }
    Ok(p.clamp(-1.0, 1.0))
}

/// Error-propagation sensitivity `√(1 − ⟨Π⟩²) / |∂⟨Π⟩/∂φ|` by central difference.
pub fn phase_sensitivity_numeric(ens: &StateEnsemble, phi: f64) -> Result<f64> {
    let p = mz_parity(ens, phi)?;
    let h = DERIVATIVE_STEP;
    let slope = (mz_parity(ens, phi + h)? - mz_parity(ens, phi - h)?) / (2.0 * h);
    if slope.abs() < MIN_SLOPE {
        return Err(Error::UndefinedSensitivity { phi });
    }
    Ok((1.0 - p * p).max(0.0).sqrt() / slope.abs())
}

/// Closed-form sensitivity of the on-off heralded 4004 state,
/// `¼ √(1/F² − [(1−η)⁴ − cos 4φ]²) / |sin 4φ|`.
pub fn phase_sensitivity_closed(eta: f64, phi: f64) -> Result<f64> {
    let f = fidelity_formula(eta)?;
    let s = (4.0 * phi).sin();
    if s.abs() < 1e-12 {
        return Err(Error::UndefinedSensitivity { phi });
    }
    let c = (1.0 - eta).powi(4) - (4.0 * phi).cos();
    Ok(0.25 * (1.0 / (f * f) - c * c).max(0.0).sqrt() / s.abs())
}

/// `¼ √(1/F² − (1−η)⁸)`, the closed form evaluated at `φ = π/8`.
///
/// For `η < 1` the true minimum over `φ` sits slightly below this value,
/// at a phase just past `π/8`; see [`optimal_sensitivity`].
pub fn sensitivity_bound(eta: f64) -> Result<f64> {
    let f = fidelity_formula(eta)?;
    Ok(0.25 * (1.0 / (f * f) - (1.0 - eta).powi(8)).max(0.0).sqrt())
}

/// Minimum of [`phase_sensitivity_closed`] over `φ ∈ (0, π/4)` as `(φ, Δφ)`,
/// found by golden-section search.
pub fn optimal_sensitivity(eta: f64) -> Result<(f64, f64)> {
    check_eta(eta)?;
    let f = |phi: f64| phase_sensitivity_closed(eta, phi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (1e-6, FRAC_PI_4 - 1e-6);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let phi = 0.5 * (lo + hi);
    Ok((phi, f(phi)?))
}

/// Detector efficiency at which [`sensitivity_bound`] equals `target`, by bisection.
pub fn threshold_efficiency(target: f64) -> Result<f64> {
    let at_one = sensitivity_bound(1.0)?;
    let at_zero = sensitivity_bound(0.0)?;
    if !target.is_finite() || target < at_one - 1e-12 || target > at_zero {
        return Err(Error::NoRoot { target });
    }
    if (target - at_one).abs() <= 1e-12 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // the bound decreases monotonically in eta
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if sensitivity_bound(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct MetrologyResult {
    pub eta: f64,
    pub phi: f64,
    pub parity: f64,
    /// `None` at fringe extrema.
    pub delta_phi_numeric: Option<f64>,
    /// `None` where `sin 4φ = 0`.
    pub delta_phi_closed: Option<f64>,
    pub delta_phi_bound: f64,
    pub fidelity: f64,
    /// Sign `s` with `⟨Π⟩ = s · cos 4φ` for the ideal target state.
    pub fringe_sign: f64,
}

/// The on-off heralded 4004 ensemble from a balanced splitter, normalized.
pub fn heralded_noon4(eta: f64) -> Result<StateEnsemble> {
    let res = noon4(FRAC_1_SQRT_2, FRAC_1_SQRT_2, DetectorModel::on_off(eta)?)?;
    res.output.normalize()
}

/// Sign of the ideal 4004 parity fringe relative to `cos 4φ`.
pub fn fringe_sign() -> f64 {
    let p = mz_parity(&ideal_noon4().into(), 0.0).expect("ideal state is a single path");
    p.signum()
}

/// Evaluates the heralded 4004 state over an efficiency × phase grid, eta-major.
pub fn sweep(eta_grid: &[f64], phi_grid: &[f64]) -> Result<Vec<MetrologyResult>> {
    if eta_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be non-empty".to_owned()));
    }
    let sign = fringe_sign();
    let target = ideal_noon4();
    let mut rows = Vec::with_capacity(eta_grid.len() * phi_grid.len());
    for &eta in eta_grid {
        let ens = heralded_noon4(eta)?;
        let fidelity = ens.fidelity_to_pure(&target)?;
        let bound = sensitivity_bound(eta)?;
        for &phi in phi_grid {
            let numeric = match phase_sensitivity_numeric(&ens, phi) {
                Ok(v) => Some(v),
                Err(Error::UndefinedSensitivity { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(MetrologyResult {
                eta,
                phi,
                parity: mz_parity(&ens, phi)?,
                delta_phi_numeric: numeric,
                delta_phi_closed: phase_sensitivity_closed(eta, phi).ok(),
                delta_phi_bound: bound,
                fidelity,
                fringe_sign: sign,
            });
        }
    }
    Ok(rows)
}
