//! Photodetection as conditioning.
//!
//! Every detector element used here is diagonal in the Fock basis of the
//! detected modes, so conditioning a pure branch splits it into one pure
//! branch per detected occupation pattern, weighted by the POVM element's
//! eigenvalue for that pattern's photon number. Detected modes are removed
//! from the register. Returned probabilities are absolute: the trace of the
//! conditioned (unnormalized) output.

use crate::error::{Error, Result};
use crate::fock::{Branch, ModeId, PureState, Register, StateEnsemble};

/// Detector response model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorModel {
    /// Ideal photon-number-resolving detector.
    Pnr,
    /// Bucket detector with per-photon efficiency `eta`.
    OnOff { eta: f64 },
}

impl DetectorModel {
    pub fn on_off(eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(DetectorModel::OnOff { eta })
    }

    /// Probability of no click given `n` photons.
    pub fn no_click_weight(&self, n: usize) -> f64 {
        match *self {
            DetectorModel::Pnr => {
                if n == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            DetectorModel::OnOff { eta } => (1.0 - eta).powi(n as i32),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            DetectorModel::Pnr => Ok(()),
            DetectorModel::OnOff { eta } => check_eta(eta),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidEfficiency(eta))
    }
}

fn detected_indices(register: &Register, modes: &[ModeId]) -> Result<Vec<usize>> {
    let mut idx = register.indices_of(modes)?;
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

/// Shared conditioning kernel: weight each detected pattern by `weight(n)`
/// and trace the detected modes out.
fn condition_with<F>(ens: &StateEnsemble, modes: &[ModeId], weight: F) -> Result<StateEnsemble>
where
    F: Fn(usize) -> f64,
{
    let idx = detected_indices(ens.register(), modes)?;
    let residual = ens.register().without_indices(&idx);
    let mut branches = Vec::new();
    for b in ens.branches() {
        let (_, parts) = b.state.split_by(&idx);
        for (pattern, state) in parts {
            let n: usize = pattern.iter().map(|&k| k as usize).sum();
            let w = b.weight * weight(n);
            if w > 0.0 && !state.is_zero() {
                branches.push(Branch { weight: w, state });
            }
        }
    }
    Ok(StateEnsemble::from_parts(residual, branches))
}

/// Number-resolved projection onto `n` photons in total over `modes`.
///
/// The output must be pure, so all kept amplitudes have to share one
/// detected pattern (always true for a single mode or for `n = 0`).
pub fn project_pnr(state: &PureState, modes: &[ModeId], n: usize) -> Result<(f64, PureState)> {
    let idx = detected_indices(state.register(), modes)?;
    let (residual, parts) = state.split_by(&idx);
    let mut kept = parts.into_iter().filter(|(p, s)| p.iter().map(|&k| k as usize).sum::<usize>() == n && !s.is_zero());
    let out = match (kept.next(), kept.next()) {
        (None, _) => PureState::zero(residual),
        (Some((_, s)), None) => s,
        (Some(_), Some(_)) => return Err(Error::MixedOutcome),
    };
    Ok((out.norm_sq(), out))
}

/// Number-resolved projection on an ensemble; branches split per pattern.
pub fn condition_pnr(ens: &StateEnsemble, modes: &[ModeId], n: usize) -> Result<(f64, StateEnsemble)> {
    let out = condition_with(ens, modes, |k| if k == n { 1.0 } else { 0.0 })?;
    Ok((out.trace(), out))
}

/// On-off detector reports no click: POVM element Σ (1−η)ⁿ |n⟩⟨n|.
pub fn condition_no_click(ens: &StateEnsemble, modes: &[ModeId], eta: f64) -> Result<(f64, StateEnsemble)> {
    let det = DetectorModel::on_off(eta)?;
    let out = condition_with(ens, modes, |n| det.no_click_weight(n))?;
    Ok((out.trace(), out))
}

/// On-off detector clicks: POVM element I − Π₀.
pub fn condition_click(ens: &StateEnsemble, modes: &[ModeId], eta: f64) -> Result<(f64, StateEnsemble)> {
    let det = DetectorModel::on_off(eta)?;
    let out = condition_with(ens, modes, |n| 1.0 - det.no_click_weight(n))?;
    Ok((out.trace(), out))
}

/// Heralds "no photons seen" with the given detector model.
pub fn condition_no_detection(
    ens: &StateEnsemble,
    modes: &[ModeId],
    detector: DetectorModel,
) -> Result<(f64, StateEnsemble)> {
    detector.validate()?;
    let out = condition_with(ens, modes, |n| detector.no_click_weight(n))?;
    Ok((out.trace(), out))
}

/// Partial trace over `modes`.
pub fn trace_out(ens: &StateEnsemble, modes: &[ModeId]) -> Result<StateEnsemble> {
    condition_with(ens, modes, |_| 1.0)
}
