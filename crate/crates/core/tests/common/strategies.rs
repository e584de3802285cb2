//! Random small instances for property checks: at most 4 modes and 6 photons.

use linopt::optics::ModeTransform;
use linopt::{Branch, ModeId, PureState, Register, StateEnsemble};
use proptest::prelude::*;

use super::{c, unitary_from};

pub fn reg2() -> Register {
    Register::from_paths(&["a", "b"]).unwrap()
}

pub fn modes(path: &str) -> Vec<ModeId> {
    ModeId::path_pair(path).unwrap().to_vec()
}

/// Sparse random state over (a.H, a.V, b.H, b.V) with at most 6 photons per term.
pub fn state_strategy() -> impl Strategy<Value = PureState> {
    let term = (prop::collection::vec(0u8..=3, 4), -1.0f64..1.0, -1.0f64..1.0);
    prop::collection::vec(term, 1..5).prop_map(|terms| {
        let entries = terms.into_iter().map(|(mut occ, re, im)| {
            while occ.iter().map(|&n| n as usize).sum::<usize>() > 6 {
                let k = occ.iter().position(|&n| n > 0).unwrap();
                occ[k] -= 1;
            }
            (occ.into(), c(re, im))
        });
        let s = PureState::from_amplitudes(reg2(), entries).unwrap();
        if s.is_zero() {
            PureState::vacuum(reg2())
        } else {
            s.normalized().unwrap()
        }
    })
}

/// Random states on path a only, up to 6 photons.
pub fn path_state_strategy() -> impl Strategy<Value = PureState> {
    let term = (0u8..=6, 0u8..=6, -1.0f64..1.0, -1.0f64..1.0);
    prop::collection::vec(term, 1..4).prop_map(|terms| {
        let reg = Register::from_paths(&["a"]).unwrap();
        let entries = terms.into_iter().map(|(h, v, re, im)| (vec![h, v.min(6 - h)].into(), c(re, im)));
        let s = PureState::from_amplitudes(reg.clone(), entries).unwrap();
        if s.is_zero() {
            PureState::vacuum(reg)
        } else {
            s.normalized().unwrap()
        }
    })
}

pub fn unitary_strategy(n: usize) -> impl Strategy<Value = ModeTransform> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |raw| {
        let reg = Register::from_paths(&["a", "b"]).unwrap();
        let reg = Register::new(reg.modes()[..n].iter().cloned()).unwrap();
        ModeTransform::new(reg, unitary_from(&raw, n)).unwrap()
    })
}

pub fn ensemble_strategy() -> impl Strategy<Value = StateEnsemble> {
    prop::collection::vec((0.0f64..1.0, state_strategy()), 1..4).prop_map(|parts| {
        let total: f64 = parts.iter().map(|p| p.0).sum::<f64>().max(1e-9);
        let branches = parts.into_iter().map(|(w, state)| Branch { weight: w / total, state }).collect();
        StateEnsemble::new(reg2(), branches).unwrap()
    })
}
