//! Multi-mode Fock states over labeled polarization/path modes.
//!
//! A [`Register`] is a canonically ordered list of [`ModeId`]s. A [`PureState`]
//! stores a sparse map from [`OccupationVector`] to complex amplitude. States are
//! allowed to be sub-normalized: after heralding, the squared norm is the
//! probability of every conditioning event applied so far. Mixed states produced
//! by lossy detection are kept as a [`StateEnsemble`] of weighted pure branches.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;
/// Total photon number allowed in one state.
pub const MAX_PHOTONS: usize = 16;
/// Number of modes allowed in one register.
pub const MAX_MODES: usize = 12;
/// Absolute tolerance for closed-form comparisons.
pub const TOLERANCE: f64 = 1e-10;

/// Basis polarization. D, A, L and R are superpositions and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pol::H => f.write_str("H"),
            Pol::V => f.write_str("V"),
        }
    }
}

/// One optical mode: a spatial path and a basis polarization.
///
/// Ordering is lexicographic by path, then H before V.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub path: String,
    pub pol: Pol,
}

impl ModeId {
    pub fn new(path: &str, pol: Pol) -> Result<Self> {
        validate_path(path)?;
        Ok(ModeId { path: path.to_owned(), pol })
    }

    pub fn h(path: &str) -> Result<Self> {
        Self::new(path, Pol::H)
    }

    pub fn v(path: &str) -> Result<Self> {
        Self::new(path, Pol::V)
    }

    /// Both polarization modes of a path, H first.
    pub fn path_pair(path: &str) -> Result<[ModeId; 2]> {
        Ok([Self::h(path)?, Self::v(path)?])
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.path, self.pol)
    }
}

impl FromStr for ModeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (path, pol) = s.rsplit_once('.').ok_or_else(|| Error::InvalidModeLabel(s.to_owned()))?;
        let pol = match pol {
            "H" => Pol::H,
            "V" => Pol::V,
            _ => return Err(Error::InvalidModeLabel(s.to_owned())),
        };
        ModeId::new(path, pol).map_err(|_| Error::InvalidModeLabel(s.to_owned()))
    }
}

/// Path labels are identifiers: a letter or `_` followed by letters, digits, `_` or `'`.
pub fn validate_path(path: &str) -> Result<()> {
    let mut chars = path.chars();
    let ok = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidPathLabel(path.to_owned()))
    }
}

/// An immutable, canonically ordered set of modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Register(Arc<[ModeId]>);

impl Register {
    pub fn new(modes: impl IntoIterator<Item = ModeId>) -> Result<Self> {
        let mut modes: Vec<ModeId> = modes.into_iter().collect();
        modes.sort();
        if let Some(w) = modes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMode(w[0].clone()));
        }
        if modes.len() > MAX_MODES {
            return Err(Error::ModeCapExceeded { modes: modes.len(), cap: MAX_MODES });
        }
        Ok(Register(modes.into()))
    }

    pub fn empty() -> Self {
        Register(Arc::from(Vec::new()))
    }

    /// Register holding the H and V modes of every listed path.
    pub fn from_paths<S: AsRef<str>>(paths: &[S]) -> Result<Self> {
        let mut modes = Vec::with_capacity(2 * paths.len());
        for p in paths {
            modes.extend(ModeId::path_pair(p.as_ref())?);
        }
        Register::new(modes)
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, mode: &ModeId) -> Option<usize> {
        self.0.binary_search(mode).ok()
    }

    pub fn contains(&self, mode: &ModeId) -> bool {
        self.index_of(mode).is_some()
    }

    pub fn contains_path(&self, path: &str) -> bool {
        self.0.iter().any(|m| m.path == path)
    }

    /// Distinct path labels in register order.
    pub fn paths(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for m in self.0.iter() {
            if out.last() != Some(&m.path.as_str()) {
                out.push(&m.path);
            }
        }
        out
    }

    /// Indices of `modes` in this register, erroring on any unknown mode.
    pub fn indices_of(&self, modes: &[ModeId]) -> Result<Vec<usize>> {
        modes.iter().map(|m| self.index_of(m).ok_or_else(|| Error::UnknownMode(m.clone()))).collect()
    }

    /// Disjoint union; errors if any mode is shared.
    pub fn disjoint_union(&self, other: &Register) -> Result<Register> {
        if let Some(m) = other.0.iter().find(|m| self.contains(m)) {
            return Err(Error::OverlappingRegisters(m.clone()));
        }
        Register::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// Union that tolerates shared modes.
    pub fn union(&self, other: &Register) -> Result<Register> {
        let mut modes: Vec<ModeId> = self.0.to_vec();
        modes.extend(other.0.iter().filter(|m| !self.contains(m)).cloned());
        Register::new(modes)
    }

    /// Register with the given positions removed.
    pub(crate) fn without_indices(&self, drop: &[usize]) -> Register {
        let kept =
            self.0.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, m)| m.clone()).collect::<Vec<_>>();
        Register(kept.into())
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// Photon counts, one per register mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u8>);

impl OccupationVector {
    pub fn new(counts: Vec<u8>) -> Self {
        OccupationVector(counts)
    }

    /// Validates signed counts; every entry must be non-negative and the
    /// total must respect the photon cap.
    pub fn from_signed(counts: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(counts.len());
        let mut total: i64 = 0;
        for (position, &count) in counts.iter().enumerate() {
            if count < 0 {
                return Err(Error::NegativeCount { position, count });
            }
            total = total.saturating_add(count);
            if total > MAX_PHOTONS as i64 {
                return Err(Error::PhotonCapExceeded { photons: total as usize, cap: MAX_PHOTONS });
            }
            out.push(count as u8);
        }
        Ok(OccupationVector(out))
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<u8>> for OccupationVector {
    fn from(v: Vec<u8>) -> Self {
        OccupationVector(v)
    }
}

pub(crate) fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// √(∏ nᵢ!) for an occupation, the factor relating monomials to Fock kets.
pub(crate) fn sqrt_factorial_product(counts: &[u8]) -> f64 {
    counts.iter().map(|&n| factorial(n)).product::<f64>().sqrt()
}

/// Sparse pure state over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    register: Register,
    amplitudes: BTreeMap<OccupationVector, Complex64>,
}

impl PureState {
    pub fn vacuum(register: Register) -> Self {
        let occ = OccupationVector(vec![0; register.len()]);
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occ, Complex64::new(1.0, 0.0));
        PureState { register, amplitudes }
    }

    /// Unit-norm Fock state; `counts` follows the canonical register order.
    pub fn basis(register: Register, counts: &[i64]) -> Result<Self> {
        if counts.len() != register.len() {
            return Err(Error::LengthMismatch { expected: register.len(), found: counts.len() });
        }
        let occ = OccupationVector::from_signed(counts)?;
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occ, Complex64::new(1.0, 0.0));
        Ok(PureState { register, amplitudes })
    }

    /// Fock state from `(mode, count)` pairs in any order.
    pub fn from_modes(occupation: &[(ModeId, i64)]) -> Result<Self> {
        let register = Register::new(occupation.iter().map(|(m, _)| m.clone()))?;
        let mut counts = vec![0i64; register.len()];
        for (m, n) in occupation {
            counts[register.index_of(m).expect("mode was just inserted")] = *n;
        }
        Self::basis(register, &counts)
    }

    /// Builds a state by summing amplitudes per occupation; small entries are pruned.
    pub fn from_amplitudes<I>(register: Register, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let mut amplitudes: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (occ, amp) in entries {
            if occ.len() != register.len() {
                return Err(Error::LengthMismatch { expected: register.len(), found: occ.len() });
            }
            if occ.total() > MAX_PHOTONS {
                return Err(Error::PhotonCapExceeded { photons: occ.total(), cap: MAX_PHOTONS });
            }
            *amplitudes.entry(occ).or_default() += amp;
        }
        Ok(Self::pruned(register, amplitudes))
    }

    pub(crate) fn pruned(register: Register, mut amplitudes: BTreeMap<OccupationVector, Complex64>) -> Self {
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        PureState { register, amplitudes }
    }

    /// State with no amplitudes (norm zero).
    pub fn zero(register: Register) -> Self {
        PureState { register, amplitudes: BTreeMap::new() }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, counts: &[u8]) -> Complex64 {
        self.amplitudes.get(&OccupationVector(counts.to_vec())).copied().unwrap_or_default()
    }

    /// Number of stored amplitudes.
    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest total photon number among stored terms.
    pub fn max_photons(&self) -> usize {
        self.amplitudes.keys().map(|o| o.total()).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: Complex64) -> PureState {
        let amps = self.amplitudes.iter().map(|(o, a)| (o.clone(), a * factor)).collect();
        Self::pruned(self.register.clone(), amps)
    }

    pub fn normalized(&self) -> Result<PureState> {
        let n = self.norm_sq();
        if n <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Sum of two states on the same register.
    pub fn superpose(&self, other: &PureState) -> Result<PureState> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch);
        }
        let mut amps = self.amplitudes.clone();
        for (o, a) in &other.amplitudes {
            *amps.entry(o.clone()).or_default() += a;
        }
        Ok(Self::pruned(self.register.clone(), amps))
    }

    /// Product state over the disjoint union of both registers.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let register = self.register.disjoint_union(&other.register)?;
        let left = register.indices_of(self.register.modes())?;
        let right = register.indices_of(other.register.modes())?;
        let mut amps = BTreeMap::new();
        for (o1, a1) in &self.amplitudes {
            for (o2, a2) in &other.amplitudes {
                let mut counts = vec![0u8; register.len()];
                for (k, &i) in left.iter().enumerate() {
                    counts[i] = o1.0[k];
                }
                for (k, &i) in right.iter().enumerate() {
                    counts[i] = o2.0[k];
                }
                let occ = OccupationVector(counts);
                if occ.total() > MAX_PHOTONS {
                    return Err(Error::PhotonCapExceeded { photons: occ.total(), cap: MAX_PHOTONS });
                }
                amps.insert(occ, a1 * a2);
            }
        }
        Ok(Self::pruned(register, amps))
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch);
        }
        let (small, large, conj_small) = if self.amplitudes.len() <= other.amplitudes.len() {
            (&self.amplitudes, &other.amplitudes, true)
        } else {
            (&other.amplitudes, &self.amplitudes, false)
        };
        let mut acc = Complex64::default();
        for (o, a) in small {
            if let Some(b) = large.get(o) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Amplitude-wise equality after removing a global phase.
    pub fn equal_up_to_phase(&self, other: &PureState, tol: f64) -> bool {
        if self.register != other.register {
            return false;
        }
        let pivot = self.amplitudes.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()));
        let phase = match pivot {
            None => return other.amplitudes.values().all(|a| a.norm() <= tol),
            Some((occ, a)) => {
                let b = other.amplitudes.get(occ).copied().unwrap_or_default();
                if b.norm() <= tol {
                    return false;
                }
                let r = b / a;
                r / r.norm()
            }
        };
        let keys = self.amplitudes.keys().chain(other.amplitudes.keys());
        keys.into_iter().all(|occ| {
            let a = self.amplitudes.get(occ).copied().unwrap_or_default();
            let b = other.amplitudes.get(occ).copied().unwrap_or_default();
            (a * phase - b).norm() <= tol
        })
    }

    /// Applies Σ c·â† for the given `(mode, c)` list without renormalizing.
    pub fn create(&self, terms: &[(ModeId, Complex64)]) -> Result<PureState> {
        let idx = self.register.indices_of(&terms.iter().map(|t| t.0.clone()).collect::<Vec<_>>())?;
        let mut amps: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (occ, a) in &self.amplitudes {
            if occ.total() + 1 > MAX_PHOTONS {
                return Err(Error::PhotonCapExceeded { photons: occ.total() + 1, cap: MAX_PHOTONS });
            }
            for (&i, (_, c)) in idx.iter().zip(terms) {
                let mut counts = occ.0.clone();
                counts[i] += 1;
                let factor = f64::from(counts[i]).sqrt();
                *amps.entry(OccupationVector(counts)).or_default() += a * c * factor;
            }
        }
        Ok(Self::pruned(self.register.clone(), amps))
    }

    /// Applies Σ c·â for the given `(mode, c)` list without renormalizing.
    pub fn annihilate(&self, terms: &[(ModeId, Complex64)]) -> Result<PureState> {
        let idx = self.register.indices_of(&terms.iter().map(|t| t.0.clone()).collect::<Vec<_>>())?;
        let mut amps: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        for (occ, a) in &self.amplitudes {
            for (&i, (_, c)) in idx.iter().zip(terms) {
                if occ.0[i] == 0 {
                    continue;
                }
                let factor = f64::from(occ.0[i]).sqrt();
                let mut counts = occ.0.clone();
                counts[i] -= 1;
                *amps.entry(OccupationVector(counts)).or_default() += a * c * factor;
            }
        }
        Ok(Self::pruned(self.register.clone(), amps))
    }

    /// Splits the state by the occupation pattern of `detected` positions.
    /// Each pattern maps to the residual (unnormalized) state over the
    /// remaining modes. Patterns come out in sorted order.
    pub(crate) fn split_by(&self, detected: &[usize]) -> (Register, BTreeMap<Vec<u8>, PureState>) {
        let residual = self.register.without_indices(detected);
        let mut parts: BTreeMap<Vec<u8>, BTreeMap<OccupationVector, Complex64>> = BTreeMap::new();
        for (occ, a) in &self.amplitudes {
            let pattern: Vec<u8> = detected.iter().map(|&i| occ.0[i]).collect();
            let rest: Vec<u8> =
                occ.0.iter().enumerate().filter(|(i, _)| !detected.contains(i)).map(|(_, &n)| n).collect();
            parts.entry(pattern).or_default().insert(OccupationVector(rest), *a);
        }
        let parts = parts.into_iter().map(|(p, amps)| (p, PureState::pruned(residual.clone(), amps))).collect();
        (residual, parts)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amplitudes.is_empty() {
            return f.write_str("0");
        }
        for (i, (occ, a)) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|", a.re, a.im)?;
            for (k, n) in occ.0.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{n}")?;
            }
            f.write_str(">")?;
        }
        Ok(())
    }
}

/// One weighted pure branch of a mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub state: PureState,
}

/// Mixed state as a weighted list of (possibly sub-normalized) pure branches.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    register: Register,
    branches: Vec<Branch>,
}

impl StateEnsemble {
    pub fn new(register: Register, branches: Vec<Branch>) -> Result<Self> {
        for b in &branches {
            if !(b.weight.is_finite() && b.weight >= 0.0) {
                return Err(Error::InvalidWeight(b.weight));
            }
            if b.state.register() != &register {
                return Err(Error::RegisterMismatch);
            }
        }
        Ok(StateEnsemble { register, branches })
    }

    pub(crate) fn from_parts(register: Register, branches: Vec<Branch>) -> Self {
        StateEnsemble { register, branches }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Σ wᵢ · ‖ψᵢ‖².
    pub fn trace(&self) -> f64 {
        self.branches.iter().map(|b| b.weight * b.state.norm_sq()).sum()
    }

    pub fn normalize(&self) -> Result<StateEnsemble> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        let branches = self.branches.iter().map(|b| Branch { weight: b.weight / tr, state: b.state.clone() }).collect();
        Ok(StateEnsemble { register: self.register.clone(), branches })
    }

    /// Σ wᵢ|⟨target|ψᵢ⟩|² / trace.
    pub fn fidelity_to_pure(&self, target: &PureState) -> Result<f64> {
        if target.register() != &self.register {
            return Err(Error::RegisterMismatch);
        }
        let n = target.norm_sq();
        if (n - 1.0).abs() > TOLERANCE {
            return Err(Error::NotNormalized { norm_sq: n });
        }
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        let mut acc = 0.0;
        for b in &self.branches {
            acc += b.weight * target.inner_product(&b.state)?.norm_sqr();
        }
        Ok((acc / tr).clamp(0.0, 1.0))
    }

    /// Collapses a single-branch ensemble into a pure state carrying the weight.
    pub fn to_pure(&self) -> Option<PureState> {
        match self.branches.as_slice() {
            [] => Some(PureState::zero(self.register.clone())),
            [b] => Some(b.state.scaled(Complex64::new(b.weight.sqrt(), 0.0))),
            _ => None,
        }
    }

    /// Applies `f` to every branch state; `f` must map the register consistently.
    pub fn map_states<F>(&self, mut f: F) -> Result<StateEnsemble>
    where
        F: FnMut(&PureState) -> Result<PureState>,
    {
        let mut branches = Vec::with_capacity(self.branches.len());
        let mut register = None;
        for b in &self.branches {
            let state = f(&b.state)?;
            match &register {
                None => register = Some(state.register().clone()),
                Some(r) if r != state.register() => return Err(Error::RegisterMismatch),
                Some(_) => {}
            }
            branches.push(Branch { weight: b.weight, state });
        }
        // An empty ensemble keeps its register; callers that change the
        // register must handle that case themselves.
        let register = register.unwrap_or_else(|| self.register.clone());
        Ok(StateEnsemble { register, branches })
    }
}

impl From<PureState> for StateEnsemble {
    fn from(state: PureState) -> Self {
        StateEnsemble { register: state.register().clone(), branches: vec![Branch { weight: 1.0, state }] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reg_a() -> Register {
        Register::from_paths(&["a"]).unwrap()
    }

    #[test]
    fn vacuum_has_unit_norm() {
        let s = PureState::basis(reg_a(), &[0, 0]).unwrap();
        assert_eq!(s.norm_sq(), 1.0);
        assert_eq!(s, PureState::vacuum(reg_a()));
    }

    #[test]
    fn basis_state_amplitude() {
        let s = PureState::basis(reg_a(), &[4, 0]).unwrap();
        assert_eq!(s.amplitude(&[4, 0]), c(1.0, 0.0));
        assert_eq!(s.support_len(), 1);
    }

    #[test]
    fn negative_count_rejected() {
        let err = PureState::basis(reg_a(), &[-1, 0]).unwrap_err();
        assert_eq!(err, Error::NegativeCount { position: 0, count: -1 });
    }

    #[test]
    fn length_mismatch_rejected() {
        let err = PureState::basis(reg_a(), &[1]).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 2, found: 1 });
    }

    #[test]
    fn caps_enforced() {
        let paths: Vec<String> = (0..7).map(|i| format!("p{i}")).collect();
        assert!(matches!(Register::from_paths(&paths), Err(Error::ModeCapExceeded { .. })));
        assert!(matches!(PureState::basis(reg_a(), &[9, 8]), Err(Error::PhotonCapExceeded { .. })));
    }

    #[test]
    fn register_is_canonical() {
        let r1 = Register::new([ModeId::v("b").unwrap(), ModeId::h("a").unwrap()]).unwrap();
        let r2 = Register::new([ModeId::h("a").unwrap(), ModeId::v("b").unwrap()]).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.modes()[0], ModeId::h("a").unwrap());
        let dup = Register::new([ModeId::h("a").unwrap(), ModeId::h("a").unwrap()]);
        assert!(matches!(dup, Err(Error::DuplicateMode(_))));
    }

    #[test]
    fn mode_labels_parse() {
        let m: ModeId = "b_2.V".parse().unwrap();
        assert_eq!(m, ModeId::v("b_2").unwrap());
        assert!("a.D".parse::<ModeId>().is_err());
        assert!("1a.H".parse::<ModeId>().is_err());
        assert!("aH".parse::<ModeId>().is_err());
    }

    #[test]
    fn tensor_of_single_photons() {
        let a = PureState::from_modes(&[(ModeId::h("a").unwrap(), 1)]).unwrap();
        let b = PureState::from_modes(&[(ModeId::h("b").unwrap(), 1)]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.amplitude(&[1, 1]), c(1.0, 0.0));
        assert_eq!(ab, b.tensor(&a).unwrap());
    }

    #[test]
    fn tensor_rejects_shared_mode() {
        let a = PureState::from_modes(&[(ModeId::h("a").unwrap(), 1)]).unwrap();
        assert!(matches!(a.tensor(&a), Err(Error::OverlappingRegisters(_))));
    }

    #[test]
    fn tensor_of_two_noon2_states_is_normalized() {
        let s = 0.5f64.sqrt();
        let mk = |p: &str, sign: f64| {
            PureState::from_amplitudes(
                Register::from_paths(&[p]).unwrap(),
                [(vec![2, 0].into(), c(s, 0.0)), (vec![0, 2].into(), c(sign * s, 0.0))],
            )
            .unwrap()
        };
        let input = mk("a", -1.0).tensor(&mk("b", 1.0)).unwrap();
        assert!((input.norm_sq() - 1.0).abs() < TOLERANCE);
        assert_eq!(input.support_len(), 4);
    }

    #[test]
    fn inner_products_of_basis_states() {
        let s40 = PureState::basis(reg_a(), &[4, 0]).unwrap();
        let s04 = PureState::basis(reg_a(), &[0, 4]).unwrap();
        assert_eq!(s40.inner_product(&s40).unwrap(), c(1.0, 0.0));
        assert_eq!(s40.inner_product(&s04).unwrap(), c(0.0, 0.0));
        let other = PureState::vacuum(Register::from_paths(&["b"]).unwrap());
        assert_eq!(s40.inner_product(&other), Err(Error::RegisterMismatch));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_bra() {
        let s = PureState::basis(reg_a(), &[1, 0]).unwrap();
        let is = s.scaled(c(0.0, 1.0));
        assert_eq!(is.inner_product(&s).unwrap(), c(0.0, -1.0));
        assert_eq!(s.inner_product(&is).unwrap(), c(0.0, 1.0));
    }

    #[test]
    fn fidelity_edges() {
        let target = PureState::basis(reg_a(), &[4, 0]).unwrap();
        let ens = StateEnsemble::from(target.clone());
        assert_eq!(ens.fidelity_to_pure(&target).unwrap(), 1.0);
        let orth = StateEnsemble::from(PureState::basis(reg_a(), &[0, 4]).unwrap());
        assert_eq!(orth.fidelity_to_pure(&target).unwrap(), 0.0);
        let empty = StateEnsemble::new(reg_a(), vec![]).unwrap();
        assert_eq!(empty.fidelity_to_pure(&target), Err(Error::ZeroTrace));
    }

    #[test]
    fn normalize_and_trace() {
        let unit = PureState::basis(reg_a(), &[1, 0]).unwrap();
        let ens = StateEnsemble::new(reg_a(), vec![Branch { weight: 0.5, state: unit.clone() }]).unwrap();
        let n = ens.normalize().unwrap();
        assert_eq!(n.branches()[0].weight, 1.0);
        assert_eq!(n.branches()[0].state, unit);

        let half = unit.scaled(c(0.5, 0.0));
        let two = StateEnsemble::new(
            reg_a(),
            vec![Branch { weight: 1.0, state: half.clone() }, Branch { weight: 1.0, state: half }],
        )
        .unwrap();
        assert!((two.trace() - 0.5).abs() < 1e-15);

        let zero = StateEnsemble::new(reg_a(), vec![]).unwrap();
        assert_eq!(zero.normalize(), Err(Error::ZeroTrace));
    }

    #[test]
    fn ensemble_rejects_bad_weight() {
        let unit = PureState::vacuum(reg_a());
        let r = StateEnsemble::new(reg_a(), vec![Branch { weight: -0.1, state: unit }]);
        assert_eq!(r, Err(Error::InvalidWeight(-0.1)));
    }

    #[test]
    fn tiny_amplitudes_are_pruned() {
        let s =
            PureState::from_amplitudes(reg_a(), [(vec![1, 0].into(), c(1.0, 0.0)), (vec![0, 1].into(), c(1e-13, 0.0))])
                .unwrap();
        assert_eq!(s.support_len(), 1);
    }

    #[test]
    fn phase_quotiented_equality() {
        let s =
            PureState::from_amplitudes(reg_a(), [(vec![2, 0].into(), c(0.6, 0.0)), (vec![0, 2].into(), c(0.0, 0.8))])
                .unwrap();
        let rotated = s.scaled(Complex64::from_polar(1.0, 1.234));
        assert!(s.equal_up_to_phase(&rotated, 1e-12));
        let flipped =
            PureState::from_amplitudes(reg_a(), [(vec![2, 0].into(), c(0.6, 0.0)), (vec![0, 2].into(), c(0.0, -0.8))])
                .unwrap();
        assert!(!s.equal_up_to_phase(&flipped, 1e-6));
    }

    #[test]
    fn creation_and_annihilation_factors() {
        let a_h = ModeId::h("a").unwrap();
        let one = PureState::basis(reg_a(), &[1, 0]).unwrap();
        let two = one.create(&[(a_h.clone(), c(1.0, 0.0))]).unwrap();
        assert!((two.amplitude(&[2, 0]).re - 2f64.sqrt()).abs() < 1e-15);
        let back = two.annihilate(&[(a_h, c(1.0, 0.0))]).unwrap();
        assert!((back.amplitude(&[1, 0]).re - 2.0).abs() < 1e-15);
    }
}
