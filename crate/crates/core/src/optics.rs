//! Passive linear optics as substitutions on creation operators.
//!
//! A [`ModeTransform`] stores a unitary `S` over its own support register:
//! the creation operator of mode `k` maps to `Σ_j S[j][k] · a_j†`. Applying a
//! transform to a state embeds it as the identity on every other mode.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    sqrt_factorial_product, ModeId, OccupationVector, Pol, PureState, Register, StateEnsemble, TOLERANCE,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Polarization basis of a polarizing beam splitter: the first member is
/// transmitted, the second reflected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbsBasis {
    /// transmits H, reflects V
    HV,
    /// transmits D, reflects A
    DA,
    /// transmits L, reflects R
    LR,
}

impl PbsBasis {
    /// (transmitted, reflected) polarization vectors in (H, V) coordinates.
    fn vectors(self) -> [[Complex64; 2]; 2] {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            PbsBasis::HV => [[ONE, ZERO], [ZERO, ONE]],
            PbsBasis::DA => [[s, s], [s, -s]],
            PbsBasis::LR => [[s, I * s], [s, -I * s]],
        }
    }
}

/// Polarization states a photon can be injected in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolState {
    H,
    V,
    D,
    A,
    L,
    R,
}

impl PolState {
    /// Coefficients of the creation operator on (H, V).
    pub fn coefficients(self) -> [Complex64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            PolState::H => [ONE, ZERO],
            PolState::V => [ZERO, ONE],
            PolState::D => [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            PolState::A => [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
            PolState::L => [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
            PolState::R => [Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
        }
    }

    /// `(mode, coefficient)` terms for the creation operator on `path`.
    pub fn creation_terms(self, path: &str) -> Result<Vec<(ModeId, Complex64)>> {
        let [h, v] = ModeId::path_pair(path)?;
        let [ch, cv] = self.coefficients();
        Ok(vec![(h, ch), (v, cv)])
    }
}

/// Handedness of the circular-basis map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircularSign {
    /// H → L, V → R
    Plus,
    /// H → R, V → L
    Minus,
}

/// Unitary creation-operator substitution over a support register.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTransform {
    register: Register,
    matrix: DMatrix<Complex64>,
}

impl ModeTransform {
    pub fn new(register: Register, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = register.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::RegisterMismatch);
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > TOLERANCE {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(ModeTransform { register, matrix })
    }

    pub fn identity(register: Register) -> Self {
        let n = register.len();
        ModeTransform { register, matrix: DMatrix::identity(n, n) }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `max |S†S − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    /// Same transform on a larger register, identity on the added modes.
    pub fn embed(&self, register: &Register) -> Result<ModeTransform> {
        let idx = register.indices_of(self.register.modes())?;
        let mut m = DMatrix::identity(register.len(), register.len());
        for (jj, &j) in idx.iter().enumerate() {
            for (kk, &k) in idx.iter().enumerate() {
                m[(j, k)] = self.matrix[(jj, kk)];
            }
        }
        Ok(ModeTransform { register: register.clone(), matrix: m })
    }

    /// Image of one input mode's creation operator, as `(output mode, coefficient)` terms.
    pub fn image_of(&self, mode: &ModeId) -> Result<Vec<(ModeId, Complex64)>> {
        let k = self.register.index_of(mode).ok_or_else(|| Error::UnknownMode(mode.clone()))?;
        Ok(self
            .register
            .modes()
            .iter()
            .enumerate()
            .filter(|(j, _)| self.matrix[(*j, k)] != ZERO)
            .map(|(j, m)| (m.clone(), self.matrix[(j, k)]))
            .collect())
    }

    /// Builds a transform over `modes` from a closure giving `S[to][from]`.
    fn from_fn<F>(modes: Vec<ModeId>, entry: F) -> Result<Self>
    where
        F: Fn(&ModeId, &ModeId) -> Complex64,
    {
        let register = Register::new(modes)?;
        let n = register.len();
        let ms = register.modes();
        let matrix = DMatrix::from_fn(n, n, |j, k| entry(&ms[j], &ms[k]));
        ModeTransform::new(register, matrix)
    }
}

fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let target = if j == k { ONE } else { ZERO };
            worst = worst.max((prod[(j, k)] - target).norm());
        }
    }
    worst
}

fn check_splitting(t: f64, r: f64) -> Result<()> {
    if !(t.is_finite() && r.is_finite()) || ((t * t + r * r) - 1.0).abs() > TOLERANCE {
        return Err(Error::InvalidSplitting { t, r });
    }
    Ok(())
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {x}")))
    }
}

/// Two-mode beam splitter: `a† → t a† + r b†`, `b† → t b† − r a†`.
pub fn mode_beam_splitter(a: &ModeId, b: &ModeId, t: f64, r: f64) -> Result<ModeTransform> {
    check_splitting(t, r)?;
    if a == b {
        return Err(Error::IdenticalPaths(a.to_string()));
    }
    ModeTransform::from_fn(vec![a.clone(), b.clone()], |to, from| {
        let v = match (from == a, to == a) {
            (true, true) => t,
            (true, false) => r,
            (false, false) => t,
            (false, true) => -r,
        };
        Complex64::new(v, 0.0)
    })
}

/// Path beam splitter acting identically on the H and V modes of both paths.
pub fn beam_splitter(path_a: &str, path_b: &str, t: f64, r: f64) -> Result<ModeTransform> {
    check_splitting(t, r)?;
    if path_a == path_b {
        return Err(Error::IdenticalPaths(path_a.to_owned()));
    }
    let [ah, av] = ModeId::path_pair(path_a)?;
    let [bh, bv] = ModeId::path_pair(path_b)?;
    compose(&[mode_beam_splitter(&ah, &bh, t, r)?, mode_beam_splitter(&av, &bv, t, r)?])
}

/// Polarizing beam splitter. The transmitted polarization keeps its path,
/// the reflected one swaps paths, both with coefficient +1.
pub fn pbs(path_a: &str, path_b: &str, basis: PbsBasis) -> Result<ModeTransform> {
    if path_a == path_b {
        return Err(Error::IdenticalPaths(path_a.to_owned()));
    }
    let [ah, av] = ModeId::path_pair(path_a)?;
    let [bh, bv] = ModeId::path_pair(path_b)?;
    let vecs = basis.vectors();
    let pol_index = |p: Pol| match p {
        Pol::H => 0,
        Pol::V => 1,
    };
    ModeTransform::from_fn(vec![ah, av, bh, bv], |to, from| {
        // S[(p', q'), (p, q)] = Σ_x conj(e_x[q]) e_x[q'] [p' = route_x(p)]
        let (q, q2) = (pol_index(from.pol), pol_index(to.pol));
        vecs.iter()
            .enumerate()
            .filter(|(x, _)| {
                let same = to.path == from.path;
                if *x == 0 {
                    same
                } else {
                    !same
                }
            })
            .map(|(_, e)| e[q].conj() * e[q2])
            .sum()
    })
}

/// General 2×2 polarization unitary on one path; `columns[k]` is the image of H (k = 0) or V (k = 1).
fn polarization_map(path: &str, columns: [[Complex64; 2]; 2]) -> Result<ModeTransform> {
    let [h, v] = ModeId::path_pair(path)?;
    let register = Register::new([h, v])?;
    let matrix = DMatrix::from_fn(2, 2, |j, k| columns[k][j]);
    ModeTransform::new(register, matrix)
}

/// Real rotation: `H → cos θ H + sin θ V`, `V → −sin θ H + cos θ V`.
pub fn rotator(path: &str, theta: f64) -> Result<ModeTransform> {
    check_finite("rotation angle", theta)?;
    let (s, c) = theta.sin_cos();
    polarization_map(
        path,
        [[Complex64::new(c, 0.0), Complex64::new(s, 0.0)], [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]],
    )
}

/// `H → D`, `V → A`.
pub fn diagonal_basis(path: &str) -> Result<ModeTransform> {
    polarization_map(path, [PolState::D.coefficients(), PolState::A.coefficients()])
}

/// `H → L`, `V → R` for [`CircularSign::Plus`], swapped for `Minus`.
pub fn circular_basis(path: &str, sign: CircularSign) -> Result<ModeTransform> {
    let (l, r) = (PolState::L.coefficients(), PolState::R.coefficients());
    match sign {
        CircularSign::Plus => polarization_map(path, [l, r]),
        CircularSign::Minus => polarization_map(path, [r, l]),
    }
}

/// Wave plate with fast axis H: multiplies the V creation operator by `e^{iδ}`.
pub fn waveplate(path: &str, retardance: f64) -> Result<ModeTransform> {
    check_finite("retardance", retardance)?;
    polarization_map(path, [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, retardance)]])
}

/// Multiplies one mode's creation operator by `e^{iφ}`.
pub fn phase(mode: &ModeId, phi: f64) -> Result<ModeTransform> {
    check_finite("phase", phi)?;
    let register = Register::new([mode.clone()])?;
    ModeTransform::new(register, DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi)))
}

/// Sequential composition in application order (first element acts first).
/// The result lives on the union of the supports.
pub fn compose(transforms: &[ModeTransform]) -> Result<ModeTransform> {
    let mut register = Register::empty();
    for t in transforms {
        register = register.union(t.register())?;
    }
    let n = register.len();
    let mut acc = DMatrix::identity(n, n);
    for t in transforms {
        acc = t.embed(&register)?.matrix * acc;
    }
    ModeTransform::new(register, acc)
}

/// Applies a transform by substituting creation operators and re-collecting
/// Fock amplitudes.
pub fn apply(state: &PureState, transform: &ModeTransform) -> Result<PureState> {
    let support = state.register().indices_of(transform.register().modes())?;
    let m = transform.matrix();
    let ns = support.len();
    // column k of the support: nonzero (row position, coefficient) pairs
    let columns: Vec<Vec<(usize, Complex64)>> =
        (0..ns).map(|k| (0..ns).filter(|&j| m[(j, k)] != ZERO).map(|j| (j, m[(j, k)])).collect()).collect();

    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (occ, &amp) in state.amplitudes() {
        let counts = occ.counts();
        let local: Vec<u8> = support.iter().map(|&i| counts[i]).collect();
        let mut terms: HashMap<Vec<u8>, Complex64> = HashMap::new();
        terms.insert(vec![0; ns], amp / sqrt_factorial_product(&local));
        for (k, &n) in local.iter().enumerate() {
            for _ in 0..n {
                let mut next: HashMap<Vec<u8>, Complex64> = HashMap::with_capacity(terms.len() * columns[k].len());
                for (exps, c) in &terms {
                    for &(j, s) in &columns[k] {
                        let mut e = exps.clone();
                        e[j] += 1;
                        *next.entry(e).or_insert(ZERO) += c * s;
                    }
                }
                terms = next;
            }
        }
        for (exps, c) in terms {
            let mut full = counts.to_vec();
            for (jj, &i) in support.iter().enumerate() {
                full[i] = exps[jj];
            }
            *out.entry(OccupationVector::new(full)).or_insert(ZERO) += c * sqrt_factorial_product(&exps);
        }
    }
    Ok(PureState::pruned(state.register().clone(), out))
}

/// Applies a transform to every branch of an ensemble.
pub fn apply_ensemble(ens: &StateEnsemble, transform: &ModeTransform) -> Result<StateEnsemble> {
    ens.register().indices_of(transform.register().modes())?;
    ens.map_states(|s| apply(s, transform))
}

/// Adds one photon in polarization `pol` on `path` to each branch, rescaled
/// so every branch keeps its norm.
pub fn inject_photon(ens: &StateEnsemble, path: &str, pol: PolState) -> Result<StateEnsemble> {
    let terms = pol.creation_terms(path)?;
    ens.map_states(|s| {
        let raw = s.create(&terms)?;
        let (before, after) = (s.norm_sq(), raw.norm_sq());
        if after == 0.0 {
            return Ok(raw);
        }
        Ok(raw.scaled(Complex64::new((before / after).sqrt(), 0.0)))
    })
}
