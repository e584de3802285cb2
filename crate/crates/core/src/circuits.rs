//! Named builders for the polarization NOON-state schemes.
//!
//! Every builder returns a [`CircuitResult`] whose output keeps only the
//! undetected modes. Probabilities in the step log are conditional on the
//! preceding steps; `success_prob` is the trace of the final output.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::detection::{condition_click, condition_no_detection, condition_pnr, DetectorModel};
use crate::error::{Error, Result};
use crate::fock::{ModeId, PureState, Register, StateEnsemble};
use crate::optics::{
    apply, apply_ensemble, beam_splitter, circular_basis, compose, diagonal_basis, inject_photon, mode_beam_splitter,
    pbs, rotator, waveplate, CircularSign, ModeTransform, PbsBasis, PolState,
};

/// One conditioning event and its probability given everything before it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub label: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitResult {
    pub success_prob: f64,
    pub output: StateEnsemble,
    pub steps: Vec<StepRecord>,
}

impl CircuitResult {
    /// Product of logged conditional probabilities.
    pub fn step_product(&self) -> f64 {
        self.steps.iter().map(|s| s.probability).product()
    }

    /// The output as a single pure state, if it has at most one branch.
    pub fn pure_output(&self) -> Option<PureState> {
        self.output.to_pure()
    }
}

/// Sequential executor shared by the builders and the script runner.
#[derive(Debug, Clone)]
pub(crate) struct Runner {
    ens: StateEnsemble,
    steps: Vec<StepRecord>,
}

impl Runner {
    pub(crate) fn new(ens: StateEnsemble) -> Self {
        Runner { ens, steps: Vec::new() }
    }

    pub(crate) fn ensemble(&self) -> &StateEnsemble {
        &self.ens
    }

    pub(crate) fn apply(&mut self, t: &ModeTransform) -> Result<()> {
        self.ens = apply_ensemble(&self.ens, t)?;
        Ok(())
    }

    pub(crate) fn inject(&mut self, path: &str, pol: PolState) -> Result<()> {
        self.ens = inject_photon(&self.ens, path, pol)?;
        Ok(())
    }

    pub(crate) fn replace(&mut self, ens: StateEnsemble) {
        self.ens = ens;
    }

    pub(crate) fn condition<F>(&mut self, label: impl Into<String>, f: F) -> Result<()>
    where
        F: FnOnce(&StateEnsemble) -> Result<(f64, StateEnsemble)>,
    {
        let before = self.ens.trace();
        let (prob, out) = f(&self.ens)?;
        let probability = if before > 0.0 { prob / before } else { 0.0 };
        self.steps.push(StepRecord { label: label.into(), probability });
        self.ens = out;
        Ok(())
    }

    pub(crate) fn push_steps(&mut self, prefix: &str, steps: &[StepRecord]) {
        self.steps.extend(
            steps.iter().map(|s| StepRecord { label: format!("{prefix}: {}", s.label), probability: s.probability }),
        );
    }

    pub(crate) fn finish(self) -> CircuitResult {
        CircuitResult { success_prob: self.ens.trace(), output: self.ens, steps: self.steps }
    }
}

fn path_modes(path: &str) -> Result<Vec<ModeId>> {
    Ok(ModeId::path_pair(path)?.to_vec())
}

/// Which polarization pair feeds the PBS in the Hong-Ou-Mandel analog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomVariant {
    /// D and A photons, DA-basis PBS; yields (|2,0⟩ − |0,2⟩)/√2
    DA,
    /// L and R photons, LR-basis PBS; yields (|2,0⟩ + |0,2⟩)/√2
    LR,
}

fn hom_on(variant: HomVariant, out: &str, aux: &str) -> Result<CircuitResult> {
    let (first, second, basis) = match variant {
        HomVariant::DA => (PolState::D, PolState::A, PbsBasis::DA),
        HomVariant::LR => (PolState::L, PolState::R, PbsBasis::LR),
    };
    let mut run = Runner::new(PureState::vacuum(Register::from_paths(&[out, aux])?).into());
    run.inject(out, first)?;
    run.inject(aux, second)?;
    run.apply(&pbs(out, aux, basis)?)?;
    let aux_modes = path_modes(aux)?;
    run.condition(format!("vacuum {aux}"), |e| condition_pnr(e, &aux_modes, 0))?;
    Ok(run.finish())
}

/// Polarization Hong-Ou-Mandel analog: both photons leave on path `a`.
pub fn hom_2002(variant: HomVariant) -> CircuitResult {
    hom_on(variant, "a", "b").expect("fixed two-path circuit is valid")
}

fn pure_of(result: &CircuitResult) -> PureState {
    result.pure_output().expect("number-resolved heralding keeps a single branch")
}

fn noon4_on(out: &str, herald: &str, t: f64, r: f64, detector: DetectorModel) -> Result<CircuitResult> {
    let bs = beam_splitter(out, herald, t, r)?;
    let da = hom_on(HomVariant::DA, out, &format!("{out}_pbs"))?;
    let lr = hom_on(HomVariant::LR, herald, &format!("{herald}_pbs"))?;
    let input = pure_of(&da).tensor(&pure_of(&lr))?;

    let mut run = Runner::new(input.into());
    run.push_steps("2002 DA", &da.steps);
    run.push_steps("2002 LR", &lr.steps);
    run.apply(&bs)?;
    let modes = path_modes(herald)?;
    run.condition(format!("no detection on {herald}"), |e| condition_no_detection(e, &modes, detector))?;
    Ok(run.finish())
}

/// Conditional 4004 source: a DA pair on path `a`, an LR pair on path `b`, a
/// beam splitter `(t, r)`, and heralding of no photons on path `b`.
pub fn noon4(t: f64, r: f64, detector: DetectorModel) -> Result<CircuitResult> {
    noon4_on("a", "b", t, r, detector)
}

/// Two heralded 4004 states, a λ/8 plate on one of them, and a balanced
/// beam splitter heralded on vacuum in one output. Inner stages use
/// number-resolving heralds; `detector` applies to the final stage.
pub fn noon8(detector: DetectorModel) -> Result<CircuitResult> {
    let h = FRAC_1_SQRT_2;
    let first = noon4_on("a", "b", h, h, DetectorModel::Pnr)?;
    let second = noon4_on("c", "d", h, h, DetectorModel::Pnr)?;
    let input = pure_of(&first).tensor(&pure_of(&second))?;

    let mut run = Runner::new(input.into());
    run.push_steps("4004 stage a", &first.steps);
    run.push_steps("4004 stage c", &second.steps);
    run.apply(&waveplate("c", FRAC_PI_4)?)?;
    run.apply(&beam_splitter("a", "c", h, h)?)?;
    let modes = path_modes("c")?;
    run.condition("no detection on c", |e| condition_no_detection(e, &modes, detector))?;
    Ok(run.finish())
}

fn fresh_path(register: &Register, stem: &str) -> String {
    if !register.contains_path(stem) {
        return stem.to_owned();
    }
    (1..).map(|i| format!("{stem}_{i}")).find(|p| !register.contains_path(p)).expect("unbounded search")
}

/// Coherent subtraction of one photon from the +45° mode of `path`.
///
/// The path is rotated so D sits in the H slot, the D mode is tapped by a
/// beam splitter of intensity transmittance `t2` into a vacuum ancilla, the
/// ancilla is heralded on a click, and the path is rotated back. A number
/// resolving detector heralds exactly one photon.
pub fn subtract_photon(ens: &StateEnsemble, path: &str, t2: f64, detector: DetectorModel) -> Result<CircuitResult> {
    if !(t2 > 0.0 && t2 <= 1.0) {
        return Err(Error::InvalidTransmittance(t2));
    }
    let [h, _] = ModeId::path_pair(path)?;
    ens.register().indices_of(&path_modes(path)?)?;
    let anc = fresh_path(ens.register(), "anc");
    let anc_modes = path_modes(&anc)?;
    let vacuum = PureState::vacuum(Register::new(anc_modes.clone())?);
    let with_anc = ens.map_states(|s| s.tensor(&vacuum))?;
    let with_anc = if ens.branches().is_empty() {
        StateEnsemble::new(ens.register().disjoint_union(vacuum.register())?, vec![])?
    } else {
        with_anc
    };

    let tap = compose(&[
        rotator(path, -FRAC_PI_4)?,
        mode_beam_splitter(&h, &anc_modes[0], t2.sqrt(), (1.0 - t2).sqrt())?,
        rotator(path, FRAC_PI_4)?,
    ])?;

    let mut run = Runner::new(with_anc);
    run.apply(&tap)?;
    match detector {
        DetectorModel::OnOff { eta } => {
            run.condition(format!("click on {anc}"), |e| condition_click(e, &anc_modes, eta))?
        }
        DetectorModel::Pnr => run.condition(format!("one photon on {anc}"), |e| condition_pnr(e, &anc_modes, 1))?,
    }
    Ok(run.finish())
}

/// Applies the bare operator â_D = (â_H + â_V)/√2 on `path` to every branch.
/// The output is unnormalized.
pub fn subtract_photon_ideal(ens: &StateEnsemble, path: &str) -> Result<StateEnsemble> {
    let [h, v] = ModeId::path_pair(path)?;
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    ens.map_states(|s| s.annihilate(&[(h.clone(), c), (v.clone(), c)]))
}

/// (|N,0⟩ + e^{iθ}|0,N⟩)/√2 on the H/V modes of `path`.
pub fn noon_state(path: &str, n: u8, theta: f64) -> Result<PureState> {
    let register = Register::from_paths(&[path])?;
    if n == 0 {
        return Ok(PureState::vacuum(register));
    }
    let h = FRAC_1_SQRT_2;
    PureState::from_amplitudes(
        register,
        [(vec![n, 0].into(), Complex64::new(h, 0.0)), (vec![0, n].into(), Complex64::from_polar(h, theta))],
    )
}

/// The ideal heralded target (|4,0⟩ − |0,4⟩)/√2 on path `a`.
pub fn ideal_noon4() -> PureState {
    noon_state("a", 4, PI).expect("valid path")
}

/// The ideal cascade target (|8,0⟩ − |0,8⟩)/√2 on path `a`.
pub fn ideal_noon8() -> PureState {
    noon_state("a", 8, PI).expect("valid path")
}

/// Equal-weight superposition of the three double-pair emission events
/// |2,0;2,0⟩, |0,2;0,2⟩ and |1,1;1,1⟩ over (a.H, a.V; b.H, b.V).
pub fn spdc_source(path_a: &str, path_b: &str) -> Result<PureState> {
    if path_a == path_b {
        return Err(Error::IdenticalPaths(path_a.to_owned()));
    }
    let [ah, av] = ModeId::path_pair(path_a)?;
    let [bh, bv] = ModeId::path_pair(path_b)?;
    let register = Register::new([ah.clone(), av.clone(), bh.clone(), bv.clone()])?;
    let amp = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let events = [[2, 0, 2, 0], [0, 2, 0, 2], [1, 1, 1, 1]];
    let idx = register.indices_of(&[ah, av, bh, bv])?;
    PureState::from_amplitudes(
        register.clone(),
        events.iter().map(|ev| {
            let mut counts = vec![0u8; 4];
            for (k, &i) in idx.iter().enumerate() {
                counts[i] = ev[k];
            }
            (counts.into(), amp)
        }),
    )
}

fn spdc_optics() -> Result<ModeTransform> {
    let h = FRAC_1_SQRT_2;
    compose(&[diagonal_basis("a")?, circular_basis("b", CircularSign::Plus)?, beam_splitter("a", "b", h, h)?])
}

/// The four-photon state after the final beam splitter, before heralding.
pub fn spdc_pre_detection() -> PureState {
    let source = spdc_source("a", "b").expect("valid paths");
    apply(&source, &spdc_optics().expect("valid optics")).expect("registers match")
}

/// NOON-like source from two down-conversion crystals, heralded on no
/// photons in path `b`.
pub fn spdc_noonlike(detector: DetectorModel) -> Result<CircuitResult> {
    let mut run = Runner::new(spdc_source("a", "b")?.into());
    run.apply(&spdc_optics()?)?;
    let modes = path_modes("b")?;
    run.condition("no detection on b", |e| condition_no_detection(e, &modes, detector))?;
    Ok(run.finish())
}

/// Script text equivalent to each builder, in the circuit description format.
pub mod reference {
    use super::HomVariant;
    use crate::detection::DetectorModel;

    fn herald_suffix(detector: DetectorModel) -> String {
        match detector {
            DetectorModel::Pnr => String::new(),
            DetectorModel::OnOff { eta } => format!(" {eta}"),
        }
    }

    pub fn hom(variant: HomVariant) -> String {
        let (p, q, basis) = match variant {
            HomVariant::DA => ("D", "A", "DA"),
            HomVariant::LR => ("L", "R", "LR"),
        };
        format!("# polarization HOM analog\npaths a b\nphoton a {p}\nphoton b {q}\npbs a b {basis}\nherald_none b\n")
    }

    pub fn noon4(t: f64, r: f64, detector: DetectorModel) -> String {
        format!(
            "# heralded 4004 source\n\
             paths a a_pbs b b_pbs\n\
             photon a D\nphoton a_pbs A\npbs a a_pbs DA\nherald_none a_pbs\n\
             photon b L\nphoton b_pbs R\npbs b b_pbs LR\nherald_none b_pbs\n\
             bs a b {t} {r}\n\
             herald_none b{}\n",
            herald_suffix(detector)
        )
    }

    pub fn noon8(detector: DetectorModel) -> String {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        format!(
            "# 8008 cascade from two heralded 4004 states\n\
             paths a b c d\n\
             photon a D\nphoton a A\nphoton b L\nphoton b R\nbs a b {h} {h}\nherald_none b\n\
             photon c D\nphoton c A\nphoton d L\nphoton d R\nbs c d {h} {h}\nherald_none d\n\
             wp c pi/4   # lambda/8 plate\n\
             bs a c {h} {h}\n\
             herald_none c{}\n",
            herald_suffix(detector)
        )
    }

    pub fn spdc_noonlike(detector: DetectorModel) -> String {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        format!(
            "# NOON-like state from two down-conversion crystals\n\
             paths a b\n\
             spdc a b\n\
             phase a.V pi\nrot a pi/4          # H -> D, V -> A\n\
             phase b.V pi\nrot b pi/4\nwp b pi/2   # H -> L, V -> R\n\
             bs a b {h} {h}\n\
             herald_none b{}\n",
            herald_suffix(detector)
        )
    }

    /// Heralded 4004, flipped to the plus NOON by a λ/8 plate, then one
    /// coherent photon subtraction with an on-off detector.
    pub fn noon4_then_subtract(t2: f64, eta: f64) -> String {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (t, r) = (t2.sqrt(), (1.0 - t2).sqrt());
        format!(
            "paths a a_pbs b b_pbs anc\n\
             photon a D\nphoton a_pbs A\npbs a a_pbs DA\nherald_none a_pbs\n\
             photon b L\nphoton b_pbs R\npbs b b_pbs LR\nherald_none b_pbs\n\
             bs a b {h} {h}\nherald_none b\n\
             wp a pi/4\n\
             rot a -pi/4\nbs a.H anc.H {t} {r}\nrot a pi/4\n\
             herald_click anc.H {eta}\nherald_none anc\n"
        )
    }
}
