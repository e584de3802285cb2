mod common;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use common::{c, max_amplitude_error, Poly};
use linopt::circuits::{
    hom_2002, ideal_noon4, ideal_noon8, noon4, noon8, noon_state, reference, spdc_noonlike, spdc_pre_detection,
    subtract_photon, subtract_photon_ideal, CircuitResult, HomVariant,
};
use linopt::detection::DetectorModel;
use linopt::optics::{apply_ensemble, waveplate};
use linopt::script::{parse_circuit, run_circuit, RunOptions};
use linopt::{Complex64, PureState, StateEnsemble};

fn amplitudes_of(state: &PureState) -> BTreeMap<Vec<u8>, Complex64> {
    state.amplitudes().map(|(o, a)| (o.counts().to_vec(), *a)).collect()
}

/// x_k^n / √(n!) as a normalized single-mode Fock polynomial.
fn fock_power(vars: usize, k: usize, n: u8) -> Poly {
    let mut e = vec![0; vars];
    e[k] = n;
    let f: f64 = (1..=n as u32).map(f64::from).product();
    Poly::monomial(&e, c(1.0 / f.sqrt(), 0.0))
}

/// Beam splitter a† → t a† + r b†, b† → t b† − r a† on (aH, aV, bH, bV).
fn bs_images(t: f64, r: f64) -> Vec<Poly> {
    let lin = |v: [f64; 4]| Poly::linear(&v.map(|x| c(x, 0.0)));
    vec![lin([t, 0.0, r, 0.0]), lin([0.0, t, 0.0, r]), lin([-r, 0.0, t, 0.0]), lin([0.0, -r, 0.0, t])]
}

fn noon4_oracle(t: f64, r: f64) -> Poly {
    // (x0² − x1²)/2 ⊗ (x2² + x3²)/2: the two polarization 2002 states
    let half = c(0.5, 0.0);
    let da = Poly::monomial(&[2, 0, 0, 0], half).add(&Poly::monomial(&[0, 2, 0, 0], -half));
    let lr = Poly::monomial(&[0, 0, 2, 0], half).add(&Poly::monomial(&[0, 0, 0, 2], half));
    da.mul(&lr).substitute(&bs_images(t, r)).vacuum_sector(&[2, 3])
}

/// Drops vanished modes from oracle keys: keeps only the listed positions.
fn project_keys(amps: BTreeMap<Vec<u8>, Complex64>, keep: &[usize]) -> BTreeMap<Vec<u8>, Complex64> {
    amps.into_iter().map(|(e, a)| (keep.iter().map(|&k| e[k]).collect(), a)).collect()
}

#[test]
fn hom_matches_product_expansion() {
    let h = c(FRAC_1_SQRT_2, 0.0);
    // D photon on a transmits, A photon on b reflects into a
    let da = Poly::linear(&[h, h]).mul(&Poly::linear(&[h, -h]));
    let lr = Poly::linear(&[h, c(0.0, FRAC_1_SQRT_2)]).mul(&Poly::linear(&[h, c(0.0, -FRAC_1_SQRT_2)]));
    for (variant, oracle) in [(HomVariant::DA, da), (HomVariant::LR, lr)] {
        let res = hom_2002(variant);
        assert!((res.success_prob - 1.0).abs() < 1e-12);
        let out = res.pure_output().unwrap();
        let expected = oracle.fock_amplitudes();
        assert!(out.equal_up_to_phase(
            &PureState::from_amplitudes(out.register().clone(), expected.into_iter().map(|(e, a)| (e.into(), a)))
                .unwrap(),
            1e-10
        ));
    }
}

#[test]
fn noon4_success_law_on_grid() {
    for t2 in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let (t, r) = (f64::sqrt(t2), f64::sqrt(1.0 - t2));
        let res = noon4(t, r, DetectorModel::Pnr).unwrap();
        let law = 3.0 * t.powi(4) * r.powi(4);
        assert!((res.success_prob - law).abs() < 1e-10, "t2 = {t2}");
        let oracle = noon4_oracle(t, r);
        assert!((oracle.norm_sq() - law).abs() < 1e-12);
        let expected = project_keys(oracle.fock_amplitudes(), &[0, 1]);
        let out = res.pure_output().unwrap();
        assert!(max_amplitude_error(&out, &expected) < 1e-10, "t2 = {t2}");
        assert!(out.normalized().unwrap().equal_up_to_phase(&ideal_noon4(), 1e-10));
    }
    let h = FRAC_1_SQRT_2;
    assert!((noon4(h, h, DetectorModel::Pnr).unwrap().success_prob - 3.0 / 16.0).abs() < 1e-15);
}

#[test]
fn noon4_balanced_is_optimal() {
    let best = noon4(FRAC_1_SQRT_2, FRAC_1_SQRT_2, DetectorModel::Pnr).unwrap().success_prob;
    for k in 1..20 {
        let t2 = k as f64 / 20.0;
        let p = noon4(t2.sqrt(), (1.0 - t2).sqrt(), DetectorModel::Pnr).unwrap().success_prob;
        assert!(p <= best + 1e-15);
    }
}

fn noon8_oracle() -> Poly {
    // NOON4 on a and on c, λ/8 plate on c.V, balanced BS, vacuum on c
    let n4 = |k: usize, phase: Complex64| {
        fock_power(4, k, 4).add(&fock_power(4, k + 1, 4).scale(-phase)).scale(c(FRAC_1_SQRT_2, 0.0))
    };
    let plate = Complex64::from_polar(1.0, PI / 4.0).powi(4);
    let input = n4(0, c(1.0, 0.0)).mul(&n4(2, plate));
    input.substitute(&bs_images(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).vacuum_sector(&[2, 3])
}

#[test]
fn noon8_cascade() {
    let res = noon8(DetectorModel::Pnr).unwrap();
    let oracle = noon8_oracle();
    assert!((oracle.norm_sq() - 35.0 / 256.0).abs() < 1e-14);
    let conditional = res.steps.last().unwrap().probability;
    assert!((conditional - 35.0 / 256.0).abs() < 1e-12);
    assert!((res.success_prob - 315.0 / 65536.0).abs() < 1e-12);
    assert!((res.step_product() - res.success_prob).abs() < 1e-14);
    let out = res.pure_output().unwrap();
    let expected: BTreeMap<_, _> = project_keys(oracle.fock_amplitudes(), &[0, 1])
        .into_iter()
        .map(|(e, a)| (e, a * (9.0f64 / 256.0).sqrt()))
        .collect();
    assert!(max_amplitude_error(&out, &expected) < 1e-10);
    let f = out.normalized().unwrap().inner_product(&ideal_noon8()).unwrap().norm_sqr();
    assert!((f - 1.0).abs() < 1e-10);
}

#[test]
fn spdc_reproduces_output_expansion() {
    // 1/(16√3)[2(aH⁴−aV⁴) + 2(bH⁴−bV⁴) − 4(aH²bH² − aV²bV²) + 4i(bH²−aH²)(bV²−aV²)]
    let k = c(1.0 / (16.0 * 3f64.sqrt()), 0.0);
    let m = |e: [u8; 4], a: Complex64| Poly::monomial(&e, a);
    let two = c(2.0, 0.0);
    let four = c(4.0, 0.0);
    let i4 = c(0.0, 4.0);
    let diff = |x: [u8; 4], y: [u8; 4]| m(x, c(1.0, 0.0)).add(&m(y, c(-1.0, 0.0)));
    let eq3 = diff([4, 0, 0, 0], [0, 4, 0, 0])
        .scale(two)
        .add(&diff([0, 0, 4, 0], [0, 0, 0, 4]).scale(two))
        .add(&diff([2, 0, 2, 0], [0, 2, 0, 2]).scale(-four))
        .add(&diff([0, 0, 2, 0], [2, 0, 0, 0]).mul(&diff([0, 0, 0, 2], [0, 2, 0, 0])).scale(i4))
        .scale(k);
    assert!((eq3.norm_sq() - 1.0).abs() < 1e-12);
    let pre = spdc_pre_detection();
    assert!((pre.norm_sq() - 1.0).abs() < 1e-10);
    assert!(max_amplitude_error(&pre, &eq3.fock_amplitudes()) < 1e-10);

    let eq4 = m([4, 0, 0, 0], two).add(&m([0, 4, 0, 0], -two)).add(&m([2, 2, 0, 0], i4)).scale(k);
    let res = spdc_noonlike(DetectorModel::Pnr).unwrap();
    assert!((res.success_prob - 1.0 / 3.0).abs() < 1e-10);
    assert!((eq4.norm_sq() - 1.0 / 3.0).abs() < 1e-12);
    let out = res.pure_output().unwrap();
    assert!(max_amplitude_error(&out, &project_keys(eq4.fock_amplitudes(), &[0, 1])) < 1e-10);
    let f = res.output.normalize().unwrap().fidelity_to_pure(&ideal_noon4()).unwrap();
    assert!((f - 0.75).abs() < 1e-10);
}

#[test]
fn ideal_subtraction_walks_down_the_ladder() {
    let mut ens = StateEnsemble::from(ideal_noon8());
    for n in (1..8u8).rev() {
        ens = subtract_photon_ideal(&ens, "a").unwrap().normalize().unwrap();
        let f = ens.fidelity_to_pure(&noon_state("a", n, PI).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-10, "N = {}", n + 1);
    }
    for n in 2..=8u8 {
        let start = StateEnsemble::from(noon_state("a", n, PI).unwrap());
        let out = subtract_photon_ideal(&start, "a").unwrap();
        // ‖â_D |NOON_N⟩‖² = N/2
        assert!((out.trace() - n as f64 / 2.0).abs() < 1e-10);
        let f = out.normalize().unwrap().fidelity_to_pure(&noon_state("a", n - 1, PI).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }
}

/// Tap oracle in the D/A basis: x_H = (x_D + x_A)/√2, x_V = (x_D − x_A)/√2,
/// then x_D → t x_D + r y. Returns (click probability, fidelity to NOON_{N−1}).
fn subtraction_oracle(n: u8, t2: f64, eta: f64) -> (f64, f64) {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let (t, r) = (c(t2.sqrt(), 0.0), c((1.0 - t2).sqrt(), 0.0));
    let noon = fock_power(3, 0, n).add(&fock_power(3, 1, n).scale(c(-1.0, 0.0))).scale(h);
    // vars (H, V, y) → (D, A, y)
    let to_da = [
        Poly::linear(&[h, h, c(0.0, 0.0)]),
        Poly::linear(&[h, -h, c(0.0, 0.0)]),
        Poly::linear(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
    ];
    let tap =
        [Poly::linear(&[t, c(0.0, 0.0), r]), Poly::linear(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]), to_da[2].clone()];
    // back (D, A) → (H, V): x_D = (x_H + x_V)/√2, x_A = (x_H − x_V)/√2
    let back = to_da.clone();
    let out = noon.substitute(&to_da).substitute(&tap).substitute(&back).fock_amplitudes();
    let target = noon_state("a", n - 1, PI).unwrap();
    let (mut click, mut overlap) = (0.0, 0.0);
    for k in 1..=n {
        let w = 1.0 - (1.0 - eta).powi(k as i32);
        let branch: BTreeMap<Vec<u8>, Complex64> =
            out.iter().filter(|(e, _)| e[2] == k).map(|(e, a)| (vec![e[0], e[1]], *a)).collect();
        click += w * branch.values().map(|a| a.norm_sqr()).sum::<f64>();
        let ov: Complex64 = branch.iter().map(|(e, a)| target.amplitude(e).conj() * a).sum();
        overlap += w * ov.norm_sqr();
    }
    (click, overlap / click)
}

#[test]
fn realistic_subtraction_matches_tap_oracle() {
    for n in [2u8, 4, 6] {
        for (t2, eta) in [(0.99, 1.0), (0.99, 0.1), (0.9, 0.5), (0.5, 0.8)] {
            let start = StateEnsemble::from(noon_state("a", n, PI).unwrap());
            let res = subtract_photon(&start, "a", t2, DetectorModel::on_off(eta).unwrap()).unwrap();
            let (p, f) = subtraction_oracle(n, t2, eta);
            assert!((res.success_prob - p).abs() < 1e-10, "N={n} t2={t2} eta={eta}");
            let sim_f = res.output.normalize().unwrap().fidelity_to_pure(&noon_state("a", n - 1, PI).unwrap()).unwrap();
            assert!((sim_f - f).abs() < 1e-10, "N={n} t2={t2} eta={eta}");
        }
    }
}

#[test]
fn low_efficiency_subtraction_keeps_high_fidelity() {
    let start = StateEnsemble::from(ideal_noon4());
    let target = noon_state("a", 3, PI).unwrap();
    for k in 1..=100 {
        let eta = k as f64 / 100.0;
        let res = subtract_photon(&start, "a", 0.99, DetectorModel::on_off(eta).unwrap()).unwrap();
        let f = res.output.normalize().unwrap().fidelity_to_pure(&target).unwrap();
        assert!(f >= 0.9, "eta = {eta}: {f}");
        if eta == 1.0 {
            assert!(f >= 0.99);
        }
    }
}

#[test]
fn number_resolved_subtraction_is_near_perfect() {
    let start = StateEnsemble::from(ideal_noon4());
    let res = subtract_photon(&start, "a", 0.99, DetectorModel::Pnr).unwrap();
    let f = res.output.normalize().unwrap().fidelity_to_pure(&noon_state("a", 3, PI).unwrap()).unwrap();
    assert!(f > 0.99);
}

fn assert_same(built: &CircuitResult, scripted: &CircuitResult) {
    assert!((built.success_prob - scripted.success_prob).abs() < 1e-12);
    assert_eq!(built.output.register(), scripted.output.register());
    let (b, s) = (built.pure_output().unwrap(), scripted.pure_output().unwrap());
    assert!(max_amplitude_error(&s, &amplitudes_of(&b)) < 1e-10);
}

fn run_text(text: &str) -> CircuitResult {
    run_circuit(&parse_circuit(text).unwrap(), &RunOptions::default()).unwrap()
}

#[test]
fn scripts_match_builders() {
    for v in [HomVariant::DA, HomVariant::LR] {
        assert_same(&hom_2002(v), &run_text(&reference::hom(v)));
    }
    for (t2, det) in [(0.5, DetectorModel::Pnr), (0.3, DetectorModel::Pnr), (0.5, DetectorModel::on_off(0.7).unwrap())]
    {
        let (t, r) = (f64::sqrt(t2), f64::sqrt(1.0 - t2));
        let built = noon4(t, r, det).unwrap();
        let scripted = run_text(&reference::noon4(t, r, det));
        assert!((built.success_prob - scripted.success_prob).abs() < 1e-12);
        assert_eq!(built.output.branches().len(), scripted.output.branches().len());
        for (x, y) in built.output.branches().iter().zip(scripted.output.branches()) {
            assert!((x.weight - y.weight).abs() < 1e-12);
            assert!(max_amplitude_error(&y.state, &amplitudes_of(&x.state)) < 1e-10);
        }
    }
    assert_same(&noon8(DetectorModel::Pnr).unwrap(), &run_text(&reference::noon8(DetectorModel::Pnr)));
    assert_same(&spdc_noonlike(DetectorModel::Pnr).unwrap(), &run_text(&reference::spdc_noonlike(DetectorModel::Pnr)));
}

#[test]
fn subtraction_script_matches_builder_chain() {
    let (t2, eta) = (0.99, 0.3);
    let h = FRAC_1_SQRT_2;
    let first = noon4(h, h, DetectorModel::Pnr).unwrap();
    let flipped = apply_ensemble(&first.output, &waveplate("a", PI / 4.0).unwrap()).unwrap();
    let built = subtract_photon(&flipped, "a", t2, DetectorModel::on_off(eta).unwrap()).unwrap();
    let scripted = run_text(&reference::noon4_then_subtract(t2, eta));
    assert!((built.success_prob - scripted.success_prob).abs() < 1e-12);
    let target = noon_state("a", 3, 0.0).unwrap();
    let fb = built.output.normalize().unwrap().fidelity_to_pure(&target).unwrap();
    let fs = scripted.output.normalize().unwrap().fidelity_to_pure(&target).unwrap();
    assert!((fb - fs).abs() < 1e-10);
    assert!(fb > 0.9);
}

#[test]
fn on_off_noon4_keeps_weights_conditional() {
    let res = noon4(FRAC_1_SQRT_2, FRAC_1_SQRT_2, DetectorModel::on_off(0.5).unwrap()).unwrap();
    assert!((res.step_product() - res.success_prob).abs() < 1e-12);
    assert!(res.pure_output().is_none());
    assert!(res.success_prob > 3.0 / 16.0);
}
