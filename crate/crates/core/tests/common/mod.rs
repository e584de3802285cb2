//! Test-only oracles: polynomial algebra over commuting creation operators,
//! converted to Fock amplitudes with factorial weights. Independent of the
//! photon-by-photon substitution used by `optics::apply`.
#![allow(dead_code)]

pub mod strategies;

use std::collections::BTreeMap;

use linopt::{Complex64, PureState, Register};
use nalgebra::DMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Polynomial in `n` commuting variables (creation operators).
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u8>, Complex64>,
}

impl Poly {
    pub fn one(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; vars], c(1.0, 0.0));
        Poly { vars, terms }
    }

    /// Σ coeffs[k] x_k
    pub fn linear(coeffs: &[Complex64]) -> Self {
        let vars = coeffs.len();
        let mut terms = BTreeMap::new();
        for (k, &a) in coeffs.iter().enumerate() {
            if a != c(0.0, 0.0) {
                let mut e = vec![0; vars];
                e[k] = 1;
                terms.insert(e, a);
            }
        }
        Poly { vars, terms }
    }

    /// coeff · Π x_k^{exps[k]}
    pub fn monomial(exps: &[u8], coeff: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(exps.to_vec(), coeff);
        Poly { vars: exps.len(), terms }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (e, a) in &other.terms {
            *terms.entry(e.clone()).or_default() += a;
        }
        Poly { vars: self.vars, terms }
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly { vars: self.vars, terms: self.terms.iter().map(|(e, a)| (e.clone(), a * s)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
        for (e1, a1) in &self.terms {
            for (e2, a2) in &other.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_default() += a1 * a2;
            }
        }
        Poly { vars: self.vars, terms }
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(self.vars), |acc, _| acc.mul(self))
    }

    /// Substitutes x_k → images[k] (each a polynomial in the same variables).
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        let mut out = Poly { vars: self.vars, terms: BTreeMap::new() };
        for (e, a) in &self.terms {
            let mut m = Poly::one(self.vars).scale(*a);
            for (k, &n) in e.iter().enumerate() {
                m = m.mul(&images[k].pow(n as u32));
            }
            out = out.add(&m);
        }
        out
    }

    /// Keeps only monomials where the listed variables have exponent 0.
    pub fn vacuum_sector(&self, vars: &[usize]) -> Poly {
        let terms =
            self.terms.iter().filter(|(e, _)| vars.iter().all(|&k| e[k] == 0)).map(|(e, a)| (e.clone(), *a)).collect();
        Poly { vars: self.vars, terms }
    }

    /// Fock amplitudes of poly · |0⟩: coefficient times √(Π nᵢ!).
    pub fn fock_amplitudes(&self) -> BTreeMap<Vec<u8>, Complex64> {
        self.terms
            .iter()
            .filter(|(_, a)| a.norm() > 1e-14)
            .map(|(e, a)| {
                let f: f64 = e.iter().map(|&n| (1..=n as u32).map(f64::from).product::<f64>()).product();
                (e.clone(), a * f.sqrt())
            })
            .collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.fock_amplitudes().values().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_state(&self, register: Register) -> PureState {
        PureState::from_amplitudes(register, self.fock_amplitudes().into_iter().map(|(e, a)| (e.into(), a))).unwrap()
    }
}

/// Max amplitude difference between a state and expected amplitudes.
pub fn max_amplitude_error(state: &PureState, expected: &BTreeMap<Vec<u8>, Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (occ, a) in state.amplitudes() {
        let e = expected.get(occ.counts()).copied().unwrap_or_default();
        worst = worst.max((a - e).norm());
    }
    for (occ, e) in expected {
        worst = worst.max((state.amplitude(occ) - e).norm());
    }
    worst
}

/// QR-based unitary from a square matrix of raw complex entries.
pub fn unitary_from(raw: &[(f64, f64)], n: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |j, k| {
        let (re, im) = raw[j * n + k];
        c(re, im)
    });
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column phases using R's diagonal so the map is well spread
    let mut out = q.clone();
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 1e-12 { d / d.norm() } else { c(1.0, 0.0) };
        for j in 0..n {
            out[(j, k)] = q[(j, k)] * ph;
        }
    }
    out
}
