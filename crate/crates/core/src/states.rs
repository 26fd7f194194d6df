//! Single-particle state vectors with an explicit spin-frame rotor.
//!
//! A ket `|Q, p, s, m(R)⟩` is stored expanded in the null-rotation basis,
//! `Σ_{m'} D^s_{m'm}(R) |Q, p, s, m'(N)⟩`, so two descriptions of the same
//! physical state give the same term list and a 2π frame rotor shows up as
//! the amplitude factor `(-1)^{2s}`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::halfspin::HalfSpin;
use crate::rotor::{Rotor, Vec3};
use crate::wigner::{dmatrix, DMatrix};

/// Momentum labels closer than this (max-norm) are the same label.
pub const MOMENTUM_TOL: f64 = 1e-10;
/// Amplitudes smaller than this are dropped.
pub const AMPLITUDE_CUTOFF: f64 = 1e-14;
/// Relative residual above which two vectors are not on one ray.
pub const RAY_TOL: f64 = 1e-8;

/// Intrinsic quantum numbers as ordered `(name, value)` pairs, compared exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers(pub Vec<(String, i64)>);

impl QuantumNumbers {
    pub fn none() -> Self {
        QuantumNumbers(Vec::new())
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.0.push((name.to_string(), value));
        self
    }
}

/// Label of a null-rotation basis ket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KetLabel {
    pub q: QuantumNumbers,
    pub p: Vec3,
    pub s: HalfSpin,
    pub m: HalfSpin,
}

impl KetLabel {
    pub fn matches(&self, other: &KetLabel) -> bool {
        self.s == other.s
            && self.m == other.m
            && (self.p - other.p).amax() <= MOMENTUM_TOL
            && self.q == other.q
    }

    /// Total order used to keep term lists canonical.
    pub fn canonical_cmp(&self, other: &KetLabel) -> Ordering {
        self.q
            .cmp(&other.q)
            .then_with(|| self.p.x.total_cmp(&other.p.x))
            .then_with(|| self.p.y.total_cmp(&other.p.y))
            .then_with(|| self.p.z.total_cmp(&other.p.z))
            .then_with(|| self.s.cmp(&other.s))
            .then_with(|| other.m.cmp(&self.m))
    }
}

/// A finite superposition of null-rotation basis kets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StateVector {
    terms: Vec<(KetLabel, Complex64)>,
}

impl StateVector {
    pub fn zero() -> Self {
        StateVector { terms: Vec::new() }
    }

    /// Collects terms, merging labels that match and dropping tiny amplitudes.
    pub fn from_terms(terms: impl IntoIterator<Item = (KetLabel, Complex64)>) -> Self {
        let mut merged: Vec<(KetLabel, Complex64)> = Vec::new();
        for (label, amp) in terms {
            match merged.iter_mut().find(|(l, _)| l.matches(&label)) {
                Some((_, a)) => *a += amp,
                None => merged.push((label, amp)),
            }
        }
        merged.retain(|(_, a)| a.norm() >= AMPLITUDE_CUTOFF);
        merged.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        StateVector { terms: merged }
    }

    pub fn terms(&self) -> &[(KetLabel, Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, label: &KetLabel) -> Complex64 {
        self.terms
            .iter()
            .find(|(l, _)| l.matches(label))
            .map_or(Complex64::new(0.0, 0.0), |(_, a)| *a)
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().fold(0.0, |acc, (_, a)| acc + a.norm_sqr()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> StateVector {
        StateVector::from_terms(self.terms.iter().map(|(l, a)| (l.clone(), a * c)))
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &StateVector, b: Complex64) -> StateVector {
        StateVector::from_terms(
            self.terms
                .iter()
                .map(|(l, x)| (l.clone(), x * a))
                .chain(other.terms.iter().map(|(l, x)| (l.clone(), x * b))),
        )
    }

    /// Largest amplitude difference over the union of labels.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
            .terms
            .iter()
            .fold(0.0_f64, |acc, (_, a)| acc.max(a.norm()))
    }

    /// The single momentum shared by all terms, if there is one.
    pub fn common_momentum(&self) -> Option<Vec3> {
        let first = self.terms.first()?.0.p;
        self.terms
            .iter()
            .all(|(l, _)| (l.p - first).amax() <= MOMENTUM_TOL)
            .then_some(first)
    }
}

/// `|Q, p, s, m(R)⟩` expanded in the null-rotation basis.
pub fn make_ket(q: &QuantumNumbers, p: &Vec3, s: HalfSpin, m: HalfSpin, frame_rotor: &Rotor) -> Result<StateVector> {
    s.check_component(m)?;
    if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
        return Err(domain("momentum is not finite"));
    }
    let d = dmatrix(s, frame_rotor)?;
    Ok(StateVector::from_terms(s.components().map(|mp| {
        (KetLabel { q: q.clone(), p: *p, s, m: mp }, d.get(mp, m))
    })))
}

/// The canonical-basis ket `|Q, p, s, m(N)⟩`.
pub fn canonical_ket(q: &QuantumNumbers, p: &Vec3, s: HalfSpin, m: HalfSpin) -> Result<StateVector> {
    make_ket(q, p, s, m, &Rotor::IDENTITY)
}

/// The rotor about `ẑ × n̂` by the polar angle of `n̂`; the identity for
/// `n̂ = ẑ` and `R_y(π)` for `n̂ = -ẑ`.
pub fn standard_rotation_to(n: &Vec3) -> Result<Rotor> {
    let len = n.norm();
    if len == 0.0 || !len.is_finite() {
        return Err(domain("direction vector is zero"));
    }
    let n = n / len;
    let axis = Vec3::z().cross(&n);
    let sin = axis.norm();
    if sin < 1e-14 {
        return Ok(if n.z > 0.0 {
            Rotor::IDENTITY
        } else {
            Rotor::about_coordinate_axis(1, std::f64::consts::PI)
        });
    }
    Rotor::from_axis_angle(&(axis / sin), sin.atan2(n.z))
}

/// Helicity ket: spin quantized along `p̂` via [`standard_rotation_to`].
pub fn helicity_ket(q: &QuantumNumbers, p: &Vec3, s: HalfSpin, lambda: HalfSpin) -> Result<StateVector> {
    if p.norm() == 0.0 {
        return Err(domain("helicity is undefined at zero momentum"));
    }
    make_ket(q, p, s, lambda, &standard_rotation_to(p)?)
}

/// `U(r) v`: rotates momenta and mixes spin components with `D^s(r)`.
pub fn apply_rotation(r: &Rotor, v: &StateVector) -> Result<StateVector> {
    let mut cache: HashMap<HalfSpin, DMatrix> = HashMap::new();
    let mut out = Vec::with_capacity(v.terms.len());
    for (label, amp) in &v.terms {
        let d = match cache.get(&label.s) {
            Some(d) => d,
            None => cache.entry(label.s).or_insert(dmatrix(label.s, r)?),
        };
        let p = r.rotate_vector(&label.p);
        for m2 in label.s.components() {
            out.push((KetLabel { q: label.q.clone(), p, s: label.s, m: m2 }, d.get(m2, label.m) * amp));
        }
    }
    Ok(StateVector::from_terms(out))
}

/// Relabels the momentum of a single-momentum state; boosts carry no phase here.
pub fn boost(p_new: &Vec3, v: &StateVector) -> Result<StateVector> {
    if v.is_zero() {
        return Ok(v.clone());
    }
    if v.common_momentum().is_none() {
        return Err(domain("boost needs a state with a single momentum label"));
    }
    Ok(StateVector::from_terms(
        v.terms.iter().map(|(l, a)| (KetLabel { p: *p_new, ..l.clone() }, *a)),
    ))
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner_product(u: &StateVector, v: &StateVector) -> Complex64 {
    u.terms
        .iter()
        .map(|(lu, au)| au.conj() * v.amplitude(lu))
        .sum()
}

/// Best-fit `c` with `u ≈ c·v`, checked for ray membership and unit modulus.
pub(crate) fn ray_ratio(
    uu: f64,
    vv: f64,
    vu: Complex64,
    residual: impl FnOnce(Complex64) -> f64,
) -> Result<Complex64> {
    if vv == 0.0 || uu == 0.0 {
        return Err(Error::NotARay { residual: f64::INFINITY });
    }
    let c = vu / vv;
    let rel = residual(c) / uu.sqrt();
    if rel > RAY_TOL {
        return Err(Error::NotARay { residual: rel });
    }
    if (c.norm() - 1.0).abs() > RAY_TOL {
        return Err(domain(format!("vectors share a ray but |c| = {} is not 1", c.norm())));
    }
    Ok(c)
}

/// The unimodular `c` with `u = c·v`.
pub fn phase_ratio(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    ray_ratio(
        inner_product(u, u).re,
        inner_product(v, v).re,
        inner_product(v, u),
        |c| u.combine(one, v, -c).norm(),
    )
}
