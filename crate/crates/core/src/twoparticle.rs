//! Symmetrized two-particle states, permutation versus exchange, and the
//! common-frame constructions whose exchange phase is measured numerically.
//!
//! Permutation swaps the order of the factors in every tensor term. Exchange
//! swaps which particle carries the label "1" while keeping what the labels
//! mean (the fixed rotor between the frames of "2" and "1", and the common
//! frame), and is carried out by rebuilding the state.
//!
//! Each particle's spin frame in a common-frame construction is the SU(2)
//! product of a chain of rotors: the lift of its own bisecting frame, the
//! rotor to the other particle's bisecting frame, and the rotor from there to
//! the common frame `F`. The lifts of the two bisecting frames are tied by a
//! fixed physical rotor `R_ba = R_k(+π)` between the *anchor* particle (the
//! description that sorts first, see [`ParticleSpec::canonical_cmp`]) and the
//! other one. The labeled construction instead keeps `R_co = R_k(sign·π)`
//! fixed between whatever particles carry the labels, so relabeling inserts
//! `R_k(±π)·R_k(±π) = R_k(±2π)` into one particle's chain.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::frames::{bisecting_frames_with_hint, pair_geometry, relating_rotor, Frame};
use crate::halfspin::HalfSpin;
use crate::rotor::{Rotor, Vec3};
use crate::states::{make_ket, phase_ratio, ray_ratio, standard_rotation_to, KetLabel, QuantumNumbers, StateVector, AMPLITUDE_CUTOFF, MOMENTUM_TOL};

/// Tolerance for the agreement of the direct exchange phase with the
/// single-particle ratio formula.
pub const RATIO_TOL: f64 = 1e-10;

/// Sign of the physical rotor `R_ba = R_k(sign·π)` relating the anchor's
/// bisecting frame lift to the other particle's in the labeled construction.
pub const PHYSICAL_RBA_SIGN: i8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Canonical,
    Helicity,
}

/// One particle's description: intrinsic labels, momentum, spin and the spin
/// component (`m` in the canonical basis, `λ` in the helicity basis).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub q: QuantumNumbers,
    pub p: Vec3,
    pub s: HalfSpin,
    pub spin_quantum: HalfSpin,
    pub basis: Basis,
}

impl ParticleSpec {
    pub fn new(q: QuantumNumbers, p: Vec3, s: HalfSpin, spin_quantum: HalfSpin, basis: Basis) -> Result<Self> {
        let spec = ParticleSpec { q, p, s, spin_quantum, basis };
        spec.validate()?;
        Ok(spec)
    }

    pub fn canonical(q: QuantumNumbers, p: Vec3, s: HalfSpin, m: HalfSpin) -> Result<Self> {
        Self::new(q, p, s, m, Basis::Canonical)
    }

    pub fn helicity(q: QuantumNumbers, p: Vec3, s: HalfSpin, lambda: HalfSpin) -> Result<Self> {
        Self::new(q, p, s, lambda, Basis::Helicity)
    }

    pub fn validate(&self) -> Result<()> {
        self.s.check_component(self.spin_quantum)?;
        if self.basis == Basis::Helicity && self.p.norm() == 0.0 {
            return Err(domain("helicity basis needs a nonzero momentum"));
        }
        Ok(())
    }

    pub fn with_quantum(&self, spin_quantum: HalfSpin) -> Self {
        ParticleSpec { spin_quantum, ..self.clone() }
    }

    fn direction(&self) -> Result<Vec3> {
        let n = self.p.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateGeometry("pair frames need nonzero momenta".into()));
        }
        Ok(self.p / n)
    }

    /// Total order on descriptions; the smaller one is the anchor of a pair.
    /// Components sort in descending order.
    pub fn canonical_cmp(&self, other: &ParticleSpec) -> Ordering {
        let same_p = (self.p - other.p).amax() <= MOMENTUM_TOL;
        self.q
            .cmp(&other.q)
            .then_with(|| {
                if same_p {
                    Ordering::Equal
                } else {
                    self.p.x
                        .total_cmp(&other.p.x)
                        .then_with(|| self.p.y.total_cmp(&other.p.y))
                        .then_with(|| self.p.z.total_cmp(&other.p.z))
                }
            })
            .then_with(|| self.s.cmp(&other.s))
            .then_with(|| other.spin_quantum.cmp(&self.spin_quantum))
            .then_with(|| self.basis.cmp(&other.basis))
    }

    /// Same description up to the momentum tolerance.
    pub fn same_description(&self, other: &ParticleSpec) -> bool {
        self.canonical_cmp(other) == Ordering::Equal
    }

    /// The ket of this particle given the SU(2) rotor of the frame its spin
    /// is referred to: the frame itself for the canonical basis, the frame
    /// followed by the standard rotation onto `p̂` for the helicity basis.
    pub fn ket_in_frame(&self, frame: &Rotor) -> Result<StateVector> {
        let spin_frame = match self.basis {
            Basis::Canonical => *frame,
            Basis::Helicity => {
                let local = frame.inverse().rotate_vector(&self.p);
                frame.compose(&standard_rotation_to(&local)?)
            }
        };
        make_ket(&self.q, &self.p, self.s, self.spin_quantum, &spin_frame)
    }
}

/// Which common-frame construction produced a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Fixed `R_co` between labels "2" and "1".
    Labeled,
    /// Fixed physical `R_ba` between the particles.
    Symmetric,
}

/// Labeling record of a common-frame state.
#[derive(Clone, Debug, PartialEq)]
pub struct Labeling {
    pub construction: Construction,
    /// The description carrying label "1".
    pub spec1: ParticleSpec,
    /// The description carrying label "2".
    pub spec2: ParticleSpec,
    pub sign: i8,
    /// Common frame `F` as a lab rotor.
    pub frame: Rotor,
    /// Limiting direction of `p̂1 × p̂2` for coincident momenta.
    pub hint: Option<Vec3>,
    /// Spin-frame chains of particles "1" and "2".
    pub chain1: Rotor,
    pub chain2: Rotor,
    /// Single-particle kets of particles "1" and "2".
    pub ket1: StateVector,
    pub ket2: StateVector,
}

type PairTerm = (KetLabel, KetLabel, Complex64);

fn cmp_pair(a: &PairTerm, b: &PairTerm) -> Ordering {
    a.0.canonical_cmp(&b.0).then_with(|| a.1.canonical_cmp(&b.1))
}

/// Amplitudes over ordered pairs of null-rotation kets.
#[derive(Clone, Debug, Default)]
pub struct TwoParticleState {
    terms: Vec<PairTerm>,
    meta: Option<Labeling>,
}

/// Term-map equality; the labeling record is not compared.
impl PartialEq for TwoParticleState {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl TwoParticleState {
    pub fn zero() -> Self {
        TwoParticleState::default()
    }

    fn from_sorted(mut terms: Vec<PairTerm>, meta: Option<Labeling>) -> Self {
        terms.retain(|t| t.2.norm() >= AMPLITUDE_CUTOFF);
        terms.sort_by(cmp_pair);
        TwoParticleState { terms, meta }
    }

    /// Collects terms, merging matching label pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = PairTerm>) -> Self {
        let mut merged: Vec<PairTerm> = Vec::new();
        for (l1, l2, amp) in terms {
            match merged.iter_mut().find(|(a, b, _)| a.matches(&l1) && b.matches(&l2)) {
                Some(t) => t.2 += amp,
                None => merged.push((l1, l2, amp)),
            }
        }
        Self::from_sorted(merged, None)
    }

    /// The product state `u ⊗ v`, not symmetrized.
    pub fn product(u: &StateVector, v: &StateVector) -> Self {
        let mut terms = Vec::new();
        for (lu, au) in u.terms() {
            for (lv, av) in v.terms() {
                terms.push((lu.clone(), lv.clone(), au * av));
            }
        }
        Self::from_sorted(terms, None)
    }

    pub fn terms(&self) -> &[PairTerm] {
        &self.terms
    }

    pub fn meta(&self) -> Option<&Labeling> {
        self.meta.as_ref()
    }

    pub fn without_meta(&self) -> Self {
        TwoParticleState { terms: self.terms.clone(), meta: None }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, l1: &KetLabel, l2: &KetLabel) -> Complex64 {
        self.terms
            .iter()
            .find(|(a, b, _)| a.matches(l1) && b.matches(l2))
            .map_or(Complex64::new(0.0, 0.0), |t| t.2)
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().fold(0.0, |acc, t| acc + t.2.norm_sqr()).sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &TwoParticleState) -> Complex64 {
        self.terms
            .iter()
            .map(|(a, b, x)| x.conj() * other.amplitude(a, b))
            .sum()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &TwoParticleState, b: Complex64) -> TwoParticleState {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(l1, l2, x)| (l1.clone(), l2.clone(), x * a))
                .chain(other.terms.iter().map(|(l1, l2, x)| (l1.clone(), l2.clone(), x * b))),
        )
    }

    pub fn scale(&self, c: Complex64) -> TwoParticleState {
        Self::from_sorted(
            self.terms.iter().map(|(l1, l2, x)| (l1.clone(), l2.clone(), x * c)).collect(),
            None,
        )
    }

    /// Largest amplitude difference between `self` and `other`.
    pub fn max_abs_diff(&self, other: &TwoParticleState) -> f64 {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
            .terms
            .iter()
            .fold(0.0_f64, |acc, t| acc.max(t.2.norm()))
    }

    /// Largest `|t(k1,k2) - t(k2,k1)|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.max_abs_diff(&permute(self))
    }
}

/// `α(u⊗v + v⊗u)` with `α` fixing the norm to 1. The amplitude of each
/// unordered pair is computed once and stored under both orders, so the
/// result is symmetric bit for bit.
pub fn symmetrize(u: &StateVector, v: &StateVector) -> Result<TwoParticleState> {
    symmetrize_with_meta(u, v, None)
}

fn symmetrize_with_meta(u: &StateVector, v: &StateVector, meta: Option<Labeling>) -> Result<TwoParticleState> {
    if u.is_zero() || v.is_zero() {
        return Err(domain("cannot symmetrize a zero state vector"));
    }
    let mut labels: Vec<KetLabel> = Vec::new();
    for (l, _) in u.terms().iter().chain(v.terms()) {
        if !labels.iter().any(|k| k.matches(l)) {
            labels.push(l.clone());
        }
    }
    let uu: Vec<Complex64> = labels.iter().map(|l| u.amplitude(l)).collect();
    let vv: Vec<Complex64> = labels.iter().map(|l| v.amplitude(l)).collect();
    let overlap = crate::states::inner_product(u, v).norm_sqr();
    let norm2 = 2.0 * u.norm().powi(2) * v.norm().powi(2) + 2.0 * overlap;
    if norm2 <= 0.0 {
        return Err(domain("symmetrized state vanishes"));
    }
    let alpha = norm2.sqrt().recip();
    let mut terms = Vec::with_capacity(labels.len() * labels.len());
    for i in 0..labels.len() {
        for j in i..labels.len() {
            let amp = (uu[i] * vv[j] + vv[i] * uu[j]) * alpha;
            terms.push((labels[i].clone(), labels[j].clone(), amp));
            if i != j {
                terms.push((labels[j].clone(), labels[i].clone(), amp));
            }
        }
    }
    Ok(TwoParticleState::from_sorted(terms, meta))
}

/// Swaps the two factors of every term. Keeps the labeling record.
pub fn permute(t: &TwoParticleState) -> TwoParticleState {
    TwoParticleState::from_sorted(
        t.terms.iter().map(|(a, b, x)| (b.clone(), a.clone(), *x)).collect(),
        t.meta.clone(),
    )
}

/// Each particle described in its own bisecting frame (helicity kets
/// additionally rotated onto their momentum), then symmetrized. `hint` is the
/// limiting direction of `p̂_a × p̂_b`, used only for coincident momenta.
pub fn bisecting_pair_state(a: &ParticleSpec, b: &ParticleSpec, hint: Option<&Vec3>) -> Result<TwoParticleState> {
    a.validate()?;
    b.validate()?;
    let (frame_a, frame_b) = bisecting_frames_with_hint(&a.direction()?, &b.direction()?, hint)?;
    let ket_a = a.ket_in_frame(&frame_a.lift())?;
    let ket_b = b.ket_in_frame(&frame_b.lift())?;
    symmetrize(&ket_a, &ket_b)
}

/// Lifts of the bisecting frames of the anchor and the other particle, tied
/// by `lift(other) = R_ba⁻¹ · lift(anchor)` with `R_ba = R_k(rba_sign·π)`.
fn anchored_lifts(anchor: &ParticleSpec, other: &ParticleSpec, hint: Option<&Vec3>, rba_sign: i8) -> Result<(Rotor, Rotor)> {
    let va = anchor.direction()?;
    let vb = other.direction()?;
    let (frame_a, frame_b) = bisecting_frames_with_hint(&va, &vb, hint)?;
    let g = pair_geometry(&va, &vb)?;
    let lift_a = frame_a.lift();
    let r_ab = relating_rotor(&g, -rba_sign)?;
    let lift_b = r_ab.compose(&lift_a);
    debug_assert!(Frame::from_rotor(&lift_b).max_abs_diff(&frame_b) < 1e-9);
    Ok((lift_a, lift_b))
}

fn common_frame_state(
    construction: Construction,
    spec1: &ParticleSpec,
    spec2: &ParticleSpec,
    frame: &Rotor,
    sign: i8,
    hint: Option<&Vec3>,
) -> Result<TwoParticleState> {
    if sign != 1 && sign != -1 {
        return Err(domain(format!("rotation sign must be ±1, got {sign}")));
    }
    spec1.validate()?;
    spec2.validate()?;
    let one_is_anchor = match spec1.canonical_cmp(spec2) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => hint.is_none_or(points_forward),
    };
    let rba_sign = match construction {
        Construction::Labeled => PHYSICAL_RBA_SIGN,
        Construction::Symmetric => sign,
    };
    // The hint is oriented along p̂1 × p̂2; the anchored frames want p̂_anchor × p̂_other.
    let (lift1, lift2) = if one_is_anchor {
        anchored_lifts(spec1, spec2, hint, rba_sign)?
    } else {
        let flipped = hint.map(|h| -h);
        let (anchor, other) = anchored_lifts(spec2, spec1, flipped.as_ref(), rba_sign)?;
        (other, anchor)
    };
    // Rotor carrying the bisecting frame of "2" onto that of "1", in the
    // local axes of frame "2" (where the bisector is ẑ).
    let r21 = match construction {
        Construction::Labeled => Rotor::about_coordinate_axis(2, f64::from(sign) * std::f64::consts::PI),
        Construction::Symmetric => lift2.inverse().compose(&lift1),
    };
    let to_common = lift1.inverse().compose(frame);
    let chain1 = lift1.compose(&to_common);
    let chain2 = lift2.compose(&r21).compose(&to_common);
    let ket1 = spec1.ket_in_frame(&chain1)?;
    let ket2 = spec2.ket_in_frame(&chain2)?;
    let meta = Labeling {
        construction,
        spec1: spec1.clone(),
        spec2: spec2.clone(),
        sign,
        frame: *frame,
        hint: hint.copied(),
        chain1,
        chain2,
        ket1: ket1.clone(),
        ket2: ket2.clone(),
    };
    symmetrize_with_meta(&ket1, &ket2, Some(meta))
}

/// Whether the first nonzero component of `h` is positive; exactly one of
/// `h` and `-h` points forward.
fn points_forward(h: &Vec3) -> bool {
    h.iter().find(|c| **c != 0.0).is_none_or(|c| *c > 0.0)
}

/// Both particles referred to the common frame `F`, with particle "2"
/// reached through the fixed relative rotor `R_co = R_k(sign·π)`.
///
/// For identical descriptions the anchor follows the orientation of the
/// hint, and the state is the mean over both orientations so that it does
/// not depend on the hint. It is the zero vector for half-integer spin.
pub fn labeled_common_frame_state(
    spec1: &ParticleSpec,
    spec2: &ParticleSpec,
    frame: &Rotor,
    sign: i8,
    hint: Option<&Vec3>,
) -> Result<TwoParticleState> {
    let t = common_frame_state(Construction::Labeled, spec1, spec2, frame, sign, hint)?;
    match hint {
        Some(h) if spec1.same_description(spec2) => {
            let flipped = common_frame_state(Construction::Labeled, spec1, spec2, frame, sign, Some(&-h))?;
            let half = Complex64::new(0.5, 0.0);
            let mut mean = t.combine(half, &flipped, half);
            mean.meta = t.meta;
            Ok(mean)
        }
        _ => Ok(t),
    }
}

/// Both particles referred to the common frame `F` through the fixed
/// physical rotor `R_ba = R_k(sign·π)`, which does not change when the
/// labels are exchanged.
pub fn symmetric_common_frame_state(
    a: &ParticleSpec,
    b: &ParticleSpec,
    frame: &Rotor,
    sign: i8,
    hint: Option<&Vec3>,
) -> Result<TwoParticleState> {
    common_frame_state(Construction::Symmetric, a, b, frame, sign, hint)
}

/// Interchanges which description carries label "1", keeping the meaning of
/// the labels. Without a labeling record this is [`permute`].
pub fn exchange(t: &TwoParticleState) -> Result<TwoParticleState> {
    match &t.meta {
        None => Ok(permute(t)),
        Some(m) => {
            let hint = m.hint.map(|h| -h);
            match m.construction {
                Construction::Labeled => labeled_common_frame_state(&m.spec2, &m.spec1, &m.frame, m.sign, hint.as_ref()),
                Construction::Symmetric => {
                    symmetric_common_frame_state(&m.spec2, &m.spec1, &m.frame, m.sign, hint.as_ref())
                }
            }
        }
    }
}

/// Best-fit `c` with `u = c·v` for two-particle states.
pub fn pair_phase_ratio(u: &TwoParticleState, v: &TwoParticleState) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    ray_ratio(u.inner(u).re, v.inner(v).re, v.inner(u), |c| u.combine(one, v, -c).norm())
}

/// Exchange phase together with its single-particle prediction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExchangePhase {
    /// `c` with `exchange(t) = c·t`.
    pub phase: Complex64,
    /// `f(S_b^1, S_b^2) / f(S_a^1, S_a^2)` from single-particle phase ratios,
    /// where `a` is the description labeled "1" in `t`.
    pub ratio_formula: Complex64,
}

/// Measures the exchange phase and checks it against the ratio of
/// single-particle phase factors.
pub fn exchange_phase(t: &TwoParticleState) -> Result<ExchangePhase> {
    let e = exchange_phase_unchecked(t)?;
    if (e.phase - e.ratio_formula).norm() > RATIO_TOL {
        return Err(Error::RatioMismatch { direct: e.phase, ratio: e.ratio_formula });
    }
    Ok(e)
}

/// [`exchange_phase`] without the agreement check.
pub fn exchange_phase_unchecked(t: &TwoParticleState) -> Result<ExchangePhase> {
    let x = exchange(t)?;
    let phase = pair_phase_ratio(&x, t)?;
    let ratio_formula = match (t.meta(), x.meta()) {
        (Some(before), Some(after)) => {
            // Description a: "1" before, "2" after; description b the reverse.
            let f_a = phase_ratio(&before.ket1, &after.ket2)?;
            let f_b = phase_ratio(&after.ket1, &before.ket2)?;
            f_b / f_a
        }
        _ => Complex64::new(1.0, 0.0),
    };
    Ok(ExchangePhase { phase, ratio_formula })
}

/// Collections of `num_entities` unordered entities over `states_per_entity`
/// states, each given as occupation numbers per state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderFree {
    pub count: u64,
    pub multisets: Vec<Vec<u32>>,
}

/// All multisets of size `num_entities`, in descending lexicographic order of
/// their occupation vectors.
pub fn enumerate_order_free(num_entities: u32, states_per_entity: u32) -> Result<OrderFree> {
    if num_entities == 0 || states_per_entity == 0 {
        return Err(domain("need at least one entity and one state"));
    }
    fn fill(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            fill(remaining - first, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut multisets = Vec::new();
    fill(num_entities, states_per_entity as usize, &mut Vec::new(), &mut multisets);
    Ok(OrderFree { count: multisets.len() as u64, multisets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{canonical_ket, inner_product};

    fn h(t: i32) -> HalfSpin {
        HalfSpin::from_twice(t)
    }

    fn spec(p: Vec3, twice_s: i32, twice_m: i32) -> ParticleSpec {
        ParticleSpec::canonical(QuantumNumbers::none(), p, h(twice_s), h(twice_m)).unwrap()
    }

    fn pa() -> Vec3 {
        Vec3::new(0.4, 0.1, 0.9)
    }

    fn pb() -> Vec3 {
        Vec3::new(-0.3, 0.8, 0.2)
    }

    fn frame() -> Rotor {
        Rotor::normalized(0.3, -0.5, 0.2, 0.7)
    }

    #[test]
    fn symmetrize_identical_kets() {
        let k = canonical_ket(&QuantumNumbers::none(), &pa(), h(1), h(1)).unwrap();
        let t = symmetrize(&k, &k).unwrap();
        assert_eq!(t.terms().len(), 1);
        assert!((t.terms()[0].2 - 1.0).norm() < 1e-15);
    }

    #[test]
    fn symmetrize_orthogonal_kets() {
        let u = canonical_ket(&QuantumNumbers::none(), &pa(), h(1), h(1)).unwrap();
        let v = canonical_ket(&QuantumNumbers::none(), &pa(), h(1), h(-1)).unwrap();
        let t = symmetrize(&u, &v).unwrap();
        assert_eq!(t.terms().len(), 2);
        assert!((t.norm() - 1.0).abs() < 1e-15);
        assert!((t.terms()[0].2.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(permute(&t), t);
        assert!(symmetrize(&u, &StateVector::zero()).is_err());
    }

    #[test]
    fn permute_is_an_involution_and_transposes_products() {
        let u = canonical_ket(&QuantumNumbers::none(), &pa(), h(1), h(1)).unwrap();
        let v = canonical_ket(&QuantumNumbers::none(), &pb(), h(2), h(0)).unwrap();
        let prod = TwoParticleState::product(&u, &v);
        let swapped = permute(&prod);
        assert_ne!(swapped, prod);
        assert_eq!(swapped, TwoParticleState::product(&v, &u));
        assert_eq!(permute(&swapped), prod);
    }

    #[test]
    fn labeled_state_exchange_phase_fermions_and_bosons() {
        for (twice_s, want) in [(0, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)] {
            let a = spec(pa(), twice_s, twice_s);
            let b = spec(pb(), twice_s, -twice_s);
            let t = labeled_common_frame_state(&a, &b, &frame(), 1, None).unwrap();
            assert_eq!(permute(&t), t);
            assert!((t.norm() - 1.0).abs() < 1e-12);
            let x = exchange_phase(&t).unwrap();
            assert!((x.phase - want).norm() < 1e-10, "2s = {twice_s}: {}", x.phase);
            let x = exchange_phase(&exchange(&t).unwrap()).unwrap();
            assert!((x.phase - want).norm() < 1e-10);
        }
    }

    #[test]
    fn sign_selects_which_spin_sets_the_phase() {
        // The anchor is the description that sorts first: here `a`.
        let a = spec(pb(), 1, 1);
        let b = spec(pa(), 2, 0);
        assert_eq!(a.canonical_cmp(&b), Ordering::Less);
        let plus = labeled_common_frame_state(&a, &b, &frame(), 1, None).unwrap();
        let minus = labeled_common_frame_state(&a, &b, &frame(), -1, None).unwrap();
        assert!((exchange_phase(&plus).unwrap().phase + 1.0).norm() < 1e-10);
        assert!((exchange_phase(&minus).unwrap().phase - 1.0).norm() < 1e-10);
        // Listing the pair the other way round does not change the phase.
        let plus_ba = labeled_common_frame_state(&b, &a, &frame(), 1, None).unwrap();
        assert!((exchange_phase(&plus_ba).unwrap().phase + 1.0).norm() < 1e-10);
    }

    #[test]
    fn double_exchange_returns_the_state() {
        let a = spec(pa(), 3, 1);
        let b = spec(pb(), 3, -3);
        let t = labeled_common_frame_state(&a, &b, &frame(), -1, None).unwrap();
        let back = exchange(&exchange(&t).unwrap()).unwrap();
        assert!(back.max_abs_diff(&t) < 1e-14);
    }

    #[test]
    fn two_pi_sits_in_the_relabeled_chain() {
        let a = spec(pa(), 1, 1);
        let b = spec(pb(), 1, 1);
        assert_eq!(a.canonical_cmp(&b), Ordering::Greater);
        // b is the anchor; with b labeled "1" the chain of "2" equals F, and
        // after the exchange it equals R_co·R_co·F = -F.
        let t = labeled_common_frame_state(&b, &a, &frame(), 1, None).unwrap();
        let m = t.meta().unwrap();
        assert!(m.chain2.max_abs_diff(&frame()) < 1e-14);
        let x = exchange(&t).unwrap();
        let m = x.meta().unwrap();
        let relative = m.chain2.compose(&frame().inverse());
        assert!(relative.max_abs_diff(&Rotor::MINUS_IDENTITY) < 1e-14);
    }

    #[test]
    fn symmetric_construction_is_exchange_symmetric() {
        for twice_s in 0..=3 {
            let a = spec(pa(), twice_s, twice_s);
            let b = spec(pb(), twice_s, twice_s - 2 * (twice_s / 2));
            for sign in [1, -1] {
                let t = symmetric_common_frame_state(&a, &b, &frame(), sign, None).unwrap();
                assert_eq!(permute(&t), t);
                assert!((exchange_phase(&t).unwrap().phase - 1.0).norm() < 1e-10);
                let l = labeled_common_frame_state(&a, &b, &frame(), sign, None).unwrap();
                let c = pair_phase_ratio(&l, &t).unwrap();
                assert!((c.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bisecting_pair_state_is_exchange_symmetric() {
        let a = ParticleSpec::helicity(QuantumNumbers::none(), pa(), h(1), h(-1)).unwrap();
        let b = ParticleSpec::helicity(QuantumNumbers::none(), pb(), h(1), h(1)).unwrap();
        let t = bisecting_pair_state(&a, &b, None).unwrap();
        assert!(t.meta().is_none());
        assert_eq!(permute(&t), t);
        assert_eq!(exchange(&t).unwrap(), permute(&t));
        assert!((exchange_phase(&t).unwrap().phase - 1.0).norm() < 1e-12);
    }

    /// Relabels every momentum to `p` and normalizes.
    fn collapse_momenta(t: &TwoParticleState, p: &Vec3) -> TwoParticleState {
        let merged = TwoParticleState::from_terms(t.terms().iter().map(|(a, b, x)| {
            (KetLabel { p: *p, ..a.clone() }, KetLabel { p: *p, ..b.clone() }, *x)
        }));
        merged.scale(Complex64::new(1.0 / merged.norm(), 0.0))
    }

    #[test]
    fn bisecting_pair_state_coincident_limit() {
        let p = Vec3::new(0.0, 0.0, 2.0);
        let eps: f64 = 1e-8;
        let p2 = Vec3::new(2.0 * eps.sin(), 0.0, 2.0 * eps.cos());
        for basis in [Basis::Canonical, Basis::Helicity] {
            let a = ParticleSpec::new(QuantumNumbers::none(), p, h(1), h(1), basis).unwrap();
            let b = ParticleSpec::new(QuantumNumbers::none(), p, h(1), h(-1), basis).unwrap();
            assert!(bisecting_pair_state(&a, &b, None).is_err());
            let limit = bisecting_pair_state(&a, &b, Some(&Vec3::y())).unwrap();
            let near = bisecting_pair_state(&a, &ParticleSpec { p: p2, ..b.clone() }, None).unwrap();
            let near = collapse_momenta(&near, &p);
            let limit = collapse_momenta(&limit, &p);
            assert!(near.max_abs_diff(&limit) < 1e-7, "{basis:?}");
        }
    }

    #[test]
    fn identical_descriptions() {
        let hint = Vec3::new(0.0, 1.0, 0.0);
        for twice_s in 0..=4 {
            let x = spec(Vec3::z(), twice_s, twice_s);
            let t = labeled_common_frame_state(&x, &x, &frame(), 1, Some(&hint)).unwrap();
            let flipped = labeled_common_frame_state(&x, &x, &frame(), -1, Some(&-hint)).unwrap();
            if twice_s % 2 == 1 {
                assert!(t.is_zero() && flipped.is_zero());
            } else {
                assert!((t.norm() - 1.0).abs() < 1e-12);
                assert!((pair_phase_ratio(&flipped, &t).unwrap().norm() - 1.0).abs() < 1e-12);
                assert!((exchange_phase(&t).unwrap().phase - 1.0).norm() < 1e-10);
            }
            let s = symmetric_common_frame_state(&x, &x, &frame(), 1, Some(&hint)).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exchange_without_labels_is_permutation() {
        let u = canonical_ket(&QuantumNumbers::none(), &pa(), h(1), h(1)).unwrap();
        let v = canonical_ket(&QuantumNumbers::none(), &pb(), h(1), h(-1)).unwrap();
        let t = symmetrize(&u, &v).unwrap();
        assert_eq!(exchange(&t).unwrap(), t);
        let prod = TwoParticleState::product(&u, &v);
        assert!(matches!(exchange_phase(&prod), Err(Error::NotARay { .. })));
    }

    #[test]
    fn ratio_formula_components_are_single_particle_phases() {
        let a = spec(pa(), 1, -1);
        let b = spec(pb(), 1, 1);
        let t = labeled_common_frame_state(&a, &b, &frame(), 1, None).unwrap();
        let x = exchange(&t).unwrap();
        let (m, mx) = (t.meta().unwrap(), x.meta().unwrap());
        let f_a = inner_product(&mx.ket2, &m.ket1);
        let f_b = inner_product(&m.ket2, &mx.ket1);
        assert!((f_a.norm() - 1.0).abs() < 1e-12 && (f_b.norm() - 1.0).abs() < 1e-12);
        let e = exchange_phase(&t).unwrap();
        assert!((e.phase - e.ratio_formula).norm() < 1e-12);
    }

    #[test]
    fn order_free_counts() {
        let two = enumerate_order_free(2, 2).unwrap();
        assert_eq!(two.count, 3);
        assert_eq!(two.multisets, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(enumerate_order_free(1, 5).unwrap().count, 5);
        assert_eq!(enumerate_order_free(3, 2).unwrap().count, 4);
        assert!(enumerate_order_free(0, 2).is_err());
    }

    #[test]
    fn invalid_sign_rejected() {
        let a = spec(pa(), 1, 1);
        let b = spec(pb(), 1, 1);
        assert!(labeled_common_frame_state(&a, &b, &frame(), 0, None).is_err());
        let c = spec(-pa(), 1, 1);
        assert!(matches!(
            labeled_common_frame_state(&a, &c, &frame(), 1, None),
            Err(Error::DegenerateGeometry(_))
        ));
    }
}
