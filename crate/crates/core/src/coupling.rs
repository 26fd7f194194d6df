//! Clebsch-Gordan coupling of two spins and the exclusion rule for identical
//! particles.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::halfspin::HalfSpin;
use crate::rotor::{Rotor, Vec3};
use crate::states::QuantumNumbers;
use crate::twoparticle::{labeled_common_frame_state, Basis, ParticleSpec, TwoParticleState};
use crate::wigner::factorial;

/// Norm below which a coupled state counts as vanishing.
pub const EXCLUSION_TOL: f64 = 1e-10;

/// `C^{s1 s2 S}_{m1 m2 M}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CGQuery {
    pub s1: HalfSpin,
    pub s2: HalfSpin,
    pub total: HalfSpin,
    pub m1: HalfSpin,
    pub m2: HalfSpin,
    pub m_total: HalfSpin,
}

impl CGQuery {
    pub fn new(s1: HalfSpin, s2: HalfSpin, total: HalfSpin, m1: HalfSpin, m2: HalfSpin, m_total: HalfSpin) -> Self {
        CGQuery { s1, s2, total, m1, m2, m_total }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, c) = (self.s1.twice(), self.s2.twice(), self.total.twice());
        for (name, s) in [("s1", self.s1), ("s2", self.s2), ("S", self.total)] {
            HalfSpin::spin(s.twice()).map_err(|e| domain(format!("{name}: {e}")))?;
        }
        if c < (a - b).abs() || c > a + b || (a + b + c) % 2 != 0 {
            return Err(domain(format!(
                "S = {} is not in the triangle of s1 = {}, s2 = {}",
                self.total, self.s1, self.s2
            )));
        }
        self.s1.check_component(self.m1)?;
        self.s2.check_component(self.m2)?;
        self.total.check_component(self.m_total)
    }
}

/// `(a + b + ...)/2` for twice-valued sums that are known to be even.
fn half(twice: i32) -> i32 {
    debug_assert!(twice % 2 == 0);
    twice / 2
}

/// Racah's closed form with the Condon–Shortley phase.
pub fn cg(q: &CGQuery) -> Result<f64> {
    q.validate()?;
    if q.m1.twice() + q.m2.twice() != q.m_total.twice() {
        return Ok(0.0);
    }
    let (j1, j2, j) = (q.s1.twice(), q.s2.twice(), q.total.twice());
    let (m1, m2, m) = (q.m1.twice(), q.m2.twice(), q.m_total.twice());
    let f = |t: i32| factorial(half(t));
    let prefactor = (f64::from(j + 1) * f(j + j1 - j2) * f(j - j1 + j2) * f(j1 + j2 - j) / f(j1 + j2 + j + 2)).sqrt()
        * (f(j + m) * f(j - m) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)).sqrt();
    let denominators = [j1 + j2 - j, j1 - m1, j2 + m2, j - j2 + m1, j - j1 - m2];
    let mut sum = 0.0;
    for k in 0..=half(j1 + j2 - j) {
        let args = [
            denominators[0] - 2 * k,
            denominators[1] - 2 * k,
            denominators[2] - 2 * k,
            denominators[3] + 2 * k,
            denominators[4] + 2 * k,
        ];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let term = 1.0 / (factorial(k) * args.iter().map(|&a| f(a)).product::<f64>());
        sum += if k % 2 == 0 { term } else { -term };
    }
    Ok(prefactor * sum)
}

/// `Σ C^{ssS}_{m_a m_b M} w · labeled(a(m_a), b(m_b))`, where the labeled
/// states use common frame `frame` and relative rotor sign `sign`.
///
/// When `a` and `b` differ only in their component, `labeled(a(x), b(y))`
/// and `labeled(a(y), b(x))` lie on one ray, so each unordered pair of
/// components carries `w = 1/√2`; otherwise `w = 1`.
pub fn couple_total_spin(
    a: &ParticleSpec,
    b: &ParticleSpec,
    total: HalfSpin,
    m_total: HalfSpin,
    frame: &Rotor,
    sign: i8,
    hint: Option<&Vec3>,
) -> Result<TwoParticleState> {
    if a.basis != Basis::Canonical || b.basis != Basis::Canonical {
        return Err(domain("coupling needs both spins quantized in the common frame (canonical basis)"));
    }
    if a.s != b.s {
        return Err(domain(format!("coupling needs equal spins, got {} and {}", a.s, b.s)));
    }
    total.check_component(m_total)?;
    let shared = a.q == b.q && (a.p - b.p).amax() <= crate::states::MOMENTUM_TOL;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = TwoParticleState::zero();
    for ma in a.s.components() {
        for mb in b.s.components() {
            let c = cg(&CGQuery::new(a.s, b.s, total, ma, mb, m_total))?;
            if c == 0.0 {
                continue;
            }
            let w = if shared && ma != mb { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
            let state = labeled_common_frame_state(&a.with_quantum(ma), &b.with_quantum(mb), frame, sign, hint)?;
            acc = acc.combine(one, &state, Complex64::new(c * w, 0.0));
        }
    }
    Ok(acc)
}

/// Coupled-state norms for one total spin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExclusionRow {
    pub total: HalfSpin,
    /// Largest norm over `M`.
    pub norm: f64,
    /// Smallest norm over `M`.
    pub min_norm: f64,
    pub allowed: bool,
}

/// A unit vector perpendicular to `p`.
pub fn perpendicular_to(p: &Vec3) -> Result<Vec3> {
    let n = p.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(domain("momentum must be nonzero and finite"));
    }
    let u = p / n;
    let axis = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Vec3::x()
    } else if u.y.abs() <= u.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    Ok((axis - u * u.dot(&axis)).normalize())
}

/// [`exclusion_report_with`] in the lab frame with `sign = +1`.
pub fn exclusion_report(q: &QuantumNumbers, p: &Vec3, s: HalfSpin) -> Result<Vec<ExclusionRow>> {
    exclusion_report_with(q, p, s, &Rotor::IDENTITY, 1, &perpendicular_to(p)?)
}

/// Couples two identical particles to every total spin `S = 0..=2s` and
/// reports the norm range over `M`. `hint` fixes the azimuth of the
/// coincident-momentum frames.
pub fn exclusion_report_with(
    q: &QuantumNumbers,
    p: &Vec3,
    s: HalfSpin,
    frame: &Rotor,
    sign: i8,
    hint: &Vec3,
) -> Result<Vec<ExclusionRow>> {
    HalfSpin::spin(s.twice())?;
    let spec = ParticleSpec::canonical(q.clone(), *p, s, s)?;
    let mut rows = Vec::new();
    for twice_total in (0..=2 * s.twice()).step_by(2) {
        let total = HalfSpin::from_twice(twice_total);
        let mut norm = 0.0_f64;
        let mut min_norm = f64::INFINITY;
        for m in total.components() {
            let n = couple_total_spin(&spec, &spec, total, m, frame, sign, Some(hint))?.norm();
            norm = norm.max(n);
            min_norm = min_norm.min(n);
        }
        rows.push(ExclusionRow { total, norm, min_norm, allowed: norm >= EXCLUSION_TOL });
    }
    Ok(rows)
}
