//! Spin-s representation matrices of SU(2).
//!
//! [`dmatrix`] builds `D^s(R)` from the action of the 2×2 fundamental matrix
//! on homogeneous polynomials of degree `2s`. The construction is a genuine
//! representation of SU(2), so the 2π rotor maps to `(-1)^{2s}·I` with no
//! Euler-angle bookkeeping. [`little_d`] is the textbook factorial sum and is
//! kept as an independent cross-check.

use nalgebra::DMatrix as Matrix;
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::halfspin::{HalfSpin, MAX_TWICE_SPIN};
use crate::rotor::Rotor;

pub type CMatrix = Matrix<Complex64>;

/// Factorials `0!..=MAX_TWICE_SPIN!` and a little beyond, as floats.
pub(crate) fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

fn binomial(n: i32, k: i32) -> f64 {
    if k < 0 || k > n {
        0.0
    } else {
        factorial(n) / (factorial(k) * factorial(n - k))
    }
}

/// `D^s(R)` with rows `m'` and columns `m` ordered `s, s-1, ..., -s`.
#[derive(Clone, Debug, PartialEq)]
pub struct DMatrix {
    spin: HalfSpin,
    entries: CMatrix,
}

impl DMatrix {
    pub fn spin(&self) -> HalfSpin {
        self.spin
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Element `D^s_{m' m}`.
    pub fn get(&self, m_row: HalfSpin, m_col: HalfSpin) -> Complex64 {
        self.entries[(self.spin.index_of(m_row), self.spin.index_of(m_col))]
    }

    pub fn identity(spin: HalfSpin) -> Self {
        DMatrix { spin, entries: CMatrix::identity(spin.dim(), spin.dim()) }
    }

    pub fn mul(&self, other: &DMatrix) -> DMatrix {
        assert_eq!(self.spin, other.spin, "spin mismatch in D-matrix product");
        DMatrix { spin: self.spin, entries: &self.entries * &other.entries }
    }

    pub fn adjoint(&self) -> DMatrix {
        DMatrix { spin: self.spin, entries: self.entries.adjoint() }
    }

    pub fn scale(&self, c: Complex64) -> DMatrix {
        DMatrix { spin: self.spin, entries: self.entries.map(|e| e * c) }
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries.clone().determinant()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DMatrix) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// `max |(D†D - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&DMatrix::identity(self.spin))
    }
}

/// The spin-½ matrix of `r`, in the basis `(+½, -½)`.
pub fn fundamental(r: &Rotor) -> [[Complex64; 2]; 2] {
    let c = Complex64::new;
    [[c(r.w, -r.z), c(-r.y, -r.x)], [c(r.y, -r.x), c(r.w, r.z)]]
}

/// `D^s(r)` by the symmetric tensor-power construction.
pub fn dmatrix(s: HalfSpin, r: &Rotor) -> Result<DMatrix> {
    let n = s.twice();
    if n < 0 {
        return Err(domain(format!("negative spin 2s = {n}")));
    }
    if n > MAX_TWICE_SPIN {
        return Err(domain(format!("2s = {n} exceeds the supported maximum {MAX_TWICE_SPIN}")));
    }
    let [[u11, u12], [u21, u22]] = fundamental(r);
    let dim = s.dim();
    let mut entries = CMatrix::zeros(dim, dim);
    // Column m: the monomial u^{s+m} v^{s-m}, with u ↦ u11 u + u21 v and
    // v ↦ u12 u + u22 v, re-expanded in the normalized monomials.
    for col in 0..dim {
        let a = n - col as i32;
        let b = n - a;
        for row in 0..dim {
            let a_out = n - row as i32;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=a {
                let l = a_out - k;
                if l < 0 || l > b {
                    continue;
                }
                let coeff = binomial(a, k) * binomial(b, l);
                acc += u11.powu(k as u32)
                    * u21.powu((a - k) as u32)
                    * u12.powu(l as u32)
                    * u22.powu((b - l) as u32)
                    * coeff;
            }
            let norm = (factorial(a_out) * factorial(n - a_out) / (factorial(a) * factorial(b))).sqrt();
            entries[(row, col)] = acc * norm;
        }
    }
    Ok(DMatrix { spin: s, entries })
}

/// Wigner small-d `d^s_{m' m}(β)` from the factorial sum.
pub fn little_d(s: HalfSpin, m_row: HalfSpin, m_col: HalfSpin, beta: f64) -> Result<f64> {
    if s.twice() > MAX_TWICE_SPIN {
        return Err(domain(format!("2s = {} exceeds the supported maximum", s.twice())));
    }
    s.check_component(m_row)?;
    s.check_component(m_col)?;
    // Everything in integers: j+m etc. are whole numbers once the parities agree.
    let jpm = (s.twice() + m_col.twice()) / 2;
    let jmm = (s.twice() - m_col.twice()) / 2;
    let jpmp = (s.twice() + m_row.twice()) / 2;
    let jmmp = (s.twice() - m_row.twice()) / 2;
    let dm = (m_row.twice() - m_col.twice()) / 2;
    let pre = (factorial(jpm) * factorial(jmm) * factorial(jpmp) * factorial(jmmp)).sqrt();
    let (sn, cs) = (beta / 2.0).sin_cos();
    let k_min = 0.max(-dm);
    let k_max = jpm.min(jmmp);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let sign = if (k + dm) % 2 == 0 { 1.0 } else { -1.0 };
        let denom = factorial(jpm - k) * factorial(k) * factorial(jmmp - k) * factorial(k + dm);
        let cos_pow = s.twice() - 2 * k - dm;
        let sin_pow = 2 * k + dm;
        sum += sign * cs.powi(cos_pow) * sn.powi(sin_pow) / denom;
    }
    Ok(pre * sum)
}
