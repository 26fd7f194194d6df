//! Independent reference computations used by the test suites and by the
//! `verify` command. None of them share code paths with the fast routines
//! they check.

use std::collections::BTreeSet;

use nalgebra::{DMatrix as RMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::halfspin::HalfSpin;
use crate::rotor::Rotor;
use crate::wigner::{little_d, CMatrix};

/// Basis positions and `m1` labels of a fixed-`M` subspace, with the
/// matching eigenvector.
type Subspace = (Vec<(usize, HalfSpin)>, Vec<f64>);

/// Number of multisets of size `n` over `k` states, by enumerating all `k^n`
/// ordered tuples and collapsing them.
pub fn multiset_count_bruteforce(n: u32, k: u32) -> u64 {
    let mut seen = BTreeSet::new();
    let total = u64::from(k).pow(n);
    for code in 0..total {
        let mut occupation = vec![0u32; k as usize];
        let mut c = code;
        for _ in 0..n {
            occupation[(c % u64::from(k)) as usize] += 1;
            c /= u64::from(k);
        }
        seen.insert(occupation);
    }
    seen.len() as u64
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// ZYZ Euler angles `(α, β, γ)` with `R_z(α)·R_y(β)·R_z(γ) = r` in SU(2),
/// sign included.
pub fn euler_zyz(r: &Rotor) -> (f64, f64, f64) {
    let sum = 2.0 * r.z.atan2(r.w);
    let diff = 2.0 * (-r.x).atan2(r.y);
    let beta = 2.0 * (r.x.hypot(r.y)).atan2(r.w.hypot(r.z));
    ((sum + diff) / 2.0, beta, (sum - diff) / 2.0)
}

/// `D^s(r)` from Euler angles and the factorial-sum `d` matrix.
pub fn dmatrix_euler(s: HalfSpin, r: &Rotor) -> Result<CMatrix> {
    let (alpha, beta, gamma) = euler_zyz(r);
    let comps: Vec<HalfSpin> = s.components().collect();
    let mut out = CMatrix::zeros(comps.len(), comps.len());
    for (i, &mp) in comps.iter().enumerate() {
        for (j, &m) in comps.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -(mp.value() * alpha + m.value() * gamma));
            out[(i, j)] = phase * little_d(s, mp, m, beta)?;
        }
    }
    Ok(out)
}

/// `(J_z, J_+)` for spin `s` from the ladder formula, rows and columns
/// ordered `s..=-s`.
pub fn angular_momentum(s: HalfSpin) -> (RMatrix<f64>, RMatrix<f64>) {
    let d = s.dim();
    let j = s.value();
    let mut jz = RMatrix::zeros(d, d);
    let mut jp = RMatrix::zeros(d, d);
    for (i, m) in s.components().enumerate() {
        let m = m.value();
        jz[(i, i)] = m;
        if i > 0 {
            jp[(i - 1, i)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    (jz, jp)
}

/// `(J_x, J_y, J_z)` from central differences of `dmatrix` about the
/// coordinate axes: `J_k = i·dD(R_k(t))/dt` at `t = 0`.
pub fn generators_from_dmatrix(s: HalfSpin, step: f64) -> Result<[CMatrix; 3]> {
    let i = Complex64::new(0.0, 1.0);
    let mut out: [CMatrix; 3] = std::array::from_fn(|_| CMatrix::zeros(s.dim(), s.dim()));
    for (axis, slot) in out.iter_mut().enumerate() {
        let plus = crate::wigner::dmatrix(s, &Rotor::about_coordinate_axis(axis, step))?;
        let minus = crate::wigner::dmatrix(s, &Rotor::about_coordinate_axis(axis, -step))?;
        *slot = (plus.entries() - minus.entries()) * (i / (2.0 * step));
    }
    Ok(out)
}

/// CG coefficients `⟨s1 m1; s2 m2 | S M⟩` for one `(S, M)`, indexed by
/// `m1` in descending order (`m2 = M - m1`), from the eigenvector of the
/// total-spin-squared matrix on the fixed-`M` subspace. The Condon–Shortley
/// sign is fixed on the stretched state `M = S` and carried down with `J_-`.
pub fn cg_by_diagonalization(s1: HalfSpin, s2: HalfSpin, total: HalfSpin, m_total: HalfSpin) -> Result<Vec<(HalfSpin, f64)>> {
    let (a, b, c) = (s1.twice(), s2.twice(), total.twice());
    if c < (a - b).abs() || c > a + b || (a + b + c) % 2 != 0 {
        return Err(domain("total spin outside the triangle"));
    }
    total.check_component(m_total)?;
    let (jz1, jp1) = angular_momentum(s1);
    let (jz2, jp2) = angular_momentum(s2);
    let (d1, d2) = (s1.dim(), s2.dim());
    let id1 = RMatrix::<f64>::identity(d1, d1);
    let id2 = RMatrix::<f64>::identity(d2, d2);
    let jz = jz1.kronecker(&id2) + id1.kronecker(&jz2);
    let jp = jp1.kronecker(&id2) + id1.kronecker(&jp2);
    let jm = jp.transpose();
    let j2 = &jz * &jz + (&jp * &jm + &jm * &jp) * 0.5;

    let m1s: Vec<HalfSpin> = s1.components().collect();
    let m2s: Vec<HalfSpin> = s2.components().collect();
    let target = total.value() * (total.value() + 1.0);
    let eigenvector_at = |m: HalfSpin| -> Vec<(usize, HalfSpin)> {
        let mut idx = Vec::new();
        for (i, &m1) in m1s.iter().enumerate() {
            for (j, &m2) in m2s.iter().enumerate() {
                if m1.twice() + m2.twice() == m.twice() {
                    idx.push((i * d2 + j, m1));
                }
            }
        }
        idx
    };
    let solve = |m: HalfSpin| -> Result<Subspace> {
        let idx = eigenvector_at(m);
        let sub = RMatrix::from_fn(idx.len(), idx.len(), |r, c| j2[(idx[r].0, idx[c].0)]);
        let eig = SymmetricEigen::new(sub);
        let (col, gap) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, v)| (k, (v - target).abs()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or_else(|| domain("empty subspace"))?;
        if gap > 1e-8 {
            return Err(domain("no eigenvalue S(S+1) in the fixed-M subspace"));
        }
        Ok((idx, eig.eigenvectors.column(col).iter().copied().collect()))
    };

    // Stretched state: the m1 = s1 component is positive.
    let (idx_top, mut top) = solve(total)?;
    if top[0] < 0.0 {
        top.iter_mut().for_each(|v| *v = -*v);
    }
    let mut full = nalgebra::DVector::<f64>::zeros(d1 * d2);
    for ((k, _), v) in idx_top.iter().zip(&top) {
        full[*k] = *v;
    }
    let mut m = total;
    while m != m_total {
        full = &jm * full;
        full /= full.norm();
        m = HalfSpin::from_twice(m.twice() - 2);
    }

    let (idx, mut vec) = solve(m_total)?;
    let overlap: f64 = idx.iter().zip(&vec).map(|((k, _), v)| full[*k] * v).sum();
    if overlap < 0.0 {
        vec.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(idx.into_iter().map(|(_, m1)| m1).zip(vec).collect())
}
