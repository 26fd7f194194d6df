//! Values checked against references computed here, independently of the
//! library's own algorithms.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use spinstat_core::coupling::{cg, CGQuery};
use spinstat_core::oracle::{angular_momentum, cg_by_diagonalization, multiset_count_bruteforce};
use spinstat_core::twoparticle::pair_phase_ratio;
use spinstat_core::*;

fn h(t: i32) -> HalfSpin {
    HalfSpin::from_twice(t)
}

/// `exp(-iαJ_z)` for a diagonal `J_z`, entry by entry.
fn jz_phase(s: HalfSpin, m: HalfSpin, alpha: f64) -> Complex64 {
    let (jz, _) = angular_momentum(s);
    let i = s.index_of(m);
    Complex64::from_polar(1.0, -alpha * jz[(i, i)])
}

#[test]
fn spin_one_half_turn_about_z() {
    let d = dmatrix(HalfSpin::ONE, &Rotor::about_coordinate_axis(2, PI)).unwrap();
    for (i, m) in HalfSpin::ONE.components().enumerate() {
        for (j, mp) in HalfSpin::ONE.components().enumerate() {
            let want = if i == j { jz_phase(HalfSpin::ONE, m, PI) } else { Complex64::new(0.0, 0.0) };
            assert_abs_diff_eq!(d.get(m, mp).re, want.re, epsilon = 1e-15);
            assert_abs_diff_eq!(d.get(m, mp).im, want.im, epsilon = 1e-15);
        }
    }
    assert_abs_diff_eq!(d.get(h(2), h(2)).re, -1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(d.get(h(0), h(0)).re, 1.0, epsilon = 1e-15);
}

#[test]
fn little_d_closed_forms() {
    for beta in [0.1, 0.9, 2.0, 3.0] {
        assert_abs_diff_eq!(little_d(h(1), h(1), h(1), beta).unwrap(), (beta / 2.0).cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(little_d(h(2), h(0), h(0), beta).unwrap(), beta.cos(), epsilon = 1e-14);
    }
}

#[test]
fn frames_of_x_and_y() {
    let (fa, fb) = parallel_frames(&Vec3::x(), &Vec3::y()).unwrap();
    assert_abs_diff_eq!((fa.z - Vec3::x()).amax(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!((fa.y - Vec3::z()).amax(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!((fb.y + Vec3::z()).amax(), 0.0, epsilon = 1e-15);
    let (ba, bb) = bisecting_frames(&Vec3::x(), &Vec3::y()).unwrap();
    let k = Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt();
    assert_abs_diff_eq!((ba.z - k).amax(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!((bb.z - k).amax(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!((ba.y + bb.y).amax(), 0.0, epsilon = 1e-15);
}

#[test]
fn bisecting_limit_matches_small_angle() {
    let v = Vec3::new(0.0, 0.6, 0.8);
    let u = Vec3::x();
    let eps: f64 = 1e-8;
    let v2 = v * eps.cos() + u * eps.sin();
    let hint = v.cross(&v2).normalize();
    let (la, lb) = limit_frames(&v, &hint).unwrap();
    let (ba, bb) = bisecting_frames(&v, &v2).unwrap();
    assert!(la.max_abs_diff(&ba) < 1e-6);
    assert!(lb.max_abs_diff(&bb) < 1e-6);
}

#[test]
fn relating_rotor_maps_a_to_b() {
    let (a, b) = (Vec3::new(0.48, 0.6, 0.64), Vec3::new(-0.36, 0.0, 0.933_380_951_166_240_9).normalize());
    let g = pair_geometry(&a, &b).unwrap();
    for sign in [1, -1] {
        let r = relating_rotor(&g, sign).unwrap();
        assert!((r.rotate_vector(&a) - b).amax() < 1e-10);
    }
}

#[test]
fn ket_in_quarter_turn_frame() {
    let k = make_ket(&QuantumNumbers::none(), &Vec3::z(), h(1), h(1), &Rotor::about_coordinate_axis(1, FRAC_PI_2)).unwrap();
    let label = |m| KetLabel { q: QuantumNumbers::none(), p: Vec3::z(), s: h(1), m };
    assert_abs_diff_eq!(k.amplitude(&label(h(1))).re, (PI / 4.0).cos(), epsilon = 1e-15);
    assert_abs_diff_eq!(k.amplitude(&label(h(-1))).re, (PI / 4.0).sin(), epsilon = 1e-15);
}

#[test]
fn rotation_about_z_is_a_phase() {
    let q = QuantumNumbers::none();
    let p = Vec3::new(0.2, -0.1, 0.7);
    let alpha = 1.234;
    let r = Rotor::about_coordinate_axis(2, alpha);
    for twice in 0..=4 {
        let s = h(twice);
        for m in s.components() {
            let u = canonical_ket(&q, &p, s, m).unwrap();
            let moved = apply_rotation(&r, &u).unwrap();
            // Momentum moves with the rotation, so compare spin content only.
            let moved_back = spinstat_core::states::boost(&p, &moved).unwrap();
            let f = inner_product(&u, &moved_back);
            let want = jz_phase(s, m, alpha);
            assert_abs_diff_eq!((f - want).norm(), 0.0, epsilon = 1e-14);
            let same_p = apply_rotation(&r, &canonical_ket(&q, &Vec3::z(), s, m).unwrap()).unwrap();
            let g = inner_product(&canonical_ket(&q, &Vec3::z(), s, m).unwrap(), &same_p);
            assert_abs_diff_eq!((g - want).norm(), 0.0, epsilon = 1e-14);
        }
    }
}

#[test]
fn equal_momenta_with_hint_match_small_angle() {
    let q = QuantumNumbers::none();
    let p = Vec3::new(0.0, 0.0, 1.5);
    let eps: f64 = 1e-8;
    let p2 = Vec3::new(1.5 * eps.sin(), 0.0, 1.5 * eps.cos());
    let hint = Vec3::y();
    let a = ParticleSpec::canonical(q.clone(), p, h(1), h(1)).unwrap();
    let b = ParticleSpec::canonical(q.clone(), p, h(1), h(-1)).unwrap();
    let f = Rotor::normalized(0.4, 0.1, -0.3, 0.2);
    let limit = labeled_common_frame_state(&a, &b, &f, 1, Some(&hint)).unwrap();
    let near = labeled_common_frame_state(&a, &ParticleSpec { p: p2, ..b.clone() }, &f, 1, None).unwrap();
    // Both states are built from the same kets up to O(ε); compare their
    // single-particle content.
    let (ml, mn) = (limit.meta().unwrap(), near.meta().unwrap());
    assert!(ml.chain1.max_abs_diff(&mn.chain1) < 1e-6);
    assert!(ml.chain2.max_abs_diff(&mn.chain2) < 1e-6);
    assert!((exchange_phase(&limit).unwrap().phase + 1.0).norm() < 1e-10);
    assert!((pair_phase_ratio(&limit, &limit).unwrap() - 1.0).norm() < 1e-12);
}

#[test]
fn order_free_counts_match_binomials() {
    assert_eq!(enumerate_order_free(3, 2).unwrap().count, 4);
    for n in 1..=5u32 {
        for k in 1..=4u32 {
            let binom = (1..=u64::from(n)).fold(1u64, |acc, i| acc * (u64::from(k) - 1 + i) / i);
            assert_eq!(enumerate_order_free(n, k).unwrap().count, binom);
            assert_eq!(multiset_count_bruteforce(n, k), binom);
        }
    }
}

#[test]
fn singlet_coefficients() {
    let q = |m1: i32, m2: i32| CGQuery::new(h(1), h(1), h(0), h(m1), h(m2), h(0));
    let oracle = cg_by_diagonalization(h(1), h(1), h(0), h(0)).unwrap();
    assert_eq!(oracle.len(), 2);
    assert_abs_diff_eq!(cg(&q(1, -1)).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-15);
    assert_abs_diff_eq!(cg(&q(-1, 1)).unwrap(), -FRAC_1_SQRT_2, epsilon = 1e-15);
    for (m1, c) in oracle {
        assert_abs_diff_eq!(cg(&q(m1.twice(), -m1.twice())).unwrap(), c, epsilon = 1e-12);
    }
}
