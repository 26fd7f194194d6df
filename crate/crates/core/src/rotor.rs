//! SU(2) rotations as unit quaternions.
//!
//! A [`Rotor`] keeps its sign: `(-1, 0, 0, 0)` is the 2π rotation and is a
//! different value from the identity, even though both act identically on
//! 3-vectors.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance on unit length for axes and rotors.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 4]", from = "[f64; 4]")]
pub struct Rotor {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<Rotor> for [f64; 4] {
    fn from(r: Rotor) -> Self {
        [r.w, r.x, r.y, r.z]
    }
}

impl From<[f64; 4]> for Rotor {
    fn from(c: [f64; 4]) -> Self {
        Rotor::normalized(c[0], c[1], c[2], c[3])
    }
}

impl Rotor {
    pub const IDENTITY: Rotor = Rotor { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    /// The 2π rotation about any axis.
    pub const MINUS_IDENTITY: Rotor = Rotor { w: -1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Builds a rotor from components that must already be unit length.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = w * w + x * x + y * y + z * z;
        if (n2 - 1.0).abs() > UNIT_TOL || !n2.is_finite() {
            return Err(domain(format!("rotor norm^2 = {n2} is not 1")));
        }
        Ok(Rotor { w, x, y, z })
    }

    /// Builds a rotor by normalizing arbitrary nonzero components.
    pub fn normalized(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Rotor { w: w / n, x: x / n, y: y / n, z: z / n }
    }

    /// Rotation by `angle` radians about `axis`. The angle is used as given:
    /// `2π` yields `(-1, 0, 0, 0)`, not the identity.
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(domain(format!("rotation axis has length {n}, expected 1")));
        }
        if !angle.is_finite() {
            return Err(domain("rotation angle is not finite"));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Ok(Rotor { w: c, x: s * axis.x, y: s * axis.y, z: s * axis.z })
    }

    /// Rotation about a coordinate axis; `axis` is 0, 1 or 2.
    pub fn about_coordinate_axis(axis: usize, angle: f64) -> Self {
        let mut e = Vec3::zeros();
        e[axis] = 1.0;
        Rotor::from_axis_angle(&e, angle).expect("coordinate axes are unit")
    }

    /// Quaternion product `self · other`, renormalized.
    pub fn compose(&self, other: &Rotor) -> Rotor {
        let (a, b, c, d) = (self.w, self.x, self.y, self.z);
        let (e, f, g, h) = (other.w, other.x, other.y, other.z);
        Rotor::normalized(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )
    }

    pub fn inverse(&self) -> Rotor {
        Rotor { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn negate(&self) -> Rotor {
        Rotor { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn vector_part(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    /// SO(3) action `q v q⁻¹`.
    pub fn rotate_vector(&self, v: &Vec3) -> Vec3 {
        let u = self.vector_part();
        let t = 2.0 * u.cross(v);
        v + self.w * t + u.cross(&t)
    }

    /// The SO(3) matrix; columns are the images of the coordinate axes.
    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[
            self.rotate_vector(&Vec3::x()),
            self.rotate_vector(&Vec3::y()),
            self.rotate_vector(&Vec3::z()),
        ])
    }

    /// One of the two rotors projecting onto the rotation matrix `m`
    /// (Shepperd's method; picks the largest diagonal pivot).
    pub fn from_matrix(m: &Matrix3<f64>) -> Rotor {
        let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        if tr >= m[(0, 0)] && tr >= m[(1, 1)] && tr >= m[(2, 2)] {
            let w = 0.5 * (1.0 + tr).sqrt();
            let f = 0.25 / w;
            Rotor::normalized(
                w,
                (m[(2, 1)] - m[(1, 2)]) * f,
                (m[(0, 2)] - m[(2, 0)]) * f,
                (m[(1, 0)] - m[(0, 1)]) * f,
            )
        } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
            let x = 0.5 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            let f = 0.25 / x;
            Rotor::normalized(
                (m[(2, 1)] - m[(1, 2)]) * f,
                x,
                (m[(0, 1)] + m[(1, 0)]) * f,
                (m[(0, 2)] + m[(2, 0)]) * f,
            )
        } else if m[(1, 1)] >= m[(2, 2)] {
            let y = 0.5 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
            let f = 0.25 / y;
            Rotor::normalized(
                (m[(0, 2)] - m[(2, 0)]) * f,
                (m[(0, 1)] + m[(1, 0)]) * f,
                y,
                (m[(1, 2)] + m[(2, 1)]) * f,
            )
        } else {
            let z = 0.5 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
            let f = 0.25 / z;
            Rotor::normalized(
                (m[(1, 0)] - m[(0, 1)]) * f,
                (m[(0, 2)] + m[(2, 0)]) * f,
                (m[(1, 2)] + m[(2, 1)]) * f,
                z,
            )
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Largest component difference; distinguishes `r` from `-r`.
    pub fn max_abs_diff(&self, other: &Rotor) -> f64 {
        [self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z]
            .iter()
            .fold(0.0_f64, |acc, d| acc.max(d.abs()))
    }

    /// Whether both rotors project onto the same SO(3) rotation.
    pub fn same_rotation(&self, other: &Rotor, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol || self.max_abs_diff(&other.negate()) <= tol
    }

    pub fn components(&self) -> [f64; 4] {
        (*self).into()
    }
}

impl std::ops::Mul for Rotor {
    type Output = Rotor;
    fn mul(self, rhs: Rotor) -> Rotor {
        self.compose(&rhs)
    }
}

/// Free-function form of [`Rotor::from_axis_angle`].
pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Result<Rotor> {
    Rotor::from_axis_angle(axis, angle)
}

pub fn compose(a: &Rotor, b: &Rotor) -> Rotor {
    a.compose(b)
}

pub fn inverse(r: &Rotor) -> Rotor {
    r.inverse()
}

pub fn rotate_vector(r: &Rotor, v: &Vec3) -> Vec3 {
    r.rotate_vector(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn z() -> Vec3 {
        Vec3::z()
    }

    #[test]
    fn axis_angle_cases() {
        assert_eq!(Rotor::from_axis_angle(&z(), 0.0).unwrap(), Rotor::IDENTITY);
        let two_pi = Rotor::from_axis_angle(&z(), 2.0 * PI).unwrap();
        assert!(two_pi.max_abs_diff(&Rotor::MINUS_IDENTITY) < 1e-15);
        let half = Rotor::from_axis_angle(&z(), PI).unwrap();
        assert!(half.compose(&half).max_abs_diff(&Rotor::MINUS_IDENTITY) < 1e-15);
        assert!(Rotor::from_axis_angle(&Vec3::new(1.0, 1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(Rotor::IDENTITY.inverse(), Rotor::IDENTITY);
        let plus = Rotor::from_axis_angle(&z(), PI).unwrap();
        let minus = Rotor::from_axis_angle(&z(), -PI).unwrap();
        assert!(plus.inverse().max_abs_diff(&minus) < 1e-15);
        assert_eq!(Rotor::MINUS_IDENTITY.inverse(), Rotor::MINUS_IDENTITY);
        let r = Rotor::normalized(0.3, -0.2, 0.9, 0.1);
        assert!(r.compose(&r.inverse()).max_abs_diff(&Rotor::IDENTITY) < 1e-15);
        assert_eq!(Rotor::IDENTITY.compose(&r), r);
    }

    #[test]
    fn rotate_vector_cases() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(Rotor::IDENTITY.rotate_vector(&v), v);
        let quarter = Rotor::from_axis_angle(&z(), FRAC_PI_2).unwrap();
        assert_relative_eq!(quarter.rotate_vector(&Vec3::x()), Vec3::y(), epsilon = 1e-15);
        assert_eq!(Rotor::MINUS_IDENTITY.rotate_vector(&v), v);
    }

    #[test]
    fn new_rejects_non_unit() {
        assert!(Rotor::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(Rotor::new(0.0, 0.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn matrix_round_trip_up_to_sign() {
        let r = Rotor::normalized(-0.1, 0.7, -0.3, 0.5);
        let back = Rotor::from_matrix(&r.to_matrix());
        assert!(back.same_rotation(&r, 1e-14));
        for axis in 0..3 {
            let half = Rotor::about_coordinate_axis(axis, PI);
            assert!(Rotor::from_matrix(&half.to_matrix()).same_rotation(&half, 1e-14));
        }
    }

    fn arb_rotor() -> impl Strategy<Value = Rotor> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
            .prop_map(|(a, b, c, d)| Rotor::normalized(a, b, c, d))
    }

    fn arb_axis() -> impl Strategy<Value = Vec3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-3)
            .prop_map(|(a, b, c)| Vec3::new(a, b, c).normalize())
    }

    proptest! {
        #[test]
        fn homomorphism(a in arb_rotor(), b in arb_rotor(), v in arb_axis()) {
            let lhs = a.compose(&b).rotate_vector(&v);
            let rhs = a.rotate_vector(&b.rotate_vector(&v));
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }

        #[test]
        fn double_cover(n in arb_axis(), theta in -20.0..20.0f64) {
            let r = Rotor::from_axis_angle(&n, theta).unwrap();
            let r2 = Rotor::from_axis_angle(&n, theta + 2.0 * PI).unwrap();
            prop_assert!(r2.max_abs_diff(&r.negate()) < 1e-12);
        }

        #[test]
        fn compose_preserves_norm_and_associates(a in arb_rotor(), b in arb_rotor(), c in arb_rotor()) {
            let ab = a.compose(&b);
            prop_assert!((ab.norm_squared() - 1.0).abs() < 1e-12);
            prop_assert!(ab.compose(&c).max_abs_diff(&a.compose(&b.compose(&c))) < 1e-12);
        }

        #[test]
        fn sign_invisible_to_so3(r in arb_rotor(), v in arb_axis()) {
            prop_assert!((r.rotate_vector(&v) - r.negate().rotate_vector(&v)).norm() < 1e-14);
        }
    }
}
