//! Symmetrically defined frames for a pair of unit vectors.
//!
//! For vectors `v_a`, `v_b` the bisector `k` is shared, while each particle's
//! y-axis is `v_current × v_other`. The two y-axes are opposite, so no common
//! frame treats the particles alike; the frames are related by a rotation of
//! `±π` about `k`, and the two signs are different rotors.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rotor::{Rotor, Vec3};

/// `|v_a × v_b|` below which the pair counts as coincident or antiparallel.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Tolerance on the length of input unit vectors.
pub const INPUT_UNIT_TOL: f64 = 1e-10;

/// Right-handed orthonormal triad.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub x: Vec3,
    pub y: Vec3,
    pub z: Vec3,
}

impl Frame {
    pub const LAB: Frame = Frame {
        x: Vec3::new(1.0, 0.0, 0.0),
        y: Vec3::new(0.0, 1.0, 0.0),
        z: Vec3::new(0.0, 0.0, 1.0),
    };

    fn from_yz(y: Vec3, z: Vec3) -> Frame {
        Frame { x: y.cross(&z), y, z }
    }

    /// The frame obtained by rotating the lab axes with `r`.
    pub fn from_rotor(r: &Rotor) -> Frame {
        Frame {
            x: r.rotate_vector(&Vec3::x()),
            y: r.rotate_vector(&Vec3::y()),
            z: r.rotate_vector(&Vec3::z()),
        }
    }

    /// A rotor whose SO(3) image carries the lab axes onto this frame,
    /// taken with non-negative scalar part. The sign is a convention of the
    /// lift, applied identically to every frame.
    pub fn lift(&self) -> Rotor {
        let m = nalgebra::Matrix3::from_columns(&[self.x, self.y, self.z]);
        let r = Rotor::from_matrix(&m);
        if r.w < 0.0 {
            r.negate()
        } else {
            r
        }
    }

    /// Components of a lab vector in this frame.
    pub fn local(&self, v: &Vec3) -> Vec3 {
        Vec3::new(self.x.dot(v), self.y.dot(v), self.z.dot(v))
    }

    /// Worst deviation from a right-handed orthonormal triad.
    pub fn orthonormality_defect(&self) -> f64 {
        let axes = [self.x, self.y, self.z];
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((axes[i].dot(&axes[j]) - want).abs());
            }
        }
        worst.max((self.x.cross(&self.y) - self.z).amax())
    }

    pub fn max_abs_diff(&self, other: &Frame) -> f64 {
        (self.x - other.x).amax().max((self.y - other.y).amax()).max((self.z - other.z).amax())
    }

    pub fn rotated(&self, r: &Rotor) -> Frame {
        Frame {
            x: r.rotate_vector(&self.x),
            y: r.rotate_vector(&self.y),
            z: r.rotate_vector(&self.z),
        }
    }
}

/// Bisector and half-angle of a pair of unit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    pub v_a: Vec3,
    pub v_b: Vec3,
    pub k: Vec3,
    /// Angle between each vector and `k`, in `[0, π/2)`.
    pub theta: f64,
}

fn check_unit(v: &Vec3, what: &str) -> Result<()> {
    let n = v.norm();
    if !n.is_finite() || (n - 1.0).abs() > INPUT_UNIT_TOL {
        return Err(domain(format!("{what} has length {n}, expected a unit vector")));
    }
    Ok(())
}

pub fn pair_geometry(v_a: &Vec3, v_b: &Vec3) -> Result<PairGeometry> {
    check_unit(v_a, "v_a")?;
    check_unit(v_b, "v_b")?;
    let cos = v_a.dot(v_b);
    let sum = v_a + v_b;
    if cos <= -1.0 + 1e-10 || sum.norm() == 0.0 {
        return Err(Error::DegenerateGeometry(
            "antiparallel vectors have no bisector".into(),
        ));
    }
    // atan2 keeps the half-angle accurate when the vectors nearly coincide,
    // where arccos of the dot product loses half its digits.
    let sin = v_a.cross(&(v_b - v_a)).norm();
    Ok(PairGeometry { v_a: *v_a, v_b: *v_b, k: sum.normalize(), theta: sin.atan2(cos) / 2.0 })
}

/// `(v_current × v_other)/|…|`, made orthogonal to `z`. The difference form
/// of the cross product stays accurate for nearly coincident vectors.
fn current_y(current: &Vec3, other: &Vec3, z: &Vec3) -> Result<Vec3> {
    let c = current.cross(&(other - current));
    let n = c.norm();
    if n <= DEGENERACY_TOL {
        return Err(Error::DegenerateGeometry(format!(
            "|v_a × v_b| = {n:.3e}: coincident or antiparallel vectors need an azimuth hint"
        )));
    }
    let y = c / n;
    Ok((y - z * y.dot(z)).normalize())
}

/// Each particle's z-axis along its own vector.
pub fn parallel_frames(v_a: &Vec3, v_b: &Vec3) -> Result<(Frame, Frame)> {
    pair_geometry(v_a, v_b)?;
    let y_a = current_y(v_a, v_b, v_a)?;
    let y_b = current_y(v_b, v_a, v_b)?;
    Ok((Frame::from_yz(y_a, *v_a), Frame::from_yz(y_b, *v_b)))
}

/// Both z-axes along the bisector `k`.
pub fn bisecting_frames(v_a: &Vec3, v_b: &Vec3) -> Result<(Frame, Frame)> {
    let g = pair_geometry(v_a, v_b)?;
    let y_a = current_y(v_a, v_b, &g.k)?;
    let y_b = current_y(v_b, v_a, &g.k)?;
    Ok((Frame::from_yz(y_a, g.k), Frame::from_yz(y_b, g.k)))
}

/// Bisecting frames in the limit `v_b → v_a = v`. `azimuth_hint` is the
/// limiting direction of `v_a × v_b`; the y-axes stay opposite.
pub fn limit_frames(v: &Vec3, azimuth_hint: &Vec3) -> Result<(Frame, Frame)> {
    check_unit(v, "v")?;
    check_unit(azimuth_hint, "azimuth hint")?;
    let overlap = v.dot(azimuth_hint);
    if overlap.abs() > 1e-10 {
        return Err(domain(format!(
            "azimuth hint is not perpendicular to v (dot = {overlap:.3e})"
        )));
    }
    let y = (azimuth_hint - v * overlap).normalize();
    Ok((Frame::from_yz(y, *v), Frame::from_yz(-y, *v)))
}

/// Bisecting frames, falling back to [`limit_frames`] when the vectors
/// coincide and a hint is available.
pub fn bisecting_frames_with_hint(
    v_a: &Vec3,
    v_b: &Vec3,
    hint: Option<&Vec3>,
) -> Result<(Frame, Frame)> {
    match bisecting_frames(v_a, v_b) {
        Err(Error::DegenerateGeometry(msg)) => {
            let g = pair_geometry(v_a, v_b)?;
            match hint {
                Some(h) if g.theta.abs() < 1e-9 => limit_frames(&g.k, h),
                _ => Err(Error::DegenerateGeometry(msg)),
            }
        }
        other => other,
    }
}

/// `R_ab = R_k(sign·π)`; `sign` must be `+1` or `-1`.
pub fn relating_rotor(g: &PairGeometry, sign: i8) -> Result<Rotor> {
    if sign != 1 && sign != -1 {
        return Err(domain(format!("rotation sign must be ±1, got {sign}")));
    }
    // Built directly so that the scalar part is exactly zero.
    let k = g.k * f64::from(sign);
    Ok(Rotor { w: 0.0, x: k.x, y: k.y, z: k.z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn geometry_cases() {
        let g = pair_geometry(&Vec3::x(), &Vec3::y()).unwrap();
        assert!((g.k - Vec3::new(1.0, 1.0, 0.0) / SQRT_2).amax() < 1e-15);
        assert!((g.theta - FRAC_PI_4).abs() < 1e-15);
        let g = pair_geometry(&Vec3::x(), &Vec3::x()).unwrap();
        assert_eq!(g.k, Vec3::x());
        assert_eq!(g.theta, 0.0);
        assert!(matches!(
            pair_geometry(&Vec3::x(), &-Vec3::x()),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(pair_geometry(&Vec3::new(2.0, 0.0, 0.0), &Vec3::y()).is_err());
    }

    #[test]
    fn parallel_frames_x_y() {
        let (a, b) = parallel_frames(&Vec3::x(), &Vec3::y()).unwrap();
        assert_eq!(a.z, Vec3::x());
        assert!((a.y - Vec3::z()).amax() < 1e-15);
        assert!((b.y + Vec3::z()).amax() < 1e-15);
        assert!(a.orthonormality_defect() < 1e-15 && b.orthonormality_defect() < 1e-15);
        assert!(parallel_frames(&Vec3::x(), &Vec3::x()).is_err());
    }

    #[test]
    fn bisecting_frames_x_y() {
        let (a, b) = bisecting_frames(&Vec3::x(), &Vec3::y()).unwrap();
        let k = Vec3::new(1.0, 1.0, 0.0) / SQRT_2;
        assert!((a.z - k).amax() < 1e-15 && (b.z - k).amax() < 1e-15);
        assert!((a.y + b.y).amax() < 1e-15);
        assert!(bisecting_frames(&Vec3::z(), &Vec3::z()).is_err());
    }

    #[test]
    fn limit_cases() {
        let (a, b) = limit_frames(&Vec3::z(), &Vec3::x()).unwrap();
        assert_eq!(a.y, Vec3::x());
        assert_eq!(b.y, -Vec3::x());
        assert!(a.orthonormality_defect() < 1e-15);
        assert!(limit_frames(&Vec3::z(), &Vec3::z()).is_err());
    }

    #[test]
    fn small_angle_bisecting_approaches_limit() {
        let v = Vec3::z();
        let eps: f64 = 1e-8;
        // v' reached from v along the geodesic towards x̂: v × v' points along ŷ.
        let v2 = Vec3::new(eps.sin(), 0.0, eps.cos());
        let (a, b) = bisecting_frames(&v, &v2).unwrap();
        let (la, lb) = limit_frames(&v, &Vec3::y()).unwrap();
        assert!(a.max_abs_diff(&la) < 1e-6);
        assert!(b.max_abs_diff(&lb) < 1e-6);
        let (a, b) = bisecting_frames_with_hint(&v, &v, Some(&Vec3::y())).unwrap();
        assert_eq!((a, b), (la, lb));
        assert!(bisecting_frames_with_hint(&v, &v, None).is_err());
    }

    #[test]
    fn relating_rotor_cases() {
        let g = pair_geometry(&Vec3::x(), &Vec3::y()).unwrap();
        let plus = relating_rotor(&g, 1).unwrap();
        assert!((plus.rotate_vector(&g.v_a) - g.v_b).amax() < 1e-15);
        assert!(plus.compose(&plus).max_abs_diff(&Rotor::MINUS_IDENTITY) < 1e-15);
        assert!(plus.compose(&plus.inverse()).max_abs_diff(&Rotor::IDENTITY) < 1e-15);
        let minus = relating_rotor(&g, -1).unwrap();
        assert!(plus.max_abs_diff(&minus) > 1.0);
        assert!(minus.max_abs_diff(&plus.inverse()) < 1e-15);
        assert!(relating_rotor(&g, 0).is_err());
        let (fa, fb) = bisecting_frames(&g.v_a, &g.v_b).unwrap();
        assert!(fa.rotated(&plus).max_abs_diff(&fb) < 1e-15);
        assert!(fa.rotated(&minus).max_abs_diff(&fb) < 1e-15);
    }

    #[test]
    fn lift_projects_onto_frame() {
        let (a, _) = bisecting_frames(&Vec3::new(0.3, -0.4, 0.866_025_403_784_438_6).normalize(), &Vec3::y()).unwrap();
        assert!(Frame::from_rotor(&a.lift()).max_abs_diff(&a) < 1e-14);
    }
}
