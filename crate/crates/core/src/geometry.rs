//! Real 3-vectors and quantization axes.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|v| = 1` for analyzer directions.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Unit vector at angle `angle` from x̂ in the xy plane.
    pub fn in_xy_plane(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec3::new(c, s, 0.0)
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Errors unless `|self| = 1` within [`UNIT_TOL`].
    pub fn require_unit(self) -> Result<Vec3> {
        let n = self.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitVector(n));
        }
        Ok(self)
    }

    /// Angle to `other`, both assumed unit.
    pub fn angle_to(self, other: Vec3) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    /// Any orthonormal pair `(u, v)` with `u × v = self`; for `self = ẑ`
    /// this is exactly `(x̂, ŷ)`.
    pub fn orthonormal_frame(self) -> (Vec3, Vec3) {
        if self == Vec3::Z {
            return (Vec3::X, Vec3::Y);
        }
        let helper = if self.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
        let u = (helper - self * self.dot(helper)).normalized();
        let v = self.cross(u);
        (u, v)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A point on the unit sphere: polar angle `theta ∈ [0, π]`, azimuth
/// `phi ∈ [0, 2π)`.
///
/// The Cartesian vector is stored alongside the angles so that axes built
/// from exact vectors (e.g. in-plane samples with `z = 0`) keep their exact
/// components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAxis {
    theta: f64,
    phi: f64,
    vector: Vec3,
}

impl DirectionAxis {
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite("axis angles"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidConfig(format!(
                "theta {theta} outside [0, π]"
            )));
        }
        let phi = phi.rem_euclid(TAU);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(DirectionAxis {
            theta,
            phi,
            vector: Vec3::new(st * cp, st * sp, ct),
        })
    }

    /// From a unit vector; the vector is kept verbatim.
    pub fn from_vector(v: Vec3) -> Result<Self> {
        let v = v.require_unit()?;
        let theta = v.z.clamp(-1.0, 1.0).acos();
        let phi = v.y.atan2(v.x).rem_euclid(TAU);
        Ok(DirectionAxis {
            theta,
            phi,
            vector: v,
        })
    }

    pub fn z() -> Self {
        DirectionAxis::from_vector(Vec3::Z).expect("ẑ is a unit vector")
    }

    pub fn x() -> Self {
        DirectionAxis::from_vector(Vec3::X).expect("x̂ is a unit vector")
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn vector(&self) -> Vec3 {
        self.vector
    }
}
