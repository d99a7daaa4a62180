//! Quaternion and dual-quaternion algebra.
//!
//! Storage is scalar-first, `(w, x, y, z)`, everywhere in the crate and in
//! every external file format. A dual quaternion is `principal + ε dual` with
//! `ε² = 0`. Unit dual quaternions encode a pose as `q + ε ½ p q`, where `q`
//! is the attitude and `p` the inertial-frame position.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Non-unit input tolerated by [`rotation_matrix`] before it is rejected.
pub const UNIT_INPUT_TOL: f64 = 1e-6;
/// Largest real part accepted on an extracted translation quaternion.
pub const PURE_TOL: f64 = 1e-6;

const EXP_TAYLOR_THRESHOLD: f64 = 1e-6;

/// Skew-symmetric matrix `(v×)` so that `skew(a) * b == a.cross(&b)`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub v: Vec3,
}

impl Quaternion {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            w,
            v: Vector3::new(x, y, z),
        }
    }

    pub fn from_parts(w: f64, v: Vec3) -> Self {
        Self { w, v }
    }

    /// Purely imaginary quaternion `x̄` for a 3-vector `x`.
    pub fn pure(v: Vec3) -> Self {
        Self { w: 0.0, v }
    }

    pub fn real(w: f64) -> Self {
        Self {
            w,
            v: Vec3::zeros(),
        }
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn identity() -> Self {
        Self::real(1.0)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.v.x, self.v.y, self.v.z]
    }

    pub fn conjugate(&self) -> Self {
        Self {
            w: self.w,
            v: -self.v,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.w * self.w + self.v.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Euclidean inner product of the four components.
    pub fn dot(&self, other: &Self) -> f64 {
        self.w * other.w + self.v.dot(&other.v)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            w: self.w * s,
            v: self.v * s,
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let n2 = self.norm_squared();
        (n2 > 0.0).then(|| self.conjugate().scale(1.0 / n2))
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product.
    fn mul(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * rhs.w - self.v.dot(&rhs.v),
            v: rhs.v * self.w + self.v * rhs.w + self.v.cross(&rhs.v),
        }
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            w: self.w + rhs.w,
            v: self.v + rhs.v,
        }
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion {
            w: self.w - rhs.w,
            v: self.v - rhs.v,
        }
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Rotation matrix `R(q) = I + 2 q₀ (q×) + 2 (q×)²` of a quaternion that must
/// be unit within [`UNIT_INPUT_TOL`].
pub fn rotation_matrix(q: &Quaternion) -> Result<Mat3, Error> {
    let norm = q.norm();
    if (norm - 1.0).abs() > UNIT_INPUT_TOL {
        return Err(Error::NonUnit { norm });
    }
    Ok(rotation_matrix_unchecked(q))
}

fn rotation_matrix_unchecked(q: &Quaternion) -> Mat3 {
    let s = skew(&q.v);
    Mat3::identity() + s * (2.0 * q.w) + s * s * 2.0
}

/// Element of the unit-quaternion group `H₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self(Quaternion::identity())
    }

    /// Normalizes `q`; fails only for the zero quaternion.
    pub fn new_normalize(q: Quaternion) -> Result<Self, Error> {
        let n = q.norm();
        if n < 1e-12 || !n.is_finite() {
            return Err(Error::NonUnit { norm: n });
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    /// Accepts `q` as-is when it is unit within `tol`.
    pub fn try_new(q: Quaternion, tol: f64) -> Result<Self, Error> {
        let norm = q.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NonUnit { norm });
        }
        Ok(Self(q))
    }

    pub(crate) fn new_unchecked(q: Quaternion) -> Self {
        Self(q)
    }

    /// `exp(x) = C(‖x‖) + S(‖x‖)/‖x‖ · x`: a rotation of angle `2‖x‖` about `x/‖x‖`.
    pub fn exp(x: &Vec3) -> Self {
        let a = x.norm();
        let sinc = if a < EXP_TAYLOR_THRESHOLD {
            1.0 - a * a / 6.0
        } else {
            a.sin() / a
        };
        Self(Quaternion::from_parts(a.cos(), x * sinc))
    }

    /// Rotation of `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        Self::exp(&(axis * (0.5 * angle / n)))
    }

    /// Intrinsic Z-Y-X (yaw, pitch, roll) composition `Rz(yaw) Ry(pitch) Rx(roll)`.
    pub fn from_euler_zyx(roll: f64, pitch: f64, yaw: f64) -> Self {
        let qz = Self::from_axis_angle(&Vec3::z(), yaw);
        let qy = Self::from_axis_angle(&Vec3::y(), pitch);
        let qx = Self::from_axis_angle(&Vec3::x(), roll);
        (qz * qy * qx).renormalize()
    }

    /// Shepperd's method; the returned sign is arbitrary (double cover).
    pub fn from_rotation_matrix(m: &Mat3) -> Self {
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let q = if trace > m[(0, 0)].max(m[(1, 1)]).max(m[(2, 2)]) {
            let s = (1.0 + trace).sqrt() * 2.0;
            Quaternion::new(
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            Quaternion::new(
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        } else if m[(1, 1)] >= m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            Quaternion::new(
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            Quaternion::new(
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            )
        };
        Self(q).renormalize()
    }

    pub fn quaternion(&self) -> &Quaternion {
        &self.0
    }

    pub fn w(&self) -> f64 {
        self.0.w
    }

    pub fn vector(&self) -> &Vec3 {
        &self.0.v
    }

    /// Inverse, equal to the conjugate on `H₁`.
    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn inverse(&self) -> Self {
        self.conjugate()
    }

    pub fn negate(&self) -> Self {
        Self(-self.0)
    }

    pub fn renormalize(&self) -> Self {
        Self(self.0.scale(1.0 / self.0.norm()))
    }

    pub fn to_rotation_matrix(&self) -> Mat3 {
        rotation_matrix_unchecked(&self.0)
    }

    /// `Ad_q x`: imaginary part of `q x̄ q*`, i.e. `R(q) x`.
    pub fn adjoint(&self, x: &Vec3) -> Vec3 {
        let q = &self.0;
        // q x q* expanded: x + 2 w (v × x) + 2 v × (v × x)
        let t = q.v.cross(x) * 2.0;
        x + t * q.w + q.v.cross(&t)
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        2.0 * self.0.v.norm().atan2(self.0.w.abs())
    }

    /// Rotation vector (axis times angle) for the representative with `w ≥ 0`.
    pub fn rotation_vector(&self) -> Vec3 {
        let (w, v) = if self.0.w < 0.0 {
            (-self.0.w, -self.0.v)
        } else {
            (self.0.w, self.0.v)
        };
        let s = v.norm();
        if s < 1e-12 {
            return v * 2.0;
        }
        v * (2.0 * s.atan2(w) / s)
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, rhs: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion(self.0 * rhs.0)
    }
}

/// Dual number `principal + ε dual`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualNumber {
    pub principal: f64,
    pub dual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualQuaternion {
    pub principal: Quaternion,
    pub dual: Quaternion,
}

impl DualQuaternion {
    pub fn new(principal: Quaternion, dual: Quaternion) -> Self {
        Self { principal, dual }
    }

    pub fn identity() -> Self {
        Self::new(Quaternion::identity(), Quaternion::zero())
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.principal.conjugate(), self.dual.conjugate())
    }

    /// `‖q̃‖ = √(q̃* q̃)` evaluated in dual-number arithmetic.
    pub fn norm(&self) -> DualNumber {
        let a = self.principal.norm_squared();
        let b = 2.0 * self.principal.dot(&self.dual);
        let r = a.sqrt();
        DualNumber {
            principal: r,
            dual: if r > 0.0 { b / (2.0 * r) } else { 0.0 },
        }
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        let n = self.norm();
        (n.principal - 1.0).abs() <= tol && n.dual.abs() <= tol
    }
}

impl Mul for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, rhs: DualQuaternion) -> DualQuaternion {
        DualQuaternion {
            principal: self.principal * rhs.principal,
            dual: self.principal * rhs.dual + self.dual * rhs.principal,
        }
    }
}

impl Add for DualQuaternion {
    type Output = DualQuaternion;
    fn add(self, rhs: DualQuaternion) -> DualQuaternion {
        DualQuaternion::new(self.principal + rhs.principal, self.dual + rhs.dual)
    }
}

/// Purely imaginary dual quaternion, an element of the Lie algebra of unit
/// dual quaternions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualVector {
    pub principal: Vec3,
    pub dual: Vec3,
}

impl DualVector {
    pub fn new(principal: Vec3, dual: Vec3) -> Self {
        Self { principal, dual }
    }

    pub fn zero() -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros())
    }

    pub fn to_dual_quaternion(&self) -> DualQuaternion {
        DualQuaternion::new(
            Quaternion::pure(self.principal),
            Quaternion::pure(self.dual),
        )
    }

    /// Drops the real parts after checking they vanish within [`PURE_TOL`].
    pub fn try_from_dual_quaternion(x: &DualQuaternion) -> Result<Self, Error> {
        let real = x.principal.w.abs().max(x.dual.w.abs());
        if real > PURE_TOL {
            return Err(Error::NotPure { real });
        }
        Ok(Self::new(x.principal.v, x.dual.v))
    }
}

/// Unit dual quaternion `q + ε ½ p q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDualQuaternion(DualQuaternion);

impl UnitDualQuaternion {
    pub fn identity() -> Self {
        Self(DualQuaternion::identity())
    }

    pub fn from_pose(q: &UnitQuaternion, p: &Vec3) -> Self {
        let principal = *q.quaternion();
        let dual = (Quaternion::pure(*p) * principal).scale(0.5);
        Self(DualQuaternion::new(principal, dual))
    }

    /// Projects a nearly-unit dual quaternion back onto the group: unit
    /// principal part and dual part orthogonal to it.
    pub fn new_normalize(x: DualQuaternion) -> Result<Self, Error> {
        let n = x.principal.norm();
        if n < 1e-12 || !n.is_finite() {
            return Err(Error::NonUnit { norm: n });
        }
        let p = x.principal.scale(1.0 / n);
        let d = x.dual.scale(1.0 / n);
        let d = d - p.scale(p.dot(&d));
        Ok(Self(DualQuaternion::new(p, d)))
    }

    pub fn dual_quaternion(&self) -> &DualQuaternion {
        &self.0
    }

    pub fn rotation(&self) -> UnitQuaternion {
        UnitQuaternion::new_unchecked(self.0.principal)
    }

    pub fn translation(&self) -> Vec3 {
        (self.0.dual * self.0.principal.conjugate()).v * 2.0
    }

    pub fn pose(&self) -> (UnitQuaternion, Vec3) {
        (self.rotation(), self.translation())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn renormalize(&self) -> Self {
        Self::new_normalize(self.0).unwrap_or(*self)
    }

    /// `Ad_q̃ x̃` in closed form: `Ad_q x_P + ε (Ad_q x_D + p × Ad_q x_P)`.
    pub fn adjoint(&self, x: &DualVector) -> DualVector {
        let q = self.rotation();
        let p = self.translation();
        let rp = q.adjoint(&x.principal);
        DualVector::new(rp, q.adjoint(&x.dual) + p.cross(&rp))
    }

    /// `Ad_q̃ x̃` as the literal sandwich product `q̃ x̃ q̃*`.
    pub fn adjoint_sandwich(&self, x: &DualVector) -> DualVector {
        let s = self.0 * x.to_dual_quaternion() * self.0.conjugate();
        DualVector::new(s.principal.v, s.dual.v)
    }
}

impl Mul for UnitDualQuaternion {
    type Output = UnitDualQuaternion;
    fn mul(self, rhs: UnitDualQuaternion) -> UnitDualQuaternion {
        UnitDualQuaternion(self.0 * rhs.0)
    }
}

/// Validating counterpart of [`UnitDualQuaternion::pose`] for raw input.
pub fn extract_pose(dq: &DualQuaternion) -> Result<(UnitQuaternion, Vec3), Error> {
    let q = UnitQuaternion::try_new(dq.principal, UNIT_INPUT_TOL)?;
    let p = (dq.dual * dq.principal.conjugate()).scale(2.0);
    if p.w.abs() > PURE_TOL {
        return Err(Error::NotPure { real: p.w.abs() });
    }
    Ok((q, p.v))
}

/// Angular velocity `omega` (body frame) and linear velocity `vel` (inertial frame).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    pub omega: Vec3,
    pub vel: Vec3,
}

impl Twist {
    pub fn new(omega: Vec3, vel: Vec3) -> Self {
        Self { omega, vel }
    }

    pub fn zero() -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros())
    }

    /// `Ω(ω, v) = ω̄ + ε Ad_{q*} v̄`.
    pub fn to_dual_vector(&self, q: &UnitQuaternion) -> DualVector {
        twist_from_velocities(&self.omega, &self.vel, q)
    }
}

pub fn twist_from_velocities(omega: &Vec3, vel: &Vec3, q: &UnitQuaternion) -> DualVector {
    DualVector::new(*omega, q.conjugate().adjoint(vel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn close(a: &Quaternion, b: &Quaternion, tol: f64) -> bool {
        (a.w - b.w).abs() <= tol && (a.v - b.v).norm() <= tol
    }

    #[test]
    fn hamilton_units() {
        let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
        let k = Quaternion::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(i * j * k, Quaternion::real(-1.0));
        let x = Quaternion::new(0.3, -1.0, 2.0, 0.5);
        assert_eq!(Quaternion::identity() * x, x);
    }

    #[test]
    fn two_quarter_turns_make_a_half_turn() {
        let q = Quaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2);
        assert!(close(&(q * q), &Quaternion::new(0.0, 0.0, 0.0, 1.0), 1e-15));
    }

    #[test]
    fn conjugate_and_norm() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(q.conjugate(), Quaternion::new(1.0, -2.0, -3.0, -4.0));
        assert!((q.norm() - 30f64.sqrt()).abs() < 1e-15);
        assert_eq!(Quaternion::real(2.5).conjugate(), Quaternion::real(2.5));
        let dq = UnitDualQuaternion::from_pose(
            &UnitQuaternion::from_axis_angle(&Vec3::new(1.0, 2.0, -1.0), 0.7),
            &Vec3::new(3.0, -1.0, 2.0),
        );
        let n = dq.dual_quaternion().norm();
        assert!((n.principal - 1.0).abs() < 1e-15 && n.dual.abs() < 1e-15);
        let prod = *dq.dual_quaternion() * dq.conjugate().0;
        assert!(close(&prod.principal, &Quaternion::identity(), 1e-15));
        assert!(close(&prod.dual, &Quaternion::zero(), 1e-15));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(
            *UnitQuaternion::exp(&Vec3::zeros()).quaternion(),
            Quaternion::identity()
        );
        let q = UnitQuaternion::exp(&Vec3::new(0.0, 0.0, FRAC_PI_4));
        assert!(close(
            q.quaternion(),
            &Quaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2),
            1e-15
        ));
        let q = UnitQuaternion::exp(&Vec3::new(FRAC_PI_2, 0.0, 0.0));
        assert!(close(
            q.quaternion(),
            &Quaternion::new(0.0, 1.0, 0.0, 0.0),
            1e-15
        ));
    }

    #[test]
    fn exp_taylor_branch_is_continuous() {
        let x = Vec3::new(3e-7, -2e-7, 5e-7);
        let y = x * 2.1;
        let a = UnitQuaternion::exp(&x);
        let b = UnitQuaternion::exp(&y);
        assert!((a.quaternion().norm() - 1.0).abs() < 1e-15);
        // y crosses the Taylor threshold; both sides agree with the direct formula.
        let direct = |v: &Vec3| v * (v.norm().sin() / v.norm());
        assert!((a.vector() - direct(&x)).norm() < 1e-20);
        assert!((b.vector() - direct(&y)).norm() < 1e-20);
    }

    #[test]
    fn rotation_matrix_examples() {
        let r = rotation_matrix(&Quaternion::identity()).unwrap();
        assert_eq!(r, Mat3::identity());
        let r = rotation_matrix(&Quaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2)).unwrap();
        let expected = Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((r - expected).abs().max() < 1e-15);
    }

    #[test]
    fn rotation_matrix_rejects_non_unit() {
        let err = rotation_matrix(&Quaternion::new(1.0, 0.0, 0.0, 2e-3)).unwrap_err();
        assert!(matches!(err, Error::NonUnit { .. }));
        assert!(rotation_matrix(&Quaternion::new(1.0 + 5e-7, 0.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn adjoint_examples() {
        let x = Vec3::new(0.2, -0.4, 1.5);
        assert_eq!(UnitQuaternion::identity().adjoint(&x), x);
        let q = UnitQuaternion::exp(&Vec3::new(0.0, 0.0, FRAC_PI_4));
        assert!((q.adjoint(&Vec3::x()) - Vec3::y()).norm() < 1e-15);
        let sandwich = *q.quaternion() * Quaternion::pure(x) * q.quaternion().conjugate();
        assert!((q.adjoint(&x) - sandwich.v).norm() < 1e-15);
        assert!(sandwich.w.abs() < 1e-15);
    }

    #[test]
    fn from_rotation_matrix_recovers_quaternion() {
        for (axis, angle) in [
            (Vec3::new(1.0, 0.0, 0.0), 0.3),
            (Vec3::new(0.0, 1.0, 1.0), 3.1),
            (Vec3::new(-1.0, 2.0, 0.5), PI),
            (Vec3::new(0.0, 0.0, 1.0), 2.0),
            (Vec3::new(1.0, 1.0, 1.0), 0.0),
        ] {
            let q = UnitQuaternion::from_axis_angle(&axis, angle);
            let back = UnitQuaternion::from_rotation_matrix(&q.to_rotation_matrix());
            let d = (back.quaternion().dot(q.quaternion())).abs();
            assert!((d - 1.0).abs() < 1e-12, "{axis:?} {angle}");
        }
    }

    #[test]
    fn pose_examples() {
        let id = UnitDualQuaternion::from_pose(&UnitQuaternion::identity(), &Vec3::zeros());
        assert_eq!(*id.dual_quaternion(), DualQuaternion::identity());
        let t =
            UnitDualQuaternion::from_pose(&UnitQuaternion::identity(), &Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(
            t.dual_quaternion().dual,
            Quaternion::new(0.0, 1.0, 0.0, 0.0)
        );

        let q = UnitQuaternion::exp(&Vec3::new(0.0, 0.0, FRAC_PI_4));
        let p = Vec3::new(1.0, 2.0, 3.0);
        let (q2, p2) =
            extract_pose(UnitDualQuaternion::from_pose(&q, &p).dual_quaternion()).unwrap();
        assert!(close(q2.quaternion(), q.quaternion(), 1e-15));
        assert!((p2 - p).norm() < 1e-14);
        let (q0, p0) = extract_pose(&DualQuaternion::identity()).unwrap();
        assert_eq!(q0, UnitQuaternion::identity());
        assert_eq!(p0, Vec3::zeros());
    }

    #[test]
    fn extract_pose_rejects_corrupt_dual_part() {
        let mut dq = DualQuaternion::identity();
        dq.dual = Quaternion::new(1e-3, 0.5, 0.0, 0.0);
        assert!(matches!(extract_pose(&dq), Err(Error::NotPure { .. })));
    }

    #[test]
    fn translations_compose_additively() {
        let a = Vec3::new(1.0, -2.0, 0.5);
        let b = Vec3::new(0.25, 4.0, -3.0);
        let id = UnitQuaternion::identity();
        let c = UnitDualQuaternion::from_pose(&id, &a) * UnitDualQuaternion::from_pose(&id, &b);
        let (q, p) = c.pose();
        assert_eq!(q, id);
        assert!((p - (a + b)).norm() < 1e-15);
        let x = DualQuaternion::new(
            Quaternion::new(0.1, 0.2, 0.3, 0.4),
            Quaternion::new(-1.0, 0.0, 2.0, 0.5),
        );
        assert_eq!(DualQuaternion::identity() * x, x);
    }

    #[test]
    fn dual_adjoint_at_pure_translation() {
        let p = Vec3::new(0.5, -1.0, 2.0);
        let t = UnitDualQuaternion::from_pose(&UnitQuaternion::identity(), &p);
        let x = DualVector::new(Vec3::new(1.0, 0.0, -0.5), Vec3::new(0.0, 2.0, 1.0));
        let got = t.adjoint(&x);
        assert_eq!(got.principal, x.principal);
        assert!((got.dual - (x.dual + p.cross(&x.principal))).norm() < 1e-15);
        let id = UnitDualQuaternion::identity();
        assert_eq!(id.adjoint(&x), x);
    }

    #[test]
    fn twist_examples() {
        let w = Vec3::new(0.1, 0.2, 0.3);
        let v = Vec3::new(1.0, 0.0, 0.0);
        let x = twist_from_velocities(&w, &v, &UnitQuaternion::identity());
        assert_eq!((x.principal, x.dual), (w, v));
        let q = UnitQuaternion::exp(&Vec3::new(0.0, 0.0, FRAC_PI_4));
        let x = twist_from_velocities(&w, &v, &q);
        assert!((x.dual - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert_eq!(Twist::zero().to_dual_vector(&q), DualVector::zero());
    }

    #[test]
    fn dual_vector_purity_check() {
        let x = DualQuaternion::new(
            Quaternion::new(0.0, 1.0, 0.0, 0.0),
            Quaternion::new(0.1, 0.0, 0.0, 0.0),
        );
        assert!(DualVector::try_from_dual_quaternion(&x).is_err());
    }

    #[test]
    fn rotation_vector_matches_axis_angle() {
        let axis = Vec3::new(1.0, -2.0, 0.5).normalize();
        let q = UnitQuaternion::from_axis_angle(&axis, 1.2);
        assert!((q.rotation_vector() - axis * 1.2).norm() < 1e-14);
        assert!((q.negate().rotation_vector() - axis * 1.2).norm() < 1e-14);
        assert!((q.angle() - 1.2).abs() < 1e-14);
    }
}
