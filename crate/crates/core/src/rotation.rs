//! Bloch-sphere rotations (the free operations).
//!
//! A [`RotationSpec`] holds z-y-z Euler angles; its spin-`j` representation is
//! `exp(-iα Jz) exp(-iβ Jy) exp(-iγ Jz)`. The matching SO(3) matrix
//! `Rz(α) Ry(β) Rz(γ)` maps the mean spin vector of a state to the mean spin
//! vector of the rotated state.

use nalgebra::{Complex, Matrix3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen};
use crate::spin::{angular_momentum, Axis, QuantumState, SpinSystem};
use crate::{real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec<T: Real = f64> {
    pub alpha: T,
    pub beta: T,
    pub gamma_euler: T,
}

impl<T: Real> Default for RotationSpec<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> RotationSpec<T> {
    pub fn identity() -> Self {
        Self {
            alpha: T::zero(),
            beta: T::zero(),
            gamma_euler: T::zero(),
        }
    }

    /// Euler angles stored as given; use [`RotationSpec::new`] for the
    /// canonical range.
    pub fn raw(alpha: T, beta: T, gamma_euler: T) -> Self {
        Self {
            alpha,
            beta,
            gamma_euler,
        }
    }

    /// Canonicalized angles: `alpha, gamma_euler ∈ [0, 2π)`, `beta ∈ [0, π]`.
    pub fn new(alpha: T, beta: T, gamma_euler: T) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma_euler.is_finite()) {
            return Err(Error::Domain("rotation angles must be finite".into()));
        }
        Ok(Self::from_matrix(&Self::raw(alpha, beta, gamma_euler).matrix()))
    }

    pub fn matrix(&self) -> Matrix3<T> {
        rot_z(self.alpha) * rot_y(self.beta) * rot_z(self.gamma_euler)
    }

    /// Extracts canonical z-y-z angles from a proper rotation matrix.
    pub fn from_matrix(r: &Matrix3<T>) -> Self {
        let two_pi = T::two_pi();
        let wrap = |a: T| {
            let mut w = a % two_pi;
            if w < T::zero() {
                w += two_pi;
            }
            if w >= two_pi {
                w -= two_pi;
            }
            w
        };
        let cb = r[(2, 2)].clamp(-T::one(), T::one());
        let sb = (r[(0, 2)] * r[(0, 2)] + r[(1, 2)] * r[(1, 2)]).sqrt();
        let eps = real::<T>(1e-12);
        if sb > eps {
            let beta = sb.atan2(cb);
            let alpha = r[(1, 2)].atan2(r[(0, 2)]);
            let gamma = r[(2, 1)].atan2(-r[(2, 0)]);
            Self::raw(wrap(alpha), beta, wrap(gamma))
        } else if cb > T::zero() {
            Self::raw(wrap(r[(1, 0)].atan2(r[(0, 0)])), T::zero(), T::zero())
        } else {
            Self::raw(wrap((-r[(1, 0)]).atan2(-r[(0, 0)])), T::pi(), T::zero())
        }
    }

    /// Rotation by `angle` about `axis` (right-handed, active).
    pub fn about(axis: &Vector3<T>, angle: T) -> Self {
        Self::from_matrix(&axis_angle(axis, angle))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &RotationSpec<T>) -> Self {
        Self::from_matrix(&(self.matrix() * first.matrix()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_matrix(&self.matrix().transpose())
    }

    /// Angle of the equivalent single-axis rotation.
    pub fn angle(&self) -> T {
        let m = self.matrix();
        ((m.trace() - T::one()) * real::<T>(0.5))
            .clamp(-T::one(), T::one())
            .acos()
    }

    pub fn to_f64(&self) -> RotationSpec<f64> {
        RotationSpec::raw(
            crate::to_f64(self.alpha),
            crate::to_f64(self.beta),
            crate::to_f64(self.gamma_euler),
        )
    }
}

pub fn rot_z<T: Real>(a: T) -> Matrix3<T> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, T::zero(), s, c, T::zero(), T::zero(), T::zero(), T::one())
}

pub fn rot_y<T: Real>(b: T) -> Matrix3<T> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, T::zero(), s, T::zero(), T::one(), T::zero(), -s, T::zero(), c)
}

pub fn rot_x<T: Real>(t: T) -> Matrix3<T> {
    let (s, c) = t.sin_cos();
    Matrix3::new(T::one(), T::zero(), T::zero(), T::zero(), c, -s, T::zero(), s, c)
}

pub fn axis_angle<T: Real>(axis: &Vector3<T>, angle: T) -> Matrix3<T> {
    if axis.norm() == T::zero() {
        return Matrix3::identity();
    }
    nalgebra::Rotation3::from_axis_angle(&Unit::new_normalize(*axis), angle).into_inner()
}

/// Smallest rotation carrying unit vector `from` onto unit vector `to`.
/// Antiparallel inputs rotate by π about an axis perpendicular to `from`,
/// preferring the z axis.
pub fn align<T: Real>(from: &Vector3<T>, to: &Vector3<T>) -> Matrix3<T> {
    let f = from.normalize();
    let t = to.normalize();
    let cross = f.cross(&t);
    let dot = f.dot(&t).clamp(-T::one(), T::one());
    let eps = real::<T>(1e-12);
    if cross.norm() > eps {
        return axis_angle(&cross, cross.norm().atan2(dot));
    }
    if dot > T::zero() {
        return Matrix3::identity();
    }
    let mut perp = Vector3::z().cross(&f);
    if perp.norm() < real::<T>(1e-6) {
        perp = Vector3::y().cross(&f);
    }
    // rotation about the component of z orthogonal to f
    let axis = f.cross(&perp);
    axis_angle(&axis, T::pi())
}

/// `exp(-iα Jz)·exp(-iβ Jy)·exp(-iγ Jz)` as a dense unitary.
pub fn rotation_unitary<T: Real>(sys: &SpinSystem<T>, rot: &RotationSpec<T>) -> CMatrix<T> {
    Rotator::new(sys).unitary(rot)
}

/// Spin representation of rotations for one system, caching the spectral
/// decompositions of `Jx` and `Jy`.
#[derive(Debug, Clone)]
pub struct Rotator<T: Real = f64> {
    m: Vec<T>,
    jx: HermitianEigen<T>,
    jy: HermitianEigen<T>,
}

impl<T: Real> Rotator<T> {
    pub fn new(sys: &SpinSystem<T>) -> Self {
        Self {
            m: sys.m_values(),
            jx: angular_momentum(sys, Axis::X).eigen(),
            jy: angular_momentum(sys, Axis::Y).eigen(),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    fn z_phases(&self, a: T) -> Vec<Complex<T>> {
        self.m
            .iter()
            .map(|&m| crate::linalg::polar(T::one(), -(a * m)))
            .collect()
    }

    pub fn unitary(&self, rot: &RotationSpec<T>) -> CMatrix<T> {
        let a = self.z_phases(rot.alpha);
        let g = self.z_phases(rot.gamma_euler);
        let mut u = self.jy.exp_i(rot.beta);
        let d = self.dim();
        for r in 0..d {
            for c in 0..d {
                u[(r, c)] = a[r] * u[(r, c)] * g[c];
            }
        }
        u
    }

    /// `exp(-iθ J_axis)` as a dense unitary.
    pub fn axis_unitary(&self, axis: Axis, theta: T) -> CMatrix<T> {
        match axis {
            Axis::Z => {
                CMatrix::from_diagonal(&CVector::from_vec(self.z_phases(theta)))
            }
            Axis::Y => self.jy.exp_i(theta),
            Axis::X => self.jx.exp_i(theta),
        }
    }

    /// Applies the rotation to a state vector in `O(dim²)`.
    pub fn apply_vec(&self, rot: &RotationSpec<T>, v: &CVector<T>) -> CVector<T> {
        let g = self.z_phases(rot.gamma_euler);
        let mut w = v.clone();
        for (k, z) in w.iter_mut().enumerate() {
            *z *= g[k];
        }
        let mut w = self.jy.apply_exp_i(rot.beta, &w);
        let a = self.z_phases(rot.alpha);
        for (k, z) in w.iter_mut().enumerate() {
            *z *= a[k];
        }
        w
    }

    pub fn apply(&self, rot: &RotationSpec<T>, state: &QuantumState<T>) -> Result<QuantumState<T>> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        match state {
            QuantumState::Pure(v) => Ok(QuantumState::Pure(self.apply_vec(rot, v))),
            QuantumState::Mixed(_) => state.transformed(&self.unitary(rot)),
        }
    }

    /// Spectral data of `Jx`, used for fast scans about the x axis.
    pub fn jx_eigen(&self) -> &HermitianEigen<T> {
        &self.jx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, unitarity_residual};
    use crate::spin::{dicke_state, expectation, SpinOperators};
    use std::f64::consts::PI;

    #[test]
    fn identity_angles_give_identity() {
        let s = SpinSystem::<f64>::new(6).unwrap();
        let u = rotation_unitary(&s, &RotationSpec::identity());
        assert!(max_abs(&(u - CMatrix::identity(7, 7))) < 1e-13);
    }

    #[test]
    fn pi_about_y_flips_spin_half() {
        let s = SpinSystem::<f64>::new(1).unwrap();
        let u = rotation_unitary(&s, &RotationSpec::raw(0.0, PI, 0.0));
        let up = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let out = &u * up;
        assert!((out[0].norm() - 1.0).abs() < 1e-13);
        assert!(out[1].norm() < 1e-13);
    }

    #[test]
    fn factors_compose() {
        let s = SpinSystem::<f64>::new(9).unwrap();
        let r = Rotator::new(&s);
        let (a, b, g) = (0.4, 1.1, -2.3);
        let prod = r.unitary(&RotationSpec::raw(a, 0.0, 0.0))
            * r.unitary(&RotationSpec::raw(0.0, b, 0.0))
            * r.unitary(&RotationSpec::raw(0.0, 0.0, g));
        assert!(max_abs(&(prod - r.unitary(&RotationSpec::raw(a, b, g)))) < 1e-12);
        assert!(unitarity_residual(&r.unitary(&RotationSpec::raw(a, b, g))) < 1e-12);
    }

    #[test]
    fn euler_round_trip_and_canonical_range() {
        for &(a, b, g) in &[(0.3, 0.7, 5.9), (-1.0, -0.4, 7.0), (2.0, 0.0, 1.0), (1.0, PI, 0.5)] {
            let spec = RotationSpec::new(a, b, g).unwrap();
            assert!(spec.alpha >= 0.0 && spec.alpha < 2.0 * PI);
            assert!(spec.gamma_euler >= 0.0 && spec.gamma_euler < 2.0 * PI);
            assert!(spec.beta >= 0.0 && spec.beta <= PI);
            let d = spec.matrix() - RotationSpec::raw(a, b, g).matrix();
            assert!(d.norm() < 1e-12);
        }
        assert!(RotationSpec::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn mean_spin_follows_so3_matrix() {
        let s = SpinSystem::<f64>::new(5).unwrap();
        let ops = SpinOperators::new(&s);
        let r = Rotator::new(&s);
        let amps = CVector::from_vec((0..6).map(|k| c(0.1 * k as f64 + 0.2, 0.05 * k as f64)).collect());
        let st = QuantumState::pure_normalized(amps).unwrap();
        let rot = RotationSpec::raw(0.7, 1.3, -0.4);
        let moved = r.apply(&rot, &st).unwrap();
        let mean = |x: &QuantumState<f64>| {
            Vector3::new(
                expectation(x, &ops.jx).unwrap(),
                expectation(x, &ops.jy).unwrap(),
                expectation(x, &ops.jz).unwrap(),
            )
        };
        let predicted = rot.matrix() * mean(&st);
        assert!((predicted - mean(&moved)).norm() < 1e-12);
    }

    #[test]
    fn align_handles_antiparallel() {
        let from = Vector3::new(0.0, 0.0, -1.0);
        let to = Vector3::new(-1.0, 0.0, 0.0);
        assert!((align(&from, &to) * from - to).norm() < 1e-12);
        let from = Vector3::new(1.0, 0.0, 0.0);
        assert!((align(&from, &to) * from - to).norm() < 1e-12);
        let from = Vector3::new(-1.0, 0.0, 0.0);
        assert!((align(&from, &to) - Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn south_pole_rotated_to_minus_x() {
        let s = SpinSystem::<f64>::new(4).unwrap();
        let ops = SpinOperators::new(&s);
        let r = Rotator::new(&s);
        let spec = RotationSpec::from_matrix(&align(&Vector3::new(0.0, 0.0, -1.0), &Vector3::new(-1.0, 0.0, 0.0)));
        let st = r.apply(&spec, &dicke_state(&s, 0).unwrap()).unwrap();
        assert!((expectation(&st, &ops.jx).unwrap() + 2.0).abs() < 1e-12);
    }
}
