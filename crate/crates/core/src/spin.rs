//! Collective spin of `N` two-level atoms in the symmetric (Dicke) subspace.
//!
//! Basis index `k` corresponds to `|j, m = -j + k⟩`, so index 0 is the south
//! pole `|N/2, -N/2⟩`.

use std::fmt;

use nalgebra::{Complex, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen};
use crate::{real, tol, Real};

/// Largest supported atom number; bounds dense eigensolver cost.
pub const MAX_ATOMS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem<T: Real = f64> {
    n_atoms: usize,
    j: T,
}

impl<T: Real> SpinSystem<T> {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::Domain("atom number must be at least 1".into()));
        }
        if n_atoms > MAX_ATOMS {
            return Err(Error::Domain(format!(
                "atom number {n_atoms} exceeds the dense-matrix cap of {MAX_ATOMS}"
            )));
        }
        Ok(Self {
            n_atoms,
            j: real::<T>(n_atoms as f64 / 2.0),
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Total spin `j = N/2`.
    pub fn j(&self) -> T {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(&self, k: usize) -> T {
        real::<T>(k as f64) - self.j
    }

    pub fn m_values(&self) -> Vec<T> {
        (0..self.dim()).map(|k| self.m(k)).collect()
    }

    /// Witness computations are meaningless for `N ≤ 3`.
    pub fn require_witness_size(&self) -> Result<()> {
        if self.n_atoms < 4 {
            Err(Error::Domain(format!(
                "cubic squeezing requires N >= 4, got N = {}",
                self.n_atoms
            )))
        } else {
            Ok(())
        }
    }
}

pub fn make_system<T: Real>(n_atoms: i64) -> Result<SpinSystem<T>> {
    if n_atoms < 1 {
        return Err(Error::Domain(format!("atom number must be positive, got {n_atoms}")));
    }
    SpinSystem::new(n_atoms as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Dense Hermitian operator on the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator<T: Real = f64> {
    matrix: CMatrix<T>,
    label: String,
}

impl<T: Real> SpinOperator<T> {
    /// Wraps a matrix after checking it is square and Hermitian to
    /// `1e-12 · max|entry|`.
    pub fn new(matrix: CMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let scale = linalg::max_abs(&matrix);
        if linalg::hermiticity_residual(&matrix) > tol::<T>(1e-12) * scale {
            return Err(Error::Domain("operator is not Hermitian".into()));
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub(crate) fn from_parts(matrix: CMatrix<T>, label: impl Into<String>) -> Self {
        Self {
            matrix,
            label: label.into(),
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn squared(&self) -> Self {
        Self::from_parts(&self.matrix * &self.matrix, format!("({})^2", self.label))
    }

    /// `U O U†`.
    pub fn conjugated(&self, u: &CMatrix<T>) -> Self {
        Self::from_parts(u * &self.matrix * u.adjoint(), format!("U {} U†", self.label))
    }

    pub fn eigen(&self) -> HermitianEigen<T> {
        HermitianEigen::new(&self.matrix)
    }

    /// Real linear combination `Σ c_k O_k`.
    pub fn combination(terms: &[(T, &SpinOperator<T>)], label: impl Into<String>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Domain("empty operator combination".into()))?;
        let dim = first.1.dim();
        let mut acc = CMatrix::<T>::zeros(dim, dim);
        for (coeff, op) in terms {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            acc += op.matrix.map(|z| z * *coeff);
        }
        Ok(Self::from_parts(acc, label))
    }
}

/// Pure or mixed state on the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState<T: Real = f64> {
    Pure(CVector<T>),
    Mixed(CMatrix<T>),
}

impl<T: Real> QuantumState<T> {
    /// Pure state; the squared norm must be 1 within `1e-12`.
    pub fn pure(amplitudes: CVector<T>) -> Result<Self> {
        let n2 = linalg::norm_sqr(&amplitudes);
        if (n2 - T::one()).abs() > tol::<T>(1e-12) {
            return Err(Error::Domain(format!(
                "state is not normalized (squared norm {})",
                crate::to_f64(n2)
            )));
        }
        Ok(Self::Pure(amplitudes))
    }

    /// Pure state, rescaled to unit norm.
    pub fn pure_normalized(amplitudes: CVector<T>) -> Result<Self> {
        let n = linalg::norm_sqr(&amplitudes).sqrt();
        if n <= T::zero() || !n.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self::Pure(amplitudes.map(|z| z / n)))
    }

    /// Density matrix: Hermitian, unit trace within `1e-12`, smallest
    /// eigenvalue at least `-1e-10`.
    pub fn mixed(density: CMatrix<T>) -> Result<Self> {
        if !density.is_square() {
            return Err(Error::DimensionMismatch {
                expected: density.nrows(),
                found: density.ncols(),
            });
        }
        if !linalg::is_hermitian(&density, tol::<T>(1e-12)) {
            return Err(Error::Domain("density matrix is not Hermitian".into()));
        }
        let trace = density.trace();
        if (trace.re - T::one()).abs() > tol::<T>(1e-12) || trace.im.abs() > tol::<T>(1e-12) {
            return Err(Error::Domain("density matrix does not have unit trace".into()));
        }
        let eig = HermitianEigen::new(&density);
        if eig.values[0] < -tol::<T>(1e-10) {
            return Err(Error::Domain("density matrix is not positive semidefinite".into()));
        }
        Ok(Self::Mixed(density))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Mixed(m) => m.nrows(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&CVector<T>> {
        match self {
            Self::Pure(v) => Some(v),
            Self::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> CMatrix<T> {
        match self {
            Self::Pure(v) => v * v.adjoint(),
            Self::Mixed(m) => m.clone(),
        }
    }

    /// `U|ψ⟩` or `U ρ U†`.
    pub fn transformed(&self, u: &CMatrix<T>) -> Result<Self> {
        check_dim(u.nrows(), self.dim())?;
        Ok(match self {
            Self::Pure(v) => Self::Pure(u * v),
            Self::Mixed(m) => Self::Mixed(u * m * u.adjoint()),
        })
    }

    pub fn trace_norm_check(&self) -> T {
        match self {
            Self::Pure(v) => linalg::norm_sqr(v),
            Self::Mixed(m) => m.trace().re,
        }
    }

    /// Population of the highest basis level.
    pub fn top_population(&self) -> T {
        let d = self.dim();
        match self {
            Self::Pure(v) => v[d - 1].norm_sqr(),
            Self::Mixed(m) => m[(d - 1, d - 1)].re,
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Basis state `|j, -j + k⟩`.
pub fn dicke_state<T: Real>(sys: &SpinSystem<T>, k: usize) -> Result<QuantumState<T>> {
    if k > sys.n_atoms() {
        return Err(Error::Domain(format!(
            "Dicke index {k} outside 0..={}",
            sys.n_atoms()
        )));
    }
    let mut v = CVector::<T>::zeros(sys.dim());
    v[k] = Complex::new(T::one(), T::zero());
    Ok(QuantumState::Pure(v))
}

/// Ladder coefficient `⟨m+1|J₊|m⟩ = √(j(j+1) − m(m+1))`.
fn ladder<T: Real>(j: T, m: T) -> T {
    (j * (j + T::one()) - m * (m + T::one())).max(T::zero()).sqrt()
}

pub fn angular_momentum<T: Real>(sys: &SpinSystem<T>, axis: Axis) -> SpinOperator<T> {
    let d = sys.dim();
    let j = sys.j();
    let half = real::<T>(0.5);
    let mut m = CMatrix::<T>::zeros(d, d);
    match axis {
        Axis::Z => {
            for k in 0..d {
                m[(k, k)] = Complex::new(sys.m(k), T::zero());
            }
        }
        Axis::X => {
            for k in 0..d - 1 {
                let a = ladder(j, sys.m(k)) * half;
                m[(k + 1, k)] = Complex::new(a, T::zero());
                m[(k, k + 1)] = Complex::new(a, T::zero());
            }
        }
        Axis::Y => {
            // Jy = (J₊ − J₋)/(2i): ⟨m+1|Jy|m⟩ = −i·a/2.
            for k in 0..d - 1 {
                let a = ladder(j, sys.m(k)) * half;
                m[(k + 1, k)] = Complex::new(T::zero(), -a);
                m[(k, k + 1)] = Complex::new(T::zero(), a);
            }
        }
    }
    SpinOperator::from_parts(m, format!("J{axis}"))
}

/// The three collective spin components of one system.
#[derive(Debug, Clone)]
pub struct SpinOperators<T: Real = f64> {
    pub jx: SpinOperator<T>,
    pub jy: SpinOperator<T>,
    pub jz: SpinOperator<T>,
}

impl<T: Real> SpinOperators<T> {
    pub fn new(sys: &SpinSystem<T>) -> Self {
        Self {
            jx: angular_momentum(sys, Axis::X),
            jy: angular_momentum(sys, Axis::Y),
            jz: angular_momentum(sys, Axis::Z),
        }
    }

    pub fn get(&self, axis: Axis) -> &SpinOperator<T> {
        match axis {
            Axis::X => &self.jx,
            Axis::Y => &self.jy,
            Axis::Z => &self.jz,
        }
    }

    pub fn all(&self) -> [&SpinOperator<T>; 3] {
        [&self.jx, &self.jy, &self.jz]
    }

    /// `Jx² + Jy² + Jz²`.
    pub fn casimir(&self) -> CMatrix<T> {
        self.all()
            .iter()
            .fold(CMatrix::zeros(self.jx.dim(), self.jx.dim()), |acc, op| {
                acc + op.matrix() * op.matrix()
            })
    }
}

fn expectation_raw<T: Real>(state: &QuantumState<T>, op: &CMatrix<T>) -> Result<Complex<T>> {
    check_dim(op.nrows(), state.dim())?;
    Ok(match state {
        QuantumState::Pure(v) => v.dotc(&(op * v)),
        QuantumState::Mixed(rho) => (rho * op).trace(),
    })
}

/// `⟨ψ|O|ψ⟩` or `Tr[ρO]`; the imaginary residual must stay below `1e-10`
/// relative to the operator scale.
pub fn expectation<T: Real>(state: &QuantumState<T>, op: &SpinOperator<T>) -> Result<T> {
    let z = expectation_raw(state, op.matrix())?;
    let scale = linalg::max_abs(op.matrix()).max(T::one());
    if z.im.abs() > tol::<T>(1e-10) * scale {
        return Err(Error::Numerical(format!(
            "expectation of {} has imaginary part {}",
            op.label(),
            crate::to_f64(z.im)
        )));
    }
    Ok(z.re)
}

/// `Tr[ρO²] − Tr[ρO]²`, clamped at zero when within `1e-10` below it.
pub fn variance<T: Real>(state: &QuantumState<T>, op: &SpinOperator<T>) -> Result<T> {
    check_dim(op.dim(), state.dim())?;
    let v = match state {
        QuantumState::Pure(psi) => linalg::pure_moments(op.matrix(), psi).1,
        QuantumState::Mixed(_) => {
            let mean = expectation(state, op)?;
            let second = expectation_raw(state, &(op.matrix() * op.matrix()))?.re;
            second - mean * mean
        }
    };
    clamp_variance(v, linalg::max_abs(op.matrix()))
}

pub(crate) fn clamp_variance<T: Real>(v: T, op_scale: T) -> Result<T> {
    let slack = tol::<T>(1e-10) * (op_scale * op_scale).max(T::one());
    if v >= T::zero() {
        Ok(v)
    } else if v >= -slack {
        Ok(T::zero())
    } else {
        Err(Error::Numerical(format!("negative variance {}", crate::to_f64(v))))
    }
}

/// Mean spin vector and symmetrized covariance matrix
/// `C_kl = Re⟨Jk Jl⟩ − ⟨Jk⟩⟨Jl⟩`.
pub fn spin_moments<T: Real>(
    state: &QuantumState<T>,
    ops: &SpinOperators<T>,
) -> Result<(Vector3<T>, Matrix3<T>)> {
    check_dim(ops.jx.dim(), state.dim())?;
    let mats = ops.all();
    let mut mean = Vector3::zeros();
    let mut second = Matrix3::zeros();
    match state {
        QuantumState::Pure(psi) => {
            let applied: Vec<CVector<T>> = mats.iter().map(|op| op.matrix() * psi).collect();
            for k in 0..3 {
                mean[k] = psi.dotc(&applied[k]).re;
                for l in k..3 {
                    let s = applied[k].dotc(&applied[l]).re;
                    second[(k, l)] = s;
                    second[(l, k)] = s;
                }
            }
        }
        QuantumState::Mixed(rho) => {
            for k in 0..3 {
                mean[k] = (rho * mats[k].matrix()).trace().re;
                for l in k..3 {
                    let s = (rho * mats[k].matrix() * mats[l].matrix()).trace().re;
                    second[(k, l)] = s;
                    second[(l, k)] = s;
                }
            }
        }
    }
    let cov = second - mean * mean.transpose();
    Ok((mean, cov))
}
