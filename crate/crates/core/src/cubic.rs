//! Cubic unitary `U_c(χ) = exp(i χ′ Jz³)` and the witness operator
//! `O_c(χ) = U_c Jy U_c†`, with effective cubicity `χ′ = (χ/3)(N/2)^{-3/2}`.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::spin::{angular_momentum, Axis, SpinOperator, SpinSystem};
use crate::{real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicParams<T: Real = f64> {
    chi: T,
    chi_prime: T,
    n_atoms: usize,
}

impl<T: Real> CubicParams<T> {
    pub fn from_chi(chi: T, n_atoms: usize) -> Result<Self> {
        check_atoms(n_atoms)?;
        Ok(Self {
            chi,
            chi_prime: chi_prime_from_chi(chi, n_atoms),
            n_atoms,
        })
    }

    pub fn from_chi_prime(chi_prime: T, n_atoms: usize) -> Result<Self> {
        check_atoms(n_atoms)?;
        Ok(Self {
            chi: chi_from_chi_prime(chi_prime, n_atoms),
            chi_prime,
            n_atoms,
        })
    }

    pub fn chi(&self) -> T {
        self.chi
    }

    pub fn chi_prime(&self) -> T {
        self.chi_prime
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }
}

fn check_atoms(n_atoms: usize) -> Result<()> {
    if n_atoms == 0 {
        Err(Error::Domain("atom number must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `(N/2)^{3/2}`.
fn size_factor<T: Real>(n_atoms: usize) -> T {
    real::<T>(n_atoms as f64 / 2.0).powf(real(1.5))
}

/// `χ = 3 χ′ (N/2)^{3/2}`.
pub fn chi_from_chi_prime<T: Real>(chi_prime: T, n_atoms: usize) -> T {
    real::<T>(3.0) * chi_prime * size_factor::<T>(n_atoms)
}

/// `χ′ = (χ/3)(N/2)^{-3/2}`.
pub fn chi_prime_from_chi<T: Real>(chi: T, n_atoms: usize) -> T {
    chi / (real::<T>(3.0) * size_factor::<T>(n_atoms))
}

/// Squeezing in decibels, `10 log₁₀ ξ`.
pub fn xi_to_db<T: Real>(xi: T) -> Result<T> {
    if xi.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain(format!(
            "dB conversion needs a positive ratio, got {}",
            crate::to_f64(xi)
        )));
    }
    Ok(real::<T>(10.0) * xi.log10())
}

fn check_match<T: Real>(sys: &SpinSystem<T>, params: &CubicParams<T>) -> Result<()> {
    if sys.n_atoms() != params.n_atoms {
        return Err(Error::Domain(format!(
            "cubic parameters built for N = {} used with N = {}",
            params.n_atoms,
            sys.n_atoms()
        )));
    }
    Ok(())
}

/// Diagonal entries `exp(i χ′ m³)`.
pub fn cubic_phases<T: Real>(sys: &SpinSystem<T>, params: &CubicParams<T>) -> Result<Vec<Complex<T>>> {
    check_match(sys, params)?;
    Ok(sys
        .m_values()
        .into_iter()
        .map(|m| crate::linalg::polar(T::one(), params.chi_prime * m * m * m))
        .collect())
}

pub fn cubic_unitary<T: Real>(sys: &SpinSystem<T>, params: &CubicParams<T>) -> Result<CMatrix<T>> {
    let phases = cubic_phases(sys, params)?;
    Ok(CMatrix::from_diagonal(&CVector::from_vec(phases)))
}

/// `O_c(χ) = U_c Jy U_c†`, formed entrywise as `u_r (Jy)_{rc} ū_c`.
pub fn cubic_operator<T: Real>(sys: &SpinSystem<T>, params: &CubicParams<T>) -> Result<SpinOperator<T>> {
    let u = cubic_phases(sys, params)?;
    let jy = angular_momentum(sys, Axis::Y);
    let d = sys.dim();
    let m = CMatrix::from_fn(d, d, |r, c| u[r] * jy.matrix()[(r, c)] * u[c].conj());
    Ok(SpinOperator::from_parts(
        m,
        format!("O_c(chi'={})", crate::to_f64(params.chi_prime)),
    ))
}

/// The swapped convention `exp(i χ′ Jy³) Jz exp(-i χ′ Jy³)`.
pub fn cubic_operator_swapped<T: Real>(
    sys: &SpinSystem<T>,
    params: &CubicParams<T>,
) -> Result<SpinOperator<T>> {
    check_match(sys, params)?;
    let jy = angular_momentum(sys, Axis::Y);
    let jy3 = jy.matrix() * jy.matrix() * jy.matrix();
    // exp(i χ′ Jy³) = exp(-i (−χ′) Jy³)
    let u = crate::linalg::expm_hermitian(&jy3, -params.chi_prime);
    let jz = angular_momentum(sys, Axis::Z);
    Ok(SpinOperator::from_parts(
        &u * jz.matrix() * u.adjoint(),
        "O_c swapped (Jy^3 on Jz)",
    ))
}
