//! Husimi Q function of a collective-spin state on a `(θ, φ)` grid, with
//! Hammer equal-area projection coordinates for plotting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{polar, CVector};
use crate::spin::{QuantumState, SpinSystem};
use crate::{real, Real};

pub const MIN_THETA: usize = 16;
pub const MIN_PHI: usize = 32;

/// Spin coherent state `|θ, φ⟩`; `θ = 0` is the north pole `m = +j`.
/// Amplitudes are `√C(N, k) cos(θ/2)^k sin(θ/2)^(N-k) e^{-i(k-j)φ}` at Dicke
/// index `k`, evaluated in log space so that large `N` does not overflow.
pub fn coherent_state<T: Real>(sys: &SpinSystem<T>, theta: T, phi: T) -> CVector<T> {
    let n = sys.n_atoms();
    let half = real::<T>(0.5);
    let (c, s) = ((theta * half).cos().abs(), (theta * half).sin().abs());
    let (lc, ls) = (c.ln(), s.ln());
    let mut ln_binom = T::zero();
    CVector::from_iterator(
        n + 1,
        (0..=n).map(|k| {
            if k > 0 {
                ln_binom += real::<T>((n + 1 - k) as f64).ln() - real::<T>(k as f64).ln();
            }
            let mut ln_amp = half * ln_binom;
            if k > 0 {
                ln_amp += real::<T>(k as f64) * lc;
            }
            if k < n {
                ln_amp += real::<T>((n - k) as f64) * ls;
            }
            polar(ln_amp.exp(), -(sys.m(k) * phi))
        }),
    )
}

/// `Q(θ, φ) = ⟨θ, φ| ρ |θ, φ⟩`.
pub fn husimi_q<T: Real>(sys: &SpinSystem<T>, state: &QuantumState<T>, theta: T, phi: T) -> Result<T> {
    if state.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: state.dim() });
    }
    let cs = coherent_state(sys, theta, phi);
    Ok(match state {
        QuantumState::Pure(v) => cs.dotc(v).norm_sqr(),
        QuantumState::Mixed(rho) => cs.dotc(&(rho * &cs)).re,
    })
}

/// Hammer projection of latitude `lat` and longitude `lon ∈ [-π, π]`.
pub fn hammer<T: Real>(lat: T, lon: T) -> (T, T) {
    let two = real::<T>(2.0);
    let r2 = two.sqrt();
    let d = (T::one() + lat.cos() * (lon / two).cos()).sqrt();
    (two * r2 * lat.cos() * (lon / two).sin() / d, r2 * lat.sin() / d)
}

/// Solid angle of the grid cell centred at `theta`.
fn cell_area<T: Real>(theta: T, dt: T, dp: T) -> T {
    real::<T>(2.0) * theta.sin() * (dt * real::<T>(0.5)).sin() * dp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HusimiPoint<T: Real = f64> {
    pub theta: T,
    pub phi: T,
    pub q: T,
    pub u: T,
    pub v: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HusimiGrid<T: Real = f64> {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Row-major in `θ`, then `φ`.
    pub points: Vec<HusimiPoint<T>>,
    /// `(N+1)/(4π) ∫ Q dΩ`, with `Q` sampled at cell centres.
    pub normalization: T,
}

impl<T: Real> HusimiGrid<T> {
    /// Midpoint grid: `θ_i = (i + ½) π / n_θ`, `φ_k = -π + (k + ½) 2π / n_φ`.
    pub fn new(sys: &SpinSystem<T>, state: &QuantumState<T>, n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < MIN_THETA || n_phi < MIN_PHI {
            return Err(Error::Config(format!(
                "Husimi resolution must be at least {MIN_THETA}x{MIN_PHI}, got {n_theta}x{n_phi}"
            )));
        }
        let half = real::<T>(0.5);
        let dt = T::pi() / real::<T>(n_theta as f64);
        let dp = T::two_pi() / real::<T>(n_phi as f64);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut integral = T::zero();
        for i in 0..n_theta {
            let theta = (real::<T>(i as f64) + half) * dt;
            for k in 0..n_phi {
                let phi = -T::pi() + (real::<T>(k as f64) + half) * dp;
                let q = husimi_q(sys, state, theta, phi)?;
                integral += q * cell_area(theta, dt, dp);
                let (u, v) = hammer(T::frac_pi_2() - theta, phi);
                points.push(HusimiPoint { theta, phi, q, u, v });
            }
        }
        let normalization = integral * real::<T>(sys.dim() as f64) / (real::<T>(4.0) * T::pi());
        Ok(Self { n_theta, n_phi, points, normalization })
    }

    /// `(∫ (Q_a - Q_b)² dΩ)^{1/2}` on matching grids.
    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        if self.n_theta != other.n_theta || self.n_phi != other.n_phi {
            return Err(Error::Config("Husimi grids differ in resolution".into()));
        }
        let dt = T::pi() / real::<T>(self.n_theta as f64);
        let dp = T::two_pi() / real::<T>(self.n_phi as f64);
        let sum = self.points.iter().zip(&other.points).fold(T::zero(), |acc, (a, b)| {
            let d = a.q - b.q;
            acc + d * d * cell_area(a.theta, dt, dp)
        });
        Ok(sum.sqrt())
    }

    /// Grid point of largest `Q`.
    pub fn peak(&self) -> &HusimiPoint<T> {
        self.points
            .iter()
            .fold(&self.points[0], |b, p| if p.q > b.q { p } else { b })
    }
}
