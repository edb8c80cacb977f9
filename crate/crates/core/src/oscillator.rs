//! Harmonic-oscillator limit of cubic squeezing.
//!
//! Near a pole of a large collective spin the transverse components behave
//! as quadratures, `Jz ~ √(N/2) x` and `Jy ~ √(N/2) p`, and the witness
//! becomes `O_cv(χ) = p + χ x²`. The free class is the set of pure Gaussian
//! states; the free operations are phase rotations and displacements.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cabs, CMatrix, CVector};
use crate::minimize::{argmin, golden_section, log_grid, nelder_mead, SimplexOptions};
use crate::{real, Real};

pub const DEFAULT_CUTOFF: usize = 200;

/// Truncated Fock space with quadratures `x = (a + a†)/√2`,
/// `p = (a - a†)/(i√2)`.
#[derive(Debug, Clone)]
pub struct FockSpace<T: Real = f64> {
    cutoff: usize,
    x: CMatrix<T>,
    p: CMatrix<T>,
}

impl<T: Real> FockSpace<T> {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 10 {
            return Err(Error::Domain(format!("Fock cutoff must be at least 10, got {cutoff}")));
        }
        let s = T::one() / real::<T>(2.0).sqrt();
        let zero = Complex::new(T::zero(), T::zero());
        let mut x = CMatrix::from_element(cutoff, cutoff, zero);
        let mut p = x.clone();
        for n in 1..cutoff {
            let a = real::<T>(n as f64).sqrt() * s;
            x[(n - 1, n)] = Complex::new(a, T::zero());
            x[(n, n - 1)] = Complex::new(a, T::zero());
            p[(n - 1, n)] = Complex::new(T::zero(), -a);
            p[(n, n - 1)] = Complex::new(T::zero(), a);
        }
        Ok(Self { cutoff, x, p })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn x(&self) -> &CMatrix<T> {
        &self.x
    }

    pub fn p(&self) -> &CMatrix<T> {
        &self.p
    }

    /// `max |[x, p] - i|` over the leading `cutoff - 2` levels.
    pub fn commutator_residual(&self) -> T {
        let c = &self.x * &self.p - &self.p * &self.x;
        let bulk = self.cutoff - 2;
        let mut worst = T::zero();
        for r in 0..bulk {
            for k in 0..bulk {
                let target = if r == k { Complex::new(T::zero(), T::one()) } else { Complex::new(T::zero(), T::zero()) };
                worst = worst.max(cabs(c[(r, k)] - target));
            }
        }
        worst
    }

    /// Fock vacuum.
    pub fn vacuum(&self) -> CVector<T> {
        self.fock(0)
    }

    pub fn fock(&self, n: usize) -> CVector<T> {
        let mut v = CVector::zeros(self.cutoff);
        v[n.min(self.cutoff - 1)] = Complex::new(T::one(), T::zero());
        v
    }
}

/// `p + χ x²`.
pub fn cv_cubic_operator<T: Real>(space: &FockSpace<T>, chi: T) -> CMatrix<T> {
    space.p() + (space.x() * space.x()).map(|z| z * chi)
}

/// First and second moments of a single-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments<T: Real = f64> {
    pub mean_x: T,
    pub mean_p: T,
    pub var_x: T,
    pub var_p: T,
    pub cov_xp: T,
}

impl<T: Real> GaussianMoments<T> {
    pub fn new(mean_x: T, mean_p: T, var_x: T, var_p: T, cov_xp: T) -> Result<Self> {
        let det = var_x * var_p - cov_xp * cov_xp;
        if !(var_x > T::zero() && var_p > T::zero()) || det < real::<T>(0.25 - 1e-12) {
            return Err(Error::Domain(format!(
                "covariance violates the uncertainty bound (det = {})",
                crate::to_f64(det)
            )));
        }
        Ok(Self { mean_x, mean_p, var_x, var_p, cov_xp })
    }

    /// Pure state with `var_p` fixed by `var_x var_p - cov² = 1/4`.
    pub fn pure(mean_x: T, var_x: T, cov_xp: T) -> Result<Self> {
        let var_p = (real::<T>(0.25) + cov_xp * cov_xp) / var_x;
        Self::new(mean_x, T::zero(), var_x, var_p, cov_xp)
    }

    /// `var(p + χ x²)` from the Gaussian moment expansion. Odd central
    /// moments vanish and `var(δx²) = 2 Vx²`, which leaves
    /// `Vp + 4χ x̄ Cxp + 4χ² x̄² Vx + 2χ² Vx²`, free of `p̄`.
    pub fn cubic_variance(&self, chi: T) -> T {
        let two = real::<T>(2.0);
        let four = real::<T>(4.0);
        self.var_p
            + four * chi * self.mean_x * self.cov_xp
            + four * chi * chi * self.mean_x * self.mean_x * self.var_x
            + two * chi * chi * self.var_x * self.var_x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMin<T: Real = f64> {
    pub min_variance: T,
    pub optimal: GaussianMoments<T>,
    /// The infimum is approached only as a squeezing parameter diverges (χ = 0).
    pub divergent: bool,
    pub converged: bool,
}

/// Minimum of `var(p + χ x²)` over pure Gaussian states: simplex over
/// `(x̄, ln Vx, Cxp)` from eight fixed starting points.
pub fn gaussian_min_variance<T: Real>(chi: T) -> Result<GaussianMin<T>> {
    if chi == T::zero() {
        let tiny = real::<T>(1e-8);
        return Ok(GaussianMin {
            min_variance: T::zero(),
            optimal: GaussianMoments::pure(T::zero(), T::one() / tiny, T::zero())?,
            divergent: true,
            converged: true,
        });
    }
    let objective = |z: &[T]| -> T {
        let vx = z[1].exp();
        let vp = (real::<T>(0.25) + z[2] * z[2]) / vx;
        GaussianMoments { mean_x: z[0], mean_p: T::zero(), var_x: vx, var_p: vp, cov_xp: z[2] }.cubic_variance(chi)
    };
    let opts = SimplexOptions {
        step: real(0.5),
        diameter_tol: real(1e-10),
        max_evaluations: 20_000,
    };
    let starts: [[f64; 3]; 8] = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, -0.5],
        [-1.0, 0.0, 0.5],
        [0.5, -1.0, 0.0],
        [-0.5, 1.0, 0.0],
        [0.0, -2.0, 0.3],
        [0.0, 2.0, -0.3],
        [2.0, 0.5, 1.0],
    ];
    let mut best: Option<(T, Vec<T>)> = None;
    let mut converged = true;
    for s in starts {
        let start: Vec<T> = s.iter().map(|&v| real::<T>(v)).collect();
        let r = nelder_mead(objective, &start, &opts)?;
        converged &= r.converged;
        if best.as_ref().is_none_or(|b| r.value < b.0) {
            best = Some((r.value, r.x));
        }
    }
    let (v, z) = best.unwrap();
    Ok(GaussianMin {
        min_variance: v,
        optimal: GaussianMoments::pure(z[0], z[1].exp(), z[2])?,
        divergent: false,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvXi<T: Real = f64> {
    pub xi: T,
    pub chi: T,
    pub numerator_variance: T,
    pub denominator_variance: T,
    /// Optimal phase rotation `e^{-iθ n}`.
    pub theta: T,
    /// Optimal displacement along `x`.
    pub shift: T,
    pub singular: bool,
}

/// Witness evaluator for one state; caches `x²`.
struct CvState<'a, T: Real> {
    space: &'a FockSpace<T>,
    psi: &'a CVector<T>,
    x2: CMatrix<T>,
}

impl<'a, T: Real> CvState<'a, T> {
    fn new(space: &'a FockSpace<T>, psi: &'a CVector<T>) -> Result<Self> {
        if psi.len() != space.cutoff() {
            return Err(Error::DimensionMismatch { expected: space.cutoff(), found: psi.len() });
        }
        let norm = psi.norm_squared();
        if (norm - T::one()).abs() > real(1e-10) {
            return Err(Error::Domain("Fock state is not normalized".into()));
        }
        let top = psi[space.cutoff() - 1].norm_sqr();
        if top >= real(1e-10) {
            return Err(Error::Truncation { population: crate::to_f64(top) });
        }
        Ok(Self { space, psi, x2: space.x() * space.x() })
    }

    /// Minimum over the displacement `s` of `var(p + χ (x - s)²)` for the
    /// state rotated by `θ`. The shift enters linearly (`-2χ s x`), so the
    /// optimum is `var(A) - cov(A, x)² / var(x)` with `A = p + χ x²`.
    fn variance(&self, chi: T, theta: T) -> (T, T) {
        let phi: CVector<T> = CVector::from_iterator(
            self.psi.len(),
            self.psi
                .iter()
                .enumerate()
                .map(|(n, z)| *z * crate::linalg::polar(T::one(), -(theta * real::<T>(n as f64)))),
        );
        let xv = self.space.x() * &phi;
        let av = self.space.p() * &phi + (&self.x2 * &phi).map(|z| z * chi);
        let mean = |v: &CVector<T>| phi.dotc(v).re;
        let (mx, ma) = (mean(&xv), mean(&av));
        let var_x = xv.norm_squared() - mx * mx;
        let var_a = av.norm_squared() - ma * ma;
        let cov = xv.dotc(&av).re - mx * ma;
        if chi == T::zero() || var_x <= T::zero() {
            return (var_a.max(T::zero()), T::zero());
        }
        let shift = cov / (real::<T>(2.0) * chi * var_x);
        ((var_a - cov * cov / var_x).max(T::zero()), shift)
    }

    fn min_over_phase(&self, chi: T, steps: usize) -> (T, T, T) {
        let step = T::two_pi() / real::<T>(steps as f64);
        let vals: Vec<T> = (0..steps).map(|k| self.variance(chi, step * real::<T>(k as f64)).0).collect();
        let k = argmin(&vals).unwrap_or(0);
        let mut theta = step * real::<T>(k as f64);
        let g = golden_section(|t| self.variance(chi, t).0, theta - step, theta + step, real(1e-9));
        if g.value < vals[k] {
            theta = g.x;
        }
        let (v, s) = self.variance(chi, theta);
        (v, theta, s)
    }
}

/// `ξ` at fixed `χ`: witness variance minimized over phase rotations and
/// displacements, divided by the Gaussian minimum.
pub fn cv_xi<T: Real>(space: &FockSpace<T>, state: &CVector<T>, chi: T) -> Result<CvXi<T>> {
    let st = CvState::new(space, state)?;
    evaluate(&st, chi)
}

fn evaluate<T: Real>(st: &CvState<'_, T>, chi: T) -> Result<CvXi<T>> {
    let (num, theta, shift) = st.min_over_phase(chi, 72);
    let den = gaussian_min_variance(chi)?;
    let singular = den.divergent || den.min_variance <= T::zero();
    Ok(CvXi {
        xi: if singular { T::one() / T::zero() } else { num / den.min_variance },
        chi,
        numerator_variance: num,
        denominator_variance: den.min_variance,
        theta,
        shift,
        singular,
    })
}

/// `ξ` additionally minimized over `χ ∈ [lo, hi]` (both signs): log grid,
/// then golden refinement in `ln |χ|`.
pub fn cv_xi_resource<T: Real>(
    space: &FockSpace<T>,
    state: &CVector<T>,
    lo: T,
    hi: T,
    points: usize,
) -> Result<CvXi<T>> {
    let st = CvState::new(space, state)?;
    let grid = log_grid(lo, hi, points)?;
    let mut best: Option<CvXi<T>> = None;
    for sign in [T::one(), -T::one()] {
        let rows = grid.iter().map(|&c| evaluate(&st, sign * c)).collect::<Result<Vec<_>>>()?;
        let xis: Vec<T> = rows.iter().map(|r| r.xi).collect();
        let Some(i) = argmin(&xis) else { continue };
        let mut cand = rows[i];
        if grid.len() > 1 {
            let a = grid[i.saturating_sub(1)].ln();
            let b = grid[(i + 1).min(grid.len() - 1)].ln();
            let g = golden_section(
                |lc| evaluate(&st, sign * lc.exp()).map(|r| r.xi).unwrap_or(T::max_value().unwrap()),
                a,
                b,
                real(1e-6),
            );
            if g.value < cand.xi {
                cand = evaluate(&st, sign * g.x.exp())?;
            }
        }
        // exact ties keep the positive sign
        let better = match &best {
            None => true,
            Some(b) => cand.xi < b.xi - real::<T>(1e-9) * b.xi.abs(),
        };
        if better {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Numerical("no finite cv squeezing value in range".into()))
}

/// `(|0⟩ + |1⟩)/√2`, the oscillator image of the equal Dicke superposition.
pub fn cv_test_state<T: Real>(space: &FockSpace<T>) -> CVector<T> {
    let s = T::one() / real::<T>(2.0).sqrt();
    let mut v = CVector::zeros(space.cutoff());
    v[0] = Complex::new(s, T::zero());
    v[1] = Complex::new(s, T::zero());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_residual, pure_moments};

    #[test]
    fn commutator_on_bulk() {
        let f = FockSpace::<f64>::new(200).unwrap();
        assert!(f.commutator_residual() < 1e-10);
        assert!(FockSpace::<f64>::new(5).is_err());
        let o = cv_cubic_operator(&f, 0.7);
        assert!(hermiticity_residual(&o) < 1e-12);
        // [x, p + χx²] = i on the bulk
        let c = f.x() * &o - &o * f.x();
        for k in 0..150 {
            assert!((c[(k, k)] - Complex::new(0.0, 1.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_chi_is_p() {
        let f = FockSpace::<f64>::new(20).unwrap();
        assert_eq!(cv_cubic_operator(&f, 0.0), *f.p());
    }

    #[test]
    fn vacuum_variance() {
        let f = FockSpace::<f64>::new(60).unwrap();
        for chi in [0.0, 0.3, 1.1] {
            let (_, v) = pure_moments(&cv_cubic_operator(&f, chi), &f.vacuum());
            assert!((v - (0.5 + chi * chi * 0.5)).abs() < 1e-12);
            let g = GaussianMoments::new(0.0, 0.0, 0.5, 0.5, 0.0).unwrap();
            assert!((g.cubic_variance(chi) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_reject_uncertainty_violation() {
        assert!(GaussianMoments::<f64>::new(0.0, 0.0, 0.2, 0.2, 0.0).is_err());
        assert!(GaussianMoments::<f64>::pure(0.3, 2.0, -0.4).is_ok());
    }

    #[test]
    fn gaussian_minimum_closed_form() {
        for chi in [0.01f64, 0.1, 0.5, 2.0] {
            let g = gaussian_min_variance(chi).unwrap();
            let exact = 0.375 * (16.0 * chi * chi).powf(1.0 / 3.0);
            assert!(((g.min_variance - exact) / exact).abs() < 1e-8, "chi={chi}");
            let neg = gaussian_min_variance(-chi).unwrap();
            assert!(((neg.min_variance - g.min_variance) / exact).abs() < 1e-8);
            assert!(g.converged && !g.divergent);
        }
        let z = gaussian_min_variance(0.0f64).unwrap();
        assert!(z.divergent && z.min_variance == 0.0);
    }

    #[test]
    fn vacuum_is_not_squeezed() {
        let f = FockSpace::<f64>::new(80).unwrap();
        for chi in [0.05, 0.5, 2.0] {
            let r = cv_xi(&f, &f.vacuum(), chi).unwrap();
            assert!(r.xi >= 1.0 - 1e-9, "chi={chi} xi={}", r.xi);
        }
    }

    #[test]
    fn truncation_guard() {
        let f = FockSpace::<f64>::new(20).unwrap();
        let mut v = CVector::zeros(20);
        v[19] = Complex::new(1.0, 0.0);
        assert!(matches!(cv_xi(&f, &v, 0.5), Err(Error::Truncation { .. })));
    }
}
