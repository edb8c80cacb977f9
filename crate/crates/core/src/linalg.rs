//! Dense complex linear algebra helpers built on `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::Real;
#[cfg(test)]
use crate::real;

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending
/// order. Column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn new(m: &CMatrix<T>) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let n = m.nrows();
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i t H)` assembled from the spectral decomposition.
    pub fn exp_i(&self, t: T) -> CMatrix<T> {
        let phases: Vec<Complex<T>> = self
            .values
            .iter()
            .map(|&w| polar(T::one(), -(t * w)))
            .collect();
        let mut scaled = self.vectors.clone();
        for (c, ph) in phases.iter().enumerate() {
            for x in scaled.column_mut(c).iter_mut() {
                *x *= *ph;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// Applies `exp(-i t H)` to a vector without forming the matrix.
    pub fn apply_exp_i(&self, t: T, v: &CVector<T>) -> CVector<T> {
        let mut coeffs = self.vectors.ad_mul(v);
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c *= polar(T::one(), -(t * self.values[k]));
        }
        &self.vectors * coeffs
    }

    /// Coefficients of `v` in the eigenbasis.
    pub fn project(&self, v: &CVector<T>) -> CVector<T> {
        self.vectors.ad_mul(v)
    }
}

/// `exp(-i t H)` for a Hermitian generator, via eigendecomposition.
pub fn expm_hermitian<T: Real>(h: &CMatrix<T>, t: T) -> CMatrix<T> {
    HermitianEigen::new(h).exp_i(t)
}

/// Largest absolute entry.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// Largest absolute entry of `M - M†`.
pub fn hermiticity_residual<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for r in 0..n {
        for c in r..n {
            worst = worst.max(cabs(m[(r, c)] - m[(c, r)].conj()));
        }
    }
    worst
}

pub fn is_hermitian<T: Real>(m: &CMatrix<T>, rel: T) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = max_abs(m).max(T::one());
    hermiticity_residual(m) <= rel * scale
}

pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b - b * a
}

/// Largest absolute entry of `U†U - I`.
pub fn unitarity_residual<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    max_abs(&(u.ad_mul(u) - CMatrix::<T>::identity(n, n)))
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
#[inline]
pub fn inner<T: Real>(a: &CVector<T>, b: &CVector<T>) -> Complex<T> {
    a.dotc(b)
}

pub fn norm_sqr<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Mean and variance of a Hermitian matrix on a pure state, sharing one
/// matrix-vector product: `var = ‖Oψ‖² − ⟨ψ|O|ψ⟩²`.
pub fn pure_moments<T: Real>(op: &CMatrix<T>, psi: &CVector<T>) -> (T, T) {
    let o_psi = op * psi;
    let mean = psi.dotc(&o_psi).re;
    let second = norm_sqr(&o_psi);
    (mean, second - mean * mean)
}

/// `r·e^{iθ}`.
#[inline]
pub fn polar<T: Real>(r: T, theta: T) -> Complex<T> {
    Complex::new(r * theta.cos(), r * theta.sin())
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[cfg(test)]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(real(re), real(im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = CMatrix::<f64>::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.0, 0.0),
                c(0.0, -1.0),
                c(-1.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 0.0),
                c(0.5, 0.0),
                c(0.3, 0.0),
            ],
        );
        let e = HermitianEigen::new(&m);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            3,
            e.values.iter().map(|&w| Complex::new(w, 0.0)),
        ));
        let rebuilt = &e.vectors * d * e.vectors.adjoint();
        assert!(max_abs(&(rebuilt - &m)) < 1e-12);
    }

    #[test]
    fn exp_of_hermitian_is_unitary() {
        let h = CMatrix::<f64>::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, -2.0), c(1.0, 2.0), c(3.0, 0.0)]);
        let u = expm_hermitian(&h, 0.7);
        assert!(unitarity_residual(&u) < 1e-13);
        let v = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let direct = &u * &v;
        let applied = HermitianEigen::new(&h).apply_exp_i(0.7, &v);
        assert!((direct - applied).norm() < 1e-13);
    }
}
