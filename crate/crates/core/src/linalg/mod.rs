//! Dense complex linear algebra used by the walk simulations.
//!
//! Vectorization is row-stacking: `vec(M)[i·n + j] = M[i][j]`, so that
//! `vec(A·X·B) = (A ⊗ Bᵀ)·vec(X)`.

mod expm;
mod fit;
pub(crate) mod sparse;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::{EIGEN_HERMITIAN_TOL, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};

pub use expm::expm;
pub use fit::linear_fit;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Rejects NaN or infinite entries.
    pub fn new(rows: usize, cols: usize, row_major: Vec<Complex64>) -> Result<Self> {
        if row_major.len() != rows * cols {
            return Err(Error::domain(format!(
                "{} entries given for a {rows}x{cols} matrix",
                row_major.len()
            )));
        }
        if row_major
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &row_major)))
    }

    /// Builds a matrix from real row vectors.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::domain("ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_inner(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry modulus; 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows())
            .map(|i| self.0.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols())
            .map(|j| self.0.column(j).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |M − M†|` over all entries; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols() {
            return Err(Error::domain(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols()
            )));
        }
        let x = nalgebra::DVector::from_column_slice(v);
        Ok((&self.0 * x).iter().copied().collect())
    }

    /// Copy with rows and columns both permuted: `out[a][b] = self[order[a]][order[b]]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self::from_fn(order.len(), order.len(), |a, b| {
            self.0[(order[a], order[b])]
        })
    }

    /// Entrywise maximum modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r.checked_mul(c).is_some() => (r, c),
        _ => return Err(Error::Size("kronecker product dimensions overflow".into())),
    };
    let (br, bc) = (b.rows(), b.cols());
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a.0[(i / br, j / bc)] * b.0[(i % br, j % bc)]
    }))
}

/// Row-stacking vectorization of a square matrix.
pub fn vectorize(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::domain(format!(
            "vectorize expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    Ok((0..n * n).map(|k| m.0[(k / n, k % n)]).collect())
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[Complex64], dim: usize) -> Result<ComplexMatrix> {
    if dim.checked_mul(dim) != Some(v.len()) {
        return Err(Error::domain(format!(
            "vector of length {} is not {dim}²",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| v[i * dim + j]))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = m.hermitian_defect();
    if defect > EIGEN_HERMITIAN_TOL {
        return Err(Error::domain(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let h = (&m.0 + m.0.adjoint()) * Complex64::new(0.5, 0.0);
    let mut evs: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    evs.sort_by(f64::total_cmp);
    Ok(evs)
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` against the density-matrix invariants.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::check(&m)?;
        Ok(Self { mat: m })
    }

    fn check(m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() {
            return Err(Error::domain("density matrix must be square"));
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Numerical(format!("Hermiticity defect {defect:e}")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::Numerical(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::Numerical(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `|i⟩⟨i|` in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::domain(format!(
                "basis index {i} out of range for dim {dim}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(i, i)] = ONE;
        Ok(Self { mat: m })
    }

    /// Uniform mixture of the basis projectors `|i⟩⟨i|` for `i` in `indices`.
    pub fn uniform_mixture(dim: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::domain("empty mixture"));
        }
        let w = 1.0 / indices.len() as f64;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for &i in indices {
            if i >= dim {
                return Err(Error::domain(format!(
                    "basis index {i} out of range for dim {dim}"
                )));
            }
            m[(i, i)] += Complex64::new(w, 0.0);
        }
        Self::new(m)
    }

    /// Pure state `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = psi.len();
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `⟨i|ρ|i⟩`, the population of basis state `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.mat[(i, i)].re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)
            .ok()
            .and_then(|v| v.first().copied())
            .unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lcg_matrix(seed: &mut u64, rows: usize, cols: usize) -> ComplexMatrix {
        let mut next = || {
            *seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));

        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let two = ComplexMatrix::from_real_rows(&[&[2.0]]).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(kron(&a, &two).unwrap(), expected);
    }

    #[test]
    fn kron_mixed_product_on_vectors() {
        let mut seed = 7;
        let a = lcg_matrix(&mut seed, 3, 3);
        let b = lcg_matrix(&mut seed, 3, 3);
        let x = lcg_matrix(&mut seed, 3, 1);
        let y = lcg_matrix(&mut seed, 3, 1);
        let lhs = &kron(&a, &b).unwrap() * &kron(&x, &y).unwrap();
        let rhs = kron(&(&a * &x), &(&b * &y)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn vectorize_is_row_stacking() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let v = vectorize(&m).unwrap();
        assert_eq!(v, vec![c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        assert_eq!(devectorize(&v, 2).unwrap(), m);
        assert!(vectorize(&ComplexMatrix::zeros(2, 3)).is_err());
        assert!(devectorize(&v, 3).is_err());
    }

    #[test]
    fn vec_of_product_matches_kron_with_transpose() {
        let mut seed = 11;
        for _ in 0..100 {
            let a = lcg_matrix(&mut seed, 3, 3);
            let x = lcg_matrix(&mut seed, 3, 3);
            let b = lcg_matrix(&mut seed, 3, 3);
            let lhs = vectorize(&(&(&a * &x) * &b)).unwrap();
            let op = kron(&a, &b.transpose()).unwrap();
            let rhs = op.mul_vec(&vectorize(&x).unwrap()).unwrap();
            let err = lhs
                .iter()
                .zip(&rhs)
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "err {err}");
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let d = ComplexMatrix::from_diagonal(&[c(3., 0.), c(1., 0.), c(2., 0.)]);
        let ev = hermitian_eigenvalues(&d).unwrap();
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let ev = hermitian_eigenvalues(&x).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);

        let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&skew),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn eigenvalues_satisfy_trace_identities() {
        let mut seed = 3;
        let a = lcg_matrix(&mut seed, 5, 5);
        let h = &a + &a.adjoint();
        let ev = hermitian_eigenvalues(&h).unwrap();
        let tr = h.trace().re;
        let tr2 = (&h * &h).trace().re;
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-10);
        assert!((ev.iter().map(|x| x * x).sum::<f64>() - tr2).abs() < 1e-10);
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::basis(3, 1).is_ok());
        assert!(DensityMatrix::basis(3, 3).is_err());
        let half = DensityMatrix::uniform_mixture(2, &[0, 1]).unwrap();
        assert!((half.population(0) - 0.5).abs() < 1e-15);

        let bad_trace = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.4]]).unwrap();
        assert!(DensityMatrix::new(bad_trace).is_err());
        let not_psd = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]).unwrap();
        assert!(DensityMatrix::new(not_psd).is_err());
        let not_herm = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(DensityMatrix::new(not_herm).is_err());
    }

    #[test]
    fn construction_rejects_non_finite() {
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::new(1, 2, vec![c(1.0, 0.0)]).is_err());
    }
}
