//! Compressed-row operators for applying sparse generators to dense states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexMatrix;

#[derive(Debug, Clone)]
pub(crate) struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Keeps every entry that is not exactly zero.
    pub(crate) fn from_dense(m: &ComplexMatrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..rows {
            for j in 0..cols {
                let z = m[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    indices.push(j);
                    values.push(z);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    #[cfg(test)]
    pub(crate) fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `out = self · x` (`out` is overwritten).
    pub(crate) fn mul_dense_into(&self, x: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        debug_assert_eq!(x.nrows(), self.cols);
        debug_assert_eq!(out.nrows(), self.rows);
        debug_assert_eq!(out.ncols(), x.ncols());
        for c in 0..x.ncols() {
            let xc = x.column(c);
            let xs = xc.as_slice();
            let mut oc = out.column_mut(c);
            let os = oc.as_mut_slice();
            for (o, bounds) in os.iter_mut().zip(self.indptr.windows(2)) {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in bounds[0]..bounds[1] {
                    acc += self.values[k] * xs[self.indices[k]];
                }
                *o = acc;
            }
        }
    }
}

/// `dst = src†` for square matrices.
pub(crate) fn adjoint_into(src: &DMatrix<Complex64>, dst: &mut DMatrix<Complex64>) {
    let n = src.nrows();
    for j in 0..n {
        for i in 0..n {
            dst[(i, j)] = src[(j, i)].conj();
        }
    }
}

/// `dst += src†` for square matrices.
pub(crate) fn add_adjoint(dst: &mut DMatrix<Complex64>, src: &DMatrix<Complex64>) {
    let n = src.nrows();
    for j in 0..n {
        for i in 0..n {
            dst[(i, j)] += src[(j, i)].conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_product_matches_dense() {
        let a =
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[2.0, 0.0, -1.0], &[0.0, 0.0, 3.0]])
                .unwrap();
        let x = ComplexMatrix::from_fn(3, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5));
        let csr = CsrMatrix::from_dense(&a);
        assert_eq!(csr.nnz(), 4);
        let mut out = DMatrix::zeros(3, 2);
        csr.mul_dense_into(x.inner(), &mut out);
        let dense = &a * &x;
        assert!(ComplexMatrix::from_inner(out).max_abs_diff(&dense) < 1e-15);
    }

    #[test]
    fn adjoint_helpers() {
        let m = DMatrix::from_fn(3, 3, |i, j| {
            Complex64::new(i as f64, j as f64 + 2.0 * i as f64)
        });
        let mut dst = DMatrix::zeros(3, 3);
        adjoint_into(&m, &mut dst);
        assert_eq!(dst, m.adjoint());
        add_adjoint(&mut dst, &m);
        assert_eq!(dst, m.adjoint() * Complex64::new(2.0, 0.0));
    }
}
