//! Adaptive DOP853 integration of the master equation on dense states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dop853::{A, B, E3, E5, STAGES};
use crate::error::{Error, Result};
use crate::linalg::sparse::{add_adjoint, adjoint_into, CsrMatrix};

type Mat = DMatrix<Complex64>;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_step: f64,
    /// Rejected steps below this size abort the integration.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            initial_step: 1e-3,
            min_step: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

impl OdeOptions {
    /// Same step control with both tolerances set to `tol`.
    pub fn with_tol(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.abs_tol) || !positive(self.rel_tol) || !positive(self.initial_step) {
            return Err(Error::domain(
                "ODE tolerances and initial step must be positive",
            ));
        }
        if self.min_step.is_nan() || self.min_step < 0.0 || self.max_steps == 0 {
            return Err(Error::domain("invalid ODE step limits"));
        }
        Ok(())
    }
}

/// `ρ ↦ Kρ + ρK† + Σ LρL†` with sparse `K` and `L`. Written with adjoints
/// so it stays exact for non-Hermitian `ρ`.
pub(crate) struct SparseRhs<'a> {
    k: &'a CsrMatrix,
    ls: &'a [CsrMatrix],
    t1: Mat,
    t2: Mat,
}

impl<'a> SparseRhs<'a> {
    pub(crate) fn new(k: &'a CsrMatrix, ls: &'a [CsrMatrix], dim: usize) -> Self {
        Self {
            k,
            ls,
            t1: Mat::zeros(dim, dim),
            t2: Mat::zeros(dim, dim),
        }
    }

    pub(crate) fn eval(&mut self, rho: &Mat, out: &mut Mat) {
        self.k.mul_dense_into(rho, out);
        adjoint_into(rho, &mut self.t1);
        self.k.mul_dense_into(&self.t1, &mut self.t2);
        add_adjoint(out, &self.t2);
        for l in self.ls {
            l.mul_dense_into(rho, &mut self.t1);
            adjoint_into(&self.t1, &mut self.t2);
            l.mul_dense_into(&self.t2, &mut self.t1);
            add_adjoint(out, &self.t1);
        }
    }
}

/// Integrates from `t = 0` and returns the state at each of the sorted
/// `times`. Steps are shortened to land on every requested time.
pub(crate) fn integrate(
    rhs: &mut SparseRhs<'_>,
    y0: &Mat,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Mat>> {
    opts.validate()?;
    let (r, c) = y0.shape();
    let mut y = y0.clone();
    let mut y_new = Mat::zeros(r, c);
    let mut stage = Mat::zeros(r, c);
    let mut k: Vec<Mat> = (0..STAGES).map(|_| Mat::zeros(r, c)).collect();
    let mut f_new = Mat::zeros(r, c);
    rhs.eval(&y, &mut k[0]);

    let mut t = 0.0_f64;
    let mut h = opts.initial_step;
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(times.len());

    for &target in times {
        while t < target {
            let remaining = target - t;
            let clamped = h >= remaining;
            let mut h_try = if clamped { remaining } else { h };
            let mut rejected = false;
            loop {
                steps += 1;
                if steps > opts.max_steps {
                    return Err(Error::Numerical(format!(
                        "ODE step budget {} exhausted at t = {t}",
                        opts.max_steps
                    )));
                }
                for s in 1..STAGES {
                    stage.copy_from(&y);
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s][j];
                        if a != 0.0 {
                            axpy(&mut stage, h_try * a, kj);
                        }
                    }
                    rhs.eval(&stage, &mut k[s]);
                }
                y_new.copy_from(&y);
                for (j, kj) in k.iter().enumerate() {
                    if B[j] != 0.0 {
                        axpy(&mut y_new, h_try * B[j], kj);
                    }
                }
                let err = error_norm(&k, &y, &y_new, h_try, opts);
                if !err.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite error estimate at t = {t}"
                    )));
                }
                if err <= 1.0 {
                    let mut factor = if err == 0.0 {
                        MAX_FACTOR
                    } else {
                        (SAFETY * err.powf(ERROR_EXPONENT)).min(MAX_FACTOR)
                    };
                    if rejected {
                        factor = factor.min(1.0);
                    }
                    let proposed = h_try * factor;
                    h = if clamped { h.max(proposed) } else { proposed };
                    t = if clamped { target } else { t + h_try };
                    std::mem::swap(&mut y, &mut y_new);
                    rhs.eval(&y, &mut f_new);
                    std::mem::swap(&mut k[0], &mut f_new);
                    break;
                }
                h_try *= (SAFETY * err.powf(ERROR_EXPONENT)).max(MIN_FACTOR);
                rejected = true;
                if h_try < opts.min_step {
                    return Err(Error::Numerical(format!(
                        "ODE step size {h_try:e} below minimum at t = {t}"
                    )));
                }
                h = h_try;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// `y += a·x`.
fn axpy(y: &mut Mat, a: f64, x: &Mat) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += xi * a;
    }
}

fn error_norm(k: &[Mat], y: &Mat, y_new: &Mat, h: f64, opts: &OdeOptions) -> f64 {
    let n = y.len();
    let (mut e5, mut e3) = (0.0, 0.0);
    for idx in 0..n {
        let scale = opts.abs_tol + opts.rel_tol * y[idx].norm().max(y_new[idx].norm());
        let (mut a5, mut a3) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (j, kj) in k.iter().enumerate() {
            let z = kj[idx];
            a5 += z * E5[j];
            a3 += z * E3[j];
        }
        e5 += (a5 / scale).norm_sqr();
        e3 += (a3 / scale).norm_sqr();
    }
    if e5 == 0.0 && e3 == 0.0 {
        return 0.0;
    }
    h.abs() * e5 / ((e5 + 0.01 * e3) * n as f64).sqrt()
}
