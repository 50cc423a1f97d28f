//! GKSL generators and time evolution.
//!
//! A generator holds an optional Hamiltonian `H`, an optional locally
//! rotating Hamiltonian `H_rot`, a set of Lindblad operators and an optional
//! interaction weight `ω`:
//!
//! ```text
//! dρ/dt = −i(1−ω)[H, ρ] + ω(−i[H_rot, ρ] + Σ_L (LρL† − ½{L†L, ρ}))
//! ```
//!
//! Without `ω` every term has coefficient one.

mod dop853;
mod ode;

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::sparse::CsrMatrix;
use crate::linalg::{devectorize, expm, kron, vectorize, ComplexMatrix, DensityMatrix};
use crate::operators::LindbladSet;
use crate::tolerances::{HERMITIAN_TOL, STATIONARY_RESIDUAL};

pub use ode::OdeOptions;

/// Largest dimension accepted by the superoperator path.
pub const MAX_SUPEROPERATOR_DIM: usize = 64;

/// Dimension up to which [`Method::Auto`] uses the superoperator exponential.
pub const AUTO_EXPM_DIM: usize = 16;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Propagation strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Exponential of the vectorized generator.
    Expm,
    /// Adaptive Runge–Kutta integration of the master equation.
    Ode(OdeOptions),
    /// `Expm` up to [`AUTO_EXPM_DIM`], `Ode` above.
    Auto(OdeOptions),
}

impl Default for Method {
    fn default() -> Self {
        Method::Auto(OdeOptions::default())
    }
}

#[derive(Debug, Clone)]
pub struct GkslGenerator {
    dim: usize,
    hamiltonian: Option<ComplexMatrix>,
    rotating: Option<ComplexMatrix>,
    lindblads: LindbladSet,
    omega: Option<f64>,
    derived: OnceLock<Derived>,
}

/// Cached forms: `K = −i·H_eff − ½·w·Σ L†L` and `√w·L`.
#[derive(Debug, Clone)]
struct Derived {
    k: ComplexMatrix,
    scaled: Vec<ComplexMatrix>,
    k_sparse: CsrMatrix,
    scaled_sparse: Vec<CsrMatrix>,
}

impl GkslGenerator {
    /// Generator with only a dissipative part.
    pub fn new(lindblads: LindbladSet) -> Self {
        Self {
            dim: lindblads.dim(),
            hamiltonian: None,
            rotating: None,
            lindblads,
            omega: None,
            derived: OnceLock::new(),
        }
    }

    /// Generator with no Hamiltonian and no Lindblad operators.
    pub fn zero(dim: usize) -> Self {
        Self::new(LindbladSet::empty(dim))
    }

    pub fn with_hamiltonian(mut self, h: ComplexMatrix) -> Result<Self> {
        self.check_hermitian(&h, "Hamiltonian")?;
        self.hamiltonian = Some(h);
        self.derived = OnceLock::new();
        Ok(self)
    }

    pub fn with_rotating(mut self, h: ComplexMatrix) -> Result<Self> {
        self.check_hermitian(&h, "rotating Hamiltonian")?;
        self.rotating = Some(h);
        self.derived = OnceLock::new();
        Ok(self)
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::domain(format!("omega {omega} outside [0, 1]")));
        }
        self.omega = Some(omega);
        self.derived = OnceLock::new();
        Ok(self)
    }

    fn check_hermitian(&self, h: &ComplexMatrix, what: &str) -> Result<()> {
        if h.rows() != self.dim || h.cols() != self.dim {
            return Err(Error::domain(format!(
                "{what} is {}x{}, generator dimension is {}",
                h.rows(),
                h.cols(),
                self.dim
            )));
        }
        let defect = h.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::domain(format!(
                "{what} is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> Option<&ComplexMatrix> {
        self.hamiltonian.as_ref()
    }

    pub fn rotating(&self) -> Option<&ComplexMatrix> {
        self.rotating.as_ref()
    }

    pub fn lindblads(&self) -> &LindbladSet {
        &self.lindblads
    }

    pub fn omega(&self) -> Option<f64> {
        self.omega
    }

    /// Coefficients of the Hamiltonian and of the (rotating + dissipative) part.
    fn weights(&self) -> (f64, f64) {
        match self.omega {
            Some(w) => (1.0 - w, w),
            None => (1.0, 1.0),
        }
    }

    /// `(1−ω)·H + ω·H_rot` (or `H + H_rot` without a weight).
    pub fn effective_hamiltonian(&self) -> ComplexMatrix {
        let (ch, cd) = self.weights();
        let mut h = ComplexMatrix::zeros(self.dim, self.dim);
        if let Some(ham) = &self.hamiltonian {
            h = &h + &ham.scale_real(ch);
        }
        if let Some(rot) = &self.rotating {
            h = &h + &rot.scale_real(cd);
        }
        h
    }

    fn derived(&self) -> &Derived {
        self.derived.get_or_init(|| {
            let (_, cd) = self.weights();
            let mut k = self.effective_hamiltonian().scale(-I);
            for l in self.lindblads.iter() {
                k = &k - &(&l.adjoint() * l).scale_real(0.5 * cd);
            }
            let scaled: Vec<_> = self
                .lindblads
                .iter()
                .map(|l| l.scale_real(cd.sqrt()))
                .collect();
            Derived {
                k_sparse: CsrMatrix::from_dense(&k),
                scaled_sparse: scaled.iter().map(CsrMatrix::from_dense).collect(),
                k,
                scaled,
            }
        })
    }

    /// `K = −i·H_eff − ½·w·Σ L†L`, the no-jump part of the generator.
    pub(crate) fn no_jump(&self) -> &ComplexMatrix {
        &self.derived().k
    }

    /// Lindblad operators scaled by the square root of their weight.
    pub(crate) fn scaled_lindblads(&self) -> &[ComplexMatrix] {
        &self.derived().scaled
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::domain(format!(
                "state is {}x{}, generator dimension is {}",
                m.rows(),
                m.cols(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `dρ/dt` evaluated term by term with dense products.
    pub fn rhs(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.rhs_matrix(rho.matrix())
    }

    /// Same as [`rhs`](Self::rhs) for an arbitrary square matrix.
    pub fn rhs_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho)?;
        let (ch, cd) = self.weights();
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        if let Some(h) = &self.hamiltonian {
            out = &out + &h.commutator(rho).scale(-I * ch);
        }
        if let Some(rot) = &self.rotating {
            out = &out + &rot.commutator(rho).scale(-I * cd);
        }
        for l in self.lindblads.iter() {
            let ld = l.adjoint();
            let jump = &(l * rho) * &ld;
            let anti = (&ld * l).anticommutator(rho).scale_real(0.5);
            out = &out + &(&jump - &anti).scale_real(cd);
        }
        Ok(out)
    }

    /// The `dim²×dim²` matrix `G` with `vec(dρ/dt) = G·vec(ρ)` under
    /// row-stacking vectorization.
    pub fn build_superoperator(&self) -> Result<ComplexMatrix> {
        if self.dim > MAX_SUPEROPERATOR_DIM {
            return Err(Error::Size(format!(
                "superoperator for dimension {} exceeds the limit {MAX_SUPEROPERATOR_DIM}",
                self.dim
            )));
        }
        let (_, cd) = self.weights();
        let id = ComplexMatrix::identity(self.dim);
        let h = self.effective_hamiltonian();
        let mut g = (&kron(&h, &id)? - &kron(&id, &h.transpose())?).scale(-I);
        for l in self.lindblads.iter() {
            let ldl = &l.adjoint() * l;
            let term = &(&kron(l, &l.conj())? - &kron(&ldl, &id)?.scale_real(0.5))
                - &kron(&id, &ldl.transpose())?.scale_real(0.5);
            g = &g + &term.scale_real(cd);
        }
        Ok(g)
    }

    /// Rate of amplitude flow from `|v⟩⟨w|` into `|v'⟩⟨w'|`.
    pub fn transition_rate(&self, v: usize, w: usize, v2: usize, w2: usize) -> Result<Complex64> {
        let n = self.dim;
        if [v, w, v2, w2].iter().any(|&i| i >= n) {
            return Err(Error::domain(format!(
                "indices ({v}, {w}, {v2}, {w2}) out of range for dimension {n}"
            )));
        }
        let d = self.derived();
        let mut rate = Complex64::new(0.0, 0.0);
        if w == w2 {
            rate += d.k[(v2, v)];
        }
        if v == v2 {
            rate += d.k[(w2, w)].conj();
        }
        for l in &d.scaled {
            rate += l[(v2, v)] * l[(w2, w)].conj();
        }
        Ok(rate)
    }

    /// State at time `t` via the superoperator exponential.
    pub fn evolve_expm(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        Ok(self.evolve_expm_many(rho0, &[t])?.remove(0))
    }

    /// States at each of `times` via the superoperator exponential. Time
    /// points are independent and evaluated in parallel.
    pub fn evolve_expm_many(
        &self,
        rho0: &DensityMatrix,
        times: &[f64],
    ) -> Result<Vec<DensityMatrix>> {
        self.check_dim(rho0.matrix())?;
        check_times(times, false)?;
        let g = self.build_superoperator()?;
        let v0 = vectorize(rho0.matrix())?;
        times
            .par_iter()
            .map(|&t| {
                if t == 0.0 {
                    return Ok(rho0.clone());
                }
                let s = expm(&g.scale_real(t))?;
                let v = s.mul_vec(&v0)?;
                DensityMatrix::new(devectorize(&v, self.dim)?)
                    .map_err(|e| Error::Numerical(format!("at t = {t}: {e}")))
            })
            .collect()
    }

    /// State at time `t` by adaptive integration.
    pub fn evolve_ode(
        &self,
        rho0: &DensityMatrix,
        t: f64,
        opts: &OdeOptions,
    ) -> Result<DensityMatrix> {
        Ok(self.evolve_ode_many(rho0, &[t], opts)?.remove(0))
    }

    /// States at each of the nondecreasing `times`, integrating once
    /// through all of them.
    pub fn evolve_ode_many(
        &self,
        rho0: &DensityMatrix,
        times: &[f64],
        opts: &OdeOptions,
    ) -> Result<Vec<DensityMatrix>> {
        self.check_dim(rho0.matrix())?;
        check_times(times, true)?;
        let d = self.derived();
        let mut rhs = ode::SparseRhs::new(&d.k_sparse, &d.scaled_sparse, self.dim);
        let raw = ode::integrate(&mut rhs, rho0.matrix().inner(), times, opts)?;
        raw.into_iter()
            .zip(times)
            .map(|(m, &t)| {
                DensityMatrix::new(ComplexMatrix::from_inner(m))
                    .map_err(|e| Error::Numerical(format!("at t = {t}: {e}")))
            })
            .collect()
    }

    /// States at `times` with the chosen method.
    pub fn evolve(
        &self,
        rho0: &DensityMatrix,
        times: &[f64],
        method: &Method,
    ) -> Result<Vec<DensityMatrix>> {
        match method {
            Method::Expm => self.evolve_expm_many(rho0, times),
            Method::Ode(opts) => self.evolve_ode_many(rho0, times, opts),
            Method::Auto(opts) => {
                if self.dim <= AUTO_EXPM_DIM {
                    self.evolve_expm_many(rho0, times)
                } else {
                    self.evolve_ode_many(rho0, times, opts)
                }
            }
        }
    }

    /// Long-time limit reached from `rho0`: evolve over doubling horizons
    /// until `‖dρ/dt‖_max` drops below the residual tolerance.
    pub fn stationary_state(
        &self,
        rho0: &DensityMatrix,
        opts: &StationaryOptions,
    ) -> Result<StationaryState> {
        self.check_dim(rho0.matrix())?;
        let mut state = rho0.clone();
        let mut elapsed = 0.0;
        let mut residual = self.rhs(&state)?.max_abs();
        let mut step = opts.initial_horizon;
        while residual >= opts.residual_tol {
            if elapsed >= opts.max_horizon {
                return Err(Error::NotConverged {
                    horizon: elapsed,
                    residual,
                    state: Box::new(state),
                });
            }
            let dt = step.min(opts.max_horizon - elapsed);
            state = self.evolve(&state, &[dt], &opts.method)?.remove(0);
            elapsed += dt;
            residual = self.rhs(&state)?.max_abs();
            step = elapsed;
        }
        Ok(StationaryState {
            state,
            horizon: elapsed,
            residual,
        })
    }
}

fn check_times(times: &[f64], sorted: bool) -> Result<()> {
    if times.is_empty() {
        return Err(Error::domain("no evaluation times"));
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::domain(format!("time {t} must be finite and ≥ 0")));
    }
    if sorted && times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("times must be nondecreasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    pub initial_horizon: f64,
    pub max_horizon: f64,
    pub residual_tol: f64,
    pub method: Method,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            initial_horizon: 1.0,
            max_horizon: 1e4,
            residual_tol: STATIONARY_RESIDUAL,
            method: Method::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StationaryState {
    pub state: DensityMatrix,
    /// Total evolution time used.
    pub horizon: f64,
    pub residual: f64,
}
