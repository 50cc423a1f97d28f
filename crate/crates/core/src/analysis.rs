//! Observables and diagnostics on evolved states.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::evolution::GkslGenerator;
use crate::graph::{Digraph, EnlargedGraph};
use crate::linalg::{linear_fit, DensityMatrix};
use crate::tolerances::{DIAGONAL_IMAG_TOL, PROBABILITY_FLOOR, PROFILE_SUM_TOL, RATE_THRESHOLD};

/// Default number of consecutive points per regression window.
pub const DEFAULT_WINDOW: usize = 10;

/// Probability of finding the walker at each base vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityProfile(Vec<f64>);

impl ProbabilityProfile {
    /// Validates that entries are (numerically) nonnegative and sum to one.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::domain("empty probability profile"));
        }
        if let Some((v, x)) = p
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < PROBABILITY_FLOOR)
        {
            return Err(Error::Numerical(format!("probability {x:e} at vertex {v}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROFILE_SUM_TOL {
            return Err(Error::Numerical(format!("probabilities sum to {sum}")));
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<f64> {
        self.0.get(v).copied()
    }
}

/// Sums the diagonal of `rho` over each vertex's block of copies.
pub fn vertex_probabilities(eg: &EnlargedGraph, rho: &DensityMatrix) -> Result<ProbabilityProfile> {
    if rho.dim() != eg.total_dim() {
        return Err(Error::domain(format!(
            "state dimension {} does not match enlarged dimension {}",
            rho.dim(),
            eg.total_dim()
        )));
    }
    let m = rho.matrix();
    let mut p = Vec::with_capacity(eg.base().n());
    for v in 0..eg.base().n() {
        let mut acc = 0.0;
        for i in eg.block(v) {
            let z = m[(i, i)];
            if z.im.abs() >= DIAGONAL_IMAG_TOL {
                return Err(Error::Numerical(format!(
                    "diagonal entry {i} has imaginary part {:e}",
                    z.im
                )));
            }
            acc += z.re;
        }
        p.push(acc);
    }
    ProbabilityProfile::new(p)
}

/// Profile of a state living directly on the base vertices.
pub fn base_probabilities(rho: &DensityMatrix) -> Result<ProbabilityProfile> {
    let m = rho.matrix();
    ProbabilityProfile::new((0..rho.dim()).map(|i| m[(i, i)].re).collect())
}

/// `Σ p(v)·x(v)²`.
pub fn second_moment(positions: &[f64], profile: &ProbabilityProfile) -> Result<f64> {
    if positions.len() != profile.len() {
        return Err(Error::domain(format!(
            "{} positions for {} vertices",
            positions.len(),
            profile.len()
        )));
    }
    Ok(positions
        .iter()
        .zip(profile.as_slice())
        .map(|(x, p)| p * x * x)
        .sum())
}

/// Integer coordinates on a path of `n` vertices with the origin at `center`.
pub fn line_positions(n: usize, center: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 - center as f64).collect()
}

/// Second moments over time together with windowed log-log slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSeries {
    times: Vec<f64>,
    mu2: Vec<f64>,
    window: usize,
    slopes: Vec<f64>,
}

impl ScalingSeries {
    pub fn new(times: Vec<f64>, mu2: Vec<f64>, window: usize) -> Result<Self> {
        let slopes = scaling_slopes(&times, &mu2, window)?;
        Ok(Self {
            times,
            mu2,
            window,
            slopes,
        })
    }

    pub fn with_default_window(times: Vec<f64>, mu2: Vec<f64>) -> Result<Self> {
        Self::new(times, mu2, DEFAULT_WINDOW)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn mu2(&self) -> &[f64] {
        &self.mu2
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Slope `k` covers points `k .. k + window`.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn final_slope(&self) -> f64 {
        *self.slopes.last().expect("series has at least one window")
    }
}

/// OLS slope of `ln μ₂` against `ln t` over each run of `window`
/// consecutive points.
pub fn scaling_slopes(times: &[f64], mu2: &[f64], window: usize) -> Result<Vec<f64>> {
    if times.len() != mu2.len() {
        return Err(Error::domain(format!(
            "{} times but {} moments",
            times.len(),
            mu2.len()
        )));
    }
    if window < 2 || times.len() < window {
        return Err(Error::domain(format!(
            "need at least {window} points (window ≥ 2), got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("times must be strictly increasing"));
    }
    if let Some(x) = times
        .iter()
        .chain(mu2)
        .find(|x| !(x.is_finite() && **x > 0.0))
    {
        return Err(Error::domain(format!(
            "log-log regression needs positive values, got {x}"
        )));
    }
    let lt: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let lm: Vec<f64> = mu2.iter().map(|m| m.ln()).collect();
    (0..=times.len() - window)
        .map(|k| linear_fit(&lt[k..k + window], &lm[k..k + window]).map(|(s, _)| s))
        .collect()
}

/// `max_k |p(c+k) − p(c−k)|` over offsets with both ends on the path.
pub fn symmetry_deviation(profile: &ProbabilityProfile, center: usize) -> Result<f64> {
    let n = profile.len();
    if center >= n {
        return Err(Error::domain(format!(
            "center {center} outside path of {n} vertices"
        )));
    }
    let p = profile.as_slice();
    let reach = center.min(n - 1 - center);
    Ok((1..=reach)
        .map(|k| (p[center + k] - p[center - k]).abs())
        .fold(0.0, f64::max))
}

/// How generator indices map to base vertices.
#[derive(Debug, Clone, Copy)]
pub enum Embedding<'a> {
    /// Generator acts on the base vertices directly.
    Identity,
    /// Generator acts on the enlarged graph of the base.
    Enlarged(&'a EnlargedGraph),
}

/// Unordered pairs `{a, b}` of distinct non-adjacent base vertices between
/// which the generator moves amplitude, i.e. some rate from `|ṽ⟩⟨w̃|` to
/// `|ṽ'⟩⟨w̃|` with representatives `a`, `b` exceeds the detection threshold.
pub fn detect_moralization(
    gen: &GkslGenerator,
    g: &Digraph,
    embed: Embedding<'_>,
) -> Result<BTreeSet<(usize, usize)>> {
    let rep: Vec<usize> = match embed {
        Embedding::Identity => {
            if gen.dim() != g.n() {
                return Err(Error::domain(format!(
                    "generator dimension {} differs from vertex count {}",
                    gen.dim(),
                    g.n()
                )));
            }
            (0..g.n()).collect()
        }
        Embedding::Enlarged(eg) => {
            if eg.base() != g || eg.total_dim() != gen.dim() {
                return Err(Error::domain(
                    "embedding is inconsistent with graph or generator",
                ));
            }
            (0..eg.total_dim()).map(|i| eg.representative(i)).collect()
        }
    };
    // With w = w' and v ≠ v' the rate is K[v'][v] + Σ L[v'][v]·conj(L[w][w]).
    let k = gen.no_jump();
    let ls = gen.scaled_lindblads();
    let d = gen.dim();
    let mut found = BTreeSet::new();
    for v in 0..d {
        for v2 in 0..d {
            let (a, b) = (rep[v].min(rep[v2]), rep[v].max(rep[v2]));
            if a == b || g.adjacent(a, b) || found.contains(&(a, b)) {
                continue;
            }
            let moves = (0..d).any(|w| {
                let mut rate = k[(v2, v)];
                for l in ls {
                    rate += l[(v2, v)] * l[(w, w)].conj();
                }
                rate.norm() > RATE_THRESHOLD
            });
            if moves {
                found.insert((a, b));
            }
        }
    }
    Ok(found)
}
