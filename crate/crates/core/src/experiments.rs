//! Ready-made systems and experiment drivers shared by the CLI and tests.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    base_probabilities, line_positions, second_moment, symmetry_deviation, vertex_probabilities,
    Embedding, ProbabilityProfile, ScalingSeries,
};
use crate::error::{Error, Result};
use crate::evolution::{GkslGenerator, Method, OdeOptions};
use crate::graph::{enlarge, Digraph, EnlargedGraph};
use crate::linalg::DensityMatrix;
use crate::operators::{
    adjacency_hamiltonian, corrected_lindblad, enlarged_adjacency_hamiltonian, global_lindblad,
    local_lindblads, rotating_hamiltonian, symmetrized_pair, LindbladSet, SeedFamily,
};

/// Two parents sharing one child: `0 → 2 ← 1`.
pub fn figure1() -> Digraph {
    Digraph::new(3, [(0, 2), (1, 2)]).expect("valid builtin graph")
}

/// Triangle on `{0, 1, 2}` with an extra arc `0 → 3` into a sink.
pub fn figure3() -> Digraph {
    Digraph::new(4, [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1), (0, 3)])
        .expect("valid builtin graph")
}

/// `figure1`, `figure3`, `line:<n>` or `segment:<n>` (both name the
/// symmetric path on `n` vertices).
pub fn builtin_graph(name: &str) -> Result<Digraph> {
    match name {
        "figure1" => return Ok(figure1()),
        "figure3" => return Ok(figure3()),
        _ => {}
    }
    let (kind, n) = name
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("unknown builtin graph '{name}'")))?;
    if kind != "line" && kind != "segment" {
        return Err(Error::Parse(format!("unknown builtin graph '{name}'")));
    }
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad vertex count in '{name}'")))?;
    if n == 0 {
        return Err(Error::Parse("a path needs at least one vertex".into()));
    }
    Ok(Digraph::path(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// One Lindblad operator equal to the adjacency matrix.
    #[serde(rename = "global")]
    Global,
    /// One Lindblad operator per arc.
    #[serde(rename = "local")]
    Local,
    /// Enlarged graph with the Fourier-seeded operator.
    #[serde(rename = "corrected")]
    Corrected,
    /// `Corrected` plus the locally rotating Hamiltonian.
    #[serde(rename = "corrected+rot")]
    CorrectedRot,
    /// Symmetrized operator pair plus the rotating Hamiltonian.
    #[serde(rename = "symmetrized")]
    Symmetrized,
    /// `Symmetrized` mixed with the enlarged adjacency Hamiltonian by `ω`.
    #[serde(rename = "weighted")]
    Weighted,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Global,
        Model::Local,
        Model::Corrected,
        Model::CorrectedRot,
        Model::Symmetrized,
        Model::Weighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Global => "global",
            Model::Local => "local",
            Model::Corrected => "corrected",
            Model::CorrectedRot => "corrected+rot",
            Model::Symmetrized => "symmetrized",
            Model::Weighted => "weighted",
        }
    }

    /// Whether the model lives on the enlarged graph.
    pub fn is_enlarged(self) -> bool {
        !matches!(self, Model::Global | Model::Local)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown model '{s}'")))
    }
}

/// A generator together with the graph it walks on.
#[derive(Debug, Clone)]
pub struct System {
    model: Model,
    graph: Digraph,
    enlarged: Option<EnlargedGraph>,
    generator: GkslGenerator,
}

impl System {
    /// Assembles `model` on `graph`.
    ///
    /// `omega` is required for `weighted`. For `global` and `local` it selects
    /// `−i(1−ω)[H, ρ] + ω·D(ρ)` with `H` the adjacency matrix of the symmetric
    /// closure. Other models take no weight.
    pub fn build(graph: Digraph, model: Model, omega: Option<f64>) -> Result<Self> {
        let (enlarged, generator) = match model {
            Model::Global | Model::Local => {
                let ls = if model == Model::Global {
                    global_lindblad(&graph)
                } else {
                    local_lindblads(&graph)
                };
                let mut gen = GkslGenerator::new(ls);
                if let Some(w) = omega {
                    gen = gen
                        .with_hamiltonian(adjacency_hamiltonian(&graph.symmetric_closure())?)?
                        .with_omega(w)?;
                }
                (None, gen)
            }
            _ => {
                if omega.is_some() && model != Model::Weighted {
                    return Err(Error::domain(format!("model '{model}' takes no omega")));
                }
                let eg = enlarge(&graph);
                let dim = eg.total_dim();
                let gen = match model {
                    Model::Corrected | Model::CorrectedRot => {
                        let l = corrected_lindblad(&eg, &SeedFamily::Fourier)?;
                        let gen = GkslGenerator::new(LindbladSet::new(dim, vec![l])?);
                        if model == Model::CorrectedRot {
                            gen.with_rotating(rotating_hamiltonian(&eg))?
                        } else {
                            gen
                        }
                    }
                    _ => {
                        let (l1, l2) = symmetrized_pair(&eg)?;
                        let h = enlarged_adjacency_hamiltonian(&l1);
                        let gen = GkslGenerator::new(LindbladSet::new(dim, vec![l1, l2])?)
                            .with_rotating(rotating_hamiltonian(&eg))?;
                        if model == Model::Weighted {
                            let w = omega
                                .ok_or_else(|| Error::domain("model 'weighted' requires omega"))?;
                            gen.with_hamiltonian(h)?.with_omega(w)?
                        } else {
                            gen
                        }
                    }
                };
                (Some(eg), gen)
            }
        };
        Ok(Self {
            model,
            graph,
            enlarged,
            generator,
        })
    }

    /// Fourier-seeded corrected operator alone with the rotating
    /// Hamiltonian; the unsymmetrized counterpart of `symmetrized`.
    pub fn single_fourier_with_rotation(graph: Digraph) -> Result<Self> {
        Self::build(graph, Model::CorrectedRot, None)
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn enlarged(&self) -> Option<&EnlargedGraph> {
        self.enlarged.as_ref()
    }

    pub fn generator(&self) -> &GkslGenerator {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn embedding(&self) -> Embedding<'_> {
        match &self.enlarged {
            Some(eg) => Embedding::Enlarged(eg),
            None => Embedding::Identity,
        }
    }

    /// State-space index of copy `copy` of `vertex`.
    pub fn index(&self, vertex: usize, copy: usize) -> Result<usize> {
        if vertex >= self.graph.n() {
            return Err(Error::domain(format!("vertex {vertex} out of range")));
        }
        match &self.enlarged {
            Some(eg) if copy < eg.block_len(vertex) => Ok(eg.index(vertex, copy)),
            None if copy == 0 => Ok(vertex),
            _ => Err(Error::domain(format!("vertex {vertex} has no copy {copy}"))),
        }
    }

    pub fn initial_state(&self, init: &InitialState) -> Result<DensityMatrix> {
        match init {
            InitialState::Vertex(v) => {
                let v = *v;
                if v >= self.graph.n() {
                    return Err(Error::domain(format!("vertex {v} out of range")));
                }
                match &self.enlarged {
                    Some(eg) => DensityMatrix::uniform_mixture(
                        eg.total_dim(),
                        &eg.block(v).collect::<Vec<_>>(),
                    ),
                    None => DensityMatrix::basis(self.dim(), v),
                }
            }
            InitialState::Copy { vertex, copy } => {
                DensityMatrix::basis(self.dim(), self.index(*vertex, *copy)?)
            }
            InitialState::State(rho) => {
                if rho.dim() != self.dim() {
                    return Err(Error::domain(format!(
                        "initial state has dimension {}, system has {}",
                        rho.dim(),
                        self.dim()
                    )));
                }
                Ok(rho.clone())
            }
        }
    }

    pub fn profile(&self, rho: &DensityMatrix) -> Result<ProbabilityProfile> {
        match &self.enlarged {
            Some(eg) => vertex_probabilities(eg, rho),
            None => {
                if rho.dim() != self.dim() {
                    return Err(Error::domain("state dimension does not match the graph"));
                }
                base_probabilities(rho)
            }
        }
    }

    pub fn evolve(
        &self,
        rho0: &DensityMatrix,
        times: &[f64],
        method: &Method,
    ) -> Result<Vec<DensityMatrix>> {
        self.generator.evolve(rho0, times, method)
    }
}

/// Starting state of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Uniform mixture over all copies of the vertex (the vertex itself for
    /// base-graph models).
    Vertex(usize),
    /// A single basis state.
    Copy {
        vertex: usize,
        copy: usize,
    },
    State(DensityMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    Explicit(Vec<f64>),
    Grid {
        start: f64,
        stop: f64,
        count: usize,
        spacing: Spacing,
    },
}

impl TimeGrid {
    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        TimeGrid::Grid {
            start,
            stop,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        TimeGrid::Grid {
            start,
            stop,
            count,
            spacing: Spacing::Linear,
        }
    }

    /// Nondecreasing nonnegative time points. Log grids need `start > 0`.
    pub fn times(&self) -> Result<Vec<f64>> {
        let ts = match self {
            TimeGrid::Explicit(ts) => ts.clone(),
            TimeGrid::Grid {
                start,
                stop,
                count,
                spacing,
            } => {
                let (a, b, n) = (*start, *stop, *count);
                if n == 0 || !a.is_finite() || !b.is_finite() || b < a {
                    return Err(Error::domain(format!(
                        "invalid time grid {a}..{b} with {n} points"
                    )));
                }
                if n == 1 {
                    vec![a]
                } else {
                    let step = |k: usize| k as f64 / (n - 1) as f64;
                    match spacing {
                        Spacing::Linear => (0..n)
                            .map(|k| if k == n - 1 { b } else { a + (b - a) * step(k) })
                            .collect(),
                        Spacing::Log => {
                            if a <= 0.0 {
                                return Err(Error::domain("log-spaced times must be positive"));
                            }
                            let (la, lb) = (a.ln(), b.ln());
                            (0..n)
                                .map(|k| {
                                    if k == n - 1 {
                                        b
                                    } else {
                                        (la + (lb - la) * step(k)).exp()
                                    }
                                })
                                .collect()
                        }
                    }
                }
            }
        };
        if ts.is_empty() {
            return Err(Error::domain("no time points"));
        }
        if ts.iter().any(|t| !t.is_finite() || *t < 0.0) || ts.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain(
                "times must be finite, nonnegative and nondecreasing",
            ));
        }
        Ok(ts)
    }
}

/// Worst-case invariant violations over a set of states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conservation {
    pub max_trace_error: f64,
    pub max_hermitian_defect: f64,
    pub min_eigenvalue: f64,
}

impl Conservation {
    pub fn of<'a>(states: impl IntoIterator<Item = &'a DensityMatrix>) -> Result<Self> {
        let mut c = Conservation {
            max_trace_error: 0.0,
            max_hermitian_defect: 0.0,
            min_eigenvalue: f64::INFINITY,
        };
        for s in states {
            c.max_trace_error = c.max_trace_error.max((s.matrix().trace() - 1.0).norm());
            c.max_hermitian_defect = c.max_hermitian_defect.max(s.matrix().hermitian_defect());
            c.min_eigenvalue = c.min_eigenvalue.min(s.min_eigenvalue());
        }
        Ok(c)
    }

    pub fn merge(self, other: Self) -> Self {
        Conservation {
            max_trace_error: self.max_trace_error.max(other.max_trace_error),
            max_hermitian_defect: self.max_hermitian_defect.max(other.max_hermitian_defect),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }
}

/// Profiles at each requested time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub profiles: Vec<ProbabilityProfile>,
}

impl Trajectory {
    pub fn conservation(&self) -> Result<Conservation> {
        Conservation::of(&self.states)
    }
}

pub fn simulate(
    system: &System,
    init: &InitialState,
    times: &[f64],
    method: &Method,
) -> Result<Trajectory> {
    let rho0 = system.initial_state(init)?;
    let states = system.evolve(&rho0, times, method)?;
    let profiles = states
        .iter()
        .zip(times)
        .map(|(s, t)| {
            system
                .profile(s)
                .map_err(|e| Error::Numerical(format!("at t = {t}: {e}")))
        })
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        profiles,
    })
}

/// Second-moment growth of a walk started at `center` of a path.
#[derive(Debug, Clone)]
pub struct ScalingRun {
    pub label: String,
    pub omega: Option<f64>,
    pub series: ScalingSeries,
    pub conservation: Conservation,
}

/// Evolves from the mixture over copies of `center` and regresses `μ₂`
/// about `center`.
pub fn scaling_run(
    label: impl Into<String>,
    system: &System,
    center: usize,
    times: &[f64],
    window: usize,
    opts: &OdeOptions,
) -> Result<ScalingRun> {
    let traj = simulate(
        system,
        &InitialState::Vertex(center),
        times,
        &Method::Ode(*opts),
    )?;
    let positions = line_positions(system.graph().n(), center);
    let mu2 = traj
        .profiles
        .iter()
        .map(|p| second_moment(&positions, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingRun {
        label: label.into(),
        omega: system.generator().omega(),
        series: ScalingSeries::new(times.to_vec(), mu2, window)?,
        conservation: traj.conservation()?,
    })
}

/// Weighted-model scaling runs on a path of `n` vertices, one per `ω`,
/// returned in the order of `omegas`.
pub fn scaling_sweep(
    n: usize,
    omegas: &[f64],
    times: &[f64],
    window: usize,
    opts: &OdeOptions,
) -> Result<Vec<ScalingRun>> {
    let center = n / 2;
    omegas
        .par_iter()
        .map(|&w| {
            let sys = System::build(Digraph::path(n), Model::Weighted, Some(w))?;
            scaling_run(format!("omega={w}"), &sys, center, times, window, opts)
        })
        .collect()
}

/// Profile at time `t` and its deviation from mirror symmetry about `center`.
#[derive(Debug, Clone)]
pub struct SymmetryRun {
    pub profile: ProbabilityProfile,
    pub deviation: f64,
    pub conservation: Conservation,
}

pub fn symmetry_run(
    system: &System,
    center: usize,
    t: f64,
    method: &Method,
) -> Result<SymmetryRun> {
    let traj = simulate(system, &InitialState::Vertex(center), &[t], method)?;
    let profile = traj.profiles[0].clone();
    Ok(SymmetryRun {
        deviation: symmetry_deviation(&profile, center)?,
        conservation: traj.conservation()?,
        profile,
    })
}
