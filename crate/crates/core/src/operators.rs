//! Hamiltonians and Lindblad operators for the base and enlarged graphs.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Digraph, EnlargedGraph};
use crate::linalg::ComplexMatrix;
use crate::tolerances::SEED_GRAM_TOL;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A collection of Lindblad operators of one common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSet {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl LindbladSet {
    pub fn new(dim: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        for (k, op) in ops.iter().enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::domain(format!(
                    "Lindblad operator {k} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            ops: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexMatrix> {
        self.ops.iter()
    }

    /// Entrywise sum of all operators.
    pub fn sum(&self) -> ComplexMatrix {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, op| {
                &acc + op
            })
    }
}

/// Seed matrices `A_v` supplying the amplitudes into the copies of `v`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedFamily {
    /// Unnormalized Fourier matrix of size `indeg(v)` for every vertex.
    Fourier,
    /// One matrix per vertex with positive indegree.
    ExplicitPerVertex(BTreeMap<usize, ComplexMatrix>),
}

impl SeedFamily {
    /// The seed for vertex `v` of indegree `d > 0`, checked for shape and
    /// column orthogonality.
    pub fn seed(&self, v: usize, d: usize) -> Result<ComplexMatrix> {
        let a = match self {
            SeedFamily::Fourier => fourier_seed(d)?,
            SeedFamily::ExplicitPerVertex(map) => map
                .get(&v)
                .cloned()
                .ok_or_else(|| Error::domain(format!("no seed matrix for vertex {v}")))?,
        };
        if a.rows() != d || a.cols() != d {
            return Err(Error::domain(format!(
                "seed for vertex {v} is {}x{}, indegree is {d}",
                a.rows(),
                a.cols()
            )));
        }
        let gram = &a.adjoint() * &a;
        for i in 0..d {
            for j in 0..d {
                if i != j && gram[(i, j)].norm() > SEED_GRAM_TOL {
                    return Err(Error::domain(format!(
                        "seed for vertex {v}: columns {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        Ok(a)
    }
}

/// Adjacency matrix with `A[w][v] = 1` for every arc `(v, w)`.
pub fn adjacency_matrix(g: &Digraph) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(g.n(), g.n());
    for (v, w) in g.arcs() {
        a[(w, v)] = ONE;
    }
    a
}

/// Adjacency matrix as a Hamiltonian; the graph must be symmetric.
pub fn adjacency_hamiltonian(g: &Digraph) -> Result<ComplexMatrix> {
    if !g.is_symmetric() {
        return Err(Error::domain(
            "adjacency Hamiltonian requires a symmetric graph (otherwise it is not Hermitian)",
        ));
    }
    Ok(adjacency_matrix(g))
}

/// The global-interaction choice: a single operator equal to the adjacency matrix.
pub fn global_lindblad(g: &Digraph) -> LindbladSet {
    LindbladSet {
        dim: g.n(),
        ops: vec![adjacency_matrix(g)],
    }
}

/// The local-interaction choice: `|w⟩⟨v|` for every arc `(v, w)`.
pub fn local_lindblads(g: &Digraph) -> LindbladSet {
    let n = g.n();
    let ops = g
        .arcs()
        .map(|(v, w)| {
            let mut op = ComplexMatrix::zeros(n, n);
            op[(w, v)] = ONE;
            op
        })
        .collect();
    LindbladSet { dim: n, ops }
}

/// `⟨k|A|l⟩ = exp(2πi·k·l/d)`, unnormalized.
pub fn fourier_seed(d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::domain("Fourier seed needs d ≥ 1"));
    }
    Ok(ComplexMatrix::from_fn(d, d, |k, l| {
        // Reduce k·l mod d first so the phase stays exact for large products.
        let phase = 2.0 * PI * ((k * l) % d) as f64 / d as f64;
        Complex64::from_polar(1.0, phase)
    }))
}

/// Lindblad operator of the corrected walk on the enlarged graph.
///
/// For an arc `(u, v)`, every copy of `u` sends amplitude `⟨k|A_v|r⟩` to
/// copy `k` of `v`, where `r` is the rank of `u` among the parents of `v`.
/// The amplitude does not depend on which copy of `u` is the source.
pub fn corrected_lindblad(eg: &EnlargedGraph, seeds: &SeedFamily) -> Result<ComplexMatrix> {
    let g = eg.base();
    let dim = eg.total_dim();
    let mut l = ComplexMatrix::zeros(dim, dim);
    for v in 0..g.n() {
        let parents = g.parents(v);
        if parents.is_empty() {
            continue;
        }
        let a = seeds.seed(v, parents.len())?;
        for (rank, &u) in parents.iter().enumerate() {
            for k in 0..parents.len() {
                let target = eg.index(v, k);
                for source in eg.block(u) {
                    l[(target, source)] = a[(k, rank)];
                }
            }
        }
    }
    Ok(l)
}

/// Seeds for the symmetrized pair: `[[1,1],[1,−1]]` and `[[1,1],[−1,1]]`
/// on indegree-2 vertices, `[1]` on indegree-1 vertices.
fn symmetrized_seeds(eg: &EnlargedGraph) -> Result<(SeedFamily, SeedFamily)> {
    let g = eg.base();
    let a1 = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]])?;
    let a2 = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[-1.0, 1.0]])?;
    let one = ComplexMatrix::identity(1);
    let mut first = BTreeMap::new();
    let mut second = BTreeMap::new();
    for v in 0..g.n() {
        match g.parents(v).len() {
            0 => {}
            1 => {
                first.insert(v, one.clone());
                second.insert(v, one.clone());
            }
            2 => {
                first.insert(v, a1.clone());
                second.insert(v, a2.clone());
            }
            d => {
                return Err(Error::UnsupportedGraph(format!(
                    "symmetrized pair is defined for indegrees 0, 1, 2; vertex {v} has {d}"
                )))
            }
        }
    }
    Ok((
        SeedFamily::ExplicitPerVertex(first),
        SeedFamily::ExplicitPerVertex(second),
    ))
}

/// The two Lindblad operators of the symmetrized walk.
pub fn symmetrized_pair(eg: &EnlargedGraph) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (s1, s2) = symmetrized_seeds(eg)?;
    Ok((corrected_lindblad(eg, &s1)?, corrected_lindblad(eg, &s2)?))
}

/// Locally rotating Hamiltonian: within each copy block of size `d ≥ 2`,
/// `i` on `(k, k+1 mod d)` and `−i` on `(k, k−1 mod d)`.
///
/// For `d = 2` both rules hit the same pair; the result is `⟨0|H|1⟩ = i`,
/// `⟨1|H|0⟩ = −i`.
pub fn rotating_hamiltonian(eg: &EnlargedGraph) -> ComplexMatrix {
    let dim = eg.total_dim();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for v in 0..eg.base().n() {
        let d = eg.block_len(v);
        if d < 2 {
            continue;
        }
        if d == 2 {
            let (a, b) = (eg.index(v, 0), eg.index(v, 1));
            h[(a, b)] = I;
            h[(b, a)] = -I;
            continue;
        }
        for k in 0..d {
            let row = eg.index(v, k);
            h[(row, eg.index(v, (k + 1) % d))] = I;
            h[(row, eg.index(v, (k + d - 1) % d))] = -I;
        }
    }
    h
}

/// 0/1 indicator of the support of `l1`.
pub fn enlarged_adjacency_hamiltonian(l1: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(l1.rows(), l1.cols(), |i, j| {
        if l1[(i, j)].norm() != 0.0 {
            ONE
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
