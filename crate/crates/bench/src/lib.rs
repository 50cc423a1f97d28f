//! Fixtures shared by the benchmarks.

use qsw_core::experiments::{Model, System};
use qsw_core::{Complex64, ComplexMatrix, DensityMatrix, Digraph};

/// Weighted walk on a path of `n` vertices and the mixed state at its centre.
pub fn weighted_line(n: usize, omega: f64) -> (System, DensityMatrix) {
    let sys =
        System::build(Digraph::path(n), Model::Weighted, Some(omega)).expect("valid path system");
    let rho = sys
        .initial_state(&qsw_core::experiments::InitialState::Vertex(n / 2))
        .expect("centre vertex exists");
    (sys, rho)
}

/// Deterministic dense matrix with entries of moderate size.
pub fn dense_matrix(n: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let x = ((i * 31 + j * 17) % 23) as f64 / 23.0 - 0.5;
        let y = ((i * 7 + j * 29) % 19) as f64 / 19.0 - 0.5;
        Complex64::new(x, y) * (scale / n as f64)
    })
}

/// Connected pseudo-random digraph: a directed cycle plus chords.
pub fn chorded_cycle(n: usize) -> Digraph {
    let mut arcs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for i in 0..n {
        let j = (i * 5 + 3) % n;
        if j != i && j != (i + 1) % n {
            arcs.push((i, j));
        }
    }
    arcs.sort();
    arcs.dedup();
    Digraph::new(n, arcs).expect("valid chorded cycle")
}
