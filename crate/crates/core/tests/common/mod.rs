#![allow(dead_code)]

use teamdiff_core::graph::{build_team_graph, random_cross_links, GraphKind, NetworkTopology, Team};
use teamdiff_core::linalg::Matrix;
use teamdiff_core::QuadraticZeroSumGame;

pub fn ring_pair(k: usize, links_per_direction: usize, seed: u64) -> NetworkTopology {
    let g1 = build_team_graph(Team::One, GraphKind::Ring, k).unwrap();
    let g2 = build_team_graph(Team::Two, GraphKind::Ring, k).unwrap();
    let links = random_cross_links([k, k], links_per_direction, seed).unwrap();
    NetworkTopology::new(g1, g2, links).unwrap()
}

pub fn coupling() -> Matrix {
    Matrix::from_row_slice(2, 2, &[0.5, 0.2, -0.1, 0.4])
}

/// The 2+2 dimensional game used across the engine and diagnostics tests.
pub fn quadratic(k: usize, sigma: f64) -> QuadraticZeroSumGame {
    QuadraticZeroSumGame::with_random_shifts(
        Matrix::identity(2, 2),
        Matrix::identity(2, 2),
        coupling(),
        vec![1.0, -0.5],
        vec![0.3, 0.8],
        [k, k],
        1.0,
        1,
        sigma,
    )
    .unwrap()
}

pub fn zero_game(k: usize, m: usize) -> QuadraticZeroSumGame {
    QuadraticZeroSumGame::new(
        Matrix::zeros(m, m),
        Matrix::zeros(m, m),
        Matrix::zeros(m, m),
        vec![0.0; m],
        vec![0.0; m],
        vec![vec![0.0; m]; k],
        vec![vec![0.0; m]; k],
        0.0,
    )
    .unwrap()
}
